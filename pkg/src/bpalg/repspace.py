"""Subquotients of l_p^N, isometric representations on them, and coefficient functions.

A space ``E = S / Q`` is stored through two ambient basis matrices with
``span Q ⊆ span S``.  Vectors of ``E`` are coordinate vectors ``a`` with
respect to the columns of ``S``; the ambient vector is ``S @ a`` and the norm
is the distance from ``S @ a`` to ``span Q``.  Functionals on ``E`` are
ambient vectors ``psi`` with ``Q.T @ psi = 0``, paired bilinearly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import block_diag, null_space

from .groups import FiniteGroup, GroupError, GroupFunction, characters, group_from_spec
from .lp import (DEFAULT_SEED, DimensionError, PNorm, _orth, as_pnorm, norming_functional,
                 op_norm, quotient_argmin, quotient_norm, quotient_norming_functional,
                 vec_norm)

ISOMETRY_TOL = 1e-8


class RepresentationError(ValueError):
    """A candidate representation is not a homomorphism into isometries."""


def _as_basis(B, n_rows: int) -> np.ndarray:
    if B is None:
        return np.zeros((n_rows, 0), dtype=complex)
    B = np.asarray(B, dtype=complex)
    if B.ndim == 1:
        B = B[:, None]
    if B.shape[0] != n_rows:
        raise DimensionError(f"basis has {B.shape[0]} rows, ambient dimension is {n_rows}")
    return B


class SubquotientSpace:
    """The space ``span(S) / span(Q)`` inside ``l_p^N``."""

    def __init__(self, ambient_dim: int, p, S=None, Q=None, check: bool = True):
        self.ambient_dim = int(ambient_dim)
        self.pnorm = as_pnorm(p)
        S = np.eye(self.ambient_dim, dtype=complex) if S is None else _as_basis(S, self.ambient_dim)
        Q = _as_basis(Q, self.ambient_dim)
        if check:
            if S.shape[1] and np.linalg.matrix_rank(S) < S.shape[1]:
                raise DimensionError("columns of S are linearly dependent")
            if Q.shape[1]:
                coef = np.linalg.lstsq(S, Q, rcond=None)[0]
                if np.abs(S @ coef - Q).max() > 1e-9 * max(1.0, np.abs(Q).max()):
                    raise DimensionError("span(Q) is not contained in span(S)")
        Q = _orth(Q) if Q.shape[1] else Q
        S.setflags(write=False)
        Q.setflags(write=False)
        self.S = S
        self.Q = Q

    @classmethod
    def full(cls, n: int, p) -> "SubquotientSpace":
        return cls(n, p)

    @classmethod
    def subspace(cls, S, p) -> "SubquotientSpace":
        S = _as_basis(S, np.asarray(S).shape[0])
        return cls(S.shape[0], p, S)

    @property
    def p(self) -> float:
        return self.pnorm.p

    @property
    def coord_dim(self) -> int:
        return self.S.shape[1]

    @property
    def dim(self) -> int:
        return self.S.shape[1] - self.Q.shape[1]

    @cached_property
    def is_full(self) -> bool:
        return (self.Q.shape[1] == 0 and self.S.shape[1] == self.ambient_dim
                and np.array_equal(self.S, np.eye(self.ambient_dim)))

    @cached_property
    def S_pinv(self) -> np.ndarray:
        return np.linalg.pinv(self.S)

    @cached_property
    def Q_coords(self) -> np.ndarray:
        """Columns of Q expressed in S-coordinates."""
        return self.S_pinv @ self.Q

    @cached_property
    def annihilator_of_S(self) -> np.ndarray:
        """Basis of ``{psi : S.T psi = 0}``."""
        if self.S.shape[1] == 0:
            return np.eye(self.ambient_dim, dtype=complex)
        return null_space(self.S.T)

    @cached_property
    def annihilator_of_Q(self) -> np.ndarray:
        if self.Q.shape[1] == 0:
            return np.eye(self.ambient_dim, dtype=complex)
        return null_space(self.Q.T)

    @cached_property
    def complement_basis(self) -> np.ndarray:
        """Orthonormal (l_2) basis of ``span S ⊖ span Q``, the Hilbert model of E."""
        Sp = _orth(self.S)
        if self.Q.shape[1] == 0:
            return Sp
        C = Sp - self.Q @ (self.Q.conj().T @ Sp)
        return _orth(C)

    def ambient(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        if a.shape[0] != self.coord_dim:
            raise DimensionError(f"vector has {a.shape[0]} coordinates, space has {self.coord_dim}")
        return self.S @ a

    def coordinates(self, v) -> np.ndarray:
        """S-coordinates of an ambient vector lying in span S."""
        return self.S_pinv @ np.asarray(v, dtype=complex)

    def norm(self, a) -> float:
        """Norm of the coset of ``a`` (S-coordinates)."""
        v = self.ambient(a)
        if self.Q.shape[1] == 0:
            return vec_norm(v, self.pnorm)
        return quotient_norm(v, self.Q, self.pnorm)

    def argmin(self, a):
        """``(norm, minimal ambient representative)`` of the coset of ``a``."""
        return quotient_argmin(self.ambient(a), self.Q, self.pnorm)

    def norming_functional(self, a) -> np.ndarray:
        """Ambient unit functional in ``E*`` (vanishes on Q) attaining the norm of ``a``."""
        return quotient_norming_functional(self.ambient(a), self.Q, self.pnorm)

    def is_zero(self, a, tol: float = 1e-9) -> bool:
        v = self.ambient(a)
        if self.Q.shape[1] == 0:
            return bool(np.abs(v).max(initial=0.0) <= tol)
        r = v - self.Q @ (self.Q.conj().T @ v)
        return bool(np.abs(r).max(initial=0.0) <= tol * max(1.0, np.abs(v).max()))

    def random_vector(self, rng: np.random.Generator) -> np.ndarray:
        m = self.coord_dim
        return rng.standard_normal(m) + 1j * rng.standard_normal(m)

    def same_as(self, other: "SubquotientSpace") -> bool:
        return (self is other or (self.ambient_dim == other.ambient_dim
                                  and self.pnorm == other.pnorm
                                  and self.S.shape == other.S.shape
                                  and self.Q.shape == other.Q.shape
                                  and np.allclose(self.S, other.S, atol=1e-12)
                                  and np.allclose(self.Q, other.Q, atol=1e-12)))

    def with_exponent(self, p) -> "SubquotientSpace":
        return SubquotientSpace(self.ambient_dim, p, self.S, self.Q, check=False)

    def to_json(self) -> dict:
        def enc(M):
            return {"re": M.real.tolist(), "im": M.imag.tolist(), "shape": list(M.shape)}
        return {"ambient_dim": self.ambient_dim, "p": self.p, "S": enc(self.S), "Q": enc(self.Q)}

    @classmethod
    def from_json(cls, data: dict) -> "SubquotientSpace":
        def dec(d):
            arr = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
            return arr.reshape(d["shape"])
        return cls(data["ambient_dim"], data["p"], dec(data["S"]), dec(data["Q"]))

    def __repr__(self):
        return (f"SubquotientSpace(N={self.ambient_dim}, p={self.pnorm.label()}, "
                f"dim S={self.S.shape[1]}, dim Q={self.Q.shape[1]})")


def dual_space(E: SubquotientSpace) -> SubquotientSpace:
    """``E* = Q^⊥ / S^⊥`` inside ``l_{p'}^N`` (bilinear annihilators)."""
    return SubquotientSpace(E.ambient_dim, E.pnorm.conjugate, E.annihilator_of_Q,
                            E.annihilator_of_S, check=False)


@dataclass(frozen=True, eq=False)
class DualVector:
    """A functional on ``space``, stored as an ambient vector annihilating Q."""

    space: SubquotientSpace
    ambient: np.ndarray

    def __post_init__(self):
        psi = np.array(self.ambient, dtype=complex).reshape(-1)
        if psi.shape[0] != self.space.ambient_dim:
            raise DimensionError("functional has the wrong ambient dimension")
        Q = self.space.Q
        if Q.shape[1]:
            leak = np.abs(Q.T @ psi).max()
            if leak > 1e-8 * max(1.0, np.abs(psi).max()):
                raise DimensionError(f"functional does not vanish on Q (leak {leak:.2e})")
        psi.setflags(write=False)
        object.__setattr__(self, "ambient", psi)

    @classmethod
    def from_coordinates(cls, space: SubquotientSpace, c) -> "DualVector":
        """Build from coordinates in the S-basis of ``dual_space(space)``."""
        return cls(space, space.annihilator_of_Q @ np.asarray(c, dtype=complex))

    def pair(self, a) -> complex:
        return complex(self.space.ambient(a) @ self.ambient)

    def norm(self) -> float:
        """Dual norm: distance from the ambient vector to ``S^⊥`` in ``l_{p'}``."""
        A = self.space.annihilator_of_S
        dual_p = self.space.pnorm.conjugate
        if A.shape[1] == 0:
            return vec_norm(self.ambient, dual_p)
        return quotient_norm(self.ambient, A, dual_p)

    def minimal_ambient(self) -> np.ndarray:
        A = self.space.annihilator_of_S
        if A.shape[1] == 0:
            return np.array(self.ambient)
        return quotient_argmin(self.ambient, A, self.space.pnorm.conjugate)[1]

    def __add__(self, other):
        return DualVector(self.space, self.ambient + other.ambient)

    def __mul__(self, c):
        return DualVector(self.space, self.ambient * c)

    __rmul__ = __mul__


def ambient_functional(space: SubquotientSpace, psi) -> DualVector:
    return DualVector(space, psi)


class Representation:
    """Group homomorphism ``x -> ops[x]`` into isometries of a subquotient.

    ``ops[x]`` acts on S-coordinates and must map ``span Q`` into itself.
    With ``validate`` set, construction fails unless the homomorphism,
    invariance and probe-isometry checks all pass at ``ISOMETRY_TOL``.
    """

    def __init__(self, group: FiniteGroup, space: SubquotientSpace, ops, label: str = "rep",
                 provenance: str = "constructed", validate: bool = True, seed=DEFAULT_SEED):
        ops = np.array(ops, dtype=complex)
        m = space.coord_dim
        if ops.shape != (group.order, m, m):
            raise DimensionError(f"expected ops of shape {(group.order, m, m)}, got {ops.shape}")
        ops.setflags(write=False)
        self.group = group
        self.space = space
        self.ops = ops
        self.label = label
        self.provenance = provenance
        if validate:
            report = check_representation(self, seed=seed)
            if not report.ok:
                raise RepresentationError(f"{label}: {report.summary()}")

    @property
    def pnorm(self) -> PNorm:
        return self.space.pnorm

    @property
    def p(self) -> float:
        return self.space.p

    def act(self, x: int, a) -> np.ndarray:
        return self.ops[x] @ np.asarray(a, dtype=complex)

    def operator(self, f: GroupFunction) -> np.ndarray:
        """``pi(f) = sum_x f(x) pi(x)`` on S-coordinates."""
        if not self.group.same_as(f.group):
            raise GroupError("function and representation live on different groups")
        return np.tensordot(f.values, self.ops, axes=1)

    def ambient_operator(self, T) -> np.ndarray:
        """Ambient extension ``S T S^+`` of an operator on S-coordinates."""
        return self.space.S @ T @ self.space.S_pinv

    @cached_property
    def dual_space(self) -> SubquotientSpace:
        return dual_space(self.space)

    def to_json(self) -> dict:
        return {"label": self.label, "provenance": self.provenance,
                "group": self.group.to_json(), "space": self.space.to_json(),
                "ops": {"re": self.ops.real.tolist(), "im": self.ops.imag.tolist()}}

    @classmethod
    def from_json(cls, data: dict, validate: bool = True) -> "Representation":
        group = group_from_spec(data["group"])
        space = SubquotientSpace.from_json(data["space"])
        ops = np.asarray(data["ops"]["re"]) + 1j * np.asarray(data["ops"]["im"])
        return cls(group, space, ops, data.get("label", "rep"), data.get("provenance", "json"), validate)

    def __repr__(self):
        return f"Representation({self.label}, {self.group.label}, {self.space!r})"


@dataclass
class RepresentationReport:
    homomorphism_error: float
    invariance_error: float
    isometry_error: float
    identity_error: float
    probes: int
    tol: float = ISOMETRY_TOL
    worst: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return max(self.homomorphism_error, self.invariance_error, self.isometry_error,
                   self.identity_error) <= self.tol

    @property
    def worst_violation(self) -> float:
        return max(self.homomorphism_error, self.invariance_error, self.isometry_error,
                   self.identity_error)

    def summary(self) -> str:
        return (f"homomorphism {self.homomorphism_error:.2e}, invariance {self.invariance_error:.2e}, "
                f"isometry {self.isometry_error:.2e}, identity {self.identity_error:.2e}")


def _off_Q(space: SubquotientSpace, M) -> np.ndarray:
    """Component of S-coordinate columns outside span(Q_coords), in the l_2 sense."""
    M = np.asarray(M, dtype=complex)
    Qc = space.Q_coords
    if Qc.shape[1] == 0:
        return M
    B = _orth(Qc)
    return M - B @ (B.conj().T @ M)


def check_representation(rep: Representation, n_probes: int = 6, tol: float = ISOMETRY_TOL,
                         seed=DEFAULT_SEED) -> RepresentationReport:
    """Check ``pi(e) = I``, ``pi(x)pi(y) = pi(xy)``, ``pi(x)Q ⊆ Q`` and isometry on probes.

    Homomorphism and identity errors are measured modulo Q.  Isometry error is
    the worst relative change of the coset norm over basis and random probes.
    """
    G, E, ops = rep.group, rep.space, rep.ops
    m = E.coord_dim
    worst = {}
    ident = float(np.abs(_off_Q(E, ops[0] - np.eye(m))).max(initial=0.0))
    prod = np.einsum("xij,yjk->xyik", ops, ops)
    target = ops[G.cayley]
    diff = (prod - target).reshape(-1, m, m)
    hom = 0.0
    if m:
        hom = float(max(np.abs(_off_Q(E, d)).max() for d in diff))
    inv_err = 0.0
    Qc = E.Q_coords
    if Qc.shape[1]:
        inv_err = float(max(np.abs(_off_Q(E, T @ Qc)).max() for T in ops))
    rng = np.random.default_rng(seed)
    probes = [np.eye(m, dtype=complex)[:, j] for j in range(m)]
    probes += [E.random_vector(rng) for _ in range(n_probes)]
    iso = 0.0
    for a in probes:
        na = E.norm(a)
        if na <= 1e-12:
            continue
        for x in range(G.order):
            err = abs(E.norm(ops[x] @ a) - na) / na
            if err > iso:
                iso = err
                worst["isometry"] = (x, float(err))
    return RepresentationReport(hom, inv_err, iso, ident, len(probes), tol, worst)


def make_regular(G: FiniteGroup, p) -> Representation:
    """Left-regular representation on ``l_p(G)``; ops are permutation matrices."""
    return Representation(G, SubquotientSpace.full(G.order, p), G.regular_matrices,
                          label=f"{G.label}:regular", provenance="regular", validate=False)


def make_trivial(E: SubquotientSpace, G: FiniteGroup) -> Representation:
    m = E.coord_dim
    ops = np.broadcast_to(np.eye(m, dtype=complex), (G.order, m, m))
    return Representation(G, E, ops, label=f"{G.label}:trivial", provenance="trivial", validate=False)


def make_character(G: FiniteGroup, chi, p) -> Representation:
    """One-dimensional representation ``x -> chi(x)`` on ``l_p^1``; chi must be a character."""
    chi = np.asarray(chi, dtype=complex).reshape(-1)
    if chi.shape[0] != G.order:
        raise DimensionError("character has the wrong length")
    return Representation(G, SubquotientSpace.full(1, p), chi[:, None, None],
                          label=f"{G.label}:character", provenance="character")


def all_characters(G: FiniteGroup, p) -> list[Representation]:
    reps = []
    for k, chi in enumerate(characters(G)):
        rep = make_character(G, chi, p)
        rep.label = f"{G.label}:chi{k}"
        reps.append(rep)
    return reps


def _random_monomial_matrix(m: int, rng) -> np.ndarray:
    perm = rng.permutation(m)
    phases = np.exp(2j * np.pi * rng.random(m))
    D = np.zeros((m, m), dtype=complex)
    D[perm, np.arange(m)] = phases
    return D


def induced_monomial(G: FiniteGroup, generator: int, exponent: int, p) -> Representation:
    """Induce a character of the cyclic subgroup ``<generator>`` up to G.

    The character sends ``generator^j`` to ``exp(2 pi i j exponent / k)``.
    The result permutes cosets with phases, so it is an l_p isometry for every p.
    """
    k = G.element_order(generator)
    powers = [0]
    for _ in range(k - 1):
        powers.append(G.mul(powers[-1], generator))
    H = {h: j for j, h in enumerate(powers)}
    reps_, seen = [], set()
    for t in range(G.order):
        if t in seen:
            continue
        reps_.append(t)
        seen.update(G.mul(t, h) for h in powers)
    d = len(reps_)
    omega = np.exp(2j * np.pi * exponent / k)
    ops = np.zeros((G.order, d, d), dtype=complex)
    for x in range(G.order):
        for i, t in enumerate(reps_):
            xt = G.mul(x, t)
            for j, s in enumerate(reps_):
                h = G.mul(G.inv(s), xt)
                if h in H:
                    ops[x, j, i] = omega ** H[h]
                    break
    return Representation(G, SubquotientSpace.full(d, p), ops, label=f"{G.label}:induced",
                          provenance="monomial", validate=False)


def random_monomial_rep(G: FiniteGroup, rng: np.random.Generator, p) -> Representation:
    """Induced monomial rep from a random cyclic subgroup, conjugated by a random monomial matrix."""
    gen = int(rng.integers(G.order))
    k = G.element_order(gen)
    base = induced_monomial(G, gen, int(rng.integers(k)), p)
    m = base.space.coord_dim
    D = _random_monomial_matrix(m, rng)
    Dinv = np.linalg.inv(D)
    ops = np.einsum("ij,xjk,kl->xil", D, base.ops, Dinv)
    return Representation(G, base.space, ops, label=f"{G.label}:monomial", provenance="monomial")


def direct_sum(reps: list[Representation]) -> Representation:
    """l_p-direct sum: block-diagonal S, Q and operators on the concatenated ambient space."""
    if not reps:
        raise ValueError("direct sum needs at least one representation")
    G, pn = reps[0].group, reps[0].pnorm
    for r in reps[1:]:
        if not G.same_as(r.group):
            raise GroupError("direct sum of representations of different groups")
        if r.pnorm != pn:
            raise ValueError("direct sum of representations with different exponents")
    if len(reps) == 1:
        return reps[0]
    N = sum(r.space.ambient_dim for r in reps)
    S = block_diag(*[r.space.S for r in reps])
    Qs = []
    off = 0
    for r in reps:
        Qb = np.zeros((N, r.space.Q.shape[1]), dtype=complex)
        Qb[off:off + r.space.ambient_dim] = r.space.Q
        Qs.append(Qb)
        off += r.space.ambient_dim
    Q = np.hstack(Qs)
    space = SubquotientSpace(N, pn, S, Q, check=False)
    ops = np.stack([block_diag(*[r.ops[x] for r in reps]) for x in range(G.order)])
    return Representation(G, space, ops, label="+".join(r.label for r in reps),
                          provenance="direct_sum", validate=False)


def sum_offsets(reps: list[Representation]) -> list[int]:
    """Start of each summand's coordinates in ``direct_sum(reps)``."""
    out, off = [], 0
    for r in reps:
        out.append(off)
        off += r.space.coord_dim
    return out


def coefficient_function(rep: Representation, xi, phi: DualVector) -> GroupFunction:
    """``x -> <pi(x) xi, phi>``."""
    if not phi.space.same_as(rep.space):
        raise DimensionError("functional lives on a different space")
    xi = np.asarray(xi, dtype=complex)
    vals = (rep.space.S @ (rep.ops @ xi).T).T @ phi.ambient
    return GroupFunction(rep.group, vals)


@dataclass
class CyclicSubrep:
    """A cyclic subrepresentation with the cyclic vector in its own coordinates."""

    rep: Representation
    vector: np.ndarray
    parent: Representation


def cyclic_subrep(rep: Representation, xi, tol: float = 1e-10) -> CyclicSubrep:
    """Restrict to ``F = span{pi(x) xi} + Q`` modulo Q, as a subquotient of the same ambient space."""
    E = rep.space
    xi = np.asarray(xi, dtype=complex)
    if E.is_zero(xi):
        raise ValueError("cyclic vector is zero")
    orbit = E.S @ (rep.ops @ xi).T
    span = np.hstack([E.Q, orbit])
    u, s, _ = np.linalg.svd(span, full_matrices=False)
    rank = int(np.sum(s > tol * s[0]))
    S_new = u[:, :rank]
    F = SubquotientSpace(E.ambient_dim, E.pnorm, S_new, E.Q, check=False)
    # T' = S'^+ S T S^+ S'
    to_old = E.S_pinv @ S_new
    ops = np.einsum("ij,xjk,kl->xil", S_new.conj().T @ E.S, rep.ops, to_old)
    sub = Representation(rep.group, F, ops, label=f"cyc({rep.label})", provenance="cyclic_subrep",
                         validate=False)
    return CyclicSubrep(sub, S_new.conj().T @ (E.S @ xi), rep)


def restrict_functional(phi: DualVector, sub: Representation | SubquotientSpace) -> DualVector:
    """Restriction of a functional to a subspace sharing the ambient space and Q."""
    F = sub.space if isinstance(sub, Representation) else sub
    return DualVector(F, phi.ambient)


def minimal_norm_extension(phi: DualVector, target: SubquotientSpace) -> DualVector:
    """Norm-preserving extension of a functional on ``phi.space`` to the larger ``target``.

    The minimal representative of ``phi`` modulo the annihilator of its own
    S already has the right norm, and it still vanishes on Q.
    """
    if phi.space.ambient_dim != target.ambient_dim:
        raise DimensionError("extension target has a different ambient space")
    return DualVector(target, phi.minimal_ambient())


def with_exponent(rep: Representation, p) -> Representation:
    """Same operators, exponent metadata replaced.  Isometry is not re-checked."""
    return Representation(rep.group, rep.space.with_exponent(p), rep.ops, rep.label,
                          provenance=rep.provenance, validate=False)


class RepRegistry:
    """Append-only registry of constructed representations, keyed by exponent class.

    Membership of q-reps in the p-class for ``2 <= q <= p`` or ``p <= q <= 2``
    is recorded from construction provenance, not decided from the space.
    """

    def __init__(self):
        self._entries: list[tuple[float, Representation]] = []

    def register(self, rep: Representation) -> int:
        self._entries.append((rep.p, rep))
        return len(self._entries) - 1

    def snapshot(self) -> tuple:
        return tuple(self._entries)

    def __len__(self):
        return len(self._entries)

    def members(self, p) -> list[Representation]:
        """Representations whose construction exponent q places them in the p-class."""
        p = as_pnorm(p).p
        out = []
        for q, rep in self._entries:
            if abs(q - p) < 1e-12 or (2 <= q <= p) or (p <= q <= 2):
                out.append(rep)
        return out

    def cyclic_members(self, p) -> list[Representation]:
        return [r for r in self.members(p) if r.provenance in ("regular", "cyclic_subrep", "character")]


def subquotient_op_norm(E: SubquotientSpace, T, restarts: int = 8, tol: float = 1e-10,
                        max_iter: int = 200, seed=DEFAULT_SEED):
    """Estimate the norm of the map induced by T (S-coordinates) on ``E = S/Q``.

    Full spaces defer to ``op_norm``.  Otherwise the lower bound comes from a
    power-type ascent whose two half-steps are quotient-norm solves; the upper
    bound is the interpolation certificate of the ambient extension, or the
    exact Hilbert value when p = 2.
    """
    from .lp import OpNormEstimate, interpolation_bound
    T = np.asarray(T, dtype=complex)
    if E.is_full:
        return op_norm(T, E.pnorm, restarts=max(restarts, 32), tol=tol, seed=seed)
    m = E.coord_dim
    if E.dim == 0 or not np.any(_off_Q(E, T)):
        return OpNormEstimate(0.0, 0.0, np.zeros(m, dtype=complex), 0, "zero")
    A = E.S @ T @ E.S_pinv
    if E.pnorm.is_two:
        C = E.complement_basis
        M = C.conj().T @ A @ C
        _, s, vh = np.linalg.svd(M)
        w = E.coordinates(C @ vh[0].conj())
        return OpNormEstimate(float(s[0]), float(s[0]), w, 1, "svd")
    upper = interpolation_bound(A, E.pnorm)
    rng = np.random.default_rng(seed)
    Sperp = E.annihilator_of_S
    dual_p = E.pnorm.conjugate
    starts = [np.eye(m, dtype=complex)[:, j] for j in range(m)]
    starts += [E.random_vector(rng) for _ in range(restarts)]
    best, best_a = 0.0, starts[0]
    for a in starts:
        na = E.norm(a)
        if na <= 1e-12:
            continue
        a = a / na
        val = E.norm(T @ a)
        for _ in range(max_iter):
            psi = E.norming_functional(T @ a)          # in E*, vanishes on Q
            chi = np.linalg.lstsq(E.S.T, T.T @ (E.S.T @ psi), rcond=None)[0]
            if Sperp.shape[1]:
                v = quotient_norming_functional(chi, Sperp, dual_p)
            else:
                v = norming_functional(chi, dual_p)
            an = E.coordinates(v)
            nn = E.norm(an)
            if nn <= 1e-12:
                break
            an = an / nn
            nv = E.norm(T @ an)
            if nv <= val * (1 + tol):
                if nv > val:
                    a, val = an, nv
                break
            a, val = an, nv
        if val > best:
            best, best_a = val, a
    return OpNormEstimate(best, max(upper, best), best_a, len(starts), "quotient-power")
