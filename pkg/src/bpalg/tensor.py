"""Tensor products of subquotients and representations, product decompositions, Fell intertwiners.

The ambient space of ``E ⊗ F`` is ``l_p`` of the product index with the left
index outer, so ``kron(v, w)`` is the ambient vector of ``v ⊗ w``.  The
tensor norm of ``u`` is the l_p distance from its ambient lift to the
kernel ``Q_E ⊗ S_F + S_E ⊗ Q_F`` of the quotient map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .groups import GroupError
from .lp import DEFAULT_SEED, DimensionError, _orth, power_maximize, quotient_norm
from .repspace import DualVector, Representation, SubquotientSpace


def tensor_space(E: SubquotientSpace, F: SubquotientSpace) -> SubquotientSpace:
    if E.pnorm != F.pnorm:
        raise ValueError("tensor factors must share the exponent")
    S = np.kron(E.S, F.S)
    parts = []
    if E.Q.shape[1]:
        parts.append(np.kron(E.Q, F.S))
    if F.Q.shape[1]:
        parts.append(np.kron(E.S, F.Q))
    Q = _orth(np.hstack(parts)) if parts else None
    space = SubquotientSpace(E.ambient_dim * F.ambient_dim, E.pnorm, S, Q, check=False)
    space.factors = (E, F)
    return space


@dataclass(frozen=True, eq=False)
class TensorElement:
    """``sum_ij coeffs[i, j] e_i ⊗ f_j`` in S-coordinates of both factors."""

    left_space: SubquotientSpace
    right_space: SubquotientSpace
    coeffs: np.ndarray

    def __post_init__(self):
        u = np.array(self.coeffs, dtype=complex)
        shape = (self.left_space.coord_dim, self.right_space.coord_dim)
        if u.shape != shape:
            raise DimensionError(f"coefficient matrix has shape {u.shape}, expected {shape}")
        if self.left_space.pnorm != self.right_space.pnorm:
            raise ValueError("tensor factors must share the exponent")
        u.setflags(write=False)
        object.__setattr__(self, "coeffs", u)

    @classmethod
    def elementary(cls, E, F, a, b) -> "TensorElement":
        return cls(E, F, np.outer(a, b))

    def ambient_matrix(self) -> np.ndarray:
        return self.left_space.S @ self.coeffs @ self.right_space.S.T

    def ambient(self) -> np.ndarray:
        return self.ambient_matrix().ravel()

    def coordinates(self) -> np.ndarray:
        """Coordinates in ``tensor_space(left, right)``, matching ``kron`` ordering."""
        return self.coeffs.ravel()

    def to_json(self) -> dict:
        return {"left": self.left_space.to_json(), "right": self.right_space.to_json(),
                "re": self.coeffs.real.tolist(), "im": self.coeffs.imag.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "TensorElement":
        u = np.asarray(data["re"]) + 1j * np.asarray(data["im"])
        return cls(SubquotientSpace.from_json(data["left"]),
                   SubquotientSpace.from_json(data["right"]), u)


def tensor_norm(u: TensorElement) -> float:
    """Quotient norm of the ambient lift of u in ``l_p(N x M)``."""
    E, F = u.left_space, u.right_space
    if not np.any(u.coeffs):
        return 0.0
    if E.Q.shape[1] == 0 and F.Q.shape[1] == 0:
        return quotient_norm(u.ambient(), None, E.pnorm)
    return tensor_space(E, F).norm(u.coordinates())


def injective_norm(u: TensorElement, restarts: int = 16, max_iter: int = 300, tol: float = 1e-12,
                   seed=DEFAULT_SEED) -> float:
    """Multistart lower estimate of ``sup |<u, phi ⊗ psi>|`` over unit functionals.

    On full spaces this is the norm of the ambient matrix as a map
    ``l_{p'} -> l_p``.  On subquotients it alternates the two norming steps:
    for fixed psi the best phi norms ``W psi`` in E, and symmetrically.
    """
    E, F = u.left_space, u.right_space
    W = u.ambient_matrix()
    if not np.any(W):
        return 0.0
    pn = E.pnorm
    rng = np.random.default_rng(seed)
    if E.Q.shape[1] == 0 and F.Q.shape[1] == 0 and E.is_full and F.is_full:
        val, _, _ = power_maximize(W, pn.conjugate, pn.p, restarts, tol, max_iter, rng)
        return val
    from .lp import quotient_norming_functional
    Mp = F.ambient_dim
    best = 0.0
    starts = [np.eye(Mp, dtype=complex)[:, j] for j in range(Mp)]
    starts += [rng.standard_normal(Mp) + 1j * rng.standard_normal(Mp) for _ in range(restarts)]
    for psi in starts:
        # psi must be a functional on F: project onto the annihilator of Q_F, then normalise there
        psi = DualVector(F, F.annihilator_of_Q @ (np.linalg.pinv(F.annihilator_of_Q) @ psi))
        n = psi.norm()
        if n <= 1e-12:
            continue
        psi_amb = psi.ambient / n
        val = 0.0
        for _ in range(max_iter):
            v = W @ psi_amb                       # lies in span S_E
            phi = quotient_norming_functional(v, E.Q, pn)
            w = W.T @ phi
            psi_new = quotient_norming_functional(w, F.Q, pn)
            nv = abs(phi @ W @ psi_new)
            # functionals are unit in l_{p'}, so their dual norms are at most 1
            nv /= max(DualVector(E, phi).norm(), 1e-300) * max(DualVector(F, psi_new).norm(), 1e-300)
            if nv <= val * (1 + tol):
                val = max(val, nv)
                break
            val, psi_amb = nv, psi_new
        best = max(best, val)
    return float(best)


def tensor_rep(rep1: Representation, rep2: Representation, validate: bool = True) -> Representation:
    """``x -> kron(pi(x), rho(x))`` on ``tensor_space``."""
    if not rep1.group.same_as(rep2.group):
        raise GroupError("tensor of representations of different groups")
    if rep1.pnorm != rep2.pnorm:
        raise ValueError("tensor of representations with different exponents")
    space = tensor_space(rep1.space, rep2.space)
    ops = np.einsum("xij,xkl->xikjl", rep1.ops, rep2.ops).reshape(
        rep1.group.order, space.coord_dim, space.coord_dim)
    return Representation(rep1.group, space, ops, label=f"({rep1.label})x({rep2.label})",
                          provenance="tensor", validate=validate)


def tensor_functional(phi: DualVector, psi: DualVector, space: SubquotientSpace) -> DualVector:
    """``phi ⊗ psi`` as a functional on the tensor space (norm at most ``|phi| |psi|``)."""
    return DualVector(space, np.kron(phi.ambient, psi.ambient))


def product_decomposition(df, dg):
    """Decomposition of the pointwise product ``f g`` indexed by pairs of terms.

    Per-term norm bounds multiply as exact rationals, so the exact cost of the
    result equals the product of the exact costs.
    """
    from .normbench import CoeffDecomposition, CoeffTerm
    if not df.group.same_as(dg.group):
        raise GroupError("decompositions live on different groups")
    if df.pnorm != dg.pnorm:
        raise ValueError("decompositions have different exponents")
    reps = {}
    terms = []
    for s in df.terms:
        for t in dg.terms:
            key = (id(s.rep), id(t.rep))
            if key not in reps:
                reps[key] = tensor_rep(s.rep, t.rep, validate=False)
            rep = reps[key]
            xi = np.kron(s.xi, t.xi)
            phi = tensor_functional(s.phi, t.phi, rep.space)
            terms.append(CoeffTerm(rep, xi, phi, s.xi_bound * t.xi_bound, s.phi_bound * t.phi_bound))
    return CoeffDecomposition(df.group, df.pnorm, terms)


@dataclass
class FellReport:
    ok: bool
    intertwining_error: float
    inverse_error: float
    isometry_error: float
    tol: float = 1e-12
    failures: list = field(default_factory=list)


class UnsupportedPresentation(ValueError):
    """Fell intertwiner requested for a space with a nontrivial quotient part."""


def fell_intertwiner(rep: Representation):
    """Block-diagonal ``W = diag(pi(x))`` and its inverse ``diag(pi(x^{-1}))`` on ``l_p(G, E)``."""
    if rep.space.Q.shape[1]:
        raise UnsupportedPresentation("Fell intertwiner needs a presentation with trivial quotient")
    from scipy.linalg import block_diag
    G = rep.group
    W = block_diag(*rep.ops)
    Winv = block_diag(*[rep.ops[G.inv(x)] for x in range(G.order)])
    return W, Winv


def verify_fell(rep: Representation, n_probes: int = 8, tol: float = 1e-12,
                isometry_tol: float = 1e-10, seed=DEFAULT_SEED) -> FellReport:
    """Check ``W (lambda(x) ⊗ I) W^{-1} = lambda(x) ⊗ pi(x)`` for every x, entrywise."""
    G = rep.group
    W, Winv = fell_intertwiner(rep)
    m = rep.space.coord_dim
    I = np.eye(m)
    failures = []
    worst = 0.0
    for x in range(G.order):
        L = G.regular_matrices[x]
        lhs = W @ np.kron(L, I) @ Winv
        rhs = np.kron(L, rep.ops[x])
        err = float(np.abs(lhs - rhs).max())
        worst = max(worst, err)
        if err > tol:
            failures.append(("intertwining", x, err))
    inv_err = float(np.abs(W @ Winv - np.eye(W.shape[0])).max())
    if inv_err > tol:
        failures.append(("inverse", None, inv_err))
    # isometry of W for the norm (sum_x |xi(x)|_E^p)^(1/p)
    E = rep.space
    rng = np.random.default_rng(seed)
    iso = 0.0

    def lp_norm(v):
        blocks = v.reshape(G.order, m)
        return float(np.sum([E.norm(b) ** E.p for b in blocks]) ** (1.0 / E.p))

    for _ in range(n_probes):
        v = rng.standard_normal(G.order * m) + 1j * rng.standard_normal(G.order * m)
        nv = lp_norm(v)
        iso = max(iso, abs(lp_norm(W @ v) - nv) / nv)
    if iso > isometry_tol:
        failures.append(("isometry", None, iso))
    return FellReport(not failures, worst, inv_err, iso, tol, failures)
