"""Algebra norms on a finite group: factorization upper bounds and dual lower bounds.

For a finite group the factorization norm over the left-regular
representation on ``l_{p'}(G)``, the norm over all isometric
representations on subquotients of ``l_{p'}`` spaces, the multiplier norm and the norm
dual to convolution operators on ``l_{p'}(G)`` all agree.  This module
brackets that common value from both sides by independent methods.

* ``ap_norm_primal`` minimizes the decomposition cost
  ``sum_n |xi_n|_{p'} |phi_n|_p`` subject to
  ``sum_n sum_y xi_n(x^{-1} y) phi_n(y) = f(x)``; every returned value is
  the exact cost of an explicit, exactly feasible decomposition.
* ``bp_dual_norm`` maximizes ``Re sum_x f(x) h(x)`` over h with
  ``|lambda_{p'}(h)| <= 1`` by a cutting-plane method whose cuts are
  coefficient functions of unit vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog, minimize

from .groups import FiniteGroup, GroupError, GroupFunction, characters, constant, delta
from .lp import (DEFAULT_SEED, OpNormEstimate, PNorm, as_pnorm, norming_functional, op_norm,
                 power_maximize, vec_norm)
from .repspace import (DualVector, Representation, coefficient_function, make_regular,
                       subquotient_op_norm)

LOWER_MARGIN = 1e-6


class BracketError(AssertionError):
    """Dual lower bound exceeds the primal upper bound beyond tolerance."""


class ConsistencyError(ValueError):
    """A functional is not well defined on the span of the representation operators."""


# ---------------------------------------------------------------- decompositions

@dataclass(eq=False)
class CoeffTerm:
    """One term ``x -> <pi(x) xi, phi>`` with recorded norm bounds.

    ``xi_bound`` and ``phi_bound`` are exact rationals at least the computed
    norms (equal to them when the term is built from scratch).
    """

    rep: Representation
    xi: np.ndarray
    phi: DualVector
    xi_bound: Fraction | None = None
    phi_bound: Fraction | None = None

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=complex)
        if self.xi_bound is None:
            self.xi_bound = Fraction(self.rep.space.norm(self.xi))
        if self.phi_bound is None:
            self.phi_bound = Fraction(self.phi.norm())

    def evaluate(self) -> GroupFunction:
        return coefficient_function(self.rep, self.xi, self.phi)

    def cost(self) -> float:
        return self.rep.space.norm(self.xi) * self.phi.norm()


class CoeffDecomposition:
    """A finite sum of coefficient functions realizing a function on G.

    ``pnorm`` is the algebra exponent: representations act on spaces with
    the conjugate exponent and functionals carry the exponent itself.
    """

    def __init__(self, group: FiniteGroup, p, terms=()):
        self.group = group
        self.pnorm = as_pnorm(p)
        self.terms: list[CoeffTerm] = list(terms)
        for t in self.terms:
            if not t.rep.group.same_as(group):
                raise GroupError("term representation lives on another group")

    def evaluate(self) -> GroupFunction:
        vals = np.zeros(self.group.order, dtype=complex)
        for t in self.terms:
            vals = vals + t.evaluate().values
        return GroupFunction(self.group, vals)

    def cost(self) -> float:
        """``sum_n |xi_n| |phi_n|`` recomputed from the vectors."""
        return float(sum(t.cost() for t in self.terms))

    def exact_cost(self) -> Fraction:
        """Sum of the recorded per-term bounds, in exact rational arithmetic."""
        return sum((t.xi_bound * t.phi_bound for t in self.terms), Fraction(0))

    def __len__(self):
        return len(self.terms)

    def to_cyclic(self) -> "CoeffDecomposition":
        """Replace each term's representation by the cyclic subrepresentation of its vector."""
        from .repspace import cyclic_subrep, restrict_functional
        out = []
        for t in self.terms:
            if t.rep.space.is_zero(t.xi):
                continue
            cyc = cyclic_subrep(t.rep, t.xi)
            phi = restrict_functional(t.phi, cyc.rep)
            out.append(CoeffTerm(cyc.rep, cyc.vector, phi))
        return CoeffDecomposition(self.group, self.pnorm, out)

    def to_json(self) -> dict:
        return {"group": self.group.label, "p": self.pnorm.p, "terms": [
            {"rep": t.rep.label,
             "xi": [[float(z.real), float(z.imag)] for z in t.xi],
             "phi": [[float(z.real), float(z.imag)] for z in t.phi.ambient],
             "xi_bound": str(t.xi_bound), "phi_bound": str(t.phi_bound)}
            for t in self.terms]}

    @classmethod
    def from_json(cls, data: dict, reps: dict[str, Representation],
                  group: FiniteGroup) -> "CoeffDecomposition":
        terms = []
        for t in data["terms"]:
            rep = reps[t["rep"]]
            xi = np.asarray(t["xi"])
            phi = np.asarray(t["phi"])
            terms.append(CoeffTerm(rep, xi[:, 0] + 1j * xi[:, 1],
                                   DualVector(rep.space, phi[:, 0] + 1j * phi[:, 1]),
                                   Fraction(t["xi_bound"]), Fraction(t["phi_bound"])))
        return cls(group, data["p"], terms)


def regular_decomposition(group: FiniteGroup, p, xis, phis) -> CoeffDecomposition:
    """Decomposition over the regular representation on ``l_{p'}(G)``; columns are terms."""
    pn = as_pnorm(p)
    rep = make_regular(group, pn.conjugate)
    xis = np.asarray(xis, dtype=complex).reshape(group.order, -1)
    phis = np.asarray(phis, dtype=complex).reshape(group.order, -1)
    terms = [CoeffTerm(rep, xis[:, j], DualVector(rep.space, phis[:, j])) for j in range(xis.shape[1])]
    return CoeffDecomposition(group, pn, terms)


# ---------------------------------------------------------------- primal side

@dataclass
class PrimalResult:
    """Upper bound on the algebra norm with the decomposition attaining it."""

    upper: float
    decomposition: CoeffDecomposition
    residual: float
    starts: int
    terms: int
    history: list = field(default_factory=list)


def _structured_start(f: GroupFunction, k: int):
    """Balanced SVD factors of ``U[z, y] = f(y z^{-1}) / |G|``, which solve the p = 2 problem."""
    G = f.group
    n = G.order
    U = f.values[G.cayley[np.arange(n)[None, :], G.inverse[:, None]]] / n
    u, s, vh = np.linalg.svd(U)
    r = np.sqrt(s[:k])
    A = np.zeros((n, k), dtype=complex)
    B = np.zeros((n, k), dtype=complex)
    A[:, :len(r)] = u[:, :k] * r
    B[:, :len(r)] = vh[:k].T * r
    return A, B


def _half_sq_norm(a, r):
    """``0.5 * sum_n |a_n|_r^2`` over columns and its Wirtinger-style gradient."""
    ab = np.abs(a)
    nr = (ab ** r).sum(axis=0) ** (1.0 / r)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(ab > 0, ab ** (r - 2.0) * a, 0.0) * np.where(nr > 0, nr ** (2.0 - r), 0.0)
    return 0.5 * float(np.sum(nr ** 2)), g


def _column_cost(A, B, pn: PNorm) -> float:
    return float(np.sum([vec_norm(A[:, j], pn.conjugate) * vec_norm(B[:, j], pn)
                         for j in range(A.shape[1])]))


def _refine(f, G, pn, A, B, rho0, outer, maxiter, feas_tol):
    """Augmented Lagrangian on the balanced factorization, inner problems by L-BFGS."""
    n, k = A.shape
    q, p = pn.conjugate, pn.p
    idx = G.left_index          # idx[x, y] = x^{-1} y
    mul = G.cayley              # mul[x, z] = x z
    nk = n * k

    def unpack(v):
        return ((v[:nk] + 1j * v[nk:2 * nk]).reshape(n, k),
                (v[2 * nk:3 * nk] + 1j * v[3 * nk:]).reshape(n, k))

    def pack(A, B):
        return np.concatenate([A.real.ravel(), A.imag.ravel(), B.real.ravel(), B.imag.ravel()])

    def fun(v, lam, rho):
        A, B = unpack(v)
        LA = A[idx]
        R = np.einsum("xyn,yn->x", LA, B) - f
        W = rho * R + lam
        c1, gA = _half_sq_norm(A, q)
        c2, gB = _half_sq_norm(B, p)
        val = c1 + c2 + 0.5 * rho * np.vdot(R, R).real + np.vdot(lam, R).real
        gB = gB + np.einsum("x,xyn->yn", W, LA.conj())
        gA = gA + np.einsum("x,xzn->zn", W, B[mul].conj())
        return val, pack(gA, gB)

    v = pack(A, B)
    lam = np.zeros(n, dtype=complex)
    rho = rho0
    for _ in range(outer):
        res = minimize(fun, v, args=(lam, rho), jac=True, method="L-BFGS-B",
                       options={"maxiter": maxiter, "gtol": 1e-10, "ftol": 1e-14})
        v = res.x
        A, B = unpack(v)
        R = np.einsum("xyn,yn->x", A[idx], B) - f
        lam = lam + rho * R
        if np.abs(R).max() < feas_tol:
            break
    return A, B


def _repair(f, G, A, B):
    """Least-squares correction of the functionals so the constraint holds to round-off."""
    n, k = A.shape
    LA = A[G.left_index].reshape(n, n * k)
    R = LA @ B.ravel() - f
    dB = np.linalg.lstsq(LA, -R, rcond=None)[0].reshape(n, k)
    B = B + dB
    R = np.einsum("xyn,yn->x", A[G.left_index], B) - f
    return B, R


def ap_norm_primal(f: GroupFunction, p, k: int | None = None, restarts: int = 2,
                   seed=DEFAULT_SEED, rho0: float = 100.0, outer: int = 10,
                   maxiter: int = 200) -> PrimalResult:
    """Upper bound on the algebra norm from an explicit regular-representation decomposition.

    Parameters
    ----------
    f : GroupFunction
    p : exponent (float, Fraction, ``"4/3"`` or PNorm)
    k : int, optional
        Term budget, default ``|G|``.
    restarts : int
        Random starts in addition to the structured SVD start.

    Returns
    -------
    PrimalResult
        ``upper`` equals the cost of ``decomposition`` which evaluates to f.
        Any residual left by the optimizer is absorbed into one extra term
        ``(delta_e, r)`` whose cost ``|r|_p`` is included.
    """
    pn = as_pnorm(p)
    G = f.group
    n = G.order
    k = n if k is None else int(k)
    fv = np.asarray(f.values, dtype=complex)
    if not np.any(fv):
        return PrimalResult(0.0, CoeffDecomposition(G, pn, []), 0.0, 0, 0)
    if k < 1:
        raise ValueError("term budget must be at least 1 for a nonzero function")
    rng = np.random.default_rng(seed)
    e = np.zeros((n, 1), dtype=complex)
    e[0, 0] = 1.0
    # (delta_e, f) always works: cost |f|_p
    best = (vec_norm(fv, pn), e, fv[:, None].copy(), 0.0)
    history = [("trivial", best[0])]
    inits = [_structured_start(f, k)]
    for _ in range(restarts):
        inits.append((rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k)),
                      rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))))
    for j, (A, B) in enumerate(inits):
        if not pn.is_two or j > 0:
            A, B = _refine(fv, G, pn, A, B, rho0, outer, maxiter, 1e-10)
        B, R = _repair(fv, G, A, B)
        A = np.hstack([A, e])
        B = np.hstack([B, -R[:, None]])
        cost = _column_cost(A, B, pn)
        history.append((f"start{j}", cost))
        if cost < best[0]:
            best = (cost, A, B, float(np.abs(R).max()))
    _, A, B, resid = best
    keep = [j for j in range(A.shape[1]) if np.any(A[:, j]) and np.any(B[:, j])]
    dec = regular_decomposition(G, pn, A[:, keep], B[:, keep])
    return PrimalResult(dec.cost(), dec, resid, len(inits), len(keep), history)


# ---------------------------------------------------------------- dual side

@dataclass
class DualResult:
    """Lower bound ``Re <g, h> / |lambda_{p'}(h)|`` with its witness h.

    ``lower`` divides by the multistart estimate of the operator norm
    inflated by ``LOWER_MARGIN`` (or by the certificate when that is
    smaller, as at p = 2); ``certified_lower`` divides by the
    interpolation certificate instead and is unconditionally sound.
    ``relaxation_upper`` is the final cutting-plane LP value, itself an
    upper bound on the norm because every cut is a valid constraint.
    """

    lower: float
    certified_lower: float
    witness: np.ndarray
    operator_estimate: OpNormEstimate
    relaxation_upper: float
    iterations: int
    cuts: int

    def verify(self, g: GroupFunction, p) -> float:
        """Recompute the lower bound from the witness; returns the discrepancy."""
        pn = as_pnorm(p)
        L = np.tensordot(self.witness, g.group.regular_matrices, axes=1)
        xi = self.operator_estimate.witness
        est = vec_norm(L @ xi, pn.conjugate) / vec_norm(xi, pn.conjugate)
        pair = float(np.real(g.values @ self.witness))
        denom = min(self.operator_estimate.upper, est * (1 + LOWER_MARGIN))
        return abs(pair / denom - self.lower)


def _coefficient(G: FiniteGroup, xi, phi):
    """``x -> sum_y xi(x^{-1} y) phi(y)``."""
    return xi[G.left_index] @ phi


def bp_dual_norm(g: GroupFunction, p, restarts: int = 4, final_restarts: int = 32,
                 tol: float = 1e-4, max_iter: int = 400, seed=DEFAULT_SEED,
                 cuts_per_round: int = 4) -> DualResult:
    """Lower bound on the algebra norm of g by a cutting-plane dual.

    The LP maximizes ``Re sum g h`` subject to ``Re sum c h <= 1`` for every
    cut c.  Each round prices the new h by estimating ``|lambda_{p'}(h)|``
    and adds the coefficient function of every violated local maximizer.
    Stops when the LP value is within ``tol`` (relative) of the best lower bound.
    """
    pn = as_pnorm(p)
    G = g.group
    n = G.order
    q = pn.conjugate
    gv = np.asarray(g.values, dtype=complex)
    mats = G.regular_matrices
    if not np.any(gv):
        z = np.zeros(n, dtype=complex)
        est = OpNormEstimate(0.0, 0.0, z, 0, "zero")
        return DualResult(0.0, 0.0, z, est, 0.0, 0, 0)
    rng = np.random.default_rng(seed)
    cuts = []
    for x in range(n):
        for ph in (1, 1j, -1, -1j):
            c = np.zeros(n, dtype=complex)
            c[x] = ph
            cuts.append(c)
    obj = -np.concatenate([gv.real, -gv.imag])
    # a phased point mass at a maximizer of |g| is feasible and attains sup |g|
    x0 = int(np.argmax(np.abs(gv)))
    best_h = np.zeros(n, dtype=complex)
    best_h[x0] = np.conj(gv[x0]) / abs(gv[x0])
    best = float(abs(gv[x0]))
    warm = None
    ub = np.inf
    it = 0
    final = None
    while it < max_iter:
        it += 1
        C = np.array(cuts)
        res = linprog(obj, A_ub=np.hstack([C.real, -C.imag]), b_ub=np.ones(len(cuts)),
                      bounds=(None, None), method="highs")
        if res.status != 0 or res.x is None:
            break
        ub = -res.fun
        h = res.x[:n] + 1j * res.x[n:]
        L = np.tensordot(h, mats, axes=1)
        if pn.is_two:
            est = op_norm(L, 2)
            vals, X = np.array([est.lower]), est.witness[:, None]
        else:
            vals, X = power_maximize(L, q, q, restarts=restarts, seed=rng,
                                     extra_starts=warm, return_all=True)
        order = np.argsort(-vals)
        nv = float(vals[order[0]])
        lb = float(np.real(gv @ h)) / nv if nv > 0 else 0.0
        if lb > best:
            best, best_h, final = lb, h, None
        warm = X[:, order[:3]]
        added = _new_cuts(G, L, X, vals, order, q, cuts_per_round)
        cuts.extend(added)
        if ub - best > tol * best and added:
            continue
        # candidate stop: re-price the incumbent with the full multistart
        if final is None:
            Lb = np.tensordot(best_h, mats, axes=1)
            final = op_norm(Lb, q, restarts=final_restarts, seed=rng, extra_starts=warm)
            pair = float(np.real(gv @ best_h))
            verified = pair / final.lower
            if verified < best * (1 - 1e-9):
                # the cheap pricing missed a direction: keep its cut and carry on
                best = verified
                xi = final.witness
                phi = norming_functional(Lb @ xi, q)
                cuts.append(_coefficient(G, xi, phi))
                continue
        if ub - best <= tol * best or not added:
            break
    Lb = np.tensordot(best_h, mats, axes=1)
    if final is None:
        final = op_norm(Lb, q, restarts=final_restarts, seed=rng, extra_starts=warm)
    pair = float(np.real(gv @ best_h))
    lower = pair / min(final.upper, final.lower * (1 + LOWER_MARGIN))
    certified = pair / final.upper
    return DualResult(lower, certified, best_h, final, float(ub), it, len(cuts))


def _new_cuts(G, L, X, vals, order, q, limit):
    """Coefficient functions of the distinct violated local maximizers."""
    added = []
    for j in order:
        if vals[j] <= 1 + 1e-9:
            break
        xi = X[:, j]
        phi = norming_functional(L @ xi, q)
        c = _coefficient(G, xi, phi)
        if all(np.abs(c - d).max() > 1e-6 for d in added):
            added.append(c)
        if len(added) >= limit:
            break
    return added


# ---------------------------------------------------------------- bracket

@dataclass
class NormBracket:
    lower: float
    upper: float
    lower_witness: DualResult
    upper_witness: PrimalResult
    methods: tuple = ("cutting-plane dual", "augmented-lagrangian primal")
    tol: float = 1e-6

    @property
    def consistent(self) -> bool:
        return self.lower <= self.upper + self.tol

    @property
    def relative_gap(self) -> float:
        if self.upper == 0:
            return 0.0
        return (self.upper - self.lower) / self.upper

    @property
    def certified_lower(self) -> float:
        return self.lower_witness.certified_lower

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack

    def to_record(self, group: str, p, function_id: str, oracle=None, witnesses_ref=None,
                  seed=DEFAULT_SEED) -> dict:
        return {"group": group, "p": as_pnorm(p).label(), "function_id": function_id,
                "lower": self.lower, "upper": self.upper, "oracle": oracle,
                "witnesses_ref": witnesses_ref, "seed": int(seed)}


def bp_norm_bracket(f: GroupFunction, p, strict: bool = True, primal_kw=None, dual_kw=None,
                    seed=DEFAULT_SEED, tol: float = 1e-6) -> NormBracket:
    """Dual lower bound and primal upper bound for the same norm.

    With ``strict`` a crossed bracket (lower above upper by more than tol)
    raises BracketError; otherwise it is returned with ``consistent`` False.
    """
    primal = ap_norm_primal(f, p, seed=seed, **(primal_kw or {}))
    dual = bp_dual_norm(f, p, seed=seed, **(dual_kw or {}))
    br = NormBracket(dual.lower, primal.upper, dual, primal, tol=tol)
    if strict and not br.consistent:
        raise BracketError(f"lower {br.lower!r} exceeds upper {br.upper!r}")
    return br


def fourier_oracle_p2(f: GroupFunction) -> float:
    """``sum_k |f^(k)|`` with ``f^(k) = |G|^{-1} sum_x f(x) conj(chi_k(x))``; abelian groups only."""
    G = f.group
    if not G.is_abelian:
        raise GroupError("Fourier oracle needs an abelian group")
    chis = np.array(characters(G))
    coef = chis.conj() @ f.values / G.order
    return float(np.sum(np.abs(coef)))


def pf_norm(f: GroupFunction, rep: Representation, restarts: int = 32, seed=DEFAULT_SEED) -> OpNormEstimate:
    """Operator norm of ``pi(f) = sum_x f(x) pi(x)`` on the representation space."""
    T = rep.operator(f)
    if rep.space.is_full:
        return op_norm(T, rep.pnorm, restarts=restarts, seed=seed)
    return subquotient_op_norm(rep.space, T, restarts=min(restarts, 8), seed=seed)


@dataclass
class MultiplierEstimate:
    lower: float
    best_sample: int
    ratios: list


def multiplier_norm(f: GroupFunction, p, samples: int = 4, restarts: int = 2,
                    seed=DEFAULT_SEED) -> MultiplierEstimate:
    """Lower bound ``max_g lower(f g) / upper(g)`` over sample functions g.

    Samples always include the constant 1 (norm 1) and the point mass at e,
    followed by ``samples`` random functions.
    """
    G = f.group
    if not np.any(f.values):
        return MultiplierEstimate(0.0, -1, [])
    rng = np.random.default_rng(seed)
    gs = [constant(G), delta(G)]
    for _ in range(samples):
        gs.append(GroupFunction(G, rng.standard_normal(G.order) + 1j * rng.standard_normal(G.order)))
    ratios = []
    for i, g in enumerate(gs):
        sub = int(rng.integers(2 ** 63))
        up = 1.0 if i == 0 else ap_norm_primal(g, p, restarts=restarts, seed=sub).upper
        lo = bp_dual_norm(f * g, p, seed=sub).lower
        ratios.append(lo / up)
    k = int(np.argmax(ratios))
    return MultiplierEstimate(float(ratios[k]), k, ratios)


def functional_to_function(phi, rep: Representation, n_probes: int = 8, tol: float = 1e-12,
                           seed=DEFAULT_SEED) -> GroupFunction:
    """The function ``g(x) = phi(pi(x))`` representing a functional on ``span{pi(x)}``.

    ``phi`` may be a matrix Phi (pairing ``T -> sum Phi * T``), a callable on
    operators, or an array of prescribed values on the operators ``pi(x)``.
    Prescribed values are checked against every linear relation among the
    ``pi(x)``; all forms are checked against ``phi(pi(f)) = sum f g`` on
    point masses and random probes.
    """
    G = rep.group
    n = G.order
    ops = rep.ops
    m = rep.space.coord_dim
    arr = None if callable(phi) else np.asarray(phi, dtype=complex)
    if arr is not None and arr.shape == (m, m):
        def apply(T):
            return complex(np.sum(arr * T))
        g = np.einsum("ij,xij->x", arr, ops)
    elif callable(phi):
        apply = phi
        g = np.array([complex(phi(ops[x])) for x in range(n)])
    elif arr is not None and arr.shape == (n,):
        from scipy.linalg import null_space
        V = ops.reshape(n, m * m)
        relations = null_space(V.T)             # columns c with sum_x c_x pi(x) = 0
        if relations.shape[1]:
            bad = float(np.abs(relations.T @ arr).max())
            if bad > 1e-9 * max(1.0, np.abs(arr).max()):
                raise ConsistencyError(f"values violate a linear relation among the operators ({bad:.2e})")
        g = arr.copy()

        def apply(T):
            c = np.linalg.lstsq(V.T, T.reshape(-1), rcond=None)[0]
            return complex(c @ g)
    else:
        raise ValueError("phi must be an (m, m) matrix, a callable or a length-|G| array")
    rng = np.random.default_rng(seed)
    probes = [np.eye(n)[x] for x in range(n)]
    probes += [rng.standard_normal(n) + 1j * rng.standard_normal(n) for _ in range(n_probes)]
    for fv in probes:
        lhs = apply(np.tensordot(fv, ops, axes=1))
        rhs = complex(fv @ g)
        scale = max(1.0, float(np.abs(fv).sum() * np.abs(g).max(initial=0.0)))
        if abs(lhs - rhs) > max(tol, 1e-14) * scale * 8:
            raise ConsistencyError(f"pairing identity fails by {abs(lhs - rhs):.2e}")
    return GroupFunction(G, g)


def pairing_error(phi_matrix, rep: Representation, g: GroupFunction, probes) -> float:
    """``max |<pi(f), Phi> - sum f g|`` over probe functions (as value arrays)."""
    worst = 0.0
    for fv in probes:
        T = np.tensordot(fv, rep.ops, axes=1)
        worst = max(worst, abs(np.sum(phi_matrix * T) - fv @ g.values))
    return float(worst)


@dataclass
class InclusionReport:
    lower_p: float
    upper_q: float
    q: float
    p: float
    margin: float
    passed: bool


def inclusion_check(f: GroupFunction, q, p, tol: float = 1e-4, seed=DEFAULT_SEED,
                    primal_kw=None, dual_kw=None) -> InclusionReport:
    """Check ``lower(f, p) <= upper(f, q) + tol`` for q between 2 and p."""
    qn, pn = as_pnorm(q), as_pnorm(p)
    if not (2 <= qn.p <= pn.p or pn.p <= qn.p <= 2):
        raise ValueError("q must lie between 2 and p")
    lo = bp_dual_norm(f, pn, seed=seed, **(dual_kw or {})).lower
    up = ap_norm_primal(f, qn, seed=seed, **(primal_kw or {})).upper
    margin = up - lo
    return InclusionReport(lo, up, qn.p, pn.p, margin, lo <= up + tol)
