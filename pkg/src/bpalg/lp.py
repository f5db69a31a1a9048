"""Vector p-norms, induced l_p operator norms and quotient norms.

Conventions: scalars are complex and the duality pairing is bilinear,
``<v, psi> = sum_i v_i psi_i``.  The norming functional of ``v`` in ``l_p``
is the unit vector ``psi`` in ``l_{p'}`` with ``<v, psi> = ||v||_p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels

DEFAULT_SEED = 0x5EED


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class PNorm:
    """An exponent ``p`` in (1, inf) together with its conjugate."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not np.isfinite(p) or p <= 1.0:
            raise ValueError(f"exponent must lie in (1, inf), got {self.p!r}")
        # snap round-off (e.g. a conjugate computed two ways) so equal exponents compare equal
        frac = Fraction(p).limit_denominator(1000)
        if abs(float(frac) - p) <= 1e-12 * p:
            p = float(frac)
        object.__setattr__(self, "p", p)

    @property
    def conjugate(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def dual(self) -> "PNorm":
        return PNorm(self.conjugate)

    @property
    def is_two(self) -> bool:
        return abs(self.p - 2.0) < 1e-12

    def __float__(self):
        return self.p

    def label(self) -> str:
        frac = Fraction(self.p).limit_denominator(64)
        if abs(float(frac) - self.p) < 1e-12:
            return str(frac)
        return repr(self.p)


def as_pnorm(p) -> PNorm:
    """Coerce a float, int, Fraction, ``"4/3"``-style string or PNorm."""
    if isinstance(p, PNorm):
        return p
    if isinstance(p, str):
        return PNorm(float(Fraction(p.strip())))
    return PNorm(float(p))


def vec_norm(v, p) -> float:
    """``(sum |v_i|^p)^(1/p)``, computed with scaling to avoid overflow."""
    p = as_pnorm(p).p
    a = np.abs(np.asarray(v, dtype=complex)).ravel()
    m = a.max(initial=0.0)
    if m == 0.0:
        return 0.0
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def norming_functional(v, p) -> np.ndarray:
    """The unit vector ``psi`` in ``l_{p'}`` with ``<v, psi> = ||v||_p`` (zero for v = 0)."""
    p = as_pnorm(p).p
    v = np.asarray(v, dtype=complex)
    a = np.abs(v)
    nv = vec_norm(v, p)
    if nv == 0.0:
        return np.zeros_like(v)
    with np.errstate(invalid="ignore", divide="ignore"):
        phase = np.where(a > 0, np.conj(v) / np.where(a > 0, a, 1.0), 0.0)
    return phase * (a / nv) ** (p - 1.0)


def norming_vector(z, p) -> np.ndarray:
    """Unit vector ``x`` in ``l_p`` with ``<x, z> = ||z||_{p'}``, for a functional ``z``."""
    return norming_functional(z, as_pnorm(p).conjugate)


@dataclass
class OpNormEstimate:
    """Two-sided estimate of an induced operator norm.

    ``lower`` is attained by ``witness`` (up to round-off); ``upper`` is a
    certified bound.  For p = 2 both sides come from the SVD.
    """

    lower: float
    upper: float
    witness: np.ndarray
    restarts_used: int
    method: str = "power"

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def _check_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise DimensionError("operator must be a 2-d array")
    if not np.all(np.isfinite(A)):
        raise ValueError("operator has non-finite entries")
    return A


def interpolation_bound(A, p) -> float:
    """Riesz-Thorin certificate for ``||A||_{p->p}``.

    Interpolates between the exact 1-, 2- and inf-norms and returns the
    smallest of the resulting bounds.
    """
    pn = as_pnorm(p)
    A = _check_matrix(A)
    if A.size == 0:
        return 0.0
    absA = np.abs(A)
    n1 = absA.sum(axis=0).max()
    ninf = absA.sum(axis=1).max()
    n2 = np.linalg.norm(A, 2)
    p = pn.p
    bounds = [n1 ** (1.0 / p) * ninf ** (1.0 - 1.0 / p)]
    if p < 2:
        theta = 2.0 * (1.0 - 1.0 / p)
        bounds.append(n1 ** (1.0 - theta) * n2 ** theta)
    else:
        theta = 2.0 / p
        bounds.append(n2 ** theta * ninf ** (1.0 - theta))
    return float(min(bounds))


def _starts(A, r, restarts, rng, extra=None):
    n = A.shape[1]
    cols = [np.eye(n, dtype=complex), np.ones((n, 1), dtype=complex)]
    if min(A.shape) > 0:
        _, _, vh = np.linalg.svd(A)
        cols.append(vh[:1].conj().T)
    if extra is not None:
        extra = np.asarray(extra, dtype=complex)
        cols.append(extra.reshape(n, -1))
    if restarts > 0:
        cols.append(rng.standard_normal((n, restarts)) + 1j * rng.standard_normal((n, restarts)))
    return np.ascontiguousarray(np.hstack(cols))


def power_maximize(A, r, s, restarts=32, tol=1e-10, max_iter=500, seed=DEFAULT_SEED,
                   extra_starts=None, return_all=False):
    """Multistart ascent for ``max ||A x||_s`` over ``||x||_r = 1``.

    Structured starts (basis vectors, all-ones, top right singular vector)
    are always used.  Returns ``(value, witness, n_starts)``, or all runs
    when ``return_all`` is set.
    """
    A = _check_matrix(A)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    X = _starts(A, r, restarts, rng, extra_starts)
    vals, X, _ = _kernels.power_batch(np.ascontiguousarray(A), X, float(r), float(s),
                                      int(max_iter), float(tol))
    if return_all:
        return vals, X
    k = int(np.argmax(vals))
    return float(vals[k]), X[:, k], X.shape[1]


def op_norm(A, p, restarts: int = 32, tol: float = 1e-10, seed=DEFAULT_SEED,
            max_iter: int = 500, extra_starts=None) -> OpNormEstimate:
    """Estimate ``||A||_{l_p -> l_p}`` from both sides.

    The lower bound is the best multistart ascent value, each start run
    until the relative gain drops below ``tol``; the upper bound is
    ``interpolation_bound`` (exact spectral norm when p = 2).
    """
    pn = as_pnorm(p)
    A = _check_matrix(A)
    if A.size == 0 or not np.any(A):
        return OpNormEstimate(0.0, 0.0, np.zeros(A.shape[1], dtype=complex), 0, "zero")
    if pn.is_two:
        _, s, vh = np.linalg.svd(A)
        w = vh[0].conj()
        lower = float(np.linalg.norm(A @ w))
        return OpNormEstimate(min(lower, float(s[0])), float(s[0]), w, 1, "svd")
    lower, w, used = power_maximize(A, pn.p, pn.p, restarts, tol, max_iter, seed, extra_starts)
    upper = max(interpolation_bound(A, pn), lower)
    return OpNormEstimate(lower, upper, w, used, "power")


def _orth(Q, tol=1e-12) -> np.ndarray:
    """Orthonormal basis (l_2) of the column span of Q."""
    if Q is None:
        return None
    Q = np.asarray(Q, dtype=complex)
    if Q.ndim == 1:
        Q = Q[:, None]
    if Q.shape[1] == 0:
        return Q
    u, s, _ = np.linalg.svd(Q, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return u[:, :0]
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return u[:, :rank]


def _newton_quotient(v, Q, p, tol, max_iter=200):
    """Minimize ``sum |v - Q t|^p`` over complex t by damped Newton; Q orthonormal."""
    r = Q.shape[1]
    t = Q.conj().T @ v
    w = v - Q @ t
    if not np.any(np.abs(w) > 1e-300):
        return w, t, True
    QR = np.block([[Q.real, -Q.imag], [Q.imag, Q.real]])  # d(Re w, Im w) = -QR d(Re t, Im t)
    scale = np.abs(v).max()

    def value(w):
        return np.sum((np.abs(w) / scale) ** p)

    F = value(w)
    converged = False
    for _ in range(max_iter):
        a = np.abs(w) / scale
        amax = a.max()
        if amax == 0.0:
            converged = True
            break
        ac = np.maximum(a, 1e-9 * amax)
        wr, wi = w.real / scale, w.imag / scale
        coef = p * ac ** (p - 2.0)
        g = np.concatenate([coef * wr, coef * wi])
        grad = -QR.T @ g
        # per-coordinate 2x2 Hessian  coef * (I + (p-2) u u^T), u = w/|w|
        with np.errstate(invalid="ignore", divide="ignore"):
            ur = np.where(a > 0, wr / np.where(a > 0, a, 1.0), 0.0)
            ui = np.where(a > 0, wi / np.where(a > 0, a, 1.0), 0.0)
        hrr = coef * (1.0 + (p - 2.0) * ur * ur)
        hii = coef * (1.0 + (p - 2.0) * ui * ui)
        hri = coef * (p - 2.0) * ur * ui
        n = w.shape[0]
        H = np.zeros((2 * n, 2 * n))
        idx = np.arange(n)
        H[idx, idx] = hrr
        H[idx + n, idx + n] = hii
        H[idx, idx + n] = hri
        H[idx + n, idx] = hri
        Hu = QR.T @ H @ QR
        Hu[np.diag_indices_from(Hu)] += 1e-14 * max(np.trace(Hu) / (2 * r), 1e-300)
        try:
            d = -np.linalg.solve(Hu, grad)
        except np.linalg.LinAlgError:
            d = -grad
        dec = -grad @ d
        if dec <= 0:
            d, dec = -grad, grad @ grad
        if dec < tol * F:
            converged = True
            break
        step = 1.0
        dt = (d[:r] + 1j * d[r:]) * scale
        while step > 1e-12:
            wn = w - Q @ (step * dt)
            Fn = value(wn)
            if Fn <= F - 1e-4 * step * dec:
                break
            step *= 0.5
        else:
            converged = True
            break
        t = t + step * dt
        w = v - Q @ t
        if F - Fn < 1e-16 * F:
            F = Fn
            converged = True
            break
        F = Fn
    return w, t, converged


def quotient_argmin(v, Q, p, tol: float = 1e-24):
    """Minimal-norm representative of the coset ``v + span(Q)`` in ``l_p``.

    Returns ``(norm, representative)``.  ``Q`` may be None or have zero columns.
    """
    pn = as_pnorm(p)
    v = np.asarray(v, dtype=complex).ravel()
    Qo = _orth(Q)
    if Qo is None or Qo.shape[1] == 0:
        return vec_norm(v, pn), v.copy()
    if Qo.shape[0] != v.shape[0]:
        raise DimensionError("subspace basis and vector have different ambient dimensions")
    if pn.is_two:
        w = v - Qo @ (Qo.conj().T @ v)
        return vec_norm(w, 2), w
    w, _, _ = _newton_quotient(v, Qo, pn.p, tol)
    return vec_norm(w, pn), w


def quotient_norm(v, Q, p) -> float:
    """``min_{q in span Q} ||v - q||_p``."""
    return quotient_argmin(v, Q, p)[0]


def quotient_norming_functional(v, Q, p) -> np.ndarray:
    """Unit functional in ``l_{p'}`` vanishing on ``span Q`` and norming the coset of v.

    It is the norming functional of the minimal representative; optimality of
    that representative makes it annihilate Q (the residual is projected off).
    """
    val, w = quotient_argmin(v, Q, p)
    psi = norming_functional(w, p)
    Qo = _orth(Q)
    if Qo is not None and Qo.shape[1] and val > 0:
        # psi ⊥ Q in the bilinear pairing  <=>  conj(psi) ⊥ Q in l_2
        c = np.conj(psi)
        c = c - Qo @ (Qo.conj().T @ c)
        psi = np.conj(c)
        nrm = vec_norm(psi, as_pnorm(p).conjugate)
        if nrm > 0:
            psi = psi / nrm
    return psi
