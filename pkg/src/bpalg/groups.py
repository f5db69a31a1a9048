"""Finite groups, functions on them, convolution and left-regular matrices.

Elements are dense indices ``0..order-1`` with the identity at index 0.
Haar measure is counting measure throughout, so ``L_p(G)`` is ``l_p^{|G|}``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class GroupError(ValueError):
    """Invalid group construction or mismatched groups."""


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its Cayley table.

    ``cayley[a, b]`` is the index of the product ``ab``.  The constructor
    validates the table (Latin square, associativity, identity at 0).
    """

    cayley: np.ndarray
    label: str = "G"
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        table = np.asarray(self.cayley, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] < 1:
            raise GroupError("cayley table must be a non-empty square array")
        n = table.shape[0]
        if table.min() < 0 or table.max() >= n:
            raise GroupError("cayley entries out of range")
        target = np.arange(n)
        for k in range(n):
            if not (np.array_equal(np.sort(table[k]), target)
                    and np.array_equal(np.sort(table[:, k]), target)):
                raise GroupError("cayley table is not a Latin square")
        if not (np.array_equal(table[0], target) and np.array_equal(table[:, 0], target)):
            raise GroupError("element 0 must be the identity")
        left = table[table[:, :, None], np.arange(n)[None, None, :]]   # (ab)c
        right = table[np.arange(n)[:, None, None], table[None, :, :]]  # a(bc)
        if not np.array_equal(left, right):
            raise GroupError("cayley table is not associative")
        inv = np.argmax(table == 0, axis=1)
        table.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "cayley", table)
        object.__setattr__(self, "inverse", inv)

    @property
    def order(self) -> int:
        return int(self.cayley.shape[0])

    @property
    def identity(self) -> int:
        return 0

    def mul(self, a: int, b: int) -> int:
        return int(self.cayley[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.cayley, self.cayley.T))

    @cached_property
    def left_index(self) -> np.ndarray:
        """``left_index[x, y]`` is the index of ``x^{-1} y``."""
        idx = self.cayley[self.inverse, :]
        idx.setflags(write=False)
        return idx

    @cached_property
    def regular_matrices(self) -> np.ndarray:
        """Stack of left-regular permutation matrices, shape ``(n, n, n)``."""
        n = self.order
        mats = np.zeros((n, n, n))
        rows = np.arange(n)
        for x in range(n):
            mats[x, rows, self.left_index[x]] = 1.0
        mats.setflags(write=False)
        return mats

    def same_as(self, other: "FiniteGroup") -> bool:
        return self is other or np.array_equal(self.cayley, other.cayley)

    def to_json(self) -> dict:
        return {"label": self.label, "order": self.order, "cayley": self.cayley.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroup":
        group = cls(np.asarray(data["cayley"]), label=data.get("label", "G"))
        if "order" in data and int(data["order"]) != group.order:
            raise GroupError("order field disagrees with cayley table")
        return group

    def __repr__(self):
        return f"FiniteGroup({self.label}, order={self.order})"


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic group needs n >= 1")
    a = np.arange(n)
    return FiniteGroup((a[:, None] + a[None, :]) % n, label=f"Z{n}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; element ``k + n*j`` is ``r^k s^j``."""
    if n < 1:
        raise GroupError("dihedral group needs n >= 1")
    order = 2 * n
    table = np.empty((order, order), dtype=np.int64)
    for a in range(order):
        ka, ja = a % n, a // n
        for b in range(order):
            kb, jb = b % n, b // n
            # r^ka s^ja r^kb s^jb = r^(ka + (-1)^ja kb) s^(ja + jb)
            k = (ka + (kb if ja == 0 else -kb)) % n
            table[a, b] = k + n * ((ja + jb) % 2)
    return FiniteGroup(table, label=f"D{n}")


def symmetric(n: int) -> FiniteGroup:
    """Permutations of ``n`` points in lexicographic order; composition ``(ab)(i) = a(b(i))``."""
    if n < 1 or n > 4:
        raise GroupError("symmetric group supported for 1 <= n <= 4")
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = np.array([[index[tuple(a[b[i]] for i in range(n))] for b in perms] for a in perms])
    return FiniteGroup(table, label=f"S{n}")


def direct_product(*factors: FiniteGroup) -> FiniteGroup:
    if not factors:
        raise GroupError("direct product needs at least one factor")
    group = factors[0]
    for h in factors[1:]:
        m = h.order
        n = group.order * m
        table = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            for b in range(n):
                table[a, b] = group.cayley[a // m, b // m] * m + h.cayley[a % m, b % m]
        group = FiniteGroup(table, label=f"{group.label}x{h.label}")
    return group


_NAME = re.compile(r"^(Z|D|S)(\d+)$")


def build_group(kind, n: int | None = None, factors=None) -> FiniteGroup:
    """Build a group from a kind name, or parse a label such as ``"Z2xZ2"``.

    ``kind`` is one of ``cyclic``, ``dihedral``, ``symmetric``, ``product``
    (with ``factors`` a list of groups or labels), or a label string.
    """
    if isinstance(kind, FiniteGroup):
        return kind
    if kind in ("cyclic", "dihedral", "symmetric"):
        if n is None or int(n) != n:
            raise GroupError(f"{kind} group needs an integer n")
        return {"cyclic": cyclic, "dihedral": dihedral, "symmetric": symmetric}[kind](int(n))
    if kind in ("product", "direct_product"):
        if not factors:
            raise GroupError("product needs factors")
        return direct_product(*[build_group(f) if not isinstance(f, dict) else group_from_spec(f)
                                for f in factors])
    if isinstance(kind, str):
        parts = kind.split("x")
        groups = []
        for part in parts:
            m = _NAME.match(part.strip())
            if not m:
                raise GroupError(f"cannot parse group label {kind!r}")
            letter, size = m.group(1), int(m.group(2))
            groups.append({"Z": cyclic, "D": dihedral, "S": symmetric}[letter](size))
        return groups[0] if len(groups) == 1 else direct_product(*groups)
    raise GroupError(f"unknown group kind {kind!r}")


def group_from_spec(spec) -> FiniteGroup:
    """Accept a label string, a ``{"kind": ..., "n": ...}`` dict, or a Cayley JSON dict."""
    if isinstance(spec, FiniteGroup):
        return spec
    if isinstance(spec, str):
        return build_group(spec)
    if isinstance(spec, dict):
        if "cayley" in spec:
            return FiniteGroup.from_json(spec)
        return build_group(spec.get("kind"), spec.get("n"), spec.get("factors"))
    raise GroupError(f"bad group spec {spec!r}")


class GroupFunction:
    """A complex-valued function on a finite group."""

    __slots__ = ("group", "values")

    def __init__(self, group: FiniteGroup, values):
        vals = np.array(values, dtype=complex).reshape(-1)
        if vals.shape[0] != group.order:
            raise GroupError(f"function has {vals.shape[0]} values, group order is {group.order}")
        vals.setflags(write=False)
        self.group = group
        self.values = vals

    def _check(self, other):
        if not self.group.same_as(other.group):
            raise GroupError("functions live on different groups")

    def __call__(self, x: int) -> complex:
        return complex(self.values[x])

    def __add__(self, other):
        self._check(other)
        return GroupFunction(self.group, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return GroupFunction(self.group, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, GroupFunction):
            self._check(other)
            return GroupFunction(self.group, self.values * other.values)
        return GroupFunction(self.group, self.values * other)

    __rmul__ = __mul__

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def to_json(self) -> list:
        return [[float(z.real), float(z.imag)] for z in self.values]

    @classmethod
    def from_json(cls, group: FiniteGroup, data) -> "GroupFunction":
        arr = np.asarray(data, dtype=float)
        return cls(group, arr[:, 0] + 1j * arr[:, 1])

    def __repr__(self):
        return f"GroupFunction({self.group.label}, {np.round(self.values, 6).tolist()})"


def delta(group: FiniteGroup, a: int = 0) -> GroupFunction:
    v = np.zeros(group.order, dtype=complex)
    v[a] = 1.0
    return GroupFunction(group, v)


def constant(group: FiniteGroup, c: complex = 1.0) -> GroupFunction:
    return GroupFunction(group, np.full(group.order, c, dtype=complex))


def random_function(group: FiniteGroup, rng: np.random.Generator, real: bool = False) -> GroupFunction:
    v = rng.standard_normal(group.order)
    if not real:
        v = v + 1j * rng.standard_normal(group.order)
    return GroupFunction(group, v)


def convolve(f: GroupFunction, g: GroupFunction) -> GroupFunction:
    """``(f * g)(x) = sum_y f(y) g(y^{-1} x)``."""
    f._check(g)
    # values of g at y^{-1}x for all (y, x): left_index[y, x]
    return GroupFunction(f.group, f.values @ g.values[f.group.left_index])


def regular_matrix(group: FiniteGroup, x: int, p=None) -> np.ndarray:
    """Matrix of ``lambda_p(x)``: ``(M xi)(y) = xi(x^{-1} y)``.

    The exponent is metadata only; the matrix is the same permutation for all p.
    """
    if not 0 <= x < group.order:
        raise GroupError(f"element {x} out of range")
    return np.array(group.regular_matrices[x])


def regular_operator(f: GroupFunction) -> np.ndarray:
    """``lambda(f) = sum_x f(x) lambda(x)``, so ``lambda(f) @ g.values == (f * g).values``."""
    return np.tensordot(f.values, f.group.regular_matrices, axes=1)


def characters(group: FiniteGroup) -> list[np.ndarray]:
    """All one-dimensional characters, as arrays of values; trivial character first.

    Brute force over assignments of roots of unity to a greedy generating set,
    keeping the assignments that extend to a homomorphism.
    """
    n = group.order
    gens: list[int] = []
    span = {0}

    def closure(elements):
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for g in elements:
                    b = group.mul(a, g)
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        return seen

    while len(span) < n:
        cand = max((a for a in range(n) if a not in span), key=group.element_order)
        gens.append(cand)
        span = closure(gens)

    found = []
    orders = [group.element_order(g) for g in gens]
    for exps in itertools.product(*[range(o) for o in orders]):
        vals = {0: 1.0 + 0j}
        frontier = [0]
        ok = True
        images = [np.exp(2j * np.pi * e / o) for e, o in zip(exps, orders)]
        while frontier and ok:
            nxt = []
            for a in frontier:
                for g, ig in zip(gens, images):
                    b = group.mul(a, g)
                    v = vals[a] * ig
                    if b in vals:
                        if abs(vals[b] - v) > 1e-9:
                            ok = False
                            break
                    else:
                        vals[b] = v
                        nxt.append(b)
                if not ok:
                    break
            frontier = nxt
        if not ok:
            continue
        chi = np.array([vals[a] for a in range(n)])
        if np.allclose(chi[group.cayley], chi[:, None] * chi[None, :], atol=1e-9):
            found.append(chi)
    return found
