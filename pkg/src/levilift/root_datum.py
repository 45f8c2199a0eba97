"""Torus coordinates, twisted Levi subgroups and the sharp/flat decomposition.

The ambient group is GL(n) with a maximal torus split over E.  A torus
coordinate is one embedding of one Res-factor, Galois and Gamma act on the
coordinates by (signed) permutations, and a twisted Levi subgroup containing
the torus is a Galois-stable partition of the coordinates.  Subgroups of the
fixed-point group are described by sets of restricted roots on the
Gamma-fixed part of the coordinate space.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import sympy
from sympy.utilities.iterables import multiset_partitions

from .errors import InputError, PreconditionError
from .local_field import INF, FieldDesc, FieldElement, GaloisElement, apply_galois

Pair = tuple[int, int]
RootVector = tuple[Fraction, ...]


def _compose(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Permutation a o b (apply b first)."""
    return tuple(a[b[k]] for k in range(len(b)))


def _invert(a: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(a)
    for k, v in enumerate(a):
        out[v] = k
    return tuple(out)


def _perm_power(a: Sequence[int], n: int) -> tuple[int, ...]:
    out = tuple(range(len(a)))
    for _ in range(n):
        out = _compose(a, out)
    return out


@dataclass(frozen=True)
class GammaElement:
    """Signed coordinate permutation with a Galois twist.

    Acts on dual elements by (gX)[perm[k]] = sign * galois(X[k]).  root_signs[m]
    scales root vectors landing on coordinate m, so an element fixing the root
    e_j - e_k acts on its root space by root_signs[j] * root_signs[k].
    """

    perm: tuple[int, ...]
    sign: int = 1
    galois: GaloisElement = GaloisElement()
    root_signs: tuple[int, ...] = ()

    def signs(self) -> tuple[int, ...]:
        return self.root_signs or (1,) * len(self.perm)


class TorusFrame:
    """Coordinates of a maximal torus with its Galois and Gamma actions."""

    def __init__(
        self,
        desc: FieldDesc,
        n: int,
        frob_perm: Sequence[int] | None = None,
        twist_perm: Sequence[int] | None = None,
        gamma_generators: Iterable[GammaElement] = (),
    ):
        self.desc = desc
        self.n = n
        ident = tuple(range(n))
        self.frob_perm = tuple(frob_perm) if frob_perm is not None else ident
        self.twist_perm = tuple(twist_perm) if twist_perm is not None else ident
        self.gamma_generators = tuple(
            GammaElement(tuple(g.perm), g.sign, desc.galois_normalize(g.galois), tuple(g.root_signs) or (1,) * n)
            for g in gamma_generators
        )
        self._validate()

    def _validate(self) -> None:
        n, d = self.n, self.desc
        ident = tuple(range(n))
        if n < 1:
            raise InputError("rank must be positive")
        if d.p <= n:
            raise InputError(f"p = {d.p} must exceed n = {n} so that p does not divide |W|")
        for perm in (self.frob_perm, self.twist_perm):
            if sorted(perm) != list(ident):
                raise InputError("Galois action must be a permutation of the coordinates")
        if _perm_power(self.frob_perm, d.f) != ident:
            raise InputError("Frobenius permutation does not have order dividing f")
        if _perm_power(self.twist_perm, d.e) != ident:
            raise InputError("twist permutation does not have order dividing e")
        lhs = _compose(_compose(self.frob_perm, self.twist_perm), _invert(self.frob_perm))
        if lhs != _perm_power(self.twist_perm, d.p % d.e if d.e > 1 else 0):
            raise InputError("Galois permutations violate the metacyclic relation")
        for g in self.gamma_generators:
            if sorted(g.perm) != list(ident) or g.sign not in (1, -1):
                raise InputError("Gamma generator must be a signed permutation")
            if len(g.root_signs) != n or any(s not in (1, -1) for s in g.root_signs):
                raise InputError("root signs must be n entries of +1 or -1")
            for h in (GaloisElement(1, 0), GaloisElement(0, 1)):
                if _compose(g.perm, self.galois_perm(h)) != _compose(self.galois_perm(h), g.perm):
                    raise InputError("Gamma action does not commute with the Galois action")
                if d.galois_compose(g.galois, h) != d.galois_compose(h, g.galois):
                    raise InputError("Gamma twist does not commute with the Galois group")
        order = len(self.gamma_elements)
        if order % d.p == 0:
            raise InputError(f"|Gamma| = {order} is divisible by p")

    # -- Galois -----------------------------------------------------------------

    def galois_perm(self, g: GaloisElement) -> tuple[int, ...]:
        g = self.desc.galois_normalize(g)
        return _compose(_perm_power(self.twist_perm, g.ram_twist), _perm_power(self.frob_perm, g.frob_pow))

    @cached_property
    def galois_orbits(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        orbits = []
        for k in range(self.n):
            if k in seen:
                continue
            orb = sorted({self.galois_perm(g)[k] for g in self.desc.galois_elements()})
            seen.update(orb)
            orbits.append(tuple(orb))
        return orbits

    def galois_act(self, g: GaloisElement, coords: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
        perm = self.galois_perm(g)
        out: list[FieldElement | None] = [None] * self.n
        for k, c in enumerate(coords):
            out[perm[k]] = apply_galois(g, c)
        return tuple(out)  # type: ignore[arg-type]

    def galois_average(self, coords: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
        elems = self.desc.galois_elements()
        total = [FieldElement.zero(self.desc)] * self.n
        for g in elems:
            img = self.galois_act(g, coords)
            total = [a + b for a, b in zip(total, img)]
        return tuple(c / len(elems) for c in total)

    # -- Gamma ------------------------------------------------------------------

    def gamma_compose(self, a: GammaElement, b: GammaElement) -> GammaElement:
        inv_a = _invert(a.perm)
        sa, sb = a.signs(), b.signs()
        signs = tuple(sa[m] * sb[inv_a[m]] for m in range(self.n))
        return GammaElement(
            _compose(a.perm, b.perm), a.sign * b.sign, self.desc.galois_compose(a.galois, b.galois), signs
        )

    @cached_property
    def gamma_identity(self) -> GammaElement:
        return GammaElement(tuple(range(self.n)), 1, GaloisElement(0, 0), (1,) * self.n)

    @cached_property
    def gamma_elements(self) -> tuple[GammaElement, ...]:
        seen = {self.gamma_identity}
        order = [self.gamma_identity]
        queue = deque(order)
        while queue:
            x = queue.popleft()
            for g in self.gamma_generators:
                y = self.gamma_compose(g, x)
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    queue.append(y)
                    if len(order) > 100000:
                        raise InputError("Gamma does not generate a small finite group")
        return tuple(order)

    def gamma_act(self, g: GammaElement, coords: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
        out: list[FieldElement | None] = [None] * self.n
        for k, c in enumerate(coords):
            img = apply_galois(g.galois, c) if (g.galois.frob_pow or g.galois.ram_twist) else c
            out[g.perm[k]] = img if g.sign == 1 else -img
        return tuple(out)  # type: ignore[arg-type]

    @cached_property
    def fixed_basis(self) -> tuple[RootVector, ...]:
        """Rational basis of the Gamma-fixed subspace of Q^n."""
        rows = []
        for g in self.gamma_generators:
            mat = sympy.zeros(self.n, self.n)
            for k in range(self.n):
                mat[g.perm[k], k] = g.sign
            rows.append(mat - sympy.eye(self.n))
        if not rows:
            return tuple(tuple(Fraction(int(i == k)) for i in range(self.n)) for k in range(self.n))
        big = sympy.Matrix.vstack(*rows)
        basis = big.nullspace()
        return tuple(tuple(Fraction(int(x.p), int(x.q)) for x in v) for v in basis)

    def restrict_root(self, j: int, k: int) -> RootVector:
        return tuple(b[j] - b[k] for b in self.fixed_basis)

    def root_excluded(self, j: int, k: int) -> bool:
        """True if some element fixing e_j - e_k acts on its root space by -1."""
        for g in self.gamma_elements:
            if g.sign == 1:
                fixes = g.perm[j] == j and g.perm[k] == k
            else:
                fixes = g.perm[j] == k and g.perm[k] == j
            if fixes:
                s = g.signs()
                if s[j] * s[k] == -1:
                    return True
        return False

    # -- standard Levis ---------------------------------------------------------

    def full(self) -> "TwistedLevi":
        return TwistedLevi(self, [list(range(self.n))])

    def torus(self) -> "TwistedLevi":
        return TwistedLevi(self, [[k] for k in range(self.n)])

    def without_gamma(self) -> "TorusFrame":
        return TorusFrame(self.desc, self.n, self.frob_perm, self.twist_perm, ())

    def zero_element(self) -> "DualElement":
        return DualElement(self, [FieldElement.zero(self.desc)] * self.n)


class DualElement:
    """A rational linear functional on the torus Lie algebra, in coordinates."""

    __slots__ = ("frame", "coords")

    def __init__(self, frame: TorusFrame, coords: Sequence[FieldElement]):
        if len(coords) != frame.n:
            raise InputError(f"expected {frame.n} coordinates, got {len(coords)}")
        self.frame = frame
        self.coords = tuple(coords)

    def _check(self, other: "DualElement") -> None:
        if self.frame is not other.frame:
            raise InputError("dual elements live in different frames")

    def __add__(self, other: "DualElement") -> "DualElement":
        self._check(other)
        return DualElement(self.frame, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "DualElement") -> "DualElement":
        self._check(other)
        return DualElement(self.frame, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "DualElement":
        return DualElement(self.frame, [-a for a in self.coords])

    def scale(self, q) -> "DualElement":
        return DualElement(self.frame, [a * q for a in self.coords])

    def __eq__(self, other) -> bool:
        if not isinstance(other, DualElement):
            return NotImplemented
        return self.frame is other.frame and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def min_val(self):
        return min((c.lead_val for c in self.coords), default=INF)

    def depth(self):
        """Negated minimal valuation; -inf for zero."""
        return -self.min_val()

    def gamma_act(self, g: GammaElement) -> "DualElement":
        return DualElement(self.frame, self.frame.gamma_act(g, self.coords))

    def is_rational(self) -> bool:
        for g in (GaloisElement(1, 0), GaloisElement(0, 1)):
            if self.frame.galois_act(g, self.coords) != self.coords:
                return False
        return True

    def is_gamma_fixed(self) -> bool:
        return all(self.gamma_act(g) == self for g in self.frame.gamma_generators)

    def fixed_space_coords(self) -> tuple[FieldElement, ...]:
        """Coefficients on the Gamma-fixed basis, for Gamma-fixed elements."""
        basis = self.frame.fixed_basis
        if not self.is_gamma_fixed():
            raise PreconditionError("element is not Gamma-fixed")
        mat = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in b] for b in basis]).T
        pinv = (mat.T * mat).inv() * mat.T
        out = []
        for row in range(pinv.rows):
            acc = FieldElement.zero(self.frame.desc)
            for k in range(self.frame.n):
                w = pinv[row, k]
                if w != 0:
                    acc = acc + self.coords[k] * Fraction(int(w.p), int(w.q))
            out.append(acc)
        return tuple(out)

    def __repr__(self) -> str:
        return f"DualElement({list(self.coords)!r})"


class LeviLike:
    """Common interface of G-side partitions and fixed-point descriptors."""

    frame: TorusFrame

    @property
    def pairs(self) -> frozenset[Pair]:
        raise NotImplementedError

    def contains(self, other: "LeviLike") -> bool:
        raise NotImplementedError

    @cached_property
    def center_basis(self) -> tuple[RootVector, ...]:
        """Rational basis of the coordinate vectors central for this group."""
        n = self.frame.n
        rows = []
        for j, k in sorted(self.pairs):
            row = [0] * n
            row[j], row[k] = 1, -1
            rows.append(row)
        rows.extend(self._extra_center_constraints())
        if not rows:
            return tuple(tuple(Fraction(int(i == k)) for i in range(n)) for k in range(n))
        basis = sympy.Matrix(rows).nullspace()
        return tuple(tuple(Fraction(int(x.p), int(x.q)) for x in v) for v in basis)

    def _extra_center_constraints(self) -> list[list[int]]:
        return []

    def is_central(self, X: DualElement) -> bool:
        return all(X.coords[j] == X.coords[k] for j, k in self.pairs) and self._extra_central(X)

    def _extra_central(self, X: DualElement) -> bool:
        return True

    def is_derived(self, u: DualElement) -> bool:
        """u lies in the Lie algebra of the derived group (orthogonal to the center)."""
        for b in self.center_basis:
            acc = FieldElement.zero(self.frame.desc)
            for k, w in enumerate(b):
                if w:
                    acc = acc + u.coords[k] * w
            if not acc.is_zero():
                return False
        return True


class TwistedLevi(LeviLike):
    """Galois-stable partition of the torus coordinates."""

    def __init__(self, frame: TorusFrame, blocks: Iterable[Iterable[int]]):
        self.frame = frame
        canon = tuple(sorted(tuple(sorted(b)) for b in blocks))
        flat = sorted(k for b in canon for k in b)
        if flat != list(range(frame.n)) or any(len(b) == 0 for b in canon):
            raise InputError(f"blocks {canon} do not partition the {frame.n} coordinates")
        self.blocks = canon
        self._block_of = {k: i for i, b in enumerate(canon) for k in b}
        for g in (GaloisElement(1, 0), GaloisElement(0, 1)):
            perm = frame.galois_perm(g)
            if not self._perm_preserves(perm):
                raise InputError(f"partition {self.one_based()} is not Galois-stable")

    def _perm_preserves(self, perm: Sequence[int]) -> bool:
        blockset = set(self.blocks)
        return all(tuple(sorted(perm[k] for k in b)) in blockset for b in self.blocks)

    def block_of(self, k: int) -> int:
        return self._block_of[k]

    def one_based(self) -> list[list[int]]:
        return [[k + 1 for k in b] for b in self.blocks]

    @cached_property
    def pairs(self) -> frozenset[Pair]:
        return frozenset(pr for b in self.blocks for pr in combinations(b, 2))

    def contains(self, other: LeviLike) -> bool:
        if not isinstance(other, TwistedLevi):
            return False
        return all(len({self._block_of[k] for k in b}) == 1 for b in other.blocks)

    def is_gamma_stable(self) -> bool:
        return all(self._perm_preserves(g.perm) for g in self.frame.gamma_generators)

    def __eq__(self, other) -> bool:
        return isinstance(other, TwistedLevi) and other.frame is self.frame and other.blocks == self.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def __repr__(self) -> str:
        return f"TwistedLevi({self.one_based()})"


class FixedLevi(LeviLike):
    """Subgroup of the fixed-point group given by its restricted roots."""

    def __init__(self, frame: TorusFrame, roots: Iterable[Sequence[Fraction]], name: str | None = None):
        self.frame = frame
        dim = len(frame.fixed_basis)
        canon = set()
        for r in roots:
            r = tuple(Fraction(x) for x in r)
            if len(r) != dim:
                raise InputError(f"restricted root {r} has wrong dimension {len(r)} != {dim}")
            canon.add(r)
        self.roots = frozenset(canon)
        self.name = name

    @cached_property
    def pairs(self) -> frozenset[Pair]:
        out = set()
        for j, k in combinations(range(self.frame.n), 2):
            r = self.frame.restrict_root(j, k)
            if r in self.roots or tuple(-x for x in r) in self.roots:
                out.add((j, k))
        return frozenset(out)

    def _extra_center_constraints(self) -> list[list[int]]:
        rows = []
        for g in self.frame.gamma_generators:
            mat = sympy.zeros(self.frame.n, self.frame.n)
            for k in range(self.frame.n):
                mat[g.perm[k], k] = g.sign
            mat -= sympy.eye(self.frame.n)
            rows.extend([[int(x) for x in mat.row(r)] for r in range(mat.rows)])
        return rows

    def _extra_central(self, X: DualElement) -> bool:
        return X.is_gamma_fixed()

    def contains(self, other: LeviLike) -> bool:
        return isinstance(other, FixedLevi) and other.frame is self.frame and other.roots <= self.roots

    def sorted_roots(self) -> list[RootVector]:
        return sorted(self.roots)

    def __eq__(self, other) -> bool:
        return isinstance(other, FixedLevi) and other.frame is self.frame and other.roots == self.roots

    def __hash__(self) -> int:
        return hash(self.roots)

    def __repr__(self) -> str:
        label = f"{self.name}: " if self.name else ""
        return f"FixedLevi({label}{len(self.roots)} roots)"


# -- operations -----------------------------------------------------------------


def coroot_pairing(X: DualElement, j: int, k: int) -> FieldElement:
    if j == k:
        raise PreconditionError("coroot pairing needs distinct coordinates")
    return X.coords[j] - X.coords[k]


def is_central_for(X: DualElement, L: LeviLike) -> bool:
    return L.is_central(X)


def centralizer_levi(M: TwistedLevi, X: DualElement) -> TwistedLevi:
    blocks: list[list[int]] = []
    for b in M.blocks:
        groups: list[list[int]] = []
        for k in b:
            for grp in groups:
                if (X.coords[k] - X.coords[grp[0]]).is_zero():
                    grp.append(k)
                    break
            else:
                groups.append([k])
        blocks.extend(groups)
    return TwistedLevi(M.frame, blocks)


def phi_prime(M: TwistedLevi, X: DualElement, t) -> frozenset[Pair]:
    """Intra-block pairs whose coroot pairing vanishes or is shallower than t."""
    _require_depth(X, t)
    out = set()
    for j, k in M.pairs:
        diff = X.coords[j] - X.coords[k]
        if diff.is_zero() or diff.lead_val > -t:
            out.add((j, k))
    return frozenset(out)


def _classes(n: int, pairs: Iterable[Pair]) -> list[list[int]]:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for j, k in pairs:
        rj, rk = find(j), find(k)
        if rj != rk:
            parent[max(rj, rk)] = min(rj, rk)
    groups: dict[int, list[int]] = {}
    for k in range(n):
        groups.setdefault(find(k), []).append(k)
    return list(groups.values())


def _require_depth(X: DualElement, t) -> None:
    if X.depth() != t:
        raise PreconditionError(f"element has depth {X.depth()}, expected {t}")


def sharp_flat(M: TwistedLevi, X: DualElement, t) -> tuple[DualElement, DualElement]:
    frame = X.frame
    classes = _classes(frame.n, phi_prime(M, X, t))
    coords: list[FieldElement | None] = [None] * frame.n
    for cls in classes:
        if len(cls) % frame.desc.p == 0:
            raise PreconditionError("class size divisible by p")
        total = X.coords[cls[0]]
        for k in cls[1:]:
            total = total + X.coords[k]
        avg = total / len(cls)
        for k in cls:
            coords[k] = avg
    sharp = DualElement(frame, coords)  # type: ignore[arg-type]
    return sharp, X - sharp


def is_generic(X: DualElement, t, Mprime: LeviLike, M: LeviLike) -> bool:
    for j, k in M.pairs - Mprime.pairs:
        diff = X.coords[j] - X.coords[k]
        if diff.is_zero() or diff.lead_val != -t:
            return False
    return True


def gamma_average(X: DualElement) -> DualElement:
    elems = X.frame.gamma_elements
    if len(elems) == 1:
        return X
    total = [FieldElement.zero(X.frame.desc)] * X.frame.n
    for g in elems:
        total = [a + b for a, b in zip(total, X.frame.gamma_act(g, X.coords))]
    return DualElement(X.frame, [c / len(elems) for c in total])


def fixed_point_restricted_roots(L: TwistedLevi) -> frozenset[RootVector]:
    if not L.is_gamma_stable():
        raise PreconditionError(f"{L} is not Gamma-stable")
    frame = L.frame
    out = set()
    for j, k in L.pairs:
        r = frame.restrict_root(j, k)
        if not any(r):
            continue
        if frame.root_excluded(j, k):
            continue
        out.add(r)
        out.add(tuple(-x for x in r))
    return frozenset(out)


def fixed_levi(L: TwistedLevi, name: str | None = None) -> FixedLevi:
    return FixedLevi(L.frame, fixed_point_restricted_roots(L), name)


def fixed_levi_equals(L: TwistedLevi, H: FixedLevi) -> bool:
    if L.frame is not H.frame:
        raise InputError("frames mismatch")
    return fixed_point_restricted_roots(L) == H.roots


def galois_stable_partitions(frame: TorusFrame) -> list[TwistedLevi]:
    out = []
    for parts in multiset_partitions(list(range(frame.n))):
        try:
            out.append(TwistedLevi(frame, parts))
        except InputError:
            continue
    return out
