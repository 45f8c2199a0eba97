"""Exact arithmetic in a tame Galois extension E of Q_p.

E is presented as Q_p(z)[pi] / (pi^e - p), where z is a root of the lift of an
irreducible residue polynomial of degree f.  An element is stored exactly as
a vector of rationals in the number field Q(z)[pi]/(pi^e - p), which is dense
in E, together with an optional absolute precision: when present the element
is only known modulo pi^prec.  Exact elements never lose digits, so equality
tests and valuations on them are always decided.  Inexact elements only arise
when a Galois action needs a p-adic constant that is not rational in z, and
every undecidable question about them raises PrecisionError.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

import sympy

from .errors import InputError, PrecisionError

INF = math.inf
DEFAULT_PRECISION = 16
PRECISION_ENV = "LEVILIFT_PRECISION"

Rational = Fraction | int


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_rational(q: Rational, p: int) -> float | int:
    q = Fraction(q)
    if q == 0:
        return INF
    return vp_int(q.numerator, p) - vp_int(q.denominator, p)


def padic_fraction_part(q: Rational, p: int) -> Fraction:
    """The element of Z[1/p] in [0, 1) congruent to q modulo Z_(p)."""
    q = Fraction(q)
    den = q.denominator
    w = vp_int(den, p)
    if w == 0:
        return Fraction(0)
    pw = p**w
    unit = den // pw
    r = q.numerator * pow(unit, -1, pw) % pw
    return Fraction(r, pw)


def padic_digits(q: Rational, lo: int, count: int, p: int) -> list[int]:
    """Base-p digits of q at the p-adic positions lo, ..., lo + count - 1."""
    if count <= 0:
        return []
    q = Fraction(q) / Fraction(p) ** lo
    num, den = q.numerator, q.denominator
    w = vp_int(den, p)
    unit = den // p**w
    mod = p ** (count + w)
    b = num * pow(unit, -1, mod) % mod
    b //= p**w
    out = []
    for _ in range(count):
        b, d = divmod(b, p)
        out.append(d)
    return out


def _truncate_rational(q: Fraction, m: int, p: int) -> Fraction:
    """Canonical representative in Z[1/p] of q modulo p^m."""
    if q == 0:
        return q
    den = q.denominator
    w = vp_int(den, p)
    if m + w <= 0:
        return Fraction(0)
    unit = den // p**w
    mod = p ** (m + w)
    r = q.numerator * pow(unit, -1, mod) % mod
    return Fraction(r, p**w)


# -- polynomial helpers over Z or Z/p^K, coefficient lists low to high --------


def _poly_mulmod(a: Sequence[int], b: Sequence[int], monic: Sequence[int], mod: int | None = None) -> list[int]:
    f = len(monic) - 1
    prod_ = [0] * (2 * f - 1) if f > 0 else [0]
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod_[i + j] += ai * bj
    for k in range(len(prod_) - 1, f - 1, -1):
        c = prod_[k]
        if c:
            for j in range(f):
                prod_[k - f + j] -= c * monic[j]
            prod_[k] = 0
    out = prod_[:f]
    if mod is not None:
        out = [c % mod for c in out]
    return out


def _poly_powmod(a: Sequence[int], n: int, monic: Sequence[int], mod: int) -> list[int]:
    f = len(monic) - 1
    result = [1] + [0] * (f - 1)
    base = [c % mod for c in a]
    while n:
        if n & 1:
            result = _poly_mulmod(result, base, monic, mod)
        base = _poly_mulmod(base, base, monic, mod)
        n >>= 1
    return result


def _unit_inverse(a: Sequence[int], monic: Sequence[int], p: int, k: int) -> list[int]:
    """Inverse of a unit of Z_p[z]/(monic) modulo p^k."""
    f = len(monic) - 1
    q = p**f
    y = _poly_powmod(a, q - 2, monic, p)
    mod = p**k
    two = [2] + [0] * (f - 1)
    for _ in range(max(1, k).bit_length() + 1):
        ay = _poly_mulmod(a, y, monic, mod)
        y = _poly_mulmod(y, [(t - s) % mod for t, s in zip(two, ay)], monic, mod)
    return y


@dataclass(frozen=True)
class GaloisElement:
    """The automorphism x -> twist^ram_twist(frobenius^frob_pow(x))."""

    frob_pow: int = 0
    ram_twist: int = 0


@dataclass(frozen=True)
class FieldDesc:
    """Parameters of the extension E/Q_p and the working precision."""

    p: int
    f: int
    e: int
    residue_modulus: tuple[int, ...]
    precision: int = DEFAULT_PRECISION

    def __post_init__(self) -> None:
        object.__setattr__(self, "residue_modulus", tuple(int(c) for c in self.residue_modulus))
        if not sympy.isprime(self.p):
            raise InputError(f"p = {self.p} is not prime")
        if self.f < 1 or self.e < 1:
            raise InputError("f and e must be positive")
        if math.gcd(self.e, self.p) != 1:
            raise InputError("ramification must be tame")
        if (self.p**self.f - 1) % self.e:
            raise InputError("e must divide p^f - 1 for E/F to be Galois")
        if self.precision < 1:
            raise InputError("precision must be at least 1")
        mod = self.residue_modulus
        if len(mod) != self.f + 1 or mod[-1] % self.p != 1:
            raise InputError("residue modulus must be monic of degree f")
        poly = sympy.Poly(list(reversed(mod)), sympy.Symbol("z"), modulus=self.p)
        if self.f > 1 and not poly.is_irreducible:
            raise InputError("residue modulus is reducible over F_p")

    def with_precision(self, precision: int) -> "FieldDesc":
        return FieldDesc(self.p, self.f, self.e, self.residue_modulus, precision)

    @property
    def degree(self) -> int:
        return self.e * self.f

    @cached_property
    def modulus(self) -> tuple[int, ...]:
        """Monic integer lift of the residue modulus, digits in [0, p)."""
        return tuple(c % self.p for c in self.residue_modulus[:-1]) + (1,)

    @property
    def guard_digits(self) -> int:
        return self.precision + 2

    @cached_property
    def _frobenius_z(self) -> tuple[tuple[int, ...], int | None]:
        """Image of z under Frobenius as an integer vector and a p-adic precision."""
        f, p, m = self.f, self.p, self.modulus
        if f == 1:
            return (1,), None
        if f == 2:
            return (-m[1], -1), None
        k = self.guard_digits
        mod = p**k
        r = _poly_powmod([0, 1] + [0] * (f - 2), p, m, p)
        deriv = [(j + 1) * m[j + 1] for j in range(f)]
        for _ in range(k.bit_length() + 2):
            val = [0] * f
            dval = [0] * f
            for c in reversed(m):
                val = _poly_mulmod(val, r, m, mod)
                val[0] = (val[0] + c) % mod
            for c in reversed(deriv):
                dval = _poly_mulmod(dval, r, m, mod)
                dval[0] = (dval[0] + c) % mod
            step = _poly_mulmod(val, _unit_inverse(dval, m, p, k), m, mod)
            r = [(a - b) % mod for a, b in zip(r, step)]
        return tuple(r), k

    @cached_property
    def _zeta(self) -> tuple[tuple[int, ...], int | None]:
        """A primitive e-th root of unity, congruent to its Teichmuller lift."""
        f, p, e, m = self.f, self.p, self.e, self.modulus
        if e == 1:
            return (1,) + (0,) * (f - 1), None
        if e == 2:
            return (-1,) + (0,) * (f - 1), None
        q = p**f
        primes = sympy.primefactors(e)
        one = [1] + [0] * (f - 1)
        for vec in product(range(p), repeat=f):
            if not any(vec):
                continue
            h = _poly_powmod(list(vec), (q - 1) // e, m, p)
            if all(_poly_powmod(h, e // ell, m, p) != one for ell in primes):
                break
        k = self.guard_digits
        mod = p**k
        w = h
        for _ in range(k):
            w = _poly_powmod(w, q, m, mod)
        return tuple(w), k

    def galois_elements(self) -> list[GaloisElement]:
        return [GaloisElement(a, j) for a in range(self.f) for j in range(self.e)]

    def galois_normalize(self, g: GaloisElement) -> GaloisElement:
        return GaloisElement(g.frob_pow % self.f, g.ram_twist % self.e)

    def galois_compose(self, g: GaloisElement, h: GaloisElement) -> GaloisElement:
        """The automorphism g o h."""
        a, j = g.frob_pow, g.ram_twist
        b, k = h.frob_pow, h.ram_twist
        return self.galois_normalize(GaloisElement(a + b, j + k * pow(self.p, a % self.f, self.e)))

    def galois_inverse(self, g: GaloisElement) -> GaloisElement:
        a = (-g.frob_pow) % self.f
        j = (-g.ram_twist * pow(self.p, a, self.e)) % self.e
        return GaloisElement(a, j)

    def residue_mul(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple(_poly_mulmod(a, b, self.modulus, self.p))

    def residue_pow(self, a: Sequence[int], n: int) -> tuple[int, ...]:
        return tuple(_poly_powmod(a, n, self.modulus, self.p))


def precision_from_env(default: int) -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError(f"{PRECISION_ENV} must be an integer") from exc
    if value < 1:
        raise InputError(f"{PRECISION_ENV} must be positive")
    return value


def _normalize(nums: Iterable[int], den: int) -> tuple[tuple[int, ...], int]:
    nums = tuple(nums)
    if den < 0:
        nums = tuple(-c for c in nums)
        den = -den
    g = den
    for c in nums:
        if c:
            g = math.gcd(g, c)
            if g == 1:
                break
    if not any(nums):
        return nums, 1
    if g != 1:
        nums = tuple(c // g for c in nums)
        den //= g
    return nums, den


class FieldElement:
    """An element of E, exact or known modulo pi^prec (prec in 1/e units)."""

    __slots__ = ("desc", "nums", "den", "prec", "_vunits")

    def __init__(self, desc: FieldDesc, nums: Iterable[int], den: int = 1, prec: int | None = None):
        nums, den = _normalize(nums, den)
        if len(nums) != desc.degree:
            raise InputError("coordinate vector has the wrong length")
        self.desc = desc
        self.prec = prec
        if prec is not None:
            nums, den = self._truncated(desc, nums, den, prec)
        self.nums = nums
        self.den = den
        self._vunits: int | float | None = None

    @staticmethod
    def _truncated(desc: FieldDesc, nums, den, prec):
        e, f, p = desc.e, desc.f, desc.p
        coords = []
        for idx, c in enumerate(nums):
            i = idx // f
            m = -((i - prec) // e)  # ceil((prec - i) / e)
            coords.append(_truncate_rational(Fraction(c, den), m, p))
        common = 1
        for c in coords:
            common = common * c.denominator // math.gcd(common, c.denominator)
        return _normalize((int(c * common) for c in coords), common)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, desc: FieldDesc) -> "FieldElement":
        return cls(desc, (0,) * desc.degree)

    @classmethod
    def from_rational(cls, desc: FieldDesc, q: Rational) -> "FieldElement":
        q = Fraction(q)
        return cls(desc, (q.numerator,) + (0,) * (desc.degree - 1), q.denominator)

    @classmethod
    def from_coords(cls, desc: FieldDesc, coords: Sequence[Sequence[Rational]], prec: int | None = None) -> "FieldElement":
        """Build sum_i a_i(z) pi^i from e lists of f rational z-coefficients."""
        if len(coords) != desc.e or any(len(row) != desc.f for row in coords):
            raise InputError("coordinates must be e rows of f entries")
        flat = [Fraction(c) for row in coords for c in row]
        common = 1
        for c in flat:
            common = common * c.denominator // math.gcd(common, c.denominator)
        return cls(desc, (int(c * common) for c in flat), common, prec)

    @classmethod
    def pi_power(cls, desc: FieldDesc, m: int) -> "FieldElement":
        k, i = divmod(m, desc.e)
        nums = [0] * desc.degree
        q = Fraction(desc.p) ** k
        nums[i * desc.f] = q.numerator
        return cls(desc, nums, q.denominator)

    @classmethod
    def from_residue(cls, desc: FieldDesc, vec: Sequence[int]) -> "FieldElement":
        if len(vec) != desc.f:
            raise InputError("residue vector must have f entries")
        return cls(desc, tuple(int(c) for c in vec) + (0,) * (desc.degree - desc.f))

    @classmethod
    def from_digits(cls, desc: FieldDesc, val: Rational, digits: Sequence[Sequence[int]]) -> "FieldElement":
        start = Fraction(val) * desc.e
        if start.denominator != 1:
            raise InputError(f"valuation {val} is not in (1/e)Z")
        total = cls.zero(desc)
        for offset, vec in enumerate(digits):
            if any(vec):
                total = total + cls.from_residue(desc, vec) * cls.pi_power(desc, int(start) + offset)
        return total

    @classmethod
    def generator(cls, desc: FieldDesc) -> "FieldElement":
        """The lift z of the residue generator."""
        if desc.f == 1:
            return cls.from_rational(desc, -desc.modulus[0])
        nums = [0] * desc.degree
        nums[1] = 1
        return cls(desc, nums)

    # -- structure ------------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.prec is None

    def coords(self) -> list[list[Fraction]]:
        f = self.desc.f
        return [[Fraction(self.nums[i * f + j], self.den) for j in range(f)] for i in range(self.desc.e)]

    def _check(self, other: "FieldElement") -> None:
        if self.desc != other.desc:
            raise InputError("field elements over different fields")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement.from_rational(self.desc, other)
        return NotImplemented

    @property
    def valuation_units(self) -> int | float:
        """Valuation times e; raises when only zero digits are known."""
        if self._vunits is None:
            p, e, f = self.desc.p, self.desc.e, self.desc.f
            vden = vp_int(self.den, p)
            best: int | float = INF
            for idx, c in enumerate(self.nums):
                if c:
                    u = e * (vp_int(c, p) - vden) + idx // f
                    if u < best:
                        best = u
            self._vunits = best
        if self._vunits == INF and self.prec is not None:
            raise PrecisionError("valuation undecidable: all known digits vanish")
        return self._vunits

    def _lower_units(self) -> int | float:
        try:
            return self.valuation_units
        except PrecisionError:
            return self.prec

    def is_zero(self) -> bool:
        if any(self.nums):
            return False
        if self.prec is not None:
            raise PrecisionError("zero test undecidable at the stored precision")
        return True

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        den = self.den * other.den
        nums = (a * other.den + b * self.den for a, b in zip(self.nums, other.nums))
        return FieldElement(self.desc, nums, den, _min_prec(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.desc, (-c for c in self.nums), self.den, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            prec = self.prec
            if prec is not None and q != 0:
                prec += self.desc.e * vp_rational(q, self.desc.p)
            if q == 0:
                prec = None
            return FieldElement(self.desc, (c * q.numerator for c in self.nums), self.den * q.denominator, prec)
        if not isinstance(other, FieldElement):
            return NotImplemented
        self._check(other)
        d = self.desc
        e, f, p, m = d.e, d.f, d.p, d.modulus
        out = [0] * d.degree
        for i in range(e):
            ai = self.nums[i * f:(i + 1) * f]
            if not any(ai):
                continue
            for k in range(e):
                bk = other.nums[k * f:(k + 1) * f]
                if not any(bk):
                    continue
                prod_ = _poly_mulmod(ai, bk, m) if f > 1 else [ai[0] * bk[0]]
                pos = i + k
                scale = 1
                if pos >= e:
                    pos -= e
                    scale = p
                for j in range(f):
                    out[pos * f + j] += scale * prod_[j]
        prec = None
        if self.prec is not None or other.prec is not None:
            prec = min(
                (self.prec if self.prec is not None else INF) + other._lower_units(),
                (other.prec if other.prec is not None else INF) + self._lower_units(),
            )
            prec = None if prec == INF else int(prec)
        return FieldElement(d, out, self.den * other.den, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        if isinstance(other, FieldElement):
            return self * fe_inv(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.desc == other.desc and self.nums == other.nums and self.den == other.den and self.prec == other.prec

    def __hash__(self) -> int:
        return hash((self.nums, self.den, self.prec))

    # -- digit view -------------------------------------------------------------

    @property
    def lead_val(self) -> Fraction | float:
        u = self.valuation_units
        return u if u == INF else Fraction(u, self.desc.e)

    def digit_window(self, start: int, count: int) -> list[tuple[int, ...]]:
        """Residue digits at pi-positions start .. start + count - 1."""
        d = self.desc
        e, f, p = d.e, d.f, d.p
        if self.prec is not None and start + count > self.prec:
            raise PrecisionError("requested digits beyond the known precision")
        out = [[0] * f for _ in range(count)]
        for i in range(e):
            # positions m = e*k + i with start <= m < start + count
            k_lo = -((i - start) // e)
            k_hi = -((i - start - count) // e)
            if k_hi <= k_lo:
                continue
            for j in range(f):
                c = self.nums[i * f + j]
                if not c:
                    continue
                ds = padic_digits(Fraction(c, self.den), k_lo, k_hi - k_lo, p)
                for off, dig in enumerate(ds):
                    out[e * (k_lo + off) + i - start][j] = dig
        return [tuple(v) for v in out]

    @property
    def terminates(self) -> bool:
        """True when the standard digit expansion is finite and fits the window."""
        if self.prec is not None:
            return False
        if self.is_zero():
            return True
        p = self.desc.p
        if self.den != p ** vp_int(self.den, p) or any(c < 0 for c in self.nums):
            return False
        return self.digits_needed() <= self.desc.precision

    def digits_needed(self) -> int:
        """Length of the finite expansion of an exact element in Z[1/p]-coordinates."""
        e, f, p = self.desc.e, self.desc.f, self.desc.p
        top = -1
        for idx, c in enumerate(self.nums):
            if c:
                # den is a power of p here, so c carries the digits directly
                k = len(_base_p(c, p)) - 1 - vp_int(self.den, p)
                top = max(top, e * k + idx // f)
        return top - self.valuation_units + 1

    @property
    def digits(self) -> list[tuple[int, ...]]:
        """The first N digits from the leading one (fewer if the expansion ends)."""
        if self.is_zero():
            return []
        n = self.desc.precision
        start = self.valuation_units
        if self.prec is not None:
            n = min(n, self.prec - start)
        if self.terminates:
            n = self.digits_needed()
        return self.digit_window(start, n)

    def __repr__(self) -> str:
        if self.prec is None and self.nums and not any(self.nums):
            return "FieldElement(0)"
        parts = []
        for i, row in enumerate(self.coords()):
            for j, c in enumerate(row):
                if c:
                    parts.append(f"{c}*z^{j}*pi^{i}")
        body = " + ".join(parts) or "0"
        tail = "" if self.prec is None else f" + O(pi^{self.prec})"
        return f"FieldElement({body}{tail})"


def _base_p(n: int, p: int) -> list[int]:
    out = []
    while n:
        n, d = divmod(n, p)
        out.append(d)
    return out or [0]


def _min_prec(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# -- public operations ----------------------------------------------------------


def fe_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def fe_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def fe_inv(a: FieldElement) -> FieldElement:
    """Multiplicative inverse by solving the multiplication-matrix system."""
    d = a.desc
    v = a.valuation_units
    if v == INF:
        raise ZeroDivisionError("inversion of zero")
    n = d.degree
    basis = [FieldElement(d, [1 if k == idx else 0 for k in range(n)]) for idx in range(n)]
    exact_a = FieldElement(d, a.nums, a.den)
    cols = [exact_a * b for b in basis]
    mat = sympy.Matrix(n, n, lambda r, c: sympy.Rational(cols[c].nums[r], cols[c].den))
    rhs = sympy.Matrix([1] + [0] * (n - 1))
    sol = mat.LUsolve(rhs)
    fr = [Fraction(int(x.p), int(x.q)) for x in sol]
    common = 1
    for c in fr:
        common = common * c.denominator // math.gcd(common, c.denominator)
    prec = None if a.prec is None else a.prec - 2 * v
    return FieldElement(d, (int(c * common) for c in fr), common, prec)


def fe_val(a: FieldElement) -> Fraction | float:
    return a.lead_val


def _apply_unramified_map(a: FieldElement, images: list[tuple[tuple[int, ...], int | None]], scale_by_row=None) -> FieldElement:
    """Substitute images of z^j into every pi-row, optionally multiplying row i by a unit."""
    d = a.desc
    e, f, p, m = d.e, d.f, d.p, d.modulus
    out = [0] * d.degree
    prec: float | int = INF if a.prec is None else a.prec
    vden = vp_int(a.den, p)
    for i in range(e):
        row = a.nums[i * f:(i + 1) * f]
        if not any(row):
            continue
        new = [0] * f
        row_prec: float | int = INF
        for j, c in enumerate(row):
            if not c:
                continue
            img, k = images[j]
            for t in range(f):
                new[t] += c * img[t]
            if k is not None:
                row_prec = min(row_prec, e * (k + vp_int(c, p) - vden) + i)
        if scale_by_row is not None:
            unit, k = scale_by_row[i]
            if k is not None:
                vrow = min(vp_int(c, p) for c in new if c) - vden if any(new) else INF
                row_prec = min(row_prec, e * (k + vrow) + i)
            new = _poly_mulmod(new, unit, m) if f > 1 else [new[0] * unit[0]]
        for t in range(f):
            out[i * f + t] = new[t]
        prec = min(prec, row_prec)
    return FieldElement(d, out, a.den, None if prec == INF else int(prec))


def _frobenius_images(desc: FieldDesc) -> list[tuple[tuple[int, ...], int | None]]:
    img, k = desc._frobenius_z
    f = desc.f
    out = []
    cur = [1] + [0] * (f - 1)
    mod = None if k is None else desc.p**k
    for _ in range(f):
        out.append((tuple(cur), k))
        cur = _poly_mulmod(cur, img, desc.modulus, mod)
    return out


def apply_galois(g: GaloisElement, a: FieldElement) -> FieldElement:
    d = a.desc
    g = d.galois_normalize(g)
    x = a
    if g.frob_pow:
        images = _frobenius_images(d)
        for _ in range(g.frob_pow):
            x = _apply_unramified_map(x, images)
    if g.ram_twist:
        zeta, k = d._zeta
        mod = None if k is None else d.p**k
        ident = [(tuple(1 if t == j else 0 for t in range(d.f)), None) for j in range(d.f)]
        units = []
        base = _poly_powmod(zeta, g.ram_twist, d.modulus, mod) if mod else _int_poly_pow(zeta, g.ram_twist, d.modulus)
        cur = [1] + [0] * (d.f - 1)
        for _ in range(d.e):
            units.append((tuple(cur), k))
            cur = _poly_mulmod(cur, base, d.modulus, mod)
        x = _apply_unramified_map(x, ident, units)
    return x


def _int_poly_pow(a: Sequence[int], n: int, monic: Sequence[int]) -> list[int]:
    result = [1] + [0] * (len(monic) - 2)
    for _ in range(n):
        result = _poly_mulmod(result, a, monic)
    return result


def trace_to_base(a: FieldElement) -> FieldElement:
    total = FieldElement.zero(a.desc)
    for g in a.desc.galois_elements():
        total = total + apply_galois(g, a)
    return total


def base_rational(x: FieldElement) -> Fraction:
    """The rational value of an element of the base field Q_p."""
    for idx, c in enumerate(x.nums):
        if idx and c:
            raise PrecisionError("element does not lie in the base field")
    return Fraction(x.nums[0], x.den)


def psi_value(x: FieldElement) -> Fraction:
    """psi(x) = exp(2 pi i frac(x/p)) recorded as frac(x/p) in [0, 1)."""
    d = x.desc
    if x.prec is not None and x.prec < d.e:
        raise PrecisionError("x is not known modulo p")
    if any(x.nums):
        if x.valuation_units <= -d.precision * d.e:
            raise PrecisionError("valuation too negative for the stored window")
    q = base_rational(x)
    return padic_fraction_part(q / d.p, d.p)
