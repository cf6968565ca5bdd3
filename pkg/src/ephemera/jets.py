"""Invariant polynomials on a slice, their push-down to the reduced chart,
and the decidable zero-set test on degree-N chart data.

A real-valued invariant polynomial is stored as a sparse map from exponent
pairs (a, b) to coefficients of z^a zbar^b.  Coefficients are Gaussian
rationals (`RationalComplex`) whenever the input is exact, and complex
floats otherwise; predicates run exactly on the rational path and with a
relative tolerance of FLOAT_TOL on the float path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    NotInvariant,
    NotTall,
    OrderOutOfRange,
    PrerequisiteVanishingFailed,
)
from .lattice import DefiningVector

FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class RationalComplex:
    """Exact complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction

    @classmethod
    def of(cls, re, im=0) -> "RationalComplex":
        return cls(Fraction(re), Fraction(im))

    def __add__(self, other):
        other = _coerce(other)
        if isinstance(other, RationalComplex):
            return RationalComplex(self.re + other.re, self.im + other.im)
        return complex(self) + other

    __radd__ = __add__

    def __mul__(self, other):
        other = _coerce(other)
        if isinstance(other, RationalComplex):
            return RationalComplex(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return complex(self) * other

    __rmul__ = __mul__

    def __neg__(self):
        return RationalComplex(-self.re, -self.im)

    def conjugate(self):
        return RationalComplex(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0


def _coerce(value):
    if isinstance(value, RationalComplex):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalComplex(Fraction(value), Fraction(0))
    return complex(value)


def c_add(x, y):
    return _coerce(x) + y


def c_mul(x, y):
    return _coerce(x) * y


def c_conj(x):
    return _coerce(x).conjugate()


def c_neg(x):
    x = _coerce(x)
    return -x


def c_complex(x) -> complex:
    return complex(_coerce(x))


def c_is_zero(x, scale: float = 1.0) -> bool:
    x = _coerce(x)
    if isinstance(x, RationalComplex):
        return x.is_zero()
    return abs(x) <= FLOAT_TOL * scale


def c_is_exact(x) -> bool:
    return isinstance(_coerce(x), RationalComplex)


ExponentPair = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class InvariantPolynomial:
    """Real-valued sum of c_{a,b} z^a zbar^b, invariant under ker(chi_xi)."""

    terms: dict
    xi: DefiningVector

    def __post_init__(self):
        cleaned = {}
        k = len(self.xi.xi)
        for (a, b), c in self.terms.items():
            a, b = tuple(map(int, a)), tuple(map(int, b))
            if len(a) != k or len(b) != k:
                raise ValueError(f"exponents must have length {k}")
            c = _coerce(c)
            if not c_is_zero(c):
                cleaned[(a, b)] = c
        for (a, b), c in cleaned.items():
            mirror = cleaned.get((b, a))
            defect = (
                c_conj(c)
                if mirror is None
                else c_add(c_conj(c), c_neg(mirror))
            )
            if not c_is_zero(defect, scale=1.0 + abs(c_complex(c))):
                raise ValueError(f"not real-valued: term {(a, b)} lacks conjugate mirror")
        object.__setattr__(self, "terms", cleaned)

    # -- builders ---------------------------------------------------------

    @classmethod
    def hermitian(cls, half_terms: dict, xi: DefiningVector) -> "InvariantPolynomial":
        """Build from one term per conjugate pair; mirrors are filled in."""
        full = {}
        for (a, b), c in half_terms.items():
            a, b = tuple(a), tuple(b)
            c = _coerce(c)
            full[(a, b)] = c_add(full.get((a, b), 0), c)
            if a != b:
                full[(b, a)] = c_add(full.get((b, a), 0), c_conj(c))
        return cls(terms=full, xi=xi)

    @classmethod
    def imag_defining_monomial(cls, xi: DefiningVector) -> "InvariantPolynomial":
        """Im(z^{xi+} zbar^{xi-}), the canonical invariant of the model."""
        a = tuple(max(e, 0) for e in xi.xi)
        b = tuple(max(-e, 0) for e in xi.xi)
        return cls.hermitian({(a, b): RationalComplex.of(0, Fraction(-1, 2))}, xi)

    @classmethod
    def real_defining_monomial(cls, xi: DefiningVector) -> "InvariantPolynomial":
        a = tuple(max(e, 0) for e in xi.xi)
        b = tuple(max(-e, 0) for e in xi.xi)
        return cls.hermitian({(a, b): RationalComplex.of(Fraction(1, 2), 0)}, xi)

    @classmethod
    def radius_power(cls, xi: DefiningVector, m: int) -> "InvariantPolynomial":
        """(|z|^2)^m expanded multinomially into z^alpha zbar^alpha terms."""
        k = len(xi.xi)
        terms = {}
        for alpha in _compositions(m, k):
            coeff = Fraction(math.factorial(m))
            for e in alpha:
                coeff /= math.factorial(e)
            terms[(alpha, alpha)] = RationalComplex.of(coeff, 0)
        return cls(terms=terms, xi=xi)

    # -- algebra ----------------------------------------------------------

    def __add__(self, other: "InvariantPolynomial") -> "InvariantPolynomial":
        if other.xi != self.xi:
            raise ValueError("mismatched invariance contexts")
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = c_add(terms.get(key, 0), c)
        return InvariantPolynomial(terms=terms, xi=self.xi)

    def scale(self, factor) -> "InvariantPolynomial":
        if isinstance(factor, (int, Fraction)):
            factor = RationalComplex.of(factor)
        elif not isinstance(factor, RationalComplex):
            factor = complex(factor)
            if factor.imag != 0:
                raise ValueError("scaling a real polynomial needs a real factor")
        return InvariantPolynomial(
            terms={k: c_mul(c, factor) for k, c in self.terms.items()}, xi=self.xi
        )

    def without_constant(self) -> "InvariantPolynomial":
        k = len(self.xi.xi)
        zero = (tuple([0] * k), tuple([0] * k))
        if zero not in self.terms:
            return self
        terms = {key: c for key, c in self.terms.items() if key != zero}
        return InvariantPolynomial(terms=terms, xi=self.xi)

    def degree(self) -> int:
        return max((sum(a) + sum(b) for a, b in self.terms), default=0)

    def coefficient_scale(self) -> float:
        return 1.0 + max((abs(c_complex(c)) for c in self.terms.values()), default=0.0)

    # -- evaluation -------------------------------------------------------

    def eval(self, z) -> float:
        z = np.asarray(z, dtype=complex)
        total = 0.0 + 0.0j
        for (a, b), c in self.terms.items():
            mono = c_complex(c)
            for j, e in enumerate(a):
                if e:
                    mono *= z[j] ** e
            for j, e in enumerate(b):
                if e:
                    mono *= np.conj(z[j]) ** e
            total += mono
        return float(total.real)

    def wirtinger(self, j: int, conjugate: bool = False) -> dict:
        """Raw term dict of the derivative with respect to z_j (or zbar_j)."""
        out = {}
        for (a, b), c in self.terms.items():
            exps = b if conjugate else a
            if exps[j] == 0:
                continue
            new = list(exps)
            new[j] -= 1
            key = (a, tuple(new)) if conjugate else (tuple(new), b)
            out[key] = c_add(out.get(key, 0), c_mul(c, exps[j]))
        return out

    def pullback_rotation(self, angles) -> "InvariantPolynomial":
        """Precompose with the coordinatewise rotation z -> lambda * z."""
        angles = np.asarray(angles, dtype=float)
        terms = {}
        for (a, b), c in self.terms.items():
            phase = np.exp(1j * float(np.dot(np.subtract(a, b), angles)))
            terms[(a, b)] = c_complex(c) * phase
        return InvariantPolynomial(terms=terms, xi=self.xi)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def eval_raw_terms(terms: dict, z) -> complex:
    """Evaluate a raw (not necessarily real) term dict at a point."""
    z = np.asarray(z, dtype=complex)
    total = 0.0 + 0.0j
    for (a, b), c in terms.items():
        mono = c_complex(c)
        for j, e in enumerate(a):
            if e:
                mono *= z[j] ** e
        for j, e in enumerate(b):
            if e:
                mono *= np.conj(z[j]) ** e
        total += mono
    return complex(total)


def invariance_defect(p: InvariantPolynomial):
    """First term outside the invariant lattice, or None."""
    xi = p.xi.xi
    for (a, b) in p.terms:
        diff = [x - y for x, y in zip(a, b)]
        k = None
        for d, e in zip(diff, xi):
            if e != 0:
                if d % e != 0:
                    return (a, b)
                q = d // e
                if k is None:
                    k = q
                elif q != k:
                    return (a, b)
        if k is None:
            k = 0
        if any(d != k * e for d, e in zip(diff, xi)):
            return (a, b)
    return None


def check_invariance(p: InvariantPolynomial) -> bool:
    """True iff every exponent difference a - b is an integer multiple of xi."""
    return invariance_defect(p) is None


@dataclass(frozen=True)
class ChartFunction:
    """Push-down of an invariant polynomial to the reduced chart C.

    Stored as a map (k, d) -> coefficient of u^k * tau^d, with
    tau = (|u|^2 / prod xi_j^xi_j)^(1/N) and u^k meaning ubar^|k| for k < 0.
    """

    terms: dict
    xi: DefiningVector

    @property
    def degree_N(self) -> int:
        return self.xi.degree_N

    def chart_scale(self) -> float:
        # prod over positive exponents, the modulus normalizer of the chart
        return float(
            np.prod([float(e) ** e for e in self.xi.xi if e > 0], initial=1.0)
        )

    def eval(self, u: complex) -> float:
        q = self.chart_scale()
        n = self.degree_N
        tau = (abs(u) ** 2 / q) ** (1.0 / n) if u != 0 else 0.0
        total = 0.0 + 0.0j
        for (k, d), c in self.terms.items():
            base = u**k if k >= 0 else np.conj(u) ** (-k)
            total += c_complex(c) * base * tau**d
        return float(total.real)

    def is_zero(self, scale: float = 1.0) -> bool:
        return all(c_is_zero(c, scale) for c in self.terms.values())


def reduced_taylor(p: InvariantPolynomial, order: int) -> ChartFunction:
    """Truncate to total degree <= order and push down to the chart.

    Each invariant monomial z^a zbar^b with a - b = k xi and componentwise
    minimum m evaluates on the zero level to
    (prod xi_j^m_j) * tau^|m| * u^k.
    """
    if not p.xi.tall or any(e < 0 for e in p.xi.xi):
        raise NotTall(f"chart reduction needs xi >= 0, got {p.xi.xi}")
    defect = invariance_defect(p)
    if defect is not None:
        raise NotInvariant(f"term {defect} is outside the invariant lattice")
    xi = p.xi.xi
    out: dict = {}
    for (a, b), c in p.terms.items():
        if sum(a) + sum(b) > order:
            continue
        m = tuple(min(x, y) for x, y in zip(a, b))
        diff = [x - y for x, y in zip(a, b)]
        k = 0
        for d, e in zip(diff, xi):
            if e != 0:
                k = d // e
                break
        factor = 1
        for e, mj in zip(xi, m):
            factor *= e**mj
        key = (k, sum(m))
        out[key] = c_add(out.get(key, 0), c_mul(c, factor))
    out = {key: c for key, c in out.items() if not c_is_zero(c)}
    return ChartFunction(terms=out, xi=p.xi)


def vanishes_below_order_mod_phi(p: InvariantPolynomial, order: int) -> bool:
    """Whether p lies in the moment-map ideal up to terms of degree >= order.

    Decided through the chart: the truncation to degree order - 1 pushes
    down to zero exactly when every collected pure-modulus coefficient sum
    vanishes.  The constant term is normalized away first.
    """
    n = p.xi.degree_N
    if not (0 < order <= n):
        raise OrderOutOfRange(f"need 0 < order <= {n}, got {order}")
    if not p.xi.tall:
        raise NotTall(f"{p.xi.xi} is not tall")
    reduced = reduced_taylor(p.without_constant(), order - 1)
    return reduced.is_zero(scale=p.coefficient_scale())


@dataclass(frozen=True)
class ChartJet:
    """Degree-N chart data A*Re(u) + B*Im(u) + D*|u|."""

    A: float
    B: float
    D: float
    degree: int
    exact: tuple | None = None  # (A, B, D^2) as Fractions when available

    def margin(self) -> float:
        return self.A**2 + self.B**2 - self.D**2

    def is_marginal(self) -> bool:
        if self.exact is not None:
            return False
        scale = self.A**2 + self.B**2 + self.D**2
        return abs(self.margin()) <= FLOAT_TOL * scale


def chart_jet(p: InvariantPolynomial) -> ChartJet:
    """Degree-N reduced chart coefficients of a polynomial vanishing below N."""
    n = p.xi.degree_N
    if not vanishes_below_order_mod_phi(p, n):
        raise PrerequisiteVanishingFailed(
            "reduced truncation below the model degree does not vanish"
        )
    reduced = reduced_taylor(p.without_constant(), n)
    scale = p.coefficient_scale()
    c_plus = 0
    s_mod = 0
    for (k, d), c in reduced.terms.items():
        if (k, d) == (1, 0):
            c_plus = c
        elif (k, d) == (-1, 0):
            pass  # conjugate mirror of c_plus
        elif k == 0 and 2 * d == n:
            s_mod = c
        elif not c_is_zero(c, scale):
            raise PrerequisiteVanishingFailed(
                f"unexpected chart term u^{k} tau^{d} at degree {n}"
            )
    q_float = float(
        np.prod([float(e) ** e for e in p.xi.xi if e > 0], initial=1.0)
    )
    a = 2.0 * c_complex(c_plus).real
    b = -2.0 * c_complex(c_plus).imag
    d_val = c_complex(s_mod).real / math.sqrt(q_float)
    exact = None
    if c_is_exact(c_plus) and c_is_exact(s_mod):
        cp = _coerce(c_plus)
        sm = _coerce(s_mod)
        q_exact = Fraction(1)
        for e in p.xi.xi:
            if e > 0:
                q_exact *= Fraction(e) ** e
        exact = (2 * cp.re, -2 * cp.im, sm.re**2 / q_exact)
    return ChartJet(A=a, B=b, D=d_val, degree=n, exact=exact)


def ephemeral_zero_set_test(jet: ChartJet) -> bool:
    """Whether the zero set of the degree-N chart function is a line.

    In polar coordinates A*Re(u)+B*Im(u)+D*|u| vanishes on r = 0 together
    with the angles solving A cos + B sin = -D; two rays (a line) appear
    exactly when A^2 + B^2 > D^2 strictly.
    """
    if jet.exact is not None:
        a, b, d2 = jet.exact
        return a * a + b * b > d2
    return jet.margin() > 0.0


def count_zero_rays(fn: ChartFunction, n_angles: int = 256, n_radii: int = 64) -> int:
    """Numerical ray count of the zero set on a polar grid (oracle helper)."""
    radii = np.linspace(0.1, 2.0, n_radii)
    values = np.empty((n_angles, n_radii))
    for i in range(n_angles):
        theta = 2 * np.pi * i / n_angles
        for j, r in enumerate(radii):
            values[i, j] = fn.eval(r * np.exp(1j * theta))
    scale = np.abs(values).max() or 1.0
    ray = np.all(np.abs(values) <= 1e-7 * scale, axis=1)
    crossing = np.zeros(n_angles, dtype=bool)
    for i in range(n_angles):
        prev = values[(i - 1) % n_angles]
        if not ray[i] and not ray[(i - 1) % n_angles]:
            crossing[i] = np.all(prev * values[i] < 0)
    return int(ray.sum() + crossing.sum())


def slice_restriction(
    p: InvariantPolynomial,
    point,
    support,
    xi_restricted: DefiningVector,
    max_degree: int | None = None,
) -> InvariantPolynomial:
    """Taylor data of p at a point, restricted to the vanishing coordinates.

    Every monomial splits as (coordinates on the support) x (the rest
    evaluated at the base point); the result is a polynomial on the slice,
    invariant for the restricted exponent vector.  Coefficients become
    complex floats unless the base point is exactly zero off-support.
    """
    point = np.asarray(point, dtype=complex)
    support = sorted(set(support))
    others = [j for j in range(len(point)) if j not in support]
    terms: dict = {}
    for (a, b), c in p.terms.items():
        deg = sum(a[i] + b[i] for i in support)
        if max_degree is not None and deg > max_degree:
            continue
        factor = 1.0 + 0.0j
        ok = True
        for j in others:
            if a[j]:
                if point[j] == 0:
                    ok = False
                    break
                factor *= point[j] ** a[j]
            if b[j]:
                if point[j] == 0:
                    ok = False
                    break
                factor *= np.conj(point[j]) ** b[j]
        if not ok:
            continue
        key = (
            tuple(a[i] for i in support),
            tuple(b[i] for i in support),
        )
        if factor == 1.0 + 0.0j:
            add = c
        else:
            add = c_mul(c, complex(factor))
        terms[key] = c_add(terms.get(key, 0), add)
    return InvariantPolynomial(terms=terms, xi=xi_restricted)
