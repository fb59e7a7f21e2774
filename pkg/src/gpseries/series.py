"""Truncated generalized power series with exact rational coefficients.

A series lives over a signature of ``m`` x-variables (nonnegative rational
exponents) and ``n`` y-variables (natural exponents).  Terms are stored
sparsely as a map from multi-exponents to nonzero rational coefficients.
Every series carries a precision ``delta``: it is known modulo terms of
total degree >= delta, and such terms are dropped eagerly so that equality
of the canonical forms is exact equality modulo precision.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

Rational = Union[int, Fraction]

#: sentinel returned by :func:`order_in_y` when the restriction to the
#: distinguished axis vanishes identically up to precision.
NOT_REGULAR = None


class Signature(NamedTuple):
    """Variable counts: ``m`` x-variables, ``n`` y-variables."""

    m: int
    n: int


# A multi-exponent is ((x-exponents as Fractions), (y-exponents as ints)).
Exponent = tuple[tuple[Fraction, ...], tuple[int, ...]]


class SeriesError(ValueError):
    pass


class SignatureMismatch(SeriesError):
    pass


def _check_exponent(sig: Signature, exp: Exponent) -> Exponent:
    xs, ys = exp
    if len(xs) != sig.m or len(ys) != sig.n:
        raise SeriesError(f"exponent {exp} does not match signature {sig}")
    xs = tuple(Fraction(e) for e in xs)
    ys = tuple(int(e) for e in ys)
    for e in xs:
        if e < 0:
            raise SeriesError(f"negative x-exponent {e}")
    for e in ys:
        if e < 0:
            raise SeriesError(f"negative y-exponent {e}")
    return xs, ys


def total_degree(exp: Exponent) -> Fraction:
    xs, ys = exp
    return sum(xs, Fraction(0)) + sum(ys)


class Series:
    """Immutable truncated generalized power series."""

    __slots__ = ("sig", "terms", "precision")

    def __init__(
        self,
        sig: Signature,
        terms: Mapping[Exponent, Rational],
        precision: Rational,
    ):
        precision = Fraction(precision)
        if precision <= 0:
            raise SeriesError(f"precision must be positive, got {precision}")
        clean: dict[Exponent, Fraction] = {}
        for exp, coeff in terms.items():
            exp = _check_exponent(sig, exp)
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            if total_degree(exp) >= precision:
                continue
            clean[exp] = clean.get(exp, Fraction(0)) + coeff
            if clean[exp] == 0:
                del clean[exp]
        object.__setattr__(self, "sig", Signature(*sig))
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "precision", precision)

    def __setattr__(self, name, value):
        raise AttributeError("Series is immutable")

    # -- basic queries ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> Optional[Fraction]:
        """Minimal total degree of the support, or None for the zero series."""
        if not self.terms:
            return None
        return min(total_degree(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        zero = (tuple([Fraction(0)] * self.sig.m), tuple([0] * self.sig.n))
        return self.terms.get(zero, Fraction(0))

    def coefficient(self, exp: Exponent) -> Fraction:
        return self.terms.get(_check_exponent(self.sig, exp), Fraction(0))

    def is_unit(self) -> bool:
        return self.constant_term() != 0

    # -- ring operations -------------------------------------------------

    def _require_same_sig(self, other: "Series") -> None:
        if self.sig != other.sig:
            raise SignatureMismatch(f"{self.sig} != {other.sig}")

    def __add__(self, other: "Series") -> "Series":
        self._require_same_sig(other)
        prec = min(self.precision, other.precision)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            terms[exp] = terms.get(exp, Fraction(0)) + c
        return Series(self.sig, terms, prec)

    def __neg__(self) -> "Series":
        return Series(
            self.sig, {e: -c for e, c in self.terms.items()}, self.precision
        )

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def __mul__(self, other: "Series") -> "Series":
        self._require_same_sig(other)
        prec = mul_precision(self, other)
        terms: dict[Exponent, Fraction] = {}
        for (xa, ya), ca in self.terms.items():
            for (xb, yb), cb in other.terms.items():
                exp = (
                    tuple(a + b for a, b in zip(xa, xb)),
                    tuple(a + b for a, b in zip(ya, yb)),
                )
                if total_degree(exp) >= prec:
                    continue
                terms[exp] = terms.get(exp, Fraction(0)) + ca * cb
        return Series(self.sig, terms, prec)

    def scale(self, c: Rational) -> "Series":
        c = Fraction(c)
        return Series(
            self.sig, {e: c * v for e, v in self.terms.items()}, self.precision
        )

    def truncate(self, precision: Rational) -> "Series":
        return Series(self.sig, self.terms, min(self.precision, Fraction(precision)))

    def __pow__(self, k: int) -> "Series":
        if k < 0:
            raise SeriesError("negative power; invert explicitly")
        result = constant(self.sig, 1, self.precision)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- equality and hashing ---------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.sig == other.sig
            and self.precision == other.precision
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.sig, self.precision, frozenset(self.terms.items())))

    def eq_mod_precision(self, other: "Series") -> bool:
        """Equality of the two series modulo the coarser precision."""
        self._require_same_sig(other)
        prec = min(self.precision, other.precision)
        a = {e: c for e, c in self.terms.items() if total_degree(e) < prec}
        b = {e: c for e, c in other.terms.items() if total_degree(e) < prec}
        return a == b

    def __repr__(self):
        return f"Series({render(self)!r}, sig={tuple(self.sig)}, prec={self.precision})"


def mul_precision(a: Series, b: Series) -> Fraction:
    """Propagated precision of a product: min(pa + ord(b), pb + ord(a))."""
    oa, ob = a.order(), b.order()
    candidates = []
    if ob is not None:
        candidates.append(a.precision + ob)
    if oa is not None:
        candidates.append(b.precision + oa)
    if not candidates:
        return min(a.precision, b.precision)
    return min(candidates)


# -- constructors ----------------------------------------------------------


def zero(sig: Signature, precision: Rational) -> Series:
    return Series(sig, {}, precision)


def constant(sig: Signature, c: Rational, precision: Rational) -> Series:
    exp = (tuple([Fraction(0)] * sig.m), tuple([0] * sig.n))
    return Series(sig, {exp: Fraction(c)}, precision)


def monomial(
    sig: Signature,
    xexps: Sequence[Rational],
    yexps: Sequence[int],
    precision: Rational,
    coeff: Rational = 1,
) -> Series:
    exp = (tuple(Fraction(e) for e in xexps), tuple(int(e) for e in yexps))
    return Series(sig, {exp: Fraction(coeff)}, precision)


def x_var(sig: Signature, i: int, precision: Rational) -> Series:
    """The variable X_i (1-based)."""
    xs = [Fraction(0)] * sig.m
    xs[i - 1] = Fraction(1)
    return monomial(sig, xs, [0] * sig.n, precision)


def y_var(sig: Signature, j: int, precision: Rational) -> Series:
    """The variable Y_j (1-based)."""
    ys = [0] * sig.n
    ys[j - 1] = 1
    return monomial(sig, [0] * sig.m, ys, precision)


# -- named operations -------------------------------------------------------


def min_support(a: Series) -> set[Exponent]:
    """Componentwise-minimal elements of the support."""
    exps = list(a.terms)
    minimal = []
    for e in exps:
        if any(f != e and _leq(f, e) for f in exps):
            continue
        minimal.append(e)
    return set(minimal)


def _leq(a: Exponent, b: Exponent) -> bool:
    return all(p <= q for p, q in zip(a[0], b[0])) and all(
        p <= q for p, q in zip(a[1], b[1])
    )


def partial_y(a: Series, j: int) -> Series:
    """Formal partial derivative with respect to Y_j (1-based)."""
    if not 1 <= j <= a.sig.n:
        raise SeriesError(f"y-index {j} out of range for {a.sig}")
    prec = a.precision - 1
    if prec <= 0:
        raise SeriesError("precision too small to differentiate")
    terms = {}
    for (xs, ys), c in a.terms.items():
        k = ys[j - 1]
        if k == 0:
            continue
        ys2 = ys[: j - 1] + (k - 1,) + ys[j:]
        terms[(xs, ys2)] = c * k
    return Series(a.sig, terms, prec)


def log_derivative_x(a: Series, i: int) -> Series:
    """The Euler-type operator sending c*X^a to a_i*c*X^a (1-based i)."""
    if not 1 <= i <= a.sig.m:
        raise SeriesError(f"x-index {i} out of range for {a.sig}")
    terms = {}
    for (xs, ys), c in a.terms.items():
        if xs[i - 1] != 0:
            terms[(xs, ys)] = c * xs[i - 1]
    return Series(a.sig, terms, a.precision)


def set_x_to_zero(a: Series, i: int) -> Series:
    """Set X_i = 0 and drop the variable from the signature (1-based)."""
    if not 1 <= i <= a.sig.m:
        raise SeriesError(f"x-index {i} out of range for {a.sig}")
    sig = Signature(a.sig.m - 1, a.sig.n)
    terms = {}
    for (xs, ys), c in a.terms.items():
        if xs[i - 1] != 0:
            continue
        terms[(xs[: i - 1] + xs[i:], ys)] = c
    return Series(sig, terms, a.precision)


def set_y_to_zero(a: Series, j: int) -> Series:
    """Set Y_j = 0 and drop the variable from the signature (1-based)."""
    if not 1 <= j <= a.sig.n:
        raise SeriesError(f"y-index {j} out of range for {a.sig}")
    sig = Signature(a.sig.m, a.sig.n - 1)
    terms = {}
    for (xs, ys), c in a.terms.items():
        if ys[j - 1] != 0:
            continue
        terms[(xs, ys[: j - 1] + ys[j:])] = c
    return Series(sig, terms, a.precision)


def order_in_y(a: Series, j: int) -> Optional[int]:
    """Order of regularity in Y_j: the smallest d with a nonzero coefficient
    of Y_j^d in a(0, ..., 0, Y_j), or NOT_REGULAR when that restriction
    vanishes up to precision."""
    if not 1 <= j <= a.sig.n:
        raise SeriesError(f"y-index {j} out of range for {a.sig}")
    degrees = []
    for (xs, ys), _ in a.terms.items():
        if any(e != 0 for e in xs):
            continue
        if any(e != 0 for k, e in enumerate(ys) if k != j - 1):
            continue
        degrees.append(ys[j - 1])
    if not degrees:
        return NOT_REGULAR
    return min(degrees)


def binom(alpha: Fraction, k: int) -> Fraction:
    """Generalized binomial coefficient (alpha choose k)."""
    num = Fraction(1)
    for i in range(k):
        num *= alpha - i
    return num / math.factorial(k)


def nth_root_rational(q: Fraction, k: int) -> Optional[Fraction]:
    """Exact positive k-th root of a positive rational, or None."""
    if q <= 0 or k < 1:
        return None
    pn = _int_nth_root(q.numerator, k)
    pd = _int_nth_root(q.denominator, k)
    if pn is None or pd is None:
        return None
    return Fraction(pn, pd)


def _int_nth_root(v: int, k: int) -> Optional[int]:
    if v < 0:
        return None
    r = round(v ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == v:
            return cand
    # float guess can be off for huge ints; fall back to bisection
    lo, hi = 0, max(2, v)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k < v:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**k == v else None


def binomial_series(
    lam: Rational, alpha: Rational, precision: Rational
) -> Series:
    """Truncation of (Y + lam)^alpha as a one-y-variable series.

    Requires lam > 0 and lam^alpha rational, so that all coefficients stay
    in Q.  Callers arrange a prior ramification when alpha is fractional.
    """
    lam = Fraction(lam)
    alpha = Fraction(alpha)
    precision = Fraction(precision)
    if lam <= 0:
        raise SeriesError(f"lambda must be positive, got {lam}")
    scale = _rational_power(lam, alpha)
    if scale is None:
        raise SeriesError(f"{lam}^{alpha} is irrational; ramify first")
    sig = Signature(0, 1)
    terms: dict[Exponent, Fraction] = {}
    k = 0
    while Fraction(k) < precision:
        c = scale * binom(alpha, k) / (lam**k)
        if c != 0:
            terms[((), (k,))] = c
        if alpha.denominator == 1 and 0 <= alpha < k:
            break
        k += 1
    return Series(sig, terms, precision)


def _rational_power(base: Fraction, alpha: Fraction) -> Optional[Fraction]:
    """base^alpha as an exact rational when possible, else None."""
    if alpha.denominator == 1:
        e = alpha.numerator
        return base**e if e >= 0 else Fraction(1) / base ** (-e)
    root = nth_root_rational(base, alpha.denominator)
    if root is None:
        return None
    e = alpha.numerator
    return root**e if e >= 0 else Fraction(1) / root ** (-e)


class Evaluation(NamedTuple):
    """Numeric value of a truncated series plus a bound on the dropped tail."""

    value: Union[Fraction, float]
    tail_bound: float


def evaluate(a: Series, point: Sequence[Rational]) -> Evaluation:
    """Evaluate at a rational point; exact when every power is rational.

    The tail bound is C * ||p||^delta with C the sum of absolute
    coefficients and ||p|| the max-norm of the point.
    """
    if len(point) != a.sig.m + a.sig.n:
        raise SeriesError(
            f"point of length {len(point)} for signature {a.sig}"
        )
    pt = [Fraction(p) for p in point]
    for i in range(a.sig.m):
        if pt[i] < 0:
            raise SeriesError(f"negative x-coordinate {pt[i]} at position {i+1}")
    exact = True
    total: Union[Fraction, float] = Fraction(0)
    for (xs, ys), c in a.terms.items():
        term: Union[Fraction, float] = c
        for base, e in zip(pt[: a.sig.m], xs):
            if e == 0:
                continue
            p = _rational_power(base, e) if base > 0 else (Fraction(0) if e > 0 else None)
            if p is None:
                exact = False
                term = float(term) * float(base) ** float(e)
            else:
                term = term * p if isinstance(term, Fraction) else term * float(p)
        for base, e in zip(pt[a.sig.m :], ys):
            if e:
                term = term * base**e if isinstance(term, Fraction) else term * float(base**e)
        total = total + term if (isinstance(total, Fraction) and isinstance(term, Fraction)) else float(total) + float(term)
    if not exact and isinstance(total, Fraction):
        total = float(total)
    norm = max((abs(float(p)) for p in pt), default=0.0)
    csum = float(sum(abs(c) for c in a.terms.values()))
    tail = csum * norm ** float(a.precision) if norm > 0 else 0.0
    return Evaluation(total, tail)


# -- monomial factor / division --------------------------------------------


def common_monomial(a: Series) -> Exponent:
    """The largest monomial X^b Y^N dividing every term (coordinate minima)."""
    if not a.terms:
        return (tuple([Fraction(0)] * a.sig.m), tuple([0] * a.sig.n))
    exps = list(a.terms)
    xs = tuple(min(e[0][i] for e in exps) for i in range(a.sig.m))
    ys = tuple(min(e[1][j] for e in exps) for j in range(a.sig.n))
    return (xs, ys)


def divide_monomial(a: Series, exp: Exponent) -> Series:
    """Divide by the monomial X^exp; every term must be divisible."""
    exp = _check_exponent(a.sig, exp)
    deg = total_degree(exp)
    terms = {}
    for (xs, ys), c in a.terms.items():
        nxs = tuple(p - q for p, q in zip(xs, exp[0]))
        nys = tuple(p - q for p, q in zip(ys, exp[1]))
        if any(e < 0 for e in nxs) or any(e < 0 for e in nys):
            raise SeriesError(f"term {(xs, ys)} not divisible by {exp}")
        terms[(nxs, nys)] = c
    return Series(a.sig, terms, a.precision - deg)


def mul_monomial(a: Series, exp: Exponent, precision: Optional[Rational] = None) -> Series:
    """Multiply by the monomial X^exp, extending precision accordingly."""
    exp = _check_exponent(a.sig, exp)
    deg = total_degree(exp)
    prec = Fraction(precision) if precision is not None else a.precision + deg
    terms = {}
    for (xs, ys), c in a.terms.items():
        nxs = tuple(p + q for p, q in zip(xs, exp[0]))
        nys = tuple(p + q for p, q in zip(ys, exp[1]))
        terms[(nxs, nys)] = c
    return Series(a.sig, terms, prec)


def invert_unit(u: Series) -> Series:
    """Multiplicative inverse of a unit, modulo precision."""
    c = u.constant_term()
    if c == 0:
        raise SeriesError("cannot invert: zero constant term")
    # u = c*(1 - e) with ord(e) > 0; inverse = (1/c) * sum e^k
    one = constant(u.sig, 1, u.precision)
    e = one - u.scale(Fraction(1) / c)
    acc = constant(u.sig, 1, u.precision)
    term = constant(u.sig, 1, u.precision)
    while True:
        term = term * e
        term = term.truncate(u.precision)
        if term.is_zero():
            break
        acc = acc + term
    return acc.scale(Fraction(1) / c).truncate(u.precision)


# -- variable embedding and substitution -------------------------------------


def insert_x(a: Series, pos: int) -> Series:
    """Add an unused x-variable at 1-based position ``pos``."""
    if not 1 <= pos <= a.sig.m + 1:
        raise SeriesError(f"x-position {pos} out of range for {a.sig}")
    sig = Signature(a.sig.m + 1, a.sig.n)
    terms = {}
    for (xs, ys), c in a.terms.items():
        terms[(xs[: pos - 1] + (Fraction(0),) + xs[pos - 1 :], ys)] = c
    return Series(sig, terms, a.precision)


def insert_y(a: Series, pos: int) -> Series:
    """Add an unused y-variable at 1-based position ``pos``."""
    if not 1 <= pos <= a.sig.n + 1:
        raise SeriesError(f"y-position {pos} out of range for {a.sig}")
    sig = Signature(a.sig.m, a.sig.n + 1)
    terms = {}
    for (xs, ys), c in a.terms.items():
        terms[(xs, ys[: pos - 1] + (0,) + ys[pos - 1 :])] = c
    return Series(sig, terms, a.precision)


def coefficients_in_y(a: Series, j: int) -> dict[int, Series]:
    """Decompose as sum_k H_k * Y_j^k; each H_k keeps Y_j with exponent 0.

    H_k has precision a.precision - k (the truncation of ``a`` hides
    higher-degree contributions to each coefficient).
    """
    if not 1 <= j <= a.sig.n:
        raise SeriesError(f"y-index {j} out of range for {a.sig}")
    buckets: dict[int, dict[Exponent, Fraction]] = {}
    for (xs, ys), c in a.terms.items():
        k = ys[j - 1]
        ys0 = ys[: j - 1] + (0,) + ys[j:]
        buckets.setdefault(k, {})[(xs, ys0)] = c
    return {
        k: Series(a.sig, terms, a.precision - k)
        for k, terms in buckets.items()
        if a.precision - k > 0
    }


def substitute_y(a: Series, replacements: Mapping[int, Series]) -> Series:
    """Substitute Y_j by replacement series (same signature) for each j.

    Replacements must have zero constant term; precision propagates by the
    factor min(1, min order of the replacements).
    """
    for j, rep in replacements.items():
        if not 1 <= j <= a.sig.n:
            raise SeriesError(f"y-index {j} out of range for {a.sig}")
        if rep.sig != a.sig:
            raise SignatureMismatch(f"{rep.sig} != {a.sig}")
        if rep.constant_term() != 0:
            raise SeriesError("replacement series must vanish at the origin")
    factor = Fraction(1)
    for rep in replacements.values():
        o = rep.order()
        if o is not None and o < 1:
            factor = min(factor, o)
    prec = a.precision * factor
    work_prec = a.precision
    result = zero(a.sig, work_prec)
    power_cache: dict[tuple[int, int], Series] = {}

    def rep_power(j: int, k: int) -> Series:
        if k == 0:
            return constant(a.sig, 1, work_prec)
        if (j, k) not in power_cache:
            power_cache[(j, k)] = (rep_power(j, k - 1) * replacements[j]).truncate(
                work_prec
            )
        return power_cache[(j, k)]

    for (xs, ys), c in a.terms.items():
        ys0 = tuple(
            0 if (j + 1) in replacements else e for j, e in enumerate(ys)
        )
        piece = Series(a.sig, {(xs, ys0): c}, work_prec)
        for j, e in enumerate(ys):
            if (j + 1) in replacements and e:
                piece = (piece * rep_power(j + 1, e)).truncate(work_prec)
        result = result + piece
    return Series(a.sig, result.terms, prec)


# -- rendering ---------------------------------------------------------------


def _render_exponent(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e.numerator)
    return f"({e.numerator}/{e.denominator})"


def render(a: Series) -> str:
    """Canonical text form, sorted by graded-lexicographic exponent order."""
    if not a.terms:
        return "0"
    keys = sorted(a.terms, key=lambda e: (total_degree(e), e[0], e[1]))
    parts = []
    for exp in keys:
        c = a.terms[exp]
        factors = []
        for i, e in enumerate(exp[0]):
            if e == 0:
                continue
            factors.append(f"x{i+1}" + (f"^{_render_exponent(e)}" if e != 1 else ""))
        for j, e in enumerate(exp[1]):
            if e == 0:
                continue
            factors.append(f"y{j+1}" + (f"^{e}" if e != 1 else ""))
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out
