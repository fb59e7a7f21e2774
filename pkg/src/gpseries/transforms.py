"""Elementary transformations and their pullback action on series.

Each transformation is a map ``nu`` from a downstream coordinate space
(signature ``(m', n')``) to an upstream one (``(m, n)``).  The pullback
sends a series F over the upstream signature to F o nu over the downstream
one, computed exactly on each term and truncated to a soundly propagated
precision.

Infinity chart parameters are the strings ``"inf"`` / ``"-inf"``; all other
parameters are exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .series import (
    Exponent,
    Rational,
    Series,
    SeriesError,
    Signature,
    SignatureMismatch,
    binom,
    coefficients_in_y,
    constant,
    insert_y,
    substitute_y,
    total_degree,
)

INF = "inf"
NEG_INF = "-inf"

Lambda = Union[Fraction, str]


class TransformError(SeriesError):
    pass


class NeedsRamification(TransformError):
    """A lambda-chart met a fractional exponent; the caller must ramify first."""


def _lam(value) -> Lambda:
    if value in (INF, NEG_INF):
        return value
    return Fraction(value)


def _lam_json(value: Lambda):
    return value if isinstance(value, str) else str(value)


def _frac_json(value: Fraction) -> str:
    return str(value)


Point = list  # numeric point, entries Fraction or float


def _expand_shifted_power(lam: Fraction, b: int):
    """Coefficients of (lam + V)^b as a list indexed by the power of V."""
    return [binom(Fraction(b), k) * lam ** (b - k) for k in range(b + 1)]


@dataclass(frozen=True)
class ElementaryTransform:
    """Base class; concrete variants implement the four hooks below."""

    def result_sig(self, sig: Signature) -> Signature:
        raise NotImplementedError

    def validate(self, sig: Signature) -> None:
        raise NotImplementedError

    def precision_factor(self) -> Fraction:
        return Fraction(1)

    def pullback(self, f: Series) -> Series:
        raise NotImplementedError

    def forward_point_sig(self, p: Sequence, sig: Signature) -> Point:
        """Map a downstream point to its upstream image; sig is the upstream
        signature (needed to locate y-coordinates)."""
        raise NotImplementedError

    def inverse_point(self, p: Sequence, sig: Signature) -> Optional[Point]:
        """Numeric preimage of an upstream point, or None when outside the
        chart's image (closed-form for every variant)."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def describe(self) -> str:
        return json_compact(self.to_json())


def json_compact(obj) -> str:
    import json

    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class BlowUpXX(ElementaryTransform):
    """Chart of the x-x blow-up family pi_{i,j}.

    lam = 0: x_i <- x_j * x_i (signature preserved); lam = inf is the same
    chart with i and j swapped; lam in (0, inf): x_i <- x_j*(lam + y_1'),
    removing x_i and inserting a new first y-variable (requires j < i and
    natural i-exponents).
    """

    i: int
    j: int
    lam: Lambda

    def __post_init__(self):
        object.__setattr__(self, "lam", _lam(self.lam))
        if isinstance(self.lam, Fraction) and self.lam < 0:
            raise TransformError("x-x chart parameter must be >= 0")

    def validate(self, sig: Signature) -> None:
        if not (1 <= self.i <= sig.m and 1 <= self.j <= sig.m):
            raise TransformError(f"indices ({self.i},{self.j}) out of range for {sig}")
        if self.i == self.j:
            raise TransformError("x-x chart requires i != j")
        if isinstance(self.lam, Fraction) and self.lam > 0 and not self.j < self.i:
            raise TransformError("finite-lambda x-x chart requires j < i")

    def result_sig(self, sig: Signature) -> Signature:
        if isinstance(self.lam, Fraction) and self.lam > 0:
            return Signature(sig.m - 1, sig.n + 1)
        return sig

    def pullback(self, f: Series) -> Series:
        self.validate(f.sig)
        if self.lam == INF:
            return BlowUpXX(self.j, self.i, 0).pullback(f)
        if self.lam == 0:
            terms = {}
            for (xs, ys), c in f.terms.items():
                nxs = list(xs)
                nxs[self.j - 1] += xs[self.i - 1]
                key = (tuple(nxs), ys)
                terms[key] = terms.get(key, Fraction(0)) + c
            return Series(f.sig, terms, f.precision)
        # finite positive lambda
        sig2 = self.result_sig(f.sig)
        terms = {}
        for (xs, ys), c in f.terms.items():
            a = xs[self.i - 1]
            if a.denominator != 1:
                raise NeedsRamification(
                    f"x{self.i}-exponent {a} is fractional; ramify before the lambda chart"
                )
            a = int(a)
            base = list(xs[: self.i - 1] + xs[self.i :])
            base[self.j - 1] += a
            for k, coeff in enumerate(_expand_shifted_power(self.lam, a)):
                key = (tuple(base), (k,) + ys)
                terms[key] = terms.get(key, Fraction(0)) + c * coeff
        return Series(sig2, terms, f.precision)

    def forward_point_sig(self, p: Sequence, sig: Signature) -> Point:
        if self.lam == INF:
            return BlowUpXX(self.j, self.i, 0).forward_point_sig(p, sig)
        if self.lam == 0:
            q = list(p)
            q[self.i - 1] = p[self.i - 1] * p[self.j - 1]
            return q
        m, n = sig
        xs = list(p[: m - 1])
        y1 = p[m - 1]
        ys = list(p[m:])
        xi = xs[self.j - 1] * (self.lam + y1)
        nxs = xs[: self.i - 1] + [xi] + xs[self.i - 1 :]
        return nxs + ys

    def inverse_point(self, p: Sequence, sig: Signature) -> Optional[Point]:
        if self.lam == INF:
            return BlowUpXX(self.j, self.i, 0).inverse_point(p, sig)
        if self.lam == 0:
            if p[self.j - 1] == 0:
                return None
            q = list(p)
            q[self.i - 1] = p[self.i - 1] / p[self.j - 1]
            return q
        m = sig.m
        if p[self.j - 1] == 0:
            return None
        y1 = p[self.i - 1] / p[self.j - 1] - self.lam
        xs = list(p[:m])
        del xs[self.i - 1]
        return xs + [y1] + list(p[m:])

    def to_json(self) -> dict:
        return {"kind": "blowup_xx", "i": self.i, "j": self.j, "lam": _lam_json(self.lam)}


@dataclass(frozen=True)
class BlowUpYX(ElementaryTransform):
    """Chart of the y-x blow-up family pi_{m+i,j}.

    Finite lam: y_i <- x_j*(lam + y_i) (signature preserved);
    lam = +-inf: x_j <- x_new * x_j, y_i <- +-x_new with a new x-variable
    appended, dropping y_i.
    """

    i: int
    j: int
    lam: Lambda

    def __post_init__(self):
        object.__setattr__(self, "lam", _lam(self.lam))

    def validate(self, sig: Signature) -> None:
        if not (1 <= self.i <= sig.n and 1 <= self.j <= sig.m):
            raise TransformError(f"indices ({self.i},{self.j}) out of range for {sig}")

    def result_sig(self, sig: Signature) -> Signature:
        if self.lam in (INF, NEG_INF):
            return Signature(sig.m + 1, sig.n - 1)
        return sig

    def pullback(self, f: Series) -> Series:
        self.validate(f.sig)
        m, n = f.sig
        if self.lam in (INF, NEG_INF):
            sign = 1 if self.lam == INF else -1
            sig2 = self.result_sig(f.sig)
            terms = {}
            for (xs, ys), c in f.terms.items():
                b = ys[self.i - 1]
                nxs = xs + (xs[self.j - 1] + b,)
                nys = ys[: self.i - 1] + ys[self.i :]
                key = (nxs, nys)
                terms[key] = terms.get(key, Fraction(0)) + c * (sign**b)
            return Series(sig2, terms, f.precision)
        terms = {}
        for (xs, ys), c in f.terms.items():
            b = ys[self.i - 1]
            nxs = list(xs)
            nxs[self.j - 1] += b
            for k, coeff in enumerate(_expand_shifted_power(self.lam, b)):
                nys = ys[: self.i - 1] + (k,) + ys[self.i :]
                key = (tuple(nxs), nys)
                terms[key] = terms.get(key, Fraction(0)) + c * coeff
        return Series(f.sig, terms, f.precision)

    def forward_point_sig(self, p: Sequence, sig: Signature) -> Point:
        m, n = sig
        if self.lam in (INF, NEG_INF):
            sign = 1 if self.lam == INF else -1
            xs = list(p[: m + 1])
            ys = list(p[m + 1 :])
            xnew = xs[m]
            xj = xnew * xs[self.j - 1]
            nxs = xs[:m]
            nxs[self.j - 1] = xj
            nys = ys[: self.i - 1] + [sign * xnew] + ys[self.i - 1 :]
            return nxs + nys
        q = list(p)
        q[m + self.i - 1] = p[self.j - 1] * (self.lam + p[m + self.i - 1])
        return q

    def inverse_point(self, p: Sequence, sig: Signature) -> Optional[Point]:
        m, n = sig
        if self.lam in (INF, NEG_INF):
            sign = 1 if self.lam == INF else -1
            yi = p[m + self.i - 1]
            xnew = sign * yi
            if xnew < 0:
                return None
            if xnew == 0:
                return None
            xj = p[self.j - 1] / xnew
            if xj < 0:
                return None
            nxs = list(p[:m])
            nxs[self.j - 1] = xj
            nys = list(p[m:])
            del nys[self.i - 1]
            return nxs + [xnew] + nys
        if p[self.j - 1] == 0:
            return None
        q = list(p)
        q[m + self.i - 1] = p[m + self.i - 1] / p[self.j - 1] - self.lam
        return q

    def to_json(self) -> dict:
        return {"kind": "blowup_yx", "i": self.i, "j": self.j, "lam": _lam_json(self.lam)}


@dataclass(frozen=True)
class BlowUpYY(ElementaryTransform):
    """Chart of the y-y blow-up family pi_{m+i,m+j}: y_i <- y_j*(lam + y_i);
    lam = inf is the lam = 0 chart with i and j swapped."""

    i: int
    j: int
    lam: Lambda

    def __post_init__(self):
        object.__setattr__(self, "lam", _lam(self.lam))
        if self.lam == NEG_INF:
            raise TransformError("y-y charts use lam in Q or inf")

    def validate(self, sig: Signature) -> None:
        if not (1 <= self.i <= sig.n and 1 <= self.j <= sig.n):
            raise TransformError(f"indices ({self.i},{self.j}) out of range for {sig}")
        if self.i == self.j:
            raise TransformError("y-y chart requires i != j")

    def result_sig(self, sig: Signature) -> Signature:
        return sig

    def pullback(self, f: Series) -> Series:
        self.validate(f.sig)
        if self.lam == INF:
            return BlowUpYY(self.j, self.i, 0).pullback(f)
        terms = {}
        for (xs, ys), c in f.terms.items():
            b = ys[self.i - 1]
            base = list(ys)
            base[self.j - 1] += b
            for k, coeff in enumerate(_expand_shifted_power(self.lam, b)):
                nys = list(base)
                nys[self.i - 1] = k
                key = (xs, tuple(nys))
                terms[key] = terms.get(key, Fraction(0)) + c * coeff
        return Series(f.sig, terms, f.precision)

    def forward_point_sig(self, p: Sequence, sig: Signature) -> Point:
        if self.lam == INF:
            return BlowUpYY(self.j, self.i, 0).forward_point_sig(p, sig)
        m = sig.m
        q = list(p)
        q[m + self.i - 1] = p[m + self.j - 1] * (self.lam + p[m + self.i - 1])
        return q

    def inverse_point(self, p: Sequence, sig: Signature) -> Optional[Point]:
        if self.lam == INF:
            return BlowUpYY(self.j, self.i, 0).inverse_point(p, sig)
        m = sig.m
        if p[m + self.j - 1] == 0:
            return None
        q = list(p)
        q[m + self.i - 1] = p[m + self.i - 1] / p[m + self.j - 1] - self.lam
        return q

    def to_json(self) -> dict:
        return {"kind": "blowup_yy", "i": self.i, "j": self.j, "lam": _lam_json(self.lam)}


@dataclass(frozen=True)
class Tschirnhausen(ElementaryTransform):
    """Translation y_j <- y_j + h(x, other y's), h(0) = 0.

    ``h`` is a series over (m, n-1); its y-variables are the ambient
    y-variables other than y_j, in order.  ``j = 0`` means the last one."""

    h: Series  # over (m, n-1)
    j: int = 0

    def __post_init__(self):
        if self.h.constant_term() != 0:
            raise TransformError("Tschirnhausen center must vanish at the origin")

    def _index(self, sig: Signature) -> int:
        return sig.n if self.j == 0 else self.j

    def validate(self, sig: Signature) -> None:
        if sig.n < 1:
            raise TransformError("Tschirnhausen needs at least one y-variable")
        if not 1 <= self._index(sig) <= sig.n:
            raise TransformError(f"index {self.j} out of range for {sig}")
        if self.h.sig != Signature(sig.m, sig.n - 1):
            raise SignatureMismatch(
                f"center over {self.h.sig}, expected {Signature(sig.m, sig.n - 1)}"
            )

    def result_sig(self, sig: Signature) -> Signature:
        return sig

    def precision_factor(self) -> Fraction:
        o = self.h.order()
        if o is None or o >= 1:
            return Fraction(1)
        return o

    def pullback(self, f: Series) -> Series:
        self.validate(f.sig)
        j = self._index(f.sig)
        from .series import y_var

        h_emb = insert_y(self.h, j)
        rep = y_var(f.sig, j, f.precision) + h_emb.truncate(f.precision)
        # substitute_y requires zero constant term; rep = y_j + h qualifies
        return substitute_y(f, {j: rep})

    def forward_point_sig(self, p: Sequence, sig: Signature) -> Point:
        from .series import evaluate

        m, n = sig
        j = self._index(sig)
        args = list(p[: m + j - 1]) + list(p[m + j :])
        hval = evaluate(self.h, args).value
        q = list(p)
        q[m + j - 1] = p[m + j - 1] + hval
        return q

    def inverse_point(self, p: Sequence, sig: Signature) -> Optional[Point]:
        from .series import evaluate

        m, n = sig
        j = self._index(sig)
        args = list(p[: m + j - 1]) + list(p[m + j :])
        hval = evaluate(self.h, args).value
        q = list(p)
        q[m + j - 1] = p[m + j - 1] - hval
        return q

    def to_json(self) -> dict:
        from .series import render

        return {
            "kind": "tschirnhausen",
            "h": render(self.h),
            "h_sig": list(self.h.sig),
            "h_prec": str(self.h.precision),
            "j": self.j,
        }

    def __hash__(self):
        return hash(("tschirnhausen", self.h, self.j))


@dataclass(frozen=True)
class Linear(ElementaryTransform):
    """y_k <- y_k + c_k * y_i for k < i."""

    i: int
    c: tuple

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(Fraction(v) for v in self.c))

    def validate(self, sig: Signature) -> None:
        if not 1 <= self.i <= sig.n:
            raise TransformError(f"index {self.i} out of range for {sig}")
        if len(self.c) != self.i - 1:
            raise TransformError(f"coefficient tuple must have length {self.i - 1}")

    def result_sig(self, sig: Signature) -> Signature:
        return sig

    def pullback(self, f: Series) -> Series:
        self.validate(f.sig)
        from .series import y_var

        reps = {}
        for k, ck in enumerate(self.c, start=1):
            if ck == 0:
                continue
            reps[k] = y_var(f.sig, k, f.precision) + y_var(
                f.sig, self.i, f.precision
            ).scale(ck)
        if not reps:
            return f
        return substitute_y(f, reps)

    def forward_point_sig(self, p: Sequence, sig: Signature) -> Point:
        m = sig.m
        q = list(p)
        for k, ck in enumerate(self.c, start=1):
            q[m + k - 1] = p[m + k - 1] + ck * p[m + self.i - 1]
        return q

    def inverse_point(self, p: Sequence, sig: Signature) -> Optional[Point]:
        m = sig.m
        q = list(p)
        for k, ck in enumerate(self.c, start=1):
            q[m + k - 1] = p[m + k - 1] - ck * p[m + self.i - 1]
        return q

    def to_json(self) -> dict:
        return {"kind": "linear", "i": self.i, "c": [str(v) for v in self.c]}


@dataclass(frozen=True)
class RamifyX(ElementaryTransform):
    """x_i <- x_i^gamma (gamma > 0 rational); exponents scale by gamma."""

    i: int
    gamma: Fraction

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if self.gamma <= 0:
            raise TransformError("ramification exponent must be positive")

    def validate(self, sig: Signature) -> None:
        if not 1 <= self.i <= sig.m:
            raise TransformError(f"index {self.i} out of range for {sig}")

    def result_sig(self, sig: Signature) -> Signature:
        return sig

    def precision_factor(self) -> Fraction:
        return min(Fraction(1), self.gamma)

    def pullback(self, f: Series) -> Series:
        self.validate(f.sig)
        prec = f.precision * self.precision_factor()
        terms = {}
        for (xs, ys), c in f.terms.items():
            nxs = list(xs)
            nxs[self.i - 1] *= self.gamma
            terms[(tuple(nxs), ys)] = c
        return Series(f.sig, terms, prec)

    def forward_point_sig(self, p: Sequence, sig: Signature) -> Point:
        q = list(p)
        q[self.i - 1] = _power_numeric(p[self.i - 1], self.gamma)
        return q

    def inverse_point(self, p: Sequence, sig: Signature) -> Optional[Point]:
        if p[self.i - 1] < 0:
            return None
        q = list(p)
        q[self.i - 1] = _power_numeric(p[self.i - 1], Fraction(1) / self.gamma)
        return q

    def to_json(self) -> dict:
        return {"kind": "ramify_x", "i": self.i, "gamma": str(self.gamma)}


def _power_numeric(v, e: Fraction):
    from .series import _rational_power

    if v == 0:
        return Fraction(0) if e > 0 else None
    if isinstance(v, Fraction) and v > 0:
        p = _rational_power(v, e)
        if p is not None:
            return p
    return float(v) ** float(e)


@dataclass(frozen=True)
class RamifyY(ElementaryTransform):
    """y_i <- sign * y_i^d with d >= 1 a natural number."""

    i: int
    d: int
    sign: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise TransformError("y-ramification degree must be >= 1")
        if self.sign not in (1, -1):
            raise TransformError("sign must be +1 or -1")

    def validate(self, sig: Signature) -> None:
        if not 1 <= self.i <= sig.n:
            raise TransformError(f"index {self.i} out of range for {sig}")

    def result_sig(self, sig: Signature) -> Signature:
        return sig

    def pullback(self, f: Series) -> Series:
        self.validate(f.sig)
        terms = {}
        for (xs, ys), c in f.terms.items():
            b = ys[self.i - 1]
            nys = ys[: self.i - 1] + (b * self.d,) + ys[self.i :]
            terms[(xs, nys)] = c * (self.sign**b)
        return Series(f.sig, terms, f.precision)

    def forward_point_sig(self, p: Sequence, sig: Signature) -> Point:
        m = sig.m
        q = list(p)
        q[m + self.i - 1] = self.sign * p[m + self.i - 1] ** self.d
        return q

    def inverse_point(self, p: Sequence, sig: Signature) -> Optional[Point]:
        m = sig.m
        v = self.sign * p[m + self.i - 1]
        if self.d % 2 == 1:
            root = math.copysign(abs(float(v)) ** (1.0 / self.d), v)
        else:
            if v < 0:
                return None
            root = float(v) ** (1.0 / self.d)
        q = list(p)
        q[m + self.i - 1] = root
        return q

    def to_json(self) -> dict:
        return {"kind": "ramify_y", "i": self.i, "d": self.d, "sign": self.sign}


@dataclass(frozen=True)
class SignChart(ElementaryTransform):
    """y_i <- sign * x_new, turning y_i into a nonnegative x-variable
    (the new variable is appended after x_m)."""

    i: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise TransformError("sign must be +1 or -1")

    def validate(self, sig: Signature) -> None:
        if not 1 <= self.i <= sig.n:
            raise TransformError(f"index {self.i} out of range for {sig}")

    def result_sig(self, sig: Signature) -> Signature:
        return Signature(sig.m + 1, sig.n - 1)

    def pullback(self, f: Series) -> Series:
        self.validate(f.sig)
        sig2 = self.result_sig(f.sig)
        terms = {}
        for (xs, ys), c in f.terms.items():
            b = ys[self.i - 1]
            nxs = xs + (Fraction(b),)
            nys = ys[: self.i - 1] + ys[self.i :]
            key = (nxs, nys)
            terms[key] = terms.get(key, Fraction(0)) + c * (self.sign**b)
        return Series(sig2, terms, f.precision)

    def forward_point_sig(self, p: Sequence, sig: Signature) -> Point:
        m = sig.m
        xnew = p[m]
        nxs = list(p[:m])
        nys = list(p[m + 1 :])
        nys = nys[: self.i - 1] + [self.sign * xnew] + nys[self.i - 1 :]
        return nxs + nys

    def inverse_point(self, p: Sequence, sig: Signature) -> Optional[Point]:
        m = sig.m
        v = self.sign * p[m + self.i - 1]
        if v < 0:
            return None
        nys = list(p[m:])
        del nys[self.i - 1]
        return list(p[:m]) + [v] + nys

    def to_json(self) -> dict:
        return {"kind": "sign_chart", "i": self.i, "sign": self.sign}


_KINDS = {
    "blowup_xx": lambda d: BlowUpXX(d["i"], d["j"], _lam_from_json(d["lam"])),
    "blowup_yx": lambda d: BlowUpYX(d["i"], d["j"], _lam_from_json(d["lam"])),
    "blowup_yy": lambda d: BlowUpYY(d["i"], d["j"], _lam_from_json(d["lam"])),
    "linear": lambda d: Linear(d["i"], tuple(Fraction(v) for v in d["c"])),
    "ramify_x": lambda d: RamifyX(d["i"], Fraction(d["gamma"])),
    "ramify_y": lambda d: RamifyY(d["i"], d["d"], d["sign"]),
    "sign_chart": lambda d: SignChart(d["i"], d["sign"]),
}


def _lam_from_json(v):
    return v if v in (INF, NEG_INF) else Fraction(v)


def transform_from_json(d: dict, precision: Rational = None) -> ElementaryTransform:
    kind = d["kind"]
    if kind == "tschirnhausen":
        from .parser import parse_series

        m, nm1 = d["h_sig"]
        if "h_prec" in d:
            precision = Fraction(d["h_prec"])
        if precision is None:
            raise TransformError("tschirnhausen deserialization needs a precision")
        return Tschirnhausen(
            parse_series(d["h"], Signature(m, nm1), precision), d.get("j", 0)
        )
    if kind not in _KINDS:
        raise TransformError(f"unknown transform kind {kind!r}")
    return _KINDS[kind](d)


# -- chains -------------------------------------------------------------------


def chain_sigs(chain: Sequence[ElementaryTransform], sig: Signature) -> list[Signature]:
    """Signatures along the chain, starting from the upstream signature."""
    sigs = [sig]
    for t in chain:
        t.validate(sigs[-1])
        sigs.append(t.result_sig(sigs[-1]))
    return sigs


def pullback(t: ElementaryTransform, f: Series) -> Series:
    """Pullback F |-> F o nu for a single elementary transformation."""
    return t.pullback(f)


def pullback_chain(chain: Sequence[ElementaryTransform], f: Series) -> Series:
    """Left-to-right composition: F o nu_1 o ... o nu_N."""
    for idx, t in enumerate(chain):
        try:
            f = t.pullback(f)
        except SeriesError as exc:
            raise TransformError(f"step {idx + 1} ({t.describe()}): {exc}") from exc
    return f


def forward_point(t: ElementaryTransform, p: Sequence, sig: Signature) -> Point:
    """Image of a downstream point under nu (sig is the upstream signature)."""
    return t.forward_point_sig(p, sig)


def forward_chain(
    chain: Sequence[ElementaryTransform], p: Sequence, sig: Signature
) -> Point:
    """Image of a leaf point under nu_1 o ... o nu_N."""
    sigs = chain_sigs(chain, sig)
    q = list(p)
    for t, s in zip(reversed(chain), reversed(sigs[:-1])):
        q = t.forward_point_sig(q, s)
    return q


def inverse_chain(
    chain: Sequence[ElementaryTransform], p: Sequence, sig: Signature
) -> Optional[Point]:
    """Numeric preimage of an upstream point through the whole chain."""
    sigs = chain_sigs(chain, sig)
    q = list(p)
    for t, s in zip(chain, sigs[:-1]):
        q = t.inverse_point(q, s)
        if q is None:
            return None
    return q


def chain_precision_factor(chain: Sequence[ElementaryTransform]) -> Fraction:
    factor = Fraction(1)
    for t in chain:
        factor *= t.precision_factor()
    return factor


def chain_to_json(chain: Sequence[ElementaryTransform]) -> list:
    return [t.to_json() for t in chain]
