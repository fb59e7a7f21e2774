"""Monomialisation engine.

Given a series over (m, n), builds a tree of elementary transformations such
that on every branch the pullback becomes *normal*: a monomial in (x, y)
times a unit.  The recursion re-derives its state at every node from the
pulled-back series, so each step is one of:

  * factor the largest common monomial; stop if the cofactor is a unit;
  * if the cofactor vanishes on {x = 0} (or there are no y-variables),
    principalize one incomparable pair of minimal support elements with a
    blow-up chart family;
  * otherwise make the cofactor regular in the last y-variable (linear
    shear if needed) of some order d, then:
      - d = 1: implicit solve + translation, which exposes a factor y_n;
      - d >= 2: translation killing the Y^{d-1} coefficient, joint
        monomialisation of the lower coefficients in one fewer y-variable,
        then a weighted blow-up family that either monomialises, shrinks
        the critical monomial, or drops the order of regularity.
"""

from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .series import (
    Exponent,
    Series,
    SeriesError,
    Signature,
    _leq,
    common_monomial,
    divide_monomial,
    min_support,
    monomial as monomial_series,
    render,
    set_y_to_zero,
    total_degree,
)
from .transforms import (
    INF,
    NEG_INF,
    BlowUpXX,
    BlowUpYX,
    BlowUpYY,
    ElementaryTransform,
    Linear,
    NeedsRamification,
    RamifyX,
    Tschirnhausen,
    chain_to_json,
    pullback_chain,
)
from .trees import AdmissibleTree, DEFAULT_PALETTE, LambdaPalette, TreeNode, tree_to_json
from .division import DivisionError, regular_order, solve_implicit, split_in_y, tschirnhausen_center


class EngineError(SeriesError):
    pass


class PrecisionExhausted(EngineError):
    """The truncation order is too small to certify the next step."""


class CapExceeded(EngineError):
    """Tree depth or principalization budget exhausted."""


@dataclass(frozen=True)
class EngineOptions:
    palette: LambdaPalette = DEFAULT_PALETTE
    max_depth: int = 64
    princ_cap: int = 200
    max_steps: int = 20000


@dataclass(frozen=True)
class NormalForm:
    monomial: Exponent
    unit: Series


def normal_form(f: Series) -> Optional[NormalForm]:
    """(monomial, unit) when f is monomial times unit, else None."""
    if f.is_zero():
        return None
    exp = common_monomial(f)
    cof = divide_monomial(f, exp)
    if cof.is_unit():
        return NormalForm(exp, cof)
    return None


def _monomial_json(exp: Exponent) -> dict:
    return {"x": [str(v) for v in exp[0]], "y": list(exp[1])}


# -- small algebra helpers ----------------------------------------------------


def _set_all_x_zero(g: Series) -> Series:
    return Series(
        g.sig,
        {e: c for e, c in g.terms.items() if all(v == 0 for v in e[0])},
        g.precision,
    )


def _coord_get(exp: Exponent, coord) -> Fraction:
    axis, idx = coord
    return Fraction(exp[0][idx - 1]) if axis == "x" else Fraction(exp[1][idx - 1])


def _coords(sig: Signature):
    return [("x", i) for i in range(1, sig.m + 1)] + [
        ("y", j) for j in range(1, sig.n + 1)
    ]


def _divisors(v: int, cap: int = 10**12) -> list[int]:
    v = abs(v)
    if v == 0:
        return []
    if v > cap:
        return [d for d in range(1, 1001) if v % d == 0]
    out = []
    d = 1
    while d * d <= v:
        if v % d == 0:
            out.append(d)
            out.append(v // d)
        d += 1
    return sorted(set(out))


def rational_roots(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Nonzero rational roots of sum(coeffs[k] * t^k), exact."""
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    start = 0
    while start < len(coeffs) and coeffs[start] == 0:
        start += 1
    coeffs = coeffs[start:]
    if len(coeffs) <= 1:
        return []
    denom_lcm = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * denom_lcm) for c in coeffs]
    a0, ad = ints[0], ints[-1]
    roots = set()
    for p in _divisors(a0):
        for q in _divisors(ad):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                acc = Fraction(0)
                for c in reversed(ints):
                    acc = acc * cand + c
                if acc == 0:
                    roots.add(cand)
    return sorted(roots)


def critical_lambdas(g: Series, src, tgt) -> list[Fraction]:
    """Chart parameters at which the family chart `src <- tgt*(lam + v)`
    degenerates: nonzero rational roots of the edge polynomial built from the
    terms supported only on the (src, tgt) axes at minimal combined degree."""
    mu = None
    for exp in g.terms:
        s = _coord_get(exp, src) + _coord_get(exp, tgt)
        mu = s if mu is None else min(mu, s)
    if mu is None:
        return []
    poly: dict[int, Fraction] = {}
    for exp, c in g.terms.items():
        p = _coord_get(exp, src)
        q = _coord_get(exp, tgt)
        others = sum(exp[0]) + sum(exp[1]) - p - q
        if others != 0 or p + q != mu:
            continue
        if p.denominator != 1:
            continue
        k = int(p)
        poly[k] = poly.get(k, Fraction(0)) + c
    if not poly:
        return []
    deg = max(poly)
    return rational_roots([poly.get(k, Fraction(0)) for k in range(deg + 1)])


def _first_incomparable_pair(g: Series) -> Optional[tuple[Exponent, Exponent]]:
    ms = sorted(min_support(g), key=lambda e: (total_degree(e), e[0], e[1]))
    for a in range(len(ms)):
        for b in range(a + 1, len(ms)):
            if not _leq(ms[a], ms[b]) and not _leq(ms[b], ms[a]):
                return ms[a], ms[b]
    return None


def _lowest_homogeneous(g0: Series) -> tuple[Fraction, dict]:
    """(order, {y-exponent: coeff}) of the y-only series g0."""
    d0 = min(total_degree(e) for e in g0.terms)
    part = {e[1]: c for e, c in g0.terms.items() if total_degree(e) == d0}
    return d0, part


def _candidate_ints(bound: int):
    yield 0
    for v in range(1, bound + 1):
        yield v
        yield -v


def _find_shear(part: dict, n: int, d0: int) -> Optional[tuple]:
    """Integer tuple c with H(c_1..c_{n-1}, 1) != 0 for the homogeneous part H."""
    import itertools

    bound = int(d0) + 1
    for c in itertools.product(_candidate_ints(bound), repeat=n - 1):
        val = Fraction(0)
        for ys, coeff in part.items():
            term = coeff
            ok = True
            for k in range(n - 1):
                if ys[k]:
                    if c[k] == 0:
                        ok = False
                        break
                    term *= Fraction(c[k]) ** ys[k]
            if ok:
                val += term
        if val != 0:
            return tuple(Fraction(v) for v in c)
    return None


def _coefficient_of_yn(g: Series, k: int) -> Series:
    """Coefficient series of Y_n^k, kept over the same signature with the
    last y-exponent zeroed; precision drops by k."""
    prec = g.precision - k
    terms = {}
    for (xs, ys), c in g.terms.items():
        if ys[-1] == k:
            terms[(xs, ys[:-1] + (0,))] = c
    return Series(g.sig, terms, prec)


# -- the engine ---------------------------------------------------------------


class _Engine:
    def __init__(self, options: EngineOptions):
        self.opt = options
        self.audit: list[dict] = []
        self.princ_used = 0
        self.steps_used = 0

    def log(self, depth: int, action: str, **kw):
        entry = {"depth": depth, "action": action}
        entry.update(kw)
        self.audit.append(entry)

    def run(self, f: Series) -> AdmissibleTree:
        tree = AdmissibleTree(f.sig)
        self.process(tree.root, f, 0)
        return tree

    # one child reached through a linear path of transforms
    def _path(self, node: TreeNode, transforms: Sequence[ElementaryTransform]) -> TreeNode:
        for t in transforms:
            node = node.add_child(t)
        return node

    def process(self, node: TreeNode, f: Series, depth: int) -> None:
        if depth > self.opt.max_depth:
            raise CapExceeded(f"tree depth exceeded {self.opt.max_depth}")
        self.steps_used += 1
        if self.steps_used > self.opt.max_steps:
            raise CapExceeded(f"step budget exceeded {self.opt.max_steps}")
        if f.precision <= 0:
            raise PrecisionExhausted("no positive truncation order left")
        if f.is_zero():
            node.payload = {"kind": "zero", "precision": str(f.precision)}
            return
        beta = common_monomial(f)
        g = divide_monomial(f, beta)
        if g.is_unit():
            node.payload = {
                "kind": "normal",
                "monomial": _monomial_json(beta),
                "unit": render(g),
                "precision": str(g.precision),
            }
            self.log(depth, "leaf", monomial=_monomial_json(beta))
            return
        m, n = f.sig
        if n and beta[1][-1]:
            # keep any y_n-monomial factor inside the cofactor: recentering in
            # y_n must account for it, otherwise the translate and the next
            # center extraction undo each other
            beta = (beta[0], beta[1][:-1] + (0,))
            g = divide_monomial(f, beta)
        g0 = _set_all_x_zero(g)
        if n == 0 or g0.is_zero():
            self._principalize(node, f, g, depth)
            return
        d0f, part = _lowest_homogeneous(g0)
        if d0f.denominator != 1:
            raise EngineError("y-only part has fractional order")
        d0 = int(d0f)
        if g.precision <= d0:
            raise PrecisionExhausted(
                f"truncation order {g.precision} cannot certify regularity of order {d0}"
            )
        shear = _find_shear(part, n, d0)
        if shear is None:
            raise EngineError("no integer shear renders the series regular")
        if any(v != 0 for v in shear):
            t = Linear(n, shear)
            self.log(depth, "shear", c=[str(v) for v in shear])
            child = node.add_child(t)
            self.process(child, t.pullback(f), depth + 1)
            return
        d = regular_order(g)
        if d != d0:
            raise EngineError(f"regular order {d} disagrees with y-order {d0}")
        if d == 1:
            self._order_one(node, f, g, depth)
            return
        self._order_d(node, f, g, beta, d, depth)

    # -- principalization of the x-monomial part ----------------------------

    def _principalize(self, node: TreeNode, f: Series, g: Series, depth: int) -> None:
        pair = _first_incomparable_pair(g)
        if pair is None:
            raise EngineError("non-unit cofactor with totally ordered support")
        self.princ_used += 1
        if self.princ_used > self.opt.princ_cap:
            raise CapExceeded(f"principalization budget {self.opt.princ_cap} exhausted")
        a, b = pair
        coords = _coords(f.sig)
        gt = [c for c in coords if _coord_get(a, c) > _coord_get(b, c)]
        lt = [c for c in coords if _coord_get(a, c) < _coord_get(b, c)]
        gx = [c for c in gt if c[0] == "x"]
        lx = [c for c in lt if c[0] == "x"]
        gy = [c for c in gt if c[0] == "y"]
        ly = [c for c in lt if c[0] == "y"]
        if gx and lx:
            self._principalize_xx(node, f, g, gx[0][1], lx[0][1], depth)
        elif gy and ly:
            self._principalize_yy(node, f, g, gy[0][1], ly[0][1], depth)
        else:
            # mixed: one side differs in y, the other in x
            if gy and lx:
                yi, xj = gy[0][1], lx[0][1]
            else:
                yi, xj = ly[0][1], gx[0][1]
            self._principalize_yx(node, f, g, yi, xj, depth)

    def _principalize_xx(self, node, f, g, i, j, depth):
        big, small = max(i, j), min(i, j)
        denoms = [
            e[0][big - 1].denominator for e in f.terms if e[0][big - 1] != 0
        ]
        lcm = math.lcm(*denoms) if denoms else 1
        base = node
        if lcm > 1:
            t = RamifyX(big, Fraction(lcm))
            base = node.add_child(t)
            f = t.pullback(f)
            g = t.pullback(g)
        extras = [r for r in critical_lambdas(g, ("x", big), ("x", small)) if r > 0]
        self.log(depth, "principalize_xx", i=big, j=small, extras=[str(v) for v in extras])
        for lam in self.opt.palette.nonneg(extras):
            t = BlowUpXX(big, small, lam)
            child = base.add_child(t)
            self.process(child, t.pullback(f), depth + 1 + (lcm > 1))

    def _principalize_yy(self, node, f, g, i, j, depth):
        extras = [r for r in critical_lambdas(g, ("y", i), ("y", j)) if r != 0]
        self.log(depth, "principalize_yy", i=i, j=j, extras=[str(v) for v in extras])
        for lam in self.opt.palette.signed(extras):
            if lam == NEG_INF:
                continue
            t = BlowUpYY(i, j, lam)
            child = node.add_child(t)
            self.process(child, t.pullback(f), depth + 1)

    def _principalize_yx(self, node, f, g, i, j, depth):
        extras = [r for r in critical_lambdas(g, ("y", i), ("x", j)) if r != 0]
        self.log(depth, "principalize_yx", i=i, j=j, extras=[str(v) for v in extras])
        for lam in self.opt.palette.signed(extras):
            t = BlowUpYX(i, j, lam)
            child = node.add_child(t)
            self.process(child, t.pullback(f), depth + 1)

    # -- regular order 1 ------------------------------------------------------

    def _order_one(self, node, f, g, depth):
        try:
            a = solve_implicit(g)
        except DivisionError as exc:
            raise PrecisionExhausted(f"implicit solve failed: {exc}") from exc
        if a.is_zero():
            # already divisible by y_n; should have been factored out
            raise EngineError("vanishing implicit solution past monomial extraction")
        t = Tschirnhausen(a)
        self.log(depth, "translate_order1", h=render(a))
        child = node.add_child(t)
        self.process(child, t.pullback(f), depth + 1)

    # -- regular order d >= 2 -------------------------------------------------

    def _order_d(self, node, f, g, beta, d, depth):
        m, n = f.sig
        try:
            b = tschirnhausen_center(g, d)
        except DivisionError as exc:
            raise PrecisionExhausted(f"center extraction failed: {exc}") from exc
        if not b.is_zero():
            t = Tschirnhausen(b)
            self.log(depth, "translate_center", d=d, h=render(b))
            child = node.add_child(t)
            self.process(child, t.pullback(f), depth + 1)
            return
        # Y^{d-1} coefficient vanishes; inspect the lower coefficients
        coeffs = {}
        for i in range(2, d + 1):
            c = _coefficient_of_yn(g, d - i)
            if not c.is_zero():
                coeffs[i] = c
        if not coeffs:
            raise EngineError("pure power of y_n past monomial extraction")
        data = {}
        good = True
        for i, c in coeffs.items():
            mexp = common_monomial(c)
            if divide_monomial(c, mexp).is_unit() and mexp[1][-1] == 0:
                mu = (
                    tuple(v / i for v in mexp[0]),
                    tuple(Fraction(v, i) for v in mexp[1]),
                )
                data[i] = (mexp, mu)
            else:
                good = False
                break
        if good:
            mus = {i: mu for i, (_, mu) in data.items()}
            minimal = [
                i
                for i, mu in mus.items()
                if all(_mu_leq(mu, other) for other in mus.values())
            ]
            if not minimal:
                good = False
        if not good:
            self._joint_coefficient_step(node, f, g, beta, d, coeffs, depth)
            return
        l = max(minimal)
        mexp_l, mu_l = data[l]
        if all(v == 0 for v in mexp_l[0]) and all(v == 0 for v in mexp_l[1]):
            raise EngineError("unit coefficient contradicts the regular order")
        target = None
        for i in range(1, m + 1):
            if mexp_l[0][i - 1] != 0:
                target = ("x", i)
                break
        if target is None:
            for j in range(1, n):
                if mexp_l[1][j - 1] != 0:
                    target = ("y", j)
                    break
        if target[0] == "x":
            v = target[1]
            gamma = mu_l[0][v - 1]
            base = node
            extra_depth = 0
            if gamma != 1:
                t = RamifyX(v, Fraction(1) / gamma)
                base = node.add_child(t)
                f = t.pullback(f)
                g = t.pullback(g)
                extra_depth = 1
            extras = [r for r in critical_lambdas(g, ("y", n), ("x", v)) if r != 0]
            self.log(
                depth, "weighted_blowup_x", d=d, l=l, v=v,
                gamma=str(gamma), extras=[str(r) for r in extras],
            )
            for lam in self.opt.palette.signed(extras):
                t = BlowUpYX(n, v, lam)
                child = base.add_child(t)
                self.process(child, t.pullback(f), depth + 1 + extra_depth)
        else:
            j = target[1]
            extras = [r for r in critical_lambdas(g, ("y", n), ("y", j)) if r != 0]
            self.log(
                depth, "weighted_blowup_y", d=d, l=l, v=j,
                extras=[str(r) for r in extras],
            )
            for lam in self.opt.palette.signed(extras):
                if lam == NEG_INF:
                    continue
                t = BlowUpYY(n, j, lam)
                child = node.add_child(t)
                self.process(child, t.pullback(f), depth + 1)

    def _joint_coefficient_step(self, node, f, g, beta, d, coeffs, depth):
        """Monomialise the lower Y_n-coefficients jointly (identity on y_n),
        raised to powers that align their critical ratios, then resume."""
        m, n = f.sig
        lcm_i = math.lcm(*coeffs.keys())
        sub_sig = Signature(m, n - 1)
        dropped = {i: set_y_to_zero(coeffs[i], n) for i in sorted(coeffs)}
        forms = {i: normal_form(c) for i, c in dropped.items()}
        family = []
        if all(nf is not None for nf in forms.values()):
            # every coefficient is already a monomial times a unit; align the
            # critical ratios by separating the lcm-powered monomials (single
            # terms, so the joint system stays tiny whatever the lcm is)
            for i, nf in forms.items():
                k = lcm_i // i
                xs = [v * k for v in nf.monomial[0]]
                ys = [v * k for v in nf.monomial[1]]
                # powered degrees overshoot the working precision; keep each
                # plan monomial alive by granting it a window past its degree
                prec = sum(xs) + sum(ys) + f.precision
                family.append(monomial_series(sub_sig, xs, ys, prec))
        else:
            # separate the coefficients themselves first; the embedded leaves
            # re-derive the state and come back here for the alignment pass
            family.extend(dropped.values())
        beta_sub = (beta[0], beta[1][:-1])
        if any(v != 0 for v in beta_sub[0]) or any(v != 0 for v in beta_sub[1]):
            family.append(
                monomial_series(sub_sig, beta_sub[0], beta_sub[1], f.precision)
            )
        prod = _chain_product(family)
        prod = prod.truncate((prod.order() or 0) + f.precision)
        self.log(depth, "joint_coefficients", d=d, count=len(family))
        sub_engine = _Engine(self.opt)
        sub_engine.audit = self.audit  # share the audit log
        sub_engine.princ_used = self.princ_used
        sub_engine.steps_used = self.steps_used
        subtree = AdmissibleTree(sub_sig)
        sub_engine.process(subtree.root, prod, depth + 1)
        self.princ_used = sub_engine.princ_used
        self.steps_used = sub_engine.steps_used
        self._embed_subtree(node, f, subtree.root, sub_sig, depth)

    def _embed_subtree(self, node, f, sub_node, sub_sig, depth):
        if sub_node.is_leaf():
            self.process(node, f, depth)
            return
        for child in sub_node.children:
            t = _embed_transform(child.transform, sub_sig)
            base, fb, extra = node, f, 0
            try:
                fc = t.pullback(fb)
            except NeedsRamification:
                # the subtree was planned on the y_n-free coefficient product,
                # whose exponent denominators may be coarser than f's; clear
                # f's denominators for the chart variable and retry
                i = t.i
                dens = [
                    e[0][i - 1].denominator for e in fb.terms if e[0][i - 1] != 0
                ]
                r = RamifyX(i, Fraction(math.lcm(*dens)))
                base = node.add_child(r)
                fb = r.pullback(fb)
                fc = t.pullback(fb)
                extra = 1
            mchild = base.add_child(t)
            self._embed_subtree(
                mchild,
                fc,
                child,
                child.transform.result_sig(sub_sig),
                depth + 1 + extra,
            )


def _mu_leq(a, b) -> bool:
    return all(x <= y for x, y in zip(a[0], b[0])) and all(
        x <= y for x, y in zip(a[1], b[1])
    )


def _embed_transform(t: ElementaryTransform, sub_sig: Signature) -> ElementaryTransform:
    """Lift a transform over (m, n-1) to (m, n) acting as the identity on the
    last y-variable.  Indices agree because that variable stays last; only
    translations need their target index pinned and their center re-embedded."""
    if isinstance(t, Tschirnhausen):
        from .series import insert_y

        j = t._index(sub_sig)
        return Tschirnhausen(insert_y(t.h, t.h.sig.n + 1), j)
    return t


def _chain_product(family: Sequence[Series]) -> Series:
    """Product of the family members and their pairwise differences (zero
    differences skipped); monomialising it monomialises every member and
    orders their monomials by division."""
    parts = [s for s in family if not s.is_zero()]
    if not parts:
        raise EngineError("empty joint family")
    prod = parts[0]
    for s in parts[1:]:
        prod = prod * s
    for a in range(len(parts)):
        for b in range(a + 1, len(parts)):
            diff = parts[a] - parts[b]
            if not diff.is_zero():
                prod = prod * diff
    return prod


# -- public entry points ------------------------------------------------------


@dataclass
class LeafResult:
    chain: list
    sig: Signature
    kind: str
    monomial: Optional[Exponent]
    unit: Optional[Series]
    precision: Fraction


@dataclass
class MonomialisationReport:
    input: Series
    tree: AdmissibleTree
    audit: list

    def leaf_results(self) -> list[LeafResult]:
        out = []
        for chain, leaf in self.tree.branches():
            payload = leaf.payload
            sig = self.tree.leaf_sig(chain)
            pulled = pullback_chain(chain, self.input)
            nf = normal_form(pulled)
            out.append(
                LeafResult(
                    chain=chain,
                    sig=sig,
                    kind=payload.get("kind", "unknown"),
                    monomial=nf.monomial if nf else None,
                    unit=nf.unit if nf else None,
                    precision=pulled.precision,
                )
            )
        return out

    def to_json(self) -> dict:
        leaves = []
        for chain, leaf in self.tree.branches():
            leaves.append(
                {
                    "chain": chain_to_json(chain),
                    "sig": list(self.tree.leaf_sig(chain)),
                    **leaf.payload,
                }
            )
        return {
            "input": render(self.input),
            "sig": list(self.input.sig),
            "precision": str(self.input.precision),
            "tree": tree_to_json(self.tree),
            "leaves": leaves,
            "audit": self.audit,
            "stats": {
                "leaf_count": len(leaves),
                "height": self.tree.height(),
            },
        }


def _run_deep(fn):
    """Run fn on a worker thread with a large stack.

    Each engine step burns several Python frames, and nested coefficient
    subtrees multiply the depth; the default interpreter limit and the main
    thread's C stack are both too small for the deepest legal trees."""
    result: list = []
    error: list = []

    def runner():
        if sys.getrecursionlimit() < 40000:
            sys.setrecursionlimit(40000)
        try:
            result.append(fn())
        except BaseException as exc:  # re-raised on the calling thread
            error.append(exc)

    old = threading.stack_size(512 * 1024 * 1024)
    try:
        worker = threading.Thread(target=runner)
        worker.start()
    finally:
        threading.stack_size(old)
    worker.join()
    if error:
        raise error[0]
    return result[0]


def monomialize(f: Series, options: EngineOptions = EngineOptions()) -> MonomialisationReport:
    """Monomialisation tree for a single series."""
    engine = _Engine(options)
    tree = _run_deep(lambda: engine.run(f))
    return MonomialisationReport(f, tree, engine.audit)


@dataclass
class DivisionChainResult:
    inputs: list
    report: MonomialisationReport
    leaves: list  # per leaf: {"chain", "sig", "factors": [...]} in branch order


def division_chain(
    inputs: Sequence[Series], options: EngineOptions = EngineOptions()
) -> DivisionChainResult:
    """Monomialise several series at once so that, on every branch, each
    input becomes normal and their monomials are totally ordered by division."""
    if not inputs:
        raise EngineError("no inputs")
    sig = inputs[0].sig
    for s in inputs:
        if s.sig != sig:
            raise EngineError("inputs must share a signature")
    live = [s for s in inputs if not s.is_zero()]
    if not live:
        raise EngineError("all inputs vanish to the given precision")
    targets = list(live)
    for a in range(len(live)):
        for b in range(a + 1, len(live)):
            diff = live[a] - live[b]
            if not diff.is_zero():
                targets.append(diff)
    prod = _chain_product(live)
    engine = _Engine(options)
    tree = _run_deep(lambda: engine.run(prod))
    # The product being normal modulo the truncation does not force each
    # factor to be normal there; keep refining any branch where an input or a
    # pairwise difference is still unresolved.
    changed = True
    while changed:
        changed = False
        for chain, leaf in list(tree.branches()):
            pulled = [pullback_chain(chain, t) for t in targets]
            live_p = [p for p in pulled if not p.is_zero()]
            if all(normal_form(p) is not None for p in live_p):
                continue
            # re-multiplying the pulled factors recovers the precision that a
            # single pullback of the pre-multiplied product loses
            p_leaf = live_p[0]
            for q in live_p[1:]:
                p_leaf = p_leaf * q
            leaf.payload = {}
            _run_deep(lambda: engine.process(leaf, p_leaf, len(chain)))
            changed = True
            break
    report = MonomialisationReport(prod, tree, engine.audit)
    leaves = []
    for chain, leaf in report.tree.branches():
        factors = []
        for s in inputs:
            if s.is_zero():
                factors.append({"kind": "zero"})
                continue
            pulled = pullback_chain(chain, s)
            if pulled.is_zero():
                factors.append({"kind": "zero"})
                continue
            nf = normal_form(pulled)
            if nf is None:
                raise EngineError(
                    "factor failed to become normal on a branch "
                    f"(input {render(s)})"
                )
            factors.append(
                {
                    "kind": "normal",
                    "monomial": _monomial_json(nf.monomial),
                    "unit": render(nf.unit),
                    "precision": str(nf.unit.precision),
                }
            )
        exps = [
            (
                tuple(Fraction(v) for v in nf["monomial"]["x"]),
                tuple(nf["monomial"]["y"]),
            )
            for nf in factors
            if nf["kind"] == "normal"
        ]
        for a in range(len(exps)):
            for b in range(a + 1, len(exps)):
                if not _leq(exps[a], exps[b]) and not _leq(exps[b], exps[a]):
                    raise EngineError("leaf monomials are not ordered by division")
        leaves.append(
            {
                "chain": chain_to_json(chain),
                "sig": list(report.tree.leaf_sig(chain)),
                "factors": factors,
            }
        )
    return DivisionChainResult(list(inputs), report, leaves)
