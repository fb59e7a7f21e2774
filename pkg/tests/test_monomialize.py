"""Monomialisation engine: corpus walkthroughs, normal forms, division chains."""

from fractions import Fraction
import random

import pytest

from gpseries.series import Signature, Series, _leq
from gpseries.transforms import pullback_chain
from gpseries.monomialize import (
    CapExceeded,
    DivisionChainResult,
    EngineError,
    EngineOptions,
    critical_lambdas,
    division_chain,
    monomialize,
    normal_form,
    rational_roots,
)
from conftest import ps, random_series

SIG11 = Signature(1, 1)


# -- helpers --------------------------------------------------------------------


def test_normal_form_detects_monomial_times_unit():
    nf = normal_form(ps("x1^2 + x1^2*y1", 1, 1))
    assert nf is not None
    assert nf.monomial == ((Fraction(2),), (0,))
    assert nf.unit.is_unit()


def test_normal_form_rejects_non_normal():
    assert normal_form(ps("y1^2 - x1^2", 1, 1)) is None
    assert normal_form(ps("x1 + x2", 2, 0)) is None


def test_normal_form_allows_y_monomials():
    nf = normal_form(ps("x1*y1^2 + x1^2*y1^2", 1, 1))
    assert nf is not None
    assert nf.monomial == ((Fraction(1),), (2,))


def test_rational_roots():
    # t^2 - 3t + 2 = (t-1)(t-2)
    assert rational_roots([2, -3, 1]) == [1, 2]
    # 2t^2 - t = t(2t - 1): zero roots are not reported
    assert rational_roots([0, -1, 2]) == [Fraction(1, 2)]
    assert rational_roots([1]) == []
    assert rational_roots([1, 0, 1]) == []


def test_critical_lambdas_catches_diagonal_roots():
    g = ps("y1^2 - x1^2", 1, 1)
    assert critical_lambdas(g, ("y", 1), ("x", 1)) == [-1, 1]
    g2 = ps("y1^2 - 4*x1^2", 1, 1)
    assert 2 in critical_lambdas(g2, ("y", 1), ("x", 1))


# -- single-series engine -----------------------------------------------------------

CORPUS = [
    ("y1^2 - x1^2", 1, 1, 9, 1),
    ("y1^2 - x1^3", 1, 1, 9, 2),
    ("y1^2 - x1^2*y1 - x1^3", 1, 1, 9, 4),
    ("x1^(1/2) + x1^(2/3)*y1", 1, 1, 1, 0),
    ("x1^2*x2 + x1*x2^3", 2, 0, 9, 2),
    ("(1 + y1)*x1^(5/2)", 1, 1, 1, 0),
]


def assert_all_leaves_normal(report):
    for leaf in report.leaf_results():
        if leaf.kind == "zero":
            continue
        assert leaf.monomial is not None, (leaf.chain, leaf.kind)
        assert leaf.unit.is_unit()
        assert leaf.precision > 0


@pytest.mark.parametrize("text,m,n,leaves,height", CORPUS)
def test_corpus_walkthroughs(text, m, n, leaves, height):
    report = monomialize(ps(text, m, n))
    assert_all_leaves_normal(report)
    assert len(report.leaf_results()) == leaves
    assert report.tree.height() == height


def test_already_normal_input_gets_height_zero_tree():
    report = monomialize(ps("x1^(1/2)*y1^2 + x1*y1^2", 1, 1))
    assert report.tree.height() == 0
    (leaf,) = report.leaf_results()
    assert leaf.monomial == ((Fraction(1, 2),), (2,))


def test_report_leaves_use_exact_pullbacks():
    report = monomialize(ps("y1^2 - x1^2", 1, 1))
    for leaf in report.leaf_results():
        pulled = pullback_chain(leaf.chain, report.input)
        if pulled.is_zero():
            continue
        nf = normal_form(pulled)
        assert nf is not None
        assert nf.monomial == leaf.monomial


def test_named_hard_cases():
    for text, m, n in [
        ("y1^3 - 3*x1*y1 - x1^2", 1, 1),
        ("y1^4 - x1^3", 1, 1),
        ("(y1^2 - x1^2)*(y1^2 - 4*x1^2)", 1, 1),
        ("y1^2 - x1^2*y2^2", 1, 2),
        ("y1*y2 - x1^2", 1, 2),
    ]:
        report = monomialize(ps(text, m, n))
        assert_all_leaves_normal(report)


def test_random_sparse_inputs():
    rng = random.Random(12345)
    done = 0
    while done < 10:
        f = random_series(rng, SIG11, nterms=3, max_den=2)
        if f.is_zero():
            continue
        report = monomialize(f)
        assert_all_leaves_normal(report)
        done += 1


def test_depth_cap_raises():
    with pytest.raises(CapExceeded):
        monomialize(ps("y1^2 - x1^3", 1, 1), EngineOptions(max_depth=0))


def test_audit_records_steps():
    report = monomialize(ps("y1^2 - x1^3", 1, 1))
    assert report.audit
    assert all("action" in e and "depth" in e for e in report.audit)


def test_report_json_shape():
    report = monomialize(ps("y1^2 - x1^2", 1, 1))
    data = report.to_json()
    assert data["stats"]["leaf_count"] == 9
    assert len(data["leaves"]) == 9
    assert all("chain" in leaf and "sig" in leaf for leaf in data["leaves"])


# -- division chains -----------------------------------------------------------------


def test_division_chain_factors_normal_and_comparable():
    inputs = [
        ps("y1^2 - x1^2", 1, 1),
        ps("x1", 1, 1),
        ps("y1", 1, 1),
    ]
    res = division_chain(inputs)
    assert isinstance(res, DivisionChainResult)
    for entry in res.leaves:
        monomials = []
        for fac in entry["factors"]:
            if fac["kind"] == "zero":
                continue
            assert fac["kind"] == "normal"
            monomials.append(fac["monomial"])
        # the leaf factors divide one another in some order
        exps = [_exp_from_json(mj) for mj in monomials]
        for i in range(len(exps)):
            for j in range(i + 1, len(exps)):
                assert _leq(exps[i], exps[j]) or _leq(exps[j], exps[i])


def _exp_from_json(mj):
    return (
        tuple(Fraction(v) for v in mj["x"]),
        tuple(int(v) for v in mj["y"]),
    )


def test_division_chain_single_input_equals_monomialize():
    res = division_chain([ps("y1^2 - x1^3", 1, 1)])
    for entry in res.leaves:
        (fac,) = entry["factors"]
        assert fac["kind"] in ("normal", "zero")


def test_division_chain_rejects_empty_and_mismatched():
    with pytest.raises(EngineError):
        division_chain([])
    with pytest.raises(EngineError):
        division_chain([ps("x1", 1, 1), ps("x1", 1, 0)])
