"""Transformation trees, chart-parameter palettes, JSON round trips."""

from fractions import Fraction

import pytest

from gpseries.series import Signature
from gpseries.trees import (
    DEFAULT_PALETTE,
    AdmissibleTree,
    LambdaPalette,
    TreeNode,
    palette_from_spec,
    point_in_domain,
    sample_points,
    tree_from_json,
    tree_to_json,
)
from gpseries.transforms import INF, NEG_INF, BlowUpYX, Tschirnhausen
from gpseries.monomialize import monomialize
from conftest import ps

SIG11 = Signature(1, 1)


def test_default_palette():
    assert DEFAULT_PALETTE.positive == (Fraction(1, 2), Fraction(1), Fraction(2))


def test_nonneg_palette_brackets_with_zero_and_infinity():
    lams = DEFAULT_PALETTE.nonneg()
    assert lams[0] == 0
    assert lams[-1] == INF
    assert Fraction(1) in lams


def test_signed_palette_contains_mirrored_values():
    lams = DEFAULT_PALETTE.signed()
    assert Fraction(-2) in lams and Fraction(2) in lams
    assert INF in lams and NEG_INF in lams
    assert lams[0] == 0


def test_palette_extra_values_deduplicated():
    lams = DEFAULT_PALETTE.nonneg(extra=[Fraction(1), Fraction(5)])
    assert lams.count(Fraction(1)) == 1
    assert Fraction(5) in lams


def test_palette_from_spec():
    p = palette_from_spec("1/3,2")
    assert p.positive == (Fraction(1, 3), Fraction(2))
    with pytest.raises(ValueError):
        palette_from_spec("0,1")
    with pytest.raises(ValueError):
        palette_from_spec("abc")


def test_manual_tree_branches():
    root = TreeNode(None, [], {})
    a = root.add_child(BlowUpYX(1, 1, 0))
    b = root.add_child(BlowUpYX(1, 1, INF))
    a.payload["kind"] = "left"
    tree = AdmissibleTree(SIG11, root)
    branches = list(tree.branches())
    assert len(branches) == 2
    chains = [tuple(c) for c, _ in branches]
    assert (BlowUpYX(1, 1, 0),) in chains
    assert tree.height() == 1
    assert tree.leaf_sig([BlowUpYX(1, 1, INF)]) == Signature(2, 0)


def test_zero_height_tree():
    tree = AdmissibleTree(SIG11, TreeNode(None, [], {"kind": "normal"}))
    assert tree.height() == 0
    assert len(tree.leaves()) == 1
    ((chain, leaf),) = tree.branches()
    assert chain == []


def test_tree_json_roundtrip_on_real_tree():
    report = monomialize(ps("y1^2 - x1^2", 1, 1))
    data = tree_to_json(report.tree)
    back = tree_from_json(data)
    assert tree_to_json(back) == data
    assert back.sig == report.tree.sig
    assert back.height() == report.tree.height()


def test_sample_points_deterministic():
    a = sample_points(SIG11, 10, seed=3, radius=0.1)
    b = sample_points(SIG11, 10, seed=3, radius=0.1)
    c = sample_points(SIG11, 10, seed=4, radius=0.1)
    assert a == b
    assert a != c
    assert all(point_in_domain(p, SIG11) for p in a)
    assert all(p[0] >= 0 for p in a)  # x-coordinates stay nonnegative
