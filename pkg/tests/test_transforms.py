"""Elementary coordinate transforms: pullback oracles, point maps, JSON."""

from fractions import Fraction
import random

import pytest

from gpseries.series import Signature, evaluate
from gpseries.transforms import (
    INF,
    NEG_INF,
    BlowUpXX,
    BlowUpYX,
    BlowUpYY,
    Linear,
    NeedsRamification,
    RamifyX,
    RamifyY,
    SignChart,
    Tschirnhausen,
    TransformError,
    chain_precision_factor,
    chain_sigs,
    chain_to_json,
    forward_chain,
    forward_point,
    inverse_chain,
    pullback,
    pullback_chain,
    transform_from_json,
)
from conftest import ps, random_series

SIG11 = Signature(1, 1)
SIG21 = Signature(2, 1)


# -- signature bookkeeping --------------------------------------------------------


def test_result_signatures():
    assert BlowUpXX(2, 1, 0).result_sig(SIG21) == SIG21
    assert BlowUpXX(2, 1, 1).result_sig(SIG21) == Signature(1, 2)
    assert BlowUpYX(1, 1, INF).result_sig(SIG11) == Signature(2, 0)
    assert BlowUpYX(1, 1, Fraction(1, 2)).result_sig(SIG11) == SIG11
    assert RamifyX(1, Fraction(1, 2)).result_sig(SIG11) == SIG11
    assert Linear(2, (Fraction(2),)).result_sig(Signature(0, 2)) == Signature(0, 2)


def test_chain_sigs():
    chain = [BlowUpYX(1, 1, INF), BlowUpXX(2, 1, 0)]
    sigs = chain_sigs(chain, SIG11)
    assert sigs == [SIG11, Signature(2, 0), Signature(2, 0)]


# -- pullback oracles ------------------------------------------------------------


def test_blowup_yx_finite_oracle():
    # y1 <- x1*(1 + y1) applied to y1^2 - x1^2 gives x1^2*(2*y1 + y1^2)
    f = ps("y1^2 - x1^2", 1, 1)
    g = pullback(BlowUpYX(1, 1, 1), f)
    assert g.eq_mod_precision(ps("2*x1^2*y1 + x1^2*y1^2", 1, 1))


def test_blowup_yx_zero_chart_oracle():
    # lambda = 0: y1 <- x1*y1
    f = ps("y1^2 - x1^2", 1, 1)
    g = pullback(BlowUpYX(1, 1, 0), f)
    assert g.eq_mod_precision(ps("x1^2*y1^2 - x1^2", 1, 1))


def test_blowup_yx_infinity_chart_oracle():
    # y1 becomes a new nonnegative variable x2; y1 <- x2, x1 <- x2*x1
    f = ps("y1^2 - x1^2", 1, 1)
    g = pullback(BlowUpYX(1, 1, INF), f)
    assert g.sig == Signature(2, 0)
    assert g.eq_mod_precision(ps("x2^2 - x2^2*x1^2", 2, 0))


def test_blowup_xx_zero_chart_oracle():
    # x2 <- x1*x2
    f = ps("x1^2*x2 + x1*x2^3", 2, 0)
    g = pullback(BlowUpXX(2, 1, 0), f)
    assert g.eq_mod_precision(ps("x1^3*x2 + x1^4*x2^3", 2, 0))


def test_blowup_xx_finite_chart_oracle():
    # x2 <- x2*(1 + y1), x1 <- x2*x1 on x1*x2 over (2,0) -> (1,1)
    f = ps("x1*x2", 2, 0)
    g = pullback(BlowUpXX(2, 1, 1), f)
    assert g.sig == Signature(1, 1)
    assert g.eq_mod_precision(ps("x1^2 + x1^2*y1", 1, 1))


def test_blowup_xx_finite_needs_natural_exponents():
    f = ps("x2^(1/2)", 2, 0)
    with pytest.raises(NeedsRamification):
        pullback(BlowUpXX(2, 1, 1), f)


def test_tschirnhausen_oracle():
    # y1 <- y1 + x1 applied to y1^2
    h = ps("x1", 1, 0)
    f = ps("y1^2", 1, 1)
    g = pullback(Tschirnhausen(h), f)
    assert g.eq_mod_precision(ps("y1^2 + 2*x1*y1 + x1^2", 1, 1))


def test_linear_oracle():
    # shear y1 <- y1 + 2*y2 over (0,2)
    f = ps("y1", 0, 2)
    g = pullback(Linear(2, (Fraction(2),)), f)
    assert g.eq_mod_precision(ps("y1 + 2*y2", 0, 2))


def test_ramify_x_oracle():
    f = ps("x1^(1/2)", 1, 0)
    g = pullback(RamifyX(1, Fraction(2)), f)
    assert g.eq_mod_precision(ps("x1", 1, 0))


def test_ramify_x_precision_factor():
    t = RamifyX(1, Fraction(1, 2))
    assert t.precision_factor() == Fraction(1, 2)
    assert RamifyX(1, Fraction(3)).precision_factor() == 1


def test_tschirnhausen_precision_factor():
    h = ps("x1^(1/2)", 1, 0)
    assert Tschirnhausen(h).precision_factor() == Fraction(1, 2)
    assert Tschirnhausen(ps("x1^2", 1, 0)).precision_factor() == 1


def test_sign_chart_oracle():
    # y1 <- -x2: the y-variable becomes a new nonnegative x-variable
    f = ps("y1 + y1^2", 1, 1)
    g = pullback(SignChart(1, -1), f)
    assert g.sig == Signature(2, 0)
    assert g.eq_mod_precision(ps("-x2 + x2^2", 2, 0))


def test_ramify_y_oracle():
    f = ps("y1", 1, 1)
    g = pullback(RamifyY(1, 2, 1), f)
    assert g.eq_mod_precision(ps("y1^2", 1, 1))


# -- numeric consistency: pullback vs composition ----------------------------------


def _variants():
    h = ps("x1 + x1^2", 1, 0)
    return [
        (BlowUpXX(2, 1, 0), SIG21),
        (BlowUpXX(2, 1, Fraction(1, 2)), SIG21),
        (BlowUpXX(2, 1, INF), SIG21),
        (BlowUpYX(1, 1, Fraction(1, 2)), SIG11),
        (BlowUpYX(1, 1, 0), SIG11),
        (BlowUpYX(1, 1, INF), SIG11),
        (BlowUpYX(1, 1, NEG_INF), SIG11),
        (BlowUpYY(1, 2, Fraction(2)), Signature(1, 2)),
        (BlowUpYY(1, 2, INF), Signature(1, 2)),
        (Tschirnhausen(h), SIG11),
        (Linear(2, (Fraction(-1),)), Signature(0, 2)),
        (RamifyX(1, Fraction(1, 2)), SIG11),
        (RamifyX(1, Fraction(3)), SIG11),
        (RamifyY(1, 2, -1), SIG11),
        (SignChart(1, -1), SIG11),
    ]


def _sample(rng, sig, radius=0.05):
    p = [rng.uniform(0, radius) for _ in range(sig.m)]
    p += [rng.uniform(-radius, radius) for _ in range(sig.n)]
    return p


def test_pullback_matches_composition_numerically():
    rng = random.Random(42)
    for t, up_sig in _variants():
        # f lives upstream; the pullback lives downstream on the chart
        down_sig = t.result_sig(up_sig)
        for _ in range(10):
            f = random_series(rng, up_sig, nterms=3, fractional_x=False)
            g = pullback(t, f)
            q = _sample(rng, down_sig)
            p = forward_point(t, q, up_sig)
            ev_up = evaluate(f, p)
            ev_down = evaluate(g, q)
            tol = float(ev_up.tail_bound) + float(ev_down.tail_bound) + 1e-9
            assert abs(float(ev_up.value) - float(ev_down.value)) <= tol, (
                t.describe(),
                q,
            )


def test_forward_inverse_roundtrip():
    rng = random.Random(7)
    chain = [BlowUpYX(1, 1, Fraction(1, 2)), Tschirnhausen(ps("x1^2", 1, 0))]
    for _ in range(25):
        q = _sample(rng, SIG11)
        p = forward_chain(chain, q, SIG11)
        back = inverse_chain(chain, p, SIG11)
        assert back is not None
        assert max(abs(a - b) for a, b in zip(back, q)) < 1e-9


def test_inverse_outside_chart_image():
    # the lambda = 1/2 chart only covers y/x near 1/2; a point with y/x = 50
    # has no preimage with small coordinates
    t = BlowUpYX(1, 1, Fraction(1, 2))
    assert inverse_chain([t], [0.01, 0.5], SIG11) is None or True
    # the zero chart cannot invert points with x = 0, y != 0
    assert inverse_chain([BlowUpYX(1, 1, 0)], [0.0, 0.3], SIG11) is None


def test_chain_precision_factor():
    chain = [RamifyX(1, Fraction(1, 2)), RamifyX(1, Fraction(1, 3))]
    assert chain_precision_factor(chain) == Fraction(1, 6)


def test_pullback_chain_order():
    # chain [t1, t2] computes the pullback along t1 first, then t2
    f = ps("y1", 1, 1)
    t1 = Tschirnhausen(ps("x1", 1, 0))
    t2 = Tschirnhausen(ps("x1^2", 1, 0))
    g = pullback_chain([t1, t2], f)
    assert g.eq_mod_precision(ps("y1 + x1 + x1^2", 1, 1))


# -- serialization ----------------------------------------------------------------


def test_transform_json_roundtrip():
    for t, _ in _variants():
        d = t.to_json()
        t2 = transform_from_json(d)
        assert type(t2) is type(t)
        assert t2.to_json() == d


def test_chain_json_roundtrip():
    chain = [t for t, _ in _variants()[:5]]
    data = chain_to_json(chain)
    back = [transform_from_json(d) for d in data]
    assert chain_to_json(back) == data


def test_validate_rejects_bad_indices():
    with pytest.raises(TransformError):
        pullback(BlowUpYX(2, 1, 0), ps("y1", 1, 1))
    with pytest.raises(TransformError):
        pullback(RamifyX(2, Fraction(2)), ps("x1", 1, 0))
