import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from onestreet.deals import marginals, p1_polar_deal, uniform_deal
from onestreet.errors import DimensionError, InvalidDistribution, InvalidStrategy, RepresentationError
from onestreet.metrics import (
    emd_1d,
    feature_distance,
    input_distance,
    output_distance,
    pairwise_feature_distance,
)
from onestreet.representations import Representation


def transport_cost(p, q):
    """Optimal transport between histograms on 0..n-1 with cost |i - j| / (n - 1), by LP."""
    n = len(p)
    cost = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) / (n - 1)
    rows = np.kron(np.eye(n), np.ones(n))
    cols = np.kron(np.ones(n), np.eye(n))
    res = linprog(cost.ravel(), A_eq=np.vstack([rows, cols]), b_eq=np.r_[p, q], bounds=(0, None),
                  method="highs", options={"primal_feasibility_tolerance": 1e-10,
                                           "dual_feasibility_tolerance": 1e-10})
    return res.fun


def random_pdf(rng, n):
    x = rng.random(n) * (rng.random(n) < 0.8)
    if x.sum() == 0:
        x[0] = 1
    return x / x.sum()


def test_emd_matches_transport_lp(rng):
    for _ in range(200):
        n = int(rng.integers(2, 7))
        p, q = random_pdf(rng, n), random_pdf(rng, n)
        assert emd_1d(p, q) == pytest.approx(transport_cost(p, q), abs=1e-9)


def test_emd_hand_values():
    assert emd_1d([1, 0, 0], [0, 0, 1]) == 1.0
    assert emd_1d([1, 0, 0], [0, 1, 0]) == 0.5
    assert emd_1d([0.5, 0.5], [0.5, 0.5]) == 0.0


def test_emd_rejects_bad_shapes():
    with pytest.raises(DimensionError):
        emd_1d([1, 0], [1, 0, 0])
    with pytest.raises(DimensionError):
        emd_1d([1], [1])


pdfs = st.integers(2, 8).flatmap(
    lambda n: st.tuples(*[st.lists(st.floats(0, 1), min_size=n, max_size=n).filter(lambda v: sum(v) > 1e-3)] * 3)
)


@settings(max_examples=200)
@given(pdfs)
def test_emd_metric_axioms(triple):
    p, q, r = (np.array(v) / sum(v) for v in triple)
    assert emd_1d(p, p) == 0.0
    assert emd_1d(p, q) == pytest.approx(emd_1d(q, p), abs=1e-12)
    assert emd_1d(p, r) <= emd_1d(p, q) + emd_1d(q, r) + 1e-12
    assert 0.0 <= emd_1d(p, q) <= 1.0 + 1e-12


def test_input_distance_uniform_vs_p1_polar():
    # P1: uniform cdf vs point masses on 1 and 10 gives 2.0 / 9; P2: uniform vs card 5 gives 2.5 / 9
    a = marginals(uniform_deal()).cdf
    b = marginals(p1_polar_deal()).cdf
    assert input_distance(a, b) == pytest.approx(0.25, abs=1e-12)


def test_input_distance_checks_cdfs():
    a = marginals(uniform_deal()).cdf
    bad = a.copy()
    bad[9] = 0.9
    with pytest.raises(InvalidDistribution):
        input_distance(a, bad)
    with pytest.raises(DimensionError):
        input_distance(a[:10], a[:10])


def test_output_distance_point_mass_moved_end_to_end():
    y = np.zeros((10, 31))
    y[:, 0] = 1
    y_hat = y.copy()
    y_hat[3] = 0
    y_hat[3, 30] = 1
    # one of ten hands moves its whole mass the full width
    assert output_distance(y, y_hat) == pytest.approx(0.1, abs=1e-12)


def test_output_distance_requires_distributions():
    y = np.zeros((10, 31))
    y[:, 0] = 1
    with pytest.raises(InvalidStrategy):
        output_distance(y, y * 0.5)


def test_feature_distance_card_term():
    x = marginals(uniform_deal()).cdf
    f = np.append(x, 1.0)
    g = np.append(x, 10.0)
    assert feature_distance(f, g, Representation.R3) == pytest.approx(1 / 3)
    assert feature_distance(f[:20], f[:20], "r1") == 0.0
    with pytest.raises(RepresentationError):
        feature_distance(f, g, "r1")


def test_pdf_features_measured_through_cdfs():
    m1, m2 = marginals(uniform_deal()), marginals(p1_polar_deal())
    assert feature_distance(m1.pdf, m2.pdf, "r2") == pytest.approx(feature_distance(m1.cdf, m2.cdf, "r1"))


@pytest.mark.parametrize("rep", list(Representation))
def test_pairwise_matches_scalar_distance(rep, small_dataset):
    from onestreet.dataset import build_examples

    ex = build_examples(small_dataset.records[:6], rep)
    full = pairwise_feature_distance(ex.X, ex.X, rep)
    for i in range(0, len(ex.X), 7):
        for j in range(0, len(ex.X), 5):
            assert full[i, j] == pytest.approx(feature_distance(ex.X[i], ex.X[j], rep), abs=1e-12)
