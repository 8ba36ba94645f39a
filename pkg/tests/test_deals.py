import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onestreet.deals import (
    cdf_to_pdf,
    game_seed,
    make_joint,
    make_rng,
    marginals,
    p1_polar_deal,
    p2_polar_deal,
    pdf_to_cdf,
    point_mass,
    random_deal,
    sample_simplex,
    uniform_deal,
)
from onestreet.errors import DegenerateDeal, DimensionError, InvalidDistribution


class ZeroThenUniform:
    """Stub generator whose first draw contains an exact zero."""

    def __init__(self):
        self.calls = 0
        self.inner = np.random.default_rng(0)

    def random(self, size):
        self.calls += 1
        u = self.inner.random(size)
        if self.calls == 1:
            u[0] = 0.0
        return u


def test_simplex_means_and_support(rng):
    draws = np.array([sample_simplex(10, rng) for _ in range(20_000)])
    assert np.allclose(draws.sum(axis=1), 1.0)
    assert (draws >= 0).all()
    assert np.abs(draws.mean(axis=0) - 0.1).max() < 0.006
    # uniform on the simplex: each coordinate is Beta(1, 9) with variance 9 / 1100
    assert draws[:, 0].var() == pytest.approx(9 / 1100, rel=0.05)


def test_simplex_redraws_zero():
    stub = ZeroThenUniform()
    x = sample_simplex(5, stub)
    assert np.isfinite(x).all() and stub.calls == 2


@settings(max_examples=100)
@given(seed=st.integers(0, 2**32 - 1))
def test_make_joint_properties(seed):
    r = np.random.default_rng(seed)
    x1, x2 = sample_simplex(10, r), sample_simplex(10, r)
    p = make_joint(x1, x2)
    assert np.all(np.diag(p) == 0)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    i, j, k, l = r.integers(0, 10, size=4)
    if i != j and k != l:
        assert p[i, j] * x1[k] * x2[l] == pytest.approx(p[k, l] * x1[i] * x2[j], abs=1e-12)


def test_make_joint_errors():
    with pytest.raises(DegenerateDeal):
        make_joint(point_mass(3), point_mass(3))
    with pytest.raises(DimensionError):
        make_joint(np.ones(3) / 3, np.ones(4) / 4)
    with pytest.raises(InvalidDistribution):
        make_joint(np.ones(10), np.ones(10) / 10)


def test_test_games():
    u = uniform_deal()
    assert u[0, 1] == pytest.approx(1 / 90)
    p = p1_polar_deal()
    assert p[0, 4] == 0.5 and p[9, 4] == 0.5
    q = p2_polar_deal()
    assert q[4, 0] == 0.5 and q[4, 9] == 0.5


def test_marginals():
    m = marginals(p1_polar_deal())
    assert m.cdf1[0] == 0.5 and m.cdf1[-1] == 1.0
    assert np.allclose(m.pdf2, point_mass(5))
    assert m.cdf.shape == (20,) and m.pdf.shape == (20,)
    assert np.allclose(pdf_to_cdf(m.pdf1), m.cdf1)
    assert np.allclose(cdf_to_pdf(m.cdf1), m.pdf1)


def test_marginals_of_joint_are_not_the_inputs():
    # excluding the diagonal reweights the marginals
    x = np.array([0.7, 0.2, 0.1])
    p = make_joint(x, x)
    assert not np.allclose(p.sum(axis=1), x)


def test_seeds_are_deterministic_and_distinct():
    assert game_seed(5, 7) == game_seed(5, 7)
    assert len({game_seed(5, i) for i in range(1000)}) == 1000
    a, _ = random_deal(make_rng(game_seed(5, 7)))
    b, _ = random_deal(make_rng(game_seed(5, 7)))
    assert np.array_equal(a, b)
    assert make_rng(1, 2).random() == make_rng(1, 2).random()
