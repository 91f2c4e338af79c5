import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import T_TABLE
from vsc.errors import ParameterError
from vsc.stats import betainc, paired_t_test, t_cdf, t_two_tailed_p


@pytest.mark.parametrize("dof,t,p", T_TABLE)
def test_two_tailed_p_table(dof, t, p):
    assert abs(t_two_tailed_p(t, dof) - p) <= 1e-10


def test_betainc_closed_forms():
    # I_x(1, 1) = x and I_x(a, 1) = x**a
    for x in (0.0, 0.1, 0.5, 0.93, 1.0):
        assert betainc(1.0, 1.0, x) == pytest.approx(x, abs=1e-14)
        assert betainc(3.5, 1.0, x) == pytest.approx(x**3.5, abs=1e-13)


def test_betainc_symmetry():
    for a, b, x in [(2.0, 5.0, 0.3), (0.5, 4.5, 0.8), (10.0, 0.5, 0.95)]:
        assert betainc(a, b, x) + betainc(b, a, 1 - x) == pytest.approx(1.0, abs=1e-13)


def test_t_cdf_is_a_cdf():
    assert t_cdf(0.0, 7) == pytest.approx(0.5)
    assert t_cdf(2.0, 9) + t_cdf(-2.0, 9) == pytest.approx(1.0, abs=1e-14)


def test_identical_lists():
    r = paired_t_test([0.9, 0.8, 0.7], [0.9, 0.8, 0.7])
    assert (r.t_stat, r.p_value, r.significant) == (0.0, 1.0, False)


def _with_moments(n, mean, sd):
    base = np.linspace(-1.0, 1.0, n)
    base = (base - base.mean()) / base.std(ddof=1)
    return mean + sd * base


def test_known_t_mean_one_sd_one():
    d = _with_moments(10, 1.0, 1.0)
    r = paired_t_test(d + 0.5, np.full(10, 0.5))
    assert r.t_stat == pytest.approx(3.1623, abs=1e-4)
    assert r.dof == 9
    assert r.p_value == pytest.approx(0.0115, abs=1e-4)
    assert r.significant


def test_known_t_mean_tenth():
    d = _with_moments(10, 0.1, 1.0)
    r = paired_t_test(d, np.zeros(10))
    assert r.t_stat == pytest.approx(0.3162, abs=1e-4)
    assert r.p_value == pytest.approx(0.759, abs=1e-3)
    assert not r.significant


def test_constant_nonzero_difference():
    r = paired_t_test(np.ones(10), np.zeros(10))
    assert r.t_stat == math.inf and r.p_value == 0.0 and r.significant


@pytest.mark.parametrize("a,b", [([1.0], [2.0]), ([1.0, 2.0], [1.0])])
def test_bad_input(a, b):
    with pytest.raises(ParameterError):
        paired_t_test(a, b)


scores = st.lists(st.floats(0.0, 1.0), min_size=3, max_size=12)


@settings(max_examples=100)
@given(scores, st.integers(0, 2**16))
def test_swap_negates_t(a, seed):
    b = np.random.default_rng(seed).uniform(0, 1, len(a))
    r1, r2 = paired_t_test(a, b), paired_t_test(b, a)
    assert r1.t_stat == -r2.t_stat
    assert r1.p_value == r2.p_value


@settings(max_examples=100)
@given(scores, st.integers(0, 2**16), st.floats(0.01, 100.0))
def test_scale_covariance(a, seed, c):
    b = np.random.default_rng(seed).uniform(0, 1, len(a))
    r1 = paired_t_test(a, b)
    r2 = paired_t_test(np.asarray(a) * c, b * c)
    if math.isfinite(r1.t_stat) and abs(r1.t_stat) > 1e-9:
        assert r2.t_stat == pytest.approx(r1.t_stat, rel=1e-6)
        assert r2.p_value == pytest.approx(r1.p_value, rel=1e-6, abs=1e-12)
    assert r1.significant == (r1.p_value < 0.05)
