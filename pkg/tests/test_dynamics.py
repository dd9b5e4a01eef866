import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hitstats.dynamics import (
    BitEnsemble,
    BitWindow,
    Doubling,
    FloatState,
    NotPeriodic,
    PerturbedExpanding,
    PomeauManneville,
    Product,
    a_sequence,
    initial_state,
    min_expansion,
    numeric_value,
    parabolic_inverse,
    pitskel_value,
    step,
    verify_periodic,
)

unit = st.floats(0.0, 1.0, allow_nan=False)


def test_dimensions():
    p = Product(Doubling(), PomeauManneville(0.5))
    assert p.dimension == 2 and p.left.dimension == p.right.dimension == 1


def test_perturbed_eps_bound():
    with pytest.raises(ValueError):
        PerturbedExpanding(1 / (2 * math.pi))
    PerturbedExpanding(0.15)


@given(st.floats(0.0, 0.159), unit)
def test_perturbed_uniformly_expanding(eps, x):
    m = PerturbedExpanding(eps)
    assert m.derivative(x) >= 2 - 2 * math.pi * eps > 1


@given(st.floats(0.01, 0.99), st.floats(1e-6, 1.0))
def test_pm_derivative_exceeds_one_off_zero(alpha, x):
    assert PomeauManneville(alpha).derivative(x) > 1.0


def test_pm_neutral_at_zero():
    assert PomeauManneville(0.3).derivative(0.0) == 1.0


def test_doubling_step_shifts_bits():
    s = BitWindow.from_pattern((0, 1))
    assert numeric_value(s) == pytest.approx(1 / 3, abs=1e-15)
    s2 = step(Doubling(), s)
    assert numeric_value(s2) == pytest.approx(2 / 3, abs=1e-15)
    assert step(Doubling(), s2).window == s.window


def test_doubling_rejects_float_state():
    with pytest.raises(TypeError):
        step(Doubling(), FloatState(0.3))


def test_branch_formulas():
    assert PomeauManneville(1.0).apply(0.25) == pytest.approx(3 / 8)
    for a in (0.1, 0.5, 0.9):
        assert PomeauManneville(a).apply(0.75) == pytest.approx(0.5)
    assert Doubling().derivative(0.123) == 2.0
    assert PerturbedExpanding(0.05).derivative(0.0) == pytest.approx(2 + 2 * math.pi * 0.05)


@given(unit)
def test_numeric_value_in_unit_interval(x):
    rng = np.random.default_rng(0)
    for m in (Doubling(), PerturbedExpanding(0.1), PomeauManneville(0.4)):
        s = initial_state(m, x, rng)
        for _ in range(5):
            s = step(m, s)
            assert 0.0 <= numeric_value(s) <= 1.0


def test_state_representation():
    rng = np.random.default_rng(1)
    assert isinstance(initial_state(Doubling(), 0.2, rng), BitWindow)
    assert isinstance(initial_state(PomeauManneville(0.5), 0.2, rng), FloatState)
    pair = initial_state(Product(Doubling(), PerturbedExpanding(0.1)), (0.2, 0.3), rng)
    assert isinstance(pair.left, BitWindow) and isinstance(pair.right, FloatState)


def test_pitskel_values():
    assert pitskel_value(Doubling(), 1 / 3, 2) == pytest.approx(0.25)
    assert pitskel_value(Doubling(), 0.0, 1) == pytest.approx(0.5)
    eps = 0.05
    assert pitskel_value(PerturbedExpanding(eps), 0.0, 1) == pytest.approx(1 / (2 + 2 * math.pi * eps))
    with pytest.raises(NotPeriodic):
        pitskel_value(Doubling(), 0.3, 2)


def test_verify_periodic_minimality():
    assert verify_periodic(Doubling(), 1 / 3, 2, 1e-12)
    assert not verify_periodic(Doubling(), 1 / 3, 1, 1e-12)
    assert not verify_periodic(Doubling(), 1 / 3, 4, 1e-12)


def test_min_expansion_product():
    assert min_expansion(Product(Doubling(), PomeauManneville(0.5)), (0.2, 0.0)) == 2.0


def test_parabolic_inverse_examples():
    assert parabolic_inverse(1.0, 1.0) == pytest.approx(0.5, abs=1e-14)
    assert parabolic_inverse(0.3, 0.0) == 0.0
    x = parabolic_inverse(0.5, 1.0)
    assert abs(x + math.sqrt(2) * x**1.5 - 1.0) < 1e-12


@given(st.floats(0.05, 0.95), st.floats(1e-12, 1.0))
def test_parabolic_inverse_is_inverse(alpha, y):
    x = parabolic_inverse(alpha, y)
    assert 0.0 <= x <= 0.5
    assert abs(x + 2**alpha * x ** (1 + alpha) - y) <= 1e-12 * max(y, 1e-300) + 1e-300


def test_a_sequence():
    assert a_sequence(0.7, 0)[0] == 1.0
    assert a_sequence(1.0, 1)[1] == pytest.approx(0.5)
    a = a_sequence(0.5, 10_000)
    assert np.all(np.diff(a) < 0)
    n = np.arange(100, 10_001)
    scaled = a[n] * n**2
    # frozen regression band; the asymptote is (alpha 2^alpha n)^(-1/alpha) = 2 / n^2
    assert 2.00 <= scaled.min() and scaled.max() <= 2.20
    assert scaled.max() / scaled.min() < 3


def test_a_sequence_cache_is_consistent():
    short = np.array(a_sequence(0.33, 50))
    long = a_sequence(0.33, 500)
    assert np.array_equal(short, long[:51])


def test_bit_ensemble_matches_scalar_shift():
    rng = np.random.default_rng(3)
    w = rng.integers(0, 1 << 64, size=4, dtype=np.uint64)
    ens = BitEnsemble(w, np.random.default_rng(4))
    tail = ens.tail.copy()
    ens.step()
    expect = (w << np.uint64(1)) | (tail >> np.uint64(63))
    assert np.array_equal(ens.window, expect)
    for _ in range(200):
        ens.step()
    assert np.all((ens.values() >= 0) & (ens.values() < 1))
