import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from evostrat.optimizers import (
    OptParams,
    adam_step,
    clipup_step,
    exp_decay,
    init_opt_state,
    opt_step,
    sgd_step,
)


def test_sgd_examples():
    opt = init_opt_state(3, OptParams(lrate_init=0.01))
    upd, _ = sgd_step(np.zeros(3), opt, momentum=0.9)
    np.testing.assert_array_equal(upd, 0.0)
    g = np.array([1.0, -2.0, 3.0])
    upd, opt2 = sgd_step(g, opt, momentum=0.0)
    np.testing.assert_allclose(upd, -0.01 * g)
    assert opt2.step == 1

    opt = init_opt_state(1, OptParams(lrate_init=1.0))
    u1, opt = sgd_step([1.0], opt, momentum=0.9)
    u2, opt = sgd_step([0.0], opt, momentum=0.9)
    np.testing.assert_allclose(u1, [-1.0])
    np.testing.assert_allclose(u2, [-0.9])


def test_adam_zero_gradient():
    upd, opt = adam_step(np.zeros(4), init_opt_state(4))
    np.testing.assert_array_equal(upd, 0.0)
    assert opt.step == 1


def test_adam_first_step_is_lr_sign():
    g = np.array([0.3, -5.0, 1e-3])
    upd, _ = adam_step(g, init_opt_state(3, OptParams(lrate_init=0.01)))
    # bias-corrected first step: -lr * g / (|g| + eps)
    np.testing.assert_allclose(upd, -0.01 * g / (np.abs(g) + 1e-8), rtol=1e-12)
    np.testing.assert_allclose(np.abs(upd), 0.01, rtol=1e-5)


def test_adam_matches_scalar_recursion():
    grads = [0.5, -1.2, 3.0, 0.0, 0.7]
    lr, b1, b2, eps = 0.01, 0.9, 0.999, 1e-8
    # hand recursion
    m = v = 0.0
    expected = []
    for t, g in enumerate(grads, start=1):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        mh = m / (1 - b1**t)
        vh = v / (1 - b2**t)
        expected.append(-lr * mh / (vh**0.5 + eps))
    opt = init_opt_state(1, OptParams(lrate_init=lr))
    got = []
    for g in grads:
        upd, opt = adam_step([g], opt)
        got.append(upd[0])
    np.testing.assert_allclose(got, expected, rtol=0, atol=1e-12)
    assert opt.step == 5


def test_clipup_examples():
    opt = init_opt_state(2, OptParams(lrate_init=0.1))
    upd, _ = clipup_step(np.zeros(2), opt)
    np.testing.assert_array_equal(upd, 0.0)
    upd, _ = clipup_step(np.array([3.0, 4.0]), opt, momentum=0.0)
    np.testing.assert_allclose(upd, -0.1 * np.array([0.6, 0.8]))
    assert opt.max_speed == pytest.approx(0.2)


@given(arrays(np.float64, (100, 3), elements=st.floats(-1e3, 1e3)), st.floats(0.0, 0.99))
@settings(max_examples=50, deadline=None)
def test_clipup_speed_bounded(grads, momentum):
    opt = init_opt_state(3, OptParams(lrate_init=0.05))
    for g in grads:
        _, opt = clipup_step(g, opt, momentum=momentum)
        assert np.linalg.norm(opt.velocity) <= opt.max_speed * (1 + 1e-12)


def test_dimension_mismatch():
    opt = init_opt_state(3)
    for step in (sgd_step, adam_step, clipup_step):
        with pytest.raises(ValueError):
            step(np.zeros(2), opt)
    with pytest.raises(ValueError):
        opt_step("rmsprop", np.zeros(3), opt, OptParams())


def test_exp_decay():
    assert exp_decay(0.01, 0.999, 0.001) == pytest.approx(0.00999, abs=1e-15)
    assert exp_decay(0.001, 0.999, 0.001) == 0.001
    value = 0.05
    for _ in range(10_000):
        value = exp_decay(value, 0.999, 0.01)
        assert value >= 0.01
    assert value == 0.01
    np.testing.assert_array_equal(exp_decay(np.array([1.0, 0.011]), 0.5, 0.01), [0.5, 0.01])
