import numpy as np
import pytest

from graphon_moments.inr import (
    InrError,
    InrParams,
    forward,
    grad_to_vector,
    init_params,
    loss_and_grad,
    mc_moments,
    model_from_text,
    model_to_text,
    params_to_vector,
    vector_to_params,
)
from graphon_moments.motifs import constant_graphon_moments
from graphon_moments.rng import philox_stream


def test_init_deterministic():
    a = init_params(64, 7)
    b = init_params(64, 7)
    assert np.array_equal(params_to_vector(a), params_to_vector(b))


def test_init_seed_sensitivity():
    a = init_params(64, 7)
    b = init_params(64, 8)
    assert not np.array_equal(params_to_vector(a), params_to_vector(b))


def test_parameter_count():
    assert init_params(64, 0).num_parameters == 64 * 2 + 64 + 64 + 1 == 257


def test_init_rejects_bad_width():
    with pytest.raises(InrError):
        init_params(0, 1)


def test_forward_symmetry_exact():
    p = init_params(32, 5)
    assert forward(p, 0.3, 0.7) == forward(p, 0.7, 0.3)


def test_forward_zero_params_is_half():
    p = init_params(8, 0)
    p = vector_to_params(np.zeros(p.num_parameters), p)
    assert forward(p, 0.1, 0.9) == 0.5


def test_forward_domain_error():
    with pytest.raises(InrError):
        forward(init_params(8, 0), 1.5, 0.2)


def test_forward_open_unit_range():
    rng = philox_stream(77)
    for trial in range(20):
        p = init_params(16, trial)
        vec = params_to_vector(p) + rng.normal(0, 1.0, p.num_parameters)
        p = vector_to_params(vec, p)
        out = forward(p, rng.random(500), rng.random(500))
        assert np.all((out > 0.0) & (out < 1.0))


def test_constant_half_moments():
    p = vector_to_params(np.zeros(init_params(8, 0).num_parameters), init_params(8, 0))
    tuples = philox_stream(3).random((256, 4))
    mhat = mc_moments(p, tuples)
    assert mhat[0] == pytest.approx(0.5)
    assert mhat[2] == pytest.approx(0.125)
    assert mhat[8] == pytest.approx(0.5**6)


def test_loss_zero_at_perfect_fit():
    p = init_params(16, 9)
    tuples = philox_stream(4).random((300, 4))
    mhat = mc_moments(p, tuples)
    weights = np.ones(9)
    loss, grad, mhat2 = loss_and_grad(p, tuples, mhat, weights)
    assert loss == pytest.approx(0.0, abs=1e-24)
    assert np.allclose(grad_to_vector(grad), 0.0)
    assert np.array_equal(mhat2.densities, mhat)


@pytest.mark.parametrize("trial", range(5))
def test_gradient_matches_finite_differences(trial):
    rng = philox_stream(1000 + trial)
    base = init_params(8, trial)
    vec = params_to_vector(base) + rng.normal(0, 0.5, base.num_parameters)
    params = vector_to_params(vec, base)
    tuples = rng.random((500, 4))
    target = np.clip(constant_graphon_moments(0.4) + rng.normal(0, 0.05, 9), 0.01, 1.0)
    weights = 1.0 / np.maximum(target, 1e-6)

    _, grad, _ = loss_and_grad(params, tuples, target, weights)
    g = grad_to_vector(grad)
    step = 1e-5
    fd = np.empty_like(g)
    for i in range(len(vec)):
        up, down = vec.copy(), vec.copy()
        up[i] += step
        down[i] -= step
        lp = loss_and_grad(vector_to_params(up, base), tuples, target, weights)[0]
        lm = loss_and_grad(vector_to_params(down, base), tuples, target, weights)[0]
        fd[i] = (lp - lm) / (2 * step)
    rel = np.abs(g - fd) / np.maximum(np.abs(fd), 1e-8)
    assert rel.max() < 1e-4


def test_loss_and_grad_input_checks():
    p = init_params(8, 0)
    with pytest.raises(InrError):
        loss_and_grad(p, np.zeros((0, 4)), np.zeros(9), np.ones(9))
    with pytest.raises(InrError):
        loss_and_grad(p, np.full((10, 4), 2.0), np.zeros(9), np.ones(9))
    with pytest.raises(InrError):
        loss_and_grad(p, np.zeros((10, 4)), np.zeros(9), -np.ones(9))


def test_model_text_round_trip_exact():
    p = init_params(25, 13)
    q = model_from_text(model_to_text(p))
    assert np.array_equal(params_to_vector(p), params_to_vector(q))
    assert q.hidden_width == 25 and q.seed == 13 and q.activation == "tanh"


def test_params_validation():
    with pytest.raises(InrError):
        InrParams(np.zeros((4, 2)), np.zeros(3), np.zeros(4), 0.0)
    with pytest.raises(InrError):
        InrParams(np.full((4, 2), np.nan), np.zeros(4), np.zeros(4), 0.0)
