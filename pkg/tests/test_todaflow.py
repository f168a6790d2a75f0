import numpy as np
import pytest

from qtoda.laxdet import Variant
from qtoda.todaflow import (
    FlowError,
    FlowState,
    check_state,
    conserved_values,
    integrate,
    lax_pair,
    lax_residual,
    numeric_conserved,
    random_state,
    rk4_step,
    vector_field,
)

P, O = Variant.PERIODIC, Variant.OPEN


def test_periodic_fixed_point():
    s = FlowState(0.0, np.zeros(4), np.full(4, -1.3))
    dx, dq = vector_field(s, P)
    assert not dx.any() and not dq.any()
    s1 = rk4_step(s, 0.1, P)
    assert np.array_equal(s1.x, s.x) and np.array_equal(s1.q, s.q)
    assert s1.t == pytest.approx(0.1)


def test_open_field_boundary_terms():
    s = FlowState(0.0, np.array([0.5, -0.2, -0.3]), np.array([-1.0, -2.0]))
    dx, dq = vector_field(s, O)
    assert np.allclose(dx, [-1.0, -1.0, 2.0])
    assert np.allclose(dq, [-0.7, -0.2])


@pytest.mark.parametrize("variant,n", [(O, 3), (O, 6), (P, 3), (P, 5)])
def test_field_telescopes(variant, n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        s = random_state(n, variant, rng)
        dx, dq = vector_field(s, variant)
        assert abs(dx.sum()) < 1e-14
        if variant is P:
            # d/dt prod q = prod q * sum(dq/q)
            assert abs(np.prod(s.q) * np.sum(dq / s.q)) < 1e-12


@pytest.mark.parametrize("variant", [O, P])
def test_rk4_local_error_is_fifth_order(variant):
    rng = np.random.default_rng(7)
    s = random_state(5, variant, rng)

    def local_err(h):
        full = rk4_step(s, h, variant)
        half = rk4_step(rk4_step(s, h / 2, variant), h / 2, variant)
        return np.linalg.norm(np.concatenate([full.x - half.x, full.q - half.q]))

    ratio = local_err(0.04) / local_err(0.02)
    assert 25 < ratio < 40  # 2^5 = 32
    s1 = rk4_step(s, 0.05, variant)
    assert abs(s1.x.sum()) < 1e-14


def test_rk4_step_rejects_nonpositive_h():
    s = FlowState(0.0, np.zeros(3), np.full(3, -1.0))
    with pytest.raises(FlowError):
        rk4_step(s, 0.0, P)


def test_zero_horizon():
    s = random_state(4, P, np.random.default_rng(1))
    traj, rep = integrate(s, 0.0, 1e-3, P)
    assert len(traj) == 1
    assert rep.steps == 0 and rep.max_drift == 0.0 and rep.prodq_drift == 0.0


@pytest.mark.parametrize("variant", [O, P])
def test_drift_examples_n4(variant):
    s = random_state(4, variant, np.random.default_rng(4))
    traj, rep = integrate(s, 1.0, 1e-3, variant)
    assert rep.steps == 1000 and len(traj) == 1001
    assert traj.t[-1] == 1.0
    prefix = "P" if variant is P else "O"
    assert list(rep.drift) == [f"{prefix}{k}" for k in range(4)]
    assert rep.max_drift < 1e-8
    assert rep.sumx_max < 1e-12
    if variant is P:
        assert rep.prodq_drift < 1e-10
    else:
        assert rep.prodq_drift is None
    assert np.all(traj.q < 0)


def test_non_multiple_horizon_lands_on_t_end():
    s = random_state(3, O, np.random.default_rng(2))
    traj, rep = integrate(s, 0.0105, 1e-3, O)
    assert rep.steps == 11 and traj.t[-1] == pytest.approx(0.0105, abs=1e-15)


def test_conserved_values_are_not_trivially_constant():
    # along the flow the state itself moves; only the invariants stay put
    s = random_state(5, P, np.random.default_rng(3))
    traj, _ = integrate(s, 1.0, 1e-2, P)
    assert np.max(np.abs(traj.x[-1] - traj.x[0])) > 1e-2
    vals = conserved_values(traj, P)
    assert set(vals) == {"P0", "P1", "P2", "P3", "P4"}


@pytest.mark.parametrize("variant,n", [(O, 3), (O, 5), (P, 3), (P, 4), (P, 6)])
def test_cross_validation_against_numeric_charpoly(variant, n):
    s = random_state(n, variant, np.random.default_rng(10 + n))
    traj, _ = integrate(s, 0.2, 1e-3, variant)
    exact = conserved_values(traj, variant)
    numeric = numeric_conserved(traj, variant)
    for k in exact:
        a = exact[k].astype(float)
        b = numeric[k]
        assert np.max(np.abs(a - b)) < 1e-10
        da = np.max(np.abs(a - a[0]))
        db = np.max(np.abs(b - b[0]))
        assert abs(da - db) < 1e-10


def test_lax_pair_shapes():
    x = np.array([0.1, 0.2, -0.3])
    q = np.array([-1.0, -2.0, -0.5])
    L, M = lax_pair(x, q, P, z=1j)
    assert L[0, 2] == -1j and L[2, 0] == -0.5 / 1j
    assert M[2, 0] == L[2, 0] and M[0, 1] == -1.0 and M[1, 0] == 0


def test_lax_residual_fixed_point_and_open_ignores_z():
    s = FlowState(0.0, np.zeros(4), np.full(4, -1.0))
    assert lax_residual(s, P, [1.0, 1j]) < 1e-14
    so = random_state(4, O, np.random.default_rng(0))
    assert lax_residual(so, O, [np.exp(0.3j)]) == lax_residual(so, O, [])


def test_lax_residual_second_order():
    zs = [np.exp(2j * np.pi * k / 8) for k in range(8)]
    s = random_state(5, P, np.random.default_rng(5))
    r1 = lax_residual(s, P, zs, eps=2e-2)
    r2 = lax_residual(s, P, zs, eps=1e-2)
    assert 3.5 < r1 / r2 < 4.5


def test_lax_residual_rejects_wrong_M():
    def transposed(x, q, variant, z):
        L, M = lax_pair(x, q, variant, z)
        return L, M.T

    s = random_state(4, P, np.random.default_rng(6))
    zs = [1.0, -1.0, 1j]
    bad1 = lax_residual(s, P, zs, eps=2e-2, pair=transposed)
    bad2 = lax_residual(s, P, zs, eps=1e-2, pair=transposed)
    assert bad2 > 0.1 and bad1 / bad2 < 1.5


def test_lax_residual_input_checks():
    s = random_state(3, P, np.random.default_rng(0))
    with pytest.raises(FlowError):
        lax_residual(s, P, [])
    with pytest.raises(FlowError):
        lax_residual(s, P, [2.0])


def test_state_validation():
    with pytest.raises(FlowError, match="sum"):
        check_state(FlowState(0, np.array([1.0, 0.0, 0.0]), np.full(3, -1.0)), P)
    with pytest.raises(FlowError, match="negative"):
        check_state(FlowState(0, np.zeros(3), np.array([-1.0, 0.5, -1.0])), P)
    with pytest.raises(FlowError, match="q values"):
        check_state(FlowState(0, np.zeros(3), np.full(3, -1.0)), O)
    with pytest.raises(FlowError, match="n >= 3"):
        check_state(FlowState(0, np.zeros(2), np.full(2, -1.0)), P)


def test_non_finite_aborts():
    s = FlowState(0.0, np.array([30.0, -30.0]), np.array([-1e150]))
    with pytest.raises(FlowError, match="non-finite"):
        integrate(s, 1.0, 0.1, O)


def test_report_json_field_order():
    s = random_state(3, P, np.random.default_rng(0))
    _, rep = integrate(s, 0.01, 1e-3, P)
    assert list(rep.to_json()) == [
        "n", "variant", "dt", "t_end", "drift", "sumx_max", "prodq_drift", "order", "steps",
    ]
