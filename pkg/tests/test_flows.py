import numpy as np
import pytest

from oracles import pym_heat_flow
from symflat.errors import (
    ConvergenceError,
    DomainMismatchError,
    FlowDivergedError,
    InvalidConnectionError,
    StepUnderflowError,
)
from symflat.flows import (
    CSV_HEADER,
    FlowConfig,
    conjugate_gradient,
    default_step,
    flow_run,
    initial_speed,
    make_pym_from_ym,
    solve_pym_correction,
)
from symflat.forms import SU2, codifferential, exterior_derivative, random_form, sup_norm
from symflat.functionals import el_residual
from symflat.gauge import gauge_apply
from symflat.presets import bpst, constant_flux, flat_wilson, random_su2


def _perturbed_flat(res=8, amp=1e-3, seed=0):
    p = flat_wilson(0.1, 0.2, 0.3, 0.4, resolution=res)
    eta = random_form(p.domain, 1, np.random.default_rng(seed), amplitude=amp, max_mode=1)
    return p, p.connection.shifted(eta)


def test_flat_start_terminates_immediately():
    p = flat_wilson(0.1, 0.2, resolution=8)
    state, trace = flow_run(p.connection, FlowConfig(kind="pym"), p.metric)
    assert trace.steps == 0
    assert len(trace.rows) == 1
    assert state.connection is p.connection


def test_linear_pym_flow_matches_exact_solution():
    p, A0 = _perturbed_flat()
    n = 40
    dt = default_step(p.domain, p.metric, "pym")
    state, trace = flow_run(A0, FlowConfig(kind="pym", max_steps=n, tolerance=1e-300), p.metric)
    assert trace.halvings == 0 and trace.steps == n
    exact = pym_heat_flow(A0.a.data[:, 0], p.domain.periods, n * dt)
    err = np.max(np.abs(state.connection.a.data[:, 0] - exact))
    assert err <= 1e-4 * np.max(np.abs(A0.a.data - p.connection.a.data))
    assert trace.is_monotone()


@pytest.mark.parametrize("kind", ["ym", "pym", "cone"])
def test_energy_dissipation_su2(kind, rng):
    p = random_su2(2, 0.5, resolution=8, max_mode=1)
    B0 = random_form(p.domain, 0, rng, SU2, 0.3, max_mode=1) if kind == "cone" else None
    _, trace = flow_run(p.connection, FlowConfig(kind=kind, max_steps=15), p.metric, B0)
    v = np.asarray(trace.flowed_values)
    assert np.all(np.diff(v) <= 1e-10)
    assert v[-1] < v[0]


def test_stationarity_post_hoc():
    p, A0 = _perturbed_flat()
    state, trace = flow_run(A0, FlowConfig(kind="pym", max_steps=500, tolerance=1e-8), p.metric)
    assert trace.rows[-1][-1] <= 1e-8
    assert sup_norm(el_residual("pym", state.connection, p.metric), p.metric) <= 1e-8


def test_gauge_equivariance_abelian(rng):
    p, A0 = _perturbed_flat(amp=1e-2)
    lam = random_form(p.domain, 0, rng, amplitude=0.3, max_mode=1)
    cfg = FlowConfig(kind="ym", max_steps=10, tolerance=1e-300)
    s0, _ = flow_run(A0, cfg, p.metric)
    s1, _ = flow_run(gauge_apply(A0, lam), cfg, p.metric)
    moved = gauge_apply(s0.connection, lam)
    assert np.max(np.abs(s1.connection.a.data - moved.a.data)) <= 1e-6


def test_t4_initial_speed(t4):
    assert sup_norm(el_residual("ym", t4.connection, t4.metric), t4.metric) <= 1e-6
    assert initial_speed(t4.connection, t4.metric, "pym") > 1e-3


def test_step_underflow():
    p = random_su2(0, 0.5, resolution=8, max_mode=1)
    with pytest.raises(StepUnderflowError):
        flow_run(p.connection, FlowConfig(kind="ym", step=50.0, max_steps=1), p.metric, max_halvings=0)


def test_divergence_detected():
    p = random_su2(0, 0.5, resolution=8, max_mode=1)
    with pytest.raises(FlowDivergedError):
        flow_run(p.connection, FlowConfig(kind="ym", step=1e200, max_steps=1), p.metric)


def test_flow_input_validation(rng):
    with pytest.raises(ValueError):
        FlowConfig(kind="phi")
    with pytest.raises(ValueError):
        FlowConfig(max_steps=-1)
    with pytest.raises(ValueError):
        FlowConfig(step=-1.0)
    q = bpst(20)
    with pytest.raises(DomainMismatchError):
        flow_run(q.connection, FlowConfig(), q.metric)
    p = flat_wilson(resolution=8)
    with pytest.raises(InvalidConnectionError):
        flow_run(p.connection, FlowConfig(kind="cone"), p.metric)


def test_trace_csv_format_and_determinism(tmp_path):
    p, A0 = _perturbed_flat()
    cfg = FlowConfig(kind="pym", max_steps=5, stride=2)
    _, t1 = flow_run(A0, cfg, p.metric)
    _, t2 = flow_run(A0, cfg, p.metric)
    text = t1.to_csv(tmp_path / "a.csv")
    assert text == t2.to_csv()
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    # initial row, steps 2 and 4, and the final step
    assert len(lines) == 1 + 4
    assert (tmp_path / "a.csv").read_text() == text


def test_conjugate_gradient_small_system(rng):
    M = rng.normal(size=(6, 6))
    S = M @ M.T + 6 * np.eye(6)
    b = rng.normal(size=6)
    res = conjugate_gradient(lambda x: S @ x, b, tol=1e-12)
    np.testing.assert_allclose(res.x, np.linalg.solve(S, b), atol=1e-10)
    with pytest.raises(ConvergenceError):
        conjugate_gradient(lambda x: S @ x, b, tol=1e-14, maxiter=1)


def test_correction_is_zero_for_pym_input():
    p = constant_flux(0.5, resolution=8)
    corr = solve_pym_correction(p.connection, p.metric)
    assert corr.iterations == 0
    assert np.max(np.abs(corr.xi.data)) <= 1e-6


def test_correction_rejects_su2():
    p = random_su2(0, resolution=8, max_mode=1)
    with pytest.raises(InvalidConnectionError):
        solve_pym_correction(p.connection, p.metric)


def test_a_prime_properties(t4, a_prime):
    assert sup_norm(el_residual("pym", a_prime, t4.metric), t4.metric) <= 1e-6
    assert sup_norm(el_residual("ym", a_prime, t4.metric), t4.metric) >= 1e-3
    # the correction keeps the flux, is coclosed (Coulomb gauge) and changes the curvature
    xi = a_prime.a - t4.connection.a
    assert a_prime.beta is t4.connection.beta
    assert sup_norm(codifferential(xi, t4.metric), t4.metric) <= 1e-6
    assert sup_norm(exterior_derivative(xi), t4.metric) > 1e-3


def test_a_prime_idempotent(t4, a_prime):
    again = make_pym_from_ym(a_prime, t4.metric)
    assert np.max(np.abs(again.a.data - a_prime.a.data)) <= 1e-6
