"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (visible with -v -s or in failure
output) and then asserts, so a red run still reports every criterion it
reached.
"""

import time

import numpy as np
import pytest

from ambientctl import (
    AmbientParams,
    GainSet,
    GainValidationError,
    RigidState,
    Scenario,
    SimConfig,
    ZState,
    builtin_tracking_reference,
    check_hurwitz_matrix,
    check_hurwitz_poly,
    constant_reference,
    epsilon_bound,
    exp_envelope_fit,
    exp_so3,
    finite_difference_jacobian,
    flatten_rigid,
    frobenius_inner,
    hat,
    linearize_along_trajectory,
    linearize_at_equilibrium,
    modified_vector_field,
    reference_consistency_check,
    rk4_step,
    run_scenario,
    unflatten_rigid,
    vee,
    z_dynamics,
)
from support import random_rotation

I3 = np.eye(3)
R0_TARGET = np.diag([-1.0, -1.0, 1.0])


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{name}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{name}: {detail}"


def test_eigenvalue_placement():
    check_hurwitz_matrix(4.0 * I3, 2.0 * I3)  # warm up
    elapsed = min(
        _timed(lambda: check_hurwitz_matrix(4.0 * I3, 2.0 * I3)) for _ in range(5)
    )
    rep = check_hurwitz_matrix(4.0 * I3, 2.0 * I3)
    upper = rep.eigenvalues[rep.eigenvalues.imag > 0]
    lower = rep.eigenvalues[rep.eigenvalues.imag < 0]
    ok = (
        rep.is_hurwitz is True
        and len(upper) == 3
        and len(lower) == 3
        and np.abs(rep.eigenvalues.real + 1.0).max() <= 1e-9
        and np.abs(np.abs(rep.eigenvalues.imag) - np.sqrt(3.0)).max() <= 1e-9
        and elapsed < 1e-3
    )
    report(
        "eigenvalue-placement",
        ok,
        f"poles -1+-i*sqrt(3) x3, abscissa {rep.spectral_abscissa:.2e}, {elapsed * 1e6:.0f} us",
    )


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def test_rotation_algebra_identities():
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    worst_invariance = worst_double = worst_cross = worst_diameter = 0.0
    for _ in range(1000):
        r = random_rotation(rng)
        a, b = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
        base = frobenius_inner(a, b)
        worst_invariance = max(
            worst_invariance,
            abs(frobenius_inner(r @ a, r @ b) - base),
            abs(frobenius_inner(a @ r, b @ r) - base),
        )
        u, v = rng.normal(size=3), rng.normal(size=3)
        worst_double = max(worst_double, abs(frobenius_inner(hat(u), hat(v)) - 2.0 * (u @ v)))
        comm = hat(u) @ hat(v) - hat(v) @ hat(u)
        worst_cross = max(
            worst_cross,
            float(np.linalg.norm(hat(u) @ v - np.cross(u, v))),
            float(np.linalg.norm(vee(comm) - np.cross(u, v))),
        )
        d = float(np.linalg.norm(random_rotation(rng) - random_rotation(rng)))
        worst_diameter = max(worst_diameter, d)
    elapsed = time.perf_counter() - start
    top = 2.0 * np.sqrt(2.0)
    attained = abs(float(np.linalg.norm(I3 - R0_TARGET)) - top) <= 1e-12
    ok = (
        worst_invariance <= 1e-12
        and worst_double <= 1e-12
        and worst_cross <= 1e-12
        and worst_diameter <= top + 1e-12
        and attained
        and elapsed < 1.0
    )
    report(
        "rotation-algebra-identities",
        ok,
        f"invariance {worst_invariance:.1e}, pairing {worst_double:.1e}, "
        f"cross {worst_cross:.1e}, diameter {worst_diameter:.6f}<=2*sqrt(2), {elapsed:.2f}s",
    )


def test_linearization_matches_finite_differences():
    k_e = 1.0
    params = AmbientParams(k_e)
    ref = builtin_tracking_reference()
    start = time.perf_counter()

    def field_at(u, k_e):
        def flat_field(x):
            r, omega = unflatten_rigid(x)
            r_dot, omega_dot = modified_vector_field(RigidState(r, omega), u, AmbientParams(k_e))
            return flatten_rigid(r_dot, omega_dot)

        return flat_field

    worst = 0.0
    op = linearize_at_equilibrium(R0_TARGET, params)
    base = flatten_rigid(R0_TARGET, np.zeros(3))
    fd = finite_difference_jacobian(field_at(np.zeros(3), k_e), base, h=1e-5)
    worst = max(worst, float(np.abs(op.state_matrix() - fd).max()))
    for t in (0.0, 1.0, 2.5):
        op_t = linearize_along_trajectory(ref, t, params)
        base_t = flatten_rigid(ref.r0(t), ref.omega0(t))
        fd_t = finite_difference_jacobian(field_at(ref.u0(t), k_e), base_t, h=1e-5)
        worst = max(worst, float(np.abs(op_t.state_matrix() - fd_t).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 1.0
    report(
        "linearization-oracle",
        ok,
        f"max entry error {worst:.2e} <= 1e-6 at h=1e-5, {elapsed:.2f}s",
    )


def test_symmetric_block_decay_rate():
    rng = np.random.default_rng(11)
    coeffs = rng.normal(size=(3, 3))

    def omega0(t):
        return coeffs[:, 0] + coeffs[:, 1] * np.sin(1.3 * t) + coeffs[:, 2] * np.cos(0.7 * t)

    s0 = rng.normal(size=(3, 3))
    s0 = 0.5 * (s0 + s0.T)

    def field(t, x):
        z = ZState(x[:9].reshape(3, 3), np.zeros(3), np.zeros(3))
        dz = z_dynamics(z, np.zeros(3), omega0(t), AmbientParams(1.0))
        return dz.z_s.ravel()

    dt, t_final = 1e-3, 4.0
    n = int(round(t_final / dt))
    x = s0.ravel().copy()
    ts, norms = [0.0], [float(np.linalg.norm(x))]
    for k in range(n):
        x = rk4_step(field, x, k * dt, dt)
        if (k + 1) % 10 == 0:
            ts.append((k + 1) * dt)
            norms.append(float(np.linalg.norm(x)))
    rate, r2 = exp_envelope_fit(np.array(ts), np.array(norms), (0.0, t_final))
    ok = abs(rate - 2.0) <= 0.02 and r2 >= 0.999
    report(
        "symmetric-block-decay",
        ok,
        f"rate {rate:.6f} (want 2.0 +- 1%), r2 {r2:.6f} >= 0.999",
    )


def test_stabilization_scenario():
    from ambientctl.cli import builtin_config_path, parse_config

    cfg = parse_config(builtin_config_path("fig1"))
    start = time.perf_counter()
    log = run_scenario(cfg)
    elapsed = time.perf_counter() - start
    err_r = log.column("err_R")
    err_w = log.column("err_W")
    defect = log.column("defect")
    ok = (
        abs(err_r[0] - 2.0 * np.sqrt(2.0)) <= 1e-12
        and err_r[-1] <= 1e-2
        and err_w[-1] <= 1e-2
        and defect.max() <= 1e-6
        and elapsed < 5.0
    )
    report(
        "stabilization-scenario",
        ok,
        f"err_R(0)={err_r[0]:.12f}, err_R(10)={err_r[-1]:.2e}, err_W(10)={err_w[-1]:.2e}, "
        f"max defect {defect.max():.2e}, {elapsed:.2f}s < 5s",
    )


def test_tracking_scenario():
    from ambientctl.cli import builtin_config_path, parse_config

    cfg = parse_config(builtin_config_path("fig2"))
    direct = float(np.linalg.norm(exp_so3([0.0, 0.99 * np.pi, 0.0]) - cfg.reference.r0(0.0)))
    res_r, res_w = reference_consistency_check(cfg.reference, samples=80, h=1e-4)
    start = time.perf_counter()
    log = run_scenario(cfg)
    elapsed = time.perf_counter() - start
    err_r = log.column("err_R")
    err_w = log.column("err_W")
    ok = (
        abs(err_r[0] - direct) <= 1e-3
        and err_r[-1] <= 1e-2
        and err_w[-1] <= 1e-2
        and res_r <= 1e-4
        and res_w <= 1e-4
        and elapsed < 10.0
    )
    report(
        "tracking-scenario",
        ok,
        f"err_R(0)={err_r[0]:.6f} (direct {direct:.6f}), err_R(20)={err_r[-1]:.2e}, "
        f"err_W(20)={err_w[-1]:.2e}, residuals ({res_r:.2e}, {res_w:.2e}), {elapsed:.2f}s < 10s",
    )


def test_controller_family_convergence():
    rng = np.random.default_rng(2024)
    track_ref = builtin_tracking_reference()
    eq_ref = constant_reference(R0_TARGET)
    cases = [
        ("pd", Scenario.STABILIZE, eq_ref, GainSet.pd(4.0 * I3, 2.0 * I3)),
        ("pid", Scenario.STABILIZE, eq_ref, GainSet.pid(3.0 * I3, 3.0 * I3, I3)),
        ("track-full", Scenario.TRACK, track_ref, GainSet.track_full(4.0 * I3, 2.0 * I3)),
        ("track-pid", Scenario.TRACK, track_ref, GainSet.track_pid(3.0 * I3, 3.0 * I3, I3)),
        ("track-pd", Scenario.TRACK, track_ref, GainSet.track_pd(4.0, 2.0 * I3)),
        ("track-pd-eps", Scenario.TRACK, track_ref, GainSet.track_pd_eps(4.0, 2.0 * I3, 1.0)),
    ]
    lines = []
    all_ok = True
    for name, scenario, ref, gains in cases:
        worst_final = worst_defect = 0.0
        worst_r2 = 1.0
        for _ in range(20):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            angle = rng.uniform(0.05, np.pi / 2.0)
            r_init = ref.r0(0.0) @ exp_so3(angle * axis)
            omega_init = ref.omega0(0.0) + rng.uniform(-0.5, 0.5, size=3)
            cfg = SimConfig(
                dt=0.01,
                t_final=20.0,
                scenario=scenario,
                initial=RigidState(r_init, omega_init),
                reference=ref,
                gains=gains,
                k_e=1.0,
                log_stride=1,
            )
            log = run_scenario(cfg)
            total = log.column("err_R") + log.column("err_W")
            _, r2 = exp_envelope_fit(log.t, total, (1.0, 10.0))
            worst_final = max(worst_final, float(total[-1]))
            worst_defect = max(worst_defect, float(log.column("defect").max()))
            worst_r2 = min(worst_r2, r2)
        case_ok = worst_final <= 1e-3 and worst_defect <= 1e-6 and worst_r2 >= 0.8
        all_ok = all_ok and case_ok
        lines.append(
            f"{name}: final {worst_final:.1e}, defect {worst_defect:.1e}, r2 {worst_r2:.3f}"
        )
    report("controller-family", all_ok, "; ".join(lines))


def test_gain_gate_cross_validation():
    rng = np.random.default_rng(99)
    disagreements = 0
    for _ in range(100):
        kd, kp, ki = rng.uniform(0.05, 3.0, size=3)
        gate = check_hurwitz_poly(kp * I3, kd * I3, ki * I3).is_hurwitz
        roots = np.roots([1.0, kd, kp, ki])
        by_roots = bool(roots.real.max() < -1e-9)
        by_routh = bool(kd * kp > ki)
        if not (gate == by_roots == by_routh):
            disagreements += 1
    bound = epsilon_bound(4.0, 2.0 * I3)
    bound_ok = abs(bound - 1.6) <= 1e-12
    admitted = True
    try:
        GainSet.track_pd_eps(4.0, 2.0 * I3, 1.0)
    except GainValidationError:
        admitted = False
    rejected = False
    try:
        GainSet.track_pd_eps(4.0, 2.0 * I3, 1.7)
    except GainValidationError:
        rejected = True
    ok = disagreements == 0 and bound_ok and admitted and rejected
    report(
        "gain-gate-cross-validation",
        ok,
        f"{disagreements} disagreements in 100 triples; bound {bound:.12f}; "
        f"eps=1 admitted={admitted}, eps=1.7 rejected={rejected}",
    )


def test_manifold_attractiveness():
    # defect-0.5 start: a uniformly scaled rotation has defect |c^2-1|*sqrt(3)
    rng = np.random.default_rng(5)
    scale = float(np.sqrt(1.0 + 0.5 / np.sqrt(3.0)))
    r_init = scale * random_rotation(rng)
    cfg = SimConfig(
        dt=1e-3,
        t_final=10.0,
        scenario=Scenario.OPEN_LOOP,
        initial=RigidState(r_init, np.array([0.4, -0.2, 0.3])),
        reference=np.eye(3),
        k_e=1.0,
        log_stride=10,
    )
    log = run_scenario(cfg)
    start_defect = float(log.column("defect")[0])
    pulled_in = float(log.column("defect")[-1])

    r_on = random_rotation(rng)
    cfg_plain = SimConfig(
        dt=1e-3,
        t_final=10.0,
        scenario=Scenario.OPEN_LOOP,
        initial=RigidState(r_on, np.array([0.7, 0.1, -0.4])),
        reference=np.eye(3),
        k_e=0.0,
        log_stride=10,
    )
    stays_on = float(run_scenario(cfg_plain).column("defect").max())
    ok = abs(start_defect - 0.5) <= 1e-12 and pulled_in <= 1e-6 and stays_on <= 1e-6
    report(
        "manifold-attractiveness",
        ok,
        f"defect {start_defect:.3f} -> {pulled_in:.2e} with pull-back; "
        f"plain field drift {stays_on:.2e} <= 1e-6",
    )
