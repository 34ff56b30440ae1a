"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Criteria 7 to 9 share the calibrated noise model from conftest: Lindblad
rates from the IBMQX5 table means (T1 = 44.3 us, T2 = 70.0 us), 90 ns slots,
finite-width pulses, and a frozen static-Gaussian dephasing ensemble.
"""

import json
import math
import time

import numpy as np

from conftest import calibrated_noise
from ddsim import quantum as q
from ddsim.analysis import (
    REFERENCE_DECAYS,
    aggregate_curve,
    bootstrap,
    bound_analysis,
    fit_decay,
    generate_curve,
    intersection_time,
    linear_fit,
    load_tau_sweep_table,
)
from ddsim.engine import ScheduledRun, run_schedule, toggling_frame_first_order
from ddsim.experiments import (
    ExperimentSpec,
    bound_fidelity_grid,
    random_coupling,
    run_experiment,
)
from ddsim.noise import (
    NoiseConfiguration,
    PulseErrorModel,
    QubitNoiseParams,
    SpinBathModel,
)
from ddsim.sequences import PROFILES, SequenceDef, build_sequence, compile_schedule


def report(number, name, ok, detail, elapsed, budget):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number:2d} {name}: {status} ({detail}; {elapsed:.1f}s / budget {budget:.0f}s)")
    assert ok, f"criterion {number} failed: {detail}"
    assert elapsed < budget, f"criterion {number} exceeded runtime budget ({elapsed:.1f}s)"


def test_01_decoupling_oracle():
    t0 = time.time()
    rng = np.random.default_rng(101)
    worst_xy4 = 0.0
    worst_free = 1.0
    worst_ga = 0.0
    xy4 = build_sequence(SequenceDef("XY4"))
    free = build_sequence(SequenceDef("FREE", repetitions=4))
    ga_labels = {
        fam: build_sequence(SequenceDef(fam)) for fam in ("GA8A", "GA16A", "GA32A")
    }
    for _ in range(100):
        h = random_coupling("random", 2, rng)  # bath dim 4
        norm = float(np.linalg.norm(h, ord=2))
        worst_xy4 = max(worst_xy4, toggling_frame_first_order(xy4, h) / norm)
        worst_free = min(worst_free, toggling_frame_first_order(free, h) / norm)
        for labels in ga_labels.values():
            worst_ga = max(worst_ga, toggling_frame_first_order(labels, h) / norm)
    xi = build_sequence(SequenceDef("XI", repetitions=2))
    h_z = np.kron(q.PAULIS["Z"], np.eye(2))
    h_x = np.kron(q.PAULIS["X"], np.eye(2))
    xi_z = toggling_frame_first_order(xi, h_z)
    xi_x = toggling_frame_first_order(xi, h_x)
    ok = (
        worst_xy4 < 1e-12
        and worst_free >= 0.99
        and worst_ga < 1e-12
        and xi_z < 1e-12
        and xi_x > 0.5
    )
    report(
        1, "decoupling oracle", ok,
        f"XY4 max rel {worst_xy4:.1e}, FREE min rel {worst_free:.3f}, "
        f"GA max rel {worst_ga:.1e}, XI(z) {xi_z:.1e}, XI(x) {xi_x:.2f}",
        time.time() - t0, 10,
    )


def test_02_channel_analytics():
    t0 = time.time()
    profile = PROFILES["IBMQX5"]
    params = QubitNoiseParams(0, t1_us=44.3, t2_us=70.0, gate_error=0.0, readout_error=0.0)
    lb = NoiseConfiguration(name="lb", qubit_params=(params,), lindblad=True)

    sched = compile_schedule(build_sequence(SequenceDef("FREE", repetitions=120)), profile, 1)
    rho = run_schedule(ScheduledRun(initial=q.EulerAngles(math.pi), schedule=sched, noise=lb, seed=0))
    t1_err = abs(rho[0, 0].real - math.exp(-sched.total_ns / 44.3e3))

    from ddsim.engine import build_context, propagate_slot

    ctx = build_context(lb, (0,), 1, profile.pulse_width_ns)
    coh = q.density(np.array([1, 1]) / math.sqrt(2))
    for slot in sched.slots:
        coh = propagate_slot(coh, slot, ctx)
    t2_err = abs(abs(coh[0, 1]) - math.exp(-sched.total_ns / 70.0e3) / 2)

    p = 0.011
    depol = NoiseConfiguration(name="d", pulse_error=PulseErrorModel(depolarizing_prob=p))
    n = 60
    sched_d = compile_schedule(build_sequence(SequenceDef("XY4", repetitions=n // 4)), profile, 1)
    rho_d = run_schedule(ScheduledRun(initial=q.EulerAngles(0.0), schedule=sched_d, noise=depol, seed=0))
    depol_err = abs(rho_d[0, 0].real - (1 + (1 - p) ** n) / 2)

    ok = t1_err < 1e-9 and t2_err < 1e-9 and depol_err < 1e-9
    report(
        2, "channel analytics", ok,
        f"T1 err {t1_err:.1e}, T2 err {t2_err:.1e}, depolarizing err {depol_err:.1e}",
        time.time() - t0, 5,
    )


def test_03_fit_recovery():
    t0 = time.time()
    results = {}
    for key in ("ibmqx5-free", "ibmqx5-dd", "acorn-free", "acorn-dd"):
        ref = REFERENCE_DECAYS[key]
        truth = ref.as_fit()
        hits = 0
        for rep in range(100):
            rng = np.random.default_rng(np.random.SeedSequence((1234, rep)))
            curve = generate_curve(truth, ref.n_grid(), shots=ref.shots, rng=rng)
            fitted = fit_decay(curve)
            if abs(fitted.lam - ref.lam) / ref.lam <= 0.10:
                hits += 1
        results[key] = hits
    ok = all(hits >= 95 for hits in results.values())
    detail = ", ".join(f"{k}: {v}/100" for k, v in results.items())
    report(3, "fit recovery", ok, detail, time.time() - t0, 120)


def test_04_intersection_regression():
    t0 = time.time()
    free = REFERENCE_DECAYS["ibmqx5-free"].as_fit()
    dd = REFERENCE_DECAYS["ibmqx5-dd"].as_fit()
    res = intersection_time(free, dd, resamples=1000, rng=np.random.default_rng(4))
    ok = res.found and 98 <= res.n_mean <= 118
    report(
        4, "intersection regression", ok,
        f"t_int {res.n_mean:.1f} +- {res.n_2sigma:.1f}", time.time() - t0, 1,
    )


def test_05_tau_sweep_regressions():
    t0 = time.time()
    rows = [r for r in load_tau_sweep_table() if r["sequence"] == "XY4"]
    taus = [r["tau_multiplier"] for r in rows]
    fit_t = linear_fit(taus, [r["t_int"] for r in rows])
    fit_l = linear_fit(taus, [r["lambda"] for r in rows])
    ok = (
        abs(fit_t.slope - (-3.5)) <= 0.5
        and abs(fit_t.intercept - 108.0) <= 3.0
        and abs(fit_l.slope - (-4.3)) <= 0.5
        and abs(fit_l.intercept - 88.0) <= 2.0
    )
    report(
        5, "pulse-interval regressions", ok,
        f"t_int: {fit_t.slope:.2f} tau + {fit_t.intercept:.1f}; "
        f"lambda: {fit_l.slope:.2f} tau + {fit_l.intercept:.1f}",
        time.time() - t0, 1,
    )


def test_06_bound_suite():
    t0 = time.time()
    bath = SpinBathModel(
        splittings=(3.0e-4, 4.5e-4),
        couplings=((5e-6, 4e-6, 6e-6), (6e-6, 5e-6, 4e-6)),
    )
    noise = NoiseConfiguration(name="bath-only", spin_bath=bath)
    rows = bound_fidelity_grid(
        noise, "IBMQX5", SequenceDef("XY4"),
        pulse_counts=[4, 8, 16, 32, 64], tau_multipliers=[1, 2, 3, 4, 5, 6],
    )
    analysis = bound_analysis(rows, bath.bound_constant())
    small_tau_slope = analysis.rows[0]["a"]  # smallest pulse count
    ok = analysis.satisfied and 1.5 <= small_tau_slope <= 2.3
    report(
        6, "leakage-bound suite", ok,
        f"inequality at all {len(rows)} points: {analysis.satisfied}, "
        f"small-tau slope {small_tau_slope:.2f}",
        time.time() - t0, 120,
    )


def test_07_calibrated_decay_improvement():
    t0 = time.time()
    spec = ExperimentSpec(
        kind="TYPE2_ENSEMBLE",
        pulse_counts=tuple(range(0, 241, 8)),
        sequences=(SequenceDef("FREE"), SequenceDef("XY4")),
        noise=calibrated_noise(realizations=200),
        exact_probabilities=True,
        seed=11,
    )
    rs = run_experiment(spec)
    fit_free = fit_decay(aggregate_curve(rs.records, "FREE", resamples=300))
    fit_dd = fit_decay(aggregate_curve(rs.records, "XY4", resamples=300))
    ok = 23.0 <= fit_free.lam <= 35.0 and fit_dd.lam >= 2.0 * fit_free.lam
    report(
        7, "calibrated decay improvement", ok,
        f"FREE lambda {fit_free.lam:.1f} (target 29 +- 6), "
        f"XY4 lambda {fit_dd.lam:.1f} ({fit_dd.lam / fit_free.lam:.1f}x)",
        time.time() - t0, 600,
    )


def test_08_angle_sweep_shape():
    t0 = time.time()
    spec = ExperimentSpec(
        kind="TYPE1_SWEEP",
        pulse_counts=(40,),
        sequences=(SequenceDef("FREE"), SequenceDef("XY4")),
        noise=calibrated_noise(realizations=200),
        exact_probabilities=True,
        seed=11,
    )
    rs = run_experiment(spec)
    free = {r.state: r.fidelity for r in rs.records if r.sequence == "FREE"}
    dd = {r.state: r.fidelity for r in rs.records if r.sequence == "XY4"}
    # theta_k = k pi / 15; 5 pi / 8 sits between k = 9 and k = 10
    near_five_eighths = min(free["theta09"], free["theta10"])
    free_spread = max(free.values()) - min(free.values())
    dd_spread = max(dd.values()) - min(dd.values())
    ok = free["theta00"] > near_five_eighths and dd_spread < 0.5 * free_spread
    report(
        8, "angle-sweep shape", ok,
        f"FREE F(0)={free['theta00']:.3f} vs F(5pi/8)~{near_five_eighths:.3f}; "
        f"spreads XY4 {dd_spread:.3f} vs FREE {free_spread:.3f}",
        time.time() - t0, 300,
    )


def test_09_bell_protection():
    t0 = time.time()
    spec = ExperimentSpec(
        kind="BELL",
        pulse_counts=tuple(range(0, 201, 8)),
        sequences=(SequenceDef("FREE"), SequenceDef("XY4")),
        noise=calibrated_noise(realizations=200, qubits=(0, 1)),
        qubits=(0, 1),
        bell_kinds=("phi+",),
        exact_probabilities=True,
        seed=11,
    )
    rs = run_experiment(spec)
    p_free = {r.n_pulses: r.p00 for r in rs.records if r.sequence == "FREE"}
    p_dd = {r.n_pulses: r.p00 for r in rs.records if r.sequence == "XY4"}
    counts = sorted(p_free)
    monotone = all(p_free[a] <= p_free[b] + 1e-12 for a, b in zip(counts, counts[1:]))
    crossing = next((n for n in counts if p_free[n] > 0.5), None)
    ok = monotone and crossing is not None and p_dd[crossing] < p_free[crossing]
    report(
        9, "Bell-state protection", ok,
        f"FREE p00 monotone: {monotone}; at N={crossing} "
        f"XY4 p00 {p_dd[crossing]:.4f} < FREE {p_free[crossing]:.4f}",
        time.time() - t0, 300,
    )


def test_10_bootstrap_coverage():
    t0 = time.time()
    rng = np.random.default_rng(2718)
    trials, n, p_true = 1000, 576, 0.7
    covered = 0
    for _ in range(trials):
        data = (rng.random(n) < p_true).astype(float)
        summary = bootstrap(data, resamples=600, rng=rng)
        if summary.ci_low <= p_true <= summary.ci_high:
            covered += 1
    coverage = covered / trials
    flat = bootstrap([0.4] * 64, resamples=500, rng=rng)
    ok = abs(coverage - 0.95) <= 0.02 and flat.ci_halfwidth == 0.0
    report(
        10, "bootstrap coverage", ok,
        f"coverage {coverage:.3f} (target 0.95 +- 0.02), constant-width {flat.ci_halfwidth}",
        time.time() - t0, 60,
    )


def test_11_simulate_determinism(tmp_path):
    t0 = time.time()
    from ddsim.cli import main

    spec = ExperimentSpec(
        kind="TYPE2_ENSEMBLE",
        pulse_counts=(0, 8, 16),
        sequences=(SequenceDef("FREE"), SequenceDef("XY4")),
        noise=calibrated_noise(realizations=20),
        shots=512,
        seed=77,
    )
    cfg = tmp_path / "spec.json"
    cfg.write_text(json.dumps(spec.to_dict()))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", str(cfg), "--seed", "42", "--out", str(out_a)]) == 0
    assert main(["simulate", "--config", str(cfg), "--seed", "42", "--out", str(out_b)]) == 0
    bytes_a = (out_a / "records.csv").read_bytes()
    bytes_b = (out_b / "records.csv").read_bytes()
    ok = bytes_a == bytes_b and len(bytes_a) > 0
    report(
        11, "simulate determinism", ok,
        f"records.csv byte-identical across runs ({len(bytes_a)} bytes)",
        time.time() - t0, 120,
    )
