"""Acceptance gate: one test per exit criterion, each reporting a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` and read the "acceptance
criteria" section of the terminal summary.
"""

import filecmp
import math
import time

import numpy as np
import pytest

from oracles import lambert_w0_bisect
from optoloc.cli import main
from optoloc.harness import run_scenario, sweep_area
from optoloc.propagation import WaterEnv, schulkin_marsh_absorption, thorp_absorption, transmission_loss
from optoloc.ranging import MAX_RANGE_ITERATIONS, distance_from_tl, lambert_w0
from optoloc.scenario import Scenario, default_dynamic_scenario
from optoloc.source_link import DEFAULT_JITTER_TABLE, SourceModel

SWEEP = (5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
QUIET = SourceModel(jitter_table=((0.0, 0.0), (45.0, 0.0), (90.0, 0.0)))


def fmt(d):
    return ", ".join(f"{k:g}:{v:.4g}" for k, v in d.items())


def test_1_absorption_golden_values(criterion):
    f = 1.0
    thorp_oracle = 0.11 * f * f / (1 + f * f) + 44 * f * f / (4100 + f * f) + 2.75e-4 * f * f + 0.003
    f_t = 21.9 * 10 ** (6 - 1520 / (10 + 273))
    f = 8.0
    sm_oracle = 8.68e3 * (35 * 2.34e-6 * f_t * f * f / (f_t ** 2 + f * f) + 3.38e-6 * f * f / f_t) * (1 - 6.54e-4)

    thorp = thorp_absorption(1.0).value_db_per_km
    sm = schulkin_marsh_absorption(8.0, WaterEnv(10, 35, 1)).value_db_per_km
    ok = (
        abs(thorp - 0.0690) <= 1e-4
        and abs(sm - 0.504) <= 0.002
        and thorp == pytest.approx(thorp_oracle, rel=1e-12)
        and sm == pytest.approx(sm_oracle, rel=1e-12)
    )
    criterion("1 absorption golden values", ok, f"Thorp(1 kHz)={thorp:.6f}, S-M(8 kHz)={sm:.6f} dB/km")


def test_2_ranging_round_trip(criterion):
    env = WaterEnv()
    t0 = time.perf_counter()
    worst, iters = 0.0, []
    for d in np.linspace(1.0, 5000.0, 50):
        for a in np.geomspace(0.01, 50.0, 50):
            est = distance_from_tl(transmission_loss(d, env, a), a)
            worst = max(worst, abs(est.distance_m - d) / d)
            iters.append(est.iterations_used)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and max(iters) <= MAX_RANGE_ITERATIONS and np.mean(iters) <= 6 and elapsed < 1.0
    criterion(
        "2 ranging round trip",
        ok,
        f"max rel err={worst:.2e}, max iters={max(iters)}, mean iters={np.mean(iters):.2f}, {elapsed:.3f}s",
    )


def test_3_lambert_w_oracle(criterion):
    xs = np.geomspace(1e-6, 1e6, 1000)
    t0 = time.perf_counter()
    ws = [lambert_w0(float(x)) for x in xs]
    elapsed = time.perf_counter() - t0
    oracle = [lambert_w0_bisect(float(x)) for x in xs]
    worst = max(abs(w - o) / max(1.0, abs(o)) for w, o in zip(ws, oracle))
    ok = worst <= 1e-10 and elapsed < 1.0
    criterion("3 Lambert W vs bisection", ok, f"max err={worst:.2e}, {elapsed:.3f}s")


def test_4_exact_recovery(criterion):
    static = Scenario(source=QUIET, snr_sweep_db=(math.inf,), trials_per_node=1)
    dynamic = default_dynamic_scenario(source=QUIET, snr_sweep_db=(math.inf,), trials_per_node=1)
    rs, rd = run_scenario(static).rows[0], run_scenario(dynamic).rows[0]
    ok = rs.rmse_m <= 1e-6 and rd.rmse_m <= 1e-6 and rs.failure_count == rd.failure_count == 0
    criterion("4 noiseless exact recovery", ok, f"static RMSE={rs.rmse_m:.2e} m, dynamic RMSE={rd.rmse_m:.2e} m")


def test_5_headline_rmse_at_30db(criterion):
    s = Scenario(snr_sweep_db=(30.0,))
    assert s.source.jitter_table == DEFAULT_JITTER_TABLE and s.control_bit_count == 16
    t0 = time.perf_counter()
    row = run_scenario(s).rows[0]
    elapsed = time.perf_counter() - t0
    table = ", ".join(f"{d:g} deg: {sd:g} dB" for d, sd in DEFAULT_JITTER_TABLE)
    ok = row.rmse_m <= 5.0 and elapsed < 60.0
    criterion(
        "5 static RMSE <= 5 m at 30 dB",
        ok,
        f"RMSE={row.rmse_m:.3f} m over {s.node_count}x{s.trials_per_node}, sigma table [{table}], {elapsed:.1f}s",
    )


@pytest.fixture(scope="module")
def static_sweep():
    return run_scenario(Scenario(snr_sweep_db=SWEEP)).rmse_by_snr()


def test_6a_rmse_non_increasing_in_snr(criterion, static_sweep):
    v = [static_sweep[k] for k in SWEEP]
    ok = all(b <= a for a, b in zip(v, v[1:]))
    criterion("6a RMSE non-increasing in SNR", ok, fmt(static_sweep))


def test_6b_more_control_bits_on_axis(criterion):
    s = Scenario(snr_sweep_db=SWEEP, jitter_direction_deg=0.0)
    r16 = run_scenario(s).rmse_by_snr()
    r32 = run_scenario(s.replace(control_bit_count=32)).rmse_by_snr()
    ok = all(r32[k] <= r16[k] for k in SWEEP)
    criterion("6b RMSE(32 bits) <= RMSE(16 bits) at 0 deg", ok, "32/16 ratio " + fmt({k: r32[k] / r16[k] for k in SWEEP}))


def test_6c_dynamic_worse_than_static(criterion, static_sweep):
    dyn = run_scenario(default_dynamic_scenario(snr_sweep_db=SWEEP)).rmse_by_snr()
    ok = all(dyn[k] >= static_sweep[k] for k in SWEEP)
    criterion("6c dynamic RMSE >= static RMSE", ok, "dynamic " + fmt(dyn))


def test_6d_area_scaling(criterion):
    scales = [0.5, 1.0, 1.5, 2.0]
    st = [r for _, r in sweep_area(Scenario(), scales, snr_db=30.0)]
    dy = [r for _, r in sweep_area(default_dynamic_scenario(), scales, snr_db=30.0)]
    mono = all(b >= a for a, b in zip(st, st[1:])) and all(b >= a for a, b in zip(dy, dy[1:]))
    growth_st, growth_dy = st[-1] / st[0], dy[-1] / dy[0]
    ok = mono and growth_dy >= growth_st
    criterion(
        "6d RMSE grows with area, dynamic faster",
        ok,
        f"static {['%.3g' % r for r in st]} (x{growth_st:.2f}), dynamic {['%.3g' % r for r in dy]} (x{growth_dy:.2f})",
    )


@pytest.mark.parametrize("direction", [45.0, 90.0])
def test_7_baseline_parity(criterion, direction):
    high = (25.0, 30.0, 35.0, 40.0)
    s = Scenario(snr_sweep_db=high, jitter_direction_deg=direction)
    jit = run_scenario(s).rmse_by_snr()
    base = run_scenario(s.replace(baseline=True)).rmse_by_snr()
    ratio = {k: jit[k] / base[k] for k in high}
    ok = all(abs(r - 1.0) <= 0.10 for r in ratio.values())
    criterion(f"7 baseline parity at {direction:g} deg", ok, "jittered/baseline " + fmt(ratio))


def test_8_determinism(criterion, tmp_path, capsys):
    scenario = tmp_path / "scenario.json"
    scenario.write_text(Scenario(node_count=30, trials_per_node=3).dumps())
    codes = [main(["simulate", "--scenario", str(scenario), "--out", str(tmp_path / d)]) for d in ("a", "b")]
    capsys.readouterr()
    same = filecmp.cmp(tmp_path / "a" / "results.csv", tmp_path / "b" / "results.csv", shallow=False)
    same_est = filecmp.cmp(tmp_path / "a" / "estimates.csv", tmp_path / "b" / "estimates.csv", shallow=False)
    ok = codes == [0, 0] and same and same_est
    criterion("8 byte-identical results.csv", ok, f"exit codes {codes}, results equal={same}, estimates equal={same_est}")
