"""
Monte-Carlo localization runs.

Random streams are derived from the scenario seed with
:class:`numpy.random.SeedSequence` spawn keys:

* ``(0,)`` places the nodes;
* ``(1, node, trial)`` drives one trial (dynamic legs, then every pulse).

The trial stream does not depend on the SNR, the jitter table or the
baseline flag, so a sweep reuses the same draws at every SNR and a baseline
run is paired draw-for-draw with its jittered twin. Loops run in a fixed
order and the output is reproducible for a given scenario.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, OptolocError
from .geometry import Measurement, Position3D
from .localization import MotionLog, localize_dynamic, multilaterate_static
from .scenario import DYNAMIC, Scenario
from .source_link import LocalizationMessage, estimate_range, transmit

RESULTS_HEADER = ("snr_db", "rmse_m", "mean_iterations", "failure_count")
ESTIMATES_HEADER = (
    "snr_db", "node", "trial",
    "true_x", "true_y", "true_z",
    "est_x", "est_y", "est_z",
    "distances_m", "failure",
)


@dataclass(frozen=True)
class SnrRow:
    snr_db: float
    rmse_m: float
    mean_iterations: float
    failure_count: int


@dataclass(frozen=True)
class NodeRecord:
    snr_db: float
    node: int
    trial: int
    true_position: Position3D
    estimate: Position3D | None
    distances_m: tuple
    failure: str = ""


@dataclass
class RunResult:
    rows: list = field(default_factory=list)
    records: list = field(default_factory=list)

    def row_for(self, snr_db):
        for row in self.rows:
            if row.snr_db == snr_db:
                return row
        raise KeyError(snr_db)

    def rmse_by_snr(self):
        return {row.snr_db: row.rmse_m for row in self.rows}


def _trial_rng(seed, node, trial):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1, node, trial)))


def generate_nodes(scenario, rng=None):
    """Uniform node positions inside the scenario box (depths negative)."""
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(scenario.seed, spawn_key=(0,)))
    b = scenario.bounds
    if any(not s >= 0 for s in b.size):
        raise DomainError(f"empty deployment box: size={b.size}")
    u = rng.random((scenario.node_count, 3))
    pts = np.empty_like(u)
    pts[:, 0] = b.origin.x + u[:, 0] * b.size[0]
    pts[:, 1] = b.origin.y + u[:, 1] * b.size[1]
    pts[:, 2] = b.origin.z - u[:, 2] * b.size[2]
    return [Position3D(*map(float, p)) for p in pts]


def rmse(true_positions, estimates):
    """Root-mean-square 3-D position error."""
    t = np.array([tuple(p) for p in true_positions], dtype=float)
    e = np.array([tuple(p) for p in estimates], dtype=float)
    if len(t) == 0 or t.shape != e.shape:
        raise DomainError(
            f"rmse needs equal non-empty position lists, got {len(t)} and {len(e)}"
        )
    return math.sqrt(float(np.sum((t - e) ** 2)) / len(t))


def _receive(scenario, source, plasma, receiver, snr_db, rng):
    msg = LocalizationMessage(scenario.control_bit_count, source.base_sl_db, plasma)
    received = transmit(
        msg, source, receiver, scenario.env, scenario.freq_khz, snr_db, rng,
        direction_deg=scenario.jitter_direction_deg,
    )
    est = estimate_range(received, scenario.env, scenario.freq_khz)
    return Measurement(received.source_coords, est.distance_m), est.iterations_used


def _static_trial(scenario, source, node, snr_db, rng):
    measurements, iterations = [], []
    for plasma in scenario.source_positions:
        m, it = _receive(scenario, source, plasma, node, snr_db, rng)
        measurements.append(m)
        iterations.append(it)
    fix = multilaterate_static(measurements, node.z)
    return node, fix.position(), measurements, iterations


def _dynamic_trial(scenario, source, node, snr_db, rng):
    lo, hi = scenario.dynamic_leg_range_m
    d_ab, d_bc = rng.uniform(lo, hi, size=2)
    motion = MotionLog(float(d_ab), float(d_bc))
    a = node
    b = Position3D(a.x + motion.d_ab_m, a.y, a.z)
    c = Position3D(b.x, b.y + motion.d_bc_m, a.z)
    plasma = scenario.source_positions[0]
    measurements, iterations = [], []
    for p in (a, b, c):
        m, it = _receive(scenario, source, plasma, p, snr_db, rng)
        measurements.append(m)
        iterations.append(it)
    est = localize_dynamic(*measurements, motion, a.z)
    return c, est, measurements, iterations


def run_scenario(scenario: Scenario) -> RunResult:
    """Simulate every (SNR, node, trial) combination and tabulate RMSE per SNR.

    Trials whose receive or solve step raises are counted in
    ``failure_count`` and left out of the RMSE.
    """
    scenario.validate()
    source = scenario.effective_source
    nodes = generate_nodes(scenario)
    trial = _dynamic_trial if scenario.mode == DYNAMIC else _static_trial
    result = RunResult()

    for snr in scenario.snr_sweep_db:
        truths, estimates, iterations, failures = [], [], [], 0
        for i, node in enumerate(nodes):
            for k in range(scenario.trials_per_node):
                rng = _trial_rng(scenario.seed, i, k)
                try:
                    truth, est, ms, its = trial(scenario, source, node, snr, rng)
                except OptolocError as exc:
                    failures += 1
                    result.records.append(
                        NodeRecord(snr, i, k, node, None, (), f"{type(exc).__name__}: {exc}")
                    )
                    continue
                truths.append(truth)
                estimates.append(est)
                iterations.extend(its)
                result.records.append(
                    NodeRecord(snr, i, k, truth, est, tuple(m.distance_m for m in ms))
                )
        err = rmse(truths, estimates) if truths else math.nan
        mean_it = float(np.mean(iterations)) if iterations else math.nan
        result.rows.append(SnrRow(snr, err, mean_it, failures))
    return result


def scale_scenario(scenario, factor):
    """Scale the deployment box and the plasma footprint horizontally by ``factor``.

    Plasma x-y offsets from the box origin are scaled; plasma depth is kept.
    """
    if not factor > 0:
        raise DomainError(f"scale factor must be > 0, got {factor}")
    o = scenario.bounds.origin
    sources = tuple(
        Position3D(o.x + (p.x - o.x) * factor, o.y + (p.y - o.y) * factor, p.z)
        for p in scenario.source_positions
    )
    return scenario.replace(bounds=scenario.bounds.scaled(factor), source_positions=sources)


def sweep_area(scenario, scale_factors, snr_db=30.0):
    """RMSE at ``snr_db`` for each area scale factor."""
    out = []
    for factor in scale_factors:
        scaled = scale_scenario(scenario, factor).replace(snr_sweep_db=(float(snr_db),))
        out.append((factor, run_scenario(scaled).rows[0].rmse_m))
    return out


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def write_results_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULTS_HEADER)
        for r in rows:
            w.writerow([_fmt(r.snr_db), _fmt(r.rmse_m), _fmt(r.mean_iterations), r.failure_count])


def read_results_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RESULTS_HEADER:
            raise ValueError(f"unexpected results header {header}")
        return [SnrRow(float(a), float(b), float(c), int(d)) for a, b, c, d in reader]


def write_estimates_csv(records, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ESTIMATES_HEADER)
        for r in records:
            est = tuple(r.estimate) if r.estimate is not None else (None, None, None)
            w.writerow(
                [_fmt(r.snr_db), r.node, r.trial]
                + [_fmt(v) for v in r.true_position]
                + [_fmt(v) for v in est]
                + [";".join(_fmt(d) for d in r.distances_m), r.failure]
            )


def plot_rmse(rows, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "optoloc"

    fig, ax = plt.subplots(figsize=(5, 3.5))
    snr = [r.snr_db for r in rows]
    ax.semilogy(snr, [r.rmse_m for r in rows], marker="o")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("RMSE (m)")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    # Fixed metadata keeps the SVG stable across runs.
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_results(result, out_path, plot=False):
    """Write ``results.csv`` and ``estimates.csv`` (and optionally an SVG) into ``out_path``.

    Returns the list of written file paths.
    """
    try:
        os.makedirs(out_path, exist_ok=True)
        written = [os.path.join(out_path, "results.csv"), os.path.join(out_path, "estimates.csv")]
        write_results_csv(result.rows, written[0])
        write_estimates_csv(result.records, written[1])
        if plot:
            svg = os.path.join(out_path, "rmse_vs_snr.svg")
            plot_rmse(result.rows, svg)
            written.append(svg)
    except OSError as exc:
        raise OSError(f"cannot write results to {out_path}: {exc}") from exc
    return written
