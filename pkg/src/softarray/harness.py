"""Seeded Monte-Carlo sweeps over SNR, user count or element directivity.

Realisation ``r`` of every sweep point draws its paths with seed
``base_seed XOR r``, and every requested architecture is evaluated on that
same path set.  If the ZF precoder hits a singular channel, the realisation
is redrawn once with seed ``(base_seed XOR r) XOR 2**63``; if that fails too
it is dropped.  Both events are logged and counted in the ``failures``
column.

Realisations run in a process pool when more than one worker is requested
(``SOFTARRAY_WORKERS`` overrides the configured count); results are merged in
realisation order, so the output does not depend on scheduling.
"""

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import fixed_ccaa_rate, optimize_2d_ccaa, optimize_3d_ccaa
from .channel import draw_paths
from .exceptions import RankDeficientChannelError
from .sca import run_sca, run_sca_multistart

log = logging.getLogger(__name__)

WORKERS_ENV = "SOFTARRAY_WORKERS"
RESAMPLE_BIT = 1 << 63
CSV_COLUMNS = ("architecture", "sweep_axis", "sweep_value", "mean_rate", "std_rate", "n",
               "failures")


@dataclass(frozen=True)
class SweepRow:
    architecture: str
    sweep_axis: str
    sweep_value: float
    mean_rate: float
    std_rate: float
    n: int
    failures: int


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    # (architecture, sweep value) -> per-realisation sum rates, realisation order
    samples: dict = field(default_factory=dict)
    # (sweep value, realisation, seed) of every failed draw
    failed_draws: list = field(default_factory=list)

    def row(self, architecture, value):
        for r in self.rows:
            if r.architecture == architecture and r.sweep_value == value:
                return r
        raise KeyError((architecture, value))


@dataclass(frozen=True)
class RealizationOutcome:
    realization: int
    seed: int
    rates: dict  # None when both draws failed
    failed_seeds: tuple


def realization_seed(base_seed, realization):
    return (base_seed ^ realization) & (2**64 - 1)


def evaluate_architectures(paths, consts, channel, p_max, config):
    """Sum rate of every requested architecture on one path set."""
    rates = {}
    archs = config.architectures
    nv = config.noise_var
    if "fixed" in archs:
        rates["fixed"] = fixed_ccaa_rate(paths, consts, channel, p_max, nv).sum_rate
    if "sra" in archs:
        if config.sca_starts > 1:
            _, trace = run_sca_multistart(paths, consts, channel, p_max, nv, config.sca,
                                          starts=config.sca_starts, seed=channel.seed)
        else:
            _, trace = run_sca(paths, consts, channel, p_max, nv, config.sca)
        rates["sra"] = trace.final_rate
    if "ccaa2d" in archs or "ccaa3d" in archs:
        res2 = optimize_2d_ccaa(paths, consts, channel, p_max, nv, config.baseline)
        if "ccaa2d" in archs:
            rates["ccaa2d"] = res2.report.sum_rate
        if "ccaa3d" in archs:
            res3 = optimize_3d_ccaa(paths, consts, channel, p_max, nv, config.baseline,
                                    init=res2.offsets)
            rates["ccaa3d"] = res3.report.sum_rate
    return rates


def run_realization(config, value, realization):
    consts, channel, p_max = config.point(value)
    seed = realization_seed(config.seed, realization)
    failed = []
    for s in (seed, seed ^ RESAMPLE_BIT):
        ch = replace(channel, seed=s)
        try:
            rates = evaluate_architectures(draw_paths(ch), consts, ch, p_max, config)
        except RankDeficientChannelError as exc:
            log.warning("sweep value %s realisation %d seed %d: %s", value, realization, s, exc)
            failed.append(s)
            continue
        return RealizationOutcome(realization, s, rates, tuple(failed))
    return RealizationOutcome(realization, seed, None, tuple(failed))


def _job(args):
    return run_realization(*args)


def worker_count(config):
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return config.workers


def _sample_std(x):
    return float(np.std(x, ddof=1)) if len(x) > 1 else float("nan")


def run_sweep(config, workers=None):
    """Run every sweep point and aggregate per-architecture statistics."""
    workers = worker_count(config) if workers is None else workers
    jobs = [(config, v, r) for v in config.sweep_values for r in range(config.realizations)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(jobs) // (8 * workers))
            outcomes = list(pool.map(_job, jobs, chunksize=chunk))
    else:
        outcomes = [_job(j) for j in jobs]

    result = SweepResult()
    per_value = config.realizations
    for i, value in enumerate(config.sweep_values):
        batch = outcomes[i * per_value:(i + 1) * per_value]
        failures = sum(1 for o in batch if o.failed_seeds)
        for o in batch:
            for s in o.failed_seeds:
                result.failed_draws.append((value, o.realization, s))
        ok = [o for o in batch if o.rates is not None]
        for arch in config.architectures:
            x = np.array([o.rates[arch] for o in ok])
            result.samples[(arch, value)] = x
            mean = float(np.mean(x)) if x.size else float("nan")
            result.rows.append(
                SweepRow(arch, config.sweep_axis, value, mean, _sample_std(x), int(x.size),
                         failures)
            )
    return result


def _fmt(x):
    return format(x, ".6g")


def emit_csv(result, path):
    """Write one row per (architecture, sweep value); floats to 6 significant digits."""
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for r in result.rows:
                w.writerow([r.architecture, r.sweep_axis, _fmt(r.sweep_value),
                            _fmt(r.mean_rate), _fmt(r.std_rate), r.n, r.failures])
    except OSError as exc:
        raise OSError(f"cannot write sweep results to {path}: {exc}") from exc


def read_csv(path):
    """Parse a file written by :func:`emit_csv` back into a :class:`SweepResult`."""
    result = SweepResult()
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            result.rows.append(SweepRow(
                rec["architecture"], rec["sweep_axis"], float(rec["sweep_value"]),
                float(rec["mean_rate"]), float(rec["std_rate"]), int(rec["n"]),
                int(rec["failures"]),
            ))
    return result


def paired_gain(result, architecture, reference, value):
    """Relative gain of ``mean(architecture)`` over ``mean(reference)``."""
    a = result.row(architecture, value).mean_rate
    b = result.row(reference, value).mean_rate
    return a / b - 1.0 if b and not math.isnan(b) else float("nan")
