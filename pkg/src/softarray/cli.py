"""Command-line interface.

Exit status: 0 on success, 1 on usage or configuration errors, 2 on
runtime failures.
"""

import argparse
import csv
import logging
import sys
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path

import numpy as np

from .channel import assemble_channel, draw_paths
from .config import ExperimentConfig, load_config
from .exceptions import ConfigError
from .geometry import DeformationState, element_positions
from .harness import emit_csv, realization_seed, run_sweep
from .sca import run_sca, run_sca_multistart

log = logging.getLogger("softarray")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _state_from_args(a_values, v_values, consts):
    m = consts.num_tentacles

    def expand(vals, name):
        vals = [0.0] if vals is None else vals
        if len(vals) == 1:
            return np.full(m, vals[0])
        if len(vals) != m:
            raise ConfigError(f"--{name} needs 1 or {m} values, got {len(vals)}")
        return np.array(vals)

    state = DeformationState(expand(a_values, "A"), expand(v_values, "v"))
    problems = state.violations(consts)
    if problems:
        raise ConfigError("; ".join(problems))
    return state


def _config_or_default(path):
    return load_config(path) if path else ExperimentConfig()


def cmd_validate(args):
    cfg = load_config(args.config)
    print(f"{args.config}: ok ({len(cfg.sweep_values)} sweep point(s), "
          f"{cfg.realizations} realisation(s), architectures {', '.join(cfg.architectures)})")
    return 0


def cmd_run(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        if not 0 <= args.seed < 2**63:
            raise ConfigError("--seed must lie in [0, 2**63)")
        cfg = replace(cfg, seed=args.seed)
    out_dir = Path(args.out if args.out else cfg.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_sweep(cfg)
    path = out_dir / "sweep.csv"
    emit_csv(result, path)
    for value, r, seed in result.failed_draws:
        log.warning("failed draw: sweep value %s realisation %d seed %d", value, r, seed)
    print(f"wrote {path} ({len(result.rows)} rows)", file=sys.stderr)
    return 0


def cmd_trace(args):
    cfg = load_config(args.config)
    value = cfg.sweep_values[0] if args.value is None else args.value
    consts, channel, p_max = cfg.point(value)
    channel = replace(channel, seed=realization_seed(cfg.seed, args.realization))
    paths = draw_paths(channel)
    if cfg.sca_starts > 1:
        _, trace = run_sca_multistart(paths, consts, channel, p_max, cfg.noise_var, cfg.sca,
                                      starts=cfg.sca_starts, seed=channel.seed)
    else:
        _, trace = run_sca(paths, consts, channel, p_max, cfg.noise_var, cfg.sca)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "rate", "predicted_rate", "gradient_norm", "step_norm",
                    "trust_amplitude", "trust_freq", "accepted"])
        for s in trace.steps:
            w.writerow([s.iteration, f"{s.rate:.10g}", f"{s.predicted:.10g}",
                        f"{s.grad_norm:.6g}", f"{s.step_norm:.6g}", f"{s.trust[0]:.6g}",
                        f"{s.trust[1]:.6g}", int(s.accepted)])
    print(f"final rate {trace.final_rate:.6f} (zero deformation {trace.zero_rate:.6f}), "
          f"stopped: {trace.stop_reason}", file=sys.stderr)
    return 0


def cmd_geometry(args):
    consts = _config_or_default(args.config).array
    if args.phase is not None:
        consts = replace(consts, phase=args.phase)
    layout = element_positions(_state_from_args(args.A, args.v, consts), consts)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "n", "x", "y", "z"])
        for m, n, x, y, z in layout.csv_rows(consts.elements_per_tentacle):
            w.writerow([m, n, f"{x:.12g}", f"{y:.12g}", f"{z:.12g}"])
    return 0


def cmd_channel(args):
    cfg = _config_or_default(args.config)
    value = cfg.sweep_values[0] if args.value is None else args.value
    consts, channel, _ = cfg.point(value)
    channel = replace(channel, seed=realization_seed(cfg.seed, args.realization))
    layout = element_positions(_state_from_args(args.A, args.v, consts), consts)
    H = assemble_channel(layout, draw_paths(channel), channel).H
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "element", "re", "im"])
        for k in range(H.shape[0]):
            for j in range(H.shape[1]):
                w.writerow([k + 1, j + 1, f"{H[k, j].real:.12g}", f"{H[k, j].imag:.12g}"])
    return 0


def build_parser():
    p = _Parser(prog="softarray", description="Deformable tentacle antenna array simulator")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("run", help="run a Monte-Carlo sweep and write <out>/sweep.csv")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="output directory (default: the config's 'output')")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("trace", help="dump the SCA trace of one realisation as CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--realization", type=int, required=True)
    s.add_argument("--value", type=float, help="sweep value (default: the first one)")
    s.add_argument("--out", help="output file (default: stdout)")
    s.set_defaults(func=cmd_trace)

    s = sub.add_parser("geometry", help="dump element positions as CSV")
    s.add_argument("--A", type=float, nargs="+", help="amplitude(s), one or M values")
    s.add_argument("--v", type=float, nargs="+", help="spatial frequency(ies), one or M values")
    s.add_argument("--config", help="take array constants from this experiment file")
    s.add_argument("--phase", type=float)
    s.add_argument("--out", help="output file (default: stdout)")
    s.set_defaults(func=cmd_geometry)

    s = sub.add_parser("channel", help="dump the channel matrix of one realisation as CSV")
    s.add_argument("--config")
    s.add_argument("--realization", type=int, default=0)
    s.add_argument("--value", type=float)
    s.add_argument("--A", type=float, nargs="+")
    s.add_argument("--v", type=float, nargs="+")
    s.add_argument("--out")
    s.set_defaults(func=cmd_channel)

    s = sub.add_parser("validate", help="check an experiment file and exit")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                         format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
