"""Command-line interface.

Exit codes: 0 success, 1 bad input or usage, 2 assertion failure (a proven
bound or selftest check failed), 3 resource guard tripped.
"""

import argparse
import json
import os
import sys

from . import centrality, continuum, density, geometry, harness
from .errors import InputError, ResourceError


class _Parser(argparse.ArgumentParser):
    # argparse exits on its own; route everything through InputError so the
    # exit-code contract holds for unknown flags and missing values too
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _resolve_threads(args) -> int:
    t = getattr(args, "threads", None)
    if t is None:
        env = os.environ.get("DEPTHCORE_THREADS")
        if env is None:
            return 1
        try:
            t = int(env)
        except ValueError:
            raise InputError("DEPTHCORE_THREADS must be a positive integer, got %r" % env)
    if t < 1:
        raise InputError("--threads must be >= 1")
    # every kernel is deterministic and single-threaded; the setting is
    # accepted (and output is identical) at any value
    return t


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise InputError("%s is not valid JSON: %s" % (path, exc))


def _density_model(args):
    preset = getattr(args, "preset", None)
    config = getattr(args, "config", None)
    if preset and config:
        raise InputError("pass either --preset or --config, not both")
    if preset:
        return density.preset(preset)
    if config:
        return density.parse_density_config(_load_json(config))
    raise InputError("missing density: pass --preset <name> or --config <path>")


def _cloud_and_r(args):
    cloud = geometry.load_cloud_csv(args.cloud)
    r = float(args.r)
    if not r > 0:
        raise InputError("--r must be positive")
    return cloud, r


# ---------------------------------------------------------------------------
# subcommands


def _cmd_sample(args) -> int:
    model = _density_model(args)
    cloud = density.sample(model, args.n, args.seed)
    geometry.save_cloud_csv(cloud, args.out)
    print("wrote %s (%d points, d=%d)" % (args.out, cloud.n, cloud.dim))
    return 0


def _cmd_graph(args) -> int:
    cloud, r = _cloud_and_r(args)
    graph = geometry.build_graph(cloud, r, edge_cap=args.edge_cap)
    geometry.save_edges_csv(graph, args.out)
    print("wrote %s (%d vertices, %d edges)" % (args.out, graph.n, graph.n_edges))
    return 0


def _cmd_centrality(args) -> int:
    cloud, r = _cloud_and_r(args)
    graph = geometry.build_graph(cloud, r, edge_cap=args.edge_cap)
    kind, k = centrality.parse_measure(args.measure)
    if kind == "degree":
        scores = centrality.degree_scores(graph)
    elif kind == "coreness":
        scores = centrality.coreness_bucket(graph)
    else:
        scores = centrality.iterated_h(graph, k)
    norm = geometry.normalization(cloud.n, r, cloud.dim)
    centrality.save_scores_csv(scores, args.out, normalized=args.normalized, norm=norm)
    print("wrote %s (%s, %d vertices)" % (args.out, scores.measure, scores.n_vertices))
    return 0


def _parse_r_sequence(text) -> tuple:
    try:
        seq = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise InputError("--r-sequence must be a comma-separated float list")
    if not seq:
        raise InputError("--r-sequence is empty")
    return seq


def _cmd_continuum(args) -> int:
    model = _density_model(args)
    if args.field == "C0" and args.r_sequence is None:
        raise InputError("--field C0 needs --r-sequence (decreasing radii)")
    radii = []
    if args.r is not None:
        radii.append(float(args.r))
    if args.r_sequence is not None:
        radii.extend(_parse_r_sequence(args.r_sequence))
    if args.h is not None:
        h = float(args.h)
    elif radii:
        h = min(radii) / (50.0 if model.dim == 1 else 10.0)
    else:
        raise InputError("pass --h (no radius given to derive a default spacing)")
    pad = (max(radii) if radii else 0.0) + 2.0 * h
    if args.field == "C0" and args.r_sequence is not None:
        # the C0 error estimate averages over 2 r_min as well
        pad = max(pad, 2.0 * min(_parse_r_sequence(args.r_sequence)) + 2.0 * h)
    grid = harness._grid_for(model, pad, h)
    f = continuum.discretize_density(model, grid)

    which = args.field
    if which == "f":
        out_field = f
    elif which == "f_r":
        if args.r is None:
            raise InputError("--field f_r needs --r")
        out_field = continuum.ball_average(f, float(args.r))
    elif which == "h_k":
        if args.r is None or args.k is None:
            raise InputError("--field h_k needs --r and --k")
        out_field = continuum.iterate_h(f, float(args.r), int(args.k))
    elif which == "C_r":
        if args.r is None:
            raise InputError("--field C_r needs --r")
        out_field, _ = continuum.continuum_r_coreness(f, float(args.r))
    else:  # C0
        if args.r_sequence is None:
            raise InputError("--field C0 needs --r-sequence (decreasing radii)")
        est, err = continuum.continuum_coreness_extrapolate(
            model, grid, _parse_r_sequence(args.r_sequence))
        continuum.save_field_csv(err, args.out + ".err.csv")
        out_field = est
    continuum.save_field_csv(out_field, args.out)
    print("wrote %s (%s, %d nodes)" % (args.out, out_field.tag, out_field.values.size))
    return 0


def _cmd_experiment(args) -> int:
    if args.config is None:
        raise InputError("missing --config: pass a JSON path, 'default', or 'default-2d'")
    if args.out is None:
        raise InputError("missing --out: pass a CSV output path")
    if args.config in ("default", "default-2d"):
        preset = "fig2d-crater" if args.config == "default-2d" else "fig1d-mixture6"
        cfg = harness.default_config(args.kind, preset)
    else:
        cfg = harness.load_experiment_config_file(args.config)
    if args.seed is not None:
        cfg = harness.ExperimentConfig(
            density=cfg.density, n_values=cfg.n_values, r_rule=cfg.r_rule,
            k_values=cfg.k_values, repetitions=cfg.repetitions,
            seed_base=args.seed, regime=cfg.regime, grid_h=cfg.grid_h,
            c0_r_sequence=cfg.c0_r_sequence, edge_cap=cfg.edge_cap,
            name=cfg.name)
    if args.kind == "rate":
        records, pearson, slope = harness.run_rate_sweep(
            cfg, args.out, allow_long=args.allow_long)
        print("wrote %s (%d runs, pearson=%.3f, slope=%.3f)"
              % (args.out, len(records), pearson, slope))
    elif args.kind == "kmax":
        rows, violations = harness.run_kmax_sweep(
            cfg, args.out, allow_long=args.allow_long)
        print("wrote %s (%d runs, %d conjecture violations)"
              % (args.out, len(rows), len(violations)))
    else:
        records = harness.run_convergence(cfg, args.out, allow_long=args.allow_long)
        print("wrote %s (%d runs)" % (args.out, len(records)))
    return 0


def _cmd_selftest(args) -> int:
    return harness.run_selftest()


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: DEPTHCORE_THREADS or 1); "
                             "output is identical at any value")
    common.add_argument("--format", choices=("csv",), default="csv",
                        help="output format (csv)")

    top = _Parser(prog="depthcore",
                  description="data depth via neighborhood-graph centrality")
    sub = top.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("sample", parents=[common],
                       help="draw an i.i.d. sample from a density model")
    p.add_argument("--preset", help="built-in density (%s)" % ", ".join(density.PRESET_NAMES))
    p.add_argument("--config", help="JSON density config")
    p.add_argument("--n", type=int, required=True, help="sample size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="cloud CSV path")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("graph", parents=[common],
                       help="build the r-neighborhood graph of a cloud")
    p.add_argument("--cloud", required=True, help="cloud CSV path")
    p.add_argument("--r", type=float, required=True, help="neighborhood radius")
    p.add_argument("--edge-cap", type=int, default=geometry.DEFAULT_EDGE_CAP)
    p.add_argument("--out", required=True, help="edge CSV path")
    p.set_defaults(func=_cmd_graph)

    p = sub.add_parser("centrality", parents=[common],
                       help="vertex scores: degree, h_iterate(k), coreness")
    p.add_argument("--cloud", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--measure", default="coreness",
                   help="degree | h_iterate(k) | coreness")
    p.add_argument("--normalized", action="store_true",
                   help="divide scores by n * omega * r^d")
    p.add_argument("--edge-cap", type=int, default=geometry.DEFAULT_EDGE_CAP)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_centrality)

    p = sub.add_parser("continuum", parents=[common],
                       help="continuum fields on a grid (d <= 2)")
    p.add_argument("--preset", help="built-in density")
    p.add_argument("--config", help="JSON density config")
    p.add_argument("--field", required=True, choices=("f", "f_r", "h_k", "C_r", "C0"))
    p.add_argument("--r", type=float, help="radius for f_r, h_k, C_r")
    p.add_argument("--k", type=int, help="iterate count for h_k")
    p.add_argument("--r-sequence", help="decreasing radii for C0, e.g. 0.2,0.1,0.05")
    p.add_argument("--h", type=float, help="grid spacing (default r/50 in d=1, r/10 in d=2)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_continuum)

    p = sub.add_parser("experiment", parents=[common],
                       help="convergence, rate, and k-max sweeps")
    p.add_argument("kind", choices=("rate", "kmax", "converge"))
    p.add_argument("--config", help="JSON config path, 'default', or 'default-2d'")
    p.add_argument("--out", help="records CSV path")
    p.add_argument("--seed", type=int, default=None, help="override the seed base")
    p.add_argument("--allow-long", action="store_true",
                   help="run even when the cost estimate exceeds the budget")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("selftest", parents=[common],
                       help="run the built-in example checks")
    p.set_defaults(func=_cmd_selftest)
    return top


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.print_usage(sys.stderr)
            print("error: missing command", file=sys.stderr)
            return 1
        _resolve_threads(args)
        return args.func(args)
    except SystemExit as exc:  # argparse --help path
        return 0 if exc.code in (None, 0) else 1
    except (InputError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except AssertionError as exc:  # includes BoundViolationError
        print("assertion failure: %s" % exc, file=sys.stderr)
        return 2
    except ResourceError as exc:
        print("resource guard: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
