"""Command-line front-end.

Every subcommand builds a record (JSON) and a table (CSV); ``--out`` writes
one of them atomically, and a short summary goes to stdout.  ``--config``
reads a JSON file with the keys ``command``, ``noise``, ``params``, ``seed``,
``out`` and ``format``; its values override the command line and unknown
keys are rejected.

Exit status: 0 on success, 1 when an acceptance check fails, 2 on a
configuration or input error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import acceptance, asymptotics as asy, chaos, io, simulate, variational
from .errors import ConfigurationError, WaveChaosError
from .kernels import NoiseSpec

DEFAULT_SEED = acceptance.DEFAULT_SEED
CONFIG_KEYS = {"command", "noise", "params", "seed", "out", "format"}
FAMILIES = ("delta0", "white", "riesz", "fractional", "hybrid")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(message)


def _floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def _add_noise(p, default="white"):
    g = p.add_argument_group("noise")
    g.add_argument("--family", choices=FAMILIES, default=default)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--alpha", type=_floats, default=None, help="scaling index, comma-separated per group")
    g.add_argument("--groups", type=_ints, default=None, help="group dimensions for hybrid noise")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="wavechaos", description="Chaos expansions, variational constants and moment asymptotics for the stochastic wave equation.")
    top.add_argument("--config", help="JSON run configuration (overrides flags)")
    top.add_argument("--seed", type=int, default=None, help=f"random seed (default {DEFAULT_SEED})")
    top.add_argument("--out", help="output file")
    top.add_argument("--format", choices=("csv", "json"), default=None)
    # the global flags are also accepted after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    sub = top.add_subparsers(dest="command", parser_class=_Parser)
    _orig = sub.add_parser
    sub.add_parser = lambda name, **kw: _orig(name, parents=[common], **kw)

    p = sub.add_parser("variational", help="solve for the variational constant M")
    _add_noise(p, "delta0")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--Theta", type=float, default=1.0, help="covariance multiplier")
    p.add_argument("--m", type=int, default=None, help="interior grid nodes per axis")
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--dump-grid", default=None, help="binary dump of the maximiser")

    p = sub.add_parser("chaos-norm", help="||sym f_n(., 0; t)||^2")
    _add_noise(p)
    p.add_argument("--n", type=_ints, default=[1], help="chaos orders, comma-separated")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--method", default="auto")
    p.add_argument("--samples", type=int, default=50_000)
    p.add_argument("--eps", type=float, default=0.0)

    p = sub.add_parser("tn", help="resolvent integral T_n")
    _add_noise(p)
    p.add_argument("--n", type=_ints, default=[1])
    p.add_argument("--samples", type=int, default=100_000)

    p = sub.add_parser("series", help="partial sums of the second-moment series")
    _add_noise(p)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--samples", type=int, default=50_000)
    p.add_argument("--M", type=float, default=None, help="variational constant for the d=3 warning")

    p = sub.add_parser("critical-time", help="critical times T_p and T_p' (d=3 white)")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--p", type=float, default=2.0)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--M", type=float, default=None)
    grp.add_argument("--M-bound", action="store_true", help="use the Sobolev bound 1/(2 pi^4)")

    p = sub.add_parser("asymptote", help="closed-form moment asymptotics")
    p.add_argument("--alpha", type=float, required=True, help="scaling index (d for white noise)")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--which", choices=("p_norm_rate", "p2_rate", "t_fixed", "p_fixed"), default="p2_rate")
    p.add_argument("--t", type=float, default=None)

    p = sub.add_parser("rate-fit", help="exponential rate of a coefficient sequence")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="CSV with columns n and value")
    src.add_argument("--values", type=_floats, help="R_1, R_2, ... comma-separated")
    p.add_argument("--window", type=_floats, default=None, help="n_min,n_max")
    p.add_argument("--log-correction", action="store_true")

    p = sub.add_parser("simulate", help="sample the truncated chaos series (d=1 white)")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--modes", type=int, default=48)
    p.add_argument("--replicates", type=int, default=100_000)
    p.add_argument("--moments", type=_floats, default=[2.0, 4.0])
    p.add_argument("--dump-samples", default=None)

    p = sub.add_parser("hypercontractivity", help="compare ||u_N(t)||_p with ||u_N(t_p)||_2")
    p.add_argument("--t", type=float, default=0.8)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--modes", type=int, default=48)
    p.add_argument("--replicates", type=int, default=100_000)

    p = sub.add_parser("reproduce", help="run the acceptance suite")
    p.add_argument("--section", default="all", help="criterion numbers or section names, comma-separated")
    return top


def _noise(args) -> NoiseSpec:
    fam = args.family
    alphas = args.alpha
    if fam in ("delta0", "white"):
        return NoiseSpec.white(args.d)
    if not alphas:
        raise ConfigurationError(f"family {fam} needs --alpha")
    if fam == "riesz":
        return NoiseSpec.riesz(args.d, alphas[0])
    if fam == "fractional":
        return NoiseSpec.fractional(alphas)
    if not args.groups:
        raise ConfigurationError("hybrid noise needs --groups")
    return NoiseSpec.hybrid(args.groups, alphas)


def _apply_config(parser, args):
    with open(args.config, encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigurationError("config must be a JSON object")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    command = cfg.get("command", args.command)
    if command is None:
        raise ConfigurationError("no command given")
    if args.command not in (None, command):
        raise ConfigurationError(f"config command {command!r} conflicts with {args.command!r}")
    # flags already parsed for the same subcommand are kept; the config overrides them
    merged = vars(args) if args.command == command else vars(parser.parse_args([command]))
    for k in ("seed", "out", "format"):
        if getattr(args, k) is not None:
            merged[k] = getattr(args, k)
    if "noise" in cfg:
        spec = NoiseSpec.from_config(cfg["noise"])
        merged["family"] = spec.family
        merged["d"] = spec.d
        merged["alpha"] = list(spec.alphas) or None
        merged["groups"] = list(spec.groups) or None
    for k, v in (cfg.get("params") or {}).items():
        key = k.replace("-", "_")
        if key not in merged or key in ("command", "config"):
            raise ConfigurationError(f"unknown parameter {k!r} for {command}")
        merged[key] = v
    for k in ("seed", "out", "format"):
        if k in cfg:
            merged[k] = cfg[k]
    merged["command"] = command
    merged["config"] = args.config
    return argparse.Namespace(**merged)


def _config_block(args) -> dict:
    skip = {"config", "out", "format", "dump_grid", "dump_samples"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# -- commands --------------------------------------------------------------------------

def cmd_variational(args):
    spec = _noise(args)
    res = variational.solve_M(spec, args.theta, args.Theta, m=args.m, extent=args.extent,
                              restarts=args.restarts, seed=args.seed)
    if args.dump_grid:
        io.dump_grid(args.dump_grid, res.maximizer, res.grid.extent)
    record = {
        "value": res.value,
        "gaussian_trial": variational.gaussian_trial(spec, args.theta, args.Theta)[0],
        "m": res.grid.m,
        "extent": res.grid.extent,
        "history": [[m, v] for m, v in res.history],
        "restarts": list(res.restarts),
        "converged": res.converged,
        "boundary_mass": res.boundary_mass,
    }
    rows = [[m, v] for m, v in res.history]
    return record, (("m", "value"), rows), f"M = {res.value:.10g}"


def cmd_chaos_norm(args):
    spec = _noise(args)
    ests = [chaos.chaos_norm(spec, n, args.t, args.method, args.samples, args.seed, args.eps) for n in args.n]
    rows = [e.as_dict() for e in ests]
    text = "\n".join(f"n={e.n}: {e.value:.10g} +- {e.stderr:.3g} ({e.method})" for e in ests)
    return {"estimates": rows}, (io.CHAOS_COLUMNS, rows), text


def cmd_tn(args):
    spec = _noise(args)
    ests = [chaos.t_n_estimate(spec, n, args.samples, args.seed) for n in args.n]
    rows = [e.as_dict() for e in ests]
    text = "\n".join(f"T_{e.n} = {e.value:.10g} +- {e.stderr:.3g}" for e in ests)
    return {"estimates": rows}, (io.CHAOS_COLUMNS, rows), text


def cmd_series(args):
    spec = _noise(args)
    res = chaos.second_moment_series(spec, args.theta, args.t, args.N, args.samples, args.seed, args.M)
    rows = [[n, res.terms[n], res.term_stderr[n], res.partial_sums[n]] for n in range(len(res.terms))]
    record = {"value": res.value, "stderr": res.stderr, "converged": res.converged,
              "terms": list(res.terms), "partial_sums": list(res.partial_sums)}
    return record, (("n", "term", "term_stderr", "partial_sum"), rows), \
        f"E u^2 ~ {res.value:.10g} +- {res.stderr:.3g} (converged: {res.converged})"


def cmd_critical_time(args):
    M = None if args.M_bound else args.M
    c = asy.critical_times(args.theta, args.p, M)
    record = {"T_p": c.T_p, "T_p_prime": c.T_p_prime, "sobolev_time": c.sobolev_time, "M": c.M,
              "chain_guaranteed": c.guaranteed, "T_p_ge_T_p_prime": c.holds}
    rows = [[k, v] for k, v in record.items()]
    text = f"T_p = {c.T_p:.10g}\nT_p' = {c.T_p_prime:.10g}"
    if not c.guaranteed:
        text += "\nM exceeds 1/(2 pi^4): the chain T_p >= T_p' is not guaranteed"
    return record, (("key", "value"), rows), text


def cmd_asymptote(args):
    spec = asy.AsymptoticSpec(args.alpha, args.theta, args.p, args.M)
    val = asy.asymptotic_constant(spec, args.which, args.t)
    record = {"which": args.which, "value": val, "beta": spec.beta}
    return record, (("key", "value"), [[k, v] for k, v in record.items()]), f"{args.which} = {val:.10g}"


def cmd_rate_fit(args):
    if args.input:
        rows = io.read_csv(args.input)
        n = [r["n"] for r in rows]
        R = [r["value"] for r in rows]
    else:
        R = args.values
        n = list(range(1, len(R) + 1))
    window = tuple(args.window) if args.window else None
    probe = asy.fit_rate(n, R, window, args.log_correction)
    record = {"rate": probe.rate, "rate_stderr": probe.rate_stderr, "radius": probe.radius,
              "window": list(probe.window), "power": probe.power}
    rows = [[k, v] for k, v in record.items() if not isinstance(v, list)]
    return record, (("key", "value"), rows), f"rate = {probe.rate:.10g}, radius = {probe.radius:.10g}"


def cmd_simulate(args):
    cfg = simulate.SimConfig(args.t, args.theta, args.N, args.modes, args.replicates, args.seed)
    run = simulate.sample_uN(cfg, moments=tuple(args.moments))
    if args.dump_samples:
        io.write_csv(args.dump_samples, ("u",), [[x] for x in run.samples])
    rows = [[p, run.moments[p], run.moment_stderr[p]] for p in args.moments]
    record = {"mean": run.mean, "mean_stderr": run.mean_stderr,
              "moments": {str(p): run.moments[p] for p in args.moments},
              "moment_stderr": {str(p): run.moment_stderr[p] for p in args.moments},
              "series_second_moment": run.series_second_moment}
    text = f"mean {run.mean:.6f} +- {run.mean_stderr:.2g}\n" + "\n".join(
        f"E|u|^{p:g} = {run.moments[p]:.6f} +- {run.moment_stderr[p]:.2g}" for p in args.moments)
    return record, (("p", "moment", "stderr"), rows), text


def cmd_hypercontractivity(args):
    cfg = simulate.SimConfig(args.t, args.theta, args.N, args.modes, args.replicates, args.seed)
    rep = simulate.hypercontractivity_check(cfg, args.p)
    record = {"p": rep.p, "t": rep.t, "t_p": rep.t_p, "lhs": rep.lhs, "lhs_stderr": rep.lhs_stderr,
              "rhs": rep.rhs, "rhs_stderr": rep.rhs_stderr, "rhs_series": rep.rhs_series,
              "holds": rep.holds, "note": rep.note}
    text = (f"||u_N({rep.t:g})||_{rep.p:g} = {rep.lhs:.6f} +- {rep.lhs_stderr:.2g}\n"
            f"||u_N({rep.t_p:.6g})||_2 = {rep.rhs:.6f} +- {rep.rhs_stderr:.2g} (series {rep.rhs_series:.6f})\n"
            f"holds: {rep.holds} [{rep.note}]")
    return record, (("key", "value"), [[k, v] for k, v in record.items()]), text


def cmd_reproduce(args):
    results = acceptance.run_criteria(args.section, args.seed, echo=print)
    rows = [[r.number, r.passed, r.detail] for r in results]
    record = {"results": [{"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
                          for r in results]}
    passed = sum(r.passed for r in results)
    return record, (("criterion", "passed", "detail"), rows), f"{passed}/{len(results)} criteria passed"


COMMANDS = {
    "variational": cmd_variational,
    "chaos-norm": cmd_chaos_norm,
    "tn": cmd_tn,
    "series": cmd_series,
    "critical-time": cmd_critical_time,
    "asymptote": cmd_asymptote,
    "rate-fit": cmd_rate_fit,
    "simulate": cmd_simulate,
    "hypercontractivity": cmd_hypercontractivity,
    "reproduce": cmd_reproduce,
}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = _apply_config(parser, args)
        if args.command is None:
            raise ConfigurationError("no command given")
        if args.seed is None:
            args.seed = DEFAULT_SEED
        fmt = args.format or "json"
        record, (columns, rows), text = COMMANDS[args.command](args)
    except (WaveChaosError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    config = _config_block(args)
    record = {"command": args.command, "config": config, "config_hash": io.config_hash(config), **record}
    print(text)
    if args.out:
        if fmt == "csv":
            io.write_csv(args.out, columns, rows)
        else:
            io.write_record(args.out, record)
    if args.command == "reproduce" and not all(r["passed"] for r in record["results"]):
        return 1
    return 0


def main():
    sys.exit(run())
