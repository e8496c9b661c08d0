"""Command-line front end.

Data goes to stdout (JSON, CSV or the matrix text format); diagnostics and
errors go to stderr.  Exit codes: 0 success, 1 usage error, 2 domain or
capacity error (including a failing density self-test).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import math
import sys
from typing import Callable, Dict, List, Optional, Sequence

from . import __version__, asymptotics as asy
from ._backend import BACKEND
from .csmatrix import (design_min_n, exact_rip_constant, predicted_delta,
                       sample_sensing_matrix, sampled_rip_lower_bound)
from .densities import gamma_constants, log_multivariate_gamma, selftest_table
from .ensembles import EnsembleSpec, sample
from .errors import CapacityError, DomainError, InputError
from .linalg import format_matrix, read_matrix
from .minors import STRATEGIES, max_minor_lambda1, min_minor_lambdam
from .montecarlo import ExperimentConfig, closed_form_cdf_m1, run_extreme_experiment
from .rng import GENERATOR, RngStream

log = logging.getLogger("rmtminors")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _u64(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


# -- sample / extreme ---------------------------------------------------------

def _spec(args) -> EnsembleSpec:
    if args.ensemble == "wishart":
        if args.n is None:
            raise UsageError("--n is required for --ensemble wishart")
        return EnsembleSpec.wishart(args.n, args.p)
    return EnsembleSpec.wigner(args.p, args.eta)


def _add_ensemble_flags(sp, need_p=True):
    sp.add_argument("--ensemble", choices=("wishart", "wigner"), default="wigner")
    sp.add_argument("--n", type=int, help="Wishart degrees of freedom")
    sp.add_argument("--p", type=int, required=need_p, help="matrix dimension")
    sp.add_argument("--eta", type=float, default=2.0, help="Wigner diagonal variance")


def cmd_sample(args, out):
    spec = _spec(args)
    A = sample(spec, RngStream(args.seed))
    text = format_matrix(A)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def cmd_extreme(args, out):
    if args.input:
        A = read_matrix(args.input)
        config = {"input": args.input}
    else:
        if args.p is None:
            raise UsageError("--p (or --input) is required")
        spec = _spec(args)
        A = sample(spec, RngStream(args.seed))
        config = {"ensemble": spec.kind, "n": spec.n, "p": spec.p,
                  "eta": spec.eta if spec.kind == "wigner" else None, "seed": args.seed}
    config.update({"m": args.m, "mode": args.mode, "strategy": args.strategy})
    fn = max_minor_lambda1 if args.mode == "max" else min_minor_lambdam
    res = fn(A, args.m, args.strategy)
    payload = {"config": config, "generator": GENERATOR}
    payload.update(res.to_dict())
    out.write(_dumps(payload))
    return 0


# -- mc -----------------------------------------------------------------------

_MC_KEYS = {"ensemble", "m", "grid", "n", "p", "reps", "seed", "strategy", "eta",
            "alpha", "delta", "t", "kappa"}


def parse_config_text(text: str) -> Dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _MC_KEYS:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        if key in out:
            raise UsageError(f"config line {lineno}: duplicate key {key!r}")
        out[key] = val
    return out


def _list(val, conv):
    return [conv(v) for v in val.replace(",", " ").split()]


def config_from_mapping(kv: Dict[str, str], seed: Optional[int] = None) -> ExperimentConfig:
    try:
        ensemble = kv.get("ensemble", "wigner")
        if "grid" in kv:
            if "n" in kv or "p" in kv:
                raise UsageError("use either grid or n/p, not both")
            grid = []
            for item in kv["grid"].replace(",", " ").split():
                if ":" in item:
                    n, p = item.split(":")
                    grid.append((int(n), int(p)))
                else:
                    grid.append((None, int(item)))
        else:
            if "p" not in kv:
                raise UsageError("config needs grid or p")
            ps = _list(kv["p"], int)
            ns = _list(kv["n"], int) if "n" in kv else [None]
            if len(ns) == 1:
                ns = ns * len(ps)
            if len(ns) != len(ps):
                raise UsageError("n must be a single value or match p in length")
            grid = list(zip(ns, ps))
        kw = {}
        if "alpha" in kv:
            kw["alpha_list"] = _list(kv["alpha"], float)
        if "delta" in kv:
            kw["delta_list"] = _list(kv["delta"], float)
        if "t" in kv:
            kw["t_list"] = _list(kv["t"], float)
        if "kappa" in kv:
            kw["kappa"] = float(kv["kappa"])
        if "eta" in kv:
            kw["eta"] = float(kv["eta"])
        if "strategy" in kv:
            kw["strategy"] = kv["strategy"]
        if seed is None:
            seed = int(kv.get("seed", "0"), 0)
        return ExperimentConfig(ensemble=ensemble, m=int(kv.get("m", "2")), grid=tuple(grid),
                                reps=int(kv.get("reps", "100")), seed=seed, **kw)
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise UsageError(f"bad config value: {exc}")


def cmd_mc(args, out):
    with open(args.config) as fh:
        kv = parse_config_text(fh.read())
    cfg = config_from_mapping(kv, args.seed)
    log.info("mc: %d cells x %d reps, workers=%d", len(cfg.grid), cfg.reps, args.workers)
    rep = run_extreme_experiment(cfg, workers=args.workers)
    log.info("mc: done in %.2fs", rep.wall_time)
    text = rep.to_json(include_timing=args.timing)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(rep.to_csv())
    return 0


# -- tails --------------------------------------------------------------------

def _pair(names):
    return lambda v: dict(zip(names, v))


# name -> (function, {flag: (type, default)}, result shaper); default None means required
TAILS: Dict[str, tuple] = {
    "rate_I": (asy.rate_I, {"s": (float, None)}, None),
    "b_star": (asy.b_star, {"t": (float, None)}, None),
    "predict_extreme": (asy.predict_extreme,
                        {"kind": (str, None), "side": (str, "max"), "m": (int, None),
                         "p": (int, None), "n": (int, "none"), "eta": (float, 2.0)}, None),
    "epsilon_tau": (asy.epsilon_tau, {"m": (int, None), "p": (float, None), "t": (float, None)},
                    _pair(("epsilon", "tau"))),
    "wigner_lambda1_tail_bound": (asy.wigner_lambda1_tail_bound,
                                  {"x": (float, None), "m": (int, None),
                                   "kappa": (float, asy.KAPPA)}, None),
    "mdp_eta_tail_bound": (asy.mdp_eta_tail_bound,
                           {"x": (float, None), "m": (int, None), "eta": (float, None),
                            "r": (float, None), "delta": (float, None)}, None),
    "optimize_mdp_bound": (asy.optimize_mdp_bound,
                           {"x": (float, None), "m": (int, None), "eta": (float, None)},
                           _pair(("r", "delta", "bound"))),
    "wishart_moderate_bound": (asy.wishart_moderate_bound,
                               {"y": (float, None), "n": (int, None), "m": (int, None),
                                "r": (float, None), "d": (float, None),
                                "kappa": (float, asy.KAPPA), "side": (str, "upper")}, None),
    "log_phi_bar": (asy.log_phi_bar, {"x": (float, None)}, _pair(("exact", "asymptotic"))),
    "chi2_lower_tail_bound": (asy.chi2_lower_tail_bound, {"x": (float, None)}, None),
    "log_binomial_with_bounds": (asy.log_binomial_with_bounds,
                                 {"p": (int, None), "m": (int, None)},
                                 _pair(("exact", "lower", "upper"))),
    "overlap_ratio_log": (asy.overlap_ratio_log, {"p": (int, None), "m": (int, None)}, None),
    "max_l_value": (asy.max_l_value, {"m": (int, None), "eps": (float, None)},
                    _pair(("argmax_l", "value"))),
    "assumption_diagnostics": (asy.assumption_diagnostics,
                               {"n": (float, None), "p": (float, None), "m": (int, None)},
                               _pair(("rho1", "rho2", "xi_p", "omega_n"))),
    "predicted_delta": (predicted_delta, {"n": (float, None), "p": (float, None),
                                          "m": (int, None)}, None),
    "closed_form_cdf_m1": (closed_form_cdf_m1, {"ensemble": (str, None), "x": (float, None),
                                                "p": (int, None), "n": (int, "none")}, None),
    "log_multivariate_gamma": (log_multivariate_gamma, {"m": (int, None), "a": (float, None)},
                               None),
    "gamma_constants": (gamma_constants, {"m": (int, None), "n": (int, None)},
                        lambda g: g.to_dict()),
}


def _parse_fn_flags(fn_name: str, extra: Sequence[str]) -> dict:
    if fn_name not in TAILS:
        raise UsageError(f"unknown --fn {fn_name!r}; choose from {', '.join(sorted(TAILS))}")
    params = TAILS[fn_name][1]
    given = {}
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--"):
            raise UsageError(f"unexpected argument {tok!r}")
        key, eq, val = tok[2:].partition("=")
        if not eq:
            try:
                val = next(it)
            except StopIteration:
                raise UsageError(f"flag --{key} needs a value")
        if key not in params:
            raise UsageError(f"unknown flag --{key} for {fn_name}; accepts "
                             f"{', '.join('--' + k for k in params)}")
        if key in given:
            raise UsageError(f"flag --{key} given twice")
        conv = params[key][0]
        try:
            given[key] = conv(val)
        except ValueError:
            raise UsageError(f"--{key}: cannot parse {val!r} as {conv.__name__}")
    resolved = {}
    for key, (conv, default) in params.items():
        if key in given:
            resolved[key] = given[key]
        elif default is None:
            raise UsageError(f"{fn_name} requires --{key}")
        else:
            resolved[key] = None if default == "none" else default
    return resolved


def cmd_tails(args, out, extra):
    kwargs = _parse_fn_flags(args.fn, extra)
    fn, _, shape = TAILS[args.fn]
    value = fn(**kwargs)
    if shape is not None:
        value = shape(value)
    out.write(_dumps({"fn": args.fn, "args": kwargs, "value": value}))
    return 0


# -- density-selftest / rip ---------------------------------------------------

def cmd_density_selftest(args, out, err=sys.stderr):
    rows = selftest_table()
    ok = all(r["pass"] for r in rows)
    out.write(_dumps({"all_pass": ok, "rows": rows}))
    if not ok:
        bad = [r["name"] for r in rows if not r["pass"]]
        err.write(f"error: selftest: failing oracles: {', '.join(bad)}\n")
        return 2
    return 0


def cmd_rip(args, out):
    config = {"n": args.n, "p": args.p, "k": args.k, "t": args.t, "seed": args.seed,
              "margin": args.margin, "design": args.design, "sampled": args.sampled}
    payload = {"config": config, "generator": GENERATOR}
    if args.design:
        payload["design_min_n"] = design_min_n(args.p, args.k, args.t, args.margin)
        out.write(_dumps(payload))
        return 0
    if args.n is None:
        raise UsageError("--n is required unless --design is given")
    root = RngStream(args.seed)
    X = sample_sensing_matrix(args.n, args.p, root.derive(0))
    if args.sampled is not None:
        rep = sampled_rip_lower_bound(X, args.k, args.t, args.sampled, root.derive(1))
    else:
        rep = exact_rip_constant(X, args.k, args.t)
    payload["report"] = rep.to_dict()
    out.write(_dumps(payload))
    return 0


# -- entry --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rmtminors",
                 description="Extreme eigenvalues of principal minors of random matrices.")
    ap.add_argument("--version", action="version", version=f"rmtminors {__version__} ({BACKEND})")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    sp = sub.add_parser("sample", help="draw one ensemble matrix in the matrix text format")
    _add_ensemble_flags(sp)
    sp.add_argument("--seed", type=_u64, default=0)
    sp.add_argument("--out", help="write here instead of stdout")

    sp = sub.add_parser("extreme", help="max/min extreme eigenvalue over size-m minors")
    _add_ensemble_flags(sp, need_p=False)
    sp.add_argument("--input", help="read the matrix from a text file instead of sampling")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--mode", choices=("max", "min"), default="max")
    sp.add_argument("--strategy", choices=STRATEGIES, default="branch_and_bound")
    sp.add_argument("--seed", type=_u64, default=0)

    sp = sub.add_parser("mc", help="Monte Carlo experiment from a key=value config file")
    sp.add_argument("config")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--seed", type=_u64, default=None,
                    help="override the config seed (default: config value, else 0)")
    sp.add_argument("--json", help="write the JSON report here instead of stdout")
    sp.add_argument("--csv", help="also write the long-format CSV report here")
    sp.add_argument("--timing", action="store_true", help="include wall time in the JSON report")

    sp = sub.add_parser("tails", help="evaluate a predictor or tail bound by name",
                        description="Extra --flag value pairs are the function's arguments. "
                                    "Functions: " + ", ".join(sorted(TAILS)))
    sp.add_argument("--fn", required=True)

    sub.add_parser("density-selftest", help="density oracle residual table")

    sp = sub.add_parser("rip", help="restricted isometry constant of a Gaussian sensing matrix")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--seed", type=_u64, default=0)
    sp.add_argument("--margin", type=float, default=0.0)
    sp.add_argument("--design", action="store_true", help="print the minimum n instead")
    sp.add_argument("--sampled", type=int, metavar="N",
                    help="lower bound from N random subsets instead of exhaustion")
    return ap


def run_cli(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        with contextlib.redirect_stdout(out):       # --help / --version text
            args, extra = ap.parse_known_args(argv)
        if extra and args.cmd != "tails":
            raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            stream=err, format="%(name)s: %(message)s")
        if args.cmd == "tails":
            return cmd_tails(args, out, extra)
        handler: Callable = {
            "sample": cmd_sample, "extreme": cmd_extreme, "mc": cmd_mc,
            "density-selftest": lambda a, o: cmd_density_selftest(a, o, err), "rip": cmd_rip,
        }[args.cmd]
        return handler(args, out)
    except SystemExit as exc:      # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 1
    except (DomainError, CapacityError, InputError) as exc:
        kind = {DomainError: "domain", CapacityError: "capacity"}.get(type(exc), "input")
        err.write(f"error: {kind}: {' '.join(str(exc).split())}\n")
        return 2
    except OSError as exc:
        err.write(f"error: io: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run_cli())
