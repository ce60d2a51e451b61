"""Command-line interface.

Subcommands: ``simulate``, ``fit``, ``select``, ``evidence``, ``experiment``.
Options may also come from a plain-text ``key=value`` config file passed via
``--config``; precedence is flags > file > defaults.  Exit codes: 0 success,
1 usage error, 2 data error, 3 numerical failure.
"""

import argparse
import csv
import sys

from .cavi import DEFAULT_MAX_ITER, DEFAULT_TOL, ModelPriors, fit_best
from .errors import CapacityError, DataError, NumericalError
from .evidence import ChainSettings, stepping_stone_evidence
from .experiments import run_experiment
from .family import exponential_rate, gaussian_location, multinomial
from .io import load_dataset_csv, write_dataset_csv, write_report_json
from .mixture import sample
from .presets import PRESET_MODELS, get_model
from .selection import select_k


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


_DEFAULTS = {
    "n": 1000,
    "seed": 0,
    "phi0": 1.0,
    "sigma2": 1.0,
    "trials": 1,
    "k": 2,
    "kmax": 5,
    "rungs": 30,
    "samples": 2000,
    "burnin": 500,
    "reps": None,
    "jobs": 1,
    "family": "gaussian",
    "preset": "gauss6",
    "tol": DEFAULT_TOL,
    "max_iter": DEFAULT_MAX_ITER,
}

_CASTS = {
    "n": int, "seed": int, "trials": int, "k": int, "kmax": int, "rungs": int,
    "samples": int, "burnin": int, "reps": int, "jobs": int, "max_iter": int,
    "phi0": float, "sigma2": float, "tol": float,
    "family": str, "preset": str,
}


def _read_config(path):
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise _UsageError(f"{path}: line {lineno}: expected key=value")
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
    except OSError as err:
        raise DataError(f"cannot open config {path}: {err}") from err
    return values


def _resolve(args, keys):
    """flags > config file > defaults."""
    config = _read_config(args.config) if getattr(args, "config", None) else {}
    out = {}
    for key in keys:
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in config:
            try:
                out[key] = _CASTS[key](config[key])
            except ValueError:
                raise _UsageError(f"config value for {key!r} is not a {_CASTS[key].__name__}")
        else:
            out[key] = _DEFAULTS[key]
    return out


def _family_spec(family, path, sigma2, trials):
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            header = next(csv.reader(f))
    except OSError as err:
        raise DataError(f"cannot open {path}: {err}") from err
    except StopIteration:
        raise DataError(f"{path}: empty file (no header)") from None
    ncols = len([h for h in header if h.strip()])
    if family == "gaussian":
        return gaussian_location(ncols, sigma2=sigma2)
    if family == "exponential":
        if ncols != 1:
            raise DataError(f"{path}: exponential data must have a single column, got {ncols}")
        return exponential_rate()
    if family == "multinomial":
        return multinomial(ncols, trials=trials)
    raise _UsageError(f"unknown family {family!r} (gaussian, exponential, multinomial)")


def _add_common(p):
    p.add_argument("--config", help="key=value file supplying option defaults")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="vbmix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a dataset from a built-in mixture preset")
    p.add_argument("--preset", default=None, choices=sorted(PRESET_MODELS))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", required=True)
    _add_common(p)

    for name in ("fit", "select", "evidence"):
        p = sub.add_parser(name)
        p.add_argument("--data", required=True)
        p.add_argument("--family", default=None, choices=["gaussian", "exponential", "multinomial"])
        p.add_argument("--sigma2", type=float, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--phi0", type=float, default=None)
        p.add_argument("--out", required=True)
        _add_common(p)
        if name == "fit":
            p.add_argument("--k", type=int, default=None)
        elif name == "select":
            p.add_argument("--kmax", type=int, default=None)
        else:
            p.add_argument("--k", type=int, default=None)
            p.add_argument("--rungs", type=int, default=None)
            p.add_argument("--samples", type=int, default=None)
            p.add_argument("--burnin", type=int, default=None)

    p = sub.add_parser("experiment", help="run a named experiment grid")
    p.add_argument("name")
    p.add_argument("--out", required=True)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--n", type=int, default=None,
                   help="override the preset's sample-size grid with a single n")
    _add_common(p)
    return parser


def _cmd_simulate(args):
    opts = _resolve(args, ["preset", "n", "seed"])
    theta = get_model(opts["preset"])
    data = sample(theta, opts["n"], opts["seed"])
    write_dataset_csv(data, args.out)
    print(f"wrote {data.n} rows x {data.observations.shape[1]} cols to {args.out}")
    return 0


def _cmd_fit(args):
    opts = _resolve(args, ["family", "sigma2", "trials", "phi0", "k", "seed", "tol", "max_iter"])
    spec = _family_spec(opts["family"], args.data, opts["sigma2"], opts["trials"])
    data = load_dataset_csv(args.data, spec)
    print(f"loaded {data.n} rows x {data.observations.shape[1]} cols from {args.data}")
    fit = fit_best(data, opts["k"], ModelPriors(spec, opts["phi0"]), opts["seed"],
                   tol=opts["tol"], max_iter=opts["max_iter"])
    write_report_json(fit, args.out)
    print(f"elbo={fit.elbo!r} iterations={fit.iterations} converged={fit.converged}")
    return 0


def _cmd_select(args):
    opts = _resolve(args, ["family", "sigma2", "trials", "phi0", "kmax", "seed", "tol", "max_iter"])
    spec = _family_spec(opts["family"], args.data, opts["sigma2"], opts["trials"])
    data = load_dataset_csv(args.data, spec)
    print(f"loaded {data.n} rows x {data.observations.shape[1]} cols from {args.data}")
    report = select_k(data, opts["kmax"], ModelPriors(spec, opts["phi0"]), opts["seed"],
                      tol=opts["tol"], max_iter=opts["max_iter"])
    write_report_json(report, args.out)
    print(f"k_hat={report.k_hat_elbo} k_hat_bic={report.k_hat_bic}")
    return 0


def _cmd_evidence(args):
    opts = _resolve(args, ["family", "sigma2", "trials", "phi0", "k", "rungs",
                           "samples", "burnin", "seed", "tol", "max_iter"])
    spec = _family_spec(opts["family"], args.data, opts["sigma2"], opts["trials"])
    data = load_dataset_csv(args.data, spec)
    print(f"loaded {data.n} rows x {data.observations.shape[1]} cols from {args.data}")
    settings = ChainSettings(n_samples=opts["samples"], burn_in=opts["burnin"],
                             seed=opts["seed"])
    est = stepping_stone_evidence(data, opts["k"], ModelPriors(spec, opts["phi0"]),
                                  settings, n_rungs=opts["rungs"])
    write_report_json(est, args.out)
    print(f"log_evidence={est.log_evidence!r} std_error={est.std_error!r}")
    return 0


def _cmd_experiment(args):
    opts = _resolve(args, ["seed", "reps", "jobs", "tol", "max_iter"])
    n_override = (args.n,) if args.n else None
    try:
        run_experiment(args.name, opts["seed"], args.out, reps=opts["reps"],
                       jobs=opts["jobs"], n_override=n_override,
                       tol=opts["tol"], max_iter=opts["max_iter"])
    except KeyError as err:
        raise _UsageError(str(err.args[0])) from err
    print(f"experiment {args.name} written to {args.out}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "select": _cmd_select,
    "evidence": _cmd_evidence,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    except CapacityError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    except DataError as err:
        print(f"data error: {err}", file=sys.stderr)
        return 2
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
