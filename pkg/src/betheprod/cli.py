"""Command-line entry point.

Exit status: 0 success, 1 a verified property failed, 2 bad configuration,
3 numerical error (for semiclassical-compare: some family member failed,
the table is still written).  Errors are written as JSON (``error`` code + message) to
the output path when one is given, otherwise to stderr.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import exact, io, suites
from .bethe import solve
from .errors import BetheError, ConfigInvalid, OffShellWarning
from .oracle import ChainSpec, oracle_scalar_product, oracle_transfer_check
from .semiclassical import expansion_report, fit_log_slope

COMMANDS = ("solve-bethe", "scalar-product", "oracle-check", "verify-identities",
            "semiclassical-compare")
REPORT_COLUMNS = ["M", "epsilon", "log_a_exact_re", "log_a_exact_im", "f0_re", "f0_im",
                  "f1_re", "f1_im", "residual_leading", "residual_subleading",
                  "quadrature_error_estimate", "error", "seed"]


@dataclass
class RunConfig:
    command: str
    model_path: str | None = None
    state_paths: dict = field(default_factory=dict)
    output_path: str | None = None
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)


def _emit(config: RunConfig, payload: dict) -> None:
    text = io.dumps(payload) + "\n"
    if config.output_path:
        io.atomic_write(config.output_path, text)
    else:
        sys.stdout.write(text)


def _require(config: RunConfig, *names):
    for name in names:
        if name == "model" and not config.model_path:
            raise ConfigInvalid("--model is required")
        if name != "model" and not config.state_paths.get(name):
            raise ConfigInvalid(f"--{name} is required")


def _solve_bethe(config: RunConfig) -> int:
    _require(config, "model")
    model = io.load_model(config.model_path)
    modes = config.options.get("modes")
    guess_path = config.state_paths.get("guess")
    guess = io.load_rapidities(guess_path) if guess_path else None
    if modes is None and guess is None:
        raise ConfigInvalid("need --modes or --guess")
    state = solve(model, modes, guess, tol=config.tolerances.get("newton", 1e-13),
                  max_iter=int(config.options.get("max_iter", 100)))
    _emit(config, {"command": config.command, "seed": config.seed, **io.state_to_json(state)})
    return 0


def _pairs(values: dict) -> dict:
    names = list(values)
    out = {}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            out[f"{a}-{b}"] = abs(values[a] - values[b]) / max(abs(values[b]), np.finfo(float).tiny)
    return out


def _scalar_product(config: RunConfig) -> int:
    _require(config, "model", "u", "v")
    model = io.load_model(config.model_path)
    state = io.load_state(config.state_paths["u"], model)
    v = io.load_rapidities(config.state_paths["v"])
    method = config.options.get("method", "all")
    names = list(exact.EVALUATORS) if method == "all" else [method]
    if any(n not in exact.EVALUATORS for n in names):
        raise ConfigInvalid(f"unknown method {method!r}")
    w = np.concatenate([state.u, v])
    prefactor = (-1) ** state.M * np.prod(model.a(v)) * np.prod(model.d(state.u))
    results, errors = {}, {}
    for name in names:
        try:
            results[name] = exact.EVALUATORS[name](model, w)
        except BetheError as exc:
            errors[name] = {"error": exc.code, "message": str(exc)}
    if not results:
        first = next(iter(errors.values()))
        raise BetheError(f"{first['error']}: {first['message']}")
    payload = {
        "command": config.command,
        "seed": config.seed,
        "on_shell": state.on_shell,
        "u_residual": state.residual,
        "methods": {
            name: {**r.to_json(), "scalar_product": complex(prefactor * r.value)}
            for name, r in results.items()
        },
        "pairwise_relative_deviation": _pairs({n: r.value for n, r in results.items()}),
        "errors": errors,
    }
    if not state.on_shell:
        payload["warning"] = "u is off shell; the values are A_w[f] times the prefactor, not a scalar product"
    _emit(config, payload)
    return 0


def _oracle_check(config: RunConfig) -> int:
    _require(config, "model", "u", "v")
    data = io.read_json(config.model_path)
    if data.get("type") != "inhomogeneous_xxx":
        raise ConfigInvalid("the oracle needs an inhomogeneous_xxx model")
    model = io.model_from_json(data)
    chain = ChainSpec(io.parse_complex_list(data["theta"]), float(data.get("epsilon", 1.0)),
                      io.parse_complex(data.get("kappa", 1.0)))
    state = io.load_state(config.state_paths["u"], model)
    v = io.load_rapidities(config.state_paths["v"])
    oracle = oracle_scalar_product(chain, v, state.u)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OffShellWarning)
        formula = exact.scalar_product(model, state, v)
    probe = complex(config.options.get("probe", 0.123 + 0.0456j))
    deviation = abs(formula - oracle) / max(abs(oracle), np.finfo(float).tiny)
    tol = config.tolerances.get("oracle", 1e-8)
    _emit(config, {
        "command": config.command,
        "seed": config.seed,
        "on_shell": state.on_shell,
        "u_residual": state.residual,
        "oracle_value": oracle,
        "formula_value": formula,
        "relative_deviation": deviation,
        "transfer_defect": oracle_transfer_check(chain, state, probe),
        "transfer_probe": probe,
        "passed": bool(deviation < tol) if state.on_shell else None,
    })
    return 0 if (not state.on_shell or deviation < tol) else 1


def _verify_identities(config: RunConfig) -> int:
    results = suites.verify_all(
        instances=int(config.options.get("instances", 200)),
        seed=config.seed,
        oracle_per_case=int(config.options.get("oracle_instances", 5)),
        flip_epsilon=bool(config.options.get("flip_epsilon", False)),
    )
    passed = all(r.passed for r in results)
    _emit(config, {
        "command": config.command,
        "seed": config.seed,
        "instances": int(config.options.get("instances", 200)),
        "flip_epsilon": bool(config.options.get("flip_epsilon", False)),
        "passed": passed,
        "properties": [r.to_json() for r in results],
    })
    return 0 if passed else 1


def _semiclassical_compare(config: RunConfig) -> int:
    family = io.load_family(config.state_paths.get("family"))
    rows = expansion_report(family, n_nodes=int(config.options.get("nodes", 512)))
    table = [{**r.to_row(), "seed": config.seed} for r in rows]
    text = io.csv_text(table, REPORT_COLUMNS)
    if config.output_path:
        io.atomic_write(config.output_path, text)
    else:
        sys.stdout.write(text)
    slope = fit_log_slope([r.M for r in rows], [r.residual_subleading for r in rows])
    sys.stderr.write(f"subleading residual slope vs M: {slope:.3f}\n")
    # the table is complete either way; failed members make it a numerical error
    return 3 if any(r.error for r in rows) else 0


_DISPATCH = {
    "solve-bethe": _solve_bethe,
    "scalar-product": _scalar_product,
    "oracle-check": _oracle_check,
    "verify-identities": _verify_identities,
    "semiclassical-compare": _semiclassical_compare,
}


def run(config: RunConfig) -> int:
    """Execute one command; returns the exit status."""
    try:
        if config.command not in _DISPATCH:
            raise ConfigInvalid(f"unknown command {config.command!r}")
        try:
            return _DISPATCH[config.command](config)
        except (ValueError, TypeError, KeyError) as exc:
            # malformed inputs that got past parsing
            raise ConfigInvalid(f"{type(exc).__name__}: {exc}") from exc
    except BetheError as exc:
        payload = {"command": config.command, "seed": config.seed, "error": exc.code,
                   "message": str(exc)}
        if config.output_path and not isinstance(exc, ConfigInvalid):
            io.atomic_write(config.output_path, io.dumps(payload) + "\n")
        else:
            sys.stderr.write(io.dumps(payload) + "\n")
        return exc.exit_status


def _modes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"mode numbers must be integers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betheprod", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("solve-bethe", help="solve the Bethe equations for given mode numbers")
    p.add_argument("--model", required=True)
    p.add_argument("--modes", type=_modes)
    p.add_argument("--guess", help="rapidity file with the initial guess")
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--max-iter", type=int, default=100)
    common(p)

    p = sub.add_parser("scalar-product", help="scalar product of an on-shell u with v")
    p.add_argument("--model", required=True)
    p.add_argument("--u", required=True, help="state file")
    p.add_argument("--v", required=True, help="rapidity file")
    p.add_argument("--method", default="all", choices=["all", *exact.EVALUATORS])
    common(p)

    p = sub.add_parser("oracle-check", help="compare with the explicit Hilbert-space value")
    p.add_argument("--model", required=True)
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    common(p)

    p = sub.add_parser("verify-identities", help="seeded cross-method suites")
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--oracle-instances", type=int, default=5, help="per (L, M) case")
    p.add_argument("--flip-epsilon", action="store_true",
                   help="mutation check: evaluate the ratio formula with -eps")
    common(p)

    p = sub.add_parser("semiclassical-compare", help="F0, F1 against exact log A over a family")
    p.add_argument("--family", help="family file (default: the bundled one-cut family)")
    p.add_argument("--nodes", type=int, default=512)
    common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    paths = {k: getattr(args, k) for k in ("u", "v", "guess", "family") if getattr(args, k, None)}
    options = {}
    tolerances = {}
    if args.command == "solve-bethe":
        options.update(modes=args.modes, max_iter=args.max_iter)
        tolerances["newton"] = args.tol
    elif args.command == "scalar-product":
        options["method"] = args.method
    elif args.command == "oracle-check":
        tolerances["oracle"] = args.tol
    elif args.command == "verify-identities":
        options.update(instances=args.instances, oracle_instances=args.oracle_instances,
                       flip_epsilon=args.flip_epsilon)
    elif args.command == "semiclassical-compare":
        options["nodes"] = args.nodes
    return RunConfig(args.command, getattr(args, "model", None), paths, args.out, args.seed,
                     tolerances, options)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
