"""Command-line front end.

Subcommands: coeff, approx, bounds, simulate, experiment, verify.
Exit codes: 0 success, 2 usage or domain error, 3 instability or
inapplicability, 4 non-convergent simulation.

Output is CSV (header row, '.' decimal separator) except for ``coeff``,
which prints the coefficient cache format, and ``verify``, which prints a
human-readable report. Exact-rational values print as fractions under
--exact and as decimal floats under --float.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import bounds as bounds_mod
from .analytic import (
    EXACT,
    FLOATING,
    QueueSpec,
    as_rate,
    nelson_basic,
    nelson_lt,
    varma_basic,
    varma_lt,
)
from .coeffs import load_table, save_table, w_coefficient, w_table
from .errors import (
    CacheFormatError,
    DomainError,
    InapplicableError,
    InstabilityError,
)
from .ordstat import standard_test_family, verify_lt_identity
from .sim import SimConfig, run

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INAPPLICABLE = 3
EXIT_NONCONVERGENT = 4

_TABLE_CACHE: dict[int, object] = {}


def _table(n: int):
    if n not in _TABLE_CACHE:
        _TABLE_CACHE[n] = w_table(n)
    return _TABLE_CACHE[n]


def _fmt(value, exact: bool) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, Fraction):
        return str(value) if exact else repr(float(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(header, rows, out=sys.stdout):
    writer = csv.writer(out)
    writer.writerow(header)
    writer.writerows(rows)


# --- coeff -------------------------------------------------------------------


def cmd_coeff(args) -> int:
    n = args.n
    if args.k is not None and args.i is not None:
        print(w_coefficient(n, args.k, args.i))
        return EXIT_OK
    cache = Path(args.cache) if args.cache else None
    entries = {}
    if cache is not None and cache.exists():
        loaded = load_table(cache)
        if loaded.n != n:
            raise DomainError(f"cache file holds n={loaded.n}, requested n={n}")
        entries = loaded.entries  # may be partial; missing values are computed
    elif cache is not None:
        save_table(_table(n), cache)
    ks = range(1, n + 1) if args.k is None else [args.k]
    for k in ks:
        for i in range(k, n + 1):
            value = entries.get((k, i))
            if value is None:
                value = _table(n).value(k, i)
            print(f"{n} {k} {i} {value}")
    return EXIT_OK


# --- approx ------------------------------------------------------------------

_APPROX_METHODS = {
    "nelson-lt": lambda spec, ev: nelson_lt(spec, _table(spec.n), evaluation=ev),
    "varma-lt": lambda spec, ev: varma_lt(spec, _table(spec.n), evaluation=ev),
    "nelson-basic": lambda spec, ev: nelson_basic(spec.n, spec.lam, spec.mu, evaluation=ev),
    "varma-basic": lambda spec, ev: varma_basic(spec.n, spec.lam, spec.mu, evaluation=ev),
}


def cmd_approx(args) -> int:
    evaluation = FLOATING if args.float else EXACT
    spec = QueueSpec(n=args.n, k=args.k, lam=args.lam, mu=args.mu, variant="non-purging")
    got = _APPROX_METHODS[args.method](spec, evaluation)
    exact = evaluation == EXACT
    _write_csv(
        ["n", "k", "lam", "mu", "method", "evaluation", "value", "raw", "clipped"],
        [[
            args.n,
            args.k,
            _fmt(spec.lam, exact),
            _fmt(spec.mu, exact),
            got.method,
            got.evaluation,
            _fmt(got.value, exact),
            _fmt(got.raw, exact),
            _fmt(got.clipped, exact),
        ]],
    )
    return EXIT_OK


# --- bounds ------------------------------------------------------------------

_BOUNDS_HEADER = [
    "n",
    "k",
    "rho",
    "naive_upper",
    "sm_upper",
    "refined_upper",
    "sm_lower",
    "staging_lower",
]


def _bounds_row(spec: QueueSpec, as_exact: bool):
    b = bounds_mod.bound_set(spec, _table(spec.n))
    return [
        spec.n,
        spec.k,
        _fmt(spec.rho, as_exact),
        _fmt(b.naive_upper, as_exact),
        _fmt(b.split_merge_upper, as_exact),
        _fmt(b.refined_upper, as_exact),
        _fmt(b.split_merge_lower, as_exact),
        _fmt(b.staging_lower, as_exact),
    ]


def cmd_bounds(args) -> int:
    spec = QueueSpec(n=args.n, k=args.k, lam=args.lam, mu=args.mu, variant="purging")
    _write_csv(_BOUNDS_HEADER, [_bounds_row(spec, args.exact)])
    return EXIT_OK


# --- simulate ----------------------------------------------------------------

_SIM_HEADER = [
    "variant",
    "n",
    "k",
    "lam",
    "mu",
    "seed",
    "sample_count",
    "mean_sojourn",
    "half_width_95",
    "job_count_total",
    "warmup_jobs",
    "converged",
    "backend",
]


def _sim_config(args) -> SimConfig:
    if args.rho is not None:
        lam = as_rate(args.rho) * as_rate(args.mu)
    else:
        if args.lam is None:
            raise DomainError("one of --rho or --lam is required")
        lam = as_rate(args.lam)
    spec = QueueSpec(
        n=args.n, k=args.k, lam=lam, mu=args.mu, variant=args.variant, service=args.service
    )
    kwargs = {}
    if args.warmup is not None:
        kwargs["warmup_jobs"] = args.warmup
    return SimConfig(
        spec=spec,
        seed=args.seed,
        sample_rate=args.sample_rate,
        target_samples=args.samples,
        job_budget=args.budget,
        arrival=args.arrival,
        **kwargs,
    )


def _sim_row(config: SimConfig, result) -> list:
    spec = config.spec
    return [
        spec.variant,
        spec.n,
        spec.k,
        repr(float(spec.lam)),
        repr(float(spec.mu)),
        result.seed,
        result.sample_count,
        repr(result.mean_sojourn),
        repr(result.half_width_95),
        result.job_count_total,
        result.warmup_jobs,
        str(result.converged).lower(),
        result.backend,
    ]


def cmd_simulate(args) -> int:
    config = _sim_config(args)
    result = run(config, backend=args.backend)
    _write_csv(_SIM_HEADER, [_sim_row(config, result)])
    return EXIT_OK if result.converged else EXIT_NONCONVERGENT


# --- experiment --------------------------------------------------------------


def _load_recipe(path: Path) -> dict:
    try:
        import tomllib
    except ImportError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _grid_expr(token, n: int) -> int:
    if isinstance(token, int):
        return token
    value = eval(str(token), {"__builtins__": {}}, {"n": n, "ceil": math.ceil})  # noqa: S307
    return int(value)


def _expand_axis(raw, n: int) -> list[int]:
    if isinstance(raw, int):
        return [raw]
    if isinstance(raw, str):
        if ".." in raw:
            lo, hi = raw.split("..", 1)
            return list(range(_grid_expr(lo, n), _grid_expr(hi, n) + 1))
        return [_grid_expr(raw, n)]
    return [_grid_expr(tok, n) for tok in raw]


def _recipe_points(recipe: dict) -> list[tuple[int, int, str]]:
    if "points" in recipe:
        points = [(int(p[0]), int(p[1]), str(p[2])) for p in recipe["points"]]
    else:
        grid = recipe.get("grid")
        if not grid:
            raise DomainError("recipe needs a [grid] section or a points list")
        for axis in ("n", "k", "rho"):
            if axis not in grid:
                raise DomainError(f"recipe [grid] section is missing {axis!r}")
        points = []
        for n in _expand_axis(grid["n"], 0):
            for k in _expand_axis(grid["k"], n):
                for rho in grid["rho"]:
                    points.append((n, int(k), str(rho)))
    for n, k, rho in points:
        if not 1 <= k <= n:
            raise DomainError(f"grid point has k={k} outside [1, n={n}]")
        if as_rate(rho) < 0:
            raise DomainError(f"grid point has negative rho={rho}")
    return points


_BOUND_METHODS = {
    "naive-upper": lambda spec: bounds_mod.naive_upper(spec, _table(spec.n)),
    "sm-upper": bounds_mod.split_merge_upper,
    "refined-upper": lambda spec: bounds_mod.refined_upper(spec, _table(spec.n)),
    "sm-lower": bounds_mod.split_merge_lower,
    "staging-lower": bounds_mod.staging_lower,
}


def _experiment_point(task) -> list[str]:
    point, methods, mu, sim_over, backend = task
    n, k, rho = point
    lam = as_rate(rho) * as_rate(mu)
    cells: list[str] = [str(n), str(k), rho]
    sim_mean = None
    approx_values: list[float] = []
    for method in methods:
        if method.startswith("simulate:"):
            variant = method.split(":", 1)[1]
            kq = n if variant == "basic" else k
            spec = QueueSpec(n=n, k=kq, lam=lam, mu=mu, variant=variant)
            config = SimConfig(spec=spec, **sim_over)
            result = run(config, backend=backend)
            sim_mean = result.mean_sojourn
            cells += [repr(result.mean_sojourn), repr(result.half_width_95)]
        elif method in ("nelson-lt", "varma-lt"):
            spec = QueueSpec(n=n, k=k, lam=lam, mu=mu, variant="non-purging")
            fn = nelson_lt if method == "nelson-lt" else varma_lt
            value = float(fn(spec, _table(n)).value)
            approx_values.append(value)
            cells.append(repr(value))
        elif method in _BOUND_METHODS:
            spec = QueueSpec(n=n, k=k, lam=lam, mu=mu, variant="purging")
            got = _BOUND_METHODS[method](spec)
            cells.append("" if got is None else repr(float(got)))
        else:
            raise DomainError(f"unknown experiment method {method!r}")
    if sim_mean is not None and len(approx_values) == 1:
        cells.append(repr(approx_values[0] / sim_mean - 1) if sim_mean else "")
    return cells


def _experiment_header(methods: list[str]) -> list[str]:
    header = ["n", "k", "rho"]
    for method in methods:
        if method.startswith("simulate:"):
            header += ["sim", "sim_hw"]
        else:
            header.append(method.replace("-", "_"))
    approx_methods = [m for m in methods if m in ("nelson-lt", "varma-lt")]
    if any(m.startswith("simulate:") for m in methods) and len(approx_methods) == 1:
        header.append("rel_err")
    return header


def cmd_experiment(args) -> int:
    recipe = _load_recipe(Path(args.recipe))
    methods = list(recipe.get("methods", []))
    if not methods:
        raise DomainError("recipe lists no methods")
    if sum(1 for m in methods if m.startswith("simulate:")) > 1:
        raise DomainError("a recipe may hold at most one simulate:<variant> method")
    points = _recipe_points(recipe)
    mu = str(recipe.get("mu", "1"))
    sim_over = dict(recipe.get("sim", {}))
    allowed = {"seed", "sample_rate", "target_samples", "warmup_jobs", "job_budget", "arrival"}
    unknown = set(sim_over) - allowed
    if unknown:
        raise DomainError(f"unknown [sim] keys {sorted(unknown)}; allowed: {sorted(allowed)}")
    sim_over.setdefault("seed", 42)
    out_path = Path(args.out or recipe.get("output", f"{recipe.get('name', 'experiment')}.csv"))

    tasks = [(p, methods, mu, sim_over, args.backend) for p in points]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_experiment_point, tasks))
    else:
        rows = [_experiment_point(t) for t in tasks]

    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        _write_csv(_experiment_header(methods), rows, out=fh)
    print(f"wrote {out_path} ({len(rows)} rows)")
    return EXIT_OK


# --- verify ------------------------------------------------------------------


def cmd_verify(args) -> int:
    from .analytic import harmonics

    failures = 0
    for dist in standard_test_family():
        report = verify_lt_identity(dist, _table(dist.n))
        status = "PASS" if report.passed else "FAIL"
        if not report.passed:
            failures += 1
        print(
            f"{status} {dist.name}: n={dist.n}, {len(report.cdf_rows)} cdf checks, "
            f"{len(report.expectation_rows)} expectation checks, "
            f"max residual {report.max_abs_residual}"
        )
    top = args.max_n
    bad = 0
    for n in range(1, top + 1):
        t = _table(n)
        for k in range(1, n + 1):
            lhs = sum(t.value(k, i) * harmonics.h(i) for i in range(k, n + 1))
            if lhs != harmonics.h(n) - harmonics.h(n - k):
                bad += 1
    status = "PASS" if bad == 0 else "FAIL"
    print(f"{status} exponential-expectation identity: n <= {top}, {bad} mismatches")
    failures += 1 if bad else 0
    return EXIT_OK if failures == 0 else 1


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fjq",
        description="Fork-join (n,k) queue toolkit: coefficients, approximations, bounds, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeff", help="print exact transformation coefficients")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int, nargs="?")
    p.add_argument("i", type=int, nargs="?")
    p.add_argument("--cache", help="coefficient cache file to load or create")
    p.set_defaults(func=cmd_coeff)

    p = sub.add_parser("approx", help="expected sojourn time of a non-purging (n,k) queue")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("lam", help="arrival rate (exact decimal)")
    p.add_argument("mu", help="service rate (exact decimal)")
    p.add_argument("--method", required=True, choices=sorted(_APPROX_METHODS))
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true", default=True)
    group.add_argument("--float", action="store_true")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("bounds", help="sojourn-time bounds for a purging (n,k) queue")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("lam", help="arrival rate (exact decimal)")
    p.add_argument("mu", help="service rate (exact decimal)")
    p.add_argument("--exact", action="store_true", help="print exact fractions instead of floats")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="discrete-event simulation of one queue")
    p.add_argument("--variant", required=True, choices=["basic", "non-purging", "purging", "split-merge"])
    p.add_argument("-n", type=int, required=True, dest="n")
    p.add_argument("-k", type=int, required=True, dest="k")
    p.add_argument("--rho", help="load factor; lam = rho * mu")
    p.add_argument("--lam", help="arrival rate (alternative to --rho)")
    p.add_argument("--mu", default="1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000, help="sampled jobs to average")
    p.add_argument("--sample-rate", type=float, default=0.01)
    p.add_argument("--warmup", type=int, default=None)
    p.add_argument("--budget", type=int, default=10_000_000, help="job budget")
    p.add_argument("--service", default="exponential", help="exponential | deterministic | weibull:<shape>")
    p.add_argument("--arrival", default="poisson", choices=["poisson", "deterministic"])
    p.add_argument("--backend", default=None, help="numba | numpy (default: auto)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="run a recipe file, write CSV")
    p.add_argument("recipe")
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--backend", default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="run the exact order-statistics identity suite")
    p.add_argument("--max-n", type=int, default=20, help="harmonic identity upper n")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstabilityError, InapplicableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except (DomainError, CacheFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
