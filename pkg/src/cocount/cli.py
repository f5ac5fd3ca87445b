"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 config error, 3 identity mismatch,
4 resource cap exceeded.  All outputs are deterministic text; exact values
render as p/q rationals or colon-separated cyclotomic tuples.
"""

from __future__ import annotations

import argparse
import random
import sys

from .asymptotics import (
    counting_function,
    fit_power_log,
    geometric_grid,
    predicted_limit_class,
)
from .config import ConfigError, RunConfig, parse_config
from .euler import CapExceeded
from .families import (
    NoRamificationError,
    a_invariant,
    b_invariant,
    classify_family,
    minimal_inertia_subgroup,
)
from .localfields import place_key
from .poisson import greenberg_wiles_check, mb_main_term, poisson_check

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_MISMATCH = 3
EXIT_CAP = 4


def _cmd_count(cfg: RunConfig, log) -> tuple[int, str]:
    if cfg.x_max > cfg.max_x:
        raise CapExceeded(f"X = {cfg.x_max} exceeds max_x = {cfg.max_x}")
    grid = geometric_grid(cfg.grid_min, cfg.x_max, cfg.grid_points)
    sample = counting_function(cfg.family, cfg.ordering, grid)
    return EXIT_OK, sample.render_csv() + "\n"


def _cmd_fit(cfg: RunConfig, log) -> tuple[int, str]:
    if cfg.x_max > cfg.max_x:
        raise CapExceeded(f"X = {cfg.x_max} exceeds max_x = {cfg.max_x}")
    grid = geometric_grid(cfg.grid_min, cfg.x_max, cfg.grid_points)
    sample = counting_function(cfg.family, cfg.ordering, grid)
    fit = fit_power_log(sample)
    lines = [sample.render_csv(), "", fit.render()]
    return EXIT_OK, "\n".join(lines) + "\n"


def _cmd_poisson(cfg: RunConfig, log) -> tuple[int, str]:
    if cfg.truncation > cfg.max_truncation:
        raise CapExceeded(
            f"truncation {cfg.truncation} exceeds max_truncation {cfg.max_truncation}"
        )
    report = poisson_check(cfg.family, cfg.ordering, cfg.truncation,
                           cap=cfg.max_truncation, threads=cfg.threads)
    status = EXIT_OK if report.verified else EXIT_MISMATCH
    header = (
        f"# poisson truncation={report.truncation}"
        f" ratio={report.scalar_ratio} family={cfg.family.name or 'custom'}"
        f" verified={int(report.verified)}"
    )
    return status, header + "\n" + report.render() + "\n"


def _cmd_gw(cfg: RunConfig, log) -> tuple[int, str]:
    outputs = []
    ok = True
    if cfg.gw_box:
        report = greenberg_wiles_check(cfg.n, cfg.gw_box)
        outputs.append(report.render())
        ok = ok and report.equal
    if cfg.random_boxes:
        from .poisson import random_subgroup_box

        rng = random.Random(cfg.seed)
        for i in range(cfg.random_boxes):
            box = random_subgroup_box(cfg.n, rng)
            report = greenberg_wiles_check(cfg.n, box)
            outputs.append(f"# box {i}: {sorted(box, key=place_key)}")
            outputs.append(report.render())
            ok = ok and report.equal
    if not cfg.gw_box and not cfg.random_boxes:
        report = greenberg_wiles_check(cfg.n, {})
        outputs.append(report.render())
        ok = report.equal
    return (EXIT_OK if ok else EXIT_MISMATCH), "\n".join(outputs) + "\n"


def _cmd_invariants(cfg: RunConfig, log) -> tuple[int, str]:
    label = classify_family(cfg.family)
    lines = [f"family={cfg.family.name or 'custom'}", f"n={cfg.n}",
             f"classification={label}"]
    try:
        a = a_invariant(cfg.family, cfg.ordering)
        b = b_invariant(cfg.family, cfg.ordering)
        tprime = minimal_inertia_subgroup(cfg.family, cfg.ordering)
        lines += [f"a={a}", f"b={b}", f"t_prime_order={tprime}",
                  f"predicted_alpha=1/{a}", f"predicted_log_power={b - 1}"]
        _, (abscissa, order) = mb_main_term(cfg.family, cfg.ordering)
        lines += [f"main_term_abscissa={abscissa}", f"main_term_order={order}"]
        lines += [f"surjectivity={predicted_limit_class(cfg.family, cfg.ordering)}"]
    except NoRamificationError:
        lines += ["a=none", "b=none", "note=no generic ramification; count is bounded"]
    return EXIT_OK, "\n".join(lines) + "\n"


def _cmd_example(cfg: RunConfig, log) -> tuple[int, str]:
    from .families import example_d1mod4_family
    from .orderings import disc_ordering

    family = example_d1mod4_family()
    ordering = disc_ordering()  # the suite is defined for the discriminant
    if cfg.truncation > cfg.max_truncation:
        raise CapExceeded("truncation exceeds cap")
    if cfg.x_max > cfg.max_x:
        raise CapExceeded("X exceeds cap")
    log("running coefficient identity")
    report = poisson_check(family, ordering, cfg.truncation, cap=cfg.max_truncation)
    log("running sieve count and fit")
    grid = geometric_grid(cfg.grid_min, cfg.x_max, cfg.grid_points)
    sample = counting_function(family, ordering, grid)
    fit = fit_power_log(sample)
    a = a_invariant(family, ordering)
    b = b_invariant(family, ordering)
    lines = [
        f"coefficient_identity_truncation={report.truncation}",
        f"coefficient_identity_verified={int(report.verified)}",
        f"count_at_max={sample.counts[-1]}",
        fit.render(),
        f"a={a}",
        f"b={b}",
        f"predicted_alpha=1",
        f"predicted_log_power={b - 1}",
    ]
    status = EXIT_OK if report.verified else EXIT_MISMATCH
    return status, "\n".join(lines) + "\n"


_COMMANDS = {
    "count": _cmd_count,
    "fit": _cmd_fit,
    "poisson-check": _cmd_poisson,
    "gw-check": _cmd_gw,
    "invariants": _cmd_invariants,
    "example-d1mod4": _cmd_example,
}


def run(cfg: RunConfig, out=None, verbose: bool = False) -> int:
    """Execute a validated config; returns the exit code."""

    def log(msg: str) -> None:
        if verbose:
            print(f"[cocount] {msg}", file=sys.stderr)

    try:
        status, text = _COMMANDS[cfg.command](cfg, log)
    except CapExceeded as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        # semantic problems surfacing at run time (ineligible family, bad box)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cocount",
        description="Counting Galois cohomology classes over Q: exact local "
        "conditions, Poisson-summation verification, and asymptotics.",
    )
    parser.add_argument("--config", required=True, help="path to a config file")
    parser.add_argument("--out", default=None, help="write output to this path")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker processes for dual-side expansion")
    parser.add_argument("--verbose", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0,) else 0
    if args.threads < 1:
        print("--threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg.threads = args.threads
    return run(cfg, out=args.out, verbose=args.verbose)


if __name__ == "__main__":
    sys.exit(main())
