"""``bigboss`` command line: validate, solve, experiment, predict.

Exit codes: 0 success, 1 domain failure (not a Big Boss game, generation
exhausted), 2 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import io
from .errors import (
    AmbiguousBoss,
    BigBossError,
    InsufficientPoints,
    NotBigBoss,
    RejectionBudgetExhausted,
)
from .game import Game, is_convex, validate_big_boss
from .generator import GenConfig, run_sample
from .psv import convexity_via_alpha, psv, tau_diagonal
from .solutions import shapley, tau_bbg
from .stats import (
    DEFAULT_BINS,
    ReportRow,
    fitting_histogram,
    log_regression,
    moving_average_predict,
    predict_p_le_1,
    summarize_sample,
)

log = logging.getLogger("bigboss")

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2
LOW_SAMPLE = 100


def _vec(x: Sequence[float]) -> str:
    return "(" + ", ".join(f"{v:.10g}" for v in x) + ")"


def _members(players: frozenset[int]) -> str:
    return "{" + ",".join(str(p) for p in sorted(players)) + "}"


def _load(path: str) -> Game:
    try:
        return io.load_game(path)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read {path}: {exc.strerror}") from None
    except BigBossError as exc:
        raise _Exit(EXIT_IO, f"{path}: {exc}") from None


class _Exit(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def _emit(args: argparse.Namespace, record: dict[str, Any], text: str) -> None:
    if args.format == "machine":
        print(json.dumps(record, indent=2))
    else:
        print(text)


# validate ---------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    g = _load(args.path)
    try:
        report = validate_big_boss(g)
    except AmbiguousBoss as exc:
        raise _Exit(EXIT_DOMAIN, str(exc)) from None
    ok = lambda flag: "ok" if flag else "FAIL"  # noqa: E731
    boss = report.boss if report.boss is not None else "none"
    lines = [
        f"big boss: {boss}; B1 {ok(report.b1_monotone)}; B2 {ok(report.b2_veto)}; "
        f"B3 {ok(report.b3_union)}",
        f"M(v) = {_vec(report.marginals)}",
    ]
    violation = None
    if report.first_violation is not None:
        v = report.first_violation
        violation = {"axiom": v.axiom, "coalitions": [sorted(c) for c in v.coalitions]}
        lines.append(f"violation: {v.axiom} at " + " / ".join(_members(c) for c in v.coalitions))
    record = {
        "is_big_boss": report.is_big_boss,
        "boss": report.boss,
        "b1_monotone": report.b1_monotone,
        "b2_veto": report.b2_veto,
        "b3_union": report.b3_union,
        "marginals": report.marginals.tolist(),
        "violation": violation,
    }
    _emit(args, record, "\n".join(lines))
    return EXIT_OK if report.is_big_boss else EXIT_DOMAIN


# solve ------------------------------------------------------------------


def solve_record(g: Game) -> dict[str, Any]:
    report = validate_big_boss(g)
    if not report.is_big_boss:
        raise NotBigBoss(f"not a Big Boss game: {report.first_violation}")
    boss = report.boss
    diag = tau_diagonal(g, boss)
    res = psv(g, boss)
    weak = np.delete(report.marginals, boss - 1)
    record: dict[str, Any] = {
        "boss": boss,
        "marginals": report.marginals.tolist(),
        "shapley": shapley(g).tolist(),
        "tau": tau_bbg(g, boss).tolist(),
        "e0": diag.e0.tolist(),
        "e1": diag.e1.tolist(),
        "rho": res.rho,
        "alpha": res.alpha,
        "psv": res.allocation.tolist(),
        "clipped": res.clipped,
        "gap_boss": res.gap_boss,
        "gap_weak_max": res.gap_weak_max,
        "convex": is_convex(g),
        "convex_via_alpha": convexity_via_alpha(g, boss) if np.all(weak > 0) else None,
    }
    return record


def cmd_solve(args: argparse.Namespace) -> int:
    g = _load(args.path)
    try:
        record = solve_record(g)
    except (NotBigBoss, AmbiguousBoss) as exc:
        raise _Exit(EXIT_DOMAIN, str(exc)) from None
    text = "\n".join(
        [
            f"big boss: {record['boss']}",
            f"M(v)      = {_vec(record['marginals'])}",
            f"shapley   = {_vec(record['shapley'])}",
            f"tau       = {_vec(record['tau'])}",
            f"e0        = {_vec(record['e0'])}",
            f"e1        = {_vec(record['e1'])}",
            f"rho       = {record['rho']:.10g}",
            f"alpha     = {record['alpha']:.10g}",
            f"psv       = {_vec(record['psv'])}",
            f"gaps      = ({record['gap_boss']:.10g}, {record['gap_weak_max']:.10g})",
            f"convex: {str(record['convex']).lower()}",
        ]
    )
    _emit(args, record, text)
    if args.out:
        try:
            Path(args.out).write_text(json.dumps(record, indent=2) + "\n")
        except OSError as exc:
            raise _Exit(EXIT_IO, f"cannot write {args.out}: {exc.strerror}") from None
    return EXIT_OK


# experiment -------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    n_list: tuple[int, ...]
    m: int
    mu_scale: int = 1000
    rng_seed: int = 0
    bins: int = DEFAULT_BINS
    output_dir: str = "experiment-out"
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.n_list or any(n < 3 for n in self.n_list):
            raise ValueError("n_list must be nonempty with every n >= 3")
        for name in ("m", "mu_scale", "bins", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> ExperimentConfig:
        known = {k: doc[k] for k in cls.__dataclass_fields__ if k in doc}
        unknown = set(doc) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "n_list" in known:
            known["n_list"] = tuple(int(n) for n in known["n_list"])
        return cls(**known)


def run_experiment(cfg: ExperimentConfig, svg: bool = True) -> list[ReportRow | None]:
    """Generate, fit and write every per-``n`` artifact plus ``summary.csv``."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows: list[ReportRow | None] = []
    for n in cfg.n_list:
        gen = GenConfig(n=n, mu_scale=cfg.mu_scale, rng_seed=cfg.rng_seed)
        run = run_sample(gen, cfg.m, workers=cfg.workers)
        flags = ["low-sample"] if cfg.m < LOW_SAMPLE else []
        try:
            row: ReportRow | None = summarize_sample(n, run.rhos, cfg.bins)
        except BigBossError as exc:
            log.warning("n=%d: fit failed (%s)", n, exc)
            flags.append("fit-failed")
            row = None
        io.write_sample_csv(run, out / f"samples_n{n}.csv")
        io.write_sample_metadata(run, out / f"samples_n{n}.meta.json", flags=flags)
        if svg:
            from .plotting import histogram_svg

            h = fitting_histogram(run.rhos, cfg.bins)
            histogram_svg(h, row.fit if row else None, out / f"hist_n{n}.svg", f"n = {n}, m = {cfg.m}")
        rows.append(row)
    io.write_report_csv([r for r in rows if r is not None], out / "summary.csv")
    return rows


def cmd_experiment(args: argparse.Namespace) -> int:
    try:
        doc = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read {args.config}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise _Exit(EXIT_IO, f"{args.config}: invalid JSON: {exc}") from None
    overrides = {
        "rng_seed": args.seed,
        "bins": args.bins,
        "mu_scale": args.mu_scale,
        "m": args.samples,
        "output_dir": args.out,
        "workers": args.workers,
    }
    try:
        cfg = ExperimentConfig.from_dict(doc)
        cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    except (TypeError, ValueError) as exc:
        raise _Exit(EXIT_IO, f"{args.config}: {exc}") from None
    try:
        rows = run_experiment(cfg, svg=not args.no_svg)
    except RejectionBudgetExhausted as exc:
        raise _Exit(EXIT_DOMAIN, str(exc)) from None
    if cfg.m < LOW_SAMPLE:
        log.warning("m=%d is below %d: statistics are low-sample", cfg.m, LOW_SAMPLE)
    header = "  ".join(f"{c:>12}" for c in ReportRow.COLUMNS)
    lines = [header]
    for n, row in zip(cfg.n_list, rows):
        if row is None:
            lines.append(f"{n:>12}  (fit failed)")
            continue
        vals = row.values()
        lines.append("  ".join([f"{vals[0]:>12}", f"{vals[1]:>12}", *(f"{x:>12.5g}" for x in vals[2:])]))
    record = {
        "output_dir": cfg.output_dir,
        "low_sample": cfg.m < LOW_SAMPLE,
        "rows": [dict(zip(ReportRow.COLUMNS, r.values())) if r else None for r in rows],
    }
    _emit(args, record, "\n".join(lines))
    return EXIT_OK


# predict ----------------------------------------------------------------


def predict_record(rows: list[dict[str, float]], n: int, window: int = 3, sigma: float | None = None) -> dict[str, Any]:
    rows = sorted(rows, key=lambda r: r["n"])
    reg = log_regression([(int(r["n"]), r["mu_hat"]) for r in rows])
    if sigma is None:
        if not all("sigma_hat" in r for r in rows):
            raise ValueError("report has no sigma_hat column; pass --sigma")
        _, sigma = moving_average_predict([r["sigma_hat"] for r in rows], window)
    return {
        "n": n,
        "slope": reg.slope,
        "intercept": reg.intercept,
        "r_squared": reg.r_squared,
        "mu_hat": reg(n),
        "sigma_hat": sigma,
        "P_le_1": predict_p_le_1(n, reg, sigma),
    }


def cmd_predict(args: argparse.Namespace) -> int:
    try:
        rows = io.read_report_csv(args.report)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read {args.report}: {exc.strerror}") from None
    except (BigBossError, ValueError, KeyError) as exc:
        raise _Exit(EXIT_IO, f"{args.report}: {exc}") from None
    try:
        rec = predict_record(rows, args.n, args.window, args.sigma)
    except InsufficientPoints as exc:
        raise _Exit(EXIT_DOMAIN, str(exc)) from None
    except ValueError as exc:
        raise _Exit(EXIT_IO, str(exc)) from None
    text = (
        f"n = {rec['n']}: mu_hat = {rec['mu_hat']:.5f}, sigma_hat = {rec['sigma_hat']:.5f}, "
        f"P(X <= 1) = {rec['P_le_1']:.5f}\n"
        f"regression: mu_hat = {rec['slope']:.5f} ln(n) {rec['intercept']:+.5f}  (R^2 = {rec['r_squared']:.4f})"
    )
    _emit(args, rec, text)
    return EXIT_OK


# entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bigboss", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def fmt_flag(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--format", choices=("text", "machine"), default="text")

    sp = sub.add_parser("validate", help="check the Big Boss axioms for a game file")
    sp.add_argument("path")
    fmt_flag(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("solve", help="Shapley, tau, and projected allocations")
    sp.add_argument("path")
    sp.add_argument("--out", help="also write the machine-readable record here")
    fmt_flag(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("experiment", help="sample random games and fit rho")
    sp.add_argument("config", help="JSON experiment config")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--bins", type=int)
    sp.add_argument("--mu-scale", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--out")
    sp.add_argument("--workers", type=int)
    sp.add_argument("--no-svg", action="store_true")
    fmt_flag(sp)
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("predict", help="extrapolate the log-normal parameters to n players")
    sp.add_argument("n", type=int)
    sp.add_argument("report", help="summary CSV with n, mu_hat and sigma_hat columns")
    sp.add_argument("--window", type=int, default=3)
    sp.add_argument("--sigma", type=float, help="use this sigma instead of the smoothed one")
    fmt_flag(sp)
    sp.set_defaults(func=cmd_predict)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
