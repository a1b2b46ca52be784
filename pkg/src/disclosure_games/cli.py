"""Command-line entry point: ``disclosure-games {fit,estimate,solve,simulate}``.

Every run writes its outputs plus a ``manifest.json`` with the resolved
configuration into ``--out-dir``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import DEFAULTS, Tolerances
from .dataset import (
    DatasetError,
    aggregate_articles,
    load_records,
    simulate_dataset,
    write_records_csv,
)
from .equilibrium import (
    all_disclose_by_deviation,
    brute_force_pure_equilibria,
    certificate_from_profile,
    check_all_disclose,
    check_all_withhold,
    construct_threshold_equilibrium,
    solve_equilibria,
    verify_kkt,
)
from .estimation import (
    correlate_x_beta,
    estimate_betas,
    estimate_strategies,
    fit_null_linear,
    fit_power_law,
    residual_diagnostics,
    residual_histogram,
)
from .game import GameSpec

log = logging.getLogger("disclosure_games")

DEFAULT_SEED = 20150301
DEFAULT_LOG_A = 2.2
DEFAULT_GAMMA = 0.71


def _num(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v)


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in row])


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_hist(path: Path, values, bins) -> None:
    if len(values):
        edges, counts = residual_histogram(values, bins=bins)
        rows = [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(len(counts))]
    else:
        rows = []
    _write_csv(path, ["bin_left", "bin_right", "count"], rows)


def _manifest(args, out: Path) -> None:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    _write_json(
        out / "manifest.json",
        {
            "command": args.command,
            "config": config,
            "seed": getattr(args, "seed", None),
            "versions": {
                "disclosure_games": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": platform.python_version(),
            },
        },
    )


def _load_game(spec: str) -> GameSpec:
    text = spec.strip()
    if not text.startswith("{"):
        text = Path(spec).read_text(encoding="utf-8")
    return GameSpec.from_json(text)


def _tolerances(args) -> Tolerances:
    kw = {}
    if getattr(args, "tol", None) is not None:
        kw["kkt"] = args.tol
    if getattr(args, "enum_cap", None) is not None:
        kw["support_cap"] = args.enum_cap
    return Tolerances(**{**DEFAULTS.__dict__, **kw})


def _load(args):
    result = load_records(args.input, args.format)
    for line, reason in result.rejected:
        log.warning("line %d rejected: %s", line, reason)
    return result.records


# --- subcommands ---------------------------------------------------------


def cmd_fit(args) -> int:
    out = Path(args.out_dir)
    records = _load(args)
    aggregates = aggregate_articles(records)
    power = fit_power_law(aggregates)
    null = fit_null_linear(aggregates)
    diag = residual_diagnostics(power)
    null_diag = residual_diagnostics(null)

    report = {
        "n_records": len(records),
        "n_articles": len(aggregates),
        "power_law": power.to_dict(),
        "null_linear": null.to_dict(),
        "power_law_residuals": diag.to_dict(),
        "null_linear_residuals": null_diag.to_dict(),
        "aic_comparison": {
            "power_law": power.aic,
            "null_linear": null.aic,
            "preferred": "power_law" if power.aic < null.aic else "null_linear",
            "note": "each AIC is on its own response scale (log R vs R); "
            "recompute from rss, n and k for other conventions",
        },
    }
    _write_json(out / "fit_report.json", report)
    order = np.argsort(power.s, kind="stable")
    _write_csv(
        out / "powerlaw_fit.csv",
        ["s", "observed_r", "fitted_r"],
        [(float(power.s[i]), float(power.r[i]), float(power.predict(power.s[i]))) for i in order],
    )
    order = np.argsort(null.s, kind="stable")
    _write_csv(
        out / "null_fit.csv",
        ["s", "observed_r", "fitted_r"],
        [(float(null.s[i]), float(null.r[i]), float(null.predict(null.s[i]))) for i in order],
    )
    _write_hist(out / "residual_hist.csv", power.residuals, bins=args.bins)
    _write_csv(out / "qq.csv", ["theoretical_q", "sample_q"], [(float(a), float(b)) for a, b in diag.qq_points])
    _manifest(args, out)

    print(f"articles: {power.n_articles} used for the power law, {null.n_articles} for the null model")
    print(f"{'Parameter':<10} {'Value':>10} {'p-Value':>12}   Confid. Ival.")
    for name, val, p, ci in (
        ("log(A)", power.log_A, power.p_log_A, power.ci_log_A),
        ("gamma", power.gamma, power.p_gamma, power.ci_gamma),
    ):
        print(f"{name:<10} {val:>10.4f} {p:>12.3g}   ({ci[0]:.4f}, {ci[1]:.4f})")
    print(f"R2-adj {power.r2_adjusted:.4f} (null {null.r2_adjusted:.4f}); "
          f"AIC {power.aic:.2f} (null {null.aic:.2f})")
    print(f"Jarque-Bera {diag.jarque_bera_stat:.4f}, p = {diag.jarque_bera_p:.4g}")
    return 0


def cmd_estimate(args) -> int:
    out = Path(args.out_dir)
    records = _load(args)
    if args.log_a is not None and args.gamma is not None:
        log_a, gamma = args.log_a, args.gamma
    else:
        power = fit_power_law(aggregate_articles(records))
        log_a = power.log_A if args.log_a is None else args.log_a
        gamma = power.gamma if args.gamma is None else args.gamma
    A = math.exp(log_a)
    strategies = estimate_strategies(records, min_posts=args.min_posts)
    if not strategies:
        log.warning("no user meets --min-posts %d", args.min_posts)
    result = estimate_betas(records, strategies, A, gamma, min_proper=args.min_proper, cap=args.cap)

    _write_csv(
        out / "xhat.csv",
        ["user_id", "x_hat", "n_posts", "n_disclosing", "n_articles"],
        [(s.user_id, float(s.x_hat), s.n_posts, s.n_disclosing, s.n_articles) for s in strategies],
    )
    _write_csv(
        out / "betahat.csv",
        ["user_id", "beta_hat", "n_articles_used"],
        [(b.user_id, float(b.beta_hat), b.n_articles_used) for b in result.estimates],
    )
    _write_hist(out / "xhat_hist.csv", [s.x_hat for s in strategies], bins=np.linspace(0.0, 1.0, 21))
    _write_hist(out / "betahat_hist.csv", [b.beta_hat for b in result.estimates], bins=args.bins)

    xhat = {s.user_id: s.x_hat for s in strategies}
    pairs = [(xhat[b.user_id], b.beta_hat) for b in result.estimates]
    doc = {
        "log_A": log_a,
        "A": A,
        "gamma": gamma,
        "x_bar": None if math.isnan(result.x_bar) else result.x_bar,
        "n_strategies": len(strategies),
        "n_beta": len(result.estimates),
        "n_articles_used": result.n_articles_used,
        "excluded": result.excluded,
        "fit": None,
    }
    try:
        doc["fit"] = correlate_x_beta(pairs).to_dict()
    except ValueError as exc:
        log.warning("x_hat vs beta_hat regression skipped: %s", exc)
        doc["fit_skipped"] = str(exc)
    _write_json(out / "x_vs_beta.json", doc)
    _manifest(args, out)

    print(f"A = {A:.4f} (log A = {log_a:.4f}), gamma = {gamma:.4f}")
    print(f"{len(strategies)} strategy estimates, {len(result.estimates)} cost estimates")
    if doc["fit"]:
        f = doc["fit"]
        print(f"x_hat ~ {f['intercept']:.4f} + {f['slope']:.4f} beta_hat (slope p = {f['p_values'][1]:.3g})")
    return 0


def cmd_solve(args) -> int:
    out = Path(args.out_dir)
    if not args.game:
        raise ValueError("solve needs --game (a JSON file or inline JSON)")
    g = _load_game(args.game)
    opts = _tolerances(args)
    report = solve_equilibria(g, opts, seed=args.seed)
    threshold = construct_threshold_equilibrium(g)
    doc = {
        "game": g.to_dict(),
        "report": report.to_dict(),
        "threshold_equilibrium": None,
        "all_withhold": check_all_withhold(g),
        "all_disclose": check_all_disclose(g),
        "all_disclose_by_deviation": all_disclose_by_deviation(g),
    }
    if threshold is not None:
        cert = certificate_from_profile(g, threshold.x)
        doc["threshold_equilibrium"] = {**cert.to_dict(), "kkt_valid": bool(verify_kkt(g, cert, opts.kkt))}
    if doc["all_disclose"] != doc["all_disclose_by_deviation"]:
        doc["all_disclose_note"] = "literal A >= max beta disagrees with the deviation check"
    if g.n <= 20:
        doc["brute_force_pure"] = [list(o.delta) for o in brute_force_pure_equilibria(g)]
    _write_json(out / "equilibria.json", doc)
    _manifest(args, out)

    print(f"{len(report.certificates)} equilibria (degenerate: {report.degenerate})")
    for cert in report.certificates:
        print("  x = [" + ", ".join(f"{v:.6g}" for v in cert.x) + "]")
    return 0


def cmd_simulate(args) -> int:
    out = Path(args.out_dir)
    if args.game:
        g = _load_game(args.game)
    else:
        g = GameSpec(math.exp(DEFAULT_LOG_A), DEFAULT_GAMMA, [1.0])
    sim = simulate_dataset(
        g,
        args.n_articles,
        args.noise_sigma,
        args.seed,
        n_users=args.n_users,
        mean_users=args.mean_users,
    )
    write_records_csv(sim.records, out / "comments.csv")
    _write_csv(out / "true_strategies.csv", ["user_id", "x"], [(u, float(x)) for u, x in sim.x_true.items()])
    _manifest(args, out)
    print(f"A = {g.A:.6g} (log A = {math.log(g.A):.6g}), gamma = {g.gamma:.6g}, "
          f"noise sigma = {args.noise_sigma:g}, seed = {args.seed}")
    print(f"{len(sim.records)} comments over {args.n_articles} articles written to {out / 'comments.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="disclosure-games", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="comment table (CSV or JSON lines)")
            p.add_argument("--format", choices=["csv", "jsonl"], default=None,
                           help="input format (default: from the file suffix)")
        p.add_argument("--out-dir", required=True, help="directory for output files")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")

    p = sub.add_parser("fit", help="fit the power-law reward and the null linear model")
    common(p)
    p.add_argument("--bins", type=int, default=30, help="residual histogram bins (default 30)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("estimate", help="estimate user strategies and disclosure costs")
    common(p)
    p.add_argument("--min-posts", type=int, default=15, help="minimum distinct articles per user (default 15)")
    p.add_argument("--min-proper", type=int, default=3,
                   help="users with an estimate needed in an article (default 3)")
    p.add_argument("--cap", type=int, default=8, help="users per cost enumeration (default 8)")
    p.add_argument("--log-a", type=float, default=None, help="override log A (default: fit from input)")
    p.add_argument("--gamma", type=float, default=None, help="override gamma (default: fit from input)")
    p.add_argument("--bins", type=int, default=20, help="cost histogram bins (default 20)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("solve", help="compute equilibria of one game")
    common(p, needs_input=False)
    p.add_argument("--game", required=True, help='JSON file or inline {"A":..,"gamma":..,"beta":[..]}')
    p.add_argument("--enum-cap", type=int, default=DEFAULTS.support_cap,
                   help=f"largest n for support enumeration (default {DEFAULTS.support_cap})")
    p.add_argument("--tol", type=float, default=DEFAULTS.kkt, help=f"KKT tolerance (default {DEFAULTS.kkt:g})")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="generate a synthetic comment table")
    common(p, needs_input=False)
    p.add_argument("--game", default=None, help="JSON game whose A and gamma are used "
                   f"(default A = e^{DEFAULT_LOG_A}, gamma = {DEFAULT_GAMMA})")
    p.add_argument("--n-articles", type=int, default=2000)
    p.add_argument("--noise-sigma", type=float, default=0.5)
    p.add_argument("--n-users", type=int, default=400)
    p.add_argument("--mean-users", type=float, default=4.0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
