"""Command-line entry point: ``ergmselect {fit,select,evidence,simulate,summary}``.

Exit status: 0 on success, 1 for unreadable or invalid inputs, 2 when a
run fails after its inputs were accepted.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .evidence import PathSchedule, bf_from_evidence, log_evidence
from .exchange import ExchangeConfig, PosteriorSample, run_exchange, summarize
from .graph import Graph, GraphError, read_covariates, read_edge_list
from .modelselect import ModelSpace, PilotTuning, kass_raftery, load_space, run_selection
from .records import read_csv_matrix, substream, write_csv, write_json
from .sampler import SimConfig, sample_statistics
from .stats import ModelError

log = logging.getLogger("ergmselect")


class InputError(Exception):
    """Raised for problems with user-supplied files or flags (exit status 1)."""


def _load_inputs(args, need_data: bool = True):
    try:
        g = None
        if args.data:
            g = read_edge_list(args.data, n=getattr(args, "nodes", None))
        elif need_data:
            raise InputError("--data is required")
        covs = {}
        if args.covariates:
            covs = read_covariates(args.covariates, n=g.n if g is not None else None)
        if not args.models:
            raise InputError("--models is required")
        space = load_space(args.models)
        if getattr(args, "model_id", None) is not None:
            keep = [m for m in space.models if str(m.id) == str(args.model_id)]
            if not keep:
                raise InputError(f"model id {args.model_id} not in {args.models}")
            space = ModelSpace(tuple(keep))
        n = g.n if g is not None else args.nodes
        from .stats import compile_model
        for m in space.models:
            compile_model(m, covs, n)
    except (OSError, GraphError, ModelError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from exc
    return g, covs, space


def _manifest(args, out: Path, started: float, extra: dict | None = None) -> None:
    import numba
    import scipy

    manifest = {
        "command": args.command,
        "arguments": {k: v for k, v in vars(args).items() if k not in ("func",)},
        "seed": args.seed,
        "wall_time_seconds": time.time() - started,
        "versions": {
            "ergmselect": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "numba": numba.__version__,
        },
    }
    if extra:
        manifest.update(extra)
    write_json(out / f"manifest_{args.command}.json", manifest)


def _draws_csv(path: Path, labels, draws: np.ndarray) -> None:
    write_csv(path, list(labels), draws)


def _bf_table(ids, bf: np.ndarray) -> list[dict]:
    rows = []
    for h, mh in enumerate(ids):
        for k, mk in enumerate(ids):
            if h != k:
                rows.append({"h": mh, "k": mk, "bf": bf[h, k], "interpretation": kass_raftery(bf[h, k])})
    return rows


def cmd_fit(args) -> dict:
    g, covs, space = _load_inputs(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    aux = SimConfig(iterations=args.aux_iters, init="observed")
    summary = {"seed": args.seed, "models": []}
    for m in space.models:
        cfg = ExchangeConfig.per_dimension(m.dim, args.iterations, args.burn_in, aux=aux,
                                           proposal_scale=args.scale)
        sample = run_exchange(g, m, covs, cfg, substream(args.seed, "fit", m.id))
        _draws_csv(out / f"draws_model{m.id}.csv", m.labels, sample.draws)
        gs = summarize(sample)
        summary["models"].append({
            "id": m.id, "labels": m.labels, "means": sample.means(), "sds": sample.sds(),
            "covariance": gs.cov, "acceptance_rate": sample.acceptance_rate,
        })
    write_json(out / "summary.json", summary)
    return summary


def cmd_select(args) -> dict:
    g, covs, space = _load_inputs(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    aux = SimConfig(iterations=args.aux_iters, init="observed")
    kwargs = {}
    if args.method == "auto":
        kwargs["offline_cfg"] = lambda m: ExchangeConfig.per_dimension(
            m.dim, args.offline_per_dim, args.offline_burn_per_dim, aux=aux)
    else:
        kwargs["tuning"] = PilotTuning.default(space, args.pilot_scale, args.birth_sd)
    res = run_selection(args.method, space, g, covs, args.iterations, substream(args.seed, "select"),
                        aux_cfg=aux, **kwargs)
    ids = list(res.model_ids)
    result = {
        "seed": args.seed,
        "method": args.method,
        "iterations": args.iterations,
        "model_ids": ids,
        "labels": [m.labels for m in space.models],
        "visit_counts": res.visit_counts,
        "post_probs": res.post_probs,
        "bayes_factors": res.bayes_factors,
        "bayes_factor_table": _bf_table(ids, res.bayes_factors),
        "within_acceptance": res.within_acceptance,
        "between_acceptance": res.between_acceptance,
        "posterior": [
            {"id": m.id, "means": d.mean(axis=0) if len(d) else None,
             "sds": d.std(axis=0, ddof=1) if len(d) > 1 else None, "n": len(d)}
            for m, d in zip(space.models, res.draws)
        ],
        "offline": [
            {"id": m.id, "mean": s.mean, "cov": s.cov} for m, s in zip(space.models, res.summaries)
        ],
    }
    write_json(out / "result.json", result)
    for m, d in zip(space.models, res.draws):
        _draws_csv(out / f"draws_model{m.id}.csv", m.labels, d)
    write_csv(out / "trace.csv", ["iteration", "model"], ((t, ids[k]) for t, k in enumerate(res.trace)))
    return result


def cmd_evidence(args) -> dict:
    g, covs, space = _load_inputs(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    aux = SimConfig(iterations=args.aux_iters, init="observed")
    sched = PathSchedule(I=args.path_points, c=args.schedule_c, draws_per_point=args.draws_per_point,
                         aux=SimConfig(iterations=args.path_iters, burn_in=args.path_burn))
    estimates = []
    for m in space.models:
        cfg = ExchangeConfig.per_dimension(m.dim, args.posterior_per_dim, args.burn_in, aux=aux)
        est = log_evidence(g, m, covs, sched, cfg, substream(args.seed, "evidence", m.id))
        estimates.append(est)
        write_csv(out / f"path_model{m.id}.csv", ["t", "expected_theta_s", "se"],
                  zip(est.path.t, est.path.e_hat, est.path.e_se))
    ids = [m.id for m in space.models]
    H = len(estimates)
    bf = np.array([[bf_from_evidence(estimates[h], estimates[k]) if h != k else 1.0 for k in range(H)]
                   for h in range(H)])
    result = {"seed": args.seed, "models": [e.to_dict() for e in estimates], "model_ids": ids,
              "bayes_factors": bf, "bayes_factor_table": _bf_table(ids, bf)}
    write_json(out / "evidence.json", result)
    return result


def cmd_simulate(args) -> dict:
    g, covs, space = _load_inputs(args, need_data=False)
    if g is None and not args.nodes:
        raise InputError("simulate needs --data or --nodes")
    if len(space.models) != 1:
        raise InputError("simulate needs exactly one model (use --model-id)")
    m = space.models[0]
    try:
        theta = np.array([float(v) for v in args.theta.split(",")])
    except ValueError as exc:
        raise InputError(f"--theta must be comma-separated numbers: {args.theta!r}") from exc
    if theta.size != m.dim:
        raise InputError(f"--theta has {theta.size} values, model {m.id} has {m.dim} statistics")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    init = "observed" if (g is not None and args.start == "observed") else "empty"
    cfg = SimConfig(iterations=args.iterations, burn_in=args.burn_in, init=init)
    rec = sample_statistics(theta, m, covs, args.draws, cfg, substream(args.seed, "simulate"),
                            observed=g, n=args.nodes)
    write_csv(out / "simulate.csv", m.labels, rec)
    return {"draws": args.draws, "mean": rec.mean(axis=0)}


def _fmt_table(rows: list[list[str]]) -> str:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(r, widths)) for r in rows)


def cmd_summary(args) -> dict:
    inp = Path(args.input)
    if not inp.is_dir():
        raise InputError(f"summary input directory not found: {inp}")
    lines = []
    draws_files = sorted(inp.glob("draws_model*.csv"))
    tables = {}
    for f in draws_files:
        try:
            labels, draws = read_csv_matrix(f)
        except ValueError as exc:
            raise InputError(f"{f}: {exc}") from exc
        mid = f.stem.removeprefix("draws_model")
        tables[mid] = {"labels": labels, "n": len(draws),
                       "means": draws.mean(axis=0) if len(draws) else [],
                       "sds": draws.std(axis=0, ddof=1) if len(draws) > 1 else []}
        lines.append(f"Model m{mid} ({len(draws)} draws)")
        rows = [["Parameter", "Post. Mean", "Post. Sd."]]
        for j, lab in enumerate(labels):
            mean = f"{draws[:, j].mean():.2f}" if len(draws) else "-"
            sd = f"{draws[:, j].std(ddof=1):.2f}" if len(draws) > 1 else "-"
            rows.append([f"theta_{j + 1} ({lab})", mean, sd])
        lines.append(_fmt_table(rows))
        lines.append("")
    bfs = []
    for name in ("result.json", "evidence.json"):
        p = inp / name
        if p.exists():
            data = json.loads(p.read_text())
            if "post_probs" in data:
                lines.append("Posterior model probabilities")
                lines.append(_fmt_table([["Model", "p(m|y)"]] + [
                    [f"m{i}", f"{pp:.2f}"] for i, pp in zip(data["model_ids"], data["post_probs"])]))
                lines.append("")
            rows = [["BF", "Estimate", "Evidence against m_k"]]
            for r in data.get("bayes_factor_table", []):
                bf = r["bf"]
                bf_f = float(bf) if bf is not None else math.nan
                if bf_f >= 1.0:
                    rows.append([f"BF_{r['h']},{r['k']} ({name.split('.')[0]})", f"{bf_f:.2f}", r["interpretation"]])
                    bfs.append(r)
            if len(rows) > 1:
                lines.append(_fmt_table(rows))
                lines.append("")
    text = "\n".join(lines)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.txt").write_text(text + "\n")
    print(text)
    return {"tables": tables, "bayes_factors": bfs}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", help="edge list file (1-based node ids)")
    common.add_argument("--covariates", help="node covariate table with a header row")
    common.add_argument("--models", help="JSON model config")
    common.add_argument("--model-id", help="restrict to one model id from the config")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="out")
    common.add_argument("--nodes", type=int, help="node count (simulate without --data, or isolated trailing nodes)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ergmselect", description="Bayesian model selection for ERGMs.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", parents=[common], help="exchange-algorithm posterior sample per model")
    f.add_argument("--iterations", type=int, default=1000, help="retained iterations per model dimension")
    f.add_argument("--burn-in", type=int, default=100, help="burn-in iterations per model dimension")
    f.add_argument("--aux-iters", type=int, default=3000)
    f.add_argument("--scale", type=float, default=0.1, help="initial random-walk scale")
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("select", parents=[common], help="reversible jump exchange model selection")
    s.add_argument("--method", choices=("auto", "pilot"), default="auto")
    s.add_argument("--iterations", type=int, default=100_000)
    s.add_argument("--aux-iters", type=int, default=3000)
    s.add_argument("--offline-per-dim", type=int, default=1000)
    s.add_argument("--offline-burn-per-dim", type=int, default=100)
    s.add_argument("--pilot-scale", type=float, default=0.1)
    s.add_argument("--birth-sd", type=float, default=5.0)
    s.set_defaults(func=cmd_select)

    e = sub.add_parser("evidence", parents=[common], help="path sampling + KDE evidence per model")
    e.add_argument("--path-points", type=int, default=100)
    e.add_argument("--schedule-c", type=float, default=1.0)
    e.add_argument("--draws-per-point", type=int, default=500)
    e.add_argument("--path-iters", type=int, default=1000, help="proposals between recorded path draws")
    e.add_argument("--path-burn", type=int, default=1000, help="burn-in proposals at each path point")
    e.add_argument("--posterior-per-dim", type=int, default=5000, help="retained posterior draws per dimension")
    e.add_argument("--burn-in", type=int, default=100, help="burn-in iterations per model dimension")
    e.add_argument("--aux-iters", type=int, default=3000)
    e.set_defaults(func=cmd_evidence)

    m = sub.add_parser("simulate", parents=[common], help="simulate networks at fixed parameters")
    m.add_argument("--theta", required=True, help="comma-separated parameter values")
    m.add_argument("--iterations", type=int, default=3000, help="proposals between draws")
    m.add_argument("--burn-in", type=int, default=10_000)
    m.add_argument("--draws", type=int, default=100)
    m.add_argument("--start", choices=("empty", "observed"), default="empty")
    m.set_defaults(func=cmd_simulate)

    u = sub.add_parser("summary", help="tables from fit/select/evidence outputs")
    u.add_argument("--input", required=True, help="directory written by fit, select or evidence")
    u.add_argument("--out", default="out")
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("-v", "--verbose", action="store_true")
    u.set_defaults(func=cmd_summary)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.time()
    try:
        args.func(args)
    except InputError as exc:
        print(f"ergmselect {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"ergmselect {args.command}: failed: {exc}", file=sys.stderr)
        return 2
    _manifest(args, Path(args.out), started)
    return 0


if __name__ == "__main__":
    sys.exit(main())
