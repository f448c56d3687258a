"""Reproduce one of the worked examples (needs the dataset fixtures).

    python scripts/run_example.py gamaneg --method auto --evidence --out runs/gamaneg
    python scripts/run_example.py lazega1 --smoke
"""

import argparse
import math
from pathlib import Path

import numpy as np

from ergmselect.datasets import fixture_available
from ergmselect.experiments import EXAMPLES, LAZEGA1_SMOKE, run_example_evidence, run_example_selection
from ergmselect.modelselect import kass_raftery
from ergmselect.records import write_csv, write_json


def main():
    p = argparse.ArgumentParser()
    p.add_argument("example", choices=sorted(EXAMPLES))
    p.add_argument("--method", choices=("auto", "pilot"), default="auto")
    p.add_argument("--evidence", action="store_true", help="also run the path-sampling evidence estimator")
    p.add_argument("--smoke", action="store_true", help="reduced Lazega Example 1 settings")
    p.add_argument("--seed", type=int, default=2012)
    p.add_argument("--out", default=None)
    args = p.parse_args()

    ex = LAZEGA1_SMOKE if (args.smoke and args.example == "lazega1") else EXAMPLES[args.example]
    if not fixture_available(ex.fixture):
        raise SystemExit(f"fixture {ex.fixture!r} not found; see ergmselect.datasets for where to put it")
    out = Path(args.out or f"runs/{ex.name}_{args.method}")
    out.mkdir(parents=True, exist_ok=True)
    space = ex.space()

    res, secs = run_example_selection(ex, args.seed, args.method)
    print(f"{ex.name} {args.method}: {secs / 60:.1f} min, between-model acceptance {res.between_acceptance:.3f}")
    for m, d, pp, acc in zip(space.models, res.draws, res.post_probs, res.within_acceptance):
        print(f"  m{m.id}: p = {pp:.3f}, within acc {acc:.2f}")
        if len(d) > 1:
            for lab, mu, sd in zip(m.labels, d.mean(axis=0), d.std(axis=0, ddof=1)):
                print(f"      {lab:24s} {mu:7.2f} {sd:6.2f}")
        write_csv(out / f"draws_model{m.id}.csv", m.labels, d)
    bf = res.bayes_factors
    best = int(np.argmax(res.post_probs))
    for k in range(len(space)):
        if k != best:
            print(f"  BF_{space.ids[best]},{space.ids[k]} = {bf[best, k]:.2f} ({kass_raftery(bf[best, k])})")
    write_json(out / "result.json", {"post_probs": res.post_probs, "bayes_factors": bf, "seconds": secs,
                                     "within_acceptance": res.within_acceptance,
                                     "between_acceptance": res.between_acceptance})

    if args.evidence:
        est, bf_ev, secs = run_example_evidence(ex, args.seed)
        print(f"evidence: {secs / 60:.1f} min")
        for e in est:
            print(f"  m{e.model_id}: log p(y) = {e.log_evidence:.3f} (log z se {e.log_z_se:.3f})")
            write_csv(out / f"path_model{e.model_id}.csv", ["t", "expected_theta_s", "se"],
                      zip(e.path.t, e.path.e_hat, e.path.e_se))
        for k in range(len(space)):
            if k != best:
                print(f"  BF_{space.ids[best]},{space.ids[k]} = {bf_ev[best, k]:.2f}"
                      f"  (|log diff| vs RJ {abs(math.log(bf_ev[best, k]) - math.log(bf[best, k])):.3f})")
        write_json(out / "evidence.json", {"models": [e.to_dict() for e in est], "bayes_factors": bf_ev})


if __name__ == "__main__":
    main()
