"""Auto-RJ against evidence-based Bayes factors on random graphs with the Gahuku-Gama dimensions."""

import argparse
import math

import numpy as np

from ergmselect.evidence import PathSchedule, log_evidence
from ergmselect.experiments import EXAMPLES, EvidenceSettings, SelectionSettings
from ergmselect.graph import from_edge_list
from ergmselect.modelselect import run_selection
from ergmselect.records import substream

p = argparse.ArgumentParser()
p.add_argument("--graphs", type=int, default=3)
p.add_argument("--iterations", type=int, default=100_000)
p.add_argument("--seed", type=int, default=0)
args = p.parse_args()

space = EXAMPLES["gamaneg"].space()
pairs = [(i, j) for i in range(1, 17) for j in range(i + 1, 17)]
sel = SelectionSettings(iterations=args.iterations)
ev = EvidenceSettings(PathSchedule(I=100, draws_per_point=500))
for r in range(args.graphs):
    rng = substream(args.seed, "graph", r)
    y = from_edge_list(16, [pairs[i] for i in rng.choice(len(pairs), 29, replace=False)])
    res = run_selection("auto", space, y, None, sel.iterations, substream(args.seed, "rj", r), aux_cfg=sel.aux(),
                        offline_cfg=sel.offline)
    le = np.array([log_evidence(y, m, None, ev.path, ev.posterior(m), substream(args.seed, "ev", r, m.id)).log_evidence
                   for m in space.models])
    for k in (1, 2):
        rj, eb = res.bayes_factors[0, k], math.exp(le[0] - le[k])
        print(f"graph {r}: BF_1,{k + 1} auto-RJ {rj:9.2f}  evidence {eb:9.2f}  |log ratio| {abs(math.log(rj / eb)):.3f}")
