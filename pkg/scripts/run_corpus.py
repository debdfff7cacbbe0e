#!/usr/bin/env python3
"""Run the random corpora and print per-family summaries.

Examples:
    python scripts/run_corpus.py --kind mcst --count 200
    python scripts/run_corpus.py --kind lattice --count 50 --seed 99
    python scripts/run_corpus.py --kind all
"""

import argparse
import random
import sys
import time
from collections import Counter

from crossopt.brute import brute_subset_opt
from crossopt.instances import INCLUSION
from crossopt.intersection import run_intersection, verify_intersection
from crossopt.lattice import bound_feasible_predicate, run_lattice, verify_lattice
from crossopt.mcst import run_mcst, verify_guarantee
from crossopt.randgen import (
    CorpusConfig,
    mcst_corpus,
    random_intersection_instance,
    random_lattice_instance,
)
from crossopt.rational import as_float


def run_mcst_corpus(count, seed):
    corpus = mcst_corpus(CorpusConfig(count=count, seed=seed))
    started = time.perf_counter()
    rounds = Counter()
    worst_gap = None
    for inst in corpus:
        tree, trace = run_mcst(inst)
        report = verify_guarantee(inst, tree, trace)
        assert report.ok, report.failures
        rounds[report.t_rounds] += 1
        gap = trace.initial_lp_objective() - inst.graph.cost_of(tree)
        if worst_gap is None or gap > worst_gap:
            worst_gap = gap
    elapsed = time.perf_counter() - started
    print(
        f"mcst: {count} runs in {elapsed:.1f}s, drop-round histogram "
        f"{dict(sorted(rounds.items()))}, max cost headroom "
        f"{as_float(worst_gap):.3f}"
    )


def run_intersection_corpus(count, seed):
    rng = random.Random(seed)
    started = time.perf_counter()
    slack = Counter()
    for _ in range(count):
        inst = random_intersection_instance(rng)
        sol, events, opt = run_intersection(inst)
        report = verify_intersection(inst, sol, opt)
        assert report.ok, report.failures
        worst = max(
            (
                (sol & c.elems).bit_count() - int(c.upper)
                for c in inst.constraints
            ),
            default=0,
        )
        slack[max(worst, 0)] += 1
    elapsed = time.perf_counter() - started
    print(
        f"intersection: {count} runs in {elapsed:.1f}s, "
        f"bound-excess histogram {dict(sorted(slack.items()))}"
    )


def run_lattice_corpus(count, seed):
    rng = random.Random(seed)
    started = time.perf_counter()
    optimal = 0
    for i in range(count):
        variant = INCLUSION if i % 3 == 0 else "general"
        inst = random_lattice_instance(rng, variant=variant)
        sol, events, opt = run_lattice(inst)
        _, brute = brute_subset_opt(
            inst.n, bound_feasible_predicate(inst), inst.costs
        )
        report = verify_lattice(inst, sol, brute)
        assert report.ok, report.failures
        cost = sum((inst.costs[e] for e in range(inst.n) if (sol >> e) & 1), 0)
        if brute is not None and cost == brute:
            optimal += 1
    elapsed = time.perf_counter() - started
    print(
        f"lattice: {count} runs in {elapsed:.1f}s, "
        f"{optimal} matched the bound-feasible brute optimum exactly"
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--kind", choices=["mcst", "intersection", "lattice", "all"], default="all"
    )
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--seed", type=int, default=2010)
    args = parser.parse_args()
    if args.kind in ("mcst", "all"):
        run_mcst_corpus(args.count, args.seed)
    if args.kind in ("intersection", "all"):
        run_intersection_corpus(args.count, args.seed)
    if args.kind in ("lattice", "all"):
        run_lattice_corpus(args.count, args.seed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
