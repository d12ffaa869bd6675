"""Monte-Carlo check of probabilistic transition sampling.

Builds a two-way probabilistic branch for several weight pairs and
measures the empirical branch frequency over many seeded runs, next to
the normalized weight it should approach.

Usage: python scripts/branch_frequencies.py [runs-per-pair]
"""
from __future__ import annotations

import random
import sys

from goalnet.model import Point, StateKind, TransitionKind, create_goal_net
from goalnet.runner import FunctionRegistry, RunConfig, interpret


def branch_net(weight_a: float, weight_b: float):
    doc = create_goal_net("Branch", "", "mc", rng=random.Random(1))
    root = doc.add_state(None, "Root", StateKind.COMPOSITE, Point(0, 0))
    start = doc.add_state(root, "Start", StateKind.ATOMIC, Point(0, 10))
    a = doc.add_state(root, "A", StateKind.ATOMIC, Point(40, 0))
    b = doc.add_state(root, "B", StateKind.ATOMIC, Point(40, 20))
    end = doc.add_state(root, "End", StateKind.ATOMIC, Point(80, 10))
    pick = doc.add_transition(root, "Pick", TransitionKind.PROBABILISTIC, Point(20, 10))
    join = doc.add_transition(root, "Join", TransitionKind.DIRECT, Point(60, 10))
    doc.add_arc(doc.ref(start), doc.ref(pick))
    arc_a = doc.add_arc(doc.ref(pick), doc.ref(a))
    arc_b = doc.add_arc(doc.ref(pick), doc.ref(b))
    doc.update_properties(arc_a, weight=weight_a)
    doc.update_properties(arc_b, weight=weight_b)
    doc.add_arc(doc.ref(a), doc.ref(join))
    doc.add_arc(doc.ref(b), doc.ref(join))
    doc.add_arc(doc.ref(join), doc.ref(end))
    doc.set_composite_boundaries(root, start, end)
    doc.set_net_properties(root, start, end)
    return doc, a


def main() -> int:
    runs = int(sys.argv[1]) if len(sys.argv) > 1 else 10_000
    registry = FunctionRegistry()
    print(f"{'weights':>12}  {'expected':>9}  {'measured':>9}  {'delta':>8}")
    for weight_a, weight_b in ((0.7, 0.3), (2.0, 1.0), (1.0, 1.0), (0.9, 0.1)):
        doc, branch_a = branch_net(weight_a, weight_b)
        hits = sum(
            branch_a in interpret(doc, registry, RunConfig(seed=s)).states_entered()
            for s in range(runs))
        expected = weight_a / (weight_a + weight_b)
        measured = hits / runs
        print(f"{weight_a:>5}/{weight_b:<6}  {expected:>9.4f}  {measured:>9.4f}  "
              f"{abs(measured - expected):>8.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
