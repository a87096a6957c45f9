"""Pair automaton over ordered state pairs, mergeability, deadlock structure.

The pair automaton tracks an observer's two-hypothesis ambiguity: a pair
(p, q) survives a symbol only when both states accept it and land on
distinct states.  Pairs from which no word ever collapses the ambiguity are
deadlock pairs; their closed strongly connected components carry the
asymptotic behaviour of non-exact machines.
"""

from collections import deque

import numpy as np

from .graphs import strongly_connected_components


class PairAutomaton:
    """Transition structure on ordered pairs (p, q), p != q.

    Pairs are kept in lexicographic order.  delta2 is (m, k) int with -1 for
    undefined, weight is (m, k) float carrying the emission probability of
    the first coordinate (0 where undefined).
    """

    def __init__(self, machine):
        self.machine = machine
        n, k = machine.n, machine.k
        m = n * (n - 1)
        pairs = np.empty((m, 2), dtype=np.int64)
        r = 0
        for p in range(n):
            for q in range(n):
                if p != q:
                    pairs[r] = (p, q)
                    r += 1
        delta2 = np.full((m, k), -1, dtype=np.int64)
        weight = np.zeros((m, k))
        delta = machine.delta
        for r in range(m):
            p, q = pairs[r]
            for j in range(k):
                tp, tq = delta[p, j], delta[q, j]
                if tp >= 0 and tq >= 0 and tp != tq:
                    delta2[r, j] = self.pair_index(tp, tq)
                    weight[r, j] = machine.probs[p, j]
        for a in (pairs, delta2, weight):
            a.flags.writeable = False
        self.pairs = pairs
        self.delta2 = delta2
        self.weight = weight

    @property
    def count(self):
        return self.pairs.shape[0]

    def pair_index(self, p, q):
        """Row of the ordered pair (p, q) in lexicographic order."""
        n = self.machine.n
        return p * (n - 1) + (q if q < p else q - 1)

    def pair(self, r):
        p, q = self.pairs[r]
        return int(p), int(q)

    def successors(self, r):
        return (int(t) for t in self.delta2[r] if t >= 0)

    def __repr__(self):
        return f"PairAutomaton({self.machine.name!r}, pairs={self.count})"


def build_pair_automaton(m):
    return PairAutomaton(m)


class DeadlockAnalysis:
    """Split of the pair set into mergeable and deadlock pairs.

    mergeable, deadlock : frozensets of (p, q) index tuples.
    components : closed strongly connected deadlock components, or None
        until deadlock_components has run.
    """

    def __init__(self, mergeable, deadlock):
        self.mergeable = frozenset(mergeable)
        self.deadlock = frozenset(deadlock)
        self.components = None

    def __repr__(self):
        ncomp = "?" if self.components is None else len(self.components)
        return (
            f"DeadlockAnalysis(mergeable={len(self.mergeable)},"
            f" deadlock={len(self.deadlock)}, components={ncomp})"
        )


def mergeable_pairs(pa, m=None):
    """Classify every ordered pair as mergeable or deadlock.

    Seeds are pairs that a single symbol already collapses: both states map
    to the same state, or the symbol is defined at exactly one of the two
    (the set image shrinks to a singleton either way).  Backward closure
    over pair transitions then adds every pair that can reach a seed.
    """
    m = pa.machine if m is None else m
    delta = m.delta
    rows = pa.count
    mergeable = np.zeros(rows, dtype=bool)
    queue = deque()
    for r in range(rows):
        p, q = pa.pairs[r]
        for j in range(m.k):
            tp, tq = delta[p, j], delta[q, j]
            if (tp >= 0 and tq >= 0 and tp == tq) or ((tp >= 0) != (tq >= 0)):
                mergeable[r] = True
                queue.append(r)
                break
    reverse = [[] for _ in range(rows)]
    for r in range(rows):
        for t in pa.successors(r):
            reverse[t].append(r)
    while queue:
        t = queue.popleft()
        for r in reverse[t]:
            if not mergeable[r]:
                mergeable[r] = True
                queue.append(r)
    merge_set = {pa.pair(r) for r in range(rows) if mergeable[r]}
    dead_set = {pa.pair(r) for r in range(rows) if not mergeable[r]}
    return DeadlockAnalysis(merge_set, dead_set)


def deadlock_components(da, pa):
    """Closed strongly connected components of the deadlock subgraph.

    Deadlock pairs are closed under defined moves, so every pair transition
    out of a deadlock pair stays in the deadlock set; components that still
    have an edge to a different component are transient and dropped.  Result
    is stored on the analysis and returned: a list of tuples of (p, q)
    pairs, components ordered by their smallest member, members sorted.
    """
    dead_rows = sorted(pa.pair_index(p, q) for p, q in da.deadlock)
    dense = {r: i for i, r in enumerate(dead_rows)}

    def successors(i):
        return (dense[t] for t in pa.successors(dead_rows[i]))

    components = []
    for comp in strongly_connected_components(len(dead_rows), successors):
        comp_set = set(comp)
        closed = all(t in comp_set for i in comp for t in successors(i))
        if closed:
            pairs = tuple(sorted(pa.pair(dead_rows[i]) for i in comp))
            components.append(pairs)
    components.sort(key=lambda pairs: pairs[0])
    da.components = components
    return components


def deadlock_analysis(m):
    """Full pair-space pipeline; returns (PairAutomaton, DeadlockAnalysis)
    with components populated."""
    pa = build_pair_automaton(m)
    da = mergeable_pairs(pa)
    deadlock_components(da, pa)
    return pa, da


def classify(m):
    """'exact' when every ordered pair is mergeable (a reset word exists),
    'non-exact' otherwise."""
    pa = build_pair_automaton(m)
    da = mergeable_pairs(pa)
    return "exact" if not da.deadlock else "non-exact"
