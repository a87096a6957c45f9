"""Independent verification routes: exhaustive word enumeration, aggregated
word-action walks, reset-threshold search, and Monte Carlo belief simulation.

Nothing here touches the pair-automaton matrices; agreement between these
oracles and the rates module is what the test suite certifies.
"""

import math

import numpy as np

from .errors import ImpossibleWordError, InputError, ResourceError
from .machine import stationary_distribution
from .pairs import build_pair_automaton, mergeable_pairs


def _extended_tables(m):
    """Transition and log-emission tables with a dead sentinel row.

    State n is the dead state: undefined moves land there and stay there,
    with log-probability -inf.
    """
    n, k = m.n, m.k
    delta_ext = np.vstack([np.where(m.delta < 0, n, m.delta), np.full((1, k), n, dtype=np.int64)])
    with np.errstate(divide="ignore"):
        logp = np.where(m.probs > 0, np.log(np.where(m.probs > 0, m.probs, 1.0)), -np.inf)
    logp_ext = np.vstack([logp, np.full((1, k), -np.inf)])
    return delta_ext, logp_ext


# -- belief tracking ---------------------------------------------------------


def _residual_mass(phi):
    """Per row: total mass off the most likely entry.

    Mathematically 1 - max, but summing the small entries directly keeps
    residuals below machine epsilon representable instead of rounding
    them to 0.
    """
    phi = np.atleast_2d(phi)
    top = np.argmax(phi, axis=1)
    rest = phi.copy()
    rest[np.arange(phi.shape[0]), top] = 0.0
    return rest.sum(axis=1)


class BeliefState:
    """Observer's posterior over current states after a word.

    phi : probability per state.
    top_state : argmax of phi, lowest index on ties.
    q_l : 1 - phi[top_state], the residual uncertainty.
    """

    def __init__(self, phi):
        phi = np.asarray(phi, dtype=float)
        phi.flags.writeable = False
        self.phi = phi
        self.top_state = int(np.argmax(phi))
        self.q_l = float(_residual_mass(phi)[0])

    def __repr__(self):
        return f"BeliefState(top={self.top_state}, q_l={self.q_l!r})"


def belief(m, pi0, word):
    """Posterior over current states given a start distribution and a word.

    Bayes update symbol by symbol with renormalization each step: the mass
    of state p moves to p.j scaled by p's probability of emitting j.
    Raises an impossible-word error when the word has probability 0 from
    pi0.
    """
    phi = np.asarray(pi0, dtype=float)
    if phi.shape != (m.n,):
        raise InputError("initial distribution length must match the state count")
    if phi.min() < 0 or abs(phi.sum() - 1.0) > 1e-9:
        raise InputError("initial distribution must be a probability vector")
    phi = phi.copy()
    read = []
    for j in m.word_indices(word):
        read.append(m.symbols[j])
        new_phi = np.zeros(m.n)
        for p in range(m.n):
            t = int(m.delta[p, j])
            if t >= 0 and phi[p] > 0.0:
                new_phi[t] += phi[p] * m.probs[p, j]
        total = new_phi.sum()
        if total <= 0.0:
            raise ImpossibleWordError(
                f"word {' '.join(read)!r} has probability 0 from the given distribution"
            )
        phi = new_phi / total
    return BeliefState(phi)


# -- exhaustive enumeration ---------------------------------------------------


class WordRecord:
    """Verification data for one enumerated word."""

    __slots__ = ("word", "q_l", "f_state", "s_state", "ratio")

    def __init__(self, word, q_l, f_state, s_state, ratio):
        self.word = word
        self.q_l = q_l
        self.f_state = f_state
        self.s_state = s_state
        self.ratio = ratio

    def __repr__(self):
        return f"WordRecord(word={self.word!r}, q_l={self.q_l!r})"


class WordStats:
    """Exact length-L word statistics under the stationary start law.

    nsyn : exact probability that the emitted word leaves more than one
        possible state (equivalently that the residual uncertainty is
        positive).
    mean_q : expectation of the residual uncertainty over all words.
    root_mean / inv_root_mean : expectations of the uncertainty to the
        powers 1/L and -1/L, conditioned on positive uncertainty; None when
        L = 0 or no such word exists.
    records : per-word verification data in lexicographic word order, or
        None unless requested.
    """

    def __init__(self, length, word_count, nsyn, mean_q, root_mean, inv_root_mean, records):
        self.length = length
        self.word_count = word_count
        self.nsyn = nsyn
        self.mean_q = mean_q
        self.root_mean = root_mean
        self.inv_root_mean = inv_root_mean
        self.records = records

    def __repr__(self):
        return f"WordStats(L={self.length}, words={self.word_count}, nsyn={self.nsyn!r})"


def exact_word_stats(m, length, budget=10**7, keep_words=False):
    """Enumerate every length-L word of positive probability.

    Level iteration keeps one row per word: the endpoint of each start
    state (dead sentinel included) and the log-probability from each start
    state.  The enumeration costs about L * |symbols|**L path steps and is
    refused up front when that exceeds the budget.
    """
    if length < 0:
        raise InputError("length must be nonnegative")
    n, k = m.n, m.k
    steps = length * k**length
    if steps > budget:
        raise ResourceError(
            f"enumeration needs a budget of {steps} path steps, exceeding {budget}"
        )
    delta_ext, logp_ext = _extended_tables(m)

    endpoints = np.arange(n, dtype=np.int64)[None, :]
    logv = np.zeros((1, n))
    trail = []  # per level: (parent row, symbol) for word reconstruction
    for _ in range(length):
        rows = endpoints.shape[0]
        parent = np.repeat(np.arange(rows), k)
        sym = np.tile(np.arange(k), rows)
        new_endpoints = delta_ext[endpoints[parent], sym[:, None]]
        new_logv = logv[parent] + logp_ext[endpoints[parent], sym[:, None]]
        alive = (new_endpoints != n).any(axis=1)
        idx = np.flatnonzero(alive)
        endpoints = new_endpoints[idx]
        logv = new_logv[idx]
        trail.append((parent[idx], sym[idx]))

    rows = endpoints.shape[0]
    pi = stationary_distribution(m).pi
    log_joint = np.log(pi)[None, :] + logv
    peak = log_joint.max(axis=1)
    log_pw = peak + np.log(np.exp(log_joint - peak[:, None]).sum(axis=1))
    pw = np.exp(log_pw)
    posterior = np.exp(log_joint - log_pw[:, None])  # per start state

    # distinct live endpoints per word
    ordered = np.sort(endpoints, axis=1)
    if n == 1:
        distinct = np.ones(rows, dtype=np.int64)
    else:
        distinct = (np.diff(ordered, axis=1) != 0).sum(axis=1) + 1
    distinct = distinct - (ordered[:, -1] == n)
    nonreset = distinct > 1

    # posterior over endpoints
    phi_end = np.zeros((rows, n))
    rr = np.repeat(np.arange(rows), n)
    cc = np.where(endpoints == n, 0, endpoints).ravel()
    np.add.at(phi_end, (rr, cc), np.where(endpoints.ravel() == n, 0.0, posterior.ravel()))
    q = np.where(nonreset, _residual_mass(phi_end), 0.0)

    f_state = np.argmax(logv, axis=1)
    other = endpoints != endpoints[np.arange(rows), f_state][:, None]
    masked = np.where(other, logv, -np.inf)
    s_state = np.argmax(masked, axis=1)
    ratio = np.exp(masked[np.arange(rows), s_state] - logv[np.arange(rows), f_state])

    nsyn = float(pw[nonreset].sum())
    mean_q = float((pw * q).sum())
    root_mean = inv_root_mean = None
    if length > 0 and nsyn > 0.0:
        qn = q[nonreset]
        wn = pw[nonreset]
        root_mean = float((wn * qn ** (1.0 / length)).sum() / nsyn)
        inv_root_mean = float((wn * qn ** (-1.0 / length)).sum() / nsyn)

    records = None
    if keep_words:
        words = _reconstruct_words(trail, rows, length)
        records = []
        for r in range(rows):
            if nonreset[r]:
                rec = WordRecord(
                    words[r], float(q[r]), int(f_state[r]), int(s_state[r]), float(ratio[r])
                )
            else:
                rec = WordRecord(words[r], 0.0, int(f_state[r]), None, None)
            records.append(rec)
    return WordStats(length, rows, nsyn, mean_q, root_mean, inv_root_mean, records)


def _reconstruct_words(trail, rows, length):
    """Walk the per-level parent/symbol arrays back to word index tuples."""
    words = [[] for _ in range(rows)]
    current = np.arange(rows)
    for parent, sym in reversed(trail):
        for w, r in zip(words, current):
            w.append(int(sym[r]))
        current = parent[current]
    return [tuple(reversed(w)) for w in words]


# -- aggregated word actions ---------------------------------------------------


def nonreset_profile(m, max_length, budget=10**7):
    """Exact per-start-state non-reset probabilities for every length up to
    max_length, by walking deduplicated word actions.

    A word acts on the state set as a map into states plus a dead point;
    only the action decides whether the word is a reset word, so words
    sharing an action are aggregated, keeping one weight per start state.
    Returns (by_state, at_stationary): an (max_length+1, n) array with
    entry [L, p] the probability that a word emitted from p after L steps
    leaves more than one live image state, and its stationary mixture.
    """
    if max_length < 0:
        raise InputError("max_length must be nonnegative")
    n, k = m.n, m.k
    delta_ext, _ = _extended_tables(m)
    probs_ext = np.vstack([m.probs, np.zeros((1, k))])

    actions = np.arange(n, dtype=np.int64)[None, :]
    weights = np.ones((1, n))
    by_state = np.zeros((max_length + 1, n))
    spent = 0
    for level in range(max_length + 1):
        live_counts = _distinct_live(actions, n)
        mask = live_counts > 1
        by_state[level] = weights[mask].sum(axis=0)
        if level == max_length:
            break
        spent += actions.shape[0] * k
        if spent > budget:
            raise ResourceError(
                f"action walk exceeded the budget of {budget} row steps at length {level + 1}"
            )
        rows = actions.shape[0]
        parent = np.repeat(np.arange(rows), k)
        sym = np.tile(np.arange(k), rows)
        new_actions = delta_ext[actions[parent], sym[:, None]]
        new_weights = weights[parent] * probs_ext[actions[parent], sym[:, None]]
        alive = (new_actions != n).any(axis=1)
        new_actions = new_actions[alive]
        new_weights = new_weights[alive]
        actions, inverse = np.unique(new_actions, axis=0, return_inverse=True)
        weights = np.zeros((actions.shape[0], n))
        np.add.at(weights, inverse.ravel(), new_weights)
    pi = stationary_distribution(m).pi
    by_state.flags.writeable = False
    return by_state, by_state @ pi


def _distinct_live(actions, n):
    ordered = np.sort(actions, axis=1)
    if actions.shape[1] == 1:
        distinct = np.ones(actions.shape[0], dtype=np.int64)
    else:
        distinct = (np.diff(ordered, axis=1) != 0).sum(axis=1) + 1
    return distinct - (ordered[:, -1] == n)


# -- reset threshold -----------------------------------------------------------


def reset_threshold(m, cap=None):
    """Shortest length of a word whose set image is a single state, or None
    when no such word exists.

    Breadth-first search over subsets of the state set (exponential; meant
    for small machines).  With a cap, an undecided search past the cap
    raises a resource error; None is returned only when the subset graph is
    exhausted, which certifies that no reset word exists.
    """
    n, k = m.n, m.k
    full = (1 << n) - 1
    if n == 1:
        return 0
    seen = {full}
    frontier = [full]
    length = 0
    while frontier:
        length += 1
        if cap is not None and length > cap:
            raise ResourceError(f"no reset word within the cap of {cap} symbols")
        nxt = []
        for subset in frontier:
            states = [i for i in range(n) if subset >> i & 1]
            for j in range(k):
                image = 0
                for i in states:
                    t = int(m.delta[i, j])
                    if t >= 0:
                        image |= 1 << t
                if image == 0 or image in seen:
                    continue
                if image & (image - 1) == 0:
                    return length
                seen.add(image)
                nxt.append(image)
        frontier = nxt
    return None


# -- Monte Carlo simulation ------------------------------------------------------


class BeliefSimulation:
    """Seeded simulation sample.

    starts : (runs,) sampled start states.
    q_values : (runs,) residual uncertainty after the full length.
    y_values : flat array of per-run averaged log-likelihood ratios, one
        entry per (start state, deadlock partner) pairing; empty for exact
        machines.
    q_at : dict mapping each requested checkpoint length to its (runs,)
        uncertainty sample.
    """

    def __init__(self, length, runs, seed, starts, q_values, y_values, q_at):
        self.length = length
        self.runs = runs
        self.seed = seed
        self.starts = starts
        self.q_values = q_values
        self.y_values = y_values
        self.q_at = q_at

    def __repr__(self):
        return f"BeliefSimulation(L={self.length}, runs={self.runs}, seed={self.seed})"


def simulate_beliefs(m, length, runs, seed, record_at=None):
    """Sample words from the stationary machine and track the observer.

    One PCG64 stream (numpy default_rng) drives everything; draws happen
    step-major across the whole run batch, so results are deterministic
    given the seed regardless of platform.  Each run samples a start state
    from the stationary law and emits `length` symbols; the observer belief
    starts at the stationary law and is updated per symbol.  A shadow table
    tracks every state's log-probability of the emitted word, giving the
    averaged log-likelihood ratio between the run's start state and each of
    its deadlock partners.
    """
    if runs < 1:
        raise InputError("runs must be at least 1")
    if length < 0:
        raise InputError("length must be nonnegative")
    record_at = sorted(set(record_at or []))
    if record_at and (record_at[0] < 0 or record_at[-1] > length):
        raise InputError("checkpoints must lie within the simulated length")

    n, k = m.n, m.k
    rng = np.random.default_rng(seed)
    pi = stationary_distribution(m).pi
    delta_ext, logp_ext = _extended_tables(m)
    cum = np.cumsum(m.probs, axis=1)
    last_live = np.array([max(j for j in range(k) if m.probs[i, j] > 0) for i in range(n)])
    symbol_mats = np.zeros((k, n, n))
    for i, j, t, p in m.edges():
        symbol_mats[j, i, t] = p

    start = np.minimum((rng.random(runs)[:, None] >= np.cumsum(pi)[None, :]).sum(axis=1), n - 1)
    current = start.copy()
    phi = np.tile(pi, (runs, 1))
    shadow = np.tile(np.arange(n, dtype=np.int64), (runs, 1))
    logw = np.zeros((runs, n))
    q_at = {}
    if 0 in record_at:
        q_at[0] = _residual_mass(phi)

    for step in range(1, length + 1):
        u = rng.random(runs)
        sym = (u[:, None] >= cum[current]).sum(axis=1)
        sym = np.minimum(sym, k - 1)
        bad = m.probs[current, sym] == 0.0
        if bad.any():
            sym[bad] = last_live[current[bad]]
        logw += logp_ext[shadow, sym[:, None]]
        shadow = delta_ext[shadow, sym[:, None]]
        current = m.delta[current, sym]
        for j in range(k):
            batch = np.flatnonzero(sym == j)
            if batch.size:
                phi[batch] = phi[batch] @ symbol_mats[j]
        phi /= phi.sum(axis=1, keepdims=True)
        if step in record_at:
            q_at[step] = _residual_mass(phi)

    q_values = _residual_mass(phi)

    pa = build_pair_automaton(m)
    da = mergeable_pairs(pa)
    partners = [[] for _ in range(n)]
    for p, q in sorted(da.deadlock):
        partners[p].append(q)
    pieces = []
    if length > 0:
        for p in range(n):
            batch = np.flatnonzero(start == p)
            if batch.size == 0:
                continue
            for q in partners[p]:
                pieces.append((logw[batch, p] - logw[batch, q]) / length)
    y_values = np.concatenate(pieces) if pieces else np.zeros(0)

    for a in (start, q_values, y_values):
        a.flags.writeable = False
    return BeliefSimulation(length, runs, seed, start, q_values, y_values, q_at)
