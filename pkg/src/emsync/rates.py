"""Rate constants: spectral radius of the pair chain, synchronization rate,
non-synchronization sandwich bounds, per-component drift expectations, the
prediction rate, and the escape rate.

All quantities live on the pair automaton.  For exact machines the pair
chain is strictly substochastic in the long run and its spectral radius is
the decay rate of the non-reset probability.  For non-exact machines the
closed deadlock components carry stochastic sub-chains; the expected
log-likelihood ratio accumulated along a component's edges sets the rate at
which an observer's residual uncertainty shrinks.
"""

import math

import numpy as np

from .errors import ConvergenceError, InputError, PreconditionError
from .graphs import component_period, strongly_connected_components
from .machine import solve_stationary, stationary_distribution
from .pairs import build_pair_automaton, deadlock_analysis, mergeable_pairs


class PairMatrix:
    """Transition matrices of the pair automaton.

    per_symbol : (k, m, m) array; entry [j, s, t] is the weight of the pair
        transition s -> t on symbol j (0 when undefined).
    total : (m, m) sum over symbols.
    """

    def __init__(self, pa):
        m, k = pa.count, pa.machine.k
        per_symbol = np.zeros((k, m, m))
        for r in range(m):
            for j in range(k):
                t = int(pa.delta2[r, j])
                if t >= 0:
                    per_symbol[j, r, t] = pa.weight[r, j]
        total = per_symbol.sum(axis=0) if k else np.zeros((m, m))
        per_symbol.flags.writeable = False
        total.flags.writeable = False
        self.per_symbol = per_symbol
        self.total = total


def pair_matrix(pa):
    return PairMatrix(pa)


def _block_radius(A, eps, max_iter):
    """Spectral radius of an irreducible nonnegative matrix by bracketed
    power iteration.

    For positive x the quotient (A^d x)_i / x_i brackets rho(A)^d between
    its extremes (d = period of the support graph; stepping in windows of d
    keeps the bracket contracting when A^d splits into primitive diagonal
    blocks).  Certified: the true value always lies inside [lo, hi].
    """
    b = A.shape[0]
    adjacency = [np.flatnonzero(A[i] > 0) for i in range(b)]
    d = component_period(list(range(b)), lambda u: adjacency[u])
    x = np.full(b, 1.0 / b)
    bracket = (0.0, math.inf)
    for _ in range(max_iter):
        z = x
        shift = 0.0
        for _ in range(d):
            z = A @ z
            s = float(z.max())
            shift += math.log(s)
            z = z / s
        log_ratio = (shift + np.log(z) - np.log(x)) / d
        bracket = (math.exp(float(log_ratio.min())), math.exp(float(log_ratio.max())))
        if bracket[1] - bracket[0] <= eps:
            return 0.5 * (bracket[0] + bracket[1])
        x = z
    raise ConvergenceError("power iteration hit the iteration cap", bracket=bracket)


def spectral_radius(mat, eps=1e-10, max_iter=10**6):
    """Largest-modulus eigenvalue of a nonnegative square matrix within eps.

    The support graph is condensed into strongly connected blocks; each
    block runs bracketed power iteration (period-safeguarded), and the
    maximum block value is returned.  A zero matrix gives 0.
    """
    A = np.asarray(mat, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError("matrix must be square")
    if eps <= 0:
        raise InputError("eps must be positive")
    n = A.shape[0]
    if n == 0:
        return 0.0
    if A.min() < 0:
        raise InputError("matrix entries must be nonnegative")
    if not A.any():
        return 0.0
    adjacency = [np.flatnonzero(A[i] > 0) for i in range(n)]
    value = 0.0
    for block in strongly_connected_components(n, lambda u: adjacency[u]):
        if len(block) == 1:
            value = max(value, float(A[block[0], block[0]]))
            continue
        sub = A[np.ix_(block, block)]
        value = max(value, _block_radius(sub, eps, max_iter))
    return value


def sync_rate(m, eps=1e-9):
    """Synchronization rate constant of an exact machine: the decay rate of
    the probability that a word of length L fails to reset the observer.

    Equals the spectral radius of the summed pair matrix.  Raises a
    precondition error naming a never-merging pair when the machine is not
    exact.
    """
    pa = build_pair_automaton(m)
    da = mergeable_pairs(pa)
    if da.deadlock:
        p, q = min(da.deadlock)
        raise PreconditionError(
            f"machine is not exact: state pair ({m.states[p]}, {m.states[q]}) never merges"
        )
    return spectral_radius(pair_matrix(pa).total, eps)


class NsynBounds:
    """Sandwich bounds on the probability of staying unsynchronized after
    reading a word of the given length.

    row_sums : per-pair mass R over length-L words keeping the pair alive,
        aligned with `pairs`.
    state_totals / state_maxima : per first coordinate p, the sum and max
        of row_sums over partners q.
    lower / upper : stationary-weighted bounds; the true probability of not
        being synchronized after L symbols lies between them.
    """

    def __init__(self, length, pairs, row_sums, state_totals, state_maxima, lower, upper):
        self.length = int(length)
        self.pairs = pairs
        self.row_sums = row_sums
        self.state_totals = state_totals
        self.state_maxima = state_maxima
        self.lower = float(lower)
        self.upper = float(upper)

    def __repr__(self):
        return f"NsynBounds(L={self.length}, lower={self.lower!r}, upper={self.upper!r})"


def nsyn_bounds(m, length):
    """Bounds after `length` symbols, by repeated matrix-vector products
    against the all-ones column (the explicit matrix power is never formed)."""
    if length < 0:
        raise InputError("length must be nonnegative")
    pa = build_pair_automaton(m)
    T = pair_matrix(pa).total
    v = np.ones(pa.count)
    for _ in range(int(length)):
        v = T @ v
    totals = np.zeros(m.n)
    maxima = np.zeros(m.n)
    for r in range(pa.count):
        p = int(pa.pairs[r, 0])
        totals[p] += v[r]
        maxima[p] = max(maxima[p], float(v[r]))
    pi = stationary_distribution(m).pi
    for a in (v, totals, maxima):
        a.flags.writeable = False
    return NsynBounds(length, pa.pairs, v, totals, maxima, float(pi @ maxima), float(pi @ totals))


class EdgeMachineStats:
    """Drift statistics of one closed deadlock component.

    The component's pairs form a finite irreducible chain (rows are
    stochastic by closure).  Its edges, weighted by the equilibrium of that
    chain, carry the log-likelihood ratio between the two coordinate states;
    the expectation of that ratio is the component's drift.

    component : tuple of (p, q) pairs, in component order.
    rho : equilibrium over the component's pairs, aligned with component.
    edge_states : list of ((p, q), symbol index) with a defined move.
    edge_rho : equilibrium over edge states, rho of the pair times the
        emission probability of the first coordinate.
    f_values : per edge state, ln of the ratio of the two coordinates'
        emission probabilities.
    expectation : sum of edge_rho * f_values; nonnegative, and positive
        whenever some pair in the component has differing emission rows.
    """

    def __init__(self, component, rho, edge_states, edge_rho, f_values, expectation):
        self.component = component
        self.rho = rho
        self.edge_states = edge_states
        self.edge_rho = edge_rho
        self.f_values = f_values
        self.expectation = float(expectation)

    def __repr__(self):
        return (
            f"EdgeMachineStats(pairs={len(self.component)},"
            f" expectation={self.expectation!r})"
        )


def edge_machine_stats(component, pa):
    """Equilibrium and drift of one closed deadlock component.

    Within a closed component every symbol emitted by the first coordinate
    is also accepted by the second (closure), so the log ratio is always
    finite.  Summation order is fixed: pairs in component order, symbols in
    declaration order.
    """
    m = pa.machine
    c = len(component)
    if c == 0:
        raise InputError("empty component")
    rows = [pa.pair_index(p, q) for p, q in component]
    position = {r: i for i, r in enumerate(rows)}
    chain = np.zeros((c, c))
    for i, r in enumerate(rows):
        for j in range(m.k):
            t = int(pa.delta2[r, j])
            if t >= 0:
                chain[i, position[t]] += pa.weight[r, j]
    rho = solve_stationary(chain)
    edge_states = []
    edge_rho = []
    f_values = []
    expectation = 0.0
    for i, (p, q) in enumerate(component):
        r = rows[i]
        for j in range(m.k):
            if pa.delta2[r, j] >= 0:
                w = float(m.probs[p, j])
                f = math.log(w / float(m.probs[q, j]))
                edge_states.append(((p, q), j))
                edge_rho.append(float(rho[i]) * w)
                f_values.append(f)
                expectation += float(rho[i]) * w * f
    rho.flags.writeable = False
    return EdgeMachineStats(
        tuple(component),
        rho,
        edge_states,
        np.array(edge_rho),
        np.array(f_values),
        expectation,
    )


def prediction_rate(m):
    """Prediction rate constant: the slowest decay rate of an observer's
    residual uncertainty.

    0 for exact machines.  Otherwise the largest exp(-drift) over the
    closed deadlock components; ties resolve to the earliest component in
    the deterministic component order.
    """
    pa, da = deadlock_analysis(m)
    if not da.deadlock:
        return 0.0
    drifts = [edge_machine_stats(comp, pa).expectation for comp in da.components]
    return math.exp(-min(drifts))


def escape_rate(m):
    """Decay rate of the probability that a state pair has neither merged
    nor entered a closed deadlock component.

    Spectral radius of the summed pair matrix restricted to the pairs
    outside every closed component.  Deadlock pairs outside all closed
    components (transient deadlock) stay in the restriction: a pair sitting
    there has not yet entered a component and still counts as surviving.
    """
    pa, da = deadlock_analysis(m)
    absorbed = {pair for comp in da.components for pair in comp}
    keep = [r for r in range(pa.count) if pa.pair(r) not in absorbed]
    if not keep:
        return 0.0
    T = pair_matrix(pa).total
    return spectral_radius(T[np.ix_(keep, keep)])


class RateReport:
    """Bundle of every rate constant for one machine.

    classification : 'exact' or 'non-exact'.
    src : synchronization rate constant, None for non-exact machines.
    prc : prediction rate constant (0 for exact machines).
    escape : escape rate constant.
    drifts : per-component drift expectations, in component order.
    """

    def __init__(self, classification, src, prc, escape, drifts):
        self.classification = classification
        self.src = src
        self.prc = prc
        self.escape = escape
        self.drifts = list(drifts)

    def __repr__(self):
        return (
            f"RateReport({self.classification!r}, src={self.src!r},"
            f" prc={self.prc!r}, escape={self.escape!r})"
        )


def rate_report(m, eps=1e-9):
    """Classification plus all rate constants in one pass."""
    pa, da = deadlock_analysis(m)
    T = pair_matrix(pa).total
    if da.deadlock:
        classification = "non-exact"
        src = None
        drifts = [edge_machine_stats(comp, pa).expectation for comp in da.components]
        prc = math.exp(-min(drifts))
    else:
        classification = "exact"
        src = spectral_radius(T, eps)
        drifts = []
        prc = 0.0
    absorbed = {pair for comp in da.components for pair in comp}
    keep = [r for r in range(pa.count) if pa.pair(r) not in absorbed]
    escape = spectral_radius(T[np.ix_(keep, keep)], eps) if keep else 0.0
    return RateReport(classification, src, prc, escape, drifts)
