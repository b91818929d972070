"""Deterministic synchronous message-passing simulator.

Vertices hold only their own matrix row/column (restricted to their
width-ball) and a handful of scalars; everything else arrives as messages.
The simulator is the single point through which values move between
vertices: it refuses deliveries outside the communication range and meters
message counts per vertex per round, so locality and round-complexity
claims are checkable rather than assumed.

Arithmetic inside a vertex follows the same ascending-index reduction
order as the centralized solvers, which makes distributed and centralized
trajectories bit-comparable.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidInputError,
    InvalidParameterError,
    RangeViolationError,
)
from .graph import Graph
from .matrices import (
    DiagonalMatrix,
    GeoMatrix,
    PolyFilter,
)


class NetworkSim:
    """Synchronous round-based network with a hop-distance communication range.

    A message sent in round t is visible exactly at round t+1; a send to a
    vertex outside the sender's range-ball raises.  Multi-hop ranges are
    modeled as direct links (no relaying), matching a network whose
    physical links span the range.
    """

    def __init__(self, g: Graph, comm_range: int):
        if comm_range < 0:
            raise InvalidParameterError("communication range must be >= 0")
        self.g = g
        self.range = comm_range
        self._reach = [set(g.ball(i, comm_range)) for i in range(g.n)]
        self.rounds = 0
        self.messages_per_round = []  # per round: per-vertex sent message counts

    def reset_meters(self):
        self.rounds = 0
        self.messages_per_round = []

    def exchange(self, outboxes):
        """Deliver one round of messages.

        outboxes[i] is a list of (dest, value) pairs from vertex i.  Returns
        inboxes[i] as a list of (sender, value) pairs sorted by sender.
        """
        n = self.g.n
        if len(outboxes) != n:
            raise DimensionMismatchError("one outbox per vertex required")
        inboxes = [[] for _ in range(n)]
        sent = [0] * n
        for i, box in enumerate(outboxes):
            for dest, value in box:
                if dest not in self._reach[i]:
                    raise RangeViolationError(
                        f"vertex {i} cannot reach vertex {dest} within range {self.range}"
                    )
                inboxes[dest].append((i, value))
                sent[i] += 1
        for box in inboxes:
            box.sort(key=lambda t: t[0])
        self.rounds += 1
        self.messages_per_round.append(sent)
        return inboxes

    def broadcast_ball(self, values, radius: int):
        """One round in which every vertex sends its value to its radius-ball.

        Returns per-vertex dicts {j: value_j} covering the whole ball
        (including the vertex's own value, which never crosses the network).
        """
        if radius > self.range:
            raise RangeViolationError(f"radius {radius} exceeds range {self.range}")
        outboxes = []
        balls = [self.g.ball(i, radius) for i in range(self.g.n)]
        for i in range(self.g.n):
            outboxes.append([(j, values[i]) for j in balls[i] if j != i])
        inboxes = self.exchange(outboxes)
        known = []
        for i in range(self.g.n):
            local = {sender: value for sender, value in inboxes[i]}
            local[i] = values[i]
            known.append(local)
        return known

    def neighbor_max_round(self, values):
        """One round of 1-hop max-consensus."""
        known = self.broadcast_ball(values, 1)
        return [max(known[i].values()) for i in range(self.g.n)]


def _check_width(sim: NetworkSim, width: int):
    if width > sim.range:
        raise RangeViolationError(
            f"matrix width {width} exceeds communication range {sim.range}"
        )


def _local_row_sum(row_entries, known: dict):
    """Ascending-index reduction over a vertex's stored row entries."""
    acc = 0j
    for j, v in row_entries:
        acc = acc + v * known[j]
    return acc


def run_pgda(sim: NetworkSim, H: GeoMatrix, lam: complex, Q: DiagonalMatrix,
             x0, M: int) -> list:
    """Distributed preconditioned gradient descent for A = H - lam*I.

    Two exchange rounds per iteration: the iterate, then the intermediate
    A x.  Each vertex stores A(i, .) and the folded column
    Q(i,i)^{-2} conj(A(., i)) from its row/column of H, nothing more.
    Returns the gathered trajectory [x_0, ..., x_M] (observer output).
    """
    _check_width(sim, H.width)
    if Q.n != H.n or np.any(Q.values <= 0.0):
        raise InvalidInputError("preconditioner must be positive and sized to the graph")
    x0 = np.asarray(x0, dtype=complex)
    if x0.shape != (H.n,):
        raise DimensionMismatchError("initial vector length mismatch")
    n = H.n
    lam = complex(lam)
    omega = H.width
    # Pre-iteration at each vertex: local row of A and folded local column.
    a_row = []
    at_col = []
    for i in range(n):
        row = {j: v for j, v in H.row(i)}
        row[i] = row.get(i, 0j) - lam
        a_row.append(sorted((j, v) for j, v in row.items() if v != 0))
        qi2 = 1.0 / (Q.values[i] * Q.values[i])
        col = {j: v for j, v in H.col(i)}
        col[i] = col.get(i, 0j) - lam
        at_col.append(sorted((j, qi2 * v.conjugate()) for j, v in col.items() if v != 0))
    x = [complex(v) for v in x0]
    trajectory = [np.array(x)]
    for _ in range(M):
        known = sim.broadcast_ball(x, omega)
        xt = [_local_row_sum(a_row[i], known[i]) for i in range(n)]
        known_t = sim.broadcast_ball(xt, omega)
        xhat = [_local_row_sum(at_col[i], known_t[i]) for i in range(n)]
        x = [x[i] - xhat[i] for i in range(n)]
        trajectory.append(np.array(x))
    return trajectory


def run_spgda(sim: NetworkSim, A: GeoMatrix, Qsym: DiagonalMatrix, x0, M: int) -> list:
    """Distributed symmetric variant; one exchange round per iteration.

    Positive semidefiniteness of A cannot be checked locally; the runtime
    trusts the caller (the centralized validator covers it in tests).
    """
    _check_width(sim, A.width)
    if Qsym.n != A.n or np.any(Qsym.values <= 0.0):
        raise InvalidInputError("preconditioner must be positive and sized to the graph")
    x0 = np.asarray(x0, dtype=complex)
    if x0.shape != (A.n,):
        raise DimensionMismatchError("initial vector length mismatch")
    n = A.n
    at_row = []
    for i in range(n):
        qi = 1.0 / Qsym.values[i]
        at_row.append([(j, qi * v) for j, v in A.row(i)])
    x = [complex(v) for v in x0]
    trajectory = [np.array(x)]
    for _ in range(M):
        known = sim.broadcast_ball(x, A.width)
        delta = [_local_row_sum(at_row[i], known[i]) for i in range(n)]
        x = [x[i] - delta[i] for i in range(n)]
        trajectory.append(np.array(x))
    return trajectory


def distributed_P(sim: NetworkSim, A: GeoMatrix) -> DiagonalMatrix:
    """Vertex-level construction of the localized preconditioner.

    Round 0 computes each vertex's row/column absolute-sum bound from local
    storage; width many rounds of 1-hop max-consensus then spread it over
    the width-ball.  Matches the centralized preconditioner exactly (sums
    use identical orders; max of identical doubles is exact).
    """
    _check_width(sim, A.width)
    n = A.n
    s = []
    for k in range(n):
        col_sum = 0.0
        for _, v in A.col(k):
            col_sum += abs(v)
        row_sum = 0.0
        for _, v in A.row(k):
            row_sum += abs(v)
        s.append(max(col_sum, row_sum))
    for _ in range(A.width):
        s = sim.neighbor_max_round(s)
    return DiagonalMatrix(np.array(s))


def _vertex_poly_apply(sim: NetworkSim, shift_rows, schedule, coeffs, x):
    """Monomial-lattice filter application over the network.

    shift_rows[k][i] is vertex i's stored row of shift k; one 1-hop
    exchange per shift application.  Per-vertex arithmetic replicates the
    centralized recursion bit for bit.
    """
    n = sim.g.n
    zero = (0,) * coeffs.ndim
    v = {zero: list(x)}
    c0 = coeffs[zero]
    y = [c0 * x[i] for i in range(n)]
    for idx, pred, k in schedule:
        known = sim.broadcast_ball(v[pred], 1)
        vk = [_local_row_sum(shift_rows[k][i], known[i]) for i in range(n)]
        v[idx] = vk
        c = coeffs[idx]
        if c != 0:
            y = [y[i] + c * vk[i] for i in range(n)]
    return y


def _shift_rows(f: PolyFilter):
    return [[S.row(i) for i in range(S.n)] for S in f.shifts]


def poly_apply_distributed(sim: NetworkSim, f: PolyFilter, x) -> np.ndarray:
    """Distributed evaluation of filter times vector with 1-hop exchanges only."""
    from .matrices import monomial_schedule

    if sim.range < 1 and f.total_degree > 0:
        raise RangeViolationError("polynomial filtering needs communication range >= 1")
    for S in f.shifts:
        if S.width > 1:
            raise InvalidInputError(f"shift has width {S.width} > 1")
    x = np.asarray(x, dtype=complex)
    if x.shape != (f.g.n,):
        raise DimensionMismatchError("vector length mismatch")
    schedule = monomial_schedule(f.degrees)
    y = _vertex_poly_apply(sim, _shift_rows(f), schedule, f.coeffs, [complex(v) for v in x])
    return np.array(y)


def run_poly_iteration(sim: NetworkSim, f: PolyFilter, Q: DiagonalMatrix, x_n):
    """One iteration of both descent variants for a polynomial filter.

    Applies the filter and its adjoint through 1-hop exchanges, then forms
    x_{n+1}(i) = x_n(i) - Q(i,i)^{-2} (A* A x_n)(i)   and
    xt_{n+1}(i) = x_n(i) - Q(i,i)^{-1} (A x_n)(i).
    The two outputs belong to independent sequences when iterated.
    """
    x_n = np.asarray(x_n, dtype=complex)
    xhat = poly_apply_distributed(sim, f, x_n)
    xcheck = poly_apply_distributed(sim, f.adjoint_filter(), xhat)
    q = Q.values
    x_next = np.array([x_n[i] - xcheck[i] / (q[i] * q[i]) for i in range(f.g.n)])
    xt_next = np.array([x_n[i] - xhat[i] / q[i] for i in range(f.g.n)])
    return x_next, xt_next


def construct_hatQ_distributed(sim: NetworkSim, f: PolyFilter, c: float):
    """Vertex-level construction of both dominating preconditioners.

    Applies the absolute filter and its adjoint to the all-one vector, then
    runs exactly total-degree many 1-hop max rounds.  Bitwise equal to the
    centralized construction.
    """
    from .matrices import monomial_schedule

    if c <= 0:
        raise InvalidParameterError("c must be positive")
    n = f.g.n
    ones = [1.0 + 0j] * n
    fa = f.abs_filter()
    a1 = _vertex_poly_apply(sim, _shift_rows(fa), monomial_schedule(fa.degrees),
                            fa.coeffs, ones)
    fat = fa.adjoint_filter()
    a2 = _vertex_poly_apply(sim, _shift_rows(fat), monomial_schedule(fat.degrees),
                            fat.coeffs, ones)
    a1 = [v.real for v in a1]
    a2 = [v.real for v in a2]
    q = [max(a1[i], a2[i], c) for i in range(n)]
    for _ in range(f.total_degree):
        q = sim.neighbor_max_round(q)
    hat_q = DiagonalMatrix(np.array(q))
    hat_q_sym = DiagonalMatrix(np.array([max(a1[i], c) for i in range(n)]))
    return hat_q, hat_q_sym
