"""Train-track combinatorics in exact arithmetic: switch-condition systems,
rational nullspace bases, covering-radius bounds for the integer solution
lattice, rounding of positive real solutions to nearby integer ones, and
multicurve tracing from integer weights.

Everything here is exact: matrices are integer, elimination runs over
fractions.Fraction, and returned integer weightings satisfy the switch
system with zero error.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "TrainTrack",
    "WeightVector",
    "IntegerRounding",
    "switch_matrix",
    "rational_nullspace",
    "covering_bound",
    "lattice_round",
    "multicurve_from_weights",
    "RoundingThresholdError",
]


@dataclass(frozen=True)
class TrainTrack:
    """Branched graph with labeled switch sides.

    ``switches`` lists (incoming, outgoing) branch-index sequences.  Each
    branch has two ends; ends are assigned to switch slots in declaration
    order (first mention takes end 0).  A branch may appear at most twice
    overall; dangling ends are allowed but multicurve tracing requires a
    closed track.
    """

    n_branches: int
    switches: tuple

    def __post_init__(self):
        used = [0] * self.n_branches
        for inc, out in self.switches:
            for b in list(inc) + list(out):
                if not (0 <= b < self.n_branches):
                    raise ValueError(f"branch index {b} out of range")
                used[b] += 1
        if any(u > 2 for u in used):
            raise ValueError("a branch end is attached to more than two switch slots")
        if not self._connected():
            warnings.warn("train track is not connected", stacklevel=2)

    @staticmethod
    def build(n_branches: int, switches: Sequence[Tuple[Sequence[int], Sequence[int]]]):
        return TrainTrack(
            n_branches, tuple((tuple(i), tuple(o)) for i, o in switches)
        )

    def _connected(self) -> bool:
        if self.n_branches == 0:
            return True
        adj = {b: set() for b in range(self.n_branches)}
        for inc, out in self.switches:
            members = list(inc) + list(out)
            for a in members:
                adj[a].update(members)
        seen = {0}
        stack = [0]
        while stack:
            b = stack.pop()
            for c in adj[b]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return len(seen) == self.n_branches

    def is_closed(self) -> bool:
        used = [0] * self.n_branches
        for inc, out in self.switches:
            for b in list(inc) + list(out):
                used[b] += 1
        return all(u == 2 for u in used)


@dataclass(frozen=True)
class WeightVector:
    """Per-branch weights, tagged exact (Fraction entries) or real."""

    weights: tuple
    exact: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "exact", all(isinstance(w, (int, Fraction)) for w in self.weights)
        )

    @staticmethod
    def of(values: Sequence) -> "WeightVector":
        vals = tuple(
            v if isinstance(v, (int, Fraction)) else float(v) for v in values
        )
        return WeightVector(vals)

    def nonnegative(self) -> bool:
        return all(w >= 0 for w in self.weights)

    def admissible(self, track: TrainTrack, tol: float = 1e-12) -> bool:
        """Switch conditions hold: exactly for exact weights, within tol for
        real ones."""
        M = switch_matrix(track)
        if self.exact:
            return all(
                sum(Fraction(m) * w for m, w in zip(row, self.weights)) == 0
                for row in M
            )
        res = np.asarray(M, float) @ np.asarray([float(w) for w in self.weights])
        return bool(np.all(np.abs(res) <= tol))


def switch_matrix(track: TrainTrack) -> List[List[int]]:
    """One row per switch: +1 for an incoming branch end, -1 for an outgoing
    one, 0 otherwise.  A weighting w is admissible iff (matrix) w = 0."""
    rows = []
    for inc, out in track.switches:
        row = [0] * track.n_branches
        for b in inc:
            row[b] += 1
        for b in out:
            row[b] -= 1
        if any(abs(v) > 1 for v in row):
            raise ValueError(
                "switch uses one branch twice on the same side; coefficients "
                "must stay in {-1, 0, 1}"
            )
        rows.append(row)
    return rows


def rational_nullspace(M: Sequence[Sequence]) -> List[List[Fraction]]:
    """Exact rational basis of the nullspace of an integer matrix, via
    Gauss-Jordan elimination to reduced row echelon form.

    Basis vectors carry a 1 in their free column and the negated pivot-column
    entries elsewhere; the RREF certificate is attached as a function
    attribute after each call (``rational_nullspace.last_rref``).
    """
    rows = [[Fraction(v) for v in row] for row in M]
    if not rows:
        return []
    ncols = len(rows[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free_cols:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            v[pc] = -rows[row_idx][fc]
        basis.append(v)
    rational_nullspace.last_rref = rows
    return basis


def _sqrt_upper(n: int, bits: int = 40) -> Fraction:
    """Exact rational upper bound on sqrt(n) within 2^-bits."""
    if n == 0:
        return Fraction(0)
    scale = 1 << bits
    return Fraction(isqrt(n * scale * scale) + 1, scale)


def covering_bound(basis: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact rational covering-radius bound for the integer-vector lattice
    spanned by the LCM-scaled basis inside the solution space.

    The basis is scaled by the least common multiple L of all denominators to
    integer vectors w_i; every point of the span then lies within
    (1/2) * sum_i |w_i| of a lattice point (round each coefficient to the
    nearest integer).  Half the fundamental-parallelepiped diameter is an
    upper bound, not the exact covering radius.
    """
    if not basis:
        return Fraction(0)
    L = 1
    for v in basis:
        for entry in v:
            L = L * entry.denominator // math.gcd(L, entry.denominator)
    total = Fraction(0)
    for v in basis:
        w = [int(entry * L) for entry in v]
        total += _sqrt_upper(sum(x * x for x in w))
    return total / 2


def scaled_integer_basis(basis: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    """LCM-scaled integer lattice basis w_i = L v_i."""
    if not basis:
        return []
    L = 1
    for v in basis:
        for entry in v:
            L = L * entry.denominator // math.gcd(L, entry.denominator)
    return [[int(entry * L) for entry in v] for v in basis]


class RoundingThresholdError(ValueError):
    """t is below the positivity threshold T0 = C / min_i x_i."""

    def __init__(self, t: float, T0: float):
        super().__init__(
            f"t = {t} is below the threshold T0 = {T0:.9g} required for a "
            "positive integer solution"
        )
        self.T0 = T0


@dataclass(frozen=True)
class IntegerRounding:
    """Integer solution k of the switch system near a scaled real solution.

    k satisfies the system exactly; max_deviation = |t x - k|_inf is bounded
    by the covering-radius bound, and all entries are positive when t exceeds
    the threshold."""

    k: tuple
    bound_C: Fraction
    t: float
    max_deviation: float


def _coefficients(W: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Least-squares coefficients of target in the lattice basis rows W."""
    sol, *_ = np.linalg.lstsq(W.T, target, rcond=None)
    return sol


def lattice_round(
    M: Sequence[Sequence[int]],
    x: Sequence[float],
    t: float,
    bound: Optional[Fraction] = None,
) -> IntegerRounding:
    """Round the scaled solution t*x of the homogeneous system M w = 0 to a
    positive integer solution within the covering bound.

    Nearest-plane rounding of the lattice coordinates, then a local search
    over small coefficient perturbations to minimize the deviation subject to
    positivity.  Requires M x = 0 (checked) and t > T0 = C / min_i x_i.
    """
    x = np.asarray([float(v) for v in x], float)
    Mf = np.asarray(M, float)
    if Mf.size and np.max(np.abs(Mf @ x)) > 1e-9 * max(1.0, float(np.max(np.abs(x)))):
        raise ValueError("x does not satisfy the switch system")
    if np.any(x <= 0):
        raise ValueError("x must be entrywise positive")
    basis = rational_nullspace(M)
    if not basis:
        raise ValueError("switch system only has the zero solution")
    C = covering_bound(basis) if bound is None else bound
    T0 = float(C) / float(np.min(x))
    if t <= T0:
        raise RoundingThresholdError(t, T0)

    W = np.asarray(scaled_integer_basis(basis), float)
    target = t * x
    coeffs = _coefficients(W, target)
    base = np.round(coeffs).astype(np.int64)

    dim = len(basis)
    radius = 2 if dim <= 6 else 1
    best = None
    Wi = np.asarray(scaled_integer_basis(basis), dtype=np.int64)
    for delta in itertools.product(range(-radius, radius + 1), repeat=dim):
        cand = (base + np.asarray(delta, np.int64)) @ Wi
        dev = float(np.max(np.abs(target - cand)))
        if np.all(cand > 0) and dev <= float(C) + 1e-9:
            if best is None or dev < best[0]:
                best = (dev, cand)
    if best is None:
        raise ValueError(
            "no positive integer solution within the covering bound; "
            "increase t or widen the search"
        )
    dev, k = best
    return IntegerRounding(
        k=tuple(int(v) for v in k), bound_C=C, t=float(t), max_deviation=dev
    )


# ---------------------------------------------------------------------------
# multicurve tracing
# ---------------------------------------------------------------------------


def _assign_ports(track: TrainTrack):
    """Assign branch ends to switch slots in declaration order."""
    next_end = [0] * track.n_branches
    ports = []  # per switch: (incoming ports, outgoing ports); port = (branch, end)
    for inc, out in track.switches:
        sides = []
        for side in (inc, out):
            slots = []
            for b in side:
                e = next_end[b]
                if e > 1:
                    raise ValueError(f"branch {b} attached more than twice")
                next_end[b] += 1
                slots.append((b, e))
            sides.append(tuple(slots))
        ports.append(tuple(sides))
    return ports


def multicurve_from_weights(track: TrainTrack, k: Sequence[int]):
    """Realize nonnegative integer weights as a multicurve: k_b parallel
    strands on branch b, hooked together at each switch by the
    order-preserving pairing of incoming and outgoing strand slots.

    Returns (component_count, components) where each component is the cyclic
    list of branch indices it traverses.
    """
    k = [int(v) for v in k]
    if len(k) != track.n_branches:
        raise ValueError("weight length does not match branch count")
    if any(v < 0 for v in k):
        raise ValueError("integer weights must be nonnegative")
    if not WeightVector.of(k).admissible(track):
        raise ValueError("weights do not satisfy the switch conditions")
    if not track.is_closed():
        raise ValueError("multicurve tracing needs a closed track")
    if all(v == 0 for v in k):
        return 0, []

    ports = _assign_ports(track)
    in_ends = {p for inc_p, _ in ports for p in inc_p}
    out_ends = {p for _, out_p in ports for p in out_p}
    for b in range(track.n_branches):
        ends = {(b, 0), (b, 1)}
        if len(ends & in_ends) != 1 or len(ends & out_ends) != 1:
            raise ValueError(
                "tracing needs a consistently oriented track: each branch "
                "must run from an outgoing slot to an incoming one"
            )

    # pairing at each switch: the strand arriving through the i-th incoming
    # slot continues as the i-th outgoing slot (order-preserving rule);
    # a traversal state (b, e, j) means crossing branch b entering at end e
    # in strand slot j, and arrival happens at the far-end port (b, 1-e).
    pairing = {}
    for inc_ports, out_ports in ports:
        in_slots = [(b, e, j) for (b, e) in inc_ports for j in range(k[b])]
        out_slots = [(b, e, j) for (b, e) in out_ports for j in range(k[b])]
        if len(in_slots) != len(out_slots):
            raise AssertionError("switch conditions hold but slot counts differ")
        for arrival, nxt in zip(in_slots, out_slots):
            pairing[arrival] = nxt

    starts = sorted(
        (b, e, j) for (b, e) in out_ends for j in range(k[b])
    )
    visited = set()
    components = []
    for start in starts:
        if start in visited:
            continue
        word = []
        state = start
        while True:
            visited.add(state)
            b, e, j = state
            word.append(b)
            state = pairing[(b, 1 - e, j)]
            if state == start:
                break
        components.append(word)
    return len(components), components
