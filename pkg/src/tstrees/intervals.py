"""Allen-relation algebra, discrete derivatives, relaxed pointwise
satisfaction, and decision checking with witness selection.

Intervals live on the extended point domain {0, ..., N}.  Channel values sit
at points 1..N; the z-th forward difference sits at points 1..N-z.  An
interval is evaluated on its data-bearing points clipped to that range, and
fails a decision outright when the clipped point set is empty.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import (
    Comparator,
    Instance,
    Interval,
    IntervalRelation,
    TemporalDecision,
    WitnessPolicy,
)

Rel = IntervalRelation


def allen_related(i: Interval, j: Interval, relation: IntervalRelation) -> bool:
    """True iff ``j`` stands in ``relation`` to ``i``.

    The six forward relations follow the usual definitions; inverses are
    obtained by transposition; eq holds iff the intervals coincide.
    """
    if relation is Rel.EQ:
        return i == j
    if relation.is_inverse:
        return allen_related(j, i, relation.transpose)
    x, y, u, v = i.x, i.y, j.x, j.y
    if relation is Rel.A:
        return y == u
    if relation is Rel.L:
        return y < u
    if relation is Rel.B:
        return x == u and v < y
    if relation is Rel.E:
        return y == v and x < u
    if relation is Rel.D:
        return x < u and v < y
    if relation is Rel.O:
        return x < u and u < y and y < v
    raise ValueError(f"unknown relation {relation!r}")


def enumerate_intervals(n: int) -> list[Interval]:
    """All intervals over {0, ..., n}, sorted ascending by (x, y)."""
    return [Interval(x, y) for x in range(n) for y in range(x + 1, n + 1)]


def successors(i: Interval, relation: IntervalRelation, n: int) -> list[Interval]:
    """Exactly the intervals over {0, ..., n} related to ``i`` by
    ``relation``, sorted ascending by (x, y).

    Built by direct construction per relation; equivalence with filtering the
    full enumeration through :func:`allen_related` is a tested invariant.
    """
    return list(_successors_cached(i, relation, n))


@lru_cache(maxsize=4096)
def _successors_cached(i: Interval, relation: IntervalRelation, n: int) -> tuple[Interval, ...]:
    return tuple(_build_successors(i, relation, n))


def _build_successors(i: Interval, relation: IntervalRelation, n: int) -> list[Interval]:
    x, y = i.x, i.y
    if relation is Rel.EQ:
        return [i]
    if relation is Rel.A:
        return [Interval(y, v) for v in range(y + 1, n + 1)]
    if relation is Rel.L:
        return [Interval(u, v) for u in range(y + 1, n) for v in range(u + 1, n + 1)]
    if relation is Rel.B:
        return [Interval(x, v) for v in range(x + 1, y)]
    if relation is Rel.E:
        return [Interval(u, y) for u in range(x + 1, y)]
    if relation is Rel.D:
        return [Interval(u, v) for u in range(x + 1, y - 1) for v in range(u + 1, y)]
    if relation is Rel.O:
        return [Interval(u, v) for u in range(x + 1, y) for v in range(y + 1, n + 1)]
    if relation is Rel.AI:
        return [Interval(u, x) for u in range(0, x)]
    if relation is Rel.LI:
        return [Interval(u, v) for u in range(0, x - 1) for v in range(u + 1, x)]
    if relation is Rel.BI:
        return [Interval(x, v) for v in range(y + 1, n + 1)]
    if relation is Rel.EI:
        return [Interval(u, y) for u in range(0, x)]
    if relation is Rel.DI:
        return [Interval(u, v) for u in range(0, x) for v in range(y + 1, n + 1)]
    if relation is Rel.OI:
        return [Interval(u, v) for u in range(0, x) for v in range(x + 1, y)]
    raise ValueError(f"unknown relation {relation!r}")


def derivative(channel: Sequence[float] | np.ndarray, z: int) -> np.ndarray:
    """z-fold forward difference of a channel; z = 0 is the channel itself."""
    values = np.asarray(channel, dtype=np.float64)
    if values.ndim != 1:
        raise ValueError("channel must be one-dimensional")
    if z < 0 or z >= values.shape[0]:
        raise ValueError(
            f"derivative degree {z} invalid for a series of length {values.shape[0]}"
        )
    for _ in range(z):
        values = np.diff(values)
    return values


def required_count(alpha: float, n_points: int) -> int:
    """ceil(alpha * n_points), computed on alpha's exact binary value so that
    results do not depend on intermediate rounding."""
    frac = Fraction(alpha)
    return -((-frac.numerator * n_points) // frac.denominator)


def compare_values(
    values: np.ndarray, comparator: Comparator, threshold: float, eq_tolerance: float = 0.0
) -> np.ndarray:
    """Elementwise point condition ``values cmp threshold`` as a bool array."""
    if comparator is Comparator.LE:
        return values <= threshold
    if comparator is Comparator.GT:
        return values > threshold
    if comparator is Comparator.EQ:
        if eq_tolerance == 0.0:
            return values == threshold
        return np.abs(values - threshold) <= eq_tolerance
    raise ValueError(f"unknown comparator {comparator!r}")


def clip_points(interval: Interval, n: int, z: int) -> tuple[int, int]:
    """Data-bearing point range [lo, hi] of ``interval`` for derivative degree
    ``z`` over raw length ``n``.  Empty when hi < lo."""
    lo = max(interval.x, 1)
    hi = min(interval.y, n - z)
    return lo, hi


def holds_on(
    channel_values: Sequence[float] | np.ndarray,
    interval: Interval,
    comparator: Comparator,
    threshold: float,
    alpha: float,
    z: int,
    eq_tolerance: float = 0.0,
) -> bool:
    """Relaxed satisfaction of the point condition on one interval.

    True iff at least ceil(alpha * |P|) of the interval's data-bearing points
    P satisfy ``A^z cmp threshold``; false when P is empty.
    """
    values = np.asarray(channel_values, dtype=np.float64)
    n = values.shape[0]
    deriv = derivative(values, z)
    lo, hi = clip_points(interval, n, z)
    if hi < lo:
        return False
    window = deriv[lo - 1 : hi]
    sat = int(compare_values(window, comparator, threshold, eq_tolerance).sum())
    return sat >= required_count(alpha, hi - lo + 1)


@dataclass(frozen=True)
class WitnessResult:
    """Outcome of checking one decision against one instance.

    ``witness`` is present iff the decision is satisfied and its relation is
    modal (not eq); it is then related to the instance's reference interval
    by the decision's relation.
    """

    satisfied: bool
    witness: Optional[Interval] = None

    def __post_init__(self) -> None:
        if self.witness is not None and not self.satisfied:
            raise ValueError("a witness requires satisfaction")


def check_decision(
    instance: Instance,
    decision: TemporalDecision,
    policy: WitnessPolicy = WitnessPolicy.LEFTMOST_SHORTEST,
) -> WitnessResult:
    """Evaluate a decision at the instance's current reference interval.

    For eq the condition is checked on the reference interval itself and the
    reference never moves.  Otherwise the successor intervals are scanned in
    ascending (x, y) order and the first satisfying one is the witness; under
    the sorted enumeration both policies pick the same interval.
    """
    n = instance.series_length
    if decision.attribute_index >= instance.channel_count:
        raise ValueError(
            f"decision uses attribute {decision.attribute_index} but the instance "
            f"has {instance.channel_count} channels"
        )
    channel = instance.channels[decision.attribute_index]
    if decision.relation is Rel.EQ:
        ok = holds_on(
            channel,
            instance.reference,
            decision.comparator,
            decision.threshold,
            decision.alpha,
            decision.derivative_degree,
            decision.eq_tolerance,
        )
        return WitnessResult(ok, None)

    z = decision.derivative_degree
    deriv = derivative(channel, z)
    point_ok = compare_values(
        deriv, decision.comparator, decision.threshold, decision.eq_tolerance
    )
    # prefix counts over points 1..n-z; cum[t] = satisfied points in 1..t
    cum = np.zeros(deriv.shape[0] + 1, dtype=np.int64)
    np.cumsum(point_ok, out=cum[1:])
    for cand in _successors_cached(instance.reference, decision.relation, n):
        lo, hi = clip_points(cand, n, z)
        if hi < lo:
            continue
        if cum[hi] - cum[lo - 1] >= required_count(decision.alpha, hi - lo + 1):
            return WitnessResult(True, cand)
    return WitnessResult(False, None)


def split_dataset(
    instances: Iterable[Instance],
    decision: TemporalDecision,
    policy: WitnessPolicy = WitnessPolicy.LEFTMOST_SHORTEST,
) -> tuple[list[Instance], list[Instance]]:
    """Partition instances into (satisfying, non-satisfying).

    Satisfying instances are returned as fresh copies standing on their
    witness interval (unchanged for eq); non-satisfying ones are fresh copies
    with the reference left untouched.  The two lists are disjoint and
    jointly exhaustive.
    """
    t1: list[Instance] = []
    t2: list[Instance] = []
    for inst in instances:
        result = check_decision(inst, decision, policy)
        if result.satisfied:
            if result.witness is not None:
                t1.append(inst.with_reference(result.witness))
            else:
                t1.append(replace(inst))
        else:
            t2.append(replace(inst))
    return t1, t2
