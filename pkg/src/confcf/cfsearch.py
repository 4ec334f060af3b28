"""Exact minimal-cost counterfactual search over classifier confidence.

Given an instance, a trained logistic model, and a target confidence
threshold T, the search finds the cheapest feature changes (weighted L1)
whose resulting confidence lands strictly above (raise) or below (lower) T
while three constraints hold:

  1. the confidence constraint itself, realized with a small strictness
     margin so the optimum is attained on a closed set;
  2. the predicted class stays on the same side of the decision boundary;
  3. the counterfactual is genuinely different from the original, realized
     as a minimum cost floor.

Both constraints 1 and 2 reduce to one closed probability interval, which
maps through the logit to a linear-score interval.  The search then runs
branch-and-bound over assignments of the mutable categorical features; at
each leaf the residual continuous problem - reach the score interval at
minimum weighted-L1 cost - is solved exactly by moving features in
decreasing order of score gain per unit cost until the interval is reached
or the feature saturates at its bound.

Alternatives beyond the optimum are enumerated cheapest-first under a
diversity rule: no two results may share both their categorical assignment
and their set of changed continuous features.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field

from .model import LogisticModel, confidence, predict, predict_proba
from .tabular import (
    DistanceWeights,
    FeatureChange,
    FeatureSchema,
    Instance,
    SchemaError,
    changed_features,
    distance,
    encode,
)

RAISE = "raise"
LOWER = "lower"

# Cost-comparison slack for pruning and tie handling.
_TIE_TOL = 1e-9
# Probability slack when re-checking interval membership of solved points.
_P_TOL = 1e-9


class NoCounterfactualError(Exception):
    """No feasible counterfactual exists for the query.

    ``reason`` is a stable code: "infeasible_interval" when constraints 1+2
    admit no probability at all, "no_feasible_point" when the interval is
    nonempty but unreachable within the feature bounds.
    """

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


class DeadlineExceededError(Exception):
    """Search ran past its deadline; ``partial`` holds results found so far."""

    def __init__(self, partial: list["Counterfactual"]):
        super().__init__("counterfactual search exceeded its deadline")
        self.partial = partial


@dataclass(frozen=True)
class CounterfactualQuery:
    """What to search for, starting from ``instance``.

    ``threshold`` is the confidence level T to move past; ``epsilon`` is the
    strictness margin in probability units; ``min_distance`` is the smallest
    admissible cost, making "different from the original" tolerance-aware.
    """

    instance: Instance
    direction: str
    threshold: float
    alternatives: int = 2
    epsilon: float = 1e-6
    min_distance: float = 1e-6

    def __post_init__(self):
        if self.direction not in (RAISE, LOWER):
            raise ValueError(f"direction must be '{RAISE}' or '{LOWER}'")
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must lie in (0, 1]")
        if self.alternatives < 1:
            raise ValueError("alternatives must be at least 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.min_distance <= 0:
            raise ValueError("min_distance must be positive")


@dataclass(frozen=True)
class Counterfactual:
    instance: Instance
    cost: float
    probability: float
    confidence: float
    changed_features: tuple[FeatureChange, ...]


@dataclass(frozen=True)
class ProbabilityInterval:
    """Closed interval of admissible counterfactual probabilities."""

    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def contains(self, p: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= p <= self.hi + tol


def required_probability_interval(
    model: LogisticModel, schema: FeatureSchema, query: CounterfactualQuery
) -> ProbabilityInterval:
    """Probabilities satisfying both the confidence and same-class constraints.

    Confidence strictness U > T (raise) / U < T (lower) is enforced as
    U >= T + 2*epsilon / U <= T - 2*epsilon, i.e. a margin of ``epsilon`` in
    probability units on either side of the inverted bound.  The same-class
    side is [D, 1] for a positive prediction and [0, D - epsilon] for a
    negative one (the boundary itself classifies positive).

    For the raise direction with a decision boundary away from 0.5 the raw
    constraint set can split in two; we keep the component on the predicted
    class's natural side, where higher confidence means moving away from
    the boundary.  An empty interval (lo > hi) is a legitimate result.
    """
    p0 = predict_proba(model, encode(query.instance, schema))
    positive = p0 >= model.decision_boundary
    eps = query.epsilon
    t = query.threshold

    if positive:
        side_lo, side_hi = model.decision_boundary, 1.0
    else:
        side_lo, side_hi = 0.0, model.decision_boundary - eps

    if query.direction == LOWER:
        band_lo = (1.0 - t) / 2.0 + eps
        band_hi = (1.0 + t) / 2.0 - eps
    elif positive:
        band_lo, band_hi = (1.0 + t) / 2.0 + eps, 1.0
    else:
        band_lo, band_hi = 0.0, (1.0 - t) / 2.0 - eps

    lo = max(side_lo, band_lo, 0.0)
    hi = min(side_hi, band_hi, 1.0)
    return ProbabilityInterval(lo, hi)


def _logit(p: float) -> float:
    if p <= 0.0:
        return -math.inf
    if p >= 1.0:
        return math.inf
    return math.log(p / (1.0 - p))


@dataclass
class _ContVar:
    """A mutable continuous feature as seen by the leaf subproblem."""

    name: str
    feature_index: int
    coef: float
    weight: float
    origin: float
    lower: float
    upper: float


def _solve_continuous(
    variables: list[_ContVar],
    y0: float,
    y_lo: float,
    y_hi: float,
    cost_floor: float,
    excluded: frozenset[str],
):
    """Cheapest continuous assignment whose score lands in [y_lo, y_hi].

    Returns (cost, {name: value}, moved-name frozenset) or None when the
    interval is unreachable.  Features are consumed in decreasing |coef|/w
    order (ties by schema position), each moved toward its useful bound
    until the interval is reached or the feature saturates; this greedy is
    the exact optimum of the box-constrained weighted-L1 problem.

    ``cost_floor`` enforces the non-identity constraint: when the optimum
    costs less than the floor, the cheapest admissible solution spends
    exactly the floor by displacing one feature while keeping the score
    inside the interval.  Zero-coefficient features are never moved.
    """
    moves: dict[str, float] = {}
    moved_dir: dict[str, float] = {}
    cost = 0.0
    y = y0

    if y0 < y_lo or y0 > y_hi:
        target = y_lo if y0 < y_lo else y_hi
        sign = 1.0 if y0 < y_lo else -1.0  # direction the score must travel
        need = abs(target - y0)
        usable = [
            v
            for v in variables
            if v.name not in excluded and v.coef != 0.0
        ]
        usable.sort(key=lambda v: (-abs(v.coef) / v.weight, v.feature_index))
        for v in usable:
            if need <= 0.0:
                break
            step_dir = 1.0 if v.coef * sign > 0 else -1.0
            room = (v.upper - v.origin) if step_dir > 0 else (v.origin - v.lower)
            gain_cap = abs(v.coef) * room
            if gain_cap <= 0.0:
                continue
            if gain_cap >= need:
                # partial move: land exactly on the interval boundary, with
                # any ulp of arithmetic drift clamped back inside the box
                dx = need / abs(v.coef)
                value = min(max(v.origin + step_dir * dx, v.lower), v.upper)
                need = 0.0
            else:
                dx = room
                value = v.upper if step_dir > 0 else v.lower
                need -= gain_cap
            moves[v.name] = value
            moved_dir[v.name] = step_dir
            cost += v.weight * dx
            y += v.coef * step_dir * dx
        if need > 0.0:
            return None

    if cost >= cost_floor:
        return cost, moves, frozenset(moves)

    # Spend exactly the remaining floor on one feature without leaving the
    # interval.  A feature already moved may only continue in its direction
    # (reversing would cancel paid cost instead of adding it).
    extra = cost_floor - cost
    for v in variables:
        if v.name in excluded or v.coef == 0.0:
            continue
        dx = extra / v.weight
        current = moves.get(v.name, v.origin)
        directions = (moved_dir[v.name],) if v.name in moves else (1.0, -1.0)
        for step_dir in directions:
            value = current + step_dir * dx
            if not (v.lower <= value <= v.upper):
                continue
            y_new = y + v.coef * step_dir * dx
            if y_lo <= y_new <= y_hi:
                new_moves = dict(moves)
                new_moves[v.name] = value
                return cost_floor, new_moves, frozenset(new_moves)
    return None


@dataclass
class _Candidate:
    assignment: tuple[str, ...]  # levels of mutable categorical features
    flip_cost: float
    y_base: float  # score with this assignment and all continuous at origin
    cont_moves: dict[str, float]
    moved: frozenset[str]
    excluded: frozenset[str]
    cost: float


class _Searcher:
    def __init__(
        self,
        model: LogisticModel,
        weights: DistanceWeights,
        schema: FeatureSchema,
        query: CounterfactualQuery,
        deadline: float | None,
    ):
        self.model = model
        self.weights = weights
        self.schema = schema
        self.query = query
        self.deadline = deadline
        self.origin = query.instance

        interval = required_probability_interval(model, schema, query)
        if interval.empty:
            raise NoCounterfactualError(
                "infeasible_interval",
                "no probability satisfies the confidence and same-class constraints",
            )
        self.interval = interval
        y_lo = _logit(interval.lo)
        y_hi = _logit(interval.hi)
        # Solutions are placed on interval endpoints, but their probability is
        # later recomputed from the full dot product; tighten the working
        # interval by a margin that dominates that float drift so the placed
        # point never lands an ulp outside (in particular never crosses the
        # decision boundary, whose endpoint carries no epsilon of its own).
        work_lo, work_hi = y_lo, y_hi
        if math.isfinite(work_lo):
            work_lo += 1e-11 * (1.0 + abs(work_lo))
        if math.isfinite(work_hi):
            work_hi -= 1e-11 * (1.0 + abs(work_hi))
        if work_lo > work_hi:  # sliver-thin interval: keep the exact endpoints
            work_lo, work_hi = y_lo, y_hi
        self.y_lo = work_lo
        self.y_hi = work_hi

        spans = schema.column_spans
        coefs = model.coefficients
        self.cat_features: list[tuple[int, str, tuple[str, ...], dict[str, float], float]] = []
        self.cont_vars: list[_ContVar] = []
        fixed = model.bias
        for i, spec in enumerate(schema.features):
            start, stop = spans[i]
            value = self.origin.values[i]
            if spec.is_categorical:
                level_scores = {
                    level: float(coefs[start + k]) for k, level in enumerate(spec.levels)
                }
                if spec.mutable:
                    self.cat_features.append(
                        (i, spec.name, spec.levels, level_scores, weights.categorical[spec.name])
                    )
                else:
                    fixed += level_scores[value]
            else:
                coef = float(coefs[start])
                fixed += coef * float(value)
                if spec.mutable:
                    self.cont_vars.append(
                        _ContVar(
                            name=spec.name,
                            feature_index=i,
                            coef=coef,
                            weight=weights.continuous[spec.name],
                            origin=float(value),
                            lower=spec.lower,
                            upper=spec.upper,
                        )
                    )
        self.fixed_score = fixed

        self._seq = itertools.count()
        self._heap: list = []
        self._kth_tracker: list[float] = []  # max-heap (negated) of k best costs
        self._k = query.alternatives

    def _check_deadline(self, partial: list[Counterfactual]):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise DeadlineExceededError(partial)

    def _kth_bound(self) -> float:
        if len(self._kth_tracker) < self._k:
            return math.inf
        return -self._kth_tracker[0]

    def _note_cost(self, cost: float):
        if len(self._kth_tracker) < self._k:
            heapq.heappush(self._kth_tracker, -cost)
        elif cost < -self._kth_tracker[0]:
            heapq.heapreplace(self._kth_tracker, -cost)

    def _push(self, cand: _Candidate):
        instance = self._build_instance(cand)
        lex_key = tuple(encode(instance, self.schema).tolist())
        heapq.heappush(self._heap, (cand.cost, lex_key, next(self._seq), cand, instance))

    def _build_instance(self, cand: _Candidate) -> Instance:
        values = list(self.origin.values)
        for (i, _, _, _, _), level in zip(self.cat_features, cand.assignment):
            values[i] = level
        for v in self.cont_vars:
            if v.name in cand.cont_moves:
                values[v.feature_index] = cand.cont_moves[v.name]
        return Instance(tuple(values))

    def _solve_leaf(
        self, assignment: tuple[str, ...], flip_cost: float, y_base: float,
        excluded: frozenset[str],
    ) -> _Candidate | None:
        floor = max(0.0, self.query.min_distance - flip_cost)
        solved = _solve_continuous(
            self.cont_vars, y_base, self.y_lo, self.y_hi, floor, excluded
        )
        if solved is None:
            return None
        cont_cost, moves, moved = solved
        return _Candidate(
            assignment=assignment,
            flip_cost=flip_cost,
            y_base=y_base,
            cont_moves=moves,
            moved=moved,
            excluded=excluded,
            cost=flip_cost + cont_cost,
        )

    def _enumerate_leaves(self):
        """Depth-first branch and bound over mutable categorical levels.

        The bound at a node is the flip cost already committed, a valid
        lower bound because remaining features can stay at their original
        level and continuous movement only adds cost.  Nodes are pruned
        against the running k-th best candidate cost.
        """
        n = len(self.cat_features)

        def visit(depth: int, assignment: list[str], flip_cost: float):
            self._check_deadline([])
            if flip_cost > self._kth_bound() + _TIE_TOL:
                return
            if depth == n:
                y_base = self.fixed_score + sum(
                    scores[level]
                    for (_, _, _, scores, _), level in zip(self.cat_features, assignment)
                )
                cand = self._solve_leaf(tuple(assignment), flip_cost, y_base, frozenset())
                if cand is not None:
                    self._note_cost(cand.cost)
                    self._push(cand)
                return
            idx, name, levels, scores, flip = self.cat_features[depth]
            original = self.origin.values[idx]
            ordered = [original] + [lv for lv in levels if lv != original]
            for level in ordered:
                extra = 0.0 if level == original else flip
                assignment.append(level)
                visit(depth + 1, assignment, flip_cost + extra)
                assignment.pop()

        visit(0, [], 0.0)

    def run(self) -> list[Counterfactual]:
        self._enumerate_leaves()
        results: list[Counterfactual] = []
        seen_signatures: set = set()
        seen_subproblems: set = set()
        while self._heap and len(results) < self._k:
            self._check_deadline(results)
            _, _, _, cand, instance = heapq.heappop(self._heap)
            signature = (cand.assignment, cand.moved)
            if signature in seen_signatures:
                continue
            p = predict_proba(self.model, encode(instance, self.schema))
            if not self.interval.contains(p, _P_TOL):
                continue  # defense against pathological float drift
            seen_signatures.add(signature)
            results.append(
                Counterfactual(
                    instance=instance,
                    cost=distance(self.origin, instance, self.schema, self.weights),
                    probability=p,
                    confidence=confidence(p),
                    changed_features=changed_features(self.origin, instance, self.schema),
                )
            )
            # expand: cheapest solutions avoiding each moved feature give the
            # next distinct changed-continuous sets for this assignment
            for name in cand.moved:
                excl = cand.excluded | {name}
                key = (cand.assignment, excl)
                if key in seen_subproblems:
                    continue
                seen_subproblems.add(key)
                child = self._solve_leaf(cand.assignment, cand.flip_cost, cand.y_base, excl)
                if child is not None:
                    self._push(child)
        if not results:
            raise NoCounterfactualError(
                "no_feasible_point",
                "the required confidence band is unreachable within the feature bounds",
            )
        return results


def find_counterfactuals(
    model: LogisticModel,
    weights: DistanceWeights,
    schema: FeatureSchema,
    query: CounterfactualQuery,
    deadline: float | None = None,
) -> list[Counterfactual]:
    """Counterfactuals of the query instance, cheapest first.

    The first result is globally cost-minimal over the constrained mixed
    polytope; later results follow the diversity rule.  At most
    ``query.alternatives`` results are returned, each guaranteed to pass
    :func:`verify`.  ``deadline`` is an optional ``time.monotonic`` value
    after which the search aborts with DeadlineExceededError carrying any
    results already selected.

    Raises NoCounterfactualError when the query is infeasible.
    """
    schema.validate_instance(query.instance)
    if model.width != schema.encoded_width:
        raise SchemaError(
            f"model width {model.width} does not match schema width "
            f"{schema.encoded_width}"
        )
    return _Searcher(model, weights, schema, query, deadline).run()


def counterfactual_from_instance(
    model: LogisticModel,
    weights: DistanceWeights,
    schema: FeatureSchema,
    original: Instance,
    candidate: Instance,
) -> Counterfactual:
    """Package an explicit candidate point as a Counterfactual record."""
    schema.validate_instance(candidate)
    p = predict_proba(model, encode(candidate, schema))
    return Counterfactual(
        instance=candidate,
        cost=distance(original, candidate, schema, weights),
        probability=p,
        confidence=confidence(p),
        changed_features=changed_features(original, candidate, schema),
    )


def verify(
    model: LogisticModel,
    weights: DistanceWeights,
    schema: FeatureSchema,
    query: CounterfactualQuery,
    cf: Counterfactual,
) -> bool:
    """Recompute every counterfactual postcondition from scratch.

    True iff the instance is schema-valid, immutable features are untouched,
    the changed-feature list is exact, the stored cost matches the
    recomputed weighted L1 within 1e-9 and clears the minimum distance, the
    stored probability/confidence match a fresh prediction, and the fresh
    probability lies in the required interval on the original's side of the
    decision boundary.
    """
    try:
        schema.validate_instance(cf.instance)
    except SchemaError:
        return False
    for spec, old, new in zip(schema.features, query.instance.values, cf.instance.values):
        if not spec.mutable and old != new:
            return False
    if changed_features(query.instance, cf.instance, schema) != tuple(cf.changed_features):
        return False
    cost = distance(query.instance, cf.instance, schema, weights)
    if abs(cost - cf.cost) > 1e-9:
        return False
    if cost < query.min_distance - 1e-12:
        return False
    p = predict_proba(model, encode(cf.instance, schema))
    if abs(p - cf.probability) > 1e-12 or abs(confidence(p) - cf.confidence) > 1e-12:
        return False
    interval = required_probability_interval(model, schema, query)
    if interval.empty or not interval.contains(p, _P_TOL):
        return False
    p0 = predict_proba(model, encode(query.instance, schema))
    same_side = (p >= model.decision_boundary) == (p0 >= model.decision_boundary)
    return same_side
