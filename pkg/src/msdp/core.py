"""Problem-instance data model and constraint-satisfaction contracts.

Symbols are integer indices ``0..M-1`` into an :class:`Alphabet`; labels are
only used for display and serialization. Every solver in the package
accumulates objective values left to right starting from ``0.0`` through
:meth:`ProblemH.step_reward`, so the same assignment always produces the
bit-identical float regardless of which solver scored it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Optional, Sequence

import numpy as np


class MsdpError(Exception):
    """Base class for errors raised by this package."""


class InvalidAssignmentError(MsdpError, ValueError):
    pass


class InvalidInstanceError(MsdpError, ValueError):
    pass


class StageOverflowError(MsdpError, ValueError):
    pass


class Verdict(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite symbol set shared by all stages."""

    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) < 1:
            raise InvalidInstanceError("alphabet must contain at least one symbol")
        if len(set(self.labels)) != len(self.labels):
            raise InvalidInstanceError("alphabet labels must be distinct")

    @classmethod
    def of_size(cls, m: int) -> "Alphabet":
        return cls(tuple(range(m)))

    @property
    def M(self) -> int:
        return len(self.labels)

    @property
    def values(self) -> range:
        return range(len(self.labels))

    def label(self, symbol: int):
        return self.labels[symbol]

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidAssignmentError(f"{label!r} is not in the alphabet") from None


@dataclass
class Assignment:
    values: tuple
    objective: Optional[float] = None

    def __post_init__(self):
        self.values = tuple(int(v) for v in self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class PartialAssignment:
    prefix: tuple = ()
    lam: float = 0.0

    @property
    def stage(self) -> int:
        return len(self.prefix)


@dataclass
class Counters:
    """Per-solve work accumulator; ``total`` mirrors the reporting convention
    "CSF evaluations + ACMS operations"."""

    csf_evals: int = 0
    acms_ops: int = 0

    @property
    def total(self) -> int:
        return self.csf_evals + self.acms_ops

    def merge(self, other: "Counters") -> None:
        self.csf_evals += other.csf_evals
        self.acms_ops += other.acms_ops

    def to_dict(self) -> dict:
        return {"csf": self.csf_evals, "acms": self.acms_ops, "total": self.total}


class CsfOracle:
    """Constraint-satisfaction function on full and partial vectors.

    Callbacks receive tuples of symbol indices. ``partial_check`` must never
    say FEASIBLE for a prefix without a feasible completion, nor INFEASIBLE
    for one that has a feasible completion; UNKNOWN is always allowed.
    ``digest`` (optional) must give equal values for two prefixes of equal
    length only if every suffix is feasible for both or for neither.
    """

    def full_check(self, x: tuple) -> bool:
        raise NotImplementedError

    def partial_check(self, prefix: tuple, n: int) -> Verdict:
        if len(prefix) == n:
            return Verdict.FEASIBLE if self.full_check(prefix) else Verdict.INFEASIBLE
        return Verdict.UNKNOWN

    def digest(self, prefix: tuple) -> Optional[Hashable]:
        return None

    @property
    def has_digest(self) -> bool:
        return False


class FunctionCsf(CsfOracle):
    """Black-box CSF assembled from plain callables."""

    def __init__(
        self,
        full: Callable[[tuple], bool],
        partial: Optional[Callable[[tuple], Verdict]] = None,
        digest: Optional[Callable[[tuple], Hashable]] = None,
    ):
        self._full = full
        self._partial = partial
        self._digest = digest

    def full_check(self, x):
        return bool(self._full(x))

    def partial_check(self, prefix, n):
        if len(prefix) == n:
            return Verdict.FEASIBLE if self.full_check(prefix) else Verdict.INFEASIBLE
        if self._partial is None:
            return Verdict.UNKNOWN
        return self._partial(prefix)

    def digest(self, prefix):
        return None if self._digest is None else self._digest(prefix)

    @property
    def has_digest(self):
        return self._digest is not None


class StructuredCsf(CsfOracle):
    """Conjunction of the built-in constraint families.

    * budget: ``sum_i cost[i][x_i] <= capacity``
    * ordering: symbol indices non-increasing along the stages
    * permutation: all symbols distinct

    Partial checks are exact for budget and/or ordering (a min-cost
    completion DP) and for a lone permutation constraint without a mask.
    Mixed permutation combinations only report necessary conditions.
    Budget arithmetic is exact when costs are integer-valued, which is how
    every adapter and generator in this package builds them.
    """

    def __init__(
        self,
        n: int,
        m: int,
        cost: Optional[Sequence[Sequence[float]]] = None,
        capacity: Optional[float] = None,
        ordering: bool = False,
        permutation: bool = False,
        allowed: Optional[np.ndarray] = None,
    ):
        if (cost is None) != (capacity is None):
            raise InvalidInstanceError("budget needs both a cost table and a capacity")
        self.n, self.m = n, m
        self.cost = None if cost is None else np.asarray(cost, dtype=float)
        if self.cost is not None and self.cost.shape != (n, m):
            raise InvalidInstanceError(f"cost table must be {n}x{m}, got {self.cost.shape}")
        self.capacity = None if capacity is None else float(capacity)
        self.ordering = bool(ordering)
        self.permutation = bool(permutation)
        self.allowed = None if allowed is None else np.asarray(allowed, dtype=bool)
        if self.permutation and n > m:
            raise InvalidInstanceError("permutation constraint needs N <= M")
        self._cost_rows = None if self.cost is None else self.cost.tolist()
        self._suffix_min = self._min_completion_table()

    def _min_completion_table(self):
        # best[i][s]: cheapest cost of stages i..n-1 given x_{i-1} = s
        # (s = m means "no predecessor"); inf when no admissible completion.
        n, m = self.n, self.m
        cost = self.cost if self.cost is not None else np.zeros((n, m))
        allowed = self.allowed if self.allowed is not None else np.ones((n, m), dtype=bool)
        best = [[0.0] * (m + 1) for _ in range(n + 1)]
        for i in range(n - 1, -1, -1):
            row = best[i]
            for s in range(m + 1):
                hi = s if (self.ordering and s < m) else m - 1
                cand = [
                    cost[i][t] + best[i + 1][t] for t in range(hi + 1) if allowed[i][t]
                ]
                row[s] = min(cand) if cand else float("inf")
        return best

    def full_check(self, x):
        if len(x) != self.n:
            return False
        if self.allowed is not None and not all(self.allowed[i][s] for i, s in enumerate(x)):
            return False
        if self.ordering and any(x[i] < x[i + 1] for i in range(len(x) - 1)):
            return False
        if self.permutation and len(set(x)) != len(x):
            return False
        if self._cost_rows is not None:
            used = 0.0
            for i, s in enumerate(x):
                used += self._cost_rows[i][s]
            if used > self.capacity:
                return False
        return True

    def partial_check(self, prefix, n):
        m = len(prefix)
        if m == n:
            return Verdict.FEASIBLE if self.full_check(prefix) else Verdict.INFEASIBLE
        if self.allowed is not None and not all(self.allowed[i][s] for i, s in enumerate(prefix)):
            return Verdict.INFEASIBLE
        if self.ordering and any(prefix[i] < prefix[i + 1] for i in range(m - 1)):
            return Verdict.INFEASIBLE
        if self.permutation:
            if len(set(prefix)) != m:
                return Verdict.INFEASIBLE
        last = prefix[-1] if prefix else self.m
        rest = self._suffix_min[m][last]
        if rest == float("inf"):
            return Verdict.INFEASIBLE
        if self._cost_rows is not None:
            used = 0.0
            for i, s in enumerate(prefix):
                used += self._cost_rows[i][s]
            if used + rest > self.capacity:
                return Verdict.INFEASIBLE
        if self.permutation:
            exact = self._cost_rows is None and not self.ordering and self.allowed is None
            return Verdict.FEASIBLE if exact else Verdict.UNKNOWN
        return Verdict.FEASIBLE

    def digest(self, prefix):
        used = 0.0
        if self._cost_rows is not None:
            for i, s in enumerate(prefix):
                used += self._cost_rows[i][s]
        last = prefix[-1] if prefix else None
        if self.permutation:
            return (used, last, frozenset(prefix))
        return (used, last)

    @property
    def has_digest(self):
        return True

    @property
    def kernel_compatible(self) -> bool:
        """True when the vector-enumeration kernel can evaluate this CSF."""
        return not self.permutation

    def describe(self) -> dict:
        out: dict[str, Any] = {}
        if self.cost is not None:
            out["budget"] = {"cost": self.cost.tolist(), "cap": self.capacity}
        if self.ordering:
            out["ordering"] = "nonincreasing"
        if self.permutation:
            out["permutation"] = True
        return out


@dataclass(frozen=True)
class CompletionBound:
    """Branch-and-bound side constraint ``f(x) >= incumbent``.

    ``optimistic(prefix)`` must never underestimate the best reward any
    completion of ``prefix`` can still add; ``incumbent`` must be the value
    of some feasible assignment so that the optimum always satisfies it.
    """

    optimistic: Callable[[tuple], float]
    incumbent: float
    slack: float = 1e-9

    def admits(self, prefix: tuple, lam: float) -> bool:
        tol = self.slack * max(1.0, abs(self.incumbent))
        return lam + self.optimistic(prefix) >= self.incumbent - tol


StepHook = Callable[[int, tuple, int], float]


@dataclass(eq=False)
class ProblemH:
    """A stage-separable maximization ``sum_i b_i phi_i(x_i)`` under a CSF.

    ``phi`` is an ``N x M`` table. Pairwise transition rewards (``pair``,
    an ``M x M`` matrix added at stages 2..N as ``b_i * pair[x_{i-1}][x_i]``)
    and fully prefix-dependent rewards (``step_hook``) generalize the
    source-only form. ``mask`` forbids symbols per stage; ``adjacency``
    (``N-1`` boolean ``M x M`` matrices) forbids transitions.
    """

    alphabet: Alphabet
    weights: np.ndarray
    csf: CsfOracle
    phi: Optional[np.ndarray] = None
    pair: Optional[np.ndarray] = None
    step_hook: Optional[StepHook] = None
    mask: Optional[np.ndarray] = None
    adjacency: Optional[np.ndarray] = None
    bound: Optional[CompletionBound] = None
    permutation: bool = False
    name: str = "instance"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 1 or len(self.weights) < 1:
            raise InvalidInstanceError("need at least one stage weight (N >= 1)")
        n, m = self.N, self.M
        if self.step_hook is None:
            if self.phi is None:
                raise InvalidInstanceError("either a phi table or a step hook is required")
            self.phi = np.asarray(self.phi, dtype=float)
            if self.phi.shape != (n, m):
                raise InvalidInstanceError(f"phi table must be {n}x{m}, got {self.phi.shape}")
        if self.pair is not None:
            self.pair = np.asarray(self.pair, dtype=float)
            if self.pair.shape != (m, m):
                raise InvalidInstanceError(f"pair matrix must be {m}x{m}")
        if self.mask is not None:
            self.mask = np.asarray(self.mask, dtype=bool)
            if self.mask.shape != (n, m):
                raise InvalidInstanceError(f"mask must be {n}x{m}")
        if self.adjacency is not None:
            self.adjacency = np.asarray(self.adjacency, dtype=bool)
            if self.adjacency.shape != (max(n - 1, 0), m, m):
                raise InvalidInstanceError(f"adjacency must be {n - 1}x{m}x{m}")
        # folded tables shared by every solver path
        if self.phi is not None:
            self.unary = self.weights[:, None] * self.phi
        else:
            self.unary = None
        self.pairw = None
        if self.pair is not None:
            self.pairw = self.weights[:, None, None] * self.pair[None, :, :]
        self._unary_rows = None if self.unary is None else self.unary.tolist()
        self._pair_rows = None if self.pairw is None else self.pairw.tolist()
        self._weights = self.weights.tolist()

    @classmethod
    def from_function(cls, n, alphabet, weights, stage_reward, csf, **kw) -> "ProblemH":
        """Tabulate ``stage_reward(i, symbol)`` (0-based stage) into a phi table."""
        if isinstance(alphabet, int):
            alphabet = Alphabet.of_size(alphabet)
        table = [[float(stage_reward(i, s)) for s in alphabet.values] for i in range(n)]
        return cls(alphabet=alphabet, weights=weights, csf=csf, phi=np.array(table), **kw)

    @property
    def N(self) -> int:
        return len(self.weights)

    @property
    def M(self) -> int:
        return self.alphabet.M

    @property
    def tabular(self) -> bool:
        return self.step_hook is None

    def allowed_symbols(self, stage: int) -> list:
        if self.mask is None:
            return list(range(self.M))
        return [s for s in range(self.M) if self.mask[stage][s]]

    def transition_ok(self, stage: int, prev: int, symbol: int) -> bool:
        # stage is the 0-based index of `symbol`
        if self.adjacency is None or stage == 0:
            return True
        return bool(self.adjacency[stage - 1][prev][symbol])

    def step_reward(self, stage: int, prefix: tuple, symbol: int) -> float:
        if self.step_hook is not None:
            return self._weights[stage] * self.step_hook(stage, prefix, symbol)
        r = self._unary_rows[stage][symbol]
        if self._pair_rows is not None and stage > 0:
            r = r + self._pair_rows[stage][prefix[-1]][symbol]
        return r

    def labels(self, x: Sequence[int]) -> list:
        return [self.alphabet.label(s) for s in x]


def validate_assignment(p: ProblemH, values: Sequence[int]) -> tuple:
    x = tuple(values)
    if len(x) != p.N:
        raise InvalidAssignmentError(f"assignment has length {len(x)}, expected {p.N}")
    for i, s in enumerate(x):
        if not isinstance(s, (int, np.integer)) or not 0 <= s < p.M:
            raise InvalidAssignmentError(f"symbol {s!r} at stage {i + 1} is not in the alphabet")
        if p.mask is not None and not p.mask[i][s]:
            raise InvalidAssignmentError(f"symbol {s} is masked at stage {i + 1}")
    return tuple(int(s) for s in x)


def evaluate_objective(p: ProblemH, a: Assignment | Sequence[int]) -> float:
    """Return ``sum_i b_i phi_i(x_i)`` (plus pair terms), caching it on ``a``."""
    if not isinstance(a, Assignment):
        a = Assignment(tuple(a))
    x = validate_assignment(p, a.values)
    acc = 0.0
    for i, s in enumerate(x):
        acc = acc + p.step_reward(i, x[:i], s)
    a.objective = acc
    return acc


def extend(pa: PartialAssignment, symbol: int, p: ProblemH) -> PartialAssignment:
    if pa.stage >= p.N:
        raise StageOverflowError("cannot extend a full assignment")
    if not 0 <= symbol < p.M:
        raise InvalidAssignmentError(f"symbol {symbol!r} is not in the alphabet")
    lam = pa.lam + p.step_reward(pa.stage, pa.prefix, symbol)
    return PartialAssignment(pa.prefix + (int(symbol),), lam)


def prefix_value(p: ProblemH, prefix: Sequence[int]) -> float:
    acc = 0.0
    for i, s in enumerate(prefix):
        acc = acc + p.step_reward(i, tuple(prefix[:i]), s)
    return acc
