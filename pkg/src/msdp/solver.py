"""Multi-survivor dynamic programming over the problem trellis.

Each node of stage ``i`` keeps a ranked list of survivors (feasible
prefixes ending in that node's symbol). A stage is processed by running
ACMS (add, compare, multiple select) at every node: extend all incoming
survivors, drop the ones the CSF rules out, rank by accumulated value and
keep as many as the survivor policy allows.
"""

from __future__ import annotations

import enum
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Hashable, Optional

from .core import (
    Assignment,
    Counters,
    InvalidInstanceError,
    MsdpError,
    PartialAssignment,
    ProblemH,
    Verdict,
)
from .trellis import build_trellis


class InfeasibleError(MsdpError):
    """No assignment satisfies the constraints."""

    def __init__(self, stage: int, message: str = ""):
        self.stage = stage
        super().__init__(message or f"instance is infeasible: last survivor died at stage {stage}")


class CompletionBudgetExceeded(MsdpError):
    """The completion search ran out of node expansions without a verdict."""


class Mode(enum.Enum):
    KEEP_ALL_FEASIBLE = "keep-all"
    CAP = "cap"
    SINGLE_SURVIVOR = "single"


@dataclass(frozen=True)
class SurvivorPolicy:
    mode: Mode = Mode.KEEP_ALL_FEASIBLE
    ne: Optional[int] = None
    merge_dominated: bool = False

    def __post_init__(self):
        if self.mode is Mode.CAP and (self.ne is None or self.ne < 1):
            raise ValueError("Cap(N_e) needs N_e >= 1")
        if self.mode is Mode.SINGLE_SURVIVOR:
            object.__setattr__(self, "ne", 1)

    @classmethod
    def keep_all(cls, merge_dominated=False):
        return cls(Mode.KEEP_ALL_FEASIBLE, None, merge_dominated)

    @classmethod
    def cap(cls, ne: int, merge_dominated=False):
        return cls(Mode.CAP, ne, merge_dominated)

    @classmethod
    def single(cls, merge_dominated=False):
        return cls(Mode.SINGLE_SURVIVOR, 1, merge_dominated)

    @property
    def limit(self) -> Optional[int]:
        return None if self.mode is Mode.KEEP_ALL_FEASIBLE else self.ne


@dataclass
class Survivor:
    prefix: tuple
    lam: float
    digest: Optional[Hashable] = None
    unresolved: bool = False

    @property
    def pa(self) -> PartialAssignment:
        return PartialAssignment(self.prefix, self.lam)

    def sort_key(self):
        return (-self.lam, self.prefix)


@dataclass
class SolveReport:
    solver: str
    best: Optional[Assignment]
    counters: Counters
    optimal_certified: bool
    top_k: list = field(default_factory=list)
    survivor_demand: list = field(default_factory=list)
    node_demand: list = field(default_factory=list)
    ne_used: Optional[int] = None
    enumerated: Optional[int] = None
    feasible_count: Optional[int] = None
    labels: Optional[list] = None
    wall_ms: float = 0.0

    @property
    def objective(self) -> Optional[float]:
        return None if self.best is None else self.best.objective

    @property
    def feasible(self) -> bool:
        return self.best is not None

    @property
    def ne_bound(self) -> Optional[int]:
        return max(self.survivor_demand) if self.survivor_demand else None

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "solver": self.solver,
            "best": None if self.best is None else {
                "x": list(self.labels if self.labels is not None else self.best.values),
                "f": self.best.objective,
            },
            "counters": self.counters.to_dict(),
            "ne_bound": self.ne_bound,
            "certified": self.optimal_certified,
            "feasible": self.feasible,
        }
        if self.enumerated is not None:
            out["enumerated"] = self.enumerated
        if self.feasible_count is not None:
            out["feasible_count"] = self.feasible_count
        if self.survivor_demand:
            out["survivor_demand"] = list(self.survivor_demand)
        if timing:
            out["wall_ms"] = round(self.wall_ms, 3)
        return out


def default_budget(p: ProblemH, stage: int) -> int:
    env = os.environ.get("MSDP_BUDGET")
    if env:
        return int(env)
    return 10 * p.M ** min(4, p.N - stage)


def _children(p: ProblemH, prefix: tuple):
    i = len(prefix)
    for s in p.allowed_symbols(i):
        if i == 0 or p.transition_ok(i, prefix[-1], s):
            yield prefix + (s,)


def completion_search(
    pa: PartialAssignment | tuple,
    p: ProblemH,
    budget: Optional[int] = None,
    counters: Optional[Counters] = None,
) -> Verdict:
    """Decide whether ``pa`` has a feasible completion by depth-first search.

    Branches whose own partial check is INFEASIBLE are pruned; a FEASIBLE
    partial verdict or a feasible full vector ends the search. Every
    expanded node costs one CSF evaluation.
    """
    prefix = pa.prefix if isinstance(pa, PartialAssignment) else tuple(pa)
    counters = counters if counters is not None else Counters()
    n = p.N
    if len(prefix) == n:
        counters.csf_evals += 1
        return Verdict.FEASIBLE if p.csf.full_check(prefix) else Verdict.INFEASIBLE
    if budget is None:
        budget = default_budget(p, len(prefix))
    stack = list(_children(p, prefix))
    stack.reverse()
    expanded = 0
    while stack:
        q = stack.pop()
        expanded += 1
        if expanded > budget:
            raise CompletionBudgetExceeded(
                f"completion search for prefix {prefix} exceeded {budget} expansions"
            )
        counters.csf_evals += 1
        if len(q) == n:
            if p.csf.full_check(q):
                return Verdict.FEASIBLE
            continue
        v = p.csf.partial_check(q, n)
        if v is Verdict.FEASIBLE:
            return Verdict.FEASIBLE
        if v is Verdict.INFEASIBLE:
            continue
        kids = list(_children(p, q))
        kids.reverse()
        stack.extend(kids)
    return Verdict.INFEASIBLE


@dataclass
class _NodeResult:
    kept: list
    demand: int
    evicted: bool
    counters: Counters


def acms(
    p: ProblemH,
    stage: int,
    symbol: int,
    incoming: list,
    policy: SurvivorPolicy,
    counters: Optional[Counters] = None,
    budget: Optional[int] = None,
) -> list:
    """Add, compare and multiple-select at node (``stage``, ``symbol``).

    Returns the retained survivors sorted by value (descending, ties in
    lexicographic prefix order). Empty output means the node dies.
    """
    counters = counters if counters is not None else Counters()
    return _acms(p, stage, symbol, incoming, policy, counters, budget).kept


def _acms(p, stage, symbol, incoming, policy, counters, budget) -> _NodeResult:
    n = p.N
    csf = p.csf
    merge = policy.merge_dominated and csf.has_digest
    bound = p.bound
    cands = []
    for sv in incoming:
        counters.acms_ops += 1
        prefix = sv.prefix + (symbol,)
        lam = sv.lam + p.step_reward(stage, sv.prefix, symbol)
        counters.csf_evals += 1
        unresolved = False
        if stage == n - 1:
            verdict = Verdict.FEASIBLE if csf.full_check(prefix) else Verdict.INFEASIBLE
        else:
            verdict = csf.partial_check(prefix, n)
        if verdict is Verdict.UNKNOWN:
            try:
                verdict = completion_search(prefix, p, budget, counters)
            except CompletionBudgetExceeded:
                verdict, unresolved = Verdict.FEASIBLE, True
        if verdict is Verdict.INFEASIBLE:
            continue
        if bound is not None:
            counters.csf_evals += 1
            if not bound.admits(prefix, lam):
                continue
        digest = csf.digest(prefix) if merge else None
        cands.append(Survivor(prefix, lam, digest, unresolved))

    if merge:
        best_by_digest: dict = {}
        for sv in cands:
            cur = best_by_digest.get(sv.digest)
            if cur is None or sv.sort_key() < cur.sort_key():
                best_by_digest[sv.digest] = sv
        cands = list(best_by_digest.values())

    cands.sort(key=Survivor.sort_key)
    demand = len(cands)
    limit = policy.limit
    evicted = limit is not None and demand > limit
    if evicted:
        cands = cands[:limit]
    return _NodeResult(cands, demand, evicted, counters)


def msdp_solve(
    p: ProblemH,
    policy: Optional[SurvivorPolicy] = None,
    *,
    budget: Optional[int] = None,
    threads: int = 1,
    top_k: int = 0,
) -> SolveReport:
    """Solve ``p`` stage by stage with multi-survivor ACMS.

    With the default keep-all-feasible policy (or any cap at least the
    measured survivor demand) the result is the global optimum.
    ``optimal_certified`` is False as soon as a cap evicts a survivor.
    """
    policy = policy or SurvivorPolicy.keep_all()
    if p.M < 1:
        raise InvalidInstanceError("empty alphabet")
    t0 = time.perf_counter()
    trellis = build_trellis(p)
    counters = Counters()
    certified = True
    demand_per_stage: list = []
    node_demand: list = []

    root = Survivor((), 0.0)
    prev: dict = {}
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for i in range(p.N):
            nodes = trellis.nodes(i)
            jobs = []
            for r in nodes:
                if i == 0:
                    incoming = [root]
                else:
                    incoming = []
                    for b in trellis.predecessors(i, r):
                        incoming.extend(prev.get(b, ()))
                jobs.append((r, incoming))

            def run(job, _i=i):
                r, incoming = job
                return _acms(p, _i, r, incoming, policy, Counters(), budget)

            results = list(pool.map(run, jobs)) if pool else [run(j) for j in jobs]
            cur = {}
            stage_nodes = [0] * p.M
            for (r, _), res in zip(jobs, results):
                counters.merge(res.counters)
                stage_nodes[r] = res.demand
                certified = certified and not res.evicted
                if res.kept:
                    cur[r] = res.kept
            demand_per_stage.append(sum(stage_nodes))
            node_demand.append(stage_nodes)
            if not cur:
                raise InfeasibleError(i + 1)
            prev = cur
    finally:
        if pool:
            pool.shutdown()

    # terminal node F
    finals = []
    for r in sorted(prev):
        for sv in prev[r]:
            counters.acms_ops += 1
            finals.append(sv)
    finals.sort(key=Survivor.sort_key)
    winner = finals[0]
    best = Assignment(winner.prefix, winner.lam)
    return SolveReport(
        solver="msdp",
        best=best,
        counters=counters,
        optimal_certified=certified,
        top_k=finals[:top_k] if top_k else [],
        survivor_demand=demand_per_stage,
        node_demand=node_demand,
        ne_used=policy.limit,
        labels=p.labels(best.values),
        wall_ms=(time.perf_counter() - t0) * 1e3,
    )


def measure_ne_bound(p: ProblemH, budget: Optional[int] = None) -> int:
    """Largest per-stage count of feasible partial paths (keep-all, no merging)."""
    return measure_survivor_demand(p, budget).ne_bound


def measure_survivor_demand(p: ProblemH, budget: Optional[int] = None) -> SolveReport:
    return msdp_solve(p, SurvivorPolicy.keep_all(), budget=budget)
