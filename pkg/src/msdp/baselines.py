"""Comparison baselines: exhaustive search (the correctness oracle) and
simulated annealing."""

from __future__ import annotations

import enum
import itertools
import math
import random
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Assignment, Counters, MsdpError, ProblemH, StructuredCsf, Verdict, evaluate_objective
from . import kernels
from .solver import InfeasibleError, SolveReport

DEFAULT_ES_CAP = 10**8
SA_BUDGET_VECTOR = 5220
SA_BUDGET_PERMUTATION = 380


class SearchSpaceTooLarge(MsdpError):
    def __init__(self, size: int, cap: int):
        self.size, self.cap = size, cap
        super().__init__(f"exhaustive search over {size:,} candidates exceeds the cap of {cap:,}")


class InfeasibleStartError(MsdpError):
    pass


def _allowed(p: ProblemH) -> np.ndarray:
    if p.mask is None:
        return np.ones((p.N, p.M), dtype=bool)
    return p.mask


def search_space_size(p: ProblemH) -> int:
    sizes = [len(p.allowed_symbols(i)) for i in range(p.N)]
    if p.permutation:
        # upper bound when masks differ per stage; exact otherwise
        return math.perm(p.M, p.N) if p.mask is None else math.prod(sizes)
    return math.prod(sizes)


def _kernel_route(p: ProblemH) -> Optional[str]:
    if not p.tabular or p.adjacency is not None or not isinstance(p.csf, StructuredCsf):
        return None
    csf = p.csf
    if p.permutation:
        only_perm = csf.permutation and csf.cost is None and not csf.ordering
        return "permutation" if only_perm else None
    return "vector" if csf.kernel_compatible else None


def exhaustive_search(p: ProblemH, cap: int = DEFAULT_ES_CAP, use_kernel: bool = True) -> SolveReport:
    """Evaluate every candidate; the feasible maximum with lexicographic
    tie-break is returned.

    Candidates are all allowed vectors, or all arrangements of distinct
    symbols when the problem declares permutation structure. One CSF
    evaluation is counted per candidate; there are no ACMS operations, so
    the total equals the enumeration size.
    """
    size = search_space_size(p)
    if size > cap:
        raise SearchSpaceTooLarge(size, cap)
    t0 = time.perf_counter()
    route = _kernel_route(p) if use_kernel else None
    if route == "vector":
        csf: StructuredCsf = p.csf
        allowed = _allowed(p)
        if csf.allowed is not None:
            allowed = allowed & csf.allowed
        best, value, enumerated, n_feas = kernels.es_vector(
            p.unary, p.pairw, allowed, csf.cost, csf.capacity, csf.ordering
        )
    elif route == "permutation":
        allowed = _allowed(p)
        if p.csf.allowed is not None:
            allowed = allowed & p.csf.allowed
        best, value, enumerated, n_feas = kernels.es_permutation(p.unary, p.pairw, allowed, p.N)
    else:
        best, value, enumerated, n_feas = _generic_search(p)
    counters = Counters(csf_evals=enumerated)
    if best is None:
        raise InfeasibleError(p.N, f"no feasible assignment among {enumerated:,} candidates")
    a = Assignment(best, value)
    return SolveReport(
        solver="es",
        best=a,
        counters=counters,
        optimal_certified=True,
        enumerated=enumerated,
        feasible_count=n_feas,
        labels=p.labels(best),
        wall_ms=(time.perf_counter() - t0) * 1e3,
    )


def _generic_search(p: ProblemH):
    domains = [p.allowed_symbols(i) for i in range(p.N)]
    if p.permutation:
        space = (
            x for x in itertools.permutations(range(p.M), p.N)
            if all(p.mask is None or p.mask[i][s] for i, s in enumerate(x))
        )
    else:
        space = itertools.product(*domains)
    best, value, enumerated, n_feas = None, float("-inf"), 0, 0
    csf = p.csf
    for x in space:
        enumerated += 1
        if p.adjacency is not None and not all(
            p.transition_ok(i, x[i - 1], x[i]) for i in range(1, p.N)
        ):
            continue
        if not csf.full_check(x):
            continue
        n_feas += 1
        f = evaluate_objective(p, x)
        if best is None or f > value:
            best, value = x, f
    return best, value, enumerated, n_feas


class NeighborKind(enum.Enum):
    SINGLE_SYMBOL_FLIP = "flip"
    ADJACENT_SWAP = "swap"


@dataclass(frozen=True)
class SaConfig:
    """Simulated-annealing settings.

    ``iterations`` counts evaluated states including the initial one, so a
    single iteration returns the initializer. ``None`` picks the default
    budget for the instance type (5220 vector, 380 permutation).
    """

    initial_temperature: float = 1.0
    cooling_rate: float = 0.995
    iterations: Optional[int] = None
    neighbor_kind: Optional[NeighborKind] = None
    seed: int = 0
    restarts: int = 200

    def __post_init__(self):
        if self.initial_temperature <= 0:
            raise ValueError("initial temperature must be positive")
        if not 0 < self.cooling_rate < 1:
            raise ValueError("cooling rate must lie in (0, 1)")
        if self.iterations is not None and self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def _random_feasible(p: ProblemH, rng: random.Random, counters: Counters, restarts: int):
    n = p.N
    for _ in range(restarts):
        x: tuple = ()
        dead = False
        for i in range(n):
            options = [
                s for s in p.allowed_symbols(i)
                if (i == 0 or p.transition_ok(i, x[-1], s)) and not (p.permutation and s in x)
            ]
            rng.shuffle(options)
            for s in options:
                q = x + (s,)
                counters.csf_evals += 1
                if i == n - 1:
                    if p.csf.full_check(q):
                        x = q
                        break
                elif p.csf.partial_check(q, n) is not Verdict.INFEASIBLE:
                    x = q
                    break
            else:
                dead = True
                break
        if not dead:
            return x
    raise InfeasibleStartError(f"no feasible initializer after {restarts} restarts")


def simulated_annealing(p: ProblemH, cfg: Optional[SaConfig] = None) -> SolveReport:
    """Metropolis search with geometric cooling.

    Counters record one CSF evaluation per checked state (initializer
    construction included); objective evaluations are not ACMS operations.
    """
    cfg = cfg or SaConfig()
    t0 = time.perf_counter()
    rng = random.Random(cfg.seed)
    counters = Counters()
    kind = cfg.neighbor_kind or (
        NeighborKind.ADJACENT_SWAP if p.permutation else NeighborKind.SINGLE_SYMBOL_FLIP
    )
    iterations = cfg.iterations or (SA_BUDGET_PERMUTATION if p.permutation else SA_BUDGET_VECTOR)

    cur = _random_feasible(p, rng, counters, cfg.restarts)
    cur_f = evaluate_objective(p, cur)
    best, best_f = cur, cur_f
    temp = cfg.initial_temperature
    domains = [p.allowed_symbols(i) for i in range(p.N)]

    for _ in range(iterations - 1):
        if kind is NeighborKind.ADJACENT_SWAP:
            if p.N < 2:
                break
            k = rng.randrange(p.N - 1)
            cand = list(cur)
            cand[k], cand[k + 1] = cand[k + 1], cand[k]
        else:
            k = rng.randrange(p.N)
            others = [s for s in domains[k] if s != cur[k]]
            if not others:
                temp *= cfg.cooling_rate
                continue
            cand = list(cur)
            cand[k] = rng.choice(others)
        cand = tuple(cand)
        counters.csf_evals += 1
        ok = p.csf.full_check(cand) and all(
            p.transition_ok(i, cand[i - 1], cand[i]) for i in range(1, p.N)
        ) and all(p.mask is None or p.mask[i][s] for i, s in enumerate(cand))
        if ok:
            f = evaluate_objective(p, cand)
            delta = f - cur_f
            if delta >= 0 or rng.random() < math.exp(delta / temp):
                cur, cur_f = cand, f
                if cur_f > best_f or (cur_f == best_f and cur < best):
                    best, best_f = cur, cur_f
        temp *= cfg.cooling_rate

    return SolveReport(
        solver="sa",
        best=Assignment(best, best_f),
        counters=counters,
        optimal_certified=False,
        labels=p.labels(best),
        wall_ms=(time.perf_counter() - t0) * 1e3,
    )
