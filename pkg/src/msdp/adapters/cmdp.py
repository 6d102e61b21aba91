"""Finite-horizon constrained MDP planning posed as a staged problem.

The decision at stage ``i`` is a deterministic decision rule ``X -> A``.
Its reward is the expected one-step reward under the state distribution
reached by the earlier rules, weighted by ``gamma^(i-1)``; the expected
discounted constraint cost over the horizon must not exceed ``d``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from ..core import Alphabet, CsfOracle, InvalidInstanceError, MsdpError, ProblemH, Verdict

DEFAULT_RULE_CAP = 4096


class RuleSpaceTooLarge(MsdpError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteCmdp:
    P: np.ndarray  # (S, A, S) transition probabilities
    r: np.ndarray  # (S, A)
    c: np.ndarray  # (S, A)
    mu: np.ndarray  # (S,)
    gamma: float
    horizon: int
    d: float = float("inf")

    def __post_init__(self):
        for name in ("P", "r", "c", "mu"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        s, a = self.r.shape
        if self.P.shape != (s, a, s) or self.c.shape != (s, a) or self.mu.shape != (s,):
            raise InvalidInstanceError("inconsistent CMDP array shapes")
        if not np.allclose(self.P.sum(axis=2), 1.0, atol=1e-9, rtol=0):
            raise InvalidInstanceError("each transition row must sum to 1")
        if (self.P < 0).any() or (self.mu < 0).any():
            raise InvalidInstanceError("probabilities must be non-negative")
        if abs(self.mu.sum() - 1.0) > 1e-9:
            raise InvalidInstanceError("start distribution must sum to 1")
        if self.horizon < 1:
            raise InvalidInstanceError("horizon must be >= 1")
        if not 0.0 <= self.gamma <= 1.0:
            raise InvalidInstanceError("gamma must lie in [0, 1]")

    @property
    def n_states(self) -> int:
        return self.r.shape[0]

    @property
    def n_actions(self) -> int:
        return self.r.shape[1]

    def to_params(self) -> dict:
        return {
            "states": self.n_states,
            "actions": self.n_actions,
            "P": self.P.tolist(),
            "r": self.r.tolist(),
            "c": self.c.tolist(),
            "mu": self.mu.tolist(),
            "gamma": self.gamma,
            "horizon": self.horizon,
            "d": None if np.isinf(self.d) else self.d,
        }

    @classmethod
    def from_params(cls, params: dict) -> "FiniteCmdp":
        d = params.get("d")
        m = cls(
            np.array(params["P"]), np.array(params["r"]), np.array(params["c"]),
            np.array(params["mu"]), float(params["gamma"]), int(params["horizon"]),
            float("inf") if d is None else float(d),
        )
        if params.get("states", m.n_states) != m.n_states or params.get("actions", m.n_actions) != m.n_actions:
            raise InvalidInstanceError("cmdp params: declared state/action counts do not match the arrays")
        return m


def all_rules(m: FiniteCmdp, cap: int = DEFAULT_RULE_CAP) -> list:
    count = m.n_actions ** m.n_states
    if count > cap:
        raise RuleSpaceTooLarge(
            f"{count} deterministic decision rules exceed the cap of {cap}; pass an explicit rule list"
        )
    return list(itertools.product(range(m.n_actions), repeat=m.n_states))


class _CmdpCsf(CsfOracle):
    def __init__(self, m: FiniteCmdp, rules, propagate):
        self.m = m
        self.rules = rules
        self._propagate = propagate
        weights = [m.gamma ** i for i in range(m.horizon)]
        self._future_lo = [sum(weights[k:]) * float(m.c.min()) for k in range(m.horizon + 1)]
        self._future_hi = [sum(weights[k:]) * float(m.c.max()) for k in range(m.horizon + 1)]

    def _cost(self, prefix) -> float:
        return self._propagate(tuple(prefix))[1]

    def full_check(self, x):
        return self._cost(x) <= self.m.d

    def partial_check(self, prefix, n):
        k = len(prefix)
        if k == n:
            return Verdict.FEASIBLE if self.full_check(prefix) else Verdict.INFEASIBLE
        if np.isinf(self.m.d):
            return Verdict.FEASIBLE
        spent = self._cost(prefix)
        if spent + self._future_lo[k] > self.m.d:
            return Verdict.INFEASIBLE
        if spent + self._future_hi[k] <= self.m.d:
            return Verdict.FEASIBLE
        return Verdict.UNKNOWN


def cmdp_to_h(m: FiniteCmdp, rules: Optional[Sequence[Sequence[int]]] = None, rule_cap: int = DEFAULT_RULE_CAP) -> ProblemH:
    rules = [tuple(int(a) for a in rule) for rule in rules] if rules is not None else all_rules(m, rule_cap)
    for rule in rules:
        if len(rule) != m.n_states or not all(0 <= a < m.n_actions for a in rule):
            raise InvalidInstanceError(f"bad decision rule {rule}")
    idx = np.arange(m.n_states)
    P, r, c, gamma = m.P, m.r, m.c, m.gamma

    @lru_cache(maxsize=1 << 16)
    def propagate(prefix: tuple):
        # (state distribution after the prefix, discounted expected cost of the prefix)
        if not prefix:
            return m.mu, 0.0
        mu, cost = propagate(prefix[:-1])
        rule = np.asarray(rules[prefix[-1]])
        step_cost = float(mu @ c[idx, rule])
        cost = cost + gamma ** (len(prefix) - 1) * step_cost
        return mu @ P[idx, rule, :], cost

    def hook(stage: int, prefix: tuple, symbol: int) -> float:
        mu, _ = propagate(prefix)
        return float(mu @ r[idx, np.asarray(rules[symbol])])

    labels = tuple("".join(str(a) for a in rule) for rule in rules)
    return ProblemH(
        alphabet=Alphabet(labels),
        weights=np.array([gamma**i for i in range(m.horizon)]),
        csf=_CmdpCsf(m, rules, propagate),
        step_hook=hook,
        name="cmdp",
        meta={"adapter": "cmdp", "params": m.to_params(), "rules": rules},
    )
