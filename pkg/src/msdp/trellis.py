"""Implicit staged trellis: a stage-major grid of symbol nodes between S and F."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import Assignment, MsdpError, ProblemH, validate_assignment, InvalidAssignmentError


class EmptyStageError(MsdpError, ValueError):
    pass


class InvalidWalkError(MsdpError, ValueError):
    pass


@dataclass(frozen=True)
class Trellis:
    problem: ProblemH
    mask: np.ndarray  # N x M, True where a node exists

    @property
    def N(self) -> int:
        return self.problem.N

    @property
    def M(self) -> int:
        return self.problem.M

    def nodes(self, stage: int) -> list:
        return [int(s) for s in np.flatnonzero(self.mask[stage])]

    def has_edge(self, stage: int, prev: int, symbol: int) -> bool:
        """Edge from ``prev`` at ``stage - 1`` into ``symbol`` at ``stage`` (0-based)."""
        if not (self.mask[stage - 1][prev] and self.mask[stage][symbol]):
            return False
        return self.problem.transition_ok(stage, prev, symbol)

    def predecessors(self, stage: int, symbol: int) -> list:
        return [b for b in self.nodes(stage - 1) if self.has_edge(stage, b, symbol)]

    @property
    def num_nodes(self) -> int:
        return int(self.mask.sum()) + 2

    @property
    def num_edges(self) -> int:
        total = len(self.nodes(0)) + len(self.nodes(self.N - 1))
        for i in range(1, self.N):
            for s in self.nodes(i):
                total += len(self.predecessors(i, s))
        return total

    def edge_reward(self, stage: int, prev: Optional[int], symbol: Optional[int], prefix=()) -> float:
        """Folded reward on the edge leaving node ``prev`` at ``stage - 1``.

        ``stage == 0`` is the S edge (reward 0); ``symbol is None`` is the F
        edge. Rewards of transition-dependent problems are charged on the
        edge that enters the later stage, together with the source reward.
        """
        p = self.problem
        if stage == 0:
            return 0.0
        src = stage - 1
        r = p._unary_rows[src][prev]
        if symbol is not None and p._pair_rows is not None:
            r = r + p._pair_rows[stage][prev][symbol]
        return r

    def walk_reward(self, a: Assignment | Sequence[int]) -> float:
        p = self.problem
        if not p.tabular:
            raise InvalidWalkError("walk rewards need a tabular problem")
        values = a.values if isinstance(a, Assignment) else tuple(a)
        try:
            x = validate_assignment(p, values)
        except InvalidAssignmentError as exc:
            raise InvalidWalkError(str(exc)) from None
        for i, s in enumerate(x):
            if not self.mask[i][s]:
                raise InvalidWalkError(f"symbol {s} has no node at stage {i + 1}")
            if i and not self.has_edge(i, x[i - 1], s):
                raise InvalidWalkError(f"no edge into stage {i + 1} symbol {s}")
        acc = self.edge_reward(0, None, x[0])
        for i in range(1, len(x)):
            acc = acc + self.edge_reward(i, x[i - 1], x[i])
        return acc + self.edge_reward(len(x), x[-1], None)

    def to_dot(self) -> str:
        if self.N * self.M > 64:
            raise ValueError("DOT dumps are limited to N*M <= 64")
        p = self.problem
        lines = ["digraph trellis {", "  rankdir=LR;", '  S [shape=circle];', '  F [shape=doublecircle];']
        for i in range(self.N):
            for s in self.nodes(i):
                lines.append(f'  n{i}_{s} [label="{p.alphabet.label(s)}"];')
        for s in self.nodes(0):
            lines.append(f'  S -> n0_{s} [label="0"];')
        for i in range(1, self.N):
            for s in self.nodes(i):
                for b in self.predecessors(i, s):
                    w = self.edge_reward(i, b, s) if p.tabular else ""
                    lines.append(f'  n{i - 1}_{b} -> n{i}_{s} [label="{_fmt(w)}"];')
        for s in self.nodes(self.N - 1):
            w = self.edge_reward(self.N, s, None) if p.tabular else ""
            lines.append(f'  n{self.N - 1}_{s} -> F [label="{_fmt(w)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _fmt(w) -> str:
    return w if isinstance(w, str) else f"{w:.4g}"


def build_trellis(p: ProblemH, mask: Optional[np.ndarray] = None) -> Trellis:
    full = np.ones((p.N, p.M), dtype=bool)
    if p.mask is not None:
        full &= p.mask
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != full.shape:
            raise ValueError(f"mask must be {p.N}x{p.M}")
        full &= mask
    for i in range(p.N):
        if not full[i].any():
            raise EmptyStageError(f"every symbol is masked at stage {i + 1}")
    return Trellis(p, full)
