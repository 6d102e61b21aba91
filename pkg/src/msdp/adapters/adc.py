"""ADC bit allocation across the RF paths of a many-antenna receiver.

Each path ``i`` gets a resolution ``x_i`` from ``bits``; the reward is
``a_i^2 / (b_i^2 + d_i 2^{x_i})``, subject to a total power budget
``sum_i 2^{x_i} <= P_t`` and non-increasing resolutions along the paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Alphabet, InvalidInstanceError, ProblemH, StructuredCsf

REFERENCE_OPTIMUM = (4, 2, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1)


@dataclass(frozen=True)
class AdcInstance:
    a: tuple
    b: tuple
    d: tuple
    power_budget: float
    bits: tuple = (1, 2, 3, 4)

    def __post_init__(self):
        for name in ("a", "b", "d", "bits"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        n = len(self.a)
        if n < 1 or len(self.b) != n or len(self.d) != n:
            raise InvalidInstanceError("a, b and d must be non-empty and of equal length")
        if self.power_budget <= 0:
            raise InvalidInstanceError("power budget must be positive")
        if any(v == 0 for v in self.d):
            raise InvalidInstanceError("quantization coefficients d_i must be non-zero")
        if list(self.bits) != sorted(set(self.bits)) or not self.bits:
            raise InvalidInstanceError("bit set must be non-empty, distinct and ascending")
        for bi, di in zip(self.b, self.d):
            for x in self.bits:
                if bi * bi + di * 2.0**x == 0:
                    raise InvalidInstanceError("a reward denominator vanishes")

    @property
    def N(self) -> int:
        return len(self.a)

    def to_params(self) -> dict:
        return {
            "N": self.N,
            "a": list(self.a),
            "b": list(self.b),
            "d": list(self.d),
            "Pt": self.power_budget,
            "bits": list(self.bits),
        }

    @classmethod
    def from_params(cls, params: dict) -> "AdcInstance":
        inst = cls(params["a"], params["b"], params["d"], params["Pt"], tuple(params.get("bits", (1, 2, 3, 4))))
        if "N" in params and params["N"] != inst.N:
            raise InvalidInstanceError(f"adc params: N={params['N']} but {inst.N} paths given")
        return inst


def adc_reward(inst: AdcInstance, i: int, bits: int) -> float:
    return inst.a[i] ** 2 / (inst.b[i] ** 2 + inst.d[i] * 2.0**bits)


def adc_power(x) -> float:
    return float(sum(2**int(v) for v in x))


def adc_problem(inst: AdcInstance) -> ProblemH:
    n, m = inst.N, len(inst.bits)
    phi = np.array([[adc_reward(inst, i, x) for x in inst.bits] for i in range(n)])
    cost = np.array([[2.0**x for x in inst.bits] for _ in range(n)])
    csf = StructuredCsf(n, m, cost=cost, capacity=inst.power_budget, ordering=True)
    return ProblemH(
        alphabet=Alphabet(inst.bits),
        weights=np.ones(n),
        csf=csf,
        phi=phi,
        name="adc",
        meta={"adapter": "adc", "params": inst.to_params()},
    )


def default_adc_instance(n: int = 12, power_budget: float = 48, seed: int = 402) -> AdcInstance:
    """Deterministic synthetic receiver profile.

    Singular values decay geometrically (ratio 0.97) with a seeded jitter,
    noise power is drawn around 1, and the quantization coefficient is
    negative so that more bits raise the per-path reward while every
    denominator stays positive. With the default seed and ``N=12, P_t=48``
    the unique optimum is :data:`REFERENCE_OPTIMUM`.
    """
    rng = np.random.default_rng(seed)
    a = np.sort(3.0 * 0.97 ** np.arange(n) * rng.uniform(0.85, 1.15, n))[::-1]
    b = rng.uniform(0.9, 1.1, n)
    d = -(b**2) * rng.uniform(0.2, 0.9, n) / 16.0
    return AdcInstance(
        tuple(round(float(v), 6) for v in a),
        tuple(round(float(v), 6) for v in b),
        tuple(round(float(v), 8) for v in d),
        float(power_budget),
    )
