"""JSON instance files, seeded instance generators and the witness search.

Instance document layout::

    {"name": str, "N": int, "alphabet": [labels], "b": [N reals],
     "phi": {"table": [[N x M reals]]}
            | {"adapter": "adc" | "dfa" | "cmdp", "params": {...}},
     "pair": [[M x M]]?, "mask": [[N x M bools]]?,
     "constraints": {"budget": {"cost": [[N x M]], "cap": real},
                     "ordering": "nonincreasing", "permutation": bool,
                     "blackbox": {"seed": int, "density": real},
                     "modular": {"modulus": int, "residue": int}}}

Adapter instances derive ``N``, ``alphabet`` and ``b`` from their params
(if present, they must agree) and take their constraints from the adapter.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .adapters import adc, cmdp, dfa
from .core import Alphabet, CsfOracle, InvalidInstanceError, ProblemH, StructuredCsf, Verdict

INSTANCE_KINDS = ("random-table", "adc", "dfa-random", "cmdp-random")
TABLE_FAMILIES = ("none", "budget", "ordering", "budget+ordering", "permutation", "blackbox", "modular")


class InstanceParseError(InvalidInstanceError):
    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


class _HashedFilter:
    """Deterministic pseudo-random accept/reject of full vectors."""

    def __init__(self, seed: int, density: float):
        self.seed, self.density = int(seed), float(density)

    def __call__(self, x: tuple) -> bool:
        h = hashlib.blake2b(f"{self.seed}:{','.join(map(str, x))}".encode(), digest_size=8)
        return int.from_bytes(h.digest(), "big") / 2.0**64 < self.density


class _ModularFilter:
    def __init__(self, modulus: int, residue: int):
        self.modulus, self.residue = int(modulus), int(residue)

    def __call__(self, x: tuple) -> bool:
        return sum(x) % self.modulus == self.residue % self.modulus


class CompositeCsf(CsfOracle):
    """Structured families plus opaque full-vector filters.

    Opaque filters give no information about prefixes, so only the
    structured part can rule a prefix out; everything else is UNKNOWN and
    left to the completion search.
    """

    def __init__(self, structured: StructuredCsf, filters: list):
        self.structured = structured
        self.filters = filters

    def full_check(self, x):
        return self.structured.full_check(x) and all(f(x) for f in self.filters)

    def partial_check(self, prefix, n):
        if len(prefix) == n:
            return Verdict.FEASIBLE if self.full_check(prefix) else Verdict.INFEASIBLE
        if self.structured.partial_check(prefix, n) is Verdict.INFEASIBLE:
            return Verdict.INFEASIBLE
        return Verdict.UNKNOWN


@dataclass
class Instance:
    doc: dict
    problem: ProblemH
    source: Optional[Path] = None

    @property
    def adapter(self) -> Optional[str]:
        return self.doc["phi"].get("adapter")


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise InstanceParseError(where, f"missing field {key!r}")
    return doc[key]


def _table_problem(doc: dict) -> ProblemH:
    n = _require(doc, "N", "instance")
    if not isinstance(n, int) or n < 1:
        raise InstanceParseError("N", "must be a positive integer")
    labels = _require(doc, "alphabet", "instance")
    if not isinstance(labels, list) or not labels:
        raise InstanceParseError("alphabet", "must be a non-empty list")
    m = len(labels)
    b = _require(doc, "b", "instance")
    if not isinstance(b, list) or len(b) != n:
        raise InstanceParseError("b", f"must be a list of {n} reals")
    table = doc["phi"]["table"]
    if len(table) != n or any(len(row) != m for row in table):
        raise InstanceParseError("phi.table", f"must be {n} rows of {m} reals")
    cons = doc.get("constraints", {}) or {}
    mask = doc.get("mask")
    budget = cons.get("budget")
    try:
        structured = StructuredCsf(
            n, m,
            cost=None if budget is None else budget["cost"],
            capacity=None if budget is None else budget["cap"],
            ordering=cons.get("ordering") == "nonincreasing",
            permutation=bool(cons.get("permutation", False)),
            allowed=mask,
        )
    except (KeyError, TypeError) as exc:
        raise InstanceParseError("constraints.budget", f"malformed block ({exc})") from None
    if cons.get("ordering") not in (None, "nonincreasing"):
        raise InstanceParseError("constraints.ordering", "only 'nonincreasing' is supported")
    unknown = set(cons) - {"budget", "ordering", "permutation", "blackbox", "modular"}
    if unknown:
        raise InstanceParseError("constraints", f"unknown constraint kind(s) {sorted(unknown)}")
    filters = []
    if "blackbox" in cons:
        filters.append(_HashedFilter(cons["blackbox"]["seed"], cons["blackbox"]["density"]))
    if "modular" in cons:
        filters.append(_ModularFilter(cons["modular"]["modulus"], cons["modular"]["residue"]))
    csf = CompositeCsf(structured, filters) if filters else structured
    return ProblemH(
        alphabet=Alphabet(tuple(labels)),
        weights=np.array(b, dtype=float),
        csf=csf,
        phi=np.array(table, dtype=float),
        pair=doc.get("pair"),
        mask=mask,
        permutation=bool(cons.get("permutation", False)),
        name=doc.get("name", "instance"),
    )


def problem_from_doc(doc: dict, base_dir: Optional[Path] = None) -> ProblemH:
    if not isinstance(doc, dict):
        raise InstanceParseError("instance", "top level must be a JSON object")
    phi = _require(doc, "phi", "instance")
    if not isinstance(phi, dict):
        raise InstanceParseError("phi", "must be an object")
    try:
        if "table" in phi:
            return _table_problem(doc)
        kind = phi.get("adapter")
        params = phi.get("params")
        if params is None:
            raise InstanceParseError("phi", "need either 'table' or 'adapter' + 'params'")
        if kind == "adc":
            p = adc.adc_problem(adc.AdcInstance.from_params(params))
        elif kind == "dfa":
            p = dfa.dfa_problem(dfa.DfaInstance.from_params(params, base_dir))
        elif kind == "cmdp":
            p = cmdp.cmdp_to_h(cmdp.FiniteCmdp.from_params(params), params.get("rules"))
        else:
            raise InstanceParseError("phi.adapter", f"unknown adapter {kind!r}")
    except KeyError as exc:
        raise InstanceParseError("phi.params", f"missing field {exc}") from None
    if "name" in doc:
        p.name = doc["name"]
    if "N" in doc and doc["N"] != p.N:
        raise InstanceParseError("N", f"declares {doc['N']} but the adapter builds {p.N} stages")
    if "alphabet" in doc and list(doc["alphabet"]) != list(p.alphabet.labels):
        raise InstanceParseError("alphabet", "does not match the adapter's alphabet")
    return p


def load_instance(source) -> Instance:
    if isinstance(source, dict):
        return Instance(source, problem_from_doc(source))
    path = Path(source)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    except OSError as exc:
        raise InstanceParseError(str(path), exc.strerror or str(exc)) from None
    return Instance(doc, problem_from_doc(doc, path.parent), path)


def dumps_instance(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def dump_instance(doc: dict, path) -> None:
    Path(path).write_text(dumps_instance(doc))


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("msdp") / "data" / name))


def _adapter_doc(name: str, kind: str, p: ProblemH, params: dict) -> dict:
    return {
        "name": name,
        "N": p.N,
        "alphabet": list(p.alphabet.labels),
        "b": p.weights.tolist(),
        "phi": {"adapter": kind, "params": params},
        "constraints": {},
    }


# generators ------------------------------------------------------------------


def gen_random_table(n: int, m: int, seed: int, family: str = "budget") -> dict:
    if family not in TABLE_FAMILIES:
        raise ValueError(f"unknown constraint family {family!r}; choose from {TABLE_FAMILIES}")
    rng = np.random.default_rng(seed)
    # two-decimal rewards make exact ties common enough to exercise tie-breaking
    phi = np.round(rng.uniform(0.0, 10.0, (n, m)), 2)
    b = np.round(rng.uniform(0.5, 1.5, n), 2) if rng.random() < 0.5 else np.ones(n)
    cons: dict = {}
    if "budget" in family:
        cost = rng.integers(1, 6, (n, m))
        cons["budget"] = {"cost": cost.tolist(), "cap": int(cost.min(axis=1).sum() + rng.integers(0, 2 * n + 1))}
    if "ordering" in family:
        cons["ordering"] = "nonincreasing"
    if family == "permutation":
        cons["permutation"] = True
    if family == "blackbox":
        cons["blackbox"] = {"seed": int(rng.integers(0, 2**31)), "density": round(float(rng.uniform(0.05, 0.5)), 3)}
    if family == "modular":
        q = int(rng.integers(2, 5))
        cons["modular"] = {"modulus": q, "residue": int(rng.integers(0, q))}
    return {
        "name": f"random-table-{family}-n{n}-m{m}-s{seed}",
        "N": n,
        "alphabet": list(range(m)),
        "b": b.tolist(),
        "phi": {"table": phi.tolist()},
        "constraints": cons,
    }


def gen_adc(n: int = 12, power_budget: float = 48, seed: int = 402) -> dict:
    inst = adc.default_adc_instance(n, power_budget, seed)
    return _adapter_doc(f"adc-n{n}-pt{power_budget:g}-s{seed}", "adc", adc.adc_problem(inst), inst.to_params())


def gen_dfa_random(n: int = 8, length: int = 8, seed: int = 0, bound: bool = True) -> dict:
    """Shred a random genome into ``n`` overlapping reads of ``length`` bases."""
    rng = np.random.default_rng(seed)
    step = max(1, length // 4)
    genome = "".join(rng.choice(list("ACGT"), step * (n - 1) + length))
    frags = [genome[k * step:k * step + length] for k in range(n)]
    order = rng.permutation(n)
    inst = dfa.DfaInstance(tuple(frags[k] for k in order), bound=bound)
    return _adapter_doc(f"dfa-random-n{n}-s{seed}", "dfa", dfa.dfa_problem(inst), inst.to_params())


def gen_cmdp_random(states: int = 2, actions: int = 2, horizon: int = 3, seed: int = 0, constrained: bool = True) -> dict:
    rng = np.random.default_rng(seed)
    P = rng.dirichlet(np.ones(states), size=(states, actions))
    r = rng.uniform(0, 1, (states, actions))
    c = rng.uniform(0, 1, (states, actions))
    mu = rng.dirichlet(np.ones(states))
    gamma = float(rng.uniform(0.5, 1.0))
    d = None
    if constrained:
        # somewhere between the cheapest and the dearest per-step cost profile
        total = sum(gamma**i for i in range(horizon))
        d = float(total * rng.uniform(c.min(axis=1).mean(), c.max(axis=1).mean()))
    m = cmdp.FiniteCmdp(P, r, c, mu, gamma, horizon, float("inf") if d is None else d)
    return _adapter_doc(f"cmdp-s{states}-a{actions}-h{horizon}-s{seed}", "cmdp", cmdp.cmdp_to_h(m), m.to_params())


def generate(kind: str, seed: int = 0, **params) -> dict:
    if kind == "random-table":
        return gen_random_table(params.get("N", 4), params.get("M", 3), seed, params.get("family", "budget"))
    if kind == "adc":
        return gen_adc(params.get("N", 12), params.get("Pt", 48), seed)
    if kind == "dfa-random":
        return gen_dfa_random(params.get("N", 8), params.get("length", 8), seed, params.get("bound", True))
    if kind == "cmdp-random":
        return gen_cmdp_random(
            params.get("states", 2), params.get("actions", 2), params.get("horizon", 3), seed,
            params.get("constrained", True),
        )
    raise ValueError(f"unknown instance kind {kind!r}; choose from {INSTANCE_KINDS}")


def find_single_survivor_witness(seed: int = 0, max_attempts: int = 10_000, n_max: int = 4, m_max: int = 3):
    """Search small budget-constrained instances until single-survivor DP
    returns a strictly worse value than exhaustive search.

    Returns ``(doc, single_value, optimum, attempts)`` or ``None``.
    """
    from .baselines import exhaustive_search
    from .solver import InfeasibleError, SurvivorPolicy, msdp_solve

    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        n = int(rng.integers(2, n_max + 1))
        m = int(rng.integers(2, m_max + 1))
        doc = gen_random_table(n, m, int(rng.integers(0, 2**31)), "budget")
        p = problem_from_doc(doc)
        try:
            opt = exhaustive_search(p).objective
        except InfeasibleError:
            continue
        try:
            single = msdp_solve(p, SurvivorPolicy.single()).objective
        except InfeasibleError:
            # losing every survivor is a failure too, but a finite worse value is the sharper witness
            continue
        if single < opt:
            doc["name"] = f"single-survivor-witness-s{seed}-a{attempt}"
            return doc, single, opt, attempt
    return None
