import json

import pytest
from hypothesis import given, settings, strategies as st

from msdp.adapters import ECOLI_FRAGMENTS, DfaInstance, dfa_problem
from msdp.baselines import exhaustive_search
from msdp.instances import (
    INSTANCE_KINDS,
    TABLE_FAMILIES,
    InstanceParseError,
    _adapter_doc,
    bundled_path,
    dump_instance,
    dumps_instance,
    find_single_survivor_witness,
    gen_adc,
    generate,
    load_instance,
    problem_from_doc,
)
from msdp.solver import SurvivorPolicy, msdp_solve


def test_bundled_adc_equals_generator():
    doc = gen_adc()
    doc["name"] = "adc-bit-allocation"
    assert bundled_path("adc_default.json").read_text() == dumps_instance(doc)


def test_bundled_dfa_equals_generator():
    inst = DfaInstance(ECOLI_FRAGMENTS, bound=True)
    doc = _adapter_doc("dfa-ecoli", "dfa", dfa_problem(inst), inst.to_params())
    assert bundled_path("dfa_ecoli.json").read_text() == dumps_instance(doc)


@settings(max_examples=40, deadline=None)
@given(kind=st.sampled_from(INSTANCE_KINDS), seed=st.integers(0, 10_000))
def test_generators_are_deterministic_and_round_trip(kind, seed):
    params = {"N": 6} if kind in ("adc", "dfa-random") else {}
    a = dumps_instance(generate(kind, seed, **params))
    b = dumps_instance(generate(kind, seed, **params))
    assert a == b
    doc = json.loads(a)
    p = problem_from_doc(doc)
    assert dumps_instance(json.loads(dumps_instance(doc))) == a
    assert p.N == doc["N"] and list(p.alphabet.labels) == doc["alphabet"]


@pytest.mark.parametrize("family", TABLE_FAMILIES)
def test_table_families_load(family):
    doc = generate("random-table", 3, N=4, M=4, family=family)
    p = problem_from_doc(doc)
    assert (p.N, p.M) == (4, 4)
    assert p.permutation == (family == "permutation")


def test_load_from_file(tmp_path):
    doc = generate("random-table", 7, N=4, M=3)
    path = tmp_path / "x.json"
    dump_instance(doc, path)
    inst = load_instance(path)
    assert inst.source == path and inst.doc == doc and inst.adapter is None
    assert load_instance(doc).problem.N == 4


def test_fasta_reference_is_relative_to_the_file(tmp_path):
    (tmp_path / "f.fasta").write_text(">a\nACGTAC\n>b\nGTACCA\n>c\nCCATTG\n")
    doc = {"name": "t", "phi": {"adapter": "dfa", "params": {"fasta": "f.fasta"}}}
    path = tmp_path / "t.json"
    path.write_text(json.dumps(doc))
    p = load_instance(path).problem
    assert p.N == 3 and p.permutation


def test_json_syntax_error_has_location(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n "N": 3,\n "b": [1, 2,]\n}\n')
    with pytest.raises(InstanceParseError) as err:
        load_instance(path)
    assert f"{path}:3:" in str(err.value)


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d.pop("b"), "instance"),
    (lambda d: d.update(N=0), "N"),
    (lambda d: d["phi"]["table"].pop(), "phi.table"),
    (lambda d: d.update(constraints={"sorted": True}), "constraints"),
    (lambda d: d.update(constraints={"ordering": "increasing"}), "constraints.ordering"),
    (lambda d: d.update(constraints={"budget": {"cap": 3}}), "constraints.budget"),
    (lambda d: d.update(phi={"adapter": "tsp", "params": {}}), "phi.adapter"),
    (lambda d: d.update(phi={"adapter": "adc"}), "phi"),
])
def test_field_diagnostics(mutate, where):
    doc = generate("random-table", 1, N=3, M=2)
    mutate(doc)
    with pytest.raises(InstanceParseError) as err:
        problem_from_doc(doc)
    assert err.value.where == where


def test_adapter_header_must_agree():
    doc = gen_adc(n=4, power_budget=12)
    doc["N"] = 5
    with pytest.raises(InstanceParseError):
        problem_from_doc(doc)


def test_witness_search():
    found = find_single_survivor_witness(seed=0)
    assert found is not None
    doc, single, opt, attempts = found
    assert attempts <= 10_000 and doc["N"] <= 4 and len(doc["alphabet"]) <= 3
    p = problem_from_doc(doc)
    assert msdp_solve(p, SurvivorPolicy.single()).objective == single < opt
    assert exhaustive_search(p).objective == opt == msdp_solve(p).objective


def test_witness_search_can_give_up():
    assert find_single_survivor_witness(seed=0, max_attempts=1, n_max=2, m_max=2) is None


def test_blackbox_filter_is_stable():
    doc = generate("random-table", 5, N=3, M=3, family="blackbox")
    p1, p2 = problem_from_doc(doc), problem_from_doc(doc)
    xs = [(a, b, c) for a in range(3) for b in range(3) for c in range(3)]
    assert [p1.csf.full_check(x) for x in xs] == [p2.csf.full_check(x) for x in xs]
