import pytest

from msdp.adapters import adc_problem, default_adc_instance, dfa_problem
from msdp.adapters.dfa import DfaInstance, ECOLI_FRAGMENTS
from msdp.baselines import exhaustive_search


@pytest.fixture(scope="session")
def adc():
    return adc_problem(default_adc_instance())


@pytest.fixture(scope="session")
def dfa():
    return dfa_problem(DfaInstance(ECOLI_FRAGMENTS, bound=True))


@pytest.fixture(scope="session")
def dfa_unbounded():
    return dfa_problem(DfaInstance(ECOLI_FRAGMENTS, bound=False))


@pytest.fixture(scope="session")
def adc_es(adc):
    return exhaustive_search(adc)


@pytest.fixture(scope="session")
def dfa_es(dfa_unbounded):
    return exhaustive_search(dfa_unbounded)
