"""
Shared fixtures: tiny hand-built circuits and self-composed benchmark instances.
"""

import pytest

from apps.verifier.engine import add_equivalence_predicates, generate_benchmark, self_compose
from apps.verifier.engine.builder import AigBuilder
from apps.verifier.engine.circuit import negate


def compose(family, size, constrained=True, predicates=False):
    """Self-composed benchmark instance as (circuit, map, expected)."""
    source, spec, expected = generate_benchmark(family, size, constrained)
    circuit, mapping = self_compose(source, spec)
    if predicates:
        circuit, mapping = add_equivalence_predicates(circuit, mapping)
    return circuit, mapping, expected


@pytest.fixture
def composed():
    return compose


@pytest.fixture
def toggle_circuit():
    """One latch, init 0, next = not(state)."""
    builder = AigBuilder()
    state = builder.latch('t')
    builder.set_next(state, negate(state))
    builder.output(state, 't_out')
    return builder.build()


@pytest.fixture
def free_input_bad():
    """The smallest unsafe circuit: bad is a free input."""
    builder = AigBuilder()
    builder.bad = builder.input('x')
    return builder.build()


@pytest.fixture
def disable_persistence(settings):
    settings.SECIC3 = {**settings.SECIC3, 'PERSIST_RUNS': False}
    return settings
