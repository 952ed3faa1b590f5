"""
Model checking engine for non-interference on sequential circuits.

Pure Python on top of python-sat; nothing in this package depends on Django.
"""

from .aiger import parse_aiger, write_aiger
from .benchmarks import FAMILIES, generate_benchmark
from .circuit import Circuit, SymmetryMap, simulate
from .ic3 import (
    CONFIGURATIONS, EngineOptions, IC3, SAFE, STATS_KEYS, Safe, Stats, Trace, UNKNOWN, UNSAFE,
    Unknown, Unsafe, check,
)
from .oracle import (
    Certificate, bmc, certify, explicit_reach, parse_certificate, parse_witness, replay,
    write_certificate, write_witness,
)
from .pairing import parse_pairing, write_pairing
from .selfcomp import NISpec, add_equivalence_predicates, self_compose

__all__ = [
    'CONFIGURATIONS', 'Certificate', 'Circuit', 'EngineOptions', 'FAMILIES', 'IC3', 'NISpec',
    'SAFE', 'STATS_KEYS', 'Safe', 'Stats', 'SymmetryMap', 'Trace', 'UNKNOWN', 'UNSAFE',
    'Unknown', 'Unsafe', 'add_equivalence_predicates', 'bmc', 'certify', 'check',
    'explicit_reach', 'generate_benchmark', 'parse_aiger', 'parse_certificate', 'parse_pairing',
    'parse_witness', 'replay', 'self_compose', 'simulate', 'write_aiger', 'write_certificate',
    'write_pairing', 'write_witness',
]
