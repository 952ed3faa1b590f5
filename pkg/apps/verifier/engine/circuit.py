"""
Bit-level circuit data model.

A Circuit is an and-inverter graph with latches, a single bad literal and invariant
constraints. Literals use the AIGER encoding 2*var + negated; variable 0 is the constant,
so literal 0 is false and literal 1 is true.
"""

import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, NamedTuple, Optional, Sequence

from .exceptions import DimensionError, SymmetryMapError

logger = logging.getLogger('verifier.circuit')

FALSE = 0
TRUE = 1

_BIT_NAME = re.compile(r'^(?P<base>.+)\[(?P<bit>\d+)\]$')


def lit_var(lit: int) -> int:
    return lit >> 1


def is_negated(lit: int) -> bool:
    return bool(lit & 1)


def negate(lit: int) -> int:
    return lit ^ 1


def make_lit(var: int, negated: bool = False) -> int:
    return (var << 1) | int(negated)


class Literal(NamedTuple):
    var: int
    negated: bool = False

    def encode(self) -> int:
        return make_lit(self.var, self.negated)

    @classmethod
    def decode(cls, code: int) -> 'Literal':
        if code < 0:
            raise ValueError(f"literal code must be non-negative, got {code}")
        return cls(lit_var(code), is_negated(code))


def split_bit_name(name: Optional[str]):
    """Split ``r[3]`` into ``('r', 3)``; plain names give ``(name, None)``."""
    if name is None:
        return None, None
    match = _BIT_NAME.match(name)
    if not match:
        return name, None
    return match.group('base'), int(match.group('bit'))


@dataclass(frozen=True)
class Latch:
    lit: int
    next: int
    init: Optional[int] = 0  # 0, 1, or None for a free initial value

    @property
    def var(self) -> int:
        return lit_var(self.lit)


@dataclass(frozen=True)
class AndGate:
    lhs: int
    rhs0: int
    rhs1: int


@dataclass(frozen=True)
class Circuit:
    """
    Immutable transition system: Init from latch init values, Tr from latches and ANDs,
    P as the negation of ``bad`` under the conjoined ``constraints``.
    """
    num_vars: int = 0
    inputs: tuple = ()
    latches: tuple = ()
    ands: tuple = ()
    outputs: tuple = ()
    bad: int = FALSE
    constraints: tuple = ()
    input_names: tuple = ()
    latch_names: tuple = ()
    output_names: tuple = ()

    def __post_init__(self):
        for attr, names_attr in (('inputs', 'input_names'), ('latches', 'latch_names'),
                                 ('outputs', 'output_names')):
            names = getattr(self, names_attr)
            items = getattr(self, attr)
            if not names:
                object.__setattr__(self, names_attr, (None,) * len(items))
            elif len(names) != len(items):
                raise ValueError(f"{names_attr} has {len(names)} entries for {len(items)} {attr}")

    @property
    def num_inputs(self) -> int:
        return len(self.inputs)

    @property
    def num_latches(self) -> int:
        return len(self.latches)

    @cached_property
    def latch_index_by_var(self) -> dict:
        return {latch.var: index for index, latch in enumerate(self.latches)}

    @cached_property
    def input_index_by_var(self) -> dict:
        return {lit_var(lit): index for index, lit in enumerate(self.inputs)}

    @property
    def undef_latches(self) -> list:
        return [index for index, latch in enumerate(self.latches) if latch.init is None]

    def latch_index(self, name: str) -> int:
        try:
            return self.latch_names.index(name)
        except ValueError:
            raise KeyError(f"no latch named {name!r}") from None

    def signal_bits(self, kind: str, base: str) -> list:
        """
        Indices of the inputs/latches/outputs forming signal ``base``: either a single
        entry named ``base`` or the entries ``base[0..w-1]`` ordered LSB first.
        """
        names = {'input': self.input_names, 'latch': self.latch_names,
                 'output': self.output_names}[kind]
        plain = [index for index, name in enumerate(names) if name == base]
        if plain:
            return plain
        bits = {}
        for index, name in enumerate(names):
            name_base, bit = split_bit_name(name)
            if name_base == base and bit is not None:
                bits[bit] = index
        if bits and sorted(bits) != list(range(len(bits))):
            raise ValueError(f"{kind} {base!r} has non-contiguous bits {sorted(bits)}")
        return [bits[bit] for bit in sorted(bits)]

    def register_groups(self) -> list:
        """Latch registers declared with indexed names, as RegisterGroup objects."""
        bases = {}
        for index, name in enumerate(self.latch_names):
            base, bit = split_bit_name(name)
            if bit is not None:
                bases.setdefault(base, {})[bit] = index
        groups = []
        for base, bits in bases.items():
            if sorted(bits) == list(range(len(bits))):
                groups.append(RegisterGroup(base, tuple(bits[b] for b in sorted(bits))))
        return groups

    def validate(self):
        """Check the structural invariants; raise ValueError on the first violation."""
        defined = {0}
        for lit in self.inputs:
            self._define(lit, defined)
        for latch in self.latches:
            self._define(latch.lit, defined)
        for gate in self.ands:
            for rhs in (gate.rhs0, gate.rhs1):
                if lit_var(rhs) not in defined:
                    raise ValueError(f"AND {gate.lhs} uses {rhs} before its definition")
            self._define(gate.lhs, defined)
        used = [latch.next for latch in self.latches] + list(self.outputs)
        used += [self.bad] + list(self.constraints)
        for lit in used:
            if lit_var(lit) not in defined:
                raise ValueError(f"literal {lit} references an undefined variable")
        for latch in self.latches:
            if latch.init not in (0, 1, None):
                raise ValueError(f"latch {latch.lit} has invalid init {latch.init}")

    def _define(self, lit, defined):
        if lit & 1 or lit < 2:
            raise ValueError(f"definition literal {lit} must be positive and non-constant")
        var = lit_var(lit)
        if var > self.num_vars:
            raise ValueError(f"literal {lit} exceeds maximum variable {self.num_vars}")
        if var in defined:
            raise ValueError(f"variable {var} defined twice")
        defined.add(var)


@dataclass(frozen=True)
class RegisterGroup:
    name: str
    bits: tuple  # latch indices, LSB first

    @property
    def width(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class GroupPair:
    """A word-level register of copy 1 (``first``) and its copy-2 counterpart."""
    name: str
    first: RegisterGroup
    second: RegisterGroup

    @property
    def width(self) -> int:
        return self.first.width


@dataclass(frozen=True)
class SymmetryMap:
    """
    Copy relabelling of a self-composition. ``latch_pairs`` holds (copy1, copy2) latch
    indices, ``neq_latches`` maps a group pair name to its inequivalence predicate latch.
    """
    latch_pairs: tuple = ()
    group_pairs: tuple = ()
    neq_latches: Mapping = field(default_factory=dict)
    self_latches: tuple = ()

    @cached_property
    def partner(self) -> dict:
        mapping = {}
        for first, second in self.latch_pairs:
            mapping[first] = second
            mapping[second] = first
        for index in self.self_latches:
            mapping[index] = index
        return mapping

    @cached_property
    def group_pair_by_name(self) -> dict:
        return {pair.name: pair for pair in self.group_pairs}

    @property
    def has_predicates(self) -> bool:
        return bool(self.neq_latches)

    def permutation(self, num_latches: int) -> list:
        """Latch permutation as a list; raise SymmetryMapError on unclassified latches."""
        mapping = self.partner
        try:
            return [mapping[index] for index in range(num_latches)]
        except KeyError as exc:
            raise SymmetryMapError(f"latch {exc.args[0]} is not classified") from None

    def validate(self, num_latches: int):
        seen = {}

        def claim(index, role):
            if not 0 <= index < num_latches:
                raise SymmetryMapError(f"unknown latch index {index} in {role}")
            if index in seen:
                raise SymmetryMapError(
                    f"latch {index} appears in {seen[index]} and {role}: pairing is not an involution")
            seen[index] = role

        for first, second in self.latch_pairs:
            if first == second:
                raise SymmetryMapError(f"latch {first} paired with itself")
            claim(first, f"pair {first} {second}")
            claim(second, f"pair {first} {second}")
        for index in self.self_latches:
            claim(index, f"self {index}")
        missing = sorted(set(range(num_latches)) - set(seen))
        if missing:
            raise SymmetryMapError(f"latches left unclassified: {missing}")

        ordered = set(self.latch_pairs)
        names = set()
        for pair in self.group_pairs:
            if pair.name in names:
                raise SymmetryMapError(f"duplicate group {pair.name!r}")
            names.add(pair.name)
            if pair.first.width != pair.second.width:
                raise SymmetryMapError(
                    f"group {pair.name!r} width mismatch: {pair.first.width} vs {pair.second.width}")
            if pair.first.width == 0:
                raise SymmetryMapError(f"group {pair.name!r} is empty")
            for group in (pair.first, pair.second):
                if len(set(group.bits)) != group.width:
                    raise SymmetryMapError(f"group {pair.name!r} repeats a latch")
            for a, b in zip(pair.first.bits, pair.second.bits):
                if (a, b) not in ordered:
                    raise SymmetryMapError(
                        f"group {pair.name!r} bits {a}/{b} are not a (copy1, copy2) latch pair")
        self_set = set(self.self_latches)
        for name, index in self.neq_latches.items():
            if name not in names:
                raise SymmetryMapError(f"neq binding for unknown group {name!r}")
            if index not in self_set:
                raise SymmetryMapError(f"neq latch {index} of {name!r} must be a self latch")


@dataclass(frozen=True)
class SimulationRun:
    states: tuple    # latch valuation at the start of every completed cycle
    bad: tuple       # bad literal value per completed cycle
    violated_at: Optional[int] = None  # cycle whose constraints failed, run truncated there


def literal_value(values, lit: int) -> bool:
    return bool(values[lit >> 1] ^ (lit & 1))


def evaluate(circuit: Circuit, state: Sequence[bool], inputs: Sequence[bool]) -> bytearray:
    """Evaluate every variable for one cycle; index the result with literal_value."""
    values = bytearray(circuit.num_vars + 1)
    for lit, value in zip(circuit.inputs, inputs):
        values[lit >> 1] = value
    for latch, value in zip(circuit.latches, state):
        values[latch.lit >> 1] = value
    for gate in circuit.ands:
        values[gate.lhs >> 1] = (
            (values[gate.rhs0 >> 1] ^ (gate.rhs0 & 1)) & (values[gate.rhs1 >> 1] ^ (gate.rhs1 & 1))
        )
    return values


def initial_state(circuit: Circuit, init: Mapping[int, bool]) -> tuple:
    undef = set(circuit.undef_latches)
    if set(init) != undef:
        raise DimensionError(
            f"init must assign exactly the undef latches {sorted(undef)}, got {sorted(init)}")
    return tuple(bool(init[index]) if latch.init is None else bool(latch.init)
                 for index, latch in enumerate(circuit.latches))


def simulate(circuit: Circuit, init: Mapping[int, bool], stimulus: Sequence[Sequence[bool]]) -> SimulationRun:
    """Cycle-accurate concrete simulation; stops at the first cycle violating a constraint."""
    state = initial_state(circuit, init)
    states, bad = [], []
    violated_at = None
    for cycle, inputs in enumerate(stimulus):
        if len(inputs) != circuit.num_inputs:
            raise DimensionError(
                f"cycle {cycle}: expected {circuit.num_inputs} inputs, got {len(inputs)}")
        values = evaluate(circuit, state, inputs)
        if not all(literal_value(values, lit) for lit in circuit.constraints):
            violated_at = cycle
            logger.debug(f"Simulation truncated at cycle {cycle}: constraint violated")
            break
        states.append(state)
        bad.append(literal_value(values, circuit.bad))
        state = tuple(literal_value(values, latch.next) for latch in circuit.latches)
    return SimulationRun(tuple(states), tuple(bad), violated_at)
