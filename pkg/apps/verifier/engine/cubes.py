"""
Cubes over latch literals.

A state literal is coded ``2 * latch_index + negated``; a cube is the sorted tuple of its
codes with no duplicate or complementary entries.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuit import Circuit


def state_lit(latch: int, value: bool) -> int:
    return 2 * latch + (0 if value else 1)


class Cube(tuple):
    """Immutable, canonically sorted conjunction of state literals."""

    def __new__(cls, lits: Iterable[int] = ()):
        ordered = sorted(set(lits))
        for previous, current in zip(ordered, ordered[1:]):
            if previous >> 1 == current >> 1:
                raise ValueError(f"cube has complementary literals on latch {current >> 1}")
        return super().__new__(cls, ordered)

    @classmethod
    def from_values(cls, values: Sequence[bool], latches: Iterable[int] = None) -> 'Cube':
        """Full (or partial, over ``latches``) assignment cube of a latch valuation."""
        indices = range(len(values)) if latches is None else latches
        return cls(state_lit(index, values[index]) for index in indices)

    @property
    def latches(self):
        return [lit >> 1 for lit in self]

    def value_of(self, latch: int):
        """True/False when the cube fixes ``latch``, None otherwise."""
        if state_lit(latch, True) in self:
            return True
        if state_lit(latch, False) in self:
            return False
        return None

    def subsumes(self, other: 'Cube') -> bool:
        """Every state of ``other`` lies in ``self``: self's literals are a subset."""
        return len(self) <= len(other) and set(self) <= set(other)

    def without(self, lit: int) -> 'Cube':
        return Cube(code for code in self if code != lit)

    def satisfied_by(self, state: Sequence[bool]) -> bool:
        return all(bool(state[lit >> 1]) != bool(lit & 1) for lit in self)

    def intersects_init(self, circuit: Circuit) -> bool:
        """Some initial state lies in the cube; free-init latches never separate it."""
        for lit in self:
            init = circuit.latches[lit >> 1].init
            if init is not None and bool(init) == bool(lit & 1):
                return False
        return True

    def init_separator(self, circuit: Circuit):
        """A literal of the cube that every initial state violates, or None."""
        for lit in self:
            init = circuit.latches[lit >> 1].init
            if init is not None and bool(init) == bool(lit & 1):
                return lit
        return None

    def sat_lits(self, latch_vars: Sequence[int]) -> list:
        return [-latch_vars[lit >> 1] if lit & 1 else latch_vars[lit >> 1] for lit in self]

    def clause(self, latch_vars: Sequence[int]) -> list:
        """The blocking clause (negated cube) over the given SAT variables."""
        return [-sat_lit for sat_lit in self.sat_lits(latch_vars)]

    def describe(self, circuit: Circuit = None) -> str:
        def name(lit):
            index = lit >> 1
            label = None
            if circuit is not None:
                label = circuit.latch_names[index]
            label = label or f"l{index}"
            return f"!{label}" if lit & 1 else label
        return '{' + ', '.join(name(lit) for lit in self) + '}'


@dataclass(frozen=True)
class Unreachable:
    """Outcome of a reachability test: the cube literals that took part in the unsat core."""
    core: Cube


@dataclass(frozen=True)
class Reachable:
    """Outcome of a reachability test: a predecessor state and the inputs leading out of it."""
    state: tuple
    inputs: tuple
