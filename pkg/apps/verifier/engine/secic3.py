"""
Symmetric cubes and predicate replacement for self-composed circuits.

Both hook into blocking: once IC3 has generalized an unreachable cube, the cube may be
rewritten in terms of the ``neq`` equivalence predicates and, when symmetry is enabled,
its copy-swapped mirror is blocked alongside it.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Protocol

from .circuit import Circuit, SymmetryMap
from .cubes import Cube, Unreachable, state_lit
from .exceptions import SymmetryAuditError, SymmetryMapError

logger = logging.getLogger('verifier.engine')


class ReachabilityEngine(Protocol):
    circuit: Circuit
    mapping: Optional[SymmetryMap]
    options: object
    stats: object

    def reachability_test(self, cube: Cube, level: int):
        ...


def symmetric_cube(cube: Cube, mapping: SymmetryMap) -> Cube:
    """Swap every paired latch for its counterpart; self latches are kept."""
    partner = mapping.partner
    try:
        return Cube(2 * partner[lit >> 1] + (lit & 1) for lit in cube)
    except KeyError as exc:
        raise SymmetryMapError(f"latch {exc.args[0]} is not classified in the pairing map") from None


@dataclass(frozen=True)
class InequivalenceGroup:
    """Bit ``bit`` of register pair ``pair`` appears with opposite values in a cube."""
    pair: str
    bit: int
    positive: int      # state literal of the bit that is 1
    negative: int      # state literal of the bit that is 0
    first_positive: bool
    width: int


def find_groups(cube: Cube, mapping: SymmetryMap, require_predicate: bool = True) -> List[InequivalenceGroup]:
    """
    All per-bit patterns x_a[i] and not x_b[i] (either orientation) over paired registers.
    Pairs without a neq latch are skipped unless ``require_predicate`` is False, and so are
    pairs whose neq latch the cube already fixes to 0.
    """
    groups = []
    for pair in mapping.group_pairs:
        neq = mapping.neq_latches.get(pair.name)
        if require_predicate:
            if neq is None or cube.value_of(neq) is False:
                continue
        for bit, (first, second) in enumerate(zip(pair.first.bits, pair.second.bits)):
            first_value = cube.value_of(first)
            second_value = cube.value_of(second)
            if first_value is None or second_value is None or first_value == second_value:
                continue
            if first_value:
                positive, negative = state_lit(first, True), state_lit(second, False)
            else:
                positive, negative = state_lit(second, True), state_lit(first, False)
            groups.append(InequivalenceGroup(pair.name, bit, positive, negative, first_value, pair.width))
    return groups


def has_inequality_pattern(cube: Cube, mapping: SymmetryMap) -> bool:
    return bool(find_groups(cube, mapping, require_predicate=False))


def definition_lemmas(mapping: SymmetryMap) -> List[Cube]:
    """
    Cubes ``not neq and x_a[i] != x_b[i]``, one per bit and orientation of every pair with a
    neq latch. Any successor state of the augmented circuit avoids them.
    """
    lemmas = []
    for pair in mapping.group_pairs:
        neq = mapping.neq_latches.get(pair.name)
        if neq is None:
            continue
        for a, b in zip(pair.first.bits, pair.second.bits):
            for value in (True, False):
                lemmas.append(Cube((state_lit(neq, False), state_lit(a, value), state_lit(b, not value))))
    return lemmas


class ReplacementLattice:
    """
    Subsets of a cube's inequivalence groups ordered by inclusion. A node is a frozenset of
    group positions; its cube drops the literals of every replaced group and asserts the
    corresponding neq latches.
    """

    def __init__(self, cube: Cube, groups, mapping: SymmetryMap):
        self.base = cube
        self.groups = list(groups)
        self.mapping = mapping

    @property
    def top(self) -> frozenset:
        return frozenset(range(len(self.groups)))

    @property
    def bottom(self) -> frozenset:
        return frozenset()

    def cube(self, node) -> Cube:
        removed = set()
        added = set()
        for position in node:
            group = self.groups[position]
            removed.update((group.positive, group.negative))
            added.add(state_lit(self.mapping.neq_latches[group.pair], True))
        return Cube([lit for lit in self.base if lit not in removed] + sorted(added))

    def lower_cover(self, node) -> list:
        return [node - {position} for position in sorted(node)]


def _maximal_order(groups):
    return sorted(range(len(groups)),
                  key=lambda position: (-groups[position].width, groups[position].pair, groups[position].bit))


class _ReplacementTester:
    def __init__(self, engine: ReachabilityEngine, level: int):
        self.engine = engine
        self.level = level
        self.tests = 0

    def unreachable(self, cube: Cube) -> bool:
        if cube.intersects_init(self.engine.circuit):
            return False
        self.tests += 1
        self.engine.stats.replacement_tests += 1
        return isinstance(self.engine.reachability_test(cube, self.level), Unreachable)


def predicate_replace(engine: ReachabilityEngine, cube: Cube, level: int, mode: str) -> List[Cube]:
    """
    Rewrite an unreachable cube with equivalence predicates.

    Args:
        engine: provides the reachability test at ``level``
        cube: a cube already known unreachable at ``level``
        mode: 'aon', 'maximal' or 'maximum'

    Returns:
        list: unreachable cubes to block; ``[cube]`` when nothing could be replaced
    """
    groups = find_groups(cube, engine.mapping)
    if not groups:
        return [cube]
    lattice = ReplacementLattice(cube, groups, engine.mapping)
    tester = _ReplacementTester(engine, level)

    if mode == 'maximum' and 2 ** len(groups) > engine.options.maximum_test_cap:
        logger.debug(f"{len(groups)} groups exceed the lattice test cap; using maximal")
        mode = 'maximal'

    if mode == 'aon':
        top = lattice.cube(lattice.top)
        return [top] if tester.unreachable(top) else [cube]

    if mode == 'maximal':
        node = lattice.bottom
        for position in _maximal_order(groups):
            candidate = node | {position}
            if tester.unreachable(lattice.cube(candidate)):
                node = candidate
        return [lattice.cube(node)]

    if mode == 'maximum':
        return [lattice.cube(node) for node in maximum_nodes(lattice, tester.unreachable)]

    raise ValueError(f"unknown predicate replacement mode {mode!r}")


def maximum_nodes(lattice: ReplacementLattice, unreachable) -> list:
    """
    Maximal unreachable lattice nodes, found level by level from the top: reachable nodes
    are replaced by their lower cover, nodes below an accepted node are filtered out.
    The bottom node is the original cube and is never tested.
    """
    accepted = []
    frontier = {lattice.top}
    while frontier:
        below = set()
        for node in sorted(frontier, key=sorted):
            if any(node < kept for kept in accepted):
                continue
            if not node or unreachable(lattice.cube(node)):
                accepted.append(node)
            else:
                below.update(lattice.lower_cover(node))
        frontier = below
    return accepted


def blocked_cube_set(engine: ReachabilityEngine, cube: Cube, level: int,
                     obligation: Optional[Cube] = None) -> List[Cube]:
    """
    Cubes to block at ``level`` for the generalized ``cube``: its predicate replacements
    (when enabled) and, with symmetry, the mirror of each of them. When no replaced cube
    covers the proof obligation the generalized cube is kept as well, so the obligation is
    always excluded.
    """
    options = engine.options
    cubes = [cube]
    if options.pred != 'none':
        cubes = predicate_replace(engine, cube, level, options.pred)
        replaced = [candidate for candidate in cubes if candidate != cube]
        engine.stats.predicate_replacements += len(replaced)
        if obligation is not None and not any(candidate.subsumes(obligation) for candidate in cubes):
            cubes.append(cube)
    if not options.symmetry:
        return cubes

    mirrored = []
    for candidate in cubes:
        mirrored.append(candidate)
        mirror = symmetric_cube(candidate, engine.mapping)
        if mirror == candidate or mirror in cubes or mirror in mirrored:
            continue
        if mirror.intersects_init(engine.circuit):
            logger.warning(f"Mirror {mirror.describe(engine.circuit)} meets the initial states; not blocked")
            continue
        if options.audit_symmetric and not isinstance(engine.reachability_test(mirror, level), Unreachable):
            raise SymmetryAuditError(
                f"mirror {mirror.describe(engine.circuit)} of {candidate.describe(engine.circuit)} "
                f"is reachable at frame {level}")
        mirrored.append(mirror)
        engine.stats.symmetric_cubes_added += 1
    return mirrored
