"""
IC3 / property directed reachability over a Circuit.

Frames are delta-encoded: a blocked cube lives in ``delta[k]`` for the highest level k at
which it is known unreachable, so F_k is the conjunction of the negated cubes of every
level >= k. Each frame level owns one incremental solver holding exactly those clauses;
level 0 holds the initial states instead.
"""

import logging
import random
import time
from dataclasses import dataclass, field
from typing import Optional

from . import secic3
from .circuit import Circuit, SymmetryMap
from .cubes import Cube, Reachable, Unreachable
from .exceptions import FrameAuditError, ResourceLimitReached
from .sat import SolverInstance, Step, Unsat, init_clauses

logger = logging.getLogger('verifier.engine')

SAFE = 'safe'
UNSAFE = 'unsafe'
UNKNOWN = 'unknown'

PREDICATE_MODES = ('none', 'aon', 'maximal', 'maximum')

# (name, symmetry, predicate mode), baseline first
CONFIGURATIONS = (
    ('baseline', False, 'none'),
    ('sym', True, 'none'),
    ('aon', False, 'aon'),
    ('maximal', False, 'maximal'),
    ('maximum', False, 'maximum'),
    ('sym+aon', True, 'aon'),
    ('sym+maximal', True, 'maximal'),
    ('sym+maximum', True, 'maximum'),
)


@dataclass(frozen=True)
class EngineOptions:
    symmetry: bool = False
    pred: str = 'none'
    audit_symmetric: bool = False
    audit_frames: bool = False
    sat_debug: bool = False
    timeout_s: Optional[float] = None
    max_frames: Optional[int] = None
    max_obligations: Optional[int] = None
    conflict_budget: Optional[int] = None
    seed: int = 0
    solver: str = 'm22'
    maximum_test_cap: int = 1024
    dimacs_dir: Optional[str] = None

    def __post_init__(self):
        if self.pred not in PREDICATE_MODES:
            raise ValueError(f"predicate mode must be one of {PREDICATE_MODES}, got {self.pred!r}")

    @property
    def config_name(self) -> str:
        for name, symmetry, pred in CONFIGURATIONS:
            if (symmetry, pred) == (self.symmetry, self.pred):
                return name
        return 'custom'

    def check_mapping(self, mapping: Optional[SymmetryMap]):
        """Raise ValueError when the options need pairing information the map lacks."""
        if self.symmetry and mapping is None:
            raise ValueError("symmetric cubes require a pairing map")
        if self.pred != 'none' and (mapping is None or not mapping.has_predicates):
            raise ValueError(f"--pred={self.pred} requires neq bindings in the pairing map")


STATS_KEYS = (
    'block_calls', 'inequality_cube_blocks', 'reachability_tests', 'sat_queries',
    'generalize_drops', 'predicate_replacements', 'replacement_tests',
    'symmetric_cubes_added', 'clauses_learned', 'propagated_clauses',
)


@dataclass
class Stats:
    block_calls: int = 0
    inequality_cube_blocks: int = 0
    reachability_tests: int = 0
    sat_queries: int = 0
    generalize_drops: int = 0
    predicate_replacements: int = 0
    replacement_tests: int = 0
    symmetric_cubes_added: int = 0
    clauses_learned: int = 0
    propagated_clauses: int = 0
    frame_sizes: list = field(default_factory=list)
    wall_time_s: float = 0.0

    def as_dict(self) -> dict:
        data = {key: getattr(self, key) for key in STATS_KEYS}
        data['frame_sizes'] = list(self.frame_sizes)
        data['wall_time_s'] = round(self.wall_time_s, 6)
        return data


@dataclass(frozen=True)
class Trace:
    """Concrete counterexample: values of the free-init latches and one input vector per cycle."""
    init: dict
    inputs: tuple


@dataclass(frozen=True)
class Safe:
    invariant: tuple
    frames_used: int
    stats: Stats
    verdict: str = SAFE


@dataclass(frozen=True)
class Unsafe:
    trace: Trace
    stats: Stats
    verdict: str = UNSAFE


@dataclass(frozen=True)
class Unknown:
    bound: int
    reason: str
    stats: Stats
    verdict: str = UNKNOWN


class _FrameSolver:
    def __init__(self, engine, level):
        options = engine.options
        self.solver = SolverInstance(
            name=options.solver, debug=options.sat_debug, dimacs_dir=options.dimacs_dir,
            label=f"frame{level}", conflict_budget=options.conflict_budget)
        self.step = Step(self.solver, engine.circuit)
        self.step.assert_constraints()
        self.primes = self.step.primed()
        if level == 0:
            for clause in init_clauses(engine.circuit, self.step.state):
                self.solver.add_clause(clause)

    def block(self, cube: Cube):
        self.solver.add_clause(cube.clause(self.step.state))

    def activation(self, clause) -> int:
        """A fresh literal that enables ``clause`` only while assumed."""
        act = self.solver.new_var()
        self.solver.add_clause([-act] + list(clause))
        return act

    def retire(self, act: int):
        self.solver.add_clause([-act])


class IC3:
    """
    One verification run. Not thread-safe; independent runs may share nothing but the
    immutable circuit and map.
    """

    def __init__(self, circuit: Circuit, mapping: Optional[SymmetryMap] = None,
                 options: EngineOptions = EngineOptions()):
        options.check_mapping(mapping)
        self.circuit = circuit
        self.mapping = mapping
        self.options = options
        self.stats = Stats()
        self.delta = []
        self.solvers = []
        self._obligations = 0
        self._rng = random.Random(options.seed)
        self._deadline = None
        self._started = None
        # highest frame shown to hold no bad state
        self._cleared = 0

    # frames

    @property
    def depth(self) -> int:
        return len(self.delta) - 1

    def frame_cubes(self, level: int) -> set:
        cubes = set()
        for cubes_at in self.delta[max(level, 1):]:
            cubes |= cubes_at
        return cubes

    def open_frame(self):
        self.delta.append(set())
        self.solvers.append(_FrameSolver(self, len(self.solvers)))
        logger.debug(f"Opened frame {self.depth}")

    def add_blocked(self, cube: Cube, level: int) -> bool:
        """Insert ``cube`` at ``level``, dropping cubes it subsumes at levels <= level."""
        for cubes_at in self.delta[level:]:
            if any(existing.subsumes(cube) for existing in cubes_at):
                return False
        for cubes_at in self.delta[1:level + 1]:
            cubes_at.difference_update([existing for existing in cubes_at if cube.subsumes(existing)])
        self.delta[level].add(cube)
        for frame in self.solvers[1:level + 1]:
            frame.block(cube)
        self.stats.clauses_learned += 1
        return True

    # queries

    def _check_limits(self):
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise ResourceLimitReached('timeout')

    def reachability_test(self, cube: Cube, level: int):
        """
        Check F_{level-1} and not cube and Tr and cube'.

        Returns:
            Unreachable with the cube literals in the unsat core, or Reachable with the
            predecessor state and inputs
        """
        if level < 1:
            raise ValueError("reachability test needs a frame index >= 1")
        self._check_limits()
        self.stats.reachability_tests += 1
        frame = self.solvers[level - 1]
        act = frame.activation(cube.clause(frame.step.state))
        primed = cube.sat_lits(frame.primes)
        try:
            result = frame.solver.solve([act] + primed)
        finally:
            frame.retire(act)
        if isinstance(result, Unsat):
            in_core = set(result.core)
            return Unreachable(Cube(lit for lit, sat_lit in zip(cube, primed) if sat_lit in in_core))
        return Reachable(tuple(frame.step.state_values(result)), tuple(frame.step.input_values(result)))

    def extract_predecessor(self, reachable: Reachable) -> Cube:
        return Cube.from_values(reachable.state)

    def generalize(self, cube: Cube, level: int, core: Optional[Cube] = None) -> Cube:
        """
        Shrink an unreachable cube: start from its unsat core, keep it apart from the
        initial states, then try dropping each remaining literal once.
        """
        if core is None:
            outcome = self.reachability_test(cube, level)
            if not isinstance(outcome, Unreachable):
                return cube
            core = outcome.core
        current = core
        if current.intersects_init(self.circuit):
            separator = cube.init_separator(self.circuit)
            if separator is None:
                return cube
            current = Cube(tuple(current) + (separator,))
        self.stats.generalize_drops += len(cube) - len(current)

        order = list(current)
        if self.options.seed:
            self._rng.shuffle(order)
        for lit in order:
            if lit not in current or len(current) == 1:
                continue
            candidate = current.without(lit)
            if candidate.intersects_init(self.circuit):
                continue
            outcome = self.reachability_test(candidate, level)
            if isinstance(outcome, Unreachable):
                shrunk = outcome.core
                if not shrunk or shrunk.intersects_init(self.circuit):
                    shrunk = candidate
                self.stats.generalize_drops += len(current) - len(shrunk)
                current = shrunk
        return current

    # blocking

    def block(self, cube: Cube, level: int, bad_inputs=()) -> bool:
        """
        Block a full-state cube at ``level``, recursively blocking its predecessors first.
        On failure the concrete counterexample is stored in ``self.counterexample``.
        """
        if level == 0:
            self.counterexample = Trace(self._free_init(cube), (tuple(bad_inputs),))
            return False
        stack = [(cube, level, tuple(bad_inputs))]
        self._note_obligation(cube)
        while stack:
            self._check_limits()
            current, k, _ = stack[-1]
            outcome = self.reachability_test(current, k)
            if isinstance(outcome, Reachable):
                predecessor = self.extract_predecessor(outcome)
                if k - 1 == 0 or predecessor.intersects_init(self.circuit):
                    inputs = [outcome.inputs] + [entry[2] for entry in reversed(stack)]
                    self.counterexample = Trace(self._free_init(predecessor), tuple(inputs))
                    logger.info(f"Counterexample of {len(inputs)} cycles reaches frame {level}")
                    return False
                stack.append((predecessor, k - 1, outcome.inputs))
                self._note_obligation(predecessor)
                continue
            learned = self.generalize(current, k, outcome.core)
            for blocked in secic3.blocked_cube_set(self, learned, k, obligation=current):
                self.add_blocked(blocked, k)
            if self.mapping is not None and secic3.has_inequality_pattern(learned, self.mapping):
                self.stats.inequality_cube_blocks += 1
            logger.debug(f"Blocked {learned.describe(self.circuit)} at frame {k}")
            stack.pop()
        return True

    def _note_obligation(self, cube: Cube):
        self.stats.block_calls += 1
        self._obligations += 1
        if self.options.max_obligations and self._obligations > self.options.max_obligations:
            raise ResourceLimitReached('obligations')

    def _free_init(self, cube: Cube) -> dict:
        return {index: bool(cube.value_of(index)) for index in self.circuit.undef_latches}

    # propagation

    def propagate(self) -> Optional[int]:
        """
        Push every cube to the next level when it stays unreachable there.

        Returns:
            the level k whose delta became empty (F_k = F_{k+1}), or None
        """
        for level in range(1, self.depth):
            self._check_limits()
            for cube in sorted(self.delta[level]):
                if cube not in self.delta[level]:
                    continue
                group = [cube]
                if self.options.symmetry:
                    mirror = secic3.symmetric_cube(cube, self.mapping)
                    if mirror != cube and mirror in self.delta[level]:
                        group.append(mirror)
                if all(self._inductive_at(member, level) for member in group):
                    for member in group:
                        self.delta[level].discard(member)
                        self.delta[level + 1].add(member)
                        self.solvers[level + 1].block(member)
                        self.stats.propagated_clauses += 1
            if not self.delta[level]:
                return level
        return None

    def _inductive_at(self, cube: Cube, level: int) -> bool:
        frame = self.solvers[level]
        return isinstance(frame.solver.solve(cube.sat_lits(frame.primes)), Unsat)

    # auditing

    def audit(self):
        """
        Check the frame conditions with one SAT query per frame each: Init => F_1,
        F_k and Tr => F_{k+1}', and F_k => P below the top frame.
        """
        for level in range(1, self.depth + 1):
            for cube in self.delta[level]:
                if cube.intersects_init(self.circuit):
                    raise FrameAuditError(f"frame {level} excludes an initial state via {cube.describe(self.circuit)}")
        seen = {}
        for level in range(1, self.depth + 1):
            for cube in self.delta[level]:
                if cube in seen:
                    raise FrameAuditError(f"cube stored at frames {seen[cube]} and {level}")
                seen[cube] = level
        for level in range(0, self.depth):
            frame = self.solvers[level]
            targets = sorted(self.frame_cubes(level + 1))
            if targets:
                selectors = []
                for cube in targets:
                    selector = frame.solver.new_var()
                    for sat_lit in cube.sat_lits(frame.primes):
                        frame.solver.add_clause([-selector, sat_lit])
                    selectors.append(selector)
                act = frame.activation(selectors)
                try:
                    result = frame.solver.solve([act])
                finally:
                    frame.retire(act)
                if not isinstance(result, Unsat):
                    raise FrameAuditError(f"F_{level} and Tr do not imply F_{level + 1}'")
            if not isinstance(frame.solver.solve([frame.step.bad]), Unsat):
                raise FrameAuditError(f"F_{level} intersects the bad states")

    # top level

    def _bad_state(self):
        frame = self.solvers[self.depth]
        result = frame.solver.solve([frame.step.bad])
        if isinstance(result, Unsat):
            return None
        return (Cube.from_values(frame.step.state_values(result)),
                tuple(frame.step.input_values(result)))

    def check(self):
        self._started = time.monotonic()
        if self.options.timeout_s:
            self._deadline = self._started + self.options.timeout_s
        self.counterexample = None
        self._cleared = 0
        logger.info(
            f"IC3 run started: config={self.options.config_name}, "
            f"{self.circuit.num_latches} latches, {len(self.circuit.ands)} ANDs")
        try:
            return self._run()
        except ResourceLimitReached as exc:
            bound = self._cleared
            logger.info(f"Run stopped by {exc.reason} with proof bound {bound}")
            return Unknown(bound, exc.reason, self._finish())
        finally:
            self.close()

    def close(self):
        for frame in self.solvers:
            frame.solver.close()

    def _run(self):
        self.open_frame()
        initial = self._bad_state()
        if initial is not None:
            cube, inputs = initial
            self.counterexample = Trace(self._free_init(cube), (inputs,))
            logger.info("Bad state reachable in the initial cycle")
            return Unsafe(self.counterexample, self._finish())
        self.open_frame()
        if self.options.pred != 'none':
            self._seed_definition_lemmas()
        while True:
            while True:
                self._check_limits()
                found = self._bad_state()
                if found is None:
                    self._cleared = self.depth
                    break
                cube, inputs = found
                if not self.block(cube, self.depth, inputs):
                    return Unsafe(self.counterexample, self._finish())
                if self.options.audit_frames:
                    self.audit()
            if self.options.max_frames and self.depth >= self.options.max_frames:
                raise ResourceLimitReached('frames')
            self.open_frame()
            logger.info(f"Frame {self.depth} opened; frame sizes {self._frame_sizes()}")
            fixpoint = self.propagate()
            if self.options.audit_frames:
                self.audit()
            if fixpoint is not None:
                invariant = tuple(sorted(self.frame_cubes(fixpoint + 1)))
                logger.info(f"Fixpoint at frame {fixpoint}: invariant of {len(invariant)} clauses")
                return Safe(invariant, fixpoint, self._finish())

    def _seed_definition_lemmas(self):
        """
        Block at frame 1 every neq definition cube that misses the initial states and has no
        predecessor at all. Propagation carries them upward, so a bad state found later
        always asserts its neq latch and the replaced cube covers the obligation.
        """
        seeded = 0
        for lemma in secic3.definition_lemmas(self.mapping):
            if lemma.intersects_init(self.circuit) or not self._inductive_at(lemma, 1):
                continue
            if self.add_blocked(lemma, 1):
                seeded += 1
        logger.debug(f"Seeded {seeded} predicate definition lemmas at frame 1")

    def _frame_sizes(self):
        return [len(cubes) for cubes in self.delta[1:]]

    def _finish(self) -> Stats:
        self.stats.frame_sizes = self._frame_sizes()
        self.stats.sat_queries = sum(frame.solver.queries for frame in self.solvers)
        self.stats.wall_time_s = time.monotonic() - self._started
        return self.stats


def check(circuit: Circuit, mapping: Optional[SymmetryMap] = None,
          options: EngineOptions = EngineOptions()):
    """Run IC3 on ``circuit``: Safe with an inductive invariant, Unsafe with a trace, or Unknown."""
    return IC3(circuit, mapping, options).check()
