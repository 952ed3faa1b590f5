"""
Independent validation of engine verdicts: bounded model checking, explicit-state
reachability for tiny circuits, inductive invariant certification, trace replay, and the
certificate and witness file formats.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

from .circuit import Circuit, simulate
from .cubes import Cube
from .exceptions import CertificateFormatError, ExplicitLimitExceeded, WitnessFormatError
from .ic3 import Trace
from .sat import SAT_FALSE, SAT_TRUE, SolverInstance, Step, Unsat, init_clauses, initial_state_lits

logger = logging.getLogger('verifier.engine')


# bounded model checking

def bmc(circuit: Circuit, bound: int, solver_name: str = 'm22') -> Optional[Trace]:
    """
    Shortest counterexample of at most ``bound`` transitions, or None.

    Free-init latches act as extra inputs of cycle 0; constraints hold in every cycle.
    """
    if bound < 0:
        raise ValueError("bound must be non-negative")
    with SolverInstance(name=solver_name, label='bmc') as solver:
        initial = initial_state_lits(solver, circuit)
        state = initial
        steps = []
        for depth in range(bound + 1):
            step = Step(solver, circuit, state)
            step.assert_constraints()
            steps.append(step)
            result = solver.solve([step.bad])
            if not isinstance(result, Unsat):
                init = {index: result.value(initial[index]) for index in circuit.undef_latches}
                trace = Trace(init, tuple(tuple(s.input_values(result)) for s in steps))
                logger.info(f"BMC found a counterexample at depth {depth}")
                return trace
            state = step.next_state
        logger.info(f"BMC found no counterexample up to bound {bound}")
        return None


# explicit-state reachability

@dataclass(frozen=True)
class ExplicitResult:
    states: frozenset
    bad_reachable: bool
    bad_depth: Optional[int]


def explicit_reach(circuit: Circuit, latch_limit: int = 20, solver_name: str = 'm22') -> ExplicitResult:
    """
    Breadth-first enumeration of every reachable latch valuation. Successors are enumerated
    with a SAT solver under the constraints, so input width does not multiply the work.
    """
    if circuit.num_latches > latch_limit:
        raise ExplicitLimitExceeded(
            f"{circuit.num_latches} latches exceed the explicit-state limit of {latch_limit}")
    undef = circuit.undef_latches
    frontier = []
    for values in itertools.product((False, True), repeat=len(undef)):
        free = dict(zip(undef, values))
        frontier.append(tuple(free[index] if latch.init is None else bool(latch.init)
                              for index, latch in enumerate(circuit.latches)))
    seen = set(frontier)
    bad_depth = None
    depth = 0
    with SolverInstance(name=solver_name, label='explicit') as solver:
        step = Step(solver, circuit)
        step.assert_constraints()
        primes = step.primed()
        while frontier:
            successors = []
            for state in frontier:
                assumptions = [lit if value else -lit for lit, value in zip(step.state, state)]
                if bad_depth is None and not isinstance(solver.solve(assumptions + [step.bad]), Unsat):
                    bad_depth = depth
                act = solver.new_var()
                while True:
                    result = solver.solve(assumptions + [act])
                    if isinstance(result, Unsat):
                        break
                    successor = tuple(result.value(var) for var in primes)
                    solver.add_clause([-act] + [-var if value else var for var, value in zip(primes, successor)])
                    if successor not in seen:
                        seen.add(successor)
                        successors.append(successor)
                solver.add_clause([-act])
            frontier = successors
            depth += 1
    logger.debug(f"Explicit reachability: {len(seen)} states, bad depth {bad_depth}")
    return ExplicitResult(frozenset(seen), bad_depth is not None, bad_depth)


# certificates

@dataclass(frozen=True)
class Certificate:
    """Inductive invariant as clauses; a clause is a tuple of state literal codes."""
    clauses: tuple = ()

    @classmethod
    def from_invariant(cls, cubes) -> 'Certificate':
        return cls(tuple(tuple(sorted(lit ^ 1 for lit in cube)) for cube in cubes))

    def blocked_cubes(self):
        return [Cube(lit ^ 1 for lit in clause) for clause in self.clauses]


@dataclass(frozen=True)
class CertifyResult:
    passed: bool
    failed_check: Optional[str] = None
    witness: Optional[dict] = None


def _violation(solver, clauses, variables):
    """Literal true iff some clause is falsified over ``variables``."""
    selectors = []
    for clause in clauses:
        selector = solver.new_var()
        for lit in clause:
            var = variables[lit >> 1]
            solver.add_clause([-selector, var if lit & 1 else -var])
        selectors.append(selector)
    violated = solver.new_var()
    solver.add_clause([-violated] + selectors)
    return violated


def _holds(solver, clauses, variables):
    for clause in clauses:
        solver.add_clause([-variables[lit >> 1] if lit & 1 else variables[lit >> 1] for lit in clause])


def certify(circuit: Circuit, certificate: Certificate, solver_name: str = 'm22') -> CertifyResult:
    """
    Check Init => Inv, Inv and Tr => Inv', and Inv => P, each with one SAT query
    (constraints assumed in the current cycle).
    """
    for clause in certificate.clauses:
        for lit in clause:
            if not 0 <= lit >> 1 < circuit.num_latches:
                raise ValueError(f"certificate references unknown latch {lit >> 1}")

    checks = ('init', 'consecution', 'safety')
    for check_name in checks:
        with SolverInstance(name=solver_name, label=f"certify-{check_name}") as solver:
            step = Step(solver, circuit)
            if check_name == 'init':
                for clause in init_clauses(circuit, step.state):
                    solver.add_clause(clause)
                if not certificate.clauses:
                    continue
                goal = _violation(solver, certificate.clauses, step.state)
            elif check_name == 'consecution':
                if not certificate.clauses:
                    continue
                step.assert_constraints()
                _holds(solver, certificate.clauses, step.state)
                goal = _violation(solver, certificate.clauses, step.primed())
            else:
                step.assert_constraints()
                _holds(solver, certificate.clauses, step.state)
                goal = step.bad
            if goal == SAT_FALSE:
                continue
            result = solver.solve([] if goal == SAT_TRUE else [goal])
            if not isinstance(result, Unsat):
                witness = {'state': step.state_values(result), 'inputs': step.input_values(result)}
                logger.info(f"Certificate fails the {check_name} check")
                return CertifyResult(False, check_name, witness)
    return CertifyResult(True)


# replay

@dataclass(frozen=True)
class ReplayResult:
    bad_at_end: bool
    violated_at: Optional[int]
    cycles: int

    @property
    def ok(self) -> bool:
        return self.bad_at_end and self.violated_at is None


def replay(circuit: Circuit, trace: Trace) -> ReplayResult:
    """Simulate a counterexample; it is confirmed when bad holds in its final cycle."""
    run = simulate(circuit, trace.init, trace.inputs)
    bad_at_end = bool(run.bad) and run.violated_at is None and run.bad[-1]
    return ReplayResult(bool(bad_at_end), run.violated_at, len(run.states))


# file formats

def write_certificate(certificate: Certificate) -> str:
    lines = [f"c inductive invariant, {len(certificate.clauses)} clauses over 1-based latch numbers"]
    for clause in certificate.clauses:
        numbers = [-((lit >> 1) + 1) if lit & 1 else (lit >> 1) + 1 for lit in clause]
        lines.append(' '.join(str(number) for number in numbers + [0]))
    return '\n'.join(lines) + '\n'


def parse_certificate(text, num_latches: int) -> Certificate:
    if isinstance(text, bytes):
        text = text.decode('utf-8')
    clauses = []
    for lineno, raw in enumerate(text.split('\n'), start=1):
        line = raw.strip()
        if not line or line.startswith('c') or line.startswith('p'):
            continue
        try:
            numbers = [int(token) for token in line.split()]
        except ValueError:
            raise CertificateFormatError(f"non-numeric clause: {line!r}", lineno) from None
        if numbers[-1] != 0 or 0 in numbers[:-1]:
            raise CertificateFormatError("each clause must end with a single 0", lineno)
        clause = []
        for number in numbers[:-1]:
            latch = abs(number) - 1
            if latch >= num_latches:
                raise CertificateFormatError(f"latch {abs(number)} exceeds the {num_latches} latches", lineno)
            clause.append(2 * latch + (1 if number < 0 else 0))
        clauses.append(tuple(sorted(set(clause))))
    return Certificate(tuple(clauses))


def write_witness(circuit: Circuit, trace: Trace) -> str:
    init = ''.join(
        str(int(trace.init[index])) if latch.init is None else str(latch.init)
        for index, latch in enumerate(circuit.latches))
    lines = ['1', 'b0', init]
    lines += [''.join(str(int(value)) for value in inputs) for inputs in trace.inputs]
    lines.append('.')
    return '\n'.join(lines) + '\n'


def parse_witness(text, circuit: Circuit) -> Trace:
    if isinstance(text, bytes):
        text = text.decode('utf-8')
    # blank lines stay: a circuit without inputs writes one empty vector per cycle
    lines = [(lineno, line.strip()) for lineno, line in enumerate(text.splitlines(), start=1)
             if not line.strip().startswith('c')]
    while lines and not lines[0][1]:
        lines.pop(0)
    if len(lines) < 3 or lines[0][1] != '1':
        raise WitnessFormatError("witness must start with '1' and a property line", lines[0][0] if lines else 1)
    lineno, init_line = lines[2]
    if len(init_line) != circuit.num_latches or set(init_line) - set('01x'):
        raise WitnessFormatError(f"initial state line must hold {circuit.num_latches} values of 0/1/x", lineno)
    init = {}
    for index, (char, latch) in enumerate(zip(init_line, circuit.latches)):
        if latch.init is None:
            init[index] = char == '1'
        elif char != 'x' and int(char) != latch.init:
            raise WitnessFormatError(f"latch {index} must start at {latch.init}", lineno)
    inputs = []
    for lineno, line in lines[3:]:
        if line == '.':
            break
        if len(line) != circuit.num_inputs or set(line) - set('01x'):
            raise WitnessFormatError(f"input line must hold {circuit.num_inputs} values of 0/1/x", lineno)
        inputs.append(tuple(char == '1' for char in line))
    else:
        raise WitnessFormatError("witness is not terminated by '.'", lines[-1][0])
    return Trace(init, tuple(inputs))
