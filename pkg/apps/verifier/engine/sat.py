"""
Incremental SAT on top of python-sat, plus the CNF encoding of circuits.

SAT literals are DIMACS integers. Variable 1 is fixed to true in every instance, so the
AIG constants map to 1 and -1.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

from pysat.formula import CNF
from pysat.solvers import Solver

from .circuit import Circuit, lit_var
from .exceptions import ResourceLimitReached, SolverCheckError

logger = logging.getLogger('verifier.engine')

SAT_TRUE = 1
SAT_FALSE = -1


@dataclass(frozen=True)
class Sat:
    model: frozenset = field(default_factory=frozenset)  # literals true in the model

    def value(self, lit: int) -> bool:
        return lit in self.model


@dataclass(frozen=True)
class Unsat:
    core: tuple = ()


class SolverInstance:
    """
    One incremental solver. Every added clause is also recorded so that debug mode can
    re-check models and cores and DIMACS dumps can reproduce a query.
    """

    def __init__(self, name='m22', debug=False, dimacs_dir=None, label='query', conflict_budget=None):
        self.name = name
        self.debug = debug
        self.dimacs_dir = dimacs_dir
        self.label = label
        self.conflict_budget = conflict_budget
        self.num_vars = 0
        self.queries = 0
        self.inconsistent = False
        self._clauses = []
        self._solver = Solver(name=name)
        self.add_clause([self.new_var()])

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._solver is not None:
            self._solver.delete()
            self._solver = None

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    @property
    def clauses(self):
        return list(self._clauses)

    def add_clause(self, lits: Sequence[int]):
        lits = list(lits)
        for lit in lits:
            if lit == 0 or abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} is not over a declared variable")
        self._clauses.append(lits)
        if not lits:
            if not self.inconsistent:
                logger.debug(f"{self.label}: empty clause added, instance is permanently unsat")
            self.inconsistent = True
            return
        self._solver.add_clause(lits)

    def solve(self, assumptions: Sequence[int] = ()):
        """
        Solve under ``assumptions``.

        Returns:
            Sat with the model, or Unsat whose core is a subset of the assumptions
        """
        assumptions = list(assumptions)
        self.queries += 1
        if self.dimacs_dir:
            self._dump(assumptions)
        if self.inconsistent:
            return Unsat(())
        if self.conflict_budget:
            self._solver.conf_budget(self.conflict_budget)
            outcome = self._solver.solve_limited(assumptions=assumptions)
            if outcome is None:
                raise ResourceLimitReached('conflict budget')
        else:
            outcome = self._solver.solve(assumptions=assumptions)
        if outcome:
            result = Sat(frozenset(self._solver.get_model() or ()))
            if self.debug:
                self._check_model(result, assumptions)
        else:
            result = Unsat(tuple(self._solver.get_core() or ()))
            if self.debug:
                self._check_core(result, assumptions)
        return result

    def _check_model(self, result, assumptions):
        for lit in assumptions:
            if not result.value(lit):
                raise SolverCheckError(f"{self.label}: model violates assumption {lit}")
        for clause in self._clauses:
            if not any(result.value(lit) for lit in clause):
                raise SolverCheckError(f"{self.label}: model violates clause {clause}")

    def _check_core(self, result, assumptions):
        if not set(result.core) <= set(assumptions):
            raise SolverCheckError(f"{self.label}: core {result.core} is not a subset of the assumptions")
        if self._solver.solve(assumptions=list(result.core)):
            raise SolverCheckError(f"{self.label}: core {result.core} is satisfiable")

    def _dump(self, assumptions):
        os.makedirs(self.dimacs_dir, exist_ok=True)
        formula = CNF(from_clauses=self._clauses + [[lit] for lit in assumptions])
        path = os.path.join(self.dimacs_dir, f"{self.label}-{self.queries:06d}.cnf")
        formula.to_file(path, comments=[f"c {self.label} query {self.queries}",
                                         f"c assumptions {' '.join(map(str, assumptions))}"])


class Step:
    """
    SAT encoding of one cycle of a circuit: a literal for every AIG variable, given the
    SAT literals of the current latch values.
    """

    def __init__(self, solver: SolverInstance, circuit: Circuit, state: Optional[Sequence[int]] = None):
        self.circuit = circuit
        self.solver = solver
        self._map = {0: SAT_FALSE}
        self.inputs = []
        for lit in circuit.inputs:
            var = solver.new_var()
            self._map[lit_var(lit)] = var
            self.inputs.append(var)
        if state is None:
            state = [solver.new_var() for _ in circuit.latches]
        self.state = list(state)
        for latch, sat_lit in zip(circuit.latches, self.state):
            self._map[latch.var] = sat_lit
        for gate in circuit.ands:
            self._map[lit_var(gate.lhs)] = self._encode_and(self.lit(gate.rhs0), self.lit(gate.rhs1))

    def _encode_and(self, a, b):
        if a == SAT_FALSE or b == SAT_FALSE or a == -b:
            return SAT_FALSE
        if a == SAT_TRUE or a == b:
            return b
        if b == SAT_TRUE:
            return a
        out = self.solver.new_var()
        self.solver.add_clause([-out, a])
        self.solver.add_clause([-out, b])
        self.solver.add_clause([out, -a, -b])
        return out

    def lit(self, aig_lit: int) -> int:
        sat_lit = self._map[lit_var(aig_lit)]
        return -sat_lit if aig_lit & 1 else sat_lit

    @property
    def bad(self) -> int:
        return self.lit(self.circuit.bad)

    @property
    def constraints(self) -> list:
        return [self.lit(lit) for lit in self.circuit.constraints]

    @property
    def next_state(self) -> list:
        return [self.lit(latch.next) for latch in self.circuit.latches]

    def assert_constraints(self):
        for lit in self.constraints:
            self.solver.add_clause([lit])

    def primed(self) -> list:
        """Fresh variables tied to the next-state functions, one per latch."""
        primes = []
        for next_lit in self.next_state:
            var = self.solver.new_var()
            self.solver.add_clause([-var, next_lit])
            self.solver.add_clause([var, -next_lit])
            primes.append(var)
        return primes

    def input_values(self, model: Sat) -> list:
        return [model.value(var) for var in self.inputs]

    def state_values(self, model: Sat) -> list:
        return [model.value(lit) for lit in self.state]


def initial_state_lits(solver: SolverInstance, circuit: Circuit) -> list:
    """Latch literals for cycle 0: constants for defined inits, fresh variables for free ones."""
    lits = []
    for latch in circuit.latches:
        if latch.init is None:
            lits.append(solver.new_var())
        else:
            lits.append(SAT_TRUE if latch.init else SAT_FALSE)
    return lits


def init_clauses(circuit: Circuit, state: Sequence[int]) -> list:
    """Unit clauses constraining ``state`` to the initial states."""
    return [[lit if latch.init else -lit] for latch, lit in zip(circuit.latches, state)
            if latch.init is not None]
