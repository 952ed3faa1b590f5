"""
AIGER 1.9 ASCII ("aag") reader and writer.

Only the single-property subset is supported: at most one bad literal, any number of
invariant constraints, no justice or fairness sections.
"""

import logging

from .circuit import AndGate, Circuit, FALSE, Latch, lit_var
from .exceptions import AigerFormatError

logger = logging.getLogger('verifier.circuit')


class _LineReader:
    def __init__(self, text):
        self.lines = text.split('\n')
        self.position = 0

    @property
    def lineno(self):
        return self.position

    def next_line(self, what):
        while self.position < len(self.lines):
            line = self.lines[self.position].strip()
            self.position += 1
            if line:
                return line
        raise AigerFormatError(f"unexpected end of file while reading {what}", self.position)

    def remaining(self):
        while self.position < len(self.lines):
            line = self.lines[self.position].rstrip('\r')
            self.position += 1
            yield self.position, line


def _ints(line, count_range, what, lineno):
    try:
        values = [int(token) for token in line.split()]
    except ValueError:
        raise AigerFormatError(f"non-numeric {what}: {line!r}", lineno) from None
    low, high = count_range
    if not low <= len(values) <= high:
        raise AigerFormatError(f"{what} expects {low}..{high} numbers, got {len(values)}", lineno)
    if any(value < 0 for value in values):
        raise AigerFormatError(f"negative literal in {what}", lineno)
    return values


def parse_aiger(text) -> Circuit:
    """Parse an ASCII AIGER file into a Circuit with topologically ordered ANDs."""
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError:
            raise AigerFormatError("file is not ASCII AIGER (binary 'aig' is not supported)", 1) from None
    reader = _LineReader(text)
    header = reader.next_line('header').split()
    if not header or header[0] != 'aag':
        raise AigerFormatError("header must start with 'aag'", reader.lineno)
    try:
        counts = [int(token) for token in header[1:]]
    except ValueError:
        raise AigerFormatError("header counts must be integers", reader.lineno) from None
    if not 5 <= len(counts) <= 9 or any(count < 0 for count in counts):
        raise AigerFormatError("header must be 'aag M I L O A [B C J F]'", reader.lineno)
    counts += [0] * (9 - len(counts))
    max_var, num_inputs, num_latches, num_outputs, num_ands, num_bad, num_constraints, num_justice, num_fairness = counts
    if num_justice or num_fairness:
        raise AigerFormatError("justice and fairness sections are not supported", 1)
    if num_bad > 1:
        raise AigerFormatError(f"only a single bad property is supported, got {num_bad}", 1)
    max_lit = 2 * max_var + 1
    definitions = {}

    def check_lit(lit, lineno):
        if lit > max_lit:
            raise AigerFormatError(f"literal {lit} exceeds maximum variable index {max_var}", lineno)
        return lit

    def define(lit, lineno):
        check_lit(lit, lineno)
        if lit < 2 or lit & 1:
            raise AigerFormatError(f"defined literal {lit} must be even and non-constant", lineno)
        var = lit_var(lit)
        if var in definitions:
            raise AigerFormatError(
                f"variable {var} already defined on line {definitions[var]}", lineno)
        definitions[var] = lineno

    inputs = []
    for _ in range(num_inputs):
        (lit,) = _ints(reader.next_line('inputs'), (1, 1), 'input', reader.position)
        define(lit, reader.lineno)
        inputs.append(lit)

    latches = []
    latch_lines = []
    for _ in range(num_latches):
        values = _ints(reader.next_line('latches'), (2, 3), 'latch', reader.position)
        lineno = reader.lineno
        lit, next_lit = values[0], check_lit(values[1], lineno)
        define(lit, lineno)
        reset = values[2] if len(values) == 3 else 0
        if reset in (0, 1):
            init = reset
        elif reset == lit:
            init = None
        else:
            raise AigerFormatError(f"latch reset must be 0, 1 or the latch literal, got {reset}", lineno)
        latches.append(Latch(lit, next_lit, init))
        latch_lines.append(lineno)

    def read_lits(count, what):
        lits = []
        for _ in range(count):
            (lit,) = _ints(reader.next_line(what), (1, 1), what, reader.position)
            lits.append((check_lit(lit, reader.lineno), reader.lineno))
        return lits

    outputs = read_lits(num_outputs, 'output')
    bad = read_lits(num_bad, 'bad')
    constraints = read_lits(num_constraints, 'constraint')

    ands = []
    and_lines = {}
    for _ in range(num_ands):
        lhs, rhs0, rhs1 = _ints(reader.next_line('ands'), (3, 3), 'and', reader.position)
        lineno = reader.lineno
        define(lhs, lineno)
        check_lit(rhs0, lineno)
        check_lit(rhs1, lineno)
        ands.append(AndGate(lhs, rhs0, rhs1))
        and_lines[lit_var(lhs)] = lineno

    def check_defined(lit, lineno):
        if lit_var(lit) and lit_var(lit) not in definitions:
            raise AigerFormatError(f"literal {lit} references undefined variable {lit_var(lit)}", lineno)

    for latch, lineno in zip(latches, latch_lines):
        check_defined(latch.next, lineno)
    for gate in ands:
        check_defined(gate.rhs0, and_lines[lit_var(gate.lhs)])
        check_defined(gate.rhs1, and_lines[lit_var(gate.lhs)])
    for lit, lineno in outputs + bad + constraints:
        check_defined(lit, lineno)

    ordered = _topological_ands(ands, and_lines)

    names = {'i': [None] * num_inputs, 'l': [None] * num_latches, 'o': [None] * num_outputs}
    for lineno, line in reader.remaining():
        if not line.strip():
            continue
        if line.strip() == 'c':
            break
        kind = line[0]
        if kind in 'bcjf':
            continue
        if kind not in names:
            raise AigerFormatError(f"unexpected line in symbol table: {line!r}", lineno)
        position, _, name = line[1:].partition(' ')
        try:
            position = int(position)
            if position < 0:
                raise IndexError(position)
            names[kind][position] = name
        except (ValueError, IndexError):
            raise AigerFormatError(f"invalid symbol entry: {line!r}", lineno) from None

    circuit = Circuit(
        num_vars=max_var,
        inputs=tuple(inputs),
        latches=tuple(latches),
        ands=tuple(ordered),
        outputs=tuple(lit for lit, _ in outputs),
        bad=bad[0][0] if bad else FALSE,
        constraints=tuple(lit for lit, _ in constraints),
        input_names=tuple(names['i']),
        latch_names=tuple(names['l']),
        output_names=tuple(names['o']),
    )
    logger.debug(
        f"Parsed AIGER: M={max_var} I={num_inputs} L={num_latches} A={num_ands} "
        f"B={num_bad} C={num_constraints}")
    return circuit


def _topological_ands(ands, and_lines):
    """Order ANDs so every gate follows its fan-in, keeping file order where possible."""
    by_var = {lit_var(gate.lhs): gate for gate in ands}
    done, active = set(), set()
    ordered = []
    for root in ands:
        stack = [(lit_var(root.lhs), False)]
        while stack:
            var, expanded = stack.pop()
            if var in done:
                continue
            if expanded:
                active.discard(var)
                done.add(var)
                ordered.append(by_var[var])
                continue
            if var in active:
                raise AigerFormatError(f"cyclic AND definition through variable {var}", and_lines[var])
            active.add(var)
            stack.append((var, True))
            gate = by_var[var]
            for rhs in (gate.rhs1, gate.rhs0):
                child = lit_var(rhs)
                if child in by_var and child not in done:
                    if child in active:
                        raise AigerFormatError(
                            f"cyclic AND definition through variable {child}", and_lines[child])
                    stack.append((child, False))
    return ordered


def write_aiger(circuit: Circuit) -> bytes:
    """Serialize a Circuit as canonical AIGER 1.9 ASCII."""
    header = [circuit.num_vars, circuit.num_inputs, circuit.num_latches,
              len(circuit.outputs), len(circuit.ands)]
    if circuit.bad != FALSE or circuit.constraints:
        header += [1 if circuit.bad != FALSE else 0, len(circuit.constraints)]
    lines = ['aag ' + ' '.join(str(count) for count in header)]
    lines += [str(lit) for lit in circuit.inputs]
    for latch in circuit.latches:
        if latch.init == 0:
            lines.append(f"{latch.lit} {latch.next}")
        elif latch.init == 1:
            lines.append(f"{latch.lit} {latch.next} 1")
        else:
            lines.append(f"{latch.lit} {latch.next} {latch.lit}")
    lines += [str(lit) for lit in circuit.outputs]
    if circuit.bad != FALSE:
        lines.append(str(circuit.bad))
    lines += [str(lit) for lit in circuit.constraints]
    lines += [f"{gate.lhs} {gate.rhs0} {gate.rhs1}" for gate in circuit.ands]
    for prefix, names in (('i', circuit.input_names), ('l', circuit.latch_names),
                          ('o', circuit.output_names)):
        lines += [f"{prefix}{index} {name}" for index, name in enumerate(names) if name is not None]
    return ('\n'.join(lines) + '\n').encode('utf-8')
