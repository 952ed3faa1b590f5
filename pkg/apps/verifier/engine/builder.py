"""
Incremental construction of and-inverter graphs.

Gates are appended in creation order, so the result is topologically ordered by
construction. ``and_`` folds constants and hashes structurally; ``raw_and`` always emits a
new gate and is used where gate counts must follow the construction arithmetic exactly.
"""

from .circuit import AndGate, Circuit, FALSE, Latch, TRUE, negate


class AigBuilder:

    def __init__(self):
        self.num_vars = 0
        self.inputs = []
        self.input_names = []
        self.latches = []        # [lit, next, init]
        self.latch_names = []
        self.ands = []
        self.outputs = []
        self.output_names = []
        self.constraints = []
        self.bad = FALSE
        self._strash = {}

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> 'AigBuilder':
        """Start from an existing circuit, keeping every literal unchanged."""
        builder = cls()
        builder.num_vars = circuit.num_vars
        builder.inputs = list(circuit.inputs)
        builder.input_names = list(circuit.input_names)
        builder.latches = [[latch.lit, latch.next, latch.init] for latch in circuit.latches]
        builder.latch_names = list(circuit.latch_names)
        builder.ands = list(circuit.ands)
        builder.outputs = list(circuit.outputs)
        builder.output_names = list(circuit.output_names)
        builder.constraints = list(circuit.constraints)
        builder.bad = circuit.bad
        for gate in circuit.ands:
            builder._strash.setdefault(_key(gate.rhs0, gate.rhs1), gate.lhs)
        return builder

    def _new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def input(self, name=None) -> int:
        lit = 2 * self._new_var()
        self.inputs.append(lit)
        self.input_names.append(name)
        return lit

    def latch(self, name=None, init=0) -> int:
        lit = 2 * self._new_var()
        self.latches.append([lit, FALSE, init])
        self.latch_names.append(name)
        return lit

    def set_next(self, lit: int, next_lit: int):
        for entry in self.latches:
            if entry[0] == lit:
                entry[1] = next_lit
                return
        raise KeyError(f"{lit} is not a latch literal")

    def output(self, lit: int, name=None):
        self.outputs.append(lit)
        self.output_names.append(name)

    def word_input(self, name, width):
        return [self.input(f"{name}[{bit}]") for bit in range(width)]

    def word_latch(self, name, width, init=0):
        """Latches ``name[0..width-1]``; ``init`` is an integer value or None (free)."""
        return [self.latch(f"{name}[{bit}]", None if init is None else (init >> bit) & 1)
                for bit in range(width)]

    def set_next_word(self, word, next_word):
        for lit, next_lit in zip(word, next_word):
            self.set_next(lit, next_lit)

    def word_output(self, name, word):
        for bit, lit in enumerate(word):
            self.output(lit, f"{name}[{bit}]")

    # gates

    def raw_and(self, a: int, b: int) -> int:
        lhs = 2 * self._new_var()
        self.ands.append(AndGate(lhs, a, b))
        return lhs

    def and_(self, a: int, b: int) -> int:
        if a == FALSE or b == FALSE or a == negate(b):
            return FALSE
        if a == TRUE or a == b:
            return b
        if b == TRUE:
            return a
        key = _key(a, b)
        if key not in self._strash:
            self._strash[key] = self.raw_and(*key)
        return self._strash[key]

    def or_(self, a: int, b: int) -> int:
        return negate(self.and_(negate(a), negate(b)))

    def xor(self, a: int, b: int) -> int:
        return self.or_(self.and_(a, negate(b)), self.and_(negate(a), b))

    def xnor(self, a: int, b: int) -> int:
        return negate(self.xor(a, b))

    def mux(self, select: int, then: int, otherwise: int) -> int:
        return self.or_(self.and_(select, then), self.and_(negate(select), otherwise))

    def and_all(self, lits) -> int:
        result = TRUE
        for lit in lits:
            result = self.and_(result, lit)
        return result

    def or_all(self, lits) -> int:
        result = FALSE
        for lit in lits:
            result = self.or_(result, lit)
        return result

    def raw_xor(self, a: int, b: int) -> int:
        """XOR as exactly three fresh AND gates."""
        return negate(self.raw_and(negate(self.raw_and(a, negate(b))),
                                   negate(self.raw_and(negate(a), b))))

    def raw_or_all(self, lits) -> int:
        """OR tree of exactly ``len(lits) - 1`` fresh AND gates."""
        lits = list(lits)
        if not lits:
            return FALSE
        result = lits[0]
        for lit in lits[1:]:
            result = negate(self.raw_and(negate(result), negate(lit)))
        return result

    # words, LSB first

    def const_word(self, value, width):
        return [TRUE if (value >> bit) & 1 else FALSE for bit in range(width)]

    def mux_word(self, select, then, otherwise):
        return [self.mux(select, t, e) for t, e in zip(then, otherwise)]

    def eq_word(self, a, b) -> int:
        return self.and_all(self.xnor(x, y) for x, y in zip(a, b))

    def is_zero(self, word) -> int:
        return self.and_all(negate(lit) for lit in word)

    def is_ones(self, word) -> int:
        return self.and_all(word)

    def add_word(self, a, b):
        carry = FALSE
        total = []
        for x, y in zip(a, b):
            partial = self.xor(x, y)
            total.append(self.xor(partial, carry))
            carry = self.or_(self.and_(x, y), self.and_(partial, carry))
        return total

    def sub_word(self, a, b):
        """``a - b`` modulo 2^w and the borrow out, which is set iff a < b unsigned."""
        borrow = FALSE
        diff = []
        for x, y in zip(a, b):
            partial = self.xor(x, y)
            diff.append(self.xor(partial, borrow))
            borrow = self.or_(self.and_(negate(x), y), self.and_(negate(partial), borrow))
        return diff, borrow

    def increment(self, word):
        carry = TRUE
        result = []
        for lit in word:
            result.append(self.xor(lit, carry))
            carry = self.and_(lit, carry)
        return result

    def decrement(self, word):
        borrow = TRUE
        result = []
        for lit in word:
            result.append(self.xor(lit, borrow))
            borrow = self.and_(negate(lit), borrow)
        return result

    def build(self) -> Circuit:
        circuit = Circuit(
            num_vars=self.num_vars,
            inputs=tuple(self.inputs),
            latches=tuple(Latch(lit, next_lit, init) for lit, next_lit, init in self.latches),
            ands=tuple(self.ands),
            outputs=tuple(self.outputs),
            bad=self.bad,
            constraints=tuple(self.constraints),
            input_names=tuple(self.input_names),
            latch_names=tuple(self.latch_names),
            output_names=tuple(self.output_names),
        )
        circuit.validate()
        return circuit


def _key(a, b):
    return (a, b) if a >= b else (b, a)
