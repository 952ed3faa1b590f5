import itertools
import random

import pytest

from apps.verifier.engine import (
    NISpec, Safe, add_equivalence_predicates, check, explicit_reach, generate_benchmark,
    self_compose,
)
from apps.verifier.engine.benchmarks import FAMILIES
from apps.verifier.engine.builder import AigBuilder
from apps.verifier.engine.circuit import (
    GroupPair, RegisterGroup, SymmetryMap, evaluate, literal_value, negate,
)
from apps.verifier.engine.exceptions import BenchmarkError, SelfCompositionError


def _word_value(values, word):
    return sum(literal_value(values, lit) << bit for bit, lit in enumerate(word))


class TestBuilderWords:

    def test_arithmetic_matches_integers(self):
        width = 3
        builder = AigBuilder()
        a = builder.word_input('a', width)
        b = builder.word_input('b', width)
        select = builder.input('sel')
        total = builder.add_word(a, b)
        diff, borrow = builder.sub_word(a, b)
        inc = builder.increment(a)
        dec = builder.decrement(a)
        equal = builder.eq_word(a, b)
        zero = builder.is_zero(a)
        ones = builder.is_ones(a)
        chosen = builder.mux_word(select, a, b)
        constant = builder.const_word(5, width)
        circuit = builder.build()
        mask = (1 << width) - 1
        for x, y, s in itertools.product(range(8), range(8), (0, 1)):
            inputs = [bool((x >> bit) & 1) for bit in range(width)]
            inputs += [bool((y >> bit) & 1) for bit in range(width)]
            inputs.append(bool(s))
            values = evaluate(circuit, (), inputs)
            assert _word_value(values, total) == (x + y) & mask
            assert _word_value(values, diff) == (x - y) & mask
            assert literal_value(values, borrow) == (x < y)
            assert _word_value(values, inc) == (x + 1) & mask
            assert _word_value(values, dec) == (x - 1) & mask
            assert literal_value(values, equal) == (x == y)
            assert literal_value(values, zero) == (x == 0)
            assert literal_value(values, ones) == (x == mask)
            assert _word_value(values, chosen) == (x if s else y)
            assert _word_value(values, constant) == 5

    def test_and_folds_constants_and_shares_gates(self):
        builder = AigBuilder()
        a, b = builder.input(), builder.input()
        assert builder.and_(a, 0) == 0
        assert builder.and_(a, 1) == a
        assert builder.and_(a, negate(a)) == 0
        first = builder.and_(a, b)
        assert builder.and_(b, a) == first
        assert len(builder.ands) == 1

    def test_raw_gate_counts(self):
        builder = AigBuilder()
        lits = [builder.input() for _ in range(5)]
        builder.raw_xor(lits[0], lits[1])
        assert len(builder.ands) == 3
        builder.raw_or_all(lits)
        assert len(builder.ands) == 7

    def test_set_next_unknown_latch(self):
        builder = AigBuilder()
        with pytest.raises(KeyError):
            builder.set_next(2, 0)


def _random_source(rng):
    builder = AigBuilder()
    inputs = [builder.input(f"i{index}") for index in range(rng.randint(1, 4))]
    latches = [builder.latch(f"q{index}", rng.randint(0, 1)) for index in range(rng.randint(0, 3))]
    pool = inputs + latches
    for _ in range(rng.randint(0, 8)):
        pool.append(builder.raw_and(rng.choice(pool) ^ rng.randint(0, 1),
                                    rng.choice(pool) ^ rng.randint(0, 1)))
    for latch in latches:
        builder.set_next(latch, rng.choice(pool) ^ rng.randint(0, 1))
    for index in range(rng.randint(1, 3)):
        builder.output(rng.choice(pool) ^ rng.randint(0, 1), f"o{index}")
    circuit = builder.build()
    names = [f"i{index}" for index in range(len(inputs))]
    secret = tuple(name for name in names if rng.random() < 0.5)
    public = tuple(name for name in names if name not in secret)
    sinks = tuple((f"o{index}", 1) for index in range(len(circuit.outputs)) if index == 0 or rng.random() < 0.5)
    return circuit, NISpec(secret_inputs=secret, public_inputs=public, sink_outputs=sinks)


class TestSelfCompose:

    def test_construction_counts(self):
        rng = random.Random(5)
        for _ in range(20):
            source, spec = _random_source(rng)
            composed, mapping = self_compose(source, spec)
            sink_bits = len(spec.sink_outputs)
            assert composed.num_inputs == len(spec.public_inputs) + 2 * len(spec.secret_inputs)
            assert composed.num_latches == 2 * source.num_latches
            assert len(composed.ands) == 2 * len(source.ands) + 4 * sink_bits - 1
            assert mapping.latch_pairs == tuple((index, index + source.num_latches)
                                                for index in range(source.num_latches))

    def test_mux_reg_pairs(self):
        source, spec, _ = generate_benchmark('mux_reg', 3)
        composed, mapping = self_compose(source, spec)
        names = composed.latch_names
        assert names[:4] == ('c1/s', 'c1/r[0]', 'c1/r[1]', 'c1/r[2]')
        assert names[4:] == ('c2/s', 'c2/r[0]', 'c2/r[1]', 'c2/r[2]')
        assert mapping.partner[0] == 4 and mapping.partner[3] == 7
        (pair,) = mapping.group_pairs
        assert pair.name == 'r'
        assert pair.first.bits == (1, 2, 3) and pair.second.bits == (5, 6, 7)
        assert len(composed.constraints) == 1

    def test_public_inputs_are_shared(self):
        source, spec, _ = generate_benchmark('mux_reg', 2)
        composed, _ = self_compose(source, spec)
        assert composed.input_names == (
            'sel_in', 'data[0]', 'data[1]',
            'c1/secret[0]', 'c1/secret[1]', 'c2/secret[0]', 'c2/secret[1]')

    def test_secret_init_latches_become_free(self):
        source, spec, _ = generate_benchmark('counter_leak', 2)
        composed, _ = self_compose(source, spec)
        free = [composed.latch_names[index] for index in composed.undef_latches]
        assert free == ['c1/key[0]', 'c1/key[1]', 'c2/key[0]', 'c2/key[1]']

    def test_no_secret_inputs_is_safe(self):
        builder = AigBuilder()
        data = builder.input('d')
        held = builder.latch('q')
        builder.set_next(held, data)
        builder.output(held, 'q_out')
        source = builder.build()
        composed, mapping = self_compose(
            source, NISpec(public_inputs=('d',), sink_outputs=(('q_out', 1),)))
        assert isinstance(check(composed, mapping), Safe)

    @pytest.mark.parametrize('spec, message', [
        (NISpec(secret_inputs=('nope',), sink_outputs=(('out', 2),)), 'not found'),
        (NISpec(secret_inputs=('secret',), sink_outputs=(('out', 3),)), 'width'),
        (NISpec(secret_inputs=('secret',), sink_outputs=(('missing', 1),)), 'sink'),
        (NISpec(secret_inputs=('secret',), public_inputs=('secret',), sink_outputs=(('out', 2),)), 'both'),
        (NISpec(secret_inputs=('secret',), sink_outputs=(('out', 2),), assumptions=('sel_in',)), 'single-bit'),
        (NISpec(secret_inputs=('secret',), sink_outputs=(('out', 2),), secret_init_latches=('zz',)), 'latch'),
    ])
    def test_spec_errors(self, spec, message):
        source, _, _ = generate_benchmark('mux_reg', 2)
        with pytest.raises(SelfCompositionError, match=message):
            self_compose(source, spec)

    def test_source_with_bad_rejected(self, free_input_bad):
        with pytest.raises(SelfCompositionError, match='bad'):
            self_compose(free_input_bad, NISpec())

    def test_undeclared_free_latch_rejected(self):
        source, spec, _ = generate_benchmark('counter_leak', 2)
        with pytest.raises(SelfCompositionError, match='free initial value'):
            self_compose(source, NISpec(public_inputs=spec.public_inputs, sink_outputs=spec.sink_outputs))


def _paired_registers(inits_first, inits_second):
    """Two one-word registers with the given per-bit init values, paired as one group."""
    builder = AigBuilder()
    first = [builder.latch(f"c1/r[{bit}]", init) for bit, init in enumerate(inits_first)]
    second = [builder.latch(f"c2/r[{bit}]", init) for bit, init in enumerate(inits_second)]
    data = builder.input('d')
    for lit in first + second:
        builder.set_next(lit, data)
    circuit = builder.build()
    width = len(first)
    pair = GroupPair('r', RegisterGroup('c1/r', tuple(range(width))),
                     RegisterGroup('c2/r', tuple(range(width, 2 * width))))
    mapping = SymmetryMap(latch_pairs=tuple((bit, bit + width) for bit in range(width)), group_pairs=(pair,))
    return circuit, mapping


class TestEquivalencePredicates:

    @pytest.mark.parametrize('width', [1, 2, 5])
    def test_gate_counts(self, composed, width):
        plain, mapping, _ = composed('mux_reg', width)
        augmented, augmented_map = add_equivalence_predicates(plain, mapping)
        assert augmented.num_latches == plain.num_latches + 1
        assert len(augmented.ands) == len(plain.ands) + 4 * width - 1
        neq = augmented_map.neq_latches['r']
        assert augmented_map.self_latches == (neq,)
        assert augmented.latch_names[neq] == 'neq/r'

    @pytest.mark.parametrize('first, second, expected', [
        ((0, 0), (0, 0), 0),
        ((1, 0), (1, 0), 0),
        ((1, 0), (0, 0), 1),
        ((0, None), (0, 0), None),
    ])
    def test_initial_value_rule(self, first, second, expected):
        circuit, mapping = _paired_registers(first, second)
        augmented, augmented_map = add_equivalence_predicates(circuit, mapping)
        assert augmented.latches[augmented_map.neq_latches['r']].init == expected

    def test_group_selection(self, composed):
        plain, mapping, _ = composed('gcd_lockstep', 2)
        augmented, augmented_map = add_equivalence_predicates(plain, mapping, groups=['cnt'])
        assert set(augmented_map.neq_latches) == {'cnt'}
        assert augmented.num_latches == plain.num_latches + 1
        with pytest.raises(SelfCompositionError, match='unknown'):
            add_equivalence_predicates(plain, mapping, groups=['nope'])

    def test_augmenting_twice_rejected(self, composed):
        augmented, augmented_map, _ = composed('mux_reg', 2, predicates=True)
        with pytest.raises(SelfCompositionError, match='already'):
            add_equivalence_predicates(augmented, augmented_map)

    def test_no_groups_returns_input(self):
        builder = AigBuilder()
        a = builder.latch('a')
        b = builder.latch('b')
        builder.set_next(a, a)
        builder.set_next(b, b)
        circuit = builder.build()
        mapping = SymmetryMap(latch_pairs=((0, 1),))
        assert add_equivalence_predicates(circuit, mapping) == (circuit, mapping)

    def test_predicate_tracks_register_inequality(self, composed):
        augmented, mapping, _ = composed('mux_reg', 2, constrained=False, predicates=True)
        pair = mapping.group_pair_by_name['r']
        neq = mapping.neq_latches['r']
        reach = explicit_reach(augmented)
        assert len(reach.states) > 1
        for state in reach.states:
            differs = any(state[a] != state[b] for a, b in zip(pair.first.bits, pair.second.bits))
            assert state[neq] == differs


class TestBenchmarks:

    @pytest.mark.parametrize('family', sorted(FAMILIES))
    @pytest.mark.parametrize('constrained, expected', [(True, 'safe'), (False, 'unsafe')])
    def test_expected_verdicts(self, family, constrained, expected):
        source, spec, verdict = generate_benchmark(family, 2, constrained)
        assert verdict == expected
        assert bool(spec.assumptions) == constrained
        source.validate()

    def test_deterministic(self):
        assert generate_benchmark('gcd_lockstep', 3) == generate_benchmark('gcd_lockstep', 3)

    @pytest.mark.parametrize('family, size', [('nope', 2), ('mux_reg', 0), ('mux_reg', True), ('mux_reg', 2.0)])
    def test_invalid_requests(self, family, size):
        with pytest.raises(BenchmarkError):
            generate_benchmark(family, size)
