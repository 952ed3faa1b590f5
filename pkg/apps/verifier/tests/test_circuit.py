import random

import pytest

from apps.verifier.engine.builder import AigBuilder
from apps.verifier.engine.circuit import (
    AndGate, Circuit, GroupPair, Latch, Literal, RegisterGroup, SymmetryMap, evaluate,
    literal_value, make_lit, negate, simulate, split_bit_name,
)
from apps.verifier.engine.exceptions import DimensionError, SymmetryMapError
from apps.verifier.engine.benchmarks import generate_benchmark


class TestLiterals:

    def test_constants(self):
        assert Literal.decode(0) == Literal(0, False)
        assert Literal.decode(1) == Literal(0, True)

    def test_encode_decode(self):
        for code in range(40):
            assert Literal.decode(code).encode() == code
        assert make_lit(3, True) == 7
        assert negate(7) == 6

    def test_negative_code_rejected(self):
        with pytest.raises(ValueError):
            Literal.decode(-1)

    def test_split_bit_name(self):
        assert split_bit_name('r[3]') == ('r', 3)
        assert split_bit_name('c1/acc[12]') == ('c1/acc', 12)
        assert split_bit_name('busy') == ('busy', None)
        assert split_bit_name(None) == (None, None)


class TestValidate:

    def test_variable_above_maximum(self):
        with pytest.raises(ValueError, match='exceeds maximum'):
            Circuit(num_vars=1, inputs=(4,)).validate()

    def test_use_before_definition(self):
        with pytest.raises(ValueError, match='before its definition'):
            Circuit(num_vars=2, ands=(AndGate(4, 2, 2),)).validate()

    def test_duplicate_definition(self):
        with pytest.raises(ValueError, match='defined twice'):
            Circuit(num_vars=1, inputs=(2,), latches=(Latch(2, 0),)).validate()

    def test_undefined_bad(self):
        with pytest.raises(ValueError, match='undefined'):
            Circuit(num_vars=2, inputs=(2,), bad=4).validate()

    def test_name_table_length(self):
        with pytest.raises(ValueError):
            Circuit(num_vars=1, inputs=(2,), input_names=('a', 'b'))


class TestSignals:

    def test_signal_bits(self):
        circuit, _, _ = generate_benchmark('mux_reg', 3)
        assert circuit.signal_bits('input', 'sel_in') == [0]
        assert circuit.signal_bits('input', 'data') == [1, 2, 3]
        assert circuit.signal_bits('output', 'out') == [0, 1, 2]
        assert circuit.signal_bits('latch', 'missing') == []

    def test_register_groups(self):
        circuit, _, _ = generate_benchmark('mux_reg', 2)
        assert circuit.register_groups() == [RegisterGroup('r', (1, 2))]

    def test_latch_index_by_name(self):
        circuit, _, _ = generate_benchmark('mux_reg', 2)
        assert circuit.latch_index('r[1]') == 2
        with pytest.raises(KeyError):
            circuit.latch_index('nope')


class TestSymmetryMap:

    def test_valid_map(self):
        mapping = SymmetryMap(latch_pairs=((0, 3), (1, 4), (2, 5)), self_latches=(6,))
        mapping.validate(7)
        assert mapping.permutation(7) == [3, 4, 5, 0, 1, 2, 6]

    @pytest.mark.parametrize('mapping, message', [
        (SymmetryMap(latch_pairs=((0, 0),), self_latches=(1,)), 'itself'),
        (SymmetryMap(latch_pairs=((0, 1),)), 'unclassified'),
        (SymmetryMap(latch_pairs=((0, 1), (1, 2))), 'involution'),
        (SymmetryMap(latch_pairs=((0, 5),), self_latches=(1, 2)), 'unknown latch'),
    ])
    def test_invalid_pairings(self, mapping, message):
        with pytest.raises(SymmetryMapError, match=message):
            mapping.validate(3)

    def test_group_width_mismatch(self):
        pair = GroupPair('r', RegisterGroup('c1/r', (0, 1)), RegisterGroup('c2/r', (2,)))
        mapping = SymmetryMap(latch_pairs=((0, 2), (1, 3)), group_pairs=(pair,))
        with pytest.raises(SymmetryMapError, match='width mismatch'):
            mapping.validate(4)

    def test_group_orientation(self):
        pair = GroupPair('r', RegisterGroup('c1/r', (2,)), RegisterGroup('c2/r', (0,)))
        mapping = SymmetryMap(latch_pairs=((0, 2), (1, 3)), group_pairs=(pair,))
        with pytest.raises(SymmetryMapError, match='not a'):
            mapping.validate(4)

    def test_neq_must_be_self_latch(self):
        pair = GroupPair('r', RegisterGroup('c1/r', (0,)), RegisterGroup('c2/r', (1,)))
        mapping = SymmetryMap(latch_pairs=((0, 1),), group_pairs=(pair,),
                              neq_latches={'r': 0}, self_latches=(2,))
        with pytest.raises(SymmetryMapError, match='self latch'):
            mapping.validate(3)


class TestSimulate:

    def test_toggle(self, toggle_circuit):
        run = simulate(toggle_circuit, {}, [(), (), ()])
        assert run.states == ((False,), (True,), (False,))
        assert run.violated_at is None

    def test_deterministic(self, toggle_circuit):
        assert simulate(toggle_circuit, {}, [()] * 5) == simulate(toggle_circuit, {}, [()] * 5)

    def test_constraint_violation_truncates(self):
        builder = AigBuilder()
        enable = builder.input('en')
        builder.constraints = [enable]
        builder.bad = negate(enable)
        circuit = builder.build()
        run = simulate(circuit, {}, [(True,), (False,), (True,)])
        assert run.violated_at == 1
        assert run.states == ((),)
        assert run.bad == (False,)

    def test_input_dimension(self, toggle_circuit):
        with pytest.raises(DimensionError):
            simulate(toggle_circuit, {}, [(True,)])

    def test_init_must_cover_free_latches(self):
        builder = AigBuilder()
        key = builder.latch('key', init=None)
        builder.set_next(key, key)
        circuit = builder.build()
        with pytest.raises(DimensionError):
            simulate(circuit, {}, [()])
        with pytest.raises(DimensionError):
            simulate(circuit, {0: True, 1: False}, [()])
        assert simulate(circuit, {0: True}, [(), ()]).states == ((True,), (True,))

    def test_evaluate_matches_literals(self):
        builder = AigBuilder()
        a, b = builder.input('a'), builder.input('b')
        gate = builder.raw_and(a, negate(b))
        circuit = builder.build()
        values = evaluate(circuit, (), (True, False))
        assert literal_value(values, gate)
        assert not literal_value(values, negate(gate))
        assert literal_value(values, 1) and not literal_value(values, 0)


def _stimulus_by_name(circuit, rng, fixed=None):
    fixed = fixed or {}
    return tuple(fixed.get(name, rng.random() < 0.5) for name in circuit.input_names)


class TestCompositionSimulation:

    def test_equal_secrets_never_leak(self, composed):
        circuit, _, _ = composed('mux_reg', 2, constrained=False)
        rng = random.Random(3)
        stimulus = []
        for _ in range(10):
            secret = [rng.random() < 0.5, rng.random() < 0.5]
            stimulus.append(_stimulus_by_name(circuit, rng, {
                'c1/secret[0]': secret[0], 'c1/secret[1]': secret[1],
                'c2/secret[0]': secret[0], 'c2/secret[1]': secret[1],
            }))
        run = simulate(circuit, {}, stimulus)
        assert run.bad == (False,) * 10

    @pytest.mark.parametrize('family', ['mux_reg', 'shift_add_mult', 'gcd_lockstep', 'counter_leak'])
    def test_copy_swap_symmetry(self, composed, family):
        circuit, mapping, _ = composed(family, 2, constrained=False)
        names = list(circuit.input_names)
        swap = []
        for name in names:
            if name.startswith('c1/'):
                swap.append(names.index('c2/' + name[3:]))
            elif name.startswith('c2/'):
                swap.append(names.index('c1/' + name[3:]))
            else:
                swap.append(names.index(name))
        permutation = mapping.permutation(circuit.num_latches)
        rng = random.Random(family)
        for _ in range(5):
            init = {index: rng.random() < 0.5 for index in circuit.undef_latches}
            swapped_init = {permutation[index]: value for index, value in init.items()}
            stimulus = [_stimulus_by_name(circuit, rng) for _ in range(8)]
            swapped = [tuple(vector[swap[position]] for position in range(len(vector)))
                       for vector in stimulus]
            run = simulate(circuit, init, stimulus)
            mirror = simulate(circuit, swapped_init, swapped)
            assert run.bad == mirror.bad
            for state, mirrored in zip(run.states, mirror.states):
                assert tuple(state[permutation[index]] for index in range(len(state))) == mirrored

    @pytest.mark.parametrize('family', ['mux_reg', 'gcd_lockstep', 'counter_leak'])
    def test_predicates_do_not_change_bad(self, composed, family):
        plain, _, _ = composed(family, 2, constrained=False)
        augmented, _, _ = composed(family, 2, constrained=False, predicates=True)
        assert augmented.input_names == plain.input_names
        rng = random.Random(11)
        for _ in range(5):
            init = {index: rng.random() < 0.5 for index in plain.undef_latches}
            stimulus = [_stimulus_by_name(plain, rng) for _ in range(8)]
            augmented_init = {index: init[index] for index in plain.undef_latches}
            augmented_init.update({index: False for index in augmented.undef_latches
                                   if index >= plain.num_latches})
            assert simulate(plain, init, stimulus).bad == simulate(augmented, augmented_init, stimulus).bad
