import pytest

from apps.verifier.engine import (
    CONFIGURATIONS, IC3, Certificate, EngineOptions, Safe, Unknown, Unsafe, certify, check,
    explicit_reach, replay,
)
from apps.verifier.engine.cubes import Cube, Reachable, Unreachable, state_lit
from apps.verifier.engine.exceptions import FrameAuditError
from apps.verifier.engine.secic3 import definition_lemmas

from .conftest import compose

SMALL_INSTANCES = [('mux_reg', 2), ('counter_leak', 2), ('gcd_lockstep', 1), ('shift_add_mult', 1)]


def _instance(family, size, constrained, pred):
    """Circuit and map a configuration runs on: predicate modes need the neq latches."""
    return compose(family, size, constrained, predicates=pred != 'none')


def _assert_validated(circuit, result):
    if isinstance(result, Safe):
        assert certify(circuit, Certificate.from_invariant(result.invariant)).passed
    else:
        assert isinstance(result, Unsafe)
        assert replay(circuit, result.trace).ok


class TestTrivialCircuits:

    def test_constant_false_bad(self, toggle_circuit):
        result = check(toggle_circuit)
        assert isinstance(result, Safe)
        assert result.frames_used == 1
        assert result.invariant == ()

    def test_bad_in_initial_cycle(self, free_input_bad):
        result = check(free_input_bad)
        assert isinstance(result, Unsafe)
        assert result.trace.inputs == ((True,),)
        assert replay(free_input_bad, result.trace).ok

    def test_verdict_names(self, toggle_circuit, free_input_bad):
        assert check(toggle_circuit).verdict == 'safe'
        assert check(free_input_bad).verdict == 'unsafe'


@pytest.mark.parametrize('family, size', SMALL_INSTANCES)
@pytest.mark.parametrize('constrained', [True, False])
def test_configurations_agree_with_explicit_state(family, size, constrained):
    plain, _, expected = compose(family, size, constrained)
    truth = explicit_reach(plain)
    assert truth.bad_reachable == (expected == 'unsafe')
    for name, symmetry, pred in CONFIGURATIONS:
        circuit, mapping, _ = _instance(family, size, constrained, pred)
        result = check(circuit, mapping, EngineOptions(symmetry=symmetry, pred=pred))
        assert result.verdict == expected, name
        _assert_validated(circuit, result)


def test_mux_reg_fixpoint_is_shallow():
    circuit, mapping, _ = compose('mux_reg', 2)
    result = check(circuit, mapping)
    assert isinstance(result, Safe)
    assert result.frames_used <= 5


def test_mux_reg_baseline_blocks_every_bit_inequality():
    circuit, mapping, _ = compose('mux_reg', 4)
    result = check(circuit, mapping)
    assert isinstance(result, Safe)
    assert result.stats.inequality_cube_blocks >= 2 * 4
    assert result.stats.block_calls >= result.stats.inequality_cube_blocks


def test_definition_lemmas_end_in_the_invariant():
    circuit, mapping, _ = compose('mux_reg', 2, predicates=True)
    result = check(circuit, mapping, EngineOptions(pred='aon'))
    assert isinstance(result, Safe)
    for lemma in definition_lemmas(mapping):
        assert any(kept.subsumes(lemma) for kept in result.invariant)
    assert certify(circuit, Certificate.from_invariant(result.invariant)).passed


def test_definition_lemmas_skip_free_registers():
    circuit, mapping, _ = compose('counter_leak', 2, predicates=True)
    engine = IC3(circuit, mapping, EngineOptions(pred='aon'))
    engine.open_frame()
    engine.open_frame()
    try:
        engine._seed_definition_lemmas()
        seeded = {lemma.latches[-1] for lemma in engine.delta[1]}
    finally:
        engine.close()
    assert mapping.neq_latches['cnt'] in seeded
    assert mapping.neq_latches['key'] not in seeded


def test_unsafe_trace_reaches_bad():
    circuit, mapping, _ = compose('mux_reg', 2, constrained=False)
    result = check(circuit, mapping)
    assert isinstance(result, Unsafe)
    assert len(result.trace.inputs) >= 3
    assert replay(circuit, result.trace).ok


def test_free_init_latches_in_trace():
    circuit, mapping, _ = compose('counter_leak', 2, constrained=False)
    result = check(circuit, mapping)
    assert isinstance(result, Unsafe)
    assert set(result.trace.init) == set(circuit.undef_latches)


@pytest.mark.parametrize('name, symmetry, pred', CONFIGURATIONS)
def test_frame_audit_on_mux_reg(name, symmetry, pred):
    circuit, mapping, _ = _instance('mux_reg', 4, True, pred)
    options = EngineOptions(symmetry=symmetry, pred=pred, audit_frames=True, sat_debug=True)
    assert isinstance(check(circuit, mapping, options), Safe)


@pytest.mark.slow
@pytest.mark.parametrize('name, symmetry, pred', CONFIGURATIONS)
def test_frame_audit_on_gcd(name, symmetry, pred):
    circuit, mapping, _ = _instance('gcd_lockstep', 4, True, pred)
    options = EngineOptions(symmetry=symmetry, pred=pred, audit_frames=True)
    result = check(circuit, mapping, options)
    assert isinstance(result, Safe)
    _assert_validated(circuit, result)


class TestLimits:

    def test_frame_limit(self):
        circuit, mapping, _ = compose('mux_reg', 2)
        result = check(circuit, mapping, EngineOptions(max_frames=1))
        assert isinstance(result, Unknown)
        assert result.reason == 'frames'
        # frame 1 was cleared of bad states before the limit stopped the run
        assert result.bound == 1

    def test_obligation_limit(self):
        circuit, mapping, _ = compose('mux_reg', 2, constrained=False)
        result = check(circuit, mapping, EngineOptions(max_obligations=1))
        assert isinstance(result, Unknown)
        assert result.reason == 'obligations'

    def test_timeout(self):
        circuit, mapping, _ = compose('mux_reg', 2)
        result = check(circuit, mapping, EngineOptions(timeout_s=1e-9))
        assert isinstance(result, Unknown)
        assert result.reason == 'timeout'
        assert result.bound == 0
        assert result.stats.wall_time_s >= 0

    def test_conflict_budget(self):
        circuit, mapping, _ = compose('gcd_lockstep', 2)
        result = check(circuit, mapping, EngineOptions(conflict_budget=1))
        assert result.verdict in ('safe', 'unknown')
        if isinstance(result, Unknown):
            assert result.reason == 'conflict budget'


class TestDeterminism:

    @pytest.mark.parametrize('seed', [0, 3])
    def test_same_seed_same_stats(self, seed):
        circuit, mapping, _ = compose('gcd_lockstep', 2)
        options = EngineOptions(symmetry=True, seed=seed)
        first = check(circuit, mapping, options).stats.as_dict()
        second = check(circuit, mapping, options).stats.as_dict()
        first.pop('wall_time_s')
        second.pop('wall_time_s')
        assert first == second

    def test_seed_does_not_change_verdict(self):
        circuit, mapping, _ = compose('counter_leak', 2)
        verdicts = {check(circuit, mapping, EngineOptions(seed=seed)).verdict for seed in range(4)}
        assert verdicts == {'safe'}


class TestOptions:

    def test_unknown_predicate_mode(self):
        with pytest.raises(ValueError):
            EngineOptions(pred='greedy')

    def test_symmetry_needs_map(self):
        circuit, _, _ = compose('mux_reg', 1)
        with pytest.raises(ValueError):
            IC3(circuit, None, EngineOptions(symmetry=True))

    def test_predicates_need_neq_bindings(self):
        circuit, mapping, _ = compose('mux_reg', 1)
        with pytest.raises(ValueError, match='neq'):
            check(circuit, mapping, EngineOptions(pred='aon'))

    @pytest.mark.parametrize('name, symmetry, pred', CONFIGURATIONS)
    def test_config_names(self, name, symmetry, pred):
        assert EngineOptions(symmetry=symmetry, pred=pred).config_name == name


class TestFrames:

    @pytest.fixture
    def engine(self):
        circuit, mapping, _ = compose('mux_reg', 2)
        ic3 = IC3(circuit, mapping)
        ic3.open_frame()
        ic3.open_frame()
        yield ic3
        ic3.close()

    def test_reachability_test(self, engine):
        inequality = Cube([state_lit(1, True), state_lit(4, False)])
        outcome = engine.reachability_test(inequality, 1)
        assert isinstance(outcome, Unreachable)
        assert set(outcome.core) <= set(inequality)
        outcome = engine.reachability_test(Cube([state_lit(1, True)]), 1)
        assert isinstance(outcome, Reachable)
        assert outcome.state == (False,) * engine.circuit.num_latches

    def test_reachability_needs_positive_level(self, engine):
        with pytest.raises(ValueError):
            engine.reachability_test(Cube([state_lit(1, True)]), 0)

    def test_block_at_level_zero_fails(self, engine):
        assert engine.block(Cube.from_values((False,) * 6), 0) is False
        assert engine.counterexample.inputs == ((),)

    def test_subsumption_on_insert(self, engine):
        wide = Cube([state_lit(0, True), state_lit(3, True)])
        narrow = Cube([state_lit(0, True)])
        assert engine.add_blocked(wide, 1)
        assert engine.add_blocked(narrow, 1)
        assert engine.delta[1] == {narrow}
        assert not engine.add_blocked(wide, 1)

    def test_audit_rejects_frame_excluding_init(self, engine):
        engine.add_blocked(Cube([state_lit(0, False)]), 1)
        with pytest.raises(FrameAuditError, match='initial'):
            engine.audit()

    def test_audit_accepts_fresh_trace(self, engine):
        engine.audit()


@pytest.mark.slow
@pytest.mark.parametrize('family', ['mux_reg', 'shift_add_mult', 'gcd_lockstep', 'counter_leak'])
@pytest.mark.parametrize('size', [1, 2, 3, 4])
@pytest.mark.parametrize('constrained', [True, False])
def test_benchmark_verdicts_all_configurations(family, size, constrained):
    plain, _, expected = compose(family, size, constrained)
    if plain.num_latches <= 20:
        assert explicit_reach(plain).bad_reachable == (expected == 'unsafe')
    for name, symmetry, pred in CONFIGURATIONS:
        circuit, mapping, _ = _instance(family, size, constrained, pred)
        result = check(circuit, mapping, EngineOptions(symmetry=symmetry, pred=pred, sat_debug=True))
        assert result.verdict == expected, name
        _assert_validated(circuit, result)


@pytest.mark.slow
@pytest.mark.parametrize('width', [8, 16, 32])
def test_mux_reg_scaling(width):
    circuit, mapping, _ = compose('mux_reg', width)
    baseline = check(circuit, mapping)
    assert isinstance(baseline, Safe)
    assert baseline.stats.inequality_cube_blocks >= 2 * width
    assert baseline.stats.block_calls >= 2 * width
    symmetric = check(circuit, mapping, EngineOptions(symmetry=True))
    assert isinstance(symmetric, Safe)
    assert symmetric.stats.symmetric_cubes_added > 0
    augmented, augmented_map, _ = compose('mux_reg', width, predicates=True)
    for pred in ('aon', 'maximal', 'maximum'):
        result = check(augmented, augmented_map, EngineOptions(pred=pred))
        assert isinstance(result, Safe)
        assert result.stats.predicate_replacements > 0


@pytest.mark.slow
@pytest.mark.parametrize('width', [8, 16, 32])
def test_mux_reg_block_call_reduction(width):
    circuit, mapping, _ = compose('mux_reg', width)
    augmented, augmented_map, _ = compose('mux_reg', width, predicates=True)
    baseline = check(circuit, mapping).stats.block_calls
    symmetric = check(circuit, mapping, EngineOptions(symmetry=True)).stats.block_calls
    assert baseline >= 1.2 * symmetric
    for name, symmetry, pred in CONFIGURATIONS:
        if pred == 'none':
            continue
        result = check(augmented, augmented_map, EngineOptions(symmetry=symmetry, pred=pred))
        assert isinstance(result, Safe), name
        assert baseline >= 2 * result.stats.block_calls, name
