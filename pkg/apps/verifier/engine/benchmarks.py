"""
Parametric benchmark designs for non-interference checking.

Every family is a small constant-time design whose timing (the ``out_valid`` sink, or the
registered result for mux_reg) leaks a secret when a public mode input is left free, and is
non-interfering under an input assumption that pins that mode.
"""

import logging
from dataclasses import replace

from .builder import AigBuilder
from .circuit import FALSE, negate
from .exceptions import BenchmarkError
from .ic3 import SAFE, UNSAFE
from .selfcomp import NISpec

logger = logging.getLogger('verifier.circuit')


def mux_reg(width):
    """
    Selector ``s`` registers the public input ``sel_in``; the result register ``r`` loads
    the secret when ``s`` is set and public data otherwise. Assuming ``sel_in = 0`` keeps
    ``s = 0`` forever.
    """
    builder = AigBuilder()
    sel_in = builder.input('sel_in')
    data = builder.word_input('data', width)
    secret = builder.word_input('secret', width)
    select = builder.latch('s')
    result = builder.word_latch('r', width)
    builder.set_next(select, sel_in)
    builder.set_next_word(result, builder.mux_word(select, secret, data))
    builder.word_output('out', result)
    builder.output(negate(sel_in), 'no_sel')
    spec = NISpec(
        secret_inputs=('secret',),
        public_inputs=('sel_in', 'data'),
        sink_outputs=(('out', width),),
    )
    return builder.build(), spec, 'no_sel'


def shift_add_mult(width):
    """
    Shift-and-add multiplier with a ``fast`` mode that finishes early once the remaining
    multiplier bits are zero, and skips the computation entirely for a zero multiplier.
    """
    builder = AigBuilder()
    start = builder.input('start')
    fast = builder.input('fast')
    operand_a = builder.word_input('a', width)
    operand_b = builder.word_input('b', width)
    busy = builder.latch('busy')
    valid = builder.latch('valid')
    acc = builder.word_latch('acc', width)
    mcand = builder.word_latch('mcand', width)
    mplier = builder.word_latch('mplier', width)
    count_width = width.bit_length()
    count = builder.word_latch('count', count_width)

    load = builder.and_(start, negate(busy))
    skip = builder.and_(fast, builder.is_zero(operand_b))
    early = builder.and_(fast, builder.is_zero(mplier))
    last = builder.eq_word(count, builder.const_word(1, count_width))
    finish = builder.and_(busy, builder.or_(last, early))
    running = builder.and_(busy, negate(finish))

    step_acc = builder.mux_word(mplier[0], builder.add_word(acc, mcand), acc)
    shifted_mcand = [FALSE] + mcand[:-1]
    shifted_mplier = mplier[1:] + [FALSE]

    builder.set_next(busy, builder.or_(builder.and_(load, negate(skip)), running))
    builder.set_next(valid, builder.or_(finish, builder.and_(load, skip)))
    builder.set_next_word(acc, builder.mux_word(
        load, builder.const_word(0, width), builder.mux_word(busy, step_acc, acc)))
    builder.set_next_word(mcand, builder.mux_word(
        load, operand_a, builder.mux_word(busy, shifted_mcand, mcand)))
    builder.set_next_word(mplier, builder.mux_word(
        load, operand_b, builder.mux_word(busy, shifted_mplier, mplier)))
    builder.set_next_word(count, builder.mux_word(
        load, builder.const_word(width, count_width),
        builder.mux_word(busy, builder.decrement(count), count)))

    builder.output(valid, 'out_valid')
    builder.word_output('product', acc)
    builder.output(negate(fast), 'no_fast')
    spec = NISpec(
        secret_inputs=('a', 'b'),
        public_inputs=('start', 'fast'),
        sink_outputs=(('out_valid', 1),),
    )
    return builder.build(), spec, 'no_fast'


def gcd_lockstep(width):
    """
    Subtractive GCD. In constant-time mode (``ct`` set) the result is announced only after
    the step counter saturates; otherwise as soon as both operands are equal.
    """
    builder = AigBuilder()
    start = builder.input('start')
    constant_time = builder.input('ct')
    operand_x = builder.word_input('x', width)
    operand_y = builder.word_input('y', width)
    reg_a = builder.word_latch('a', width)
    reg_b = builder.word_latch('b', width)
    busy = builder.latch('busy')
    counter = builder.word_latch('cnt', width)

    load = builder.and_(start, negate(busy))
    a_minus_b, a_below_b = builder.sub_word(reg_a, reg_b)
    b_minus_a, b_below_a = builder.sub_word(reg_b, reg_a)
    done = builder.mux(constant_time, builder.is_ones(counter), builder.eq_word(reg_a, reg_b))
    out_valid = builder.and_(busy, done)
    step = builder.and_(busy, negate(done))

    builder.set_next_word(reg_a, builder.mux_word(
        load, operand_x, builder.mux_word(builder.and_(step, b_below_a), a_minus_b, reg_a)))
    builder.set_next_word(reg_b, builder.mux_word(
        load, operand_y, builder.mux_word(builder.and_(step, a_below_b), b_minus_a, reg_b)))
    builder.set_next_word(counter, builder.mux_word(
        load, builder.const_word(0, width),
        builder.mux_word(step, builder.increment(counter), counter)))
    builder.set_next(busy, builder.or_(load, step))

    builder.output(out_valid, 'out_valid')
    builder.word_output('gcd', reg_a)
    builder.output(constant_time, 'ct_mode')
    spec = NISpec(
        secret_inputs=('x', 'y'),
        public_inputs=('start', 'ct'),
        sink_outputs=(('out_valid', 1),),
    )
    return builder.build(), spec, 'ct_mode'


def counter_leak(width):
    """
    Down-counter that may be loaded from a secret-initialized key register; otherwise it
    always counts down from all ones.
    """
    builder = AigBuilder()
    start = builder.input('start')
    use_key = builder.input('use_key')
    key = builder.word_latch('key', width, init=None)
    counter = builder.word_latch('cnt', width)
    busy = builder.latch('busy')

    load = builder.and_(start, negate(busy))
    zero = builder.is_zero(counter)
    counting = builder.and_(busy, negate(zero))
    preset = builder.mux_word(use_key, key, builder.const_word((1 << width) - 1, width))

    builder.set_next_word(key, key)
    builder.set_next_word(counter, builder.mux_word(
        load, preset, builder.mux_word(counting, builder.decrement(counter), counter)))
    builder.set_next(busy, builder.or_(load, counting))

    builder.output(builder.and_(busy, zero), 'out_valid')
    builder.output(negate(use_key), 'no_key')
    spec = NISpec(
        public_inputs=('start', 'use_key'),
        sink_outputs=(('out_valid', 1),),
        secret_init_latches=('key',),
    )
    return builder.build(), spec, 'no_key'


FAMILIES = {
    'mux_reg': mux_reg,
    'shift_add_mult': shift_add_mult,
    'gcd_lockstep': gcd_lockstep,
    'counter_leak': counter_leak,
}


def generate_benchmark(family: str, size: int, constrained: bool = True):
    """
    Build one benchmark instance.

    Args:
        family: one of FAMILIES
        size: data width, at least 1
        constrained: add the input assumption that makes the design non-interfering

    Returns:
        tuple: (source Circuit, NISpec, expected verdict 'safe' or 'unsafe')
    """
    if family not in FAMILIES:
        raise BenchmarkError(f"unknown benchmark family {family!r}; choose from {sorted(FAMILIES)}")
    if isinstance(size, bool) or not isinstance(size, int) or size < 1:
        raise BenchmarkError(f"benchmark size must be a positive integer, got {size!r}")
    circuit, spec, assumption = FAMILIES[family](size)
    if constrained:
        spec = replace(spec, assumptions=(assumption,))
    expected = SAFE if constrained else UNSAFE
    logger.debug(f"Generated {family}({size}) constrained={constrained}: expected {expected}")
    return circuit, spec, expected
