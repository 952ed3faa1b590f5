"""
Self-composition of a circuit for non-interference checking, and the equivalence
predicates that summarize word-level register inequality.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

from .builder import AigBuilder
from .circuit import Circuit, FALSE, GroupPair, RegisterGroup, SymmetryMap, lit_var
from .exceptions import SelfCompositionError

logger = logging.getLogger('verifier.circuit')

COPY_PREFIXES = ('c1/', 'c2/')
NEQ_PREFIX = 'neq/'


@dataclass(frozen=True)
class NISpec:
    """
    Non-interference declaration over the signal names of a source circuit.

    Inputs not listed in ``secret_inputs`` are shared between the copies. ``sink_outputs``
    holds (name, width) entries; ``assumptions`` names 1-bit outputs that must hold in
    every cycle of both copies.
    """
    secret_inputs: tuple = ()
    public_inputs: tuple = ()
    sink_outputs: tuple = ()
    secret_init_latches: tuple = ()
    assumptions: tuple = ()

    def validate(self, circuit: Circuit):
        groups = {
            'secret_inputs': set(self.secret_inputs),
            'public_inputs': set(self.public_inputs),
            'sink_outputs': {name for name, _ in self.sink_outputs},
            'secret_init_latches': set(self.secret_init_latches),
            'assumptions': set(self.assumptions),
        }
        seen = {}
        for role, names in groups.items():
            for name in names:
                if name in seen:
                    raise SelfCompositionError(f"signal {name!r} named in both {seen[name]} and {role}")
                seen[name] = role
        for name in self.secret_inputs + self.public_inputs:
            if not circuit.signal_bits('input', name):
                raise SelfCompositionError(f"input {name!r} not found in source circuit")
        for name in self.secret_init_latches:
            if not circuit.signal_bits('latch', name):
                raise SelfCompositionError(f"latch {name!r} not found in source circuit")
        for name, width in self.sink_outputs:
            bits = circuit.signal_bits('output', name)
            if not bits:
                raise SelfCompositionError(f"sink {name!r} not found in source circuit")
            if len(bits) != width:
                raise SelfCompositionError(
                    f"sink {name!r} declares width {width} but only {len(bits)} bits are driven")
        for name in self.assumptions:
            if len(circuit.signal_bits('output', name)) != 1:
                raise SelfCompositionError(f"assumption {name!r} must name a single-bit output")


def _map_lit(mapping, lit):
    return mapping[lit_var(lit)] ^ (lit & 1)


def _signal_name(names, index, fallback):
    name = names[index]
    return name if name is not None else f"{fallback}{index}"


def self_compose(circuit: Circuit, spec: NISpec):
    """
    Build two structural copies of ``circuit`` that share the public inputs, with
    bad = OR over sink bits of (sink copy 1 XOR sink copy 2).

    Returns:
        tuple: (composed Circuit, SymmetryMap pairing copy-1 latch i with copy-2 latch L+i)
    """
    if circuit.bad != FALSE:
        raise SelfCompositionError("source circuit must not carry its own bad output")
    spec.validate(circuit)

    secret_inputs = {index for name in spec.secret_inputs
                     for index in circuit.signal_bits('input', name)}
    secret_latches = {index for name in spec.secret_init_latches
                      for index in circuit.signal_bits('latch', name)}
    for index, latch in enumerate(circuit.latches):
        if latch.init is None and index not in secret_latches:
            raise SelfCompositionError(
                f"latch {_signal_name(circuit.latch_names, index, 'l')} has a free initial value "
                "but is not declared secret")

    builder = AigBuilder()
    copies = ({0: 0}, {0: 0})

    for index, lit in enumerate(circuit.inputs):
        name = _signal_name(circuit.input_names, index, 'i')
        if index in secret_inputs:
            copies[0][lit_var(lit)] = builder.input(COPY_PREFIXES[0] + name)
        else:
            shared = builder.input(name)
            copies[0][lit_var(lit)] = shared
            copies[1][lit_var(lit)] = shared
    for index, lit in enumerate(circuit.inputs):
        if index in secret_inputs:
            name = _signal_name(circuit.input_names, index, 'i')
            copies[1][lit_var(lit)] = builder.input(COPY_PREFIXES[1] + name)

    for mapping, prefix in zip(copies, COPY_PREFIXES):
        for index, latch in enumerate(circuit.latches):
            init = None if index in secret_latches else latch.init
            name = _signal_name(circuit.latch_names, index, 'l')
            mapping[latch.var] = builder.latch(prefix + name, init)

    for mapping in copies:
        for gate in circuit.ands:
            mapping[lit_var(gate.lhs)] = builder.raw_and(
                _map_lit(mapping, gate.rhs0), _map_lit(mapping, gate.rhs1))

    for mapping in copies:
        for latch in circuit.latches:
            builder.set_next(mapping[latch.var], _map_lit(mapping, latch.next))

    differences = []
    for name, _ in spec.sink_outputs:
        for index in circuit.signal_bits('output', name):
            lit = circuit.outputs[index]
            differences.append(builder.raw_xor(_map_lit(copies[0], lit), _map_lit(copies[1], lit)))
    builder.bad = builder.raw_or_all(differences)

    constraints = []
    assumption_lits = [circuit.outputs[index] for name in spec.assumptions
                       for index in circuit.signal_bits('output', name)]
    for mapping in copies:
        for lit in list(circuit.constraints) + assumption_lits:
            mapped = _map_lit(mapping, lit)
            if mapped not in constraints:
                constraints.append(mapped)
    builder.constraints = constraints

    composed = builder.build()
    num_latches = circuit.num_latches
    group_pairs = tuple(
        GroupPair(group.name,
                  RegisterGroup(COPY_PREFIXES[0] + group.name, group.bits),
                  RegisterGroup(COPY_PREFIXES[1] + group.name,
                                tuple(bit + num_latches for bit in group.bits)))
        for group in sorted(circuit.register_groups(), key=lambda item: item.name)
    )
    mapping = SymmetryMap(
        latch_pairs=tuple((index, index + num_latches) for index in range(num_latches)),
        group_pairs=group_pairs,
    )
    mapping.validate(composed.num_latches)
    logger.info(
        f"Self-composition built: {composed.num_inputs} inputs, {composed.num_latches} latches, "
        f"{len(composed.ands)} ANDs, {len(group_pairs)} register pairs")
    return composed, mapping


def _predicate_init(circuit, pair):
    values = [(circuit.latches[a].init, circuit.latches[b].init)
              for a, b in zip(pair.first.bits, pair.second.bits)]
    if any(first is None or second is None for first, second in values):
        return None
    return int(any(first != second for first, second in values))


def add_equivalence_predicates(circuit: Circuit, mapping: SymmetryMap,
                               groups: Optional[Iterable[str]] = None):
    """
    Append one ``neq/<group>`` latch per register pair whose next state is the OR over the
    bits of XOR(next(first[i]), next(second[i])). ``groups`` restricts the pairs that get a
    predicate; by default every pair does.

    Returns:
        tuple: (augmented Circuit, SymmetryMap with neq bindings and the new self latches)
    """
    if mapping.neq_latches:
        raise SelfCompositionError("circuit already carries equivalence predicates")
    selected = mapping.group_pairs
    if groups is not None:
        wanted = set(groups)
        unknown = wanted - set(mapping.group_pair_by_name)
        if unknown:
            raise SelfCompositionError(f"unknown register pairs: {sorted(unknown)}")
        selected = tuple(pair for pair in mapping.group_pairs if pair.name in wanted)
    if not selected:
        logger.warning("No register pairs to augment; circuit returned unchanged")
        return circuit, mapping

    builder = AigBuilder.from_circuit(circuit)
    neq_latches = {}
    new_latches = []
    for pair in selected:
        if pair.first.width != pair.second.width:
            raise SelfCompositionError(f"register pair {pair.name!r} has mismatched widths")
        lit = builder.latch(NEQ_PREFIX + pair.name, _predicate_init(circuit, pair))
        index = len(builder.latches) - 1
        differences = [
            builder.raw_xor(circuit.latches[a].next, circuit.latches[b].next)
            for a, b in zip(pair.first.bits, pair.second.bits)
        ]
        builder.set_next(lit, builder.raw_or_all(differences))
        neq_latches[pair.name] = index
        new_latches.append(index)

    augmented = builder.build()
    augmented_map = SymmetryMap(
        latch_pairs=mapping.latch_pairs,
        group_pairs=mapping.group_pairs,
        neq_latches=neq_latches,
        self_latches=tuple(mapping.self_latches) + tuple(new_latches),
    )
    augmented_map.validate(augmented.num_latches)
    logger.info(f"Added {len(new_latches)} equivalence predicates: {sorted(neq_latches)}")
    return augmented, augmented_map
