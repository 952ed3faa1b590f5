"""
Pairing sidecar: the copy relabelling of a self-composition as line-oriented text.

    # comment
    pair <i> <j>
    self <i>
    group <name> <w> <i0> .. <i_{w-1}> | <j0> .. <j_{w-1}>
    neq <groupname> <latchindex>

Latch indices are 0-based positions in the circuit's latch list.
"""

import logging

from .circuit import Circuit, GroupPair, RegisterGroup, SymmetryMap
from .exceptions import PairingFormatError

logger = logging.getLogger('verifier.circuit')


def _index(token, lineno):
    try:
        value = int(token)
    except ValueError:
        raise PairingFormatError(f"expected a latch index, got {token!r}", lineno) from None
    if value < 0:
        raise PairingFormatError(f"negative latch index {value}", lineno)
    return value


def parse_pairing(text, circuit: Circuit) -> SymmetryMap:
    """Parse a sidecar and validate it against ``circuit``."""
    if isinstance(text, bytes):
        text = text.decode('utf-8')
    pairs, selfs, groups, neqs = [], [], [], {}
    for lineno, raw in enumerate(text.split('\n'), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        keyword, *args = line.split()
        if keyword == 'pair':
            if len(args) != 2:
                raise PairingFormatError("pair expects two latch indices", lineno)
            pairs.append((_index(args[0], lineno), _index(args[1], lineno)))
        elif keyword == 'self':
            if len(args) != 1:
                raise PairingFormatError("self expects one latch index", lineno)
            selfs.append(_index(args[0], lineno))
        elif keyword == 'group':
            groups.append(_parse_group(args, lineno))
        elif keyword == 'neq':
            if len(args) != 2:
                raise PairingFormatError("neq expects a group name and a latch index", lineno)
            if args[0] in neqs:
                raise PairingFormatError(f"duplicate neq binding for {args[0]!r}", lineno)
            neqs[args[0]] = _index(args[1], lineno)
        else:
            raise PairingFormatError(f"unknown directive {keyword!r}", lineno)

    mapping = SymmetryMap(
        latch_pairs=tuple(pairs),
        group_pairs=tuple(groups),
        neq_latches=neqs,
        self_latches=tuple(selfs),
    )
    mapping.validate(circuit.num_latches)
    logger.debug(
        f"Parsed pairing: {len(pairs)} pairs, {len(selfs)} self, {len(groups)} groups, {len(neqs)} neq")
    return mapping


def _parse_group(args, lineno):
    if len(args) < 2:
        raise PairingFormatError("group expects a name and a width", lineno)
    name = args[0]
    try:
        width = int(args[1])
    except ValueError:
        raise PairingFormatError(f"group width must be an integer, got {args[1]!r}", lineno) from None
    rest = args[2:]
    if rest.count('|') != 1:
        raise PairingFormatError("group bit lists must be separated by a single '|'", lineno)
    split = rest.index('|')
    first = [_index(token, lineno) for token in rest[:split]]
    second = [_index(token, lineno) for token in rest[split + 1:]]
    if len(first) != width or len(second) != width:
        raise PairingFormatError(
            f"group {name!r} declares width {width} but lists {len(first)} | {len(second)} bits", lineno)
    return GroupPair(name, RegisterGroup(f"c1/{name}", tuple(first)),
                     RegisterGroup(f"c2/{name}", tuple(second)))


def write_pairing(mapping: SymmetryMap) -> bytes:
    """Canonical sidecar text: pairs sorted, then self latches, groups and neq bindings."""
    lines = [f"pair {first} {second}" for first, second in sorted(mapping.latch_pairs)]
    lines += [f"self {index}" for index in sorted(mapping.self_latches)]
    for pair in sorted(mapping.group_pairs, key=lambda item: item.name):
        first = ' '.join(str(bit) for bit in pair.first.bits)
        second = ' '.join(str(bit) for bit in pair.second.bits)
        lines.append(f"group {pair.name} {pair.width} {first} | {second}")
    lines += [f"neq {name} {index}" for name, index in sorted(mapping.neq_latches.items())]
    return ('\n'.join(lines) + '\n').encode('utf-8') if lines else b''
