"""
Services module for the verifier application.
Runs the model checking engine on circuit files and benchmark families, writes the
certificate / witness / stats artifacts and records outcomes.
"""

import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Optional

from .engine import (
    CONFIGURATIONS, STATS_KEYS, Certificate, EngineOptions, Safe, Unknown, Unsafe,
    add_equivalence_predicates, bmc, certify, check, explicit_reach, generate_benchmark, parse_aiger,
    parse_certificate, parse_pairing, replay, self_compose, write_aiger, write_certificate,
    write_pairing, write_witness,
)
from .engine.exceptions import (
    AigerFormatError, BenchmarkError, CertificateFormatError, ExplicitLimitExceeded, FrameAuditError,
    PairingFormatError, SelfCompositionError, SolverCheckError, SymmetryAuditError, SymmetryMapError,
    VerdictDisagreement,
)
from .models import MatrixRun, VerificationRun
from .utils import (
    default_pairing_path, engine_setting, format_key_values, instance_name, read_artifact,
    write_artifact,
)
from .websocket_utils import send_matrix_notification
import logging

logger = logging.getLogger('verifier.services')

EXIT_SAFE = 0
EXIT_UNSAFE = 1
EXIT_UNKNOWN = 2
# configurations disagree or an internal audit failed
EXIT_INCONSISTENT = 3

CONFIGURATION_NAMES = [name for name, _, _ in CONFIGURATIONS]


class UsageError(Exception):
    """A request the engine cannot run; ``returncode`` is the command exit status."""

    BAD_FLAGS = 10
    UNREADABLE = 11
    BAD_INPUT = 12

    def __init__(self, message, returncode):
        super().__init__(message)
        self.returncode = returncode


class AuditFailure(Exception):
    """A frame, symmetry or SAT self-check failed during a run; the verdict cannot be trusted."""

    returncode = EXIT_INCONSISTENT


@dataclass(frozen=True)
class RunConfig:
    """Everything one ``check`` run needs: inputs, engine flags, limits and output paths."""
    circuit_path: str
    pairing_path: Optional[str] = None
    symmetry: bool = False
    pred: str = 'none'
    audit_symmetric: bool = False
    audit_frames: bool = False
    sat_debug: bool = False
    timeout_s: Optional[float] = None
    max_frames: Optional[int] = None
    max_obligations: Optional[int] = None
    conflict_budget: Optional[int] = None
    seed: int = 0
    certificate_path: Optional[str] = None
    witness_path: Optional[str] = None
    stats_path: Optional[str] = None
    dimacs_dir: Optional[str] = None

    def engine_options(self) -> EngineOptions:
        """
        Translate the run flags and the SECIC3 settings into engine options.

        Raises:
            UsageError: on an invalid flag combination
        """
        if self.audit_symmetric and not self.symmetry:
            raise UsageError("--audit-symmetric needs --symmetry", UsageError.BAD_FLAGS)
        try:
            return EngineOptions(
                symmetry=self.symmetry,
                pred=self.pred,
                audit_symmetric=self.audit_symmetric,
                audit_frames=self.audit_frames,
                sat_debug=self.sat_debug,
                timeout_s=_or_default(self.timeout_s, 'DEFAULT_TIMEOUT_S'),
                max_frames=_or_default(self.max_frames, 'DEFAULT_MAX_FRAMES'),
                max_obligations=_or_default(self.max_obligations, 'DEFAULT_MAX_OBLIGATIONS'),
                conflict_budget=self.conflict_budget,
                seed=self.seed,
                solver=engine_setting('SAT_SOLVER'),
                maximum_test_cap=engine_setting('MAXIMUM_TEST_CAP'),
                dimacs_dir=self.dimacs_dir,
            )
        except ValueError as e:
            raise UsageError(str(e), UsageError.BAD_FLAGS) from e


def _or_default(value, setting):
    return value if value is not None else engine_setting(setting)


@dataclass
class CheckOutcome:
    result: object
    status_line: str
    exit_code: int
    run: Optional[VerificationRun] = None


# result reporting

def status_line(result):
    if isinstance(result, Safe):
        return 'SAFE'
    if isinstance(result, Unsafe):
        return 'UNSAFE'
    return f"UNKNOWN(bound={result.bound})"


def exit_code(result):
    if isinstance(result, Safe):
        return EXIT_SAFE
    if isinstance(result, Unsafe):
        return EXIT_UNSAFE
    return EXIT_UNKNOWN


def proof_bound(result):
    """
    Number of cycles over which the property is established: the fixpoint frame for a
    proof, the cycles before the violation for a counterexample, the reached bound otherwise.
    """
    if isinstance(result, Safe):
        return result.frames_used
    if isinstance(result, Unsafe):
        return len(result.trace.inputs) - 1
    return result.bound


def frames_used(result):
    if isinstance(result, Safe):
        return result.frames_used
    return len(result.stats.frame_sizes)


def stats_record(result):
    """Ordered stats of a run, as written to stats files and matrix.kv lines."""
    counters = result.stats.as_dict()
    record = {
        'verdict': result.verdict,
        'proof_bound': proof_bound(result),
        'frames_used': frames_used(result),
    }
    for key in STATS_KEYS:
        record[key] = counters[key]
    record['frame_sizes'] = counters['frame_sizes']
    record['wall_time_s'] = counters['wall_time_s']
    return record


def format_stats(result):
    return '\n'.join(format_key_values(stats_record(result))) + '\n'


def validate_result(circuit, result):
    """
    Independent check of a verdict: the invariant must certify, the counterexample must
    replay. Returns None for unknown results.
    """
    solver = engine_setting('SAT_SOLVER')
    if isinstance(result, Safe):
        outcome = certify(circuit, Certificate.from_invariant(result.invariant), solver)
        if not outcome.passed:
            logger.error(f"Invariant fails the {outcome.failed_check} check")
        return outcome.passed
    if isinstance(result, Unsafe):
        outcome = replay(circuit, result.trace)
        if not outcome.ok:
            logger.error(f"Counterexample does not replay: {outcome}")
        return outcome.ok
    return None


def record_verification_run(result, circuit_name, options, family='', size=None,
                            matrix_run=None, validated=None):
    """
    Store a run outcome.

    Returns:
        VerificationRun: Created record, or None if persisting failed
    """
    try:
        return VerificationRun.objects.create(
            circuit_name=circuit_name,
            family=family,
            size=size,
            configuration=options.config_name,
            symmetry=options.symmetry,
            predicate_mode=options.pred,
            verdict=result.verdict,
            proof_bound=proof_bound(result),
            frames_used=frames_used(result),
            block_calls=result.stats.block_calls,
            clauses_learned=result.stats.clauses_learned,
            wall_time_s=result.stats.wall_time_s,
            stats=stats_record(result),
            validated=validated,
            matrix_run=matrix_run,
        )
    except Exception as e:
        logger.error(f"Failed to record verification run for {circuit_name}: {str(e)}")
        return None


# input loading

def _read(path, what):
    try:
        return read_artifact(path)
    except OSError as e:
        raise UsageError(f"cannot read {what} {path}: {e.strerror or e}", UsageError.UNREADABLE) from e


def _write(path, content, what):
    try:
        write_artifact(path, content)
    except OSError as e:
        raise UsageError(f"cannot write {what} {path}: {e.strerror or e}", UsageError.UNREADABLE) from e


def load_circuit(path):
    try:
        return parse_aiger(_read(path, 'circuit'))
    except AigerFormatError as e:
        raise UsageError(f"{path}: {e}", UsageError.BAD_INPUT) from e


def load_pairing(path, circuit):
    try:
        return parse_pairing(_read(path, 'pairing file'), circuit)
    except (PairingFormatError, SymmetryMapError) as e:
        raise UsageError(f"{path}: {e}", UsageError.BAD_INPUT) from e


# check

def run_check(cfg: RunConfig, persist=None):
    """
    Verify one circuit file and write the requested artifacts.

    Args:
        cfg: RunConfig with input paths, flags, limits and output paths
        persist: record a VerificationRun; defaults to the PERSIST_RUNS setting

    Returns:
        CheckOutcome: engine result, the one-line verdict and the exit code
    """
    circuit = load_circuit(cfg.circuit_path)
    pairing_path = cfg.pairing_path or default_pairing_path(cfg.circuit_path)
    mapping = load_pairing(pairing_path, circuit) if pairing_path else None
    options = cfg.engine_options()
    try:
        options.check_mapping(mapping)
    except ValueError as e:
        raise UsageError(str(e), UsageError.BAD_FLAGS) from e

    logger.info(f"Checking {cfg.circuit_path} with configuration {options.config_name}")
    try:
        result = check(circuit, mapping, options)
    except SymmetryMapError as e:
        raise UsageError(f"{pairing_path}: {e}", UsageError.BAD_INPUT) from e
    except (FrameAuditError, SymmetryAuditError, SolverCheckError) as e:
        logger.error(f"Failed audit while checking {cfg.circuit_path}: {str(e)}")
        raise AuditFailure(f"{cfg.circuit_path}: {e.__class__.__name__}: {e}") from e

    if isinstance(result, Safe) and cfg.certificate_path:
        _write(cfg.certificate_path, write_certificate(Certificate.from_invariant(result.invariant)),
               'certificate')
    if isinstance(result, Unsafe) and cfg.witness_path:
        _write(cfg.witness_path, write_witness(circuit, result.trace), 'witness')
    if cfg.stats_path:
        _write(cfg.stats_path, format_stats(result), 'stats file')

    run = None
    if engine_setting('PERSIST_RUNS') if persist is None else persist:
        run = record_verification_run(result, os.path.basename(cfg.circuit_path), options)

    line = status_line(result)
    logger.info(f"{cfg.circuit_path}: {line}")
    return CheckOutcome(result, line, exit_code(result), run)


# benchmark generation

@dataclass(frozen=True)
class BenchmarkInstance:
    name: str
    plain: object
    plain_map: object
    augmented: object
    augmented_map: object
    expected: str

    def for_configuration(self, pred):
        """Circuit and map a configuration runs on: predicate modes need the neq latches."""
        if pred == 'none':
            return self.plain, self.plain_map
        return self.augmented, self.augmented_map


def build_instance(family, size, constrained=True):
    """
    Generate and self-compose one benchmark instance.

    Raises:
        UsageError: on an unknown family or an invalid size
    """
    try:
        source, spec, expected = generate_benchmark(family, size, constrained)
        plain, plain_map = self_compose(source, spec)
    except (BenchmarkError, SelfCompositionError) as e:
        raise UsageError(str(e), UsageError.BAD_FLAGS) from e
    augmented, augmented_map = add_equivalence_predicates(plain, plain_map)
    return BenchmarkInstance(instance_name(family, size, constrained),
                             plain, plain_map, augmented, augmented_map, expected)


@dataclass(frozen=True)
class BenchgenOutcome:
    circuit_path: str
    pairing_path: str
    expected: str


def run_benchgen(family, size, out_prefix, constrained=True, predicates=True):
    """
    Write ``<prefix>.aag`` and ``<prefix>.pair`` for a benchmark instance.

    Args:
        family: benchmark family name
        size: data width
        out_prefix: output path prefix
        constrained: apply the input assumption (expected SAFE) or not (expected UNSAFE)
        predicates: write the circuit augmented with equivalence predicates

    Returns:
        BenchgenOutcome: paths written and the expected verdict
    """
    instance = build_instance(family, size, constrained)
    circuit, mapping = (instance.augmented, instance.augmented_map) if predicates \
        else (instance.plain, instance.plain_map)
    outcome = BenchgenOutcome(f"{out_prefix}.aag", f"{out_prefix}.pair", instance.expected)
    _write(outcome.circuit_path, write_aiger(circuit), 'circuit')
    _write(outcome.pairing_path, write_pairing(mapping), 'pairing file')
    logger.info(f"Generated {instance.name}: {circuit.num_latches} latches, {len(circuit.ands)} ANDs")
    return outcome


def run_benchmark(family, size, configuration, constrained=True, timeout_s=None):
    """
    Generate an instance, run one configuration on it and store the validated outcome.

    Returns:
        VerificationRun: the stored run (unsaved if persisting failed)
    """
    symmetry, pred = _configuration(configuration)
    instance = build_instance(family, size, constrained)
    circuit, mapping = instance.for_configuration(pred)
    options = _matrix_options(symmetry, pred, timeout_s)
    result = check(circuit, mapping, options)
    validated = validate_result(circuit, result)
    run = record_verification_run(result, instance.name, options, family, size, validated=validated)
    if run is None:
        run = VerificationRun(
            circuit_name=instance.name, family=family, size=size, configuration=configuration,
            symmetry=symmetry, predicate_mode=pred, verdict=result.verdict,
            proof_bound=proof_bound(result), frames_used=frames_used(result),
            block_calls=result.stats.block_calls, clauses_learned=result.stats.clauses_learned,
            wall_time_s=result.stats.wall_time_s, stats=stats_record(result), validated=validated)
    return run


def _configuration(name):
    for config_name, symmetry, pred in CONFIGURATIONS:
        if config_name == name:
            return symmetry, pred
    raise UsageError(f"unknown configuration {name!r}; choose from {CONFIGURATION_NAMES}",
                     UsageError.BAD_FLAGS)


def _matrix_options(symmetry, pred, timeout_s=None, max_frames=None):
    return EngineOptions(
        symmetry=symmetry,
        pred=pred,
        timeout_s=_or_default(timeout_s, 'DEFAULT_TIMEOUT_S'),
        max_frames=_or_default(max_frames, 'DEFAULT_MAX_FRAMES'),
        max_obligations=engine_setting('DEFAULT_MAX_OBLIGATIONS'),
        solver=engine_setting('SAT_SOLVER'),
        maximum_test_cap=engine_setting('MAXIMUM_TEST_CAP'),
    )


# matrix

@dataclass
class MatrixCell:
    size: int
    configuration: str
    result: object
    validated: Optional[bool]
    options: EngineOptions

    @property
    def text(self):
        if isinstance(self.result, Unknown):
            return f"TO({self.result.bound})"
        stats = self.result.stats
        return f"{stats.wall_time_s:.2f}({stats.block_calls}/{stats.clauses_learned})"


@dataclass
class MatrixReport:
    family: str
    sizes: list
    constrained: bool
    cells: list = field(default_factory=list)
    table: str = ''
    kv_lines: list = field(default_factory=list)
    ground_truth: dict = field(default_factory=dict)
    matrix_run: Optional[MatrixRun] = None

    def cell(self, size, configuration):
        for cell in self.cells:
            if cell.size == size and cell.configuration == configuration:
                return cell
        raise KeyError((size, configuration))

    def verdicts(self, size):
        return {cell.configuration: cell.result.verdict for cell in self.cells if cell.size == size}


def explicit_verdict(circuit):
    """
    Ground-truth verdict by explicit-state search, or None when the circuit has more latches
    than the EXPLICIT_LATCH_LIMIT setting allows.
    """
    try:
        result = explicit_reach(circuit, latch_limit=engine_setting('EXPLICIT_LATCH_LIMIT'),
                                solver_name=engine_setting('SAT_SOLVER'))
    except ExplicitLimitExceeded as e:
        logger.debug(f"No explicit-state verdict: {e}")
        return None
    return 'unsafe' if result.bad_reachable else 'safe'


def _run_cell(size, configuration, circuit, mapping, options):
    result = check(circuit, mapping, options)
    validated = validate_result(circuit, result)
    return MatrixCell(size, configuration, result, validated, options)


def check_unanimity(cells, ground_truth=None):
    """
    Raise VerdictDisagreement when configurations disagree on an instance, a verdict
    fails its independent check or contradicts the explicit-state verdict of its size.
    Unknown results take no part.
    """
    ground_truth = ground_truth or {}
    problems = []
    by_size = {}
    for cell in cells:
        if cell.validated is False:
            problems.append(f"size {cell.size} [{cell.configuration}]: {cell.result.verdict} fails validation")
        expected = ground_truth.get(cell.size)
        if expected and not isinstance(cell.result, Unknown) and cell.result.verdict != expected:
            problems.append(f"size {cell.size} [{cell.configuration}]: {cell.result.verdict}, "
                            f"explicit-state search says {expected}")
        if not isinstance(cell.result, Unknown):
            by_size.setdefault(cell.size, {})[cell.configuration] = cell.result.verdict
    for size, verdicts in sorted(by_size.items()):
        if len(set(verdicts.values())) > 1:
            listing = ', '.join(f"{name}={verdict}" for name, verdict in verdicts.items())
            problems.append(f"size {size}: {listing}")
    if problems:
        raise VerdictDisagreement('; '.join(problems))


def render_matrix_table(family, sizes, cells, constrained=True):
    """Plain text table: one row per size, one column per configuration."""
    by_key = {(cell.size, cell.configuration): cell for cell in cells}
    header = ['size', 'verdict'] + CONFIGURATION_NAMES
    rows = []
    for size in sizes:
        row_cells = [by_key[(size, name)] for name in CONFIGURATION_NAMES]
        decided = sorted({cell.result.verdict for cell in row_cells if not isinstance(cell.result, Unknown)})
        verdict = '/'.join(decided) if decided else 'unknown'
        rows.append([str(size), verdict] + [cell.text for cell in row_cells])
    widths = [max(len(line[column]) for line in [header] + rows) for column in range(len(header))]
    title = f"{family} ({'constrained' if constrained else 'unconstrained'})"
    lines = [title, '  '.join(text.ljust(width) for text, width in zip(header, widths)).rstrip()]
    for row in rows:
        lines.append('  '.join(text.ljust(width) for text, width in zip(row, widths)).rstrip())
    return '\n'.join(lines) + '\n'


def matrix_kv_lines(family, cells):
    lines = []
    for cell in cells:
        tokens = format_key_values(stats_record(cell.result))
        tokens.append(f"validated={'' if cell.validated is None else str(cell.validated).lower()}")
        lines.append(' '.join([family, str(cell.size), cell.configuration] + tokens))
    return lines


def _create_matrix_run(family, sizes, constrained):
    try:
        return MatrixRun.objects.create(family=family, sizes=list(sizes), constrained=constrained)
    except Exception as e:
        logger.error(f"Failed to create matrix run for {family}: {str(e)}")
        return None


def _finish_matrix_run(matrix_run, status, table='', error=''):
    if matrix_run is None:
        return
    try:
        matrix_run.status = status
        matrix_run.table_text = table
        matrix_run.error_message = error
        matrix_run.save()
    except Exception as e:
        logger.error(f"Failed to update matrix run {matrix_run.pk}: {str(e)}")
    send_matrix_notification(matrix_run.pk, 'matrix_finished', {'status': status, 'table': table})


def run_matrix(family, sizes, out_dir=None, workers=None, timeout_s=None, constrained=True,
               max_frames=None, persist=None):
    """
    Run all configurations on every size of a benchmark family.

    Args:
        family: benchmark family name
        sizes: instance sizes
        out_dir: directory receiving matrix.txt and matrix.kv; defaults to ARTIFACT_DIR/<family>
        workers: worker threads; defaults to the MATRIX_WORKERS setting
        timeout_s: per-cell time limit
        constrained: apply the input assumption
        persist: record MatrixRun/VerificationRun rows; defaults to PERSIST_RUNS

    Returns:
        MatrixReport: cells, rendered table and key=value lines

    Raises:
        VerdictDisagreement: when configurations disagree or a verdict fails validation
    """
    sizes = list(sizes)
    if not sizes:
        raise UsageError("at least one size is required", UsageError.BAD_FLAGS)
    instances = {size: build_instance(family, size, constrained) for size in sizes}
    out_dir = out_dir or os.path.join(engine_setting('ARTIFACT_DIR'), family)
    ground_truth = {size: explicit_verdict(instance.plain) for size, instance in instances.items()}
    persist = engine_setting('PERSIST_RUNS') if persist is None else persist
    matrix_run = _create_matrix_run(family, sizes, constrained) if persist else None
    workers = workers or engine_setting('MATRIX_WORKERS')

    jobs = []
    for size in sizes:
        for name, symmetry, pred in CONFIGURATIONS:
            circuit, mapping = instances[size].for_configuration(pred)
            jobs.append((size, name, circuit, mapping, _matrix_options(symmetry, pred, timeout_s, max_frames)))

    logger.info(f"Matrix {family} {sizes}: {len(jobs)} cells on {workers} worker(s)")
    cells = []
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(_run_cell, *job) for job in jobs]
        for future in as_completed(futures):
            try:
                cell = future.result()
            except Exception as e:
                _finish_matrix_run(matrix_run, 'failed', error=str(e))
                raise
            cells.append(cell)
            logger.info(f"{family}({cell.size}) [{cell.configuration}]: {cell.result.verdict} {cell.text}")
            if matrix_run is not None:
                record_verification_run(cell.result, instances[cell.size].name, cell.options, family,
                                        cell.size, matrix_run=matrix_run, validated=cell.validated)
                send_matrix_notification(matrix_run.pk, 'cell_finished', {
                    'size': cell.size,
                    'configuration': cell.configuration,
                    'verdict': cell.result.verdict,
                    'cell': cell.text,
                })

    order = {name: position for position, name in enumerate(CONFIGURATION_NAMES)}
    cells.sort(key=lambda cell: (sizes.index(cell.size), order[cell.configuration]))
    report = MatrixReport(family, sizes, constrained, cells, matrix_run=matrix_run,
                          ground_truth={size: verdict for size, verdict in ground_truth.items() if verdict})
    report.table = render_matrix_table(family, sizes, cells, constrained)
    report.kv_lines = matrix_kv_lines(family, cells)
    _write(os.path.join(out_dir, 'matrix.txt'), report.table, 'matrix table')
    _write(os.path.join(out_dir, 'matrix.kv'), '\n'.join(report.kv_lines) + '\n', 'matrix key/value file')

    try:
        check_unanimity(cells, report.ground_truth)
    except VerdictDisagreement as e:
        logger.error(f"Matrix {family} is inconsistent: {e}")
        _finish_matrix_run(matrix_run, 'failed', report.table, str(e))
        raise

    for size in sizes:
        decided = {verdict for verdict in report.verdicts(size).values() if verdict != 'unknown'}
        if decided and decided != {instances[size].expected}:
            logger.warning(f"{instances[size].name}: verdict {decided.pop()} differs from the "
                           f"designed {instances[size].expected}")
    _finish_matrix_run(matrix_run, 'completed', report.table)
    return report


# certify / bmc

@dataclass
class OracleOutcome:
    result: object
    status_line: str
    exit_code: int


def run_certify(circuit_path, certificate_path):
    """
    Check an inductive invariant file against a circuit.

    Returns:
        OracleOutcome: PASS (exit 0) or FAIL(<check>) (exit 1)
    """
    circuit = load_circuit(circuit_path)
    try:
        certificate = parse_certificate(_read(certificate_path, 'certificate'), circuit.num_latches)
    except CertificateFormatError as e:
        raise UsageError(f"{certificate_path}: {e}", UsageError.BAD_INPUT) from e
    result = certify(circuit, certificate, engine_setting('SAT_SOLVER'))
    if result.passed:
        return OracleOutcome(result, 'PASS', 0)
    return OracleOutcome(result, f"FAIL({result.failed_check})", 1)


def run_bmc(circuit_path, bound, witness_path=None):
    """
    Search for a counterexample of at most ``bound`` transitions.

    Returns:
        OracleOutcome: UNSAFE(depth=d) (exit 1) or NONE(bound=K) (exit 0)
    """
    if bound < 0:
        raise UsageError("--bound must be non-negative", UsageError.BAD_FLAGS)
    circuit = load_circuit(circuit_path)
    trace = bmc(circuit, bound, engine_setting('SAT_SOLVER'))
    if trace is None:
        return OracleOutcome(None, f"NONE(bound={bound})", 0)
    if witness_path:
        _write(witness_path, write_witness(circuit, trace), 'witness')
    return OracleOutcome(trace, f"UNSAFE(depth={len(trace.inputs) - 1})", 1)
