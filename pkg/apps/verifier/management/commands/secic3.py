"""
Management command driving the verifier from the shell:

    python manage.py secic3 check circuit.aag --symmetry --pred=maximal
    python manage.py secic3 benchgen mux_reg 4 --out build/mux_reg_4
    python manage.py secic3 matrix mux_reg --sizes 4,8,16 --out results/
    python manage.py secic3 certify circuit.aag circuit.cert
    python manage.py secic3 bmc circuit.aag --bound 10
"""

import argparse
import sys

from django.core.management.base import BaseCommand, CommandError, CommandParser

from apps.verifier.engine import FAMILIES
from apps.verifier.engine.exceptions import VerdictDisagreement
from apps.verifier.engine.ic3 import PREDICATE_MODES
from apps.verifier.services import (
    EXIT_INCONSISTENT, AuditFailure, RunConfig, UsageError, run_benchgen, run_bmc, run_certify,
    run_check, run_matrix,
)
import logging

logger = logging.getLogger('verifier.cli')


def _sizes(text):
    try:
        sizes = [int(token) for token in text.split(',') if token.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"must be comma-separated integers, got {text!r}") from None
    if not sizes:
        raise argparse.ArgumentTypeError("is empty")
    return sizes


class VerifierParser(CommandParser):
    """Argument errors exit with the bad-flags code instead of argparse's 2, which means UNKNOWN here."""

    def error(self, message):
        if self.called_from_command_line:
            self.print_usage(sys.stderr)
            self.exit(UsageError.BAD_FLAGS, f"{self.prog}: error: {message}\n")
        raise CommandError(f"Error: {message}", returncode=UsageError.BAD_FLAGS)


class Command(BaseCommand):
    help = 'Check non-interference of self-composed circuits with IC3 and its symmetry/predicate extensions'

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.__class__ = VerifierParser
        return parser

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True, parser_class=VerifierParser)

        check = subparsers.add_parser('check', help='Verify one AIGER circuit')
        check.add_argument('circuit', help='AIGER ASCII file (.aag)')
        check.add_argument('--pairing', help='Pairing sidecar (default: <circuit stem>.pair when present)')
        check.add_argument('--symmetry', action='store_true', help='Block symmetric cubes alongside learned ones')
        check.add_argument('--pred', choices=PREDICATE_MODES, default='none', help='Predicate replacement mode')
        check.add_argument('--audit-symmetric', action='store_true',
                           help='Re-check every symmetric cube with a reachability test')
        check.add_argument('--audit-frames', action='store_true',
                           help='Check the frame trace conditions after every block and propagate')
        check.add_argument('--sat-debug', action='store_true', help='Check every SAT model and core')
        check.add_argument('--timeout-s', type=float)
        check.add_argument('--max-frames', type=int)
        check.add_argument('--max-obligations', type=int)
        check.add_argument('--conflict-budget', type=int)
        check.add_argument('--seed', type=int, default=0)
        check.add_argument('--stats', help='Write key=value stats here')
        check.add_argument('--certificate', help='Write the inductive invariant here on SAFE')
        check.add_argument('--witness', help='Write the counterexample here on UNSAFE')
        check.add_argument('--dimacs-dir', help='Dump every SAT query as DIMACS into this directory')

        benchgen = subparsers.add_parser('benchgen', help='Write a self-composed benchmark instance')
        benchgen.add_argument('family', choices=sorted(FAMILIES))
        benchgen.add_argument('size', type=int)
        benchgen.add_argument('--out', required=True, help='Output prefix for <prefix>.aag and <prefix>.pair')
        benchgen.add_argument('--unconstrained', action='store_true', help='Leave the input assumption out')
        benchgen.add_argument('--no-predicates', action='store_true',
                              help='Write the plain self-composition without neq latches')

        matrix = subparsers.add_parser('matrix', help='Run every configuration on a benchmark family')
        matrix.add_argument('family', choices=sorted(FAMILIES))
        matrix.add_argument('--sizes', required=True, type=_sizes, help='Comma-separated sizes, e.g. 4,8,16')
        matrix.add_argument('--out', help='Directory for matrix.txt and matrix.kv (default: ARTIFACT_DIR/<family>)')
        matrix.add_argument('--workers', type=int)
        matrix.add_argument('--timeout-s', type=float)
        matrix.add_argument('--max-frames', type=int)
        matrix.add_argument('--unconstrained', action='store_true')

        certify = subparsers.add_parser('certify', help='Check an inductive invariant against a circuit')
        certify.add_argument('circuit')
        certify.add_argument('certificate')

        bmc = subparsers.add_parser('bmc', help='Bounded search for a counterexample')
        bmc.add_argument('circuit')
        bmc.add_argument('--bound', type=int, required=True)
        bmc.add_argument('--witness')

    def handle(self, *args, **options):
        handler = getattr(self, f"handle_{options['subcommand']}")
        try:
            code = handler(options)
        except UsageError as e:
            logger.error(f"{options['subcommand']}: {e}")
            raise CommandError(str(e), returncode=e.returncode) from e
        except AuditFailure as e:
            logger.error(f"{options['subcommand']}: {e}")
            raise CommandError(f"audit failed: {e}", returncode=e.returncode) from e
        if code:
            sys.exit(code)

    def handle_check(self, options):
        cfg = RunConfig(
            circuit_path=options['circuit'],
            pairing_path=options['pairing'],
            symmetry=options['symmetry'],
            pred=options['pred'],
            audit_symmetric=options['audit_symmetric'],
            audit_frames=options['audit_frames'],
            sat_debug=options['sat_debug'],
            timeout_s=options['timeout_s'],
            max_frames=options['max_frames'],
            max_obligations=options['max_obligations'],
            conflict_budget=options['conflict_budget'],
            seed=options['seed'],
            certificate_path=options['certificate'],
            witness_path=options['witness'],
            stats_path=options['stats'],
            dimacs_dir=options['dimacs_dir'],
        )
        outcome = run_check(cfg)
        self.stdout.write(outcome.status_line)
        return outcome.exit_code

    def handle_benchgen(self, options):
        outcome = run_benchgen(
            options['family'], options['size'], options['out'],
            constrained=not options['unconstrained'],
            predicates=not options['no_predicates'],
        )
        self.stdout.write(self.style.SUCCESS(
            f"Wrote {outcome.circuit_path} and {outcome.pairing_path} (expected {outcome.expected})"))
        return 0

    def handle_matrix(self, options):
        try:
            report = run_matrix(
                options['family'], options['sizes'], options['out'],
                workers=options['workers'],
                timeout_s=options['timeout_s'],
                max_frames=options['max_frames'],
                constrained=not options['unconstrained'],
            )
        except VerdictDisagreement as e:
            raise CommandError(f"configurations disagree: {e}", returncode=EXIT_INCONSISTENT) from e
        self.stdout.write(report.table)
        return 0

    def handle_certify(self, options):
        outcome = run_certify(options['circuit'], options['certificate'])
        self.stdout.write(outcome.status_line)
        return outcome.exit_code

    def handle_bmc(self, options):
        outcome = run_bmc(options['circuit'], options['bound'], options['witness'])
        self.stdout.write(outcome.status_line)
        return outcome.exit_code
