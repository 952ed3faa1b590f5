"""
Version 1 serializers for the verifier application.
"""

from rest_framework import serializers
from ...engine import FAMILIES
from ...models import MatrixRun, VerificationRun
from ...services import CONFIGURATION_NAMES
import logging

# Set up logging for serializers
logger = logging.getLogger('verifier.api')

MAX_API_SIZE = 16


class VerificationRunSerializer(serializers.ModelSerializer):
    """
    Serializer for VerificationRun with the full counter set.
    """
    table_cell = serializers.SerializerMethodField()

    class Meta:
        model = VerificationRun
        fields = [
            'id', 'circuit_name', 'family', 'size', 'configuration', 'symmetry',
            'predicate_mode', 'verdict', 'proof_bound', 'frames_used', 'block_calls',
            'clauses_learned', 'wall_time_s', 'stats', 'validated', 'matrix_run',
            'table_cell', 'created_at'
        ]
        read_only_fields = fields

    def get_table_cell(self, run_instance):
        return run_instance.table_cell


class MatrixRunSerializer(serializers.ModelSerializer):
    """
    Serializer for MatrixRun; cells are served by the ``cells`` action.
    """
    cell_count = serializers.SerializerMethodField()

    class Meta:
        model = MatrixRun
        fields = [
            'id', 'family', 'sizes', 'constrained', 'status', 'table_text',
            'error_message', 'cell_count', 'created_at', 'updated_at'
        ]
        read_only_fields = fields

    def get_cell_count(self, matrix_instance):
        return matrix_instance.cell_count


class BenchmarkRequestSerializer(serializers.Serializer):
    """
    Request body for running one configuration on a generated benchmark instance.
    """
    family = serializers.ChoiceField(choices=sorted(FAMILIES), help_text="Benchmark family")
    size = serializers.IntegerField(min_value=1, max_value=MAX_API_SIZE, help_text="Data width")
    configuration = serializers.ChoiceField(
        choices=CONFIGURATION_NAMES,
        default='baseline',
        help_text="Engine configuration"
    )
    constrained = serializers.BooleanField(default=True, help_text="Apply the input assumption")
    timeout_s = serializers.FloatField(
        required=False,
        allow_null=True,
        min_value=0.1,
        help_text="Time limit for the run"
    )
