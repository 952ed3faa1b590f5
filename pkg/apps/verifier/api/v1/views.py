"""
Version 1 views for the verifier application.
Read access to recorded runs and matrices, plus synchronous benchmark runs.
"""

from rest_framework import viewsets, status, permissions
from rest_framework.decorators import action
from rest_framework.response import Response
from rest_framework.filters import OrderingFilter
from django_filters.rest_framework import DjangoFilterBackend
from ...models import MatrixRun, VerificationRun
from ...services import UsageError, run_benchmark
from .serializers import BenchmarkRequestSerializer, MatrixRunSerializer, VerificationRunSerializer
import logging

# Set up logging for API views
logger = logging.getLogger('verifier.api')


class VerificationRunViewSet(viewsets.ReadOnlyModelViewSet):
    """
    Recorded verification runs with filtering by verdict, configuration and family.
    """
    queryset = VerificationRun.objects.select_related('matrix_run')
    serializer_class = VerificationRunSerializer
    permission_classes = [permissions.IsAuthenticated]
    filter_backends = [DjangoFilterBackend, OrderingFilter]
    filterset_fields = ['verdict', 'predicate_mode', 'symmetry', 'family', 'size', 'configuration', 'matrix_run']
    ordering_fields = ['created_at', 'wall_time_s', 'block_calls', 'clauses_learned']
    ordering = ['-created_at']

    @action(detail=False, methods=['post'])
    def run_benchmark(self, request):
        """
        Generate a benchmark instance, run one configuration on it and return the stored run.
        """
        request_serializer = BenchmarkRequestSerializer(data=request.data)
        request_serializer.is_valid(raise_exception=True)
        params = request_serializer.validated_data

        try:
            run = run_benchmark(
                params['family'], params['size'], params['configuration'],
                constrained=params['constrained'],
                timeout_s=params.get('timeout_s'),
            )
        except UsageError as e:
            logger.warning(f"Rejected benchmark request from {request.user.username}: {str(e)}")
            return Response({'error': str(e)}, status=status.HTTP_422_UNPROCESSABLE_ENTITY)
        except Exception as e:
            logger.error(f"Benchmark run failed for {params['family']}({params['size']}): {str(e)}")
            return Response(
                {'error': 'Failed to run benchmark'},
                status=status.HTTP_500_INTERNAL_SERVER_ERROR
            )

        logger.info(f"User {request.user.username} ran {run.circuit_name} [{run.configuration}]: {run.verdict}")
        return Response(self.get_serializer(run).data, status=status.HTTP_201_CREATED)


class MatrixRunViewSet(viewsets.ReadOnlyModelViewSet):
    """
    Recorded benchmark matrices.
    """
    queryset = MatrixRun.objects.all()
    serializer_class = MatrixRunSerializer
    permission_classes = [permissions.IsAuthenticated]
    filter_backends = [DjangoFilterBackend, OrderingFilter]
    filterset_fields = ['family', 'status', 'constrained']
    ordering_fields = ['created_at', 'updated_at']
    ordering = ['-created_at']

    @action(detail=True, methods=['get'])
    def cells(self, request, pk=None):
        """
        Get all configuration runs of a matrix, by size then configuration.
        """
        matrix_instance = self.get_object()
        matrix_cells = matrix_instance.verification_runs.order_by('size', 'configuration')
        serializer = VerificationRunSerializer(matrix_cells, many=True, context={'request': request})
        logger.info(f"Retrieved {len(serializer.data)} cells for matrix {matrix_instance.pk}")
        return Response(serializer.data)
