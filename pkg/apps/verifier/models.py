from django.db import models
import logging

# Set up logging for models
logger = logging.getLogger('verifier.models')


class MatrixRun(models.Model):
    """
    One benchmark matrix: every configuration run on every requested size of a family.
    The rendered results table is stored once the run completes.
    """

    STATUS_CHOICES = [
        ('running', 'Running'),
        ('completed', 'Completed'),
        ('failed', 'Failed'),
    ]

    family = models.CharField(max_length=50, help_text="Benchmark family name")
    sizes = models.JSONField(default=list, help_text="Instance sizes in the matrix")
    constrained = models.BooleanField(default=True, help_text="Whether the input assumption is applied")
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='running')
    table_text = models.TextField(blank=True, default='', help_text="Rendered results table")
    error_message = models.TextField(blank=True, default='')
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ['-created_at']
        verbose_name = "Matrix Run"
        verbose_name_plural = "Matrix Runs"

    def __str__(self):
        return f"{self.family} {self.sizes} [{self.status}]"

    def save(self, *args, **kwargs):
        """Override save method to log matrix status changes"""
        is_new_matrix = self.pk is None
        super().save(*args, **kwargs)

        if is_new_matrix:
            logger.info(f"Matrix run started: {self.family} sizes {self.sizes}")
        else:
            logger.info(f"Matrix run {self.pk} is {self.status}")

    @property
    def cell_count(self):
        """Number of configuration runs recorded for this matrix"""
        return self.verification_runs.count()


class VerificationRun(models.Model):
    """
    Outcome and counters of a single model checking run.
    """

    VERDICT_CHOICES = [
        ('safe', 'Safe'),
        ('unsafe', 'Unsafe'),
        ('unknown', 'Unknown'),
    ]

    PREDICATE_CHOICES = [
        ('none', 'None'),
        ('aon', 'All-or-nothing'),
        ('maximal', 'Maximal'),
        ('maximum', 'Maximum'),
    ]

    circuit_name = models.CharField(max_length=255, help_text="Circuit file or benchmark instance name")
    family = models.CharField(max_length=50, blank=True, default='')
    size = models.PositiveIntegerField(null=True, blank=True)
    configuration = models.CharField(max_length=30, help_text="Configuration name, e.g. sym+maximal")
    symmetry = models.BooleanField(default=False)
    predicate_mode = models.CharField(max_length=20, choices=PREDICATE_CHOICES, default='none')
    verdict = models.CharField(max_length=20, choices=VERDICT_CHOICES)
    proof_bound = models.IntegerField(default=0)
    frames_used = models.IntegerField(default=0)
    block_calls = models.IntegerField(default=0)
    clauses_learned = models.IntegerField(default=0)
    wall_time_s = models.FloatField(default=0.0)
    stats = models.JSONField(default=dict, help_text="All engine counters")
    validated = models.BooleanField(
        null=True, blank=True,
        help_text="Certificate passed (safe) or witness replayed (unsafe); null when not checked")
    matrix_run = models.ForeignKey(
        MatrixRun,
        on_delete=models.CASCADE,
        null=True,
        blank=True,
        related_name='verification_runs',
        help_text="Matrix this run belongs to (if any)"
    )
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']
        verbose_name = "Verification Run"
        verbose_name_plural = "Verification Runs"

    def __str__(self):
        return f"{self.circuit_name} [{self.configuration}] {self.verdict}"

    def save(self, *args, **kwargs):
        """Override save method to log recorded runs"""
        is_new_run = self.pk is None
        super().save(*args, **kwargs)

        if is_new_run:
            logger.info(f"Verification run recorded: {self.circuit_name} [{self.configuration}] {self.verdict}")

    @property
    def timed_out(self):
        return self.verdict == 'unknown'

    @property
    def table_cell(self):
        """Cell text as shown in matrix tables"""
        if self.timed_out:
            return f"TO({self.proof_bound})"
        return f"{self.wall_time_s:.2f}({self.block_calls}/{self.clauses_learned})"
