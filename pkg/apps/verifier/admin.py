from django.contrib import admin
from .models import MatrixRun, VerificationRun


@admin.register(MatrixRun)
class MatrixRunAdmin(admin.ModelAdmin):
    list_display = ['family', 'sizes', 'constrained', 'status', 'created_at', 'updated_at']
    list_filter = ['status', 'family', 'constrained', 'created_at']
    search_fields = ['family', 'error_message']
    readonly_fields = ['created_at', 'updated_at']
    ordering = ['-created_at']


@admin.register(VerificationRun)
class VerificationRunAdmin(admin.ModelAdmin):
    list_display = ['circuit_name', 'configuration', 'verdict', 'proof_bound', 'block_calls',
                    'clauses_learned', 'wall_time_s', 'validated', 'created_at']
    list_filter = ['verdict', 'predicate_mode', 'symmetry', 'family', 'validated', 'created_at']
    search_fields = ['circuit_name', 'family', 'configuration']
    readonly_fields = ['created_at']
    ordering = ['-created_at']

    fieldsets = (
        ('Instance', {
            'fields': ('circuit_name', 'family', 'size', 'matrix_run')
        }),
        ('Configuration', {
            'fields': ('configuration', 'symmetry', 'predicate_mode')
        }),
        ('Outcome', {
            'fields': ('verdict', 'proof_bound', 'frames_used', 'block_calls', 'clauses_learned',
                       'wall_time_s', 'validated')
        }),
        ('Counters', {
            'fields': ('stats', 'created_at'),
            'classes': ('collapse',)
        }),
    )
