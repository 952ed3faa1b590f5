# Generated by Django 5.2.4 on 2026-10-18 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='MatrixRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('family', models.CharField(help_text='Benchmark family name', max_length=50)),
                ('sizes', models.JSONField(default=list, help_text='Instance sizes in the matrix')),
                ('constrained', models.BooleanField(default=True, help_text='Whether the input assumption is applied')),
                ('status', models.CharField(choices=[('running', 'Running'), ('completed', 'Completed'), ('failed', 'Failed')], default='running', max_length=20)),
                ('table_text', models.TextField(blank=True, default='', help_text='Rendered results table')),
                ('error_message', models.TextField(blank=True, default='')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'verbose_name': 'Matrix Run',
                'verbose_name_plural': 'Matrix Runs',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='VerificationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('circuit_name', models.CharField(help_text='Circuit file or benchmark instance name', max_length=255)),
                ('family', models.CharField(blank=True, default='', max_length=50)),
                ('size', models.PositiveIntegerField(blank=True, null=True)),
                ('configuration', models.CharField(help_text='Configuration name, e.g. sym+maximal', max_length=30)),
                ('symmetry', models.BooleanField(default=False)),
                ('predicate_mode', models.CharField(choices=[('none', 'None'), ('aon', 'All-or-nothing'), ('maximal', 'Maximal'), ('maximum', 'Maximum')], default='none', max_length=20)),
                ('verdict', models.CharField(choices=[('safe', 'Safe'), ('unsafe', 'Unsafe'), ('unknown', 'Unknown')], max_length=20)),
                ('proof_bound', models.IntegerField(default=0)),
                ('frames_used', models.IntegerField(default=0)),
                ('block_calls', models.IntegerField(default=0)),
                ('clauses_learned', models.IntegerField(default=0)),
                ('wall_time_s', models.FloatField(default=0.0)),
                ('stats', models.JSONField(default=dict, help_text='All engine counters')),
                ('validated', models.BooleanField(blank=True, help_text='Certificate passed (safe) or witness replayed (unsafe); null when not checked', null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('matrix_run', models.ForeignKey(blank=True, help_text='Matrix this run belongs to (if any)', null=True, on_delete=django.db.models.deletion.CASCADE, related_name='verification_runs', to='verifier.matrixrun')),
            ],
            options={
                'verbose_name': 'Verification Run',
                'verbose_name_plural': 'Verification Runs',
                'ordering': ['-created_at'],
            },
        ),
    ]
