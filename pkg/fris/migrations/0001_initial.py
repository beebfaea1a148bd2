# Generated by Django 4.2.16 on 2026-10-18 09:12

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SweepRun',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('preset', models.CharField(blank=True, max_length=16)),
                ('sweep_variable', models.CharField(max_length=16)),
                ('config', models.JSONField(default=dict)),
                ('base_seed', models.BigIntegerField(default=0)),
                ('trials', models.PositiveIntegerField(default=1)),
                ('status', models.IntegerField(choices=[(10, 'New'), (20, 'Running'), (30, 'Done'), (40, 'Failed')], default=10)),
                ('message', models.TextField(blank=True)),
                ('date_updated', models.DateTimeField(auto_now=True)),
                ('date_added', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Sweep run',
                'verbose_name_plural': 'Sweep runs',
                'ordering': ('-date_added',),
            },
        ),
        migrations.CreateModel(
            name='TrialResult',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('sweep_value', models.FloatField()),
                ('trial', models.PositiveIntegerField()),
                ('scheme', models.CharField(max_length=32)),
                ('secrecy_rate', models.FloatField()),
                ('objective_ratio', models.FloatField()),
                ('ao_iters', models.PositiveIntegerField(default=1)),
                ('wall_ms', models.FloatField(default=0.0)),
                ('seed', models.BigIntegerField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='fris.sweeprun')),
            ],
            options={
                'verbose_name': 'Trial result',
                'verbose_name_plural': 'Trial results',
                'ordering': ('run', 'sweep_value', 'trial', 'scheme'),
            },
        ),
        migrations.AddConstraint(
            model_name='trialresult',
            constraint=models.UniqueConstraint(fields=('run', 'sweep_value', 'trial', 'scheme'), name='unique_trial_result'),
        ),
    ]
