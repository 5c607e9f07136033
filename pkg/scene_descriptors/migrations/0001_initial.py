# -*- coding: utf-8 -*-
import collections
import uuid

from django.db import migrations, models
import django_fsm
import jsonfield.fields


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='TrainingRun',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('guid', models.UUIDField(default=uuid.uuid4, unique=True, verbose_name='GUID')),
                ('kind', models.CharField(choices=[('vae', 'VAE'), ('probe', 'Linear probe')], default='vae',
                                          max_length=16)),
                ('state', django_fsm.FSMField(default='initial', max_length=50)),
                ('seed', models.BigIntegerField(default=0)),
                ('config', jsonfield.fields.JSONField(default=dict,
                                                      load_kwargs={'object_pairs_hook': collections.OrderedDict})),
                ('history', jsonfield.fields.JSONField(default=list)),
                ('epochs_run', models.PositiveIntegerField(default=0)),
                ('best_epoch', models.PositiveIntegerField(blank=True, null=True)),
                ('best_validation_loss', models.FloatField(blank=True, null=True)),
                ('checkpoint_path', models.CharField(blank=True, max_length=4096)),
                ('error', models.TextField(blank=True)),
                ('created', models.DateTimeField(auto_now_add=True)),
                ('modified', models.DateTimeField(auto_now=True)),
            ],
            options={
                'abstract': False,
            },
        ),
    ]
