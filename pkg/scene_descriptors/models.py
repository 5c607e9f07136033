# -*- coding: utf-8 -*-
import collections
import uuid

from django.core.exceptions import ImproperlyConfigured, ValidationError
from django.db import models
from django.utils.translation import gettext_lazy as _
from django_fsm import FSMField, transition
from jsonfield import JSONField

from scene_descriptors import constants
from scene_descriptors import states


class AbstractTrainingRun(models.Model):
    """
    Abstract model recording one VAE or probe training session
    """
    KIND_CHOICES = (
        (constants.RUN_KIND_VAE, _('VAE')),
        (constants.RUN_KIND_PROBE, _('Linear probe')),
    )

    guid = models.UUIDField(_('GUID'), default=uuid.uuid4, unique=True)

    kind = models.CharField(max_length=16, choices=KIND_CHOICES, default=constants.RUN_KIND_VAE)

    state = FSMField(default=states.INITIAL)

    seed = models.BigIntegerField(default=0)

    config = JSONField(default=dict, load_kwargs={'object_pairs_hook': collections.OrderedDict})
    history = JSONField(default=list)

    epochs_run = models.PositiveIntegerField(default=0)
    best_epoch = models.PositiveIntegerField(null=True, blank=True)
    best_validation_loss = models.FloatField(null=True, blank=True)

    checkpoint_path = models.CharField(max_length=4096, blank=True)

    error = models.TextField(blank=True)

    created = models.DateTimeField(auto_now_add=True)
    modified = models.DateTimeField(auto_now=True)

    class Meta:
        abstract = True

    def __str__(self):
        return '{} run {} ({})'.format(self.kind, self.guid, self.state)

    def clean_fields(self, exclude=None):
        super(AbstractTrainingRun, self).clean_fields(exclude=exclude)
        if self.best_epoch is not None and self.best_epoch > self.epochs_run:
            raise ValidationError(_('best_epoch cannot exceed epochs_run.'))

    def add_epoch(self, record):
        """
        Appends one epoch record (a dict) to the history
        """
        self.history = list(self.history or []) + [record]
        self.epochs_run = len(self.history)

    def has_history(self):
        return bool(self.history)

    @transition(field=state, source=states.INITIAL, target=states.TRAINING)
    def start(self):
        """
        State transition to indicate that the optimizer has started
        """

    @transition(field=state, source=states.TRAINING, target=states.DONE)
    def finish(self):
        """
        State transition to indicate that training ran until its epoch cap
        """

    @transition(field=state, source=states.TRAINING, target=states.STOPPED_EARLY, conditions=[has_history])
    def stop_early(self):
        """
        State transition to indicate that the validation loss stopped improving for ``patience`` epochs
        """

    @transition(field=state, source=[states.INITIAL, states.TRAINING], target=states.FAILED)
    def fail(self, error=''):
        self.error = str(error)


class TrainingRun(AbstractTrainingRun):
    """
    Default TrainingRun model
    """


def get_training_run_model():
    """
    Returns the TrainingRun model that is active in this project.
    """
    from django.apps import apps as django_apps
    from .settings import SCENE_TRAINING_RUN_MODEL
    try:
        return django_apps.get_model(SCENE_TRAINING_RUN_MODEL)
    except ValueError:
        raise ImproperlyConfigured('TRAINING_RUN_MODEL must be of the form \'app_label.model_name\'')
    except LookupError:
        raise ImproperlyConfigured(
            'TRAINING_RUN_MODEL refers to model \'%s\' that has not been installed' % SCENE_TRAINING_RUN_MODEL)
