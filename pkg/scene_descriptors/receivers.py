# -*- coding: utf-8 -*-
import logging

from django.dispatch import receiver

from scene_descriptors.signals import artifact_saved, epoch_finished, training_failed, training_finished, \
    training_started

logger = logging.getLogger(__name__)


@receiver(training_started)
def on_training_started(sender, run=None, config=None, **kwargs):
    logger.debug('on_training_started: {} {}'.format(sender.__name__, run))
    if run is None:
        return
    run.config = config or {}
    run.start()
    run.save()


@receiver(epoch_finished)
def on_epoch_finished(sender, record, run=None, **kwargs):
    logger.debug('on_epoch_finished: {} epoch {}'.format(sender.__name__, record.epoch))
    if run is None:
        return
    run.add_epoch(record.to_dict())
    run.save()


@receiver(training_finished)
def on_training_finished(sender, result, run=None, **kwargs):
    logger.info('on_training_finished: {} {}'.format(sender.__name__, run or ''))
    if run is None:
        return
    if not run.has_history():
        # Probe training reports its loss curve only once, at the end
        for epoch, loss in enumerate(getattr(result, 'history', []), start=1):
            run.add_epoch({'epoch': epoch, 'train_loss': loss})
    run.best_epoch = getattr(result, 'best_epoch', None)
    run.best_validation_loss = getattr(result, 'best_validation_loss', None)
    if getattr(result, 'stopped_early', False):
        run.stop_early()
    else:
        run.finish()
    run.save()


@receiver(training_failed)
def on_training_failed(sender, error, run=None, **kwargs):
    logger.warning('on_training_failed: {} {}'.format(sender.__name__, error))
    if run is None:
        return
    run.fail(error)
    run.save()


@receiver(artifact_saved)
def on_artifact_saved(sender, artifact, **kwargs):
    logger.debug('on_artifact_saved: {} ({} bytes, sha256 {})'.format(artifact.path, artifact.size, artifact.sha256))
