# -*- coding: utf-8 -*-
from django.dispatch import Signal

# Sent with "run" (optional TrainingRun) and "config"
training_started = Signal()
# Sent with "run" and "record" (an EpochRecord)
epoch_finished = Signal()
# Sent with "run" and "result" (a TrainingResult)
training_finished = Signal()
# Sent with "run" and "error"
training_failed = Signal()
# Sent with "artifact"
artifact_saved = Signal()
