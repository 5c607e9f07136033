# -*- coding: utf-8 -*-
INITIAL = 'initial'
TRAINING = 'training'
STOPPED_EARLY = 'stopped_early'
DONE = 'done'
FAILED = 'failed'
