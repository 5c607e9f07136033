# -*- coding: utf-8 -*-
import os

from django.conf import settings as django_settings

# Retrieve root settings dict
SCENE_DESCRIPTORS = getattr(django_settings, 'SCENE_DESCRIPTORS', {})


# Retrieve settings
SCENE_TRAINING_RUN_MODEL = SCENE_DESCRIPTORS.get('TRAINING_RUN_MODEL', 'scene_descriptors.TrainingRun')
SCENE_RECORD_RUNS = SCENE_DESCRIPTORS.get('RECORD_RUNS', False)
SCENE_ARTIFACT_STORE_CLASS = \
    SCENE_DESCRIPTORS.get('ARTIFACT_STORE_CLASS', 'scene_descriptors.storage.DefaultArtifactStore')
SCENE_OUT_DIR = SCENE_DESCRIPTORS.get(
    'OUT_DIR', os.path.join(getattr(django_settings, 'BASE_DIR', os.getcwd()), 'artifacts'))

# Model
SCENE_IMAGE_SIZE = SCENE_DESCRIPTORS.get('IMAGE_SIZE', 64)
SCENE_LATENT_DIM = SCENE_DESCRIPTORS.get('LATENT_DIM', 128)
SCENE_CHANNEL_SCHEDULE = tuple(SCENE_DESCRIPTORS.get('CHANNEL_SCHEDULE', (32, 64, 128, 256, 512)))
SCENE_VARIANT = SCENE_DESCRIPTORS.get('VARIANT', 'dip')
SCENE_LAMBDA_OD = SCENE_DESCRIPTORS.get('LAMBDA_OD', 5.0)
SCENE_LAMBDA_D = SCENE_DESCRIPTORS.get('LAMBDA_D', 50.0)
SCENE_RECON_WEIGHT = SCENE_DESCRIPTORS.get('RECON_WEIGHT', 1.0)
SCENE_LEAKY_RELU_SLOPE = SCENE_DESCRIPTORS.get('LEAKY_RELU_SLOPE', 0.01)
SCENE_MC_SAMPLES = SCENE_DESCRIPTORS.get('MC_SAMPLES', 1)

# Training
SCENE_LEARNING_RATE = SCENE_DESCRIPTORS.get('LEARNING_RATE', 0.005)
SCENE_MAX_EPOCHS = SCENE_DESCRIPTORS.get('MAX_EPOCHS', 500)
SCENE_PATIENCE = SCENE_DESCRIPTORS.get('PATIENCE', 100)
SCENE_BATCH_SIZE = SCENE_DESCRIPTORS.get('BATCH_SIZE', 64)
SCENE_VALIDATION_FRACTION = SCENE_DESCRIPTORS.get('VALIDATION_FRACTION', 0.1)
SCENE_ADAM_BETA1 = SCENE_DESCRIPTORS.get('ADAM_BETA1', 0.9)
SCENE_ADAM_BETA2 = SCENE_DESCRIPTORS.get('ADAM_BETA2', 0.999)
SCENE_ADAM_EPSILON = SCENE_DESCRIPTORS.get('ADAM_EPSILON', 1e-8)

# Handcrafted descriptors
SCENE_PHOG_BINS = SCENE_DESCRIPTORS.get('PHOG_BINS', 60)
SCENE_PHOG_LEVELS = SCENE_DESCRIPTORS.get('PHOG_LEVELS', 3)
SCENE_PHOG_ORIENTATION_RANGE = SCENE_DESCRIPTORS.get('PHOG_ORIENTATION_RANGE', 360)

# Pose sampler
SCENE_TAU_D_ACC = SCENE_DESCRIPTORS.get('TAU_D_ACC', 5.0)  # in meters
SCENE_TAU_THETA_ACC_DEG = SCENE_DESCRIPTORS.get('TAU_THETA_ACC_DEG', 15.0)  # in degrees

# Linear probe
SCENE_PROBE_EPOCHS = SCENE_DESCRIPTORS.get('PROBE_EPOCHS', 100)
SCENE_PROBE_LEARNING_RATE = SCENE_DESCRIPTORS.get('PROBE_LEARNING_RATE', 0.01)
SCENE_PROBE_HIDDEN = SCENE_DESCRIPTORS.get('PROBE_HIDDEN', 3)

# Evaluation
SCENE_BENCH_REPS = SCENE_DESCRIPTORS.get('BENCH_REPS', 30)
SCENE_BENCH_WARMUP = SCENE_DESCRIPTORS.get('BENCH_WARMUP', 10)
SCENE_BENCH_IMAGE_SIZE = SCENE_DESCRIPTORS.get('BENCH_IMAGE_SIZE', 128)
SCENE_PASS_BAR = SCENE_DESCRIPTORS.get('PASS_BAR', 75.0)  # in percent
SCENE_VIDEO_SKIP_FRAMES = SCENE_DESCRIPTORS.get('VIDEO_SKIP_FRAMES', 900)
SCENE_VIDEO_TRAIN_FRACTION = SCENE_DESCRIPTORS.get('VIDEO_TRAIN_FRACTION', 0.2)
