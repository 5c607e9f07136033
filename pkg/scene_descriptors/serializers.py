# -*- coding: utf-8 -*-
from rest_framework import serializers

from scene_descriptors import constants
from scene_descriptors import settings as scene_settings
from scene_descriptors.descriptors import PhogConfig
from scene_descriptors.evaluation import MIN_REPS, BenchConfig
from scene_descriptors.exceptions import ConfigurationError
from scene_descriptors.models import get_training_run_model
from scene_descriptors.probe import ProbeConfig
from scene_descriptors.trajectory import SamplerConfig
from scene_descriptors.vae import TrainConfig, VaeConfig


class ConfigSerializer(serializers.Serializer):
    """
    Validates a flat dict of options and builds the configuration object named by ``config_class`` on ``save()``
    """
    config_class = None

    def build_kwargs(self, validated_data):
        return dict(validated_data)

    def create(self, validated_data):
        try:
            return self.config_class(**self.build_kwargs(validated_data))
        except ConfigurationError as e:
            raise serializers.ValidationError({'non_field_errors': [str(e)]})

    def update(self, instance, validated_data):
        raise NotImplementedError('Configurations are immutable.')


class VaeConfigSerializer(ConfigSerializer):
    config_class = VaeConfig

    image_size = serializers.IntegerField(min_value=2, default=scene_settings.SCENE_IMAGE_SIZE)
    latent_dim = serializers.IntegerField(min_value=1, default=scene_settings.SCENE_LATENT_DIM)
    channel_schedule = serializers.ListField(child=serializers.IntegerField(min_value=1), allow_empty=False,
                                             default=list(scene_settings.SCENE_CHANNEL_SCHEDULE))
    variant = serializers.ChoiceField(choices=constants.VARIANTS, default=scene_settings.SCENE_VARIANT)
    lambda_d = serializers.FloatField(min_value=0.0, default=scene_settings.SCENE_LAMBDA_D)
    lambda_od = serializers.FloatField(min_value=0.0, default=scene_settings.SCENE_LAMBDA_OD)
    recon_weight = serializers.FloatField(default=scene_settings.SCENE_RECON_WEIGHT)
    slope = serializers.FloatField(min_value=0.0, default=scene_settings.SCENE_LEAKY_RELU_SLOPE)
    mc_samples = serializers.IntegerField(min_value=1, default=scene_settings.SCENE_MC_SAMPLES)


class TrainConfigSerializer(ConfigSerializer):
    config_class = TrainConfig

    learning_rate = serializers.FloatField(default=scene_settings.SCENE_LEARNING_RATE)
    max_epochs = serializers.IntegerField(min_value=1, default=scene_settings.SCENE_MAX_EPOCHS)
    patience = serializers.IntegerField(min_value=1, default=scene_settings.SCENE_PATIENCE)
    batch_size = serializers.IntegerField(min_value=2, default=scene_settings.SCENE_BATCH_SIZE)
    seed = serializers.IntegerField(min_value=0, default=0)
    beta1 = serializers.FloatField(min_value=0.0, max_value=1.0, default=scene_settings.SCENE_ADAM_BETA1)
    beta2 = serializers.FloatField(min_value=0.0, max_value=1.0, default=scene_settings.SCENE_ADAM_BETA2)
    epsilon = serializers.FloatField(default=scene_settings.SCENE_ADAM_EPSILON)
    validation_fraction = serializers.FloatField(default=scene_settings.SCENE_VALIDATION_FRACTION)

    def validate_learning_rate(self, value):
        if value <= 0:
            raise serializers.ValidationError('learning_rate must be positive.')
        return value

    def validate(self, attrs):
        if attrs['patience'] > attrs['max_epochs']:
            raise serializers.ValidationError({'patience': ['patience cannot exceed max_epochs.']})
        return attrs


class PhogConfigSerializer(ConfigSerializer):
    config_class = PhogConfig

    bins = serializers.IntegerField(min_value=1, default=scene_settings.SCENE_PHOG_BINS)
    levels = serializers.IntegerField(min_value=1, default=scene_settings.SCENE_PHOG_LEVELS)
    orientation_range = serializers.ChoiceField(choices=(180, 360), default=scene_settings.SCENE_PHOG_ORIENTATION_RANGE)


class SamplerConfigSerializer(ConfigSerializer):
    config_class = SamplerConfig

    tau_d = serializers.FloatField(default=scene_settings.SCENE_TAU_D_ACC)
    tau_theta_deg = serializers.FloatField(default=scene_settings.SCENE_TAU_THETA_ACC_DEG)

    def validate(self, attrs):
        if attrs['tau_d'] <= 0 or attrs['tau_theta_deg'] <= 0:
            raise serializers.ValidationError('Sampler thresholds must be strictly positive.')
        return attrs

    def create(self, validated_data):
        try:
            return SamplerConfig.from_degrees(validated_data['tau_d'], validated_data['tau_theta_deg'])
        except ConfigurationError as e:
            raise serializers.ValidationError({'non_field_errors': [str(e)]})


class ProbeConfigSerializer(ConfigSerializer):
    config_class = ProbeConfig

    epochs = serializers.IntegerField(min_value=1, default=scene_settings.SCENE_PROBE_EPOCHS)
    learning_rate = serializers.FloatField(default=scene_settings.SCENE_PROBE_LEARNING_RATE)
    hidden = serializers.IntegerField(min_value=1, default=scene_settings.SCENE_PROBE_HIDDEN)
    seed = serializers.IntegerField(min_value=0, default=0)


class BenchConfigSerializer(ConfigSerializer):
    config_class = BenchConfig

    reps = serializers.IntegerField(min_value=MIN_REPS, default=scene_settings.SCENE_BENCH_REPS)
    warmup = serializers.IntegerField(min_value=0, default=scene_settings.SCENE_BENCH_WARMUP)
    image_size = serializers.IntegerField(min_value=8, default=scene_settings.SCENE_BENCH_IMAGE_SIZE)
    median_of_means = serializers.BooleanField(default=False)


class TrainingRunSerializer(serializers.ModelSerializer):
    config = serializers.JSONField(read_only=True)
    history = serializers.JSONField(read_only=True)

    class Meta:
        model = get_training_run_model()
        fields = '__all__'
