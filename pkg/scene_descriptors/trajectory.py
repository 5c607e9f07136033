# -*- coding: utf-8 -*-
import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import constants
from .exceptions import ConfigurationError, DatasetError, FormatError
from .settings import SCENE_TAU_D_ACC, SCENE_TAU_THETA_ACC_DEG

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PoseRecord:
    frame_index: int
    x: float
    y: float
    yaw: float
    timestamp: float = 0.0


@dataclass
class SamplerConfig:
    tau_d_acc: float = SCENE_TAU_D_ACC
    tau_theta_acc: float = math.radians(SCENE_TAU_THETA_ACC_DEG)

    def __post_init__(self):
        if not self.tau_d_acc > 0 or not self.tau_theta_acc > 0:
            raise ConfigurationError('Sampler thresholds must be strictly positive, got {} m and {} rad.'.format(
                self.tau_d_acc, self.tau_theta_acc))

    @classmethod
    def from_degrees(cls, tau_d_acc=SCENE_TAU_D_ACC, tau_theta_acc_deg=SCENE_TAU_THETA_ACC_DEG):
        return cls(tau_d_acc=tau_d_acc, tau_theta_acc=math.radians(tau_theta_acc_deg))


def wrap_angle(angle):
    """
    Wraps an angle (radians) into (-pi, pi]
    """
    wrapped = math.remainder(angle, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def _reached(accumulated, threshold):
    # Relative slack on accumulated sums
    return accumulated >= threshold or math.isclose(accumulated, threshold, rel_tol=1e-9)


def adaptive_subsample(poses, config=None):
    """
    Sequential adaptive sampling. The first pose is always kept; walking forward, the travelled distance and the
      absolute heading change since the last kept pose are accumulated, and a pose is kept (resetting both
      accumulators) as soon as either accumulator reaches its threshold.

    :param list poses: PoseRecords ordered by frame_index
    :param SamplerConfig config:
    :return list: selected frame indices, increasing
    """
    config = config or SamplerConfig()
    poses = list(poses)
    if not poses:
        raise DatasetError('adaptive_subsample: no poses given.')
    for previous, current in zip(poses, poses[1:]):
        if current.frame_index <= previous.frame_index:
            raise DatasetError('adaptive_subsample: frame indices must strictly increase ({} then {}).'.format(
                previous.frame_index, current.frame_index))

    selected = [poses[0].frame_index]
    distance = 0.0
    rotation = 0.0
    for previous, current in zip(poses, poses[1:]):
        distance += math.hypot(current.x - previous.x, current.y - previous.y)
        rotation += abs(wrap_angle(current.yaw - previous.yaw))
        if _reached(distance, config.tau_d_acc) or _reached(rotation, config.tau_theta_acc):
            selected.append(current.frame_index)
            distance = 0.0
            rotation = 0.0

    logger.debug('adaptive_subsample: kept {} of {} poses'.format(len(selected), len(poses)))
    return selected


def read_poses_csv(path, degrees=False):
    """
    Reads a ``frame,timestamp,x,y,yaw`` CSV

    :param str path:
    :param bool degrees: Whether the yaw column is in degrees
    :return list: PoseRecords
    """
    poses = []
    with open(path, newline='', encoding='utf-8') as fh:
        reader = csv.DictReader(fh)
        missing = set(constants.POSE_CSV_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise FormatError('{}: pose CSV misses columns {}.'.format(path, ', '.join(sorted(missing))))
        for line_number, row in enumerate(reader, start=2):
            try:
                yaw = float(row['yaw'])
                poses.append(PoseRecord(frame_index=int(row['frame']), timestamp=float(row['timestamp']),
                                        x=float(row['x']), y=float(row['y']),
                                        yaw=wrap_angle(math.radians(yaw) if degrees else yaw)))
            except ValueError:
                raise FormatError('{}:{}: malformed pose row.'.format(path, line_number))
    return poses


def poses_from_arrays(x, y, yaw, frame_index=None):
    """
    Convenience constructor for synthetic trajectories
    """
    x, y, yaw = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float), np.asarray(yaw, float))
    frames = range(len(x)) if frame_index is None else frame_index
    return [PoseRecord(frame_index=int(f), x=float(a), y=float(b), yaw=float(c))
            for f, a, b, c in zip(frames, x, y, yaw)]
