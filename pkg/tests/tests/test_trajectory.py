# -*- coding: utf-8 -*-
import math
import os
import tempfile
from unittest.case import TestCase

from scene_descriptors.exceptions import ConfigurationError, DatasetError, FormatError
from scene_descriptors.trajectory import PoseRecord, SamplerConfig, adaptive_subsample, poses_from_arrays, \
    read_poses_csv, wrap_angle


class WrapAngleTest(TestCase):
    def test_range(self):
        assert wrap_angle(-math.pi) == math.pi
        assert abs(wrap_angle(3 * math.pi) - math.pi) < 1e-12
        assert abs(wrap_angle(math.radians(350)) - math.radians(-10)) < 1e-12
        assert wrap_angle(0.5) == 0.5


class AdaptiveSubsampleTest(TestCase):
    def test_single_pose(self):
        assert adaptive_subsample([PoseRecord(frame_index=7, x=1.0, y=2.0, yaw=0.3)]) == [7]

    def test_straight_line(self):
        poses = poses_from_arrays(x=range(21), y=0.0, yaw=0.0)

        assert adaptive_subsample(poses, SamplerConfig.from_degrees(5.0, 15.0)) == [0, 5, 10, 15, 20]

    def test_rotation_in_place(self):
        poses = poses_from_arrays(x=0.0, y=0.0, yaw=[math.radians(5 * step) for step in range(10)])

        assert adaptive_subsample(poses, SamplerConfig.from_degrees(5.0, 15.0)) == [0, 3, 6, 9]

    def test_translation_invariance(self):
        x = [0.0, 1.5, 3.5, 4.0, 7.0, 7.5, 9.0, 12.5]
        y = [0.0, 0.5, 1.0, 3.0, 3.5, 6.0, 7.0, 7.5]
        yaw = [0.0, 0.1, 0.3, 0.2, -0.1, 0.4, 0.6, 0.2]
        config = SamplerConfig.from_degrees(3.0, 20.0)

        expected = adaptive_subsample(poses_from_arrays(x, y, yaw), config)
        shifted = poses_from_arrays([value + 1000.0 for value in x], [value - 250.0 for value in y], yaw)

        assert adaptive_subsample(shifted, config) == expected
        assert expected[0] == 0
        assert expected == sorted(set(expected))

    def test_heading_seam(self):
        yaw = [math.radians(value) for value in (170.0, 178.0, -178.0, -170.0)]
        poses = poses_from_arrays(x=0.0, y=0.0, yaw=yaw)

        # Crossing +-180 degrees accumulates 4 degrees, not 356
        assert adaptive_subsample(poses, SamplerConfig.from_degrees(5.0, 15.0)) == [0, 3]

    def test_larger_threshold_is_not_a_subset(self):
        poses = poses_from_arrays(x=range(7), y=0.0, yaw=0.0)

        coarse = adaptive_subsample(poses, SamplerConfig.from_degrees(3.0, 90.0))
        fine = adaptive_subsample(poses, SamplerConfig.from_degrees(2.0, 90.0))

        assert coarse == [0, 3, 6]
        assert fine == [0, 2, 4, 6]
        assert not set(coarse) <= set(fine)

    def test_invalid_input(self):
        with self.assertRaises(DatasetError):
            adaptive_subsample([])
        with self.assertRaises(DatasetError):
            adaptive_subsample(poses_from_arrays(x=[0.0, 1.0], y=0.0, yaw=0.0, frame_index=[3, 3]))
        with self.assertRaises(ConfigurationError):
            SamplerConfig(tau_d_acc=0.0)
        with self.assertRaises(ConfigurationError):
            SamplerConfig.from_degrees(5.0, -1.0)


class PoseCsvTest(TestCase):
    def write(self, directory, text):
        path = os.path.join(directory, 'poses.csv')
        with open(path, 'w', encoding='utf-8') as fh:
            fh.write(text)
        return path

    def test_degrees(self):
        with tempfile.TemporaryDirectory() as directory:
            path = self.write(directory, 'frame,timestamp,x,y,yaw\n0,0.0,0,0,90\n1,0.1,1,0,270\n')
            poses = read_poses_csv(path, degrees=True)

        assert [pose.frame_index for pose in poses] == [0, 1]
        assert abs(poses[0].yaw - math.pi / 2) < 1e-12
        assert abs(poses[1].yaw + math.pi / 2) < 1e-12
        assert poses[1].timestamp == 0.1

    def test_malformed(self):
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(FormatError):
                read_poses_csv(self.write(directory, 'frame,x,y\n0,0,0\n'))
            with self.assertRaises(FormatError):
                read_poses_csv(self.write(directory, 'frame,timestamp,x,y,yaw\n0,0.0,north,0,0\n'))
