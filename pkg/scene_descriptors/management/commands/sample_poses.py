# -*- coding: utf-8 -*-
from scene_descriptors import settings as scene_settings
from scene_descriptors.serializers import SamplerConfigSerializer
from scene_descriptors.trajectory import adaptive_subsample, read_poses_csv

from ._base import SceneCommand


class Command(SceneCommand):
    help = 'Selects keyframes of a pose trajectory by accumulated distance and heading change'

    def add_command_arguments(self, parser):
        parser.add_argument('--poses', required=True, help='CSV with the columns frame,timestamp,x,y,yaw')
        parser.add_argument('--tau-d', dest='tau_d', type=float, default=scene_settings.SCENE_TAU_D_ACC,
                            help='Accumulated distance threshold in meters (default: %(default)s)')
        parser.add_argument('--tau-theta-deg', dest='tau_theta_deg', type=float,
                            default=scene_settings.SCENE_TAU_THETA_ACC_DEG,
                            help='Accumulated heading change threshold in degrees (default: %(default)s)')
        parser.add_argument('--degrees', action='store_true', help='The yaw column is in degrees, not radians')
        parser.add_argument('--out', default='keyframes.json', help='Index list name (default: %(default)s)')

    def run(self, **options):
        config = self.build_config(SamplerConfigSerializer, options)
        poses = read_poses_csv(options['poses'], degrees=options['degrees'])
        indices = adaptive_subsample(poses, config)

        summary = {'poses': len(poses), 'count': len(indices), 'indices': indices}
        self.save_json(options['out'], summary)
        return summary
