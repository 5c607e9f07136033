# -*- coding: utf-8 -*-
import io
import json
import os
import shutil
import tempfile
from unittest.case import TestCase

import mock
from django.core.management import CommandError, call_command, load_command_class
from django.test import TestCase as DjangoTestCase

from scene_descriptors import settings as scene_settings, states
from scene_descriptors.descriptors import read_descriptor_set
from scene_descriptors.probe import load_probe
from scene_descriptors.vae import load_vae
from tests.tests.helpers import slow

TINY_VAE = dict(image_size=8, latent_dim=4, channel_schedule=[4, 8], max_epochs=2, patience=2, batch_size=4)


class CommandTestMixin(object):
    def setUp(self):
        self.out_dir = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.out_dir, ignore_errors=True)

    def call(self, name, **options):
        """
        Runs a management command into the temporary output directory and returns its JSON summary
        """
        stdout = io.StringIO()
        options.setdefault('out_dir', self.out_dir)
        call_command(name, stdout=stdout, **options)
        return json.loads(stdout.getvalue())

    def path(self, name):
        return os.path.join(self.out_dir, name)

    def corpus(self, n=4, size=8):
        return self.call('gen_synthetic', n=n, size=size)['manifest']

    def assert_returncode(self, returncode, name, **options):
        with self.assertRaises(CommandError) as context:
            self.call(name, **options)
        assert context.exception.returncode == returncode, context.exception


class DescriptorCommandsTest(CommandTestMixin, TestCase):
    def test_gen_synthetic(self):
        summary = self.call('gen_synthetic', n=2, size=8, manifest_name='labels.csv')

        assert summary['images'] == 6
        assert summary['manifest'] == self.path('labels.csv')
        assert len(summary['artifacts']) == 7
        assert os.path.exists(self.path('rural/rural-1/0001.ppm'))

    def test_random_desc_is_seeded(self):
        manifest = self.corpus()

        first = self.call('random_desc', manifest=manifest, dim=16, out='a.dsc1', seed=3)
        second = self.call('random_desc', manifest=manifest, dim=16, out='b.dsc1', seed=3)
        third = self.call('random_desc', manifest=manifest, dim=16, out='c.dsc1', seed=4)

        assert first['descriptors'] == 12 and first['dim'] == 16
        assert first['artifacts'][0]['sha256'] == second['artifacts'][0]['sha256']
        assert first['artifacts'][0]['sha256'] != third['artifacts'][0]['sha256']
        assert read_descriptor_set(self.path('a.dsc1')).labels[:5] == [0, 0, 0, 0, 1]

    def test_phog_and_crop(self):
        manifest = self.corpus()

        summary = self.call('phog', manifest=manifest, image_size=0, bins=8, levels=2, threads=2)
        cropped = self.call('crop_desc', descriptors=self.path('phog.dsc1'), dim=10)

        assert (summary['descriptors'], summary['dim']) == (12, 40)
        assert (cropped['dim'], cropped['input_dim']) == (10, 40)
        assert read_descriptor_set(self.path('cropped.dsc1')).source == 'phog'

    def test_sample_poses(self):
        poses = self.path('poses.csv')
        with open(poses, 'w', encoding='utf-8') as fh:
            fh.write('frame,timestamp,x,y,yaw\n')
            for frame in range(21):
                fh.write('{},{},{},0,0\n'.format(frame, frame * 0.1, frame))

        summary = self.call('sample_poses', poses=poses)

        assert summary['indices'] == [0, 5, 10, 15, 20]
        with open(self.path('keyframes.json'), encoding='utf-8') as fh:
            assert json.load(fh)['count'] == 5

    def test_bench(self):
        manifest = self.corpus()

        summary = self.call('bench', kind='random', manifest=manifest, limit=2, reps=30, warmup=1, image_size=16)

        assert summary['reps'] == 30 and summary['images'] == 2
        assert summary['descriptor_kind'] == 'random'
        assert os.path.exists(self.path('bench_random.json'))

    def test_usage_errors(self):
        manifest = self.corpus()

        self.assert_returncode(2, 'bench', kind='random', manifest=manifest, reps=29)
        self.assert_returncode(2, 'bench', kind='vae', manifest=manifest)
        self.assert_returncode(2, 'phog', manifest=manifest, orientation_range=90)
        self.assert_returncode(2, 'random_desc', manifest=manifest, threads=0)
        self.assert_returncode(2, 'sample_poses', poses=manifest, tau_d=0.0)
        self.assert_returncode(2, 'gen_synthetic', n=0)

    def test_runtime_errors(self):
        self.assert_returncode(1, 'phog', manifest=self.path('missing.csv'))
        with open(self.path('broken.dsc1'), 'wb') as fh:
            fh.write(b'DSC9')
        self.assert_returncode(1, 'crop_desc', descriptors=self.path('broken.dsc1'))

    def test_help_lists_defaults(self):
        expected = {
            'train_vae': ['(default: 0.005)', '(default: 100)', '(default: 128)', '(default: 500)'],
            'phog': ['(default: 60)', '(default: 3)', '(default: 360)'],
            'sample_poses': ['(default: 5.0)', '(default: 15.0)'],
            'train_probe': ['(default: 0.01)', '(default: 3)'],
        }
        for name, fragments in expected.items():
            command = load_command_class('scene_descriptors', name)
            text = ' '.join(command.create_parser('manage.py', name).format_help().split())
            for fragment in fragments:
                assert fragment in text, (name, fragment)


class PipelineTest(CommandTestMixin, TestCase):
    def test_vae_to_report(self):
        manifest = self.corpus()

        trained = self.call('train_vae', manifest=manifest, reconstructions=2, **TINY_VAE)
        encoded = self.call('encode', model=self.path('vae.ckpt'), manifest=manifest, threads=2)
        probe = self.call('train_probe', descriptors=self.path('vae.dsc1'), epochs=5)
        report = self.call('eval', probe=self.path('probe.ckpt'), descriptors=self.path('vae.dsc1'),
                           split=self.path('split.json'), per_route=True, name='VAE')

        assert 1 <= trained['epochs_run'] <= 2
        assert trained['images'] == 6
        assert trained['run'] is None
        assert {artifact['name'] for artifact in trained['artifacts']} == {
            'vae.ckpt', 'vae.ckpt.history.json', 'vae.ckpt.reconstructions.png'}
        assert load_vae(self.path('vae.ckpt')).config.latent_dim == 4

        assert (encoded['descriptors'], encoded['dim']) == (12, 4)

        # Six routes of two images: one of each goes to training
        assert (probe['train'], probe['test']) == (6, 6)
        assert load_probe(self.path('probe.ckpt')).dim == 4

        assert report['n'] == 6
        assert len(report['routes']) == 6
        assert report['table'].splitlines()[2].startswith('VAE')
        assert os.path.exists(self.path('report.json.txt'))

    def test_eval_with_bench(self):
        manifest = self.corpus()
        self.call('random_desc', manifest=manifest, dim=8)
        self.call('train_probe', descriptors=self.path('random.dsc1'), epochs=3, train_total=7)
        self.call('bench', kind='random', manifest=manifest, limit=1, reps=30, warmup=0, dim=8)

        report = self.call('eval', probe=self.path('probe.ckpt'), descriptors=self.path('random.dsc1'),
                           bench=self.path('bench_random.json'))

        assert report['n'] == 12
        assert '±' in report['table']
        assert 'Trivial' in report['table']

    def test_traverse_latent(self):
        manifest = self.corpus()
        self.call('train_vae', manifest=manifest, reconstructions=0, **TINY_VAE)

        summary = self.call('traverse_latent', model=self.path('vae.ckpt'), manifest=manifest, index=3, dim=1,
                            values=[-1.0, 0.0, 1.0])

        assert summary['values'] == [-1.0, 0.0, 1.0]
        assert len(summary['z']) == 4
        assert summary['artifacts'][0]['name'] == 'traverse.png'
        self.assert_returncode(2, 'traverse_latent', model=self.path('vae.ckpt'))
        self.assert_returncode(2, 'traverse_latent', model=self.path('vae.ckpt'), manifest=manifest, index=99)

    def test_train_vae_is_seeded(self):
        manifest = self.corpus()

        first = self.call('train_vae', manifest=manifest, out='a.ckpt', reconstructions=0, **TINY_VAE)
        second = self.call('train_vae', manifest=manifest, out='b.ckpt', reconstructions=0, **TINY_VAE)

        assert first['artifacts'][0]['sha256'] == second['artifacts'][0]['sha256']
        assert first['history'] == second['history']

    def test_train_vae_partition(self):
        manifest = self.corpus()
        self.call('random_desc', manifest=manifest, dim=8)
        self.call('train_probe', descriptors=self.path('random.dsc1'), epochs=3)

        default = self.call('train_vae', manifest=manifest, out='a.ckpt', reconstructions=0, **TINY_VAE)
        from_file = self.call('train_vae', manifest=manifest, out='b.ckpt', split=self.path('split.json'),
                              reconstructions=0, **TINY_VAE)
        everything = self.call('train_vae', manifest=manifest, out='c.ckpt', all_images=True, reconstructions=0,
                               **TINY_VAE)

        # Same seed: the default partition is the one train_probe wrote
        assert default['images'] == from_file['images'] == 6
        assert default['artifacts'][0]['sha256'] == from_file['artifacts'][0]['sha256']
        assert everything['images'] == 12

    def test_invalid_training_options(self):
        manifest = self.corpus()

        self.assert_returncode(2, 'train_vae', manifest=manifest, **dict(TINY_VAE, patience=5))
        self.assert_returncode(2, 'train_vae', manifest=manifest, **dict(TINY_VAE, learning_rate=0.0))
        self.assert_returncode(2, 'train_vae', manifest=manifest, **dict(TINY_VAE, variant='beta'))


class RecordedRunTest(CommandTestMixin, DjangoTestCase):
    def test_probe_run_is_recorded(self):
        manifest = self.corpus()
        self.call('random_desc', manifest=manifest, dim=8)

        with mock.patch.object(scene_settings, 'SCENE_RECORD_RUNS', True):
            summary = self.call('train_probe', descriptors=self.path('random.dsc1'), epochs=3)

        assert summary['run']['state'] == states.DONE
        assert summary['run']['kind'] == 'probe'
        assert summary['run']['epochs_run'] == 3
        assert summary['run']['checkpoint_path'] == self.path('probe.ckpt')


class EndToEndTest(CommandTestMixin, TestCase):
    """
    150 synthetic images per class at 64x64, 300 for training and 150 for testing
    """
    def setUp(self):
        super(EndToEndTest, self).setUp()
        self.manifest = self.call('gen_synthetic', n=150, size=64, seed=7)['manifest']

    def accuracy(self, name):
        probe = self.call('train_probe', descriptors=self.path(name + '.dsc1'), out=name + '.probe',
                          split_out=name + '.split.json', seed=7, train_total=300)
        assert (probe['train'], probe['test']) == (300, 150)
        return self.call('eval', probe=self.path(name + '.probe'), descriptors=self.path(name + '.dsc1'),
                         split=self.path(name + '.split.json'))['accuracy']

    def test_phog_benchmark(self):
        self.call('phog', manifest=self.manifest, image_size=0)

        accuracy = self.accuracy('phog')

        assert accuracy >= 80.0, accuracy

    @slow
    def test_vae_benchmark(self):
        trained = self.call('train_vae', manifest=self.manifest, seed=7, train_total=300, max_epochs=8, patience=8,
                            reconstructions=0)
        encoded = self.call('encode', model=self.path('vae.ckpt'), manifest=self.manifest)

        accuracy = self.accuracy('vae')

        assert trained['images'] == 300
        assert (encoded['descriptors'], encoded['dim']) == (450, 128)
        assert accuracy >= 90.0, accuracy
