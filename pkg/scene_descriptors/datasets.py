# -*- coding: utf-8 -*-
"""
Image decoding and resizing, label manifests and the two train / test split protocols.
"""
import csv
import io
import logging
import os
import re
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import constants
from .exceptions import DatasetError, FormatError, ShapeError
from .rng import Rng
from .settings import SCENE_VIDEO_SKIP_FRAMES, SCENE_VIDEO_TRAIN_FRACTION
from .utils import read_bytes, write_bytes_to_file

logger = logging.getLogger(__name__)

FORMAT_PPM = 'ppm'
FORMAT_PNG = 'png'
FORMAT_JPEG = 'jpeg'

IMAGE_EXTENSIONS = {
    '.ppm': FORMAT_PPM,
    '.png': FORMAT_PNG,
    '.jpg': FORMAT_JPEG,
    '.jpeg': FORMAT_JPEG,
}

# Luma weights of the grayscale conversion
LUMA = np.array([0.299, 0.587, 0.114])

_PPM_TOKEN = re.compile(br'(?:\s|#[^\n]*\n)*([^\s#]+)')


@dataclass
class ImageSample:
    id: str
    pixels: np.ndarray
    label: Optional[int] = None
    route: Optional[str] = None

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[0] != 3:
            raise ShapeError('Image "{}" must be [3, H, W], got {}.'.format(self.id, self.pixels.shape))
        if self.pixels.size and (self.pixels.min() < 0.0 or self.pixels.max() > 1.0):
            raise DatasetError('Image "{}" has pixel values outside [0, 1].'.format(self.id))
        if self.label is not None and self.label not in constants.LABELS.values():
            raise DatasetError('Image "{}" has unknown label {}.'.format(self.id, self.label))


def sniff_format(data):
    if data[:2] == b'P6':
        return FORMAT_PPM
    if data[:8] == b'\x89PNG\r\n\x1a\n':
        return FORMAT_PNG
    if data[:2] == b'\xff\xd8':
        return FORMAT_JPEG
    raise FormatError('Unrecognized image format.')


def _decode_ppm(data):
    """
    Binary PPM (P6) with maxval 255
    """
    offset = 0
    tokens = []
    for _ in range(4):
        match = _PPM_TOKEN.match(data, offset)
        if match is None:
            raise FormatError('Malformed PPM header.')
        tokens.append(match.group(1))
        offset = match.end()
    magic, width, height, maxval = tokens
    if magic != b'P6':
        raise FormatError('Not a binary PPM (magic {!r}).'.format(magic))
    try:
        width, height, maxval = int(width), int(height), int(maxval)
    except ValueError:
        raise FormatError('Malformed PPM header.')
    if width < 1 or height < 1:
        raise FormatError('PPM has a degenerate size {}x{}.'.format(width, height))
    if maxval != 255:
        raise FormatError('Only PPM files with maxval 255 are supported, got {}.'.format(maxval))
    if offset >= len(data) or not data[offset:offset + 1].isspace():
        raise FormatError('Malformed PPM header.')
    offset += 1

    expected = width * height * 3
    payload = data[offset:offset + expected]
    if len(payload) < expected:
        raise FormatError('Truncated PPM payload: expected {} bytes, got {}.'.format(expected, len(payload)))
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3)


def decode_image(data, format=None):
    """
    Decodes an 8-bit RGB image

    :param bytes data:
    :param str format: "ppm", "png" or "jpeg"; sniffed from the data when omitted
    :return numpy.ndarray: [3, H, W] float32 pixels in [0, 1]
    """
    format = format or sniff_format(data)
    if format == FORMAT_PPM:
        rgb = _decode_ppm(data)
    elif format in (FORMAT_PNG, FORMAT_JPEG):
        try:
            with Image.open(io.BytesIO(data)) as image:
                rgb = np.asarray(image.convert('RGB'))
        except (UnidentifiedImageError, OSError) as e:
            raise FormatError('Cannot decode {} image: {}'.format(format, e))
    else:
        raise FormatError('Unsupported image format "{}".'.format(format))
    return (rgb.transpose(2, 0, 1).astype(np.float32) / np.float32(255.0))


def _to_uint8(pixels):
    pixels = np.asarray(pixels)
    if pixels.ndim == 2:
        pixels = np.repeat(pixels[None], 3, axis=0)
    return np.clip(np.rint(pixels * 255.0), 0, 255).astype(np.uint8).transpose(1, 2, 0)


def encode_ppm(pixels):
    """
    :param numpy.ndarray pixels: [3, H, W] in [0, 1]
    :return bytes: binary PPM
    """
    rgb = _to_uint8(pixels)
    height, width = rgb.shape[:2]
    return 'P6\n{} {}\n255\n'.format(width, height).encode('ascii') + rgb.tobytes()


def encode_png(pixels):
    buffer = io.BytesIO()
    Image.fromarray(_to_uint8(pixels), mode='RGB').save(buffer, format='PNG')
    return buffer.getvalue()


def save_image(path, pixels):
    """
    Writes pixels as PNG, or as PPM when ``path`` ends in ".ppm"
    """
    data = encode_ppm(pixels) if path.lower().endswith('.ppm') else encode_png(pixels)
    write_bytes_to_file(path, data, makedirs=True)
    return data


def load_image(path):
    data = read_bytes(path)
    format = IMAGE_EXTENSIONS.get(os.path.splitext(path)[1].lower())
    try:
        return decode_image(data, format)
    except FormatError as e:
        raise FormatError('{}: {}'.format(path, e.detail))


def to_grayscale(pixels):
    """
    :param numpy.ndarray pixels: [3, H, W] (returned unchanged when already [H, W])
    :return numpy.ndarray: [H, W] luma
    """
    pixels = np.asarray(pixels)
    if pixels.ndim == 2:
        return pixels
    if pixels.ndim != 3 or pixels.shape[0] != 3:
        raise ShapeError('to_grayscale: expected [3, H, W], got {}.'.format(pixels.shape))
    return np.tensordot(LUMA, pixels, axes=([0], [0])).astype(pixels.dtype)


def _interpolation_axis(source, target):
    # align-corners-false: source coordinate of output pixel d is (d + 0.5) * source / target - 0.5
    coordinates = (np.arange(target) + 0.5) * (source / target) - 0.5
    coordinates = np.clip(coordinates, 0, source - 1)
    lower = np.floor(coordinates).astype(np.int64)
    upper = np.minimum(lower + 1, source - 1)
    return lower, upper, coordinates - lower


def resize_bilinear(pixels, target):
    """
    Separable bilinear resize (align-corners-false convention, edges clamped)

    :param numpy.ndarray pixels: [C, H, W] or [H, W]
    :param int|tuple target: Output side, or (height, width)
    :return numpy.ndarray:
    """
    pixels = np.asarray(pixels)
    height, width = pixels.shape[-2:]
    target_height, target_width = (target, target) if np.isscalar(target) else target
    if height < 2 or width < 2:
        raise ShapeError('resize_bilinear: source must be at least 2x2, got {}x{}.'.format(height, width))
    if target_height < 1 or target_width < 1:
        raise ShapeError('resize_bilinear: invalid target size {}x{}.'.format(target_height, target_width))
    if (height, width) == (target_height, target_width):
        return pixels.copy()

    work = pixels.astype(np.float64)
    lower, upper, weight = _interpolation_axis(height, target_height)
    a, b = work[..., lower, :], work[..., upper, :]
    work = a + weight[:, None] * (b - a)
    lower, upper, weight = _interpolation_axis(width, target_width)
    a, b = work[..., lower], work[..., upper]
    work = a + weight * (b - a)
    return np.clip(work, pixels.min(), pixels.max()).astype(pixels.dtype)


def tile_grid(tiles, columns=None):
    """
    Lays out equally sized [3, S, S] tiles row by row

    :return numpy.ndarray: [3, rows * S, columns * S]
    """
    tiles = list(tiles)
    columns = columns or len(tiles)
    blank = np.zeros_like(tiles[0])
    rows = []
    for start in range(0, len(tiles), columns):
        row = tiles[start:start + columns]
        row += [blank] * (columns - len(row))
        rows.append(np.concatenate(row, axis=2))
    return np.concatenate(rows, axis=1)


def read_manifest(path):
    """
    Reads a ``path,label,route`` CSV manifest. Paths are resolved relative to the manifest's directory.

    :return list: OrderedDicts with "id" (the path as written), "path", "label" (int or None) and "route"
    """
    base = os.path.dirname(os.path.abspath(path))
    rows = []
    with open(path, newline='', encoding='utf-8') as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or 'path' not in reader.fieldnames:
            raise FormatError('{}: manifest needs a header with a "path" column.'.format(path))
        for line_number, row in enumerate(reader, start=2):
            label = (row.get('label') or '').strip().lower()
            if label and label not in constants.LABELS:
                raise DatasetError('{}:{}: unknown label "{}".'.format(path, line_number, label))
            rows.append(OrderedDict([
                ('id', row['path']),
                ('path', os.path.join(base, row['path'])),
                ('label', constants.LABELS[label] if label else None),
                ('route', (row.get('route') or '').strip() or None),
            ]))
    return rows


def manifest_bytes(rows):
    """
    :param list rows: dicts with "path" (relative to the manifest), "label" (int, name or None) and "route"
    :return bytes: UTF-8 CSV
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(constants.MANIFEST_CSV_HEADER)
    for row in rows:
        label = row.get('label')
        if isinstance(label, int):
            label = constants.LABEL_NAMES[label]
        writer.writerow([row["path"], label or "", row.get("route") or ""])
    return buffer.getvalue().encode("utf-8")


def write_manifest(path, rows):
    write_bytes_to_file(path, manifest_bytes(rows), makedirs=True)


def ingest_folder_layout(root, manifest_path=None):
    """
    Builds manifest rows from a ``<root>/<label>/[<route>/]<image>`` folder tree. Images directly under a label
      folder get the label name as their route.

    :param str root:
    :param str manifest_path: When given, the manifest is written there (paths relative to it)
    :return list: manifest rows
    """
    rows = []
    manifest_dir = os.path.dirname(os.path.abspath(manifest_path)) if manifest_path else os.path.abspath(root)
    for label in sorted(os.listdir(root)):
        label_dir = os.path.join(root, label)
        if not os.path.isdir(label_dir) or label.lower() not in constants.LABELS:
            continue
        for dirpath, dirnames, filenames in os.walk(label_dir):
            dirnames.sort()
            relative = os.path.relpath(dirpath, label_dir)
            route = label.lower() if relative == '.' else relative.split(os.sep)[0]
            for filename in sorted(filenames):
                if os.path.splitext(filename)[1].lower() not in IMAGE_EXTENSIONS:
                    continue
                path = os.path.relpath(os.path.join(dirpath, filename), manifest_dir)
                rows.append({'path': path.replace(os.sep, '/'), 'label': constants.LABELS[label.lower()],
                             'route': route})
    if not rows:
        raise DatasetError('No labelled images found under {}.'.format(root))
    if manifest_path:
        write_manifest(manifest_path, rows)
    logger.info('ingest_folder_layout: {} images under {}'.format(len(rows), root))
    return rows


def load_samples(manifest_path, image_size=None, threads=1):
    """
    Decodes (and optionally resizes) every image of a manifest, preserving manifest order

    :return list: ImageSamples
    """
    rows = read_manifest(manifest_path)
    if not rows:
        raise DatasetError('{}: manifest lists no images.'.format(manifest_path))

    def load(row):
        pixels = load_image(row['path'])
        if image_size:
            pixels = resize_bilinear(pixels, image_size)
        return ImageSample(id=row['id'], pixels=pixels, label=row['label'], route=row['route'])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(load, rows))
    return [load(row) for row in rows]


@dataclass
class SplitSpec:
    train_ids: Tuple
    test_ids: Tuple

    def __post_init__(self):
        self.train_ids = tuple(self.train_ids)
        self.test_ids = tuple(self.test_ids)
        if set(self.train_ids) & set(self.test_ids):
            raise DatasetError('Train and test ids overlap.')

    def to_dict(self):
        return {'train_ids': list(self.train_ids), 'test_ids': list(self.test_ids)}

    @classmethod
    def from_dict(cls, data):
        return cls(train_ids=data['train_ids'], test_ids=data['test_ids'])


def _group_by_route(samples):
    routes = OrderedDict()
    for sample in samples:
        route = sample.route if hasattr(sample, 'route') else sample.get('route')
        identifier = sample.id if hasattr(sample, 'id') else sample['id']
        if not route:
            raise DatasetError('Sample "{}" has no route.'.format(identifier))
        routes.setdefault(route, []).append(identifier)
    return routes


def _round_half_up(value):
    return int((value + Fraction(1, 2)) // 1)


def _apportion(counts, total):
    """
    Largest-remainder apportionment of ``total`` proportionally to ``counts``; ties go to the earlier entry
    """
    grand_total = sum(counts)
    quotas = [Fraction(count * total, grand_total) for count in counts]
    shares = [int(quota) for quota in quotas]
    order = sorted(range(len(counts)), key=lambda index: (-(quotas[index] - shares[index]), index))
    for index in order[:total - sum(shares)]:
        shares[index] += 1
    return shares


def split_two_thirds(samples, seed, train_fraction=Fraction(2, 3), train_total=None):
    """
    Per-route random split. Each route keeps round-half-up(n * train_fraction) training images; with
      ``train_total`` the training count is instead apportioned over the routes (largest remainder) so the total is
      exact.

    :param list samples: ImageSamples (or manifest rows) carrying a route
    :param int seed:
    :param train_fraction:
    :param int train_total: Optional exact number of training images
    :return SplitSpec: ids in manifest order
    """
    routes = _group_by_route(samples)
    if not routes:
        raise DatasetError('Cannot split an empty manifest.')
    counts = [len(ids) for ids in routes.values()]
    if train_total is None:
        fraction = Fraction(str(train_fraction)) if isinstance(train_fraction, float) else Fraction(train_fraction)
        shares = [_round_half_up(count * fraction) for count in counts]
    else:
        if not 0 <= train_total <= sum(counts):
            raise DatasetError('train_total {} outside [0, {}].'.format(train_total, sum(counts)))
        shares = _apportion(counts, train_total)

    rng = Rng(seed).spawn('split')
    train = set()
    for (route, ids), share in zip(routes.items(), shares):
        order = rng.spawn(route).permutation(len(ids))
        train.update(ids[index] for index in order[:share])
        logger.debug('split_two_thirds: route {} -> {} train / {} test'.format(route, share, len(ids) - share))

    ordered = [identifier for ids in routes.values() for identifier in ids]
    return SplitSpec(train_ids=[identifier for identifier in ordered if identifier in train],
                     test_ids=[identifier for identifier in ordered if identifier not in train])


def split_video_protocol(frame_count, skip=SCENE_VIDEO_SKIP_FRAMES, train_frac=SCENE_VIDEO_TRAIN_FRACTION):
    """
    Drops the first ``skip`` frames, then trains on the first floor(train_frac * remaining) frames and tests on the
      rest (contiguous, not shuffled)

    :return SplitSpec: over frame indices
    """
    if frame_count <= skip:
        raise DatasetError('frame_count {} must exceed skip {}.'.format(frame_count, skip))
    if not 0.0 <= train_frac <= 1.0:
        raise DatasetError('train_frac must lie in [0, 1], got {}.'.format(train_frac))
    remaining = frame_count - skip
    n_train = int(Fraction(str(train_frac)) * remaining)
    return SplitSpec(train_ids=range(skip, skip + n_train), test_ids=range(skip + n_train, frame_count))
