"""
Synthetic scenes in the benchmark layout: a periodic textured background,
noisy training frames and a textured square moving across the evaluated
frames. Used by the fixtures command and the test-suite.
"""
import os

import numpy as np

from .choices import GroundTruthLabels
from .imaging import Frame, save_frame
from .utils import ArgumentError, atomic_write

__all__ = [
    'MovingSquareScene',
    'add_noise',
    'checker_background',
    'darken',
    'random_texture',
    'textured_square',
    'write_dataset',
]


def checker_background(width, height, block=2, low=60, high=140):
    """
    Gray checkerboard with block×block cells (period 2 * block).
    """
    ys, xs = np.mgrid[0:height, 0:width]
    cells = ((xs // block) + (ys // block)) % 2
    gray = np.where(cells == 0, low, high).astype(np.uint8)
    return np.repeat(gray[:, :, np.newaxis], 3, axis=2)


def random_texture(width, height, rng, channels=1, low=0, high=256):
    """
    Uniform random texture, e.g. for descriptor property tests.
    """
    pixels = rng.integers(low, high, size=(height, width, channels))
    return pixels.astype(np.uint8)


def textured_square(size, rng):
    """
    Reddish random texture, far in colour from the gray background.
    """
    red = rng.integers(200, 256, size=(size, size))
    green = rng.integers(0, 60, size=(size, size))
    blue = rng.integers(0, 60, size=(size, size))
    return np.stack([red, green, blue], axis=2).astype(np.uint8)


def add_noise(pixels, amplitude, rng):
    """
    Add independent uniform integer noise in [-amplitude, amplitude].
    """
    if amplitude <= 0:
        return np.array(pixels, dtype=np.uint8, copy=True)
    noise = rng.integers(-amplitude, amplitude + 1, size=pixels.shape)
    return np.clip(pixels.astype(np.int64) + noise, 0, 255).astype(np.uint8)


def darken(pixels, x, y, width, height, factor=0.5):
    """
    Scale a rectangle's intensities by factor, as a cast shadow would.
    """
    out = pixels.astype(np.float64).copy()
    out[y:y + height, x:x + width] *= factor
    return np.round(out).astype(np.uint8)


class MovingSquareScene:
    """
    A static checker background, training frames with uniform noise and
    evaluation frames in which a textured square translates horizontally by
    `step` pixels per frame.
    """
    def __init__(self, width=64, height=64, square=16, train_frames=20,
                 eval_frames=10, step=2, noise=2, start=None, seed=0,
                 shadow=False):
        if square > min(width, height):
            raise ArgumentError('Square does not fit in the frame.')
        self.width = width
        self.height = height
        self.square = square
        self.train_frames = train_frames
        self.eval_frames = eval_frames
        self.step = step
        self.noise = noise
        self.seed = seed
        self.shadow = shadow
        if start is None:
            travel = step * max(eval_frames - 1, 0)
            start = ((width - square - travel) // 2, (height - square) // 2)
        self.start = start

        rng = np.random.default_rng(seed)
        self.background = checker_background(width, height)
        self.texture = textured_square(square, rng)

    def square_origin(self, index):
        x0, y0 = self.start
        return x0 + self.step * index, y0

    def training_frames(self):
        rng = np.random.default_rng(self.seed + 1)
        return [
            Frame(add_noise(self.background, self.noise, rng))
            for _ in range(self.train_frames)
        ]

    def evaluation_frame(self, index, rng=None):
        """
        (frame, ground-truth labels) for evaluation frame `index`.
        """
        x, y = self.square_origin(index)
        size = self.square
        pixels = self.background.copy()
        labels = np.full((self.height, self.width), GroundTruthLabels.static.value, dtype=np.uint8)

        if self.shadow:
            shadow_rows = min(size // 2, self.height - (y + size))
            if shadow_rows > 0:
                pixels = darken(pixels, x, y + size, size, shadow_rows)
                labels[y + size:y + size + shadow_rows, x:x + size] = GroundTruthLabels.hard_shadow.value

        visible = self.texture[:self.height - y, :self.width - x]
        pixels[y:y + visible.shape[0], x:x + visible.shape[1]] = visible
        labels[y:y + visible.shape[0], x:x + visible.shape[1]] = GroundTruthLabels.motion.value

        if rng is not None:
            pixels = add_noise(pixels, self.noise, rng)
        return Frame(pixels), labels

    def evaluation_frames(self, noisy=True):
        rng = np.random.default_rng(self.seed + 2) if noisy else None
        return [self.evaluation_frame(index, rng) for index in range(self.eval_frames)]


def write_dataset(root, scene, image_format='jpg'):
    """
    Write the scene as a benchmark video directory. Frames are numbered from
    1; the evaluated frames follow the training frames.
    """
    if image_format not in ('jpg', 'png'):
        raise ArgumentError('Image format must be jpg or png.')
    input_dir = os.path.join(root, 'input')
    groundtruth_dir = os.path.join(root, 'groundtruth')
    os.makedirs(input_dir, exist_ok=True)
    os.makedirs(groundtruth_dir, exist_ok=True)

    static = np.full((scene.height, scene.width), GroundTruthLabels.static.value, dtype=np.uint8)
    number = 0
    for frame in scene.training_frames():
        number += 1
        save_frame(frame, os.path.join(input_dir, 'in%06d.%s' % (number, image_format)))
        save_frame(Frame(static), os.path.join(groundtruth_dir, 'gt%06d.png' % number))

    first = number + 1
    for frame, labels in scene.evaluation_frames():
        number += 1
        save_frame(frame, os.path.join(input_dir, 'in%06d.%s' % (number, image_format)))
        save_frame(Frame(labels), os.path.join(groundtruth_dir, 'gt%06d.png' % number))

    with atomic_write(os.path.join(root, 'temporalROI.txt'), 'w') as fh:
        fh.write('%d %d\n' % (first, number))
    return first, number
