"""
Background model training and persistence.

Every pixel keeps a list of descriptor clusters. A training frame either
joins the nearest cluster (distance below the training threshold) or starts
a new one; once training ends, the most frequent cluster at each pixel
becomes that pixel's background descriptor and colour.
"""
import logging
import struct

import numpy as np

from .lss import LssParams, SelfSimilarityDescriptor, compute_descriptor_grid, grid_distance
from .utils import ArgumentError, FormatError, StateError, atomic_write

__all__ = [
    'BackgroundModel',
    'ClusterEntry',
    'TrainingState',
    'finalize',
    'load_model',
    'save_model',
    'train_update',
]

MODEL_MAGIC = b'LSSBGM'
MODEL_VERSION = 1
# magic, version, width, height, descriptor length, p, r, angle bins,
# radial bins, noise variance, component scale
MODEL_HEADER = struct.Struct('<6sBIIHHHHHdd')


def frame_colors(frame):
    """
    Frame pixels as an (H, W, 3) int64 array; grayscale is replicated.
    """
    pixels = frame.pixels.astype(np.int64)
    if frame.channels == 1:
        pixels = np.repeat(pixels, 3, axis=2)
    return pixels


class ClusterEntry:
    """
    One descriptor cluster at one pixel.
    """
    def __init__(self, representative, count, color_sum, color_n, created_at):
        self.representative = representative
        self.count = count
        self.color_sum = color_sum
        self.color_n = color_n
        self.created_at = created_at

    def __repr__(self):
        return '<ClusterEntry count=%d created_at=%d>' % (self.count, self.created_at)


class TrainingState:
    """
    Clusters for every pixel, stored slot-wise: slot k of pixel (x, y) is the
    k-th cluster created there, so slot order is creation order.
    """
    logger = logging.getLogger('lssbg')

    def __init__(self, width, height, params=None, train_threshold=1.0):
        if width < 1 or height < 1:
            raise ArgumentError('Training state must be at least 1×1 pixels.')
        self.width = width
        self.height = height
        self.params = params or LssParams()
        self.train_threshold = float(train_threshold)
        self.frames_seen = 0

        length = self.params.descriptor_length
        self.capacity = 0
        self.used = 0
        self._representatives = np.zeros((0, height, width, length), dtype=np.float32)
        self._counts = np.zeros((0, height, width), dtype=np.int64)
        self._color_sums = np.zeros((0, height, width, 3), dtype=np.int64)
        self._created_at = np.zeros((0, height, width), dtype=np.int64)
        self.n_clusters = np.zeros((height, width), dtype=np.int64)

    @property
    def shape(self):
        return self.height, self.width

    @property
    def slots(self):
        return self.used

    @property
    def representatives(self):
        return self._representatives[:self.used]

    @property
    def counts(self):
        return self._counts[:self.used]

    @property
    def color_sums(self):
        return self._color_sums[:self.used]

    @property
    def created_at(self):
        return self._created_at[:self.used]

    def _add_slot(self):
        if self.used == self.capacity:
            capacity = max(2, 2 * self.capacity)
            for name in ('_representatives', '_counts', '_color_sums', '_created_at'):
                old = getattr(self, name)
                new = np.zeros((capacity,) + old.shape[1:], dtype=old.dtype)
                new[:self.used] = old[:self.used]
                setattr(self, name, new)
            self.capacity = capacity
        self.used += 1

    def update(self, frame):
        """
        Fold one training frame into the clusters. Returns self.
        """
        if frame.shape != self.shape:
            raise ArgumentError(
                'Training frame is %d×%d but the model is %d×%d.'
                % (frame.width, frame.height, self.width, self.height)
            )
        grid = compute_descriptor_grid(frame, self.params).descriptors
        colors = frame_colors(frame)

        if self.slots:
            distances = np.full((self.slots,) + self.shape, np.inf)
            for k in range(self.slots):
                live = self.n_clusters > k
                distances[k][live] = grid_distance(self.representatives[k], grid)[live]
            # argmin returns the first minimum, i.e. the earliest cluster on ties.
            nearest = np.argmin(distances, axis=0)
            best = np.take_along_axis(distances, nearest[np.newaxis], axis=0)[0]
            matched = best < self.train_threshold
        else:
            nearest = np.zeros(self.shape, dtype=np.int64)
            matched = np.zeros(self.shape, dtype=bool)

        ys, xs = np.nonzero(matched)
        ks = nearest[ys, xs]
        self.counts[ks, ys, xs] += 1
        self.color_sums[ks, ys, xs] += colors[ys, xs]

        ys, xs = np.nonzero(~matched)
        if len(ys):
            ks = self.n_clusters[ys, xs]
            if ks.max() >= self.slots:
                self._add_slot()
            self.representatives[ks, ys, xs] = grid[ys, xs]
            self.counts[ks, ys, xs] = 1
            self.color_sums[ks, ys, xs] = colors[ys, xs]
            self.created_at[ks, ys, xs] = self.frames_seen
            self.n_clusters[ys, xs] += 1

        self.logger.debug(
            '[Train] Frame %(index)d: %(matched)d matched, %(new)d new cluster(s).'
            % {'index': self.frames_seen, 'matched': int(matched.sum()), 'new': len(ys)}
        )
        self.frames_seen += 1
        return self

    def cluster_counts(self):
        """
        Number of clusters at every pixel, as an (H, W) array.
        """
        return self.n_clusters.copy()

    def clusters_at(self, x, y):
        return [
            ClusterEntry(
                representative=SelfSimilarityDescriptor(self.representatives[k, y, x]),
                count=int(self.counts[k, y, x]),
                color_sum=tuple(int(c) for c in self.color_sums[k, y, x]),
                color_n=int(self.counts[k, y, x]),
                created_at=int(self.created_at[k, y, x]),
            )
            for k in range(int(self.n_clusters[y, x]))
        ]


class BackgroundModel:
    """
    Per-pixel background descriptor (float32) and background colour (RGB).
    """
    def __init__(self, descriptors, colors, params):
        descriptors = np.ascontiguousarray(descriptors, dtype=np.float32)
        colors = np.ascontiguousarray(colors, dtype=np.uint8)
        if descriptors.ndim != 3 or descriptors.shape[2] != params.descriptor_length:
            raise ArgumentError('Model descriptors must have shape (H, W, %d).' % params.descriptor_length)
        if colors.shape != descriptors.shape[:2] + (3,):
            raise ArgumentError('Model colours must have shape (H, W, 3).')
        descriptors.flags.writeable = False
        colors.flags.writeable = False
        self.descriptors = descriptors
        self.colors = colors
        self.params = params

    @property
    def height(self):
        return self.descriptors.shape[0]

    @property
    def width(self):
        return self.descriptors.shape[1]

    @property
    def shape(self):
        return self.descriptors.shape[:2]

    def __eq__(self, other):
        if not isinstance(other, BackgroundModel):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.descriptors.view(np.uint32), other.descriptors.view(np.uint32))
            and np.array_equal(self.colors, other.colors)
        )

    def __repr__(self):
        return '<BackgroundModel %d×%d>' % (self.width, self.height)


def train_update(state, frame):
    return state.update(frame)


def finalize(state):
    """
    Pick the most frequent cluster at every pixel (earliest on ties).
    """
    if state.frames_seen == 0:
        raise StateError('Cannot build a background model before any training frame.')
    # Slots are in creation order, so the first maximum is the earliest.
    winner = np.argmax(state.counts, axis=0)[np.newaxis]
    descriptors = np.take_along_axis(state.representatives, winner[..., np.newaxis], axis=0)[0]
    color_sum = np.take_along_axis(state.color_sums, winner[..., np.newaxis], axis=0)[0]
    color_n = np.take_along_axis(state.counts, winner, axis=0)[0][..., np.newaxis]
    # Integer round-half-up of color_sum / color_n.
    colors = (2 * color_sum + color_n) // (2 * color_n)
    return BackgroundModel(descriptors, colors, state.params)


def save_model(m, path):
    params = m.params
    header = MODEL_HEADER.pack(
        MODEL_MAGIC,
        MODEL_VERSION,
        m.width,
        m.height,
        params.descriptor_length,
        params.patch_size,
        params.region_radius,
        params.angle_bins,
        params.radial_bins,
        params.noise_variance,
        params.component_scale,
    )
    with atomic_write(path) as fh:
        fh.write(header)
        fh.write(m.descriptors.astype('<f4').tobytes())
        fh.write(m.colors.tobytes())


def load_model(path):
    with open(path, 'rb') as fh:
        data = fh.read()

    if len(data) < MODEL_HEADER.size:
        raise FormatError('Model file %s is truncated.' % path)
    (
        magic, version, width, height, length,
        patch_size, region_radius, angle_bins, radial_bins,
        noise_variance, component_scale,
    ) = MODEL_HEADER.unpack_from(data)
    if magic != MODEL_MAGIC:
        raise FormatError('%s is not a background model file.' % path)
    if version != MODEL_VERSION:
        raise FormatError('Unsupported model version %d in %s.' % (version, path))
    if width < 1 or height < 1:
        raise FormatError('Model file %s has invalid dimensions %d×%d.' % (path, width, height))
    try:
        params = LssParams(
            patch_size=patch_size,
            region_radius=region_radius,
            angle_bins=angle_bins,
            radial_bins=radial_bins,
            noise_variance=noise_variance,
            component_scale=component_scale,
        )
    except ArgumentError as ex:
        raise FormatError('Model file %s has invalid parameters: %s' % (path, ex)) from ex
    if length != params.descriptor_length:
        raise FormatError(
            'Model file %s declares descriptor length %d, expected %d.'
            % (path, length, params.descriptor_length)
        )

    n_descriptor = width * height * length
    n_color = width * height * 3
    expected = MODEL_HEADER.size + 4 * n_descriptor + n_color
    if len(data) != expected:
        raise FormatError(
            'Model file %s is %d bytes, expected %d.' % (path, len(data), expected)
        )

    offset = MODEL_HEADER.size
    descriptors = np.frombuffer(data, dtype='<f4', count=n_descriptor, offset=offset)
    offset += 4 * n_descriptor
    colors = np.frombuffer(data, dtype=np.uint8, count=n_color, offset=offset)
    return BackgroundModel(
        descriptors.astype(np.float32).reshape(height, width, length),
        colors.reshape(height, width, 3),
        params,
    )
