"""
Dense Local Self-Similarity descriptors.

For every pixel a small patch is compared (sum of squared differences) with
every patch of the surrounding region. The resulting correlation surface is
normalised with exp(-SSD / var), max-pooled into log-polar bins and
stretched linearly onto [0, component_scale].
"""
import logging
import math
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .imaging import pad_replicate, to_grayscale
from .utils import ArgumentError

__all__ = [
    'DescriptorGrid',
    'LssParams',
    'SelfSimilarityDescriptor',
    'bin_log_polar',
    'compute_descriptor_grid',
    'descriptor_distance',
    'grid_distance',
    'padding_size',
    'radial_edges',
    'similarity_surface',
    'stretch',
]

logger = logging.getLogger('lssbg')


class LssParams:
    """
    Descriptor geometry and normalisation constants. Immutable.

    noise_variance defaults to 25 * patch_size ** 2, i.e. about five grey
    levels of photometric noise per patch pixel.
    """
    _fields = (
        'patch_size',
        'region_radius',
        'angle_bins',
        'radial_bins',
        'noise_variance',
        'component_scale',
    )

    def __init__(self, patch_size=5, region_radius=20, angle_bins=20,
                 radial_bins=4, noise_variance=None, component_scale=255.0):
        if patch_size < 3 or patch_size % 2 == 0:
            raise ArgumentError('Patch size must be odd and at least 3.')
        if region_radius < (patch_size - 1) // 2 + 1:
            raise ArgumentError(
                'Region radius must be at least %d for patch size %d.'
                % ((patch_size - 1) // 2 + 1, patch_size)
            )
        if angle_bins < 1 or radial_bins < 1:
            raise ArgumentError('Angle and radial bin counts must be positive.')
        if noise_variance is None:
            noise_variance = 25.0 * patch_size ** 2
        if noise_variance < 0:
            raise ArgumentError('Noise variance must be >= 0.')
        if component_scale <= 0:
            raise ArgumentError('Component scale must be positive.')

        object.__setattr__(self, 'patch_size', int(patch_size))
        object.__setattr__(self, 'region_radius', int(region_radius))
        object.__setattr__(self, 'angle_bins', int(angle_bins))
        object.__setattr__(self, 'radial_bins', int(radial_bins))
        object.__setattr__(self, 'noise_variance', float(noise_variance))
        object.__setattr__(self, 'component_scale', float(component_scale))

    def __setattr__(self, name, value):
        raise AttributeError('LssParams is immutable.')

    def __eq__(self, other):
        if not isinstance(other, LssParams):
            return NotImplemented
        return self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return 'LssParams(%s)' % ', '.join(
            '%s=%r' % (field, getattr(self, field)) for field in self._fields
        )

    def as_tuple(self):
        return tuple(getattr(self, field) for field in self._fields)

    @property
    def as_dict(self):
        return {field: getattr(self, field) for field in self._fields}

    @property
    def half_patch(self):
        return (self.patch_size - 1) // 2

    @property
    def descriptor_length(self):
        return self.angle_bins * self.radial_bins

    @property
    def padding(self):
        return padding_size(self.region_radius, self.patch_size)


class SelfSimilarityDescriptor:
    """
    One pixel's descriptor: angle_bins × radial_bins components, laid out
    angle-major (component a * radial_bins + k for angle a, ring k).
    """
    def __init__(self, components):
        components = np.array(components, dtype=np.float64, copy=True)
        if components.ndim != 1:
            raise ArgumentError('Descriptor components must be a 1D array.')
        components.flags.writeable = False
        self.components = components

    def __len__(self):
        return len(self.components)

    def __eq__(self, other):
        if not isinstance(other, SelfSimilarityDescriptor):
            return NotImplemented
        return np.array_equal(self.components, other.components)

    def __repr__(self):
        return '<SelfSimilarityDescriptor len=%d>' % len(self)


class DescriptorGrid:
    """
    Descriptors for every pixel of an (unpadded) frame, held as a
    (height, width, descriptor_length) array.
    """
    def __init__(self, descriptors, params):
        descriptors = np.asarray(descriptors)
        if descriptors.ndim != 3 or descriptors.shape[2] != params.descriptor_length:
            raise ArgumentError('Descriptor grid must have shape (H, W, %d).' % params.descriptor_length)
        self.descriptors = descriptors
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

    def __repr__(self):
        return '<DescriptorGrid %d×%d>' % (self.width, self.height)


def padding_size(r, p):
    """
    Border width added around frames: b - b mod 3, with b = r + p.
    """
    if r < 0 or p < 0:
        raise ArgumentError('Radius and patch size must be >= 0.')
    b = r + p
    return b - b % 3


def radial_edges(region_radius, radial_bins):
    """
    Log-spaced ring boundaries R_k = (r + 1) ** (k / radial_bins) - 1.
    The outermost edge is pinned to r itself.
    """
    edges = np.exp(
        np.arange(radial_bins + 1) * math.log(region_radius + 1) / radial_bins
    ) - 1.0
    edges[0] = 0.0
    edges[-1] = float(region_radius)
    return edges


@lru_cache(maxsize=16)
def _bin_layout(region_radius, angle_bins, radial_bins):
    r = region_radius
    span = np.arange(-r, r + 1)
    dy, dx = np.meshgrid(span, span, indexing='ij')
    rho = np.sqrt(dx ** 2 + dy ** 2)

    # Centre cell excluded; cells beyond the region radius ignored.
    inside = (rho > 0) & (rho <= r)

    angle = np.mod(np.arctan2(dy, dx), 2 * np.pi)
    angle_bin = np.floor(angle / (2 * np.pi / angle_bins)).astype(np.int64)
    angle_bin = np.clip(angle_bin, 0, angle_bins - 1)

    edges = radial_edges(r, radial_bins)
    radial_bin = np.searchsorted(edges, rho, side='left') - 1
    radial_bin = np.clip(radial_bin, 0, radial_bins - 1)

    layout = np.where(inside, angle_bin * radial_bins + radial_bin, -1)
    occupied = np.zeros(angle_bins * radial_bins, dtype=bool)
    occupied[layout[inside]] = True

    layout.flags.writeable = False
    occupied.flags.writeable = False
    return layout, occupied


def bin_layout(params):
    """
    Return (layout, occupied). layout maps each surface cell [dy + r, dx + r]
    to its component index, or -1 for cells that feed no bin. occupied flags
    the components that receive at least one cell; the rest are
    structurally empty and always 0.
    """
    return _bin_layout(params.region_radius, params.angle_bins, params.radial_bins)


def _normalise(ssd, variance):
    """
    exp(-ssd / variance), with a zero variance mapping ssd == 0 to 1 and
    anything else to 0.
    """
    variance = np.asarray(variance, dtype=np.float64)
    degenerate = variance <= 0
    if not np.any(degenerate):
        return np.exp(-ssd / variance)
    safe = np.where(degenerate, 1.0, variance)
    surface = np.exp(-ssd / safe)
    return np.where(degenerate, (ssd == 0).astype(np.float64), surface)


def similarity_surface(g, cx, cy, params):
    """
    Correlation surface around padded-frame pixel (cx, cy), indexed
    [dy + r, dx + r].
    """
    if g.channels != 1:
        raise ArgumentError('Similarity surface needs a grayscale frame.')
    r = params.region_radius
    h = params.half_patch
    reach = r + h
    if cx - reach < 0 or cy - reach < 0 or cx + reach >= g.width or cy + reach >= g.height:
        raise ArgumentError(
            'Neighborhood of (%d, %d) leaves the frame; pad the frame first.' % (cx, cy)
        )

    region = g.intensity[cy - reach:cy + reach + 1, cx - reach:cx + reach + 1].astype(np.float64)
    patches = sliding_window_view(region, (params.patch_size, params.patch_size))
    centre = region[r:r + params.patch_size, r:r + params.patch_size]
    ssd = ((patches - centre) ** 2).sum(axis=(2, 3))

    auto_variance = ssd[r - 1:r + 2, r - 1:r + 2].max()
    return _normalise(ssd, max(params.noise_variance, auto_variance))


def bin_log_polar(surface, params):
    """
    Max-pool a correlation surface into log-polar bins. Returns the
    pre-stretch descriptor.
    """
    side = 2 * params.region_radius + 1
    surface = np.asarray(surface, dtype=np.float64)
    if surface.shape != (side, side):
        raise ArgumentError('Surface must be %d×%d.' % (side, side))
    layout, _ = bin_layout(params)
    inside = layout >= 0
    components = np.zeros(params.descriptor_length, dtype=np.float64)
    np.maximum.at(components, layout[inside], surface[inside])
    return SelfSimilarityDescriptor(components)


def _stretch_components(components, occupied, scale):
    """
    Linear [min, max] -> [0, scale] over the occupied components of the last
    axis; works on a single descriptor or a whole grid.
    """
    out = np.zeros_like(components, dtype=np.float64)
    values = components[..., occupied]
    low = values.min(axis=-1, keepdims=True)
    high = values.max(axis=-1, keepdims=True)
    span = high - low
    with np.errstate(invalid='ignore', divide='ignore'):
        stretched = np.where(span > 0, (values - low) / span * scale, 0.0)
    out[..., occupied] = stretched
    return out


def stretch(d, params):
    _, occupied = bin_layout(params)
    components = d.components if isinstance(d, SelfSimilarityDescriptor) else np.asarray(d, dtype=np.float64)
    return SelfSimilarityDescriptor(
        _stretch_components(components, occupied, params.component_scale)
    )


def _box_sum(values, size):
    """
    Sum over every size×size window, exact for integer input.
    """
    table = np.zeros((values.shape[0] + 1, values.shape[1] + 1), dtype=values.dtype)
    np.cumsum(np.cumsum(values, axis=0), axis=1, out=table[1:, 1:])
    return (
        table[size:, size:]
        - table[:-size, size:]
        - table[size:, :-size]
        + table[:-size, :-size]
    )


def compute_descriptor_grid(f, params):
    """
    Descriptor for every pixel of f. The frame is converted to grayscale and
    edge-padded first so border pixels see a full region.

    Works offset by offset: one patch-SSD image per (dx, dy) is folded into
    its bin with a running maximum, so memory stays at one bin stack.
    """
    gray = to_grayscale(f)
    pad = params.padding
    padded = pad_replicate(gray, pad).intensity.astype(np.int64)
    height, width = gray.shape
    p = params.patch_size
    h = params.half_patch
    r = params.region_radius

    top = pad - h
    centre = padded[top:top + height + 2 * h, top:top + width + 2 * h]

    def patch_ssd(dx, dy):
        shifted = padded[
            top + dy:top + dy + height + 2 * h,
            top + dx:top + dx + width + 2 * h,
        ]
        return _box_sum((centre - shifted) ** 2, p)

    auto_variance = np.zeros((height, width), dtype=np.int64)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx or dy:
                np.maximum(auto_variance, patch_ssd(dx, dy), out=auto_variance)
    variance = np.maximum(params.noise_variance, auto_variance.astype(np.float64))

    layout, occupied = bin_layout(params)
    bins = np.zeros((params.descriptor_length, height, width), dtype=np.float64)
    for (row, col), index in np.ndenumerate(layout):
        if index < 0:
            continue
        surface = _normalise(patch_ssd(col - r, row - r), variance)
        np.maximum(bins[index], surface, out=bins[index])

    descriptors = np.ascontiguousarray(np.moveaxis(bins, 0, -1))
    descriptors = _stretch_components(descriptors, occupied, params.component_scale)
    logger.debug('[LSS] Computed %(w)d×%(h)d descriptor grid.' % {'w': width, 'h': height})
    return DescriptorGrid(descriptors, params)


def descriptor_distance(a, b):
    """
    Euclidean distance between two descriptors.
    """
    a = a.components if isinstance(a, SelfSimilarityDescriptor) else np.asarray(a, dtype=np.float64)
    b = b.components if isinstance(b, SelfSimilarityDescriptor) else np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ArgumentError(
            'Descriptor lengths differ: %d vs %d.' % (a.size, b.size)
        )
    return float(np.sqrt(np.sum((a - b) ** 2)))


def grid_distance(a, b):
    """
    Per-pixel Euclidean distance between two (H, W, L) descriptor stacks.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ArgumentError('Descriptor grid shapes differ: %s vs %s.' % (a.shape, b.shape))
    return np.sqrt(np.sum((a - b) ** 2, axis=-1))
