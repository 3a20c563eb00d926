"""
Frame and mask rasters, image file I/O, and the binary morphology used by
the rest of the pipeline.
"""
import os

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .choices import StructuringShapes
from .utils import ArgumentError, FormatError, atomic_write

__all__ = [
    'BinaryMask',
    'Frame',
    'StructuringElement',
    'close',
    'dilate',
    'erode',
    'load_frame',
    'load_label_image',
    'load_mask',
    'pad_replicate',
    'save_frame',
    'save_mask',
    'to_grayscale',
]

FRAME_FORMATS = ('PNG', 'JPEG')
LABEL_FORMATS = ('PNG', 'JPEG', 'BMP')


class Frame:
    """
    An H×W raster of 8-bit pixels with 1 (grayscale) or 3 (RGB) channels.

    Pixels are held as a read-only uint8 array of shape
    (height, width, channels).
    """
    def __init__(self, pixels):
        pixels = np.asarray(pixels)
        if pixels.ndim == 2:
            pixels = pixels[:, :, np.newaxis]
        if pixels.ndim != 3:
            raise ArgumentError('Frame pixels must be a 2D or 3D array.')
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ArgumentError('Frame must be at least 1×1 pixels.')
        if pixels.shape[2] not in (1, 3):
            raise ArgumentError(
                'Unsupported channel count: %d (expected 1 or 3).' % pixels.shape[2]
            )
        if pixels.dtype != np.uint8:
            if np.any(pixels < 0) or np.any(pixels > 255):
                raise ArgumentError('Frame pixel values must lie in [0, 255].')
            pixels = pixels.astype(np.uint8)
        pixels = np.array(pixels, copy=True)
        pixels.flags.writeable = False
        self.pixels = pixels

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def channels(self):
        return self.pixels.shape[2]

    @property
    def shape(self):
        """
        (height, width), the shape masks and descriptor grids share.
        """
        return self.pixels.shape[:2]

    @property
    def intensity(self):
        """
        The single channel of a grayscale frame as a 2D array.
        """
        if self.channels != 1:
            raise ArgumentError('Frame is not grayscale; convert it first.')
        return self.pixels[:, :, 0]

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return '<Frame %d×%d×%d>' % (self.width, self.height, self.channels)


class BinaryMask:
    """
    An H×W boolean raster; True marks foreground.
    """
    def __init__(self, bits):
        bits = np.array(bits, dtype=bool, copy=True)
        if bits.ndim != 2:
            raise ArgumentError('Mask bits must be a 2D array.')
        bits.flags.writeable = False
        self.bits = bits

    @classmethod
    def empty(cls, shape):
        return cls(np.zeros(shape, dtype=bool))

    @property
    def height(self):
        return self.bits.shape[0]

    @property
    def width(self):
        return self.bits.shape[1]

    @property
    def shape(self):
        return self.bits.shape

    @property
    def area(self):
        return int(np.count_nonzero(self.bits))

    def _check_shape(self, other):
        if self.shape != other.shape:
            raise ArgumentError(
                'Mask dimensions differ: %d×%d vs %d×%d.'
                % (self.width, self.height, other.width, other.height)
            )

    def __and__(self, other):
        self._check_shape(other)
        return BinaryMask(self.bits & other.bits)

    def __or__(self, other):
        self._check_shape(other)
        return BinaryMask(self.bits | other.bits)

    def __sub__(self, other):
        self._check_shape(other)
        return BinaryMask(self.bits & ~other.bits)

    def __invert__(self):
        return BinaryMask(~self.bits)

    def __le__(self, other):
        """
        Subset test.
        """
        self._check_shape(other)
        return not np.any(self.bits & ~other.bits)

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return '<BinaryMask %d×%d, %d set>' % (self.width, self.height, self.area)


class StructuringElement:
    """
    A disk or square neighborhood of the given radius, centred on (0, 0).
    """
    def __init__(self, shape, radius):
        if shape not in StructuringShapes.values:
            raise ArgumentError(
                'Unknown structuring element shape %r. Expected one of: %s.'
                % (shape, ', '.join(StructuringShapes.values))
            )
        if radius < 0:
            raise ArgumentError('Structuring element radius must be >= 0.')
        self.shape = str(shape)
        self.radius = int(radius)

        span = np.arange(-self.radius, self.radius + 1)
        dy, dx = np.meshgrid(span, span, indexing='ij')
        if self.shape == StructuringShapes.disk.value:
            footprint = dx ** 2 + dy ** 2 <= self.radius ** 2
        else:
            footprint = np.ones_like(dx, dtype=bool)
        footprint.flags.writeable = False
        self.footprint = footprint

    @classmethod
    def disk(cls, radius):
        return cls(StructuringShapes.disk.value, radius)

    @classmethod
    def square(cls, radius):
        return cls(StructuringShapes.square.value, radius)

    @property
    def offsets(self):
        """
        The set of (dx, dy) pairs covered by the element.
        """
        ys, xs = np.nonzero(self.footprint)
        return frozenset(
            (int(x) - self.radius, int(y) - self.radius)
            for y, x in zip(ys, xs)
        )

    def __repr__(self):
        return '<StructuringElement %s r=%d>' % (self.shape, self.radius)


def _open_image(path, formats):
    try:
        image = Image.open(path)
        image.load()
    except UnidentifiedImageError as ex:
        raise FormatError('Could not decode image %s.' % path) from ex
    except (OSError, SyntaxError) as ex:
        if not os.path.isfile(path):
            raise
        raise FormatError('Could not decode image %s: %s' % (path, ex)) from ex
    if image.format not in formats:
        raise FormatError(
            'Unsupported image format %s for %s (expected %s).'
            % (image.format, path, ', '.join(formats))
        )
    return image


def load_frame(path):
    """
    Decode a PNG or JPEG file. Grayscale files give 1-channel frames, colour
    files 3-channel frames.
    """
    image = _open_image(path, FRAME_FORMATS)
    if image.mode in ('1', 'L', 'LA'):
        image = image.convert('L')
    elif image.mode in ('RGB', 'RGBA', 'P', 'CMYK', 'YCbCr'):
        image = image.convert('RGB')
    else:
        raise FormatError('Unsupported pixel format %s in %s.' % (image.mode, path))
    return Frame(np.asarray(image, dtype=np.uint8))


def load_label_image(path):
    """
    Decode an 8-bit label image (ground truth or ROI) into a uint8 array.
    """
    image = _open_image(path, LABEL_FORMATS)
    if image.mode != 'L':
        if image.mode in ('1', 'P', 'RGB', 'RGBA', 'LA'):
            image = image.convert('L')
        else:
            raise FormatError('Unsupported pixel format %s in %s.' % (image.mode, path))
    return np.asarray(image, dtype=np.uint8)


def load_mask(path):
    """
    Decode a mask image; any nonzero pixel is foreground.
    """
    return BinaryMask(load_label_image(path) > 0)


def save_frame(frame, path):
    pixels = frame.pixels[:, :, 0] if frame.channels == 1 else frame.pixels
    image = Image.fromarray(np.ascontiguousarray(pixels))
    image_format = 'JPEG' if path.lower().endswith(('.jpg', '.jpeg')) else 'PNG'
    with atomic_write(path) as fh:
        if image_format == 'JPEG':
            image.save(fh, format=image_format, quality=95)
        else:
            image.save(fh, format=image_format)


def save_mask(mask, path):
    """
    Write a mask as an 8-bit grayscale PNG (foreground 255, background 0).
    """
    pixels = np.where(mask.bits, 255, 0).astype(np.uint8)
    with atomic_write(path) as fh:
        Image.fromarray(pixels).save(fh, format='PNG')


def to_grayscale(frame):
    """
    BT.601 luma, rounded half up. Grayscale frames are returned unchanged.
    """
    if frame.channels == 1:
        return frame
    if frame.channels != 3:
        raise ArgumentError('Unsupported channel count: %d.' % frame.channels)
    rgb = frame.pixels.astype(np.int64)
    luma = (299 * rgb[:, :, 0] + 587 * rgb[:, :, 1] + 114 * rgb[:, :, 2] + 500) // 1000
    return Frame(luma.astype(np.uint8))


def pad_replicate(frame, pad):
    """
    Grow the frame by pad pixels on every side, copying the nearest edge
    pixel outwards.
    """
    if pad < 0:
        raise ArgumentError('Padding must be >= 0.')
    if pad == 0:
        return frame
    return Frame(np.pad(frame.pixels, ((pad, pad), (pad, pad), (0, 0)), mode='edge'))


def erode(mask, se):
    """
    A pixel survives iff every neighbor under the element is set.
    Out-of-bounds neighbors count as background.
    """
    if not mask.bits.any():
        return BinaryMask.empty(mask.shape)
    return BinaryMask(ndimage.binary_erosion(
        mask.bits,
        structure=se.footprint,
        border_value=0,
    ))


def dilate(mask, se):
    """
    A pixel is set iff some neighbor under the reflected element is set.
    """
    if not mask.bits.any():
        return BinaryMask.empty(mask.shape)
    return BinaryMask(ndimage.binary_dilation(
        mask.bits,
        structure=se.footprint,
        border_value=0,
    ))


def close(mask, se):
    return erode(dilate(mask, se), se)
