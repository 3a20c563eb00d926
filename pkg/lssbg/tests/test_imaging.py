import os
import tempfile

import numpy as np
from django.test import SimpleTestCase
from PIL import Image
from scipy import ndimage

from ..imaging import (
    BinaryMask,
    Frame,
    StructuringElement,
    close,
    dilate,
    erode,
    load_frame,
    load_label_image,
    load_mask,
    pad_replicate,
    save_frame,
    save_mask,
    to_grayscale,
)
from ..utils import ArgumentError, FormatError


def random_masks(count, seed=0, size=16):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield BinaryMask(rng.random((size, size)) < rng.uniform(0.1, 0.9))


def random_elements(seed=0):
    rng = np.random.default_rng(seed)
    while True:
        radius = int(rng.integers(0, 4))
        if rng.integers(0, 2):
            yield StructuringElement.disk(radius)
        else:
            yield StructuringElement.square(radius)


class FrameTestCase(SimpleTestCase):
    def test_grayscale_frame_gets_channel_axis(self):
        frame = Frame(np.zeros((4, 6), dtype=np.uint8))
        self.assertEqual(frame.pixels.shape, (4, 6, 1))
        self.assertEqual((frame.width, frame.height, frame.channels), (6, 4, 1))

    def test_rejects_bad_channel_count(self):
        with self.assertRaises(ArgumentError):
            Frame(np.zeros((4, 4, 2), dtype=np.uint8))

    def test_rejects_out_of_range_values(self):
        with self.assertRaises(ArgumentError):
            Frame(np.full((2, 2), 300))

    def test_pixels_are_read_only(self):
        frame = Frame(np.zeros((2, 2, 3), dtype=np.uint8))
        with self.assertRaises(ValueError):
            frame.pixels[0, 0, 0] = 1

    def test_grayscale_conversion(self):
        pixels = np.array([[[255, 0, 0], [0, 255, 0], [0, 0, 255], [10, 20, 30]]], dtype=np.uint8)
        gray = to_grayscale(Frame(pixels))
        self.assertEqual(gray.channels, 1)
        # (299 * R + 587 * G + 114 * B + 500) // 1000
        self.assertEqual(gray.intensity.tolist(), [[76, 150, 29, 18]])

    def test_grayscale_of_grayscale_is_identity(self):
        frame = Frame(np.arange(12, dtype=np.uint8).reshape(3, 4))
        self.assertIs(to_grayscale(frame), frame)


class PaddingTestCase(SimpleTestCase):
    def test_pad_replicates_edges(self):
        pixels = np.arange(12, dtype=np.uint8).reshape(3, 4)
        padded = pad_replicate(Frame(pixels), 2)
        self.assertEqual(padded.shape, (7, 8))
        self.assertTrue(np.array_equal(padded.intensity[2:5, 2:6], pixels))
        self.assertTrue(np.all(padded.intensity[0, 2:6] == pixels[0]))
        self.assertTrue(np.all(padded.intensity[:2, :2] == pixels[0, 0]))
        self.assertTrue(np.all(padded.intensity[-2:, -2:] == pixels[-1, -1]))

    def test_zero_pad_returns_frame(self):
        frame = Frame(np.zeros((3, 3), dtype=np.uint8))
        self.assertEqual(pad_replicate(frame, 0), frame)

    def test_negative_pad_is_rejected(self):
        with self.assertRaises(ArgumentError):
            pad_replicate(Frame(np.zeros((3, 3), dtype=np.uint8)), -1)


class MorphologyTestCase(SimpleTestCase):
    def test_single_pixel_dilation(self):
        bits = np.zeros((5, 5), dtype=bool)
        bits[0, 0] = True
        dilated = dilate(BinaryMask(bits), StructuringElement.square(1))
        expected = np.zeros((5, 5), dtype=bool)
        expected[:2, :2] = True
        self.assertTrue(np.array_equal(dilated.bits, expected))

    def test_erosion_treats_outside_as_background(self):
        full = BinaryMask(np.ones((5, 5), dtype=bool))
        eroded = erode(full, StructuringElement.square(1))
        expected = np.zeros((5, 5), dtype=bool)
        expected[1:4, 1:4] = True
        self.assertTrue(np.array_equal(eroded.bits, expected))

    def test_radius_zero_is_identity(self):
        for mask, shape in zip(random_masks(10), ('disk', 'square') * 5):
            se = StructuringElement(shape, 0)
            self.assertEqual(erode(mask, se), mask)
            self.assertEqual(dilate(mask, se), mask)

    def test_disk_offsets(self):
        self.assertEqual(
            StructuringElement.disk(1).offsets,
            {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)},
        )
        self.assertEqual(len(StructuringElement.square(2).offsets), 25)

    def test_unknown_shape(self):
        with self.assertRaises(ArgumentError):
            StructuringElement('diamond', 1)

    def test_duality(self):
        elements = random_elements(1)
        for mask in random_masks(200, seed=2):
            se = next(elements)
            # Complement pass counts out-of-bounds neighbours as set.
            eroded_complement = ndimage.binary_erosion(~mask.bits, structure=se.footprint, border_value=1)
            self.assertTrue(np.array_equal(dilate(mask, se).bits, ~eroded_complement))

    def test_closing_is_idempotent(self):
        elements = random_elements(3)
        for mask in random_masks(200, seed=4):
            se = next(elements)
            closed = close(mask, se)
            self.assertEqual(close(closed, se), closed)

    def test_erosion_dilation_ordering(self):
        se = StructuringElement.disk(2)
        for mask in random_masks(50, seed=5):
            self.assertTrue(erode(mask, se) <= mask)
            self.assertTrue(mask <= dilate(mask, se))

    def test_mask_operators(self):
        a = BinaryMask([[True, True], [False, False]])
        b = BinaryMask([[True, False], [True, False]])
        self.assertEqual((a & b).bits.tolist(), [[True, False], [False, False]])
        self.assertEqual((a | b).bits.tolist(), [[True, True], [True, False]])
        self.assertEqual((a - b).bits.tolist(), [[False, True], [False, False]])
        self.assertEqual((~a).area, 2)
        with self.assertRaises(ArgumentError):
            a & BinaryMask.empty((3, 3))


class ImageFileTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def test_png_round_trip(self):
        rng = np.random.default_rng(0)
        frame = Frame(rng.integers(0, 256, size=(8, 10, 3)).astype(np.uint8))
        save_frame(frame, self.path('in000001.png'))
        self.assertEqual(load_frame(self.path('in000001.png')), frame)

    def test_grayscale_png_loads_one_channel(self):
        Image.fromarray(np.full((4, 4), 77, dtype=np.uint8)).save(self.path('gray.png'))
        frame = load_frame(self.path('gray.png'))
        self.assertEqual(frame.channels, 1)
        self.assertTrue(np.all(frame.intensity == 77))

    def test_mask_round_trip(self):
        mask = next(random_masks(1, seed=6))
        save_mask(mask, self.path('bin000001.png'))
        self.assertEqual(load_mask(self.path('bin000001.png')), mask)
        stored = np.asarray(Image.open(self.path('bin000001.png')))
        self.assertEqual(set(np.unique(stored).tolist()) - {0, 255}, set())

    def test_bmp_labels(self):
        labels = np.array([[0, 85], [170, 255]], dtype=np.uint8)
        Image.fromarray(labels).save(self.path('ROI.bmp'))
        self.assertEqual(load_label_image(self.path('ROI.bmp')).tolist(), labels.tolist())

    def test_bmp_frames_are_rejected(self):
        Image.fromarray(np.zeros((4, 4), dtype=np.uint8)).save(self.path('in000001.bmp'))
        with self.assertRaises(FormatError):
            load_frame(self.path('in000001.bmp'))

    def test_undecodable_file(self):
        with open(self.path('broken.png'), 'wb') as fh:
            fh.write(b'not an image')
        with self.assertRaises(FormatError):
            load_frame(self.path('broken.png'))

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_frame(self.path('missing.png'))

    def test_atomic_write_leaves_no_temporary_files(self):
        save_mask(BinaryMask.empty((3, 3)), self.path('bin000001.png'))
        self.assertEqual(os.listdir(self.tmp.name), ['bin000001.png'])
