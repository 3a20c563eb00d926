import numpy as np
from django.test import SimpleTestCase

from ..detect import DetectorConfig, descriptor_distances, detect_raw
from ..imaging import BinaryMask, Frame, StructuringElement, dilate
from ..lss import LssParams
from ..model import TrainingState, finalize
from ..synthetic import MovingSquareScene, darken, random_texture
from ..utils import ArgumentError


def train(frames, params, train_threshold=1.0):
    state = TrainingState(frames[0].width, frames[0].height, params, train_threshold)
    for frame in frames:
        state.update(frame)
    return finalize(state)


class DetectorConfigTestCase(SimpleTestCase):
    def test_threshold_must_be_positive(self):
        for value in (0, -1.0):
            with self.assertRaises(ArgumentError):
                DetectorConfig(value)


class DetectRawTestCase(SimpleTestCase):
    def test_static_scene_is_background(self):
        rng = np.random.default_rng(0)
        params = LssParams()
        for _ in range(100):
            frame = Frame(random_texture(32, 32, rng, channels=3))
            model = train([frame] * 5, params)
            raw = detect_raw(frame, model, DetectorConfig())
            self.assertEqual(raw.area, 0)

    def test_dimension_mismatch(self):
        params = LssParams(patch_size=3, region_radius=4, angle_bins=8, radial_bins=2)
        model = train([Frame(np.zeros((8, 8), dtype=np.uint8))], params)
        with self.assertRaises(ArgumentError):
            detect_raw(Frame(np.zeros((8, 9), dtype=np.uint8)), model, DetectorConfig())

    def test_distances_are_zero_on_training_frame(self):
        rng = np.random.default_rng(1)
        params = LssParams(patch_size=3, region_radius=4, angle_bins=8, radial_bins=2)
        frame = Frame(random_texture(10, 10, rng))
        model = train([frame], params)
        self.assertLess(descriptor_distances(frame, model).max(), 1e-3)

    def test_shadows_are_detected(self):
        scene = MovingSquareScene(train_frames=5)
        model = train(scene.training_frames(), LssParams())
        shadowed = Frame(darken(scene.background, 26, 26, 12, 12, factor=0.5))
        raw = detect_raw(shadowed, model, DetectorConfig())
        coverage = raw.bits[26:38, 26:38].mean()
        self.assertGreaterEqual(coverage, 0.5)

    def test_moving_square_is_detected(self):
        scene = MovingSquareScene(train_frames=5, eval_frames=1)
        model = train(scene.training_frames(), LssParams())
        (frame, labels), = scene.evaluation_frames(noisy=False)
        raw = detect_raw(frame, model, DetectorConfig())
        self.assertGreater(raw.bits[labels == 255].mean(), 0.9)

    def test_raising_threshold_never_adds_foreground(self):
        scene = MovingSquareScene(train_frames=5, eval_frames=1)
        model = train(scene.training_frames(), LssParams())
        (frame, _), = scene.evaluation_frames()
        previous = None
        for threshold in (5.0, 15.0, 30.0, 60.0, 120.0, 2281.0):
            raw = detect_raw(frame, model, DetectorConfig(threshold))
            if previous is not None:
                self.assertTrue(raw <= previous, threshold)
            previous = raw
        self.assertEqual(previous.area, 0)

    def test_overestimation_stays_near_object(self):
        params = LssParams()
        scene = MovingSquareScene(train_frames=3, eval_frames=1, noise=0)
        model = train(scene.training_frames(), params)
        (frame, labels), = scene.evaluation_frames(noisy=False)
        raw = detect_raw(frame, model, DetectorConfig())
        reach = params.region_radius + params.half_patch
        near = dilate(BinaryMask(labels == 255), StructuringElement.disk(reach))
        self.assertGreater(raw.area, 0)
        self.assertTrue(raw <= near)
