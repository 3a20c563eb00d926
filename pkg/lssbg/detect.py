"""
Raw foreground detection: a pixel is foreground when its descriptor lies
farther than the detection threshold from the background descriptor.
"""
from .imaging import BinaryMask
from .lss import compute_descriptor_grid, grid_distance
from .utils import ArgumentError

__all__ = [
    'DetectorConfig',
    'descriptor_distances',
    'detect_raw',
]


class DetectorConfig:
    def __init__(self, detect_threshold=30.0):
        if not detect_threshold > 0:
            raise ArgumentError('Detection threshold must be > 0.')
        self.detect_threshold = float(detect_threshold)

    def __repr__(self):
        return 'DetectorConfig(detect_threshold=%r)' % self.detect_threshold


def descriptor_distances(frame, model):
    """
    Per-pixel distance between the frame's descriptors and the model's.
    """
    if frame.shape != model.shape:
        raise ArgumentError(
            'Frame is %d×%d but the model is %d×%d.'
            % (frame.width, frame.height, model.width, model.height)
        )
    grid = compute_descriptor_grid(frame, model.params)
    return grid_distance(grid.descriptors, model.descriptors)


def detect_raw(frame, model, cfg):
    distances = descriptor_distances(frame, model)
    return BinaryMask(distances > cfg.detect_threshold)
