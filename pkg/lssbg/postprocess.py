"""
Mask refinement: close holes, split objects into a core and a border band,
keep border pixels whose colour differs from the background, and clean the
combined mask.
"""
import numpy as np

from .imaging import BinaryMask, StructuringElement, close, dilate, erode
from .utils import ArgumentError

__all__ = [
    'CoreBorder',
    'PostprocessConfig',
    'PostprocessStages',
    'color_distances',
    'postprocess',
    'refine_border',
    'run_postprocess',
    'split_core_border',
]


class PostprocessConfig:
    """
    Radii (pixels) and the colour threshold of the refinement stage.

    Closing and the final clean-up use square elements; the core erosion and
    the border band use disks.
    """
    def __init__(self, close_radius=5, erode_radius=10, border_dilate_radius=20,
                 color_threshold=30.0, final_erode_radius=1, final_close_radius=2):
        radii = {
            'close_radius': close_radius,
            'erode_radius': erode_radius,
            'border_dilate_radius': border_dilate_radius,
            'final_erode_radius': final_erode_radius,
            'final_close_radius': final_close_radius,
        }
        for name, radius in radii.items():
            if radius < 0:
                raise ArgumentError('%s must be >= 0.' % name)
            setattr(self, name, int(radius))
        if color_threshold < 0:
            raise ArgumentError('color_threshold must be >= 0.')
        self.color_threshold = float(color_threshold)

    @property
    def close_element(self):
        return StructuringElement.square(self.close_radius)

    @property
    def erode_element(self):
        return StructuringElement.disk(self.erode_radius)

    @property
    def border_element(self):
        return StructuringElement.disk(self.border_dilate_radius)

    @property
    def final_erode_element(self):
        return StructuringElement.square(self.final_erode_radius)

    @property
    def final_close_element(self):
        return StructuringElement.square(self.final_close_radius)


class CoreBorder:
    def __init__(self, core, border):
        self.core = core
        self.border = border


class PostprocessStages:
    """
    Every intermediate mask of one post-processing run.
    """
    def __init__(self, closed, core, border, refined, combined, final):
        self.closed = closed
        self.core = core
        self.border = border
        self.refined = refined
        self.combined = combined
        self.final = final


def split_core_border(raw, cfg):
    return _split(raw, cfg)[1]


def _split(raw, cfg):
    closed = close(raw, cfg.close_element)
    core = erode(closed, cfg.erode_element)
    border = dilate(core, cfg.border_element) - core
    return closed, CoreBorder(core, border)


def color_distances(frame, model):
    """
    Per-pixel Euclidean colour distance between a frame and the background
    colours. Grayscale frames compare against the first stored channel.
    """
    if frame.shape != model.shape:
        raise ArgumentError(
            'Frame is %d×%d but the model is %d×%d.'
            % (frame.width, frame.height, model.width, model.height)
        )
    pixels = frame.pixels.astype(np.float64)
    background = model.colors.astype(np.float64)
    if frame.channels == 1:
        background = background[:, :, :1]
    return np.sqrt(np.sum((pixels - background) ** 2, axis=2))


def refine_border(border, frame, model, cfg):
    if border.shape != frame.shape:
        raise ArgumentError('Border mask and frame dimensions differ.')
    changed = color_distances(frame, model) > cfg.color_threshold
    return BinaryMask(border.bits & changed)


def run_postprocess(raw, frame, model, cfg):
    if raw.shape != frame.shape:
        raise ArgumentError('Raw mask and frame dimensions differ.')
    closed, parts = _split(raw, cfg)
    refined = refine_border(parts.border, frame, model, cfg)
    combined = parts.core | refined
    final = close(erode(combined, cfg.final_erode_element), cfg.final_close_element)
    return PostprocessStages(closed, parts.core, parts.border, refined, combined, final)


def postprocess(raw, frame, model, cfg):
    return run_postprocess(raw, frame, model, cfg).final
