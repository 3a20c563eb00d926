from django import forms
from django.conf import settings

from .detect import DetectorConfig
from .lss import LssParams
from .postprocess import PostprocessConfig
from .utils import UsageError

__all__ = [
    'RunConfig',
    'RunConfigForm',
    'read_config_file',
]

FLAG_KEYS = ('emit_raw_masks', 'emit_core_border')
TRUE_STRINGS = ('1', 'true', 'yes', 'on')
FALSE_STRINGS = ('', '0', 'false', 'no', 'off')


class RunConfigForm(forms.Form):
    """
    Validates a merged run configuration (settings defaults, config file,
    command-line flags).
    """
    patch_size = forms.IntegerField(
        min_value=3,
        help_text='Side of the compared patch in pixels (odd).',
    )
    region_radius = forms.IntegerField(
        min_value=2,
        help_text='Radius of the correlation region in pixels.',
    )
    angle_bins = forms.IntegerField(min_value=1)
    radial_bins = forms.IntegerField(min_value=1)
    noise_variance = forms.FloatField(
        min_value=0,
        required=False,
        help_text='Lower bound of the surface normalisation (blank: 25 × patch_size²).',
    )
    component_scale = forms.FloatField(min_value=0)
    train_threshold = forms.FloatField(
        min_value=0,
        help_text='Descriptor distance under which a training frame joins a cluster.',
    )
    detect_threshold = forms.FloatField(
        min_value=0,
        help_text='Descriptor distance over which a pixel is foreground.',
    )
    close_radius = forms.IntegerField(min_value=0)
    erode_radius = forms.IntegerField(min_value=0)
    border_dilate_radius = forms.IntegerField(
        min_value=0,
        required=False,
        help_text='Width of the border band (blank: region_radius).',
    )
    color_threshold = forms.FloatField(min_value=0)
    final_erode_radius = forms.IntegerField(min_value=0)
    final_close_radius = forms.IntegerField(min_value=0)
    emit_raw_masks = forms.BooleanField(required=False)
    emit_core_border = forms.BooleanField(required=False)
    workers = forms.IntegerField(min_value=1)

    input = forms.CharField(required=False, empty_value=None)
    model = forms.CharField(required=False, empty_value=None)
    output = forms.CharField(required=False, empty_value=None)
    report = forms.CharField(required=False, empty_value=None)
    method = forms.CharField(required=False, empty_value=None)
    train_first = forms.IntegerField(min_value=1, required=False)
    train_last = forms.IntegerField(min_value=1, required=False)
    detect_first = forms.IntegerField(min_value=1, required=False)
    detect_last = forms.IntegerField(min_value=1, required=False)

    def clean_patch_size(self):
        patch_size = self.cleaned_data['patch_size']
        if patch_size % 2 == 0:
            raise forms.ValidationError('Patch size must be odd.')
        return patch_size

    def clean_component_scale(self):
        scale = self.cleaned_data['component_scale']
        if scale <= 0:
            raise forms.ValidationError('Component scale must be positive.')
        return scale

    def clean_detect_threshold(self):
        threshold = self.cleaned_data['detect_threshold']
        if threshold <= 0:
            raise forms.ValidationError('Detection threshold must be positive.')
        return threshold

    def clean(self):
        cleaned_data = super().clean()

        patch_size = cleaned_data.get('patch_size')
        region_radius = cleaned_data.get('region_radius')
        if patch_size and region_radius is not None:
            minimum = (patch_size - 1) // 2 + 1
            if region_radius < minimum:
                self.add_error(
                    'region_radius',
                    'Region radius must be at least %d for patch size %d.' % (minimum, patch_size),
                )

        for first, last in (('train_first', 'train_last'), ('detect_first', 'detect_last')):
            if (
                cleaned_data.get(first) is not None
                and cleaned_data.get(last) is not None
                and cleaned_data[last] < cleaned_data[first]
            ):
                self.add_error(last, 'Frame range is empty.')

        return cleaned_data


class RunConfig:
    """
    Validated parameters of a pipeline run.
    """
    def __init__(self, values):
        self.values = values
        self.lss_params = LssParams(
            patch_size=values['patch_size'],
            region_radius=values['region_radius'],
            angle_bins=values['angle_bins'],
            radial_bins=values['radial_bins'],
            noise_variance=values['noise_variance'],
            component_scale=values['component_scale'],
        )
        self.train_threshold = values['train_threshold']
        self.detector = DetectorConfig(values['detect_threshold'])
        self.emit_raw_masks = values['emit_raw_masks']
        self.emit_core_border = values['emit_core_border']
        self.workers = values['workers']

    def postprocess_for(self, params):
        """
        Refinement settings for a model trained with `params`. A blank
        border width follows the model's region radius.
        """
        border_dilate_radius = self.values['border_dilate_radius']
        if border_dilate_radius is None:
            border_dilate_radius = params.region_radius
        return PostprocessConfig(
            close_radius=self.values['close_radius'],
            erode_radius=self.values['erode_radius'],
            border_dilate_radius=border_dilate_radius,
            color_threshold=self.values['color_threshold'],
            final_erode_radius=self.values['final_erode_radius'],
            final_close_radius=self.values['final_close_radius'],
        )

    def __getattr__(self, item):
        # Paths and frame ranges.
        try:
            return self.__dict__['values'][item]
        except KeyError:
            raise AttributeError(item) from None

    @classmethod
    def from_sources(cls, config_path=None, overrides=None):
        """
        Merge settings defaults, an optional config file and flag overrides
        (None values are ignored), then validate.
        """
        data = dict(settings.LSSBG_DEFAULTS)
        if config_path:
            data.update(read_config_file(config_path))
        for key, value in (overrides or {}).items():
            if value is not None:
                data[key] = value
        for key in FLAG_KEYS:
            data[key] = _parse_flag(key, data.get(key))

        form = RunConfigForm(data)
        if not form.is_valid():
            raise UsageError(dict(form.errors))
        return cls(form.cleaned_data)


def _parse_flag(key, value):
    if value is None or isinstance(value, bool):
        return bool(value)
    lowered = str(value).strip().lower()
    if lowered in TRUE_STRINGS:
        return True
    if lowered in FALSE_STRINGS:
        return False
    raise UsageError({key: ["Enter true or false, not \"%s\"." % value]})


def read_config_file(path):
    """
    Parse `key = value` lines. Blank lines and lines starting with # are
    skipped; keys must be known form fields.
    """
    known = set(RunConfigForm.base_fields)
    values = {}
    with open(path) as fh:
        for number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            if '=' not in line:
                raise UsageError('%s line %d: expected "key = value".' % (path, number))
            key, value = (part.strip() for part in line.split('=', 1))
            if key not in known:
                raise UsageError('%s line %d: unknown key "%s".' % (path, number, key))
            values[key] = value
    return values
