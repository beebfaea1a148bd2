from django import forms

from .exceptions import ConfigurationError
from .harness import SWEEP_VARIABLES, ExperimentConfig
from .schemes import SCHEMES

import logging

logger = logging.getLogger(__name__)


class FloatListField(forms.CharField):
    """Comma separated floats; ``length`` fixes the count when given"""

    def __init__(self, *args, length=None, **kwargs):
        self.length = length
        super().__init__(*args, **kwargs)

    def to_python(self, value):
        value = super().to_python(value)
        if not value:
            return None
        try:
            numbers = tuple(float(part) for part in value.replace(";", ",").split(",") if part.strip())
        except ValueError:
            raise forms.ValidationError("Enter comma separated numbers")
        if self.length is not None and len(numbers) != self.length:
            raise forms.ValidationError(f"Expected {self.length} numbers, got {len(numbers)}")
        if not numbers:
            raise forms.ValidationError("Enter at least one number")
        return numbers


class SchemeListField(forms.CharField):
    def to_python(self, value):
        value = super().to_python(value)
        if not value:
            return None
        names = tuple(part.strip() for part in value.split(",") if part.strip())
        unknown = [name for name in names if name not in SCHEMES]
        if unknown:
            raise forms.ValidationError(
                f"Unknown scheme(s) {', '.join(unknown)}; choose from {', '.join(SCHEMES)}"
            )
        return names


class SwitchField(forms.CharField):
    TRUE = ("1", "true", "yes", "on")
    FALSE = ("0", "false", "no", "off")

    def to_python(self, value):
        value = super().to_python(value)
        if not value:
            return None
        if value.lower() in self.TRUE:
            return True
        if value.lower() in self.FALSE:
            return False
        raise forms.ValidationError("Enter true or false")


class ExperimentConfigForm(forms.Form):
    """Validates flat ``key = value`` experiment input.

    Every field is optional; missing keys keep the ExperimentConfig default.
    Keys that are not ExperimentConfig fields are rejected.
    """
    ap_position = FloatListField(required=False, length=3)
    bob_position = FloatListField(required=False, length=3)
    eve_position = FloatListField(required=False, length=3)
    fris_center = FloatListField(required=False, length=3)
    fris_axis = FloatListField(required=False, length=3)
    ap_axis = FloatListField(required=False, length=3)
    aperture = forms.FloatField(required=False, min_value=1e-9)
    wavelength = forms.FloatField(required=False, min_value=1e-9)
    reference_loss_db = forms.FloatField(required=False)
    exponent_ap_fris = forms.FloatField(required=False, min_value=1e-9)
    exponent_other = forms.FloatField(required=False, min_value=1e-9)
    blockage_db = forms.FloatField(required=False)
    rician_k_db = forms.FloatField(required=False)
    noise_power_dbm = forms.FloatField(required=False)
    num_antennas = forms.IntegerField(required=False, min_value=1)
    num_locations = forms.IntegerField(required=False, min_value=2)
    num_active = forms.IntegerField(required=False, min_value=1)
    phase_bits = forms.IntegerField(required=False, min_value=1, max_value=16)
    power_dbm = forms.FloatField(required=False)
    trials = forms.IntegerField(required=False, min_value=1)
    base_seed = forms.IntegerField(required=False, min_value=0, max_value=2 ** 63 - 1)
    schemes = SchemeListField(required=False)
    sweep_variable = forms.ChoiceField(required=False, choices=[(v, v) for v in SWEEP_VARIABLES])
    sweep_values = FloatListField(required=False)
    ceo_sample_size = forms.IntegerField(required=False, min_value=2)
    ceo_elite_ratio = forms.FloatField(required=False, min_value=1e-9, max_value=1.0)
    ceo_smoothing = forms.FloatField(required=False, min_value=1e-9, max_value=1.0)
    ceo_max_iters = forms.IntegerField(required=False, min_value=1)
    ceo_patience = forms.IntegerField(required=False, min_value=1)
    final_phase_polish = SwitchField(required=False)
    ao_max_iters = forms.IntegerField(required=False, min_value=1)
    ao_rel_tolerance = forms.FloatField(required=False, min_value=1e-15)
    output = forms.CharField(required=False)

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.config = None

    def clean(self):
        cleaned_data = super().clean()
        unknown = sorted(set(self.data) - set(self.fields))
        if unknown:
            raise forms.ValidationError(f"Unknown key(s): {', '.join(unknown)}")
        if self.errors:
            return cleaned_data

        overrides = {key: value for key, value in cleaned_data.items()
                     if value is not None and value != ""}
        try:
            self.config = ExperimentConfig(**overrides)
        except (ConfigurationError, ValueError) as exc:
            raise forms.ValidationError(str(exc))

        logger.debug(f"Validated experiment config with {len(overrides)} overrides")
        return cleaned_data

    def to_config(self):
        if self.config is None:
            raise ConfigurationError("form has not been validated")
        return self.config
