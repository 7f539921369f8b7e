"""
Run configuration: an INI file with [run], [grid], [pulse], [propagator], [regions],
[relaxation], [calibration] and [scan] sections, each validated by a marshmallow schema
that rejects unknown keys. Missing sections take their defaults.
"""
import configparser
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from marshmallow import RAISE, Schema, ValidationError, fields, post_load, validate

from h2dion.analysis.regions import RegionSpec
from h2dion.analysis.spectrum import AccumulationMode
from h2dion.exceptions.simulation import ConfigurationException, H2DionException
from h2dion.laser.pulse import ENVELOPE_NAMES, PulseParams, total_duration_from_fwhm
from h2dion.numerics.grid import GridSpec
from h2dion.potentials.calibration import CalibrationConfig
from h2dion.propagation.propagator import PropagatorConfig
from h2dion.stationary.ground_state import RelaxationConfig


class FloatList(fields.Field):
    """
    Comma separated numbers; 'pi' multiples such as 0.5*pi are accepted.
    """

    def _deserialize(self, value, attr, data, **kwargs):
        if isinstance(value, (list, tuple)):
            items = value
        else:
            items = [item.strip() for item in str(value).split(',') if item.strip()]
        try:
            return [_parse_number(item) for item in items]
        except ValueError as e:
            raise ValidationError(f'Not a list of numbers: {value} ({e})')

    def _serialize(self, value, attr, obj, **kwargs):
        return ', '.join(repr(float(v)) for v in value) if value is not None else None


class Phase(fields.Field):
    def _deserialize(self, value, attr, data, **kwargs):
        try:
            return _parse_number(value)
        except ValueError:
            raise ValidationError(f'Not a phase: {value}')


def _parse_number(item) -> float:
    if isinstance(item, (int, float)):
        return float(item)
    text: str = str(item).replace(' ', '').lower()
    if 'pi' not in text:
        return float(text)
    # a*pi, a*pi/b or pi/b
    numerator, _, denominator = text.partition('/')
    factor: str = numerator.replace('*pi', '').replace('pi', '')
    return (float(factor) if factor else 1.0) * math.pi / (float(denominator) if denominator else 1.0)


class StrictSchema(Schema):
    class Meta:
        unknown = RAISE


class GridSchema(StrictSchema):
    n_r = fields.Integer(load_default=128)
    n_z1 = fields.Integer(load_default=256)
    n_z2 = fields.Integer(load_default=256)
    r_min = fields.Float(load_default=0.4)
    r_max = fields.Float(load_default=10.0)
    z_max = fields.Float(load_default=100.0)

    @post_load
    def make(self, data, **kwargs) -> GridSpec:
        return GridSpec(**data)


class PulseSchema(StrictSchema):
    intensity = fields.Float(required=True, validate=validate.Range(min=0.0))
    duration_fs = fields.Float(load_default=None, validate=validate.Range(min=0.0, min_inclusive=False))
    fwhm_fs = fields.Float(load_default=None, validate=validate.Range(min=0.0, min_inclusive=False))
    cep = Phase(load_default=0.0)
    wavelength_nm = fields.Float(load_default=800.0, validate=validate.Range(min=0.0, min_inclusive=False))
    envelope = fields.String(load_default='sin2', validate=validate.OneOf(list(ENVELOPE_NAMES)))

    @post_load
    def make(self, data, **kwargs) -> PulseParams:
        duration, fwhm = data.pop('duration_fs'), data.pop('fwhm_fs')
        if (duration is None) == (fwhm is None):
            raise ValidationError('Give exactly one of duration_fs (total) and fwhm_fs')
        return PulseParams(intensity=data['intensity'],
                           duration_fs=duration if duration is not None else total_duration_from_fwhm(fwhm),
                           cep=data['cep'], wavelength_nm=data['wavelength_nm'],
                           envelope=ENVELOPE_NAMES[data['envelope']])


class PropagatorSchema(StrictSchema):
    time_step_as = fields.Float(load_default=1.0)
    analysis_interval = fields.Integer(load_default=100)
    absorber_z_width = fields.Float(load_default=10.0)
    absorber_r_width = fields.Float(load_default=0.5)
    absorbers = fields.Boolean(load_default=True)
    tail_threshold = fields.Float(load_default=1e-6)
    tail_duration_factor = fields.Float(load_default=2.0)
    tail_extra_au = fields.Float(load_default=500.0)
    checkpoint_interval = fields.Integer(load_default=0)

    @post_load
    def make(self, data, **kwargs) -> PropagatorConfig:
        return PropagatorConfig(**data)


class RegionSchema(StrictSchema):
    z_a = fields.Float(load_default=20.0)

    @post_load
    def make(self, data, **kwargs) -> RegionSpec:
        return RegionSpec(**data)


class RelaxationSchema(StrictSchema):
    time_step = fields.Float(load_default=0.05)
    energy_threshold = fields.Float(load_default=1e-10)
    max_iterations = fields.Integer(load_default=100000)
    symmetrize_every = fields.Integer(load_default=1)
    energy_interval = fields.Integer(load_default=10)

    @post_load
    def make(self, data, **kwargs) -> RelaxationConfig:
        return RelaxationConfig(**data)


@dataclass(frozen=True)
class CalibrationSettings:
    r_min: float = 0.6
    r_max: float = 10.0
    samples: int = 32
    auto_build: bool = False
    solver: CalibrationConfig = field(default_factory=CalibrationConfig)

    @property
    def r_samples(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.samples)


class CalibrationSchema(StrictSchema):
    r_min = fields.Float(load_default=0.6)
    r_max = fields.Float(load_default=10.0)
    samples = fields.Integer(load_default=32, validate=validate.Range(min=1))
    auto_build = fields.Boolean(load_default=False)
    energy_tolerance = fields.Float(load_default=1e-6, validate=validate.Range(min=0.0))
    max_iterations = fields.Integer(load_default=100, validate=validate.Range(min=1))
    beta_low = fields.Float(load_default=0.05)
    beta_high = fields.Float(load_default=5.0)
    alpha_low = fields.Float(load_default=0.05)
    alpha_high = fields.Float(load_default=10.0)
    workers = fields.Integer(load_default=1, validate=validate.Range(min=1))

    @post_load
    def make(self, data, **kwargs) -> CalibrationSettings:
        solver: CalibrationConfig = CalibrationConfig(beta_bracket=(data['beta_low'], data['beta_high']),
                                                      alpha_bracket=(data['alpha_low'], data['alpha_high']),
                                                      energy_tolerance=data['energy_tolerance'],
                                                      max_iterations=data['max_iterations'],
                                                      workers=data['workers'])
        return CalibrationSettings(r_min=data['r_min'], r_max=data['r_max'], samples=data['samples'],
                                   auto_build=data['auto_build'], solver=solver)


SCAN_AXES: Tuple[str, ...] = ('duration', 'cep', 'intensity')


@dataclass(frozen=True)
class ScanSettings:
    axis: str
    values: Tuple[float, ...]
    durations: Tuple[float, ...] = ()


class ScanSchema(StrictSchema):
    axis = fields.String(required=True, validate=validate.OneOf(SCAN_AXES))
    values = FloatList(required=True)
    # the CEP scan repeats its phase values for each of these total durations (fs)
    durations = FloatList(load_default=[])

    @post_load
    def make(self, data, **kwargs) -> ScanSettings:
        if not data['values']:
            raise ValidationError('A scan needs at least one value')
        return ScanSettings(axis=data['axis'], values=tuple(data['values']), durations=tuple(data['durations']))


class RunSchema(StrictSchema):
    run_id = fields.String(load_default='run')
    output_dir = fields.String(load_default=None)
    softcore_table = fields.String(load_default='softcore_table.dat')
    ground_state = fields.String(load_default=None)
    accumulation_mode = fields.String(load_default=AccumulationMode.FLUX_RESIDUAL.value,
                                      validate=validate.OneOf([mode.value for mode in AccumulationMode]))
    seed = fields.Integer(load_default=0)
    overwrite = fields.Boolean(load_default=False)


SECTION_SCHEMAS: Dict[str, type] = {
    'run': RunSchema,
    'grid': GridSchema,
    'pulse': PulseSchema,
    'propagator': PropagatorSchema,
    'regions': RegionSchema,
    'relaxation': RelaxationSchema,
    'calibration': CalibrationSchema,
    'scan': ScanSchema,
}


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    pulse: PulseParams
    propagator: PropagatorConfig = field(default_factory=PropagatorConfig)
    regions: RegionSpec = field(default_factory=RegionSpec)
    relaxation: RelaxationConfig = field(default_factory=RelaxationConfig)
    calibration: CalibrationSettings = field(default_factory=CalibrationSettings)
    softcore_table: str = 'softcore_table.dat'
    output_dir: Optional[str] = None
    run_id: str = 'run'
    seed: int = 0
    ground_state: Optional[str] = None
    accumulation_mode: AccumulationMode = AccumulationMode.FLUX_RESIDUAL
    overwrite: bool = False
    scan: Optional[ScanSettings] = None
    sections: Dict[str, Dict[str, str]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.propagator.absorbers:
            try:
                self.grid.check_absorber_fits(self.regions.z_a, self.propagator.absorber_z_width)
            except H2DionException as e:
                raise ConfigurationException(e.message)
        self.propagator.check_grid(self.grid)

    def with_pulse(self, **changes) -> 'RunConfig':
        return replace(self, pulse=replace(self.pulse, **changes))

    def with_run(self, **changes) -> 'RunConfig':
        return replace(self, **changes)

    def describe(self) -> Dict[str, Any]:
        """
        Plain parameter dictionary for manifests.
        """
        return {
            'run_id': self.run_id,
            'grid': asdict(self.grid),
            'pulse': self.pulse.describe(),
            'propagator': asdict(self.propagator),
            'regions': asdict(self.regions),
            'relaxation': asdict(self.relaxation),
            'softcore_table': self.softcore_table,
            'ground_state': self.ground_state,
            'accumulation_mode': self.accumulation_mode.value,
            'seed': self.seed,
        }


def parse_overrides(overrides: Sequence[str]) -> List[Tuple[str, str, str]]:
    parsed: List[Tuple[str, str, str]] = []
    for override in overrides or []:
        key, separator, value = override.partition('=')
        section, dot, option = key.strip().partition('.')
        if not separator or not dot or not section or not option:
            raise ConfigurationException(f'Override "{override}" is not of the form section.key=value')
        parsed.append((section, option, value.strip()))
    return parsed


def _read_sections(path: Optional[str], overrides: Sequence[str]) -> Dict[str, Dict[str, str]]:
    parser: configparser.ConfigParser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))
    if path is not None:
        try:
            with open(path, 'r') as f:
                parser.read_file(f)
        except OSError as e:
            raise ConfigurationException(f'Cannot read config file {path}: {e}')
        except configparser.Error as e:
            raise ConfigurationException(f'Malformed config file {path}: {e}')

    for section, option, value in parse_overrides(overrides):
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, option, value)

    unknown: List[str] = [section for section in parser.sections() if section not in SECTION_SCHEMAS]
    if unknown:
        raise ConfigurationException(f'Unknown config section(s): {", ".join(unknown)}')

    return {section: dict(parser[section]) for section in parser.sections()}


def _load_section(sections: Dict[str, Dict[str, str]], name: str):
    try:
        return SECTION_SCHEMAS[name]().load(sections.get(name, {}))
    except ValidationError as e:
        raise ConfigurationException(f'Invalid [{name}] section: {e.messages}')
    except H2DionException as e:
        raise ConfigurationException(f'Invalid [{name}] section: {e.message}')


def load_run_config(path: Optional[str], overrides: Sequence[str] = ()) -> RunConfig:
    sections: Dict[str, Dict[str, str]] = _read_sections(path, overrides)
    if 'pulse' not in sections:
        raise ConfigurationException('The [pulse] section is required')

    run: Dict[str, Any] = _load_section(sections, 'run')
    return RunConfig(grid=_load_section(sections, 'grid'),
                     pulse=_load_section(sections, 'pulse'),
                     propagator=_load_section(sections, 'propagator'),
                     regions=_load_section(sections, 'regions'),
                     relaxation=_load_section(sections, 'relaxation'),
                     calibration=_load_section(sections, 'calibration'),
                     scan=_load_section(sections, 'scan') if 'scan' in sections else None,
                     softcore_table=run['softcore_table'],
                     output_dir=run['output_dir'],
                     run_id=run['run_id'],
                     seed=run['seed'],
                     ground_state=run['ground_state'],
                     accumulation_mode=AccumulationMode(run['accumulation_mode']),
                     overwrite=run['overwrite'],
                     sections=sections)


def dump_run_config(path: str, config: RunConfig) -> str:
    """
    Write the effective configuration back as INI; loading the file gives an equal RunConfig.
    """
    parser: configparser.ConfigParser = configparser.ConfigParser(interpolation=None)
    parser['run'] = {key: str(value) for key, value in {
        'run_id': config.run_id, 'output_dir': config.output_dir, 'softcore_table': config.softcore_table,
        'ground_state': config.ground_state, 'accumulation_mode': config.accumulation_mode.value,
        'seed': config.seed, 'overwrite': config.overwrite}.items() if value is not None}
    parser['grid'] = {key: repr(value) for key, value in asdict(config.grid).items()}
    parser['pulse'] = {'intensity': repr(config.pulse.intensity), 'duration_fs': repr(config.pulse.duration_fs),
                       'cep': repr(config.pulse.cep), 'wavelength_nm': repr(config.pulse.wavelength_nm),
                       'envelope': config.pulse.envelope.name.lower()}
    parser['propagator'] = {key: repr(value) for key, value in asdict(config.propagator).items()}
    parser['regions'] = {'z_a': repr(config.regions.z_a)}
    parser['relaxation'] = {key: repr(value) for key, value in asdict(config.relaxation).items()
                            if key in RelaxationSchema().fields}
    calibration: CalibrationSettings = config.calibration
    parser['calibration'] = {
        'r_min': repr(calibration.r_min), 'r_max': repr(calibration.r_max), 'samples': repr(calibration.samples),
        'auto_build': repr(calibration.auto_build), 'energy_tolerance': repr(calibration.solver.energy_tolerance),
        'max_iterations': repr(calibration.solver.max_iterations),
        'beta_low': repr(calibration.solver.beta_bracket[0]), 'beta_high': repr(calibration.solver.beta_bracket[1]),
        'alpha_low': repr(calibration.solver.alpha_bracket[0]),
        'alpha_high': repr(calibration.solver.alpha_bracket[1]), 'workers': repr(calibration.solver.workers)}
    if config.scan is not None:
        parser['scan'] = {'axis': config.scan.axis, 'values': ', '.join(repr(v) for v in config.scan.values),
                          'durations': ', '.join(repr(v) for v in config.scan.durations)}

    try:
        with open(path, 'w') as f:
            parser.write(f)
    except OSError as e:
        raise ConfigurationException(f'Cannot write config file {path}: {e}')
    return path
