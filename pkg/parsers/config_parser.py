# parsers/config_parser.py - Run configuration parsing

import json
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from config import CALIBRATION, GRID_DEFAULTS, MAX_DIM
from exceptions import ConfigError, LabError
from models.grid import GridSpec
from models.run_config import (
    EXPERIMENTS, FORMATS, SWEEP_KEYS, CoveringSettings, ExperimentSettings, OutputSettings, RunConfig,
    SymbolSettings,
)
from models.space import MixedExponents, SpaceParams
from utils.logger import get_logger

logger = get_logger(__name__)

ALLOWED_KEYS = {
    'grid': {'dim', 'half_width', 'samples'},
    'space': {'alpha', 's', 'p', 'q'},
    'covering': {'A', 'kmax', 'margin'},
    'symbol': {'name', 'b', 'rho', 'c', 'gamma', 'axis', 'offset'},
    'experiment': {'name', 'b', 'theta', 'p_grid', 'members'} | {f"sweep_{key}" for key in SWEEP_KEYS},
    'output': {'directory', 'format', 'jobs'},
}


def parse_number(text: str, key: str) -> float:
    """Parse a float, accepting inf."""
    value = text.strip().lower()
    if value in ('inf', '+inf', 'infinity'):
        return math.inf
    try:
        number = float(value)
    except ValueError:
        raise ConfigError(f"expected a number, got '{text}'", key=key, value=text)
    if math.isnan(number):
        raise ConfigError("NaN is not a valid value", key=key, value=text)
    return number


def parse_integer(text: str, key: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"expected an integer, got '{text}'", key=key, value=text)


def parse_list(text: str, key: str) -> List[float]:
    """Comma-separated numbers; an empty value is an empty list."""
    return [parse_number(item, key) for item in text.split(',') if item.strip()]


def parse_vectors(text: str, key: str) -> List[List[float]]:
    """Semicolon-separated exponent vectors, e.g. '2,2; 2,4'."""
    return [parse_list(chunk, key) for chunk in text.split(';') if chunk.strip()]


class RunConfigParser:
    """Parser for `section.key = value` run configurations."""

    @staticmethod
    def parse(text: str) -> Tuple[Optional[RunConfig], Optional[str]]:
        """
        Parse configuration text and validate every value.

        Args:
            text: Configuration text

        Returns:
            Tuple of (RunConfig or None, error message or None)
        """
        try:
            raw = RunConfigParser._read_pairs(text)
            return RunConfigParser._build(raw), None
        except ConfigError as e:
            logger.error(f"Config parsing failed: {str(e)}")
            return None, str(e)
        except LabError as e:
            # model validation (grid, exponents, alpha) reports through the same channel
            error_msg = f"Invalid configuration: {str(e)}"
            logger.error(error_msg)
            return None, error_msg

    @staticmethod
    def load(path: str) -> RunConfig:
        """Read and parse a configuration file, raising ConfigError on any problem."""
        try:
            text = Path(path).read_text(encoding='utf-8')
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}", key='config', value=str(path))
        config, error = RunConfigParser.parse(text)
        if error:
            raise ConfigError(error, key='config', value=str(path))
        return config

    @staticmethod
    def _read_pairs(text: str) -> Dict[str, Dict[str, str]]:
        raw: Dict[str, Dict[str, str]] = {}
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigError(f"line {number}: expected 'section.key = value'", key=line)
            name, value = (part.strip() for part in line.split('=', 1))
            if '.' not in name:
                raise ConfigError(f"line {number}: key must be qualified by a section", key=name)
            section, key = name.split('.', 1)
            if section not in ALLOWED_KEYS:
                raise ConfigError(f"line {number}: unknown section '{section}'", key=name)
            if key not in ALLOWED_KEYS[section]:
                raise ConfigError(f"line {number}: unknown key '{key}' in section '{section}'", key=name)
            if key in raw.get(section, {}):
                raise ConfigError(f"line {number}: duplicate key", key=name)
            raw.setdefault(section, {})[key] = value
        return raw

    @staticmethod
    def _build(raw: Dict[str, Dict[str, str]]) -> RunConfig:
        grid = RunConfigParser._grid(raw.get('grid', {}))
        space = RunConfigParser._space(raw.get('space', {}), grid.dim)
        config = RunConfig(
            grid=grid,
            space=space,
            covering=RunConfigParser._covering(raw.get('covering', {})),
            symbol=RunConfigParser._symbol(raw.get('symbol', {})),
            experiment=RunConfigParser._experiment(raw.get('experiment', {}), grid.dim),
            output=RunConfigParser._output(raw.get('output', {})),
        )
        logger.info(f"Parsed config: grid {grid.shape}, space {space.label()}")
        return config

    @staticmethod
    def _grid(section: Dict[str, str]) -> GridSpec:
        dim = parse_integer(section.get('dim', '1'), 'grid.dim')
        if dim not in GRID_DEFAULTS:
            raise ConfigError(f"dim must lie in 1..{MAX_DIM}", key='grid.dim', value=dim)
        default_width, default_samples = GRID_DEFAULTS[dim]
        half_width = parse_number(section['half_width'], 'grid.half_width') if 'half_width' in section else default_width
        samples = parse_integer(section['samples'], 'grid.samples') if 'samples' in section else default_samples
        if samples <= 0 or samples % 2:
            raise ConfigError("samples must be an even positive integer", key='grid.samples', value=samples)
        if not (math.isfinite(half_width) and half_width > 0):
            raise ConfigError("half_width must be positive and finite", key='grid.half_width', value=half_width)
        return GridSpec(dim, half_width, samples)

    @staticmethod
    def _exponents(values: List[float], dim: int, key: str) -> MixedExponents:
        if len(values) == 1:
            values = values * dim
        if len(values) != dim:
            raise ConfigError(f"expected {dim} exponents, got {len(values)}", key=key, value=values)
        if any(v <= 0 for v in values):
            raise ConfigError("exponents must be positive", key=key, value=values)
        return MixedExponents(tuple(values))

    @staticmethod
    def _space(section: Dict[str, str], dim: int) -> SpaceParams:
        alpha = parse_number(section.get('alpha', '0.5'), 'space.alpha')
        s = parse_number(section.get('s', '0'), 'space.s')
        q = parse_number(section.get('q', '2'), 'space.q')
        if not 0.0 <= alpha <= 1.0:
            raise ConfigError("alpha must lie in [0, 1]", key='space.alpha', value=alpha)
        if not q > 0:
            raise ConfigError("q must lie in (0, inf]", key='space.q', value=q)
        if not math.isfinite(s):
            raise ConfigError("s must be finite", key='space.s', value=s)
        p = RunConfigParser._exponents(parse_list(section.get('p', '2'), 'space.p'), dim, 'space.p')
        return SpaceParams(alpha, s, p, q)

    @staticmethod
    def _covering(section: Dict[str, str]) -> CoveringSettings:
        defaults = CoveringSettings()
        text = section.get('A', 'auto').strip().lower()
        radius_factor = None if text == 'auto' else parse_number(text, 'covering.A')
        if radius_factor is not None and not (math.isfinite(radius_factor) and radius_factor > 0):
            raise ConfigError("A must be positive or 'auto'", key='covering.A', value=radius_factor)
        kmax = parse_integer(section['kmax'], 'covering.kmax') if 'kmax' in section else defaults.kmax
        if kmax < 1:
            raise ConfigError("kmax must be at least 1", key='covering.kmax', value=kmax)
        margin = parse_number(section['margin'], 'covering.margin') if 'margin' in section else defaults.margin
        if not 0.0 < margin <= 1.0:
            raise ConfigError("margin must lie in (0, 1]", key='covering.margin', value=margin)
        return CoveringSettings(radius_factor, kmax, margin)

    @staticmethod
    def _symbol(section: Dict[str, str]) -> SymbolSettings:
        name = section.get('name', 'identity').strip()
        params = tuple(sorted(
            (key, parse_number(value, f"symbol.{key}")) for key, value in section.items() if key != 'name'
        ))
        return SymbolSettings(name, params)

    @staticmethod
    def _experiment(section: Dict[str, str], dim: int) -> ExperimentSettings:
        defaults = ExperimentSettings()
        name = section.get('name')
        if name is not None:
            name = name.strip()
            if name not in EXPERIMENTS:
                raise ConfigError(f"experiment must be one of {EXPERIMENTS}", key='experiment.name', value=name)
        b = parse_number(section['b'], 'experiment.b') if 'b' in section else defaults.b
        thetas = tuple(parse_list(section['theta'], 'experiment.theta')) if 'theta' in section else defaults.thetas
        if any(not theta > 0 for theta in thetas):
            raise ConfigError("theta must be positive", key='experiment.theta', value=thetas)
        p_grid = tuple(
            RunConfigParser._exponents(vector, dim, 'experiment.p_grid')
            for vector in parse_vectors(section.get('p_grid', ''), 'experiment.p_grid')
        )
        members = parse_integer(section['members'], 'experiment.members') if 'members' in section else defaults.members
        if members < 1:
            raise ConfigError("members must be positive", key='experiment.members', value=members)

        sweep = []
        for key in SWEEP_KEYS:
            text = section.get(f"sweep_{key}")
            if text is None:
                continue
            if key == 'p':
                values = tuple(RunConfigParser._exponents(v, dim, 'experiment.sweep_p')
                               for v in parse_vectors(text, 'experiment.sweep_p'))
            else:
                values = tuple(parse_list(text, f"experiment.sweep_{key}"))
            if key == 'alpha' and any(not 0.0 <= v <= 1.0 for v in values):
                raise ConfigError("alpha must lie in [0, 1]", key='experiment.sweep_alpha', value=values)
            if key == 'q' and any(not v > 0 for v in values):
                raise ConfigError("q must lie in (0, inf]", key='experiment.sweep_q', value=values)
            if key == 'rho' and any(not 0.0 < v <= 1.0 for v in values):
                raise ConfigError("rho must lie in (0, 1]", key='experiment.sweep_rho', value=values)
            sweep.append((key, values))
        return ExperimentSettings(name, b, thetas, p_grid, members, tuple(sweep))

    @staticmethod
    def _output(section: Dict[str, str]) -> OutputSettings:
        defaults = OutputSettings()
        fmt = section.get('format', defaults.fmt).strip().lower()
        if fmt not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}", key='output.format', value=fmt)
        jobs = parse_integer(section['jobs'], 'output.jobs') if 'jobs' in section else defaults.jobs
        if jobs < 1:
            raise ConfigError("jobs must be positive", key='output.jobs', value=jobs)
        return OutputSettings(section.get('directory', defaults.directory).strip(), fmt, jobs)


def load_calibration(path: Optional[str]) -> Dict[str, float]:
    """
    Calibration constants from a JSON file written by `calibrate`, or the committed ones.

    Args:
        path: JSON file path or None

    Returns:
        Dictionary with every CALIBRATION key
    """
    if path is None:
        return dict(CALIBRATION)
    try:
        data = json.loads(Path(path).read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read calibration file: {e}", key='calibration', value=str(path))
    constants = data.get('constants', data)
    unknown = set(constants) - set(CALIBRATION)
    if unknown:
        raise ConfigError(f"unknown calibration keys {sorted(unknown)}", key='calibration', value=str(path))
    merged = dict(CALIBRATION)
    for key, value in constants.items():
        if not isinstance(value, (int, float)) or not value > 0:
            raise ConfigError("calibration constants must be positive numbers", key=key, value=value)
        merged[key] = float(value)
    return merged
