# parsers/field_io.py - Sampled field files (CSV with header lines, or npz)

from pathlib import Path
from typing import Dict

import numpy as np
import pandas as pd

from config import CSV_FLOAT_FORMAT
from exceptions import ConfigError, GridMismatchError
from models.grid import GridSpec, SampledField
from utils.logger import get_logger

logger = get_logger(__name__)

FIELD_FORMATS = ('csv', 'npz')
HEADER_KEYS = ('dim', 'half_width', 'samples')


def _index_columns(dim: int):
    return [f"i_{j + 1}" for j in range(dim)]


def field_format(path: str) -> str:
    suffix = Path(path).suffix.lower().lstrip('.')
    return suffix if suffix in FIELD_FORMATS else 'csv'


def write_field(f: SampledField, path: str, fmt: str = None) -> Path:
    """
    Write a sampled field.

    CSV files start with `# key = value` header lines for the grid, followed
    by one row (i_1..i_n, re, im) per node in C order.

    Args:
        f: Field to write
        path: Destination file
        fmt: 'csv' or 'npz' (taken from the suffix when omitted)

    Returns:
        Path written
    """
    fmt = fmt or field_format(path)
    if fmt not in FIELD_FORMATS:
        raise ConfigError(f"field format must be one of {FIELD_FORMATS}", key='format', value=fmt)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = f.spec.header()

    if fmt == 'npz':
        np.savez(path, values=f.values, **{k: np.asarray(v) for k, v in header.items()})
        return path

    indices = np.indices(f.spec.shape).reshape(f.spec.dim, -1).T
    frame = pd.DataFrame(indices, columns=_index_columns(f.spec.dim))
    flat = f.values.reshape(-1)
    frame['re'] = flat.real
    frame['im'] = flat.imag
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        for key in HEADER_KEYS:
            handle.write(f"# {key} = {header[key]!r}\n")
        frame.to_csv(handle, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    logger.debug(f"Wrote field {f.spec.shape} to {path}")
    return path


def _read_header(path: Path) -> Dict[str, str]:
    header = {}
    with open(path, encoding='utf-8') as handle:
        for line in handle:
            if not line.startswith('#'):
                break
            key, _, value = line[1:].partition('=')
            header[key.strip()] = value.strip()
    return header


def read_field(path: str, expected: GridSpec = None) -> SampledField:
    """
    Read a field written by write_field.

    Args:
        path: Field file
        expected: Grid the field must live on (checked when given)

    Returns:
        SampledField on the grid named in the file header
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError("field file not found", key='input', value=str(path))
    try:
        if field_format(str(path)) == 'npz':
            with np.load(path) as data:
                spec = GridSpec(int(data['dim']), float(data['half_width']), int(data['samples']))
                values = np.asarray(data['values'], dtype=complex)
            if values.size != spec.size:
                raise GridMismatchError("field size disagrees with its header", expected=spec.size, actual=values.size)
            f = SampledField(spec, values.reshape(spec.shape))
        else:
            f = _read_csv(path)
    except (KeyError, ValueError) as e:
        logger.error(f"Malformed field file {path}: {e}")
        raise ConfigError(f"malformed field file: {e}", key='input', value=str(path))

    if expected is not None and f.spec != expected:
        raise GridMismatchError("field grid differs from the configured grid", expected=expected, actual=f.spec)
    return f


def _read_csv(path: Path) -> SampledField:
    header = _read_header(path)
    missing = [key for key in HEADER_KEYS if key not in header]
    if missing:
        raise ConfigError(f"field header lacks {missing}", key='input', value=str(path))
    spec = GridSpec(int(header['dim']), float(header['half_width']), int(header['samples']))
    frame = pd.read_csv(path, comment='#')
    columns = _index_columns(spec.dim) + ['re', 'im']
    if list(frame.columns) != columns:
        raise GridMismatchError("field columns disagree with the header dimension",
                                expected=columns, actual=list(frame.columns))
    if len(frame) != spec.size:
        raise GridMismatchError("field size disagrees with its header", expected=spec.size, actual=len(frame))

    indices = frame[columns[:-2]].to_numpy(dtype=int)
    if (indices < 0).any() or (indices >= spec.samples).any():
        raise GridMismatchError("node index outside the grid", expected=spec.shape, actual=indices.max())
    flat = np.ravel_multi_index(tuple(indices.T), spec.shape)
    if np.unique(flat).size != spec.size:
        raise GridMismatchError("duplicate node indices in field file", expected=spec.size, actual=np.unique(flat).size)
    values = np.empty(spec.size, dtype=complex)
    values[flat] = frame['re'].to_numpy(dtype=float) + 1j * frame['im'].to_numpy(dtype=float)
    return SampledField(spec, values.reshape(spec.shape))
