# analyzers/fourier_analyzer.py - Sampled Fourier transform on the periodic box

from typing import Callable, Tuple, Union

import numpy as np
from scipy import fft as sp_fft

from exceptions import GridMismatchError, NonFiniteError
from models.grid import GridSpec, SampledField, Spectrum
from utils.logger import get_logger
from utils.validators import validate_finite

logger = get_logger(__name__)

FFT_WORKERS = 1

Generator = Callable[[np.ndarray], np.ndarray]


def _sign_pattern(spec: GridSpec) -> np.ndarray:
    """(-1)^(m_1 + ... + m_n) over the centered frequency indices."""
    axis = np.where(spec.freq_indices() % 2 == 0, 1.0, -1.0)
    pattern = np.ones(spec.shape)
    for j in range(spec.dim):
        shape = [1] * spec.dim
        shape[j] = spec.samples
        pattern = pattern * axis.reshape(shape)
    return pattern


class FourierAnalyzer:
    """
    Fourier transform with the (2*pi)^(-n/2) normalization realised on the grid.

    Nodes x_j = -L + j*h and xi_m = m*pi/L make e^{-i x_j xi_m} factor into
    (-1)^m times the DFT kernel, so both directions are one FFT plus a sign
    pattern. The library's native frequency ordering never leaves this class.
    """

    @staticmethod
    def forward_transform(f: SampledField) -> Spectrum:
        """
        Riemann-sum Fourier transform (2*pi)^(-n/2) h^n sum_j f(x_j) e^{-i x_j . xi_m}.

        Args:
            f: Sampled field

        Returns:
            Spectrum on the centered frequency nodes
        """
        spec = f.spec
        scale = (2.0 * np.pi) ** (-spec.dim / 2.0) * spec.cell_volume
        raw = sp_fft.fftshift(sp_fft.fftn(f.values, workers=FFT_WORKERS))
        return Spectrum(spec, scale * _sign_pattern(spec) * raw)

    @staticmethod
    def inverse_transform(F: Spectrum) -> SampledField:
        """
        Inverse (2*pi)^(-n/2) dxi^n sum_m F(xi_m) e^{i x_j . xi_m}.

        Args:
            F: Spectrum

        Returns:
            Sampled field on the spatial nodes
        """
        spec = F.spec
        scale = (2.0 * np.pi) ** (-spec.dim / 2.0) * spec.freq_cell_volume * spec.size
        raw = sp_fft.ifftn(sp_fft.ifftshift(_sign_pattern(spec) * F.values), workers=FFT_WORKERS)
        return SampledField(spec, scale * raw)

    @staticmethod
    def sample_function(spec: GridSpec, gen: Generator) -> SampledField:
        """
        Sample a closed-form generator at every spatial node.

        Args:
            spec: Grid
            gen: Callable mapping points of shape (..., n) to values of shape (...)

        Returns:
            Sampled field with values[j] = gen(x_j)
        """
        points = spec.spatial_points()
        values = np.broadcast_to(np.asarray(gen(points), dtype=complex), spec.shape)
        is_valid, error = validate_finite(values, 'generator output')
        if not is_valid:
            raise NonFiniteError(error, operation='sample_function')
        return SampledField(spec, np.array(values))

    @staticmethod
    def band_multiply(F: Spectrum, w: Union[Spectrum, np.ndarray]) -> Spectrum:
        """
        Pointwise product of a spectrum with a window sampled on the same frequency nodes.

        Args:
            F: Spectrum
            w: Window values (array of grid shape) or Spectrum on the same grid

        Returns:
            Windowed spectrum
        """
        if isinstance(w, Spectrum):
            if w.spec != F.spec:
                raise GridMismatchError("Window lives on a different grid", expected=F.spec, actual=w.spec)
            w = w.values
        w = np.asarray(w)
        if w.shape != F.spec.shape:
            raise GridMismatchError("Window shape differs from the frequency grid", expected=F.spec.shape, actual=w.shape)
        return Spectrum(F.spec, F.values * w)

    @staticmethod
    def plancherel_sums(f: SampledField) -> Tuple[float, float]:
        """Return (h^n sum |f|^2, dxi^n sum |f^|^2)."""
        spatial = float(f.spec.cell_volume * (np.abs(f.values) ** 2).sum())
        return spatial, FourierAnalyzer.forward_transform(f).energy()

    @staticmethod
    def inner_product(f: SampledField, g: SampledField) -> complex:
        """Grid inner product h^n sum f * conj(g)."""
        if f.spec != g.spec:
            raise GridMismatchError("Fields live on different grids", expected=f.spec, actual=g.spec)
        return complex(f.spec.cell_volume * np.sum(f.values * np.conj(g.values)))

    @staticmethod
    def l2_norm(f: SampledField) -> float:
        return float(np.sqrt(f.spec.cell_volume * (np.abs(f.values) ** 2).sum()))

    @staticmethod
    def tail_mass(F: Spectrum, radius: float) -> float:
        """Fraction of spectral energy at |xi| > radius (0 for the zero spectrum)."""
        energy = np.abs(F.values) ** 2
        total = energy.sum()
        if total == 0:
            return 0.0
        outside = F.spec.frequency_radius() > radius
        return float(energy[outside].sum() / total)

    @staticmethod
    def boundary_level(f: SampledField) -> float:
        """Largest |f| on the faces of the box relative to sup |f| (0 for the zero field)."""
        if f.sup_norm == 0:
            return 0.0
        modulus = np.abs(f.values)
        level = 0.0
        for axis in range(f.spec.dim):
            level = max(level, float(np.take(modulus, 0, axis=axis).max()),
                        float(np.take(modulus, -1, axis=axis).max()))
        return level / f.sup_norm
