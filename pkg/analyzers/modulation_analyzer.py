# analyzers/modulation_analyzer.py - Mixed-norm alpha-modulation and Besov quasi-norms

import math
from functools import lru_cache
from typing import Optional

import numpy as np
import pandas as pd

from config import TAIL_MASS_LIMIT
from exceptions import GuardError, ParameterError
from models.bapu import BapuFamily
from models.covering import CoveringParams
from models.grid import GridSpec, SampledField
from models.space import MixedExponents, SpaceParams
from analyzers.bapu_analyzer import BapuAnalyzer
from analyzers.bump_functions import smooth_step
from analyzers.covering_analyzer import CoveringAnalyzer
from analyzers.fourier_analyzer import FourierAnalyzer
from analyzers.lebesgue_analyzer import mixed_norm_array
from utils.logger import get_logger

logger = get_logger(__name__)


@lru_cache(maxsize=16)
def cached_bapu(params: CoveringParams, grid: GridSpec) -> BapuFamily:
    """Partition family for (covering parameters, grid), built once per process."""
    return BapuAnalyzer.build_bapu(CoveringAnalyzer.build_covering(params, grid))


def lq_combine(terms: np.ndarray, q: float) -> float:
    """l^q quasi-norm of nonnegative terms (q = inf is the maximum)."""
    terms = np.asarray(terms, dtype=float)
    if terms.size == 0:
        return 0.0
    if math.isinf(q):
        return float(terms.max())
    return float((terms ** q).sum() ** (1.0 / q))


class ModulationAnalyzer:
    """Band decomposition and mixed-norm alpha-modulation quasi-norms of sampled fields."""

    @staticmethod
    def family_for(space: SpaceParams, grid: GridSpec, bapu: Optional[BapuFamily] = None) -> BapuFamily:
        if bapu is None:
            return cached_bapu(CoveringParams(space.alpha), grid)
        if bapu.grid != grid:
            raise ParameterError("partition was built for another grid", parameter='bapu', value=bapu.grid)
        if not math.isclose(bapu.alpha, space.alpha):
            raise ParameterError("partition alpha differs from the space alpha", parameter='alpha', value=bapu.alpha)
        return bapu

    @staticmethod
    def band_project(f: SampledField, index, bapu: BapuFamily) -> SampledField:
        """f_k = F^-1(psi_k f^)."""
        window = bapu.window(index)
        F = FourierAnalyzer.forward_transform(f)
        return FourierAnalyzer.inverse_transform(FourierAnalyzer.band_multiply(F, window.values))

    @staticmethod
    def check_tail(f: SampledField, margin: float) -> float:
        F = FourierAnalyzer.forward_transform(f)
        tail = FourierAnalyzer.tail_mass(F, margin * f.spec.nyquist)
        if tail > TAIL_MASS_LIMIT:
            raise GuardError(f"spectral energy fraction {tail:.3e} beyond the covered ball", guard='spectral_tail')
        return tail

    @staticmethod
    def band_profile(f: SampledField, space: SpaceParams, bapu: Optional[BapuFamily] = None,
                     check_tail: bool = True) -> pd.DataFrame:
        """
        Per-band contributions to the modulation quasi-norm.

        Args:
            f: Sampled field
            space: Space parameters (alpha, s, p, q)
            bapu: Partition family (built and cached when omitted)
            check_tail: Enforce the spectral tail guard on f

        Returns:
            DataFrame with columns k, a_k, band_norm, weighted_term
        """
        bapu = ModulationAnalyzer.family_for(space, f.spec, bapu)
        if space.p.dim != f.spec.dim:
            raise ParameterError("exponent vector length differs from field dimension", parameter='p', value=space.p.p)
        if check_tail:
            ModulationAnalyzer.check_tail(f, bapu.covering.params.margin)

        F = FourierAnalyzer.forward_transform(f)
        rows = []
        for window in bapu:
            band = FourierAnalyzer.inverse_transform(FourierAnalyzer.band_multiply(F, window.values))
            band_norm = mixed_norm_array(np.abs(band.values), f.spec.step, space.p.p)
            rows.append({
                'k': window.patch.label(),
                'a_k': window.scale,
                'band_norm': band_norm,
                'weighted_term': window.scale ** space.s * band_norm,
            })
        return pd.DataFrame(rows, columns=['k', 'a_k', 'band_norm', 'weighted_term'])

    @staticmethod
    def modulation_norm(f: SampledField, space: SpaceParams, bapu: Optional[BapuFamily] = None,
                        check_tail: bool = True) -> float:
        """
        ||f||_{M^{s,alpha}_{p,q}} = || (a_k^s ||f_k||_p)_k ||_{l^q}.

        Args:
            f: Sampled field
            space: Space parameters
            bapu: Partition family (built and cached when omitted)
            check_tail: Enforce the spectral tail guard on f

        Returns:
            Nonnegative quasi-norm
        """
        if f.sup_norm == 0:
            return 0.0
        profile = ModulationAnalyzer.band_profile(f, space, bapu, check_tail)
        value = lq_combine(profile['weighted_term'].to_numpy(), space.q)
        logger.debug(f"modulation norm {space.label()}: {value:.6g}")
        return value

    @staticmethod
    def besov_norm(f: SampledField, s: float, p: MixedExponents, q: float) -> float:
        """
        Dyadic Besov quasi-norm from telescoping Littlewood-Paley windows.

        Delta_0 = phi0(|xi|), Delta_j = phi0(2^-j |xi|) - phi0(2^(1-j) |xi|),
        weighted by (1 + 4^j)^(s/2) for j >= 1 and by 1 for the low band.
        """
        spec = f.spec
        if p.dim != spec.dim:
            raise ParameterError("exponent vector length differs from field dimension", parameter='p', value=p.p)
        if f.sup_norm == 0:
            return 0.0
        radius = spec.frequency_radius()
        top = max(1, int(math.ceil(math.log2(math.sqrt(spec.dim) * spec.nyquist))))
        F = FourierAnalyzer.forward_transform(f)
        terms = []
        previous = np.zeros(spec.shape)
        for j in range(top + 1):
            current = smooth_step(radius / 2.0 ** j)
            band = FourierAnalyzer.inverse_transform(FourierAnalyzer.band_multiply(F, np.maximum(current - previous, 0.0)))
            weight = 1.0 if j == 0 else (1.0 + 4.0 ** j) ** (s / 2.0)
            terms.append(weight * mixed_norm_array(np.abs(band.values), spec.step, p.p))
            previous = current
        return lq_combine(np.array(terms), q)
