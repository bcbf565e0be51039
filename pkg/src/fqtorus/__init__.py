"""Fourier quasicrystals and almost periodic point sets of toral type.

Exponential polynomials pulled back from Laurent polynomials on a torus,
their real zero sets, the compactified curve on T^2 and its measure.
"""

from .cutproject import CutProjectConfig, dilation_check, generate, kappa_coeff_closed_form
from .rootfind import (WeightedPointSet, complex_root_count, density_complex, is_real_rooted,
                       real_roots)
from .spectrum import (SpectrumTable, bohr_coefficient, difference_residual, kappa_hat_points,
                       spectrum_scan)
from .torus_core import (CompactificationMap, LatticeSubgroup, annihilator_basis,
                         check_rational_independence, project, projective_index)
from .torus_curve import (CurveComponent, HomotopyData, homotopy_density, kappa_hat_integral,
                          real_form, trace_components, transversality)
from .trigpoly import (ExpPoly1D, LaurentPoly, eval_entire, eval_torus, is_self_dual,
                       is_stable_sampled, pullback)

__version__ = "0.1.0"
