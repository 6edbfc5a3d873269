"""Numerical verification suite and simulator for pseudo-PT symmetric Dirac
spin dynamics: Foldy-Wouthuysen mean-spin expansion, pseudo-PT expectation
dynamics, and the Landau-Lifshitz-Gilbert magnetization bridge."""

from .algebra import SpinorMatrixSet, build_matrix_set
from .fields import FieldConfig, PhysicalParams
from .grids import DiscreteOperator, Grid, momentum_operator
from .hamiltonian import build_dirac_hamiltonian, maxwell_faraday_residual
from .ptsym import (PTOperator, SpinorField, pseudo_expectation, pt_apply,
                    pt_inner, pt_normalize, pseudo_pt_symmetry_residual)

__version__ = "0.1.0"
