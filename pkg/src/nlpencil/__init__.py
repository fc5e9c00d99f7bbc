"""Tangent spaces, deformation spaces, period Taylor series and jet smoothness
for Noether-Lefschetz loci of pencils of complete-intersection curves on
Fermat surfaces, in exact cyclotomic arithmetic."""

from __future__ import annotations

from .combinat import ExpVec, PencilSpec, count_pencil_specs, enumerate_pencil_specs, h20, index_set
from .cycles import CICycle, CycleCombo, PeriodMatrix, build_c1_c2, period_matrix, period_p
from .cyclo import CycloElem, PrimeField, prime_fields
from .deform import DeformSpace, deform_space, nt_scan
from .jets import JetIdeal, first_failure, linear_codim, n_smooth, smoothness_scan
from .linalg import CycloMatrix, certified_rank, kernel_basis, rank
from .series import FormSpec, TruncatedSeries, combo_taylor, taylor_period
from .tangent import TangentReport, classify_pencil, generic_codim, intersection_codim, tangent_codim

__version__ = "0.1.0"
