"""Beilinson regulators of K2 elements on elliptic curves over cubic and
quartic unit-equation fields, and the matching L-values.

The layers, bottom to top: exact fields (fields), exact curves (curves),
diamond images in Z[E(C)]^- (k2), transcendental kernels (analytic),
regulator matrices and limit laws (regulator), L-functions (lfunction,
tate), and rational recognition against the reference tables (verify).
"""

from .fields import CubicSpec, QuarticSpec, NumberField, FieldElement, PrecisionError
from .curves import (CurveModel, CurvePoint, tate_normal_form, parameter_from_field,
                     rank_family_model, rank_family_from_unit, DegenerateParameterError)
from .k2 import DivisorClass, diamond_torsion, diamond_general, diamond_mq, diamond_m
from .analytic import bloch_wigner, bernoulli3, elliptic_d, elliptic_j, periods, elliptic_log
from .regulator import regulator, limit_rhs, limit_scan, pairing_real, pairing_complex_pair
from .lfunction import build_lseries, lstar_at_zero, detect_sign, g_function, conductor_norm
from .tate import tate_local
from .verify import recognize_rational, verify_row

__version__ = "0.1.0"
