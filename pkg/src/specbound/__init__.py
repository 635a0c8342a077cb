"""Spectral linear-programming bounds on codes in Hamming, Johnson,
spherical and projective spaces."""
from .families import FamilySpec, evaluate, linearize, measure, p1_value, recurrence, tau
from .tridiag import SymTridiag, build_S, build_X, gauss_quadrature, lambda_max, largest_zero
from .bounds import BoundQuery, BoundResult, NoBound, bound_sweep, k_window, rho, spectral_bound
from .certificate import Certificate, build_certificate, verify_certificate

__version__ = "0.1.0"
