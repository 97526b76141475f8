"""Receiver side: power splitting, PV harvesting and APD spectral efficiency.

Default constants are those of the reference receiver (vertical multi-junction
PV panel, Si APD).  The elementary charge and Boltzmann constant are kept at
the rounded values used with that parameter set rather than CODATA values.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import ConfigurationError, SolverError

ELEMENTARY_CHARGE = 1.6e-19
BOLTZMANN = 1.38e-23


@dataclass(frozen=True)
class PVParams:
    """Single-diode PV panel on a resistive load."""

    R_pv: float = 100.0
    eta_pv: float = 0.0161
    I_o: float = 9.89e-9
    R_s: float = 0.93
    R_sh: float = 52.6e3
    D: float = 1.105
    n_s: int = 40
    T: float = 300.0
    q: float = ELEMENTARY_CHARGE
    K: float = BOLTZMANN

    def __post_init__(self):
        for name in ("R_pv", "eta_pv", "I_o", "R_s", "R_sh", "n_s", "T", "q", "K"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"must be positive, got {getattr(self, name)!r}", name)
        if self.D < 1:
            raise ConfigurationError(f"diode ideality must be >= 1, got {self.D}", "D")

    @property
    def thermal_voltage(self):
        """Panel thermal voltage ``n_s * D * K * T / q`` [V]."""
        return self.n_s * self.D * self.K * self.T / self.q


@dataclass(frozen=True)
class APDParams:
    eta_apd: float = 0.6
    I_bc: float = 5100e-6
    B_n: float = 811.7e6
    R_apd: float = 10e3
    T: float = 300.0
    q: float = ELEMENTARY_CHARGE
    K: float = BOLTZMANN

    def __post_init__(self):
        for name in ("eta_apd", "I_bc", "B_n", "R_apd", "T", "q", "K"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"must be positive, got {getattr(self, name)!r}", name)


@dataclass(frozen=True)
class PVOperatingPoint:
    i_pv: float
    v_pv: float
    P_e: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class ReceiverOutput:
    P_e: float
    i_pv: float
    v_pv: float
    C: float
    S: float
    N: float


def split_power(P_out, theta):
    """Split the received beam into the PV stream ``theta * P_out`` and the APD
    stream ``P_out - theta * P_out``."""
    if not 0 <= theta <= 1:
        raise ConfigurationError(f"PS ratio must lie in [0, 1], got {theta}", "theta")
    P_pv = theta * P_out
    return P_pv, P_out - P_pv


def pv_residual(i_pv, I_ph, pv):
    """Current balance of the single-diode model with ``v_pv = i_pv * R_pv``.

    Positive below the operating point, negative above it.  Far above it the
    diode term may overflow to ``-inf``, which keeps the sign right.
    """
    vd = i_pv * (pv.R_pv + pv.R_s)
    with np.errstate(over="ignore"):
        diode = pv.I_o * np.expm1(vd / pv.thermal_voltage)
    return I_ph - diode - vd / pv.R_sh - i_pv


def pv_operating_point(P_pv_in, pv=PVParams(), xtol=0.0, max_iter=200):
    """Solve the PV panel for its load-line operating point by bisection.

    The residual is strictly decreasing in ``i_pv`` and changes sign on
    ``[0, I_ph]`` with ``I_ph = eta_pv * P_pv_in``.  Bisection runs until the
    bracket cannot be split further in floating point (or is narrower than
    ``xtol``), then returns the endpoint with the smaller residual.

    Raises
    ------
    SolverError
        If the residual does not change sign on the bracket.
    """
    if P_pv_in < 0:
        raise ConfigurationError(f"PV input power must be nonnegative, got {P_pv_in}")
    I_ph = pv.eta_pv * P_pv_in
    lo, hi = 0.0, I_ph
    g_lo, g_hi = pv_residual(lo, I_ph, pv), pv_residual(hi, I_ph, pv)
    if g_lo == 0 or I_ph == 0:
        return PVOperatingPoint(0.0, 0.0, 0.0, float(g_lo), 0)
    if g_lo < 0 or g_hi > 0:
        raise SolverError(
            f"no sign change on [0, {I_ph:g}] A: residual {g_lo:g} .. {g_hi:g}")
    it = 0
    while it < max_iter and hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g_mid = pv_residual(mid, I_ph, pv)
        it += 1
        if g_mid == 0:
            lo = hi = mid
            g_lo = g_hi = g_mid
            break
        if g_mid > 0:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    i, g = (lo, g_lo) if abs(g_lo) <= abs(g_hi) else (hi, g_hi)
    return PVOperatingPoint(
        i_pv=float(i), v_pv=float(i * pv.R_pv), P_e=float(i * i * pv.R_pv),
        residual=float(g), iterations=it)


def signal_noise(P_apd, apd=APDParams()):
    """Electrical signal and noise powers of the APD channel."""
    if P_apd < 0:
        raise ConfigurationError(f"APD input power must be nonnegative, got {P_apd}")
    photocurrent = P_apd * apd.eta_apd
    S = photocurrent ** 2
    N = (2 * apd.q * (photocurrent + apd.I_bc) * apd.B_n
         + 4 * apd.K * apd.T * apd.B_n / apd.R_apd)
    return S, N


def spectral_efficiency(P_apd, apd=APDParams()):
    """Spectral efficiency ``C = 0.5 * ln(1 + S/N * e / (2 pi))``.

    Returns ``(C, S, N)``.  The logarithm is natural; with the default
    receiver this reproduces the reference 11-12 (per Hz) figures.
    """
    S, N = signal_noise(P_apd, apd)
    C = 0.5 * math.log1p(S / N * math.e / (2 * math.pi))
    return C, S, N


def receive(P_out, theta, pv=PVParams(), apd=APDParams()):
    """Electric power and spectral efficiency for a received beam power."""
    P_pv, P_apd = split_power(P_out, theta)
    op = pv_operating_point(P_pv, pv)
    C, S, N = spectral_efficiency(P_apd, apd)
    return ReceiverOutput(P_e=op.P_e, i_pv=op.i_pv, v_pv=op.v_pv, C=C, S=S, N=N)
