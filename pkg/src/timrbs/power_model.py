"""Steady-state end-to-end power transfer of the resonant beam link.

All quantities are SI: watts, W/m^2, m^2.  Efficiencies are fractions.
"""
from dataclasses import dataclass
import math

from .errors import ConfigurationError, ModelDomainError

#: Saturation intensity of Nd:YVO4, 1260 W/cm^2.
SATURATION_INTENSITY = 1260 * 1e4


@dataclass(frozen=True)
class GainParams:
    """Gain medium constants.

    Parameters
    ----------
    area : float
        Cross-sectional area of the gain medium [m^2].
    I_s : float
        Saturation intensity [W/m^2].
    eta_s : float
        Single-pass transfer coefficient (absorption) of the gain medium.
    eta_g : float
        Excitation efficiency: fraction of pump power stored as gain.
    """

    area: float
    I_s: float = SATURATION_INTENSITY
    eta_s: float = 0.99
    eta_g: float = 0.72

    def __post_init__(self):
        if not self.area > 0 or not self.I_s > 0:
            raise ConfigurationError("gain area and saturation intensity must be positive")
        for name in ("eta_s", "eta_g"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ConfigurationError(f"{name} must lie in (0, 1], got {v}", name)

    @classmethod
    def for_radius(cls, r_gain, **kw):
        return cls(area=math.pi * r_gain ** 2, **kw)


@dataclass(frozen=True)
class LinkBudget:
    """Cavity efficiencies and beam area consumed by the output-power model.

    ``beam_area`` is the beam cross-section on the gain plane [m^2];
    ``eta_m`` is the one-way telescope efficiency (1 without telescope).
    """

    R2: float
    eta1: float
    eta2: float
    eta3: float
    eta4: float
    eta_m: float
    beam_area: float

    def __post_init__(self):
        if not 0 < self.R2 < 1:
            raise ConfigurationError(f"R2 must lie in (0, 1), got {self.R2}", "R2")
        for name in ("eta1", "eta2", "eta3", "eta4", "eta_m"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ConfigurationError(f"{name} must lie in (0, 1], got {v}", name)
        if not self.beam_area > 0:
            raise ConfigurationError("beam area must be positive", "beam_area")

    @property
    def eta_t(self):
        return self.eta1 * self.eta2 * self.eta3 * self.eta4

    @classmethod
    def from_mode(cls, solution):
        """Budget from a converged :class:`~timrbs.cavity.ModeSolution`."""
        e = solution.eta_legs
        return cls(
            R2=solution.layout.R2,
            eta1=e["eta1"], eta2=e["eta2"], eta3=e["eta3"], eta4=e["eta4"],
            eta_m=solution.eta_m,
            beam_area=math.pi * solution.beam_radius_gain ** 2,
        )


def gain_exponent(P_in, gp):
    """Small-signal gain exponent ``g0*l = eta_g * P_in / (A * I_s)``."""
    if P_in < 0:
        raise ConfigurationError(f"input power must be nonnegative, got {P_in}")
    return gp.eta_g * P_in / (gp.area * gp.I_s)


def loss_exponent(budget, gp):
    """``|ln sqrt(R2 eta_s^2 eta_m^2 eta_t)|``, the gain needed to reach threshold."""
    return abs(math.log(math.sqrt(budget.R2 * gp.eta_s ** 2 * budget.eta_m ** 2 * budget.eta_t)))


def output_coupling_factor(budget, gp):
    """Dimensionless prefactor multiplying ``A_b * I_s * (g0*l - loss)``.

    Raises
    ------
    ModelDomainError
        If the denominator is not positive.
    """
    b = budget
    num = (1 - b.R2) * b.eta_m * b.eta2
    den = (1 - b.R2 * b.eta_m ** 2 * b.eta2 * b.eta3
           + math.sqrt(b.R2 * b.eta_m ** 2 * b.eta_t)
           * (1 / (b.eta1 * gp.eta_s * b.eta_m * b.eta2) - gp.eta_s))
    if not den > 0:
        raise ModelDomainError(f"output-power denominator is {den:g}; efficiencies inconsistent")
    return num / den


def output_beam_power(budget, gp, P_in):
    """Output beam power behind the output reflector [W]; zero below threshold."""
    drive = gain_exponent(P_in, gp) - loss_exponent(budget, gp)
    factor = output_coupling_factor(budget, gp)
    if drive <= 0:
        return 0.0
    return budget.beam_area * gp.I_s * factor * drive


def power_threshold(budget, gp):
    """Pump power at which the round-trip gain equals the round-trip loss [W]."""
    return gp.area * gp.I_s * loss_exponent(budget, gp) / gp.eta_g


def e2e_linear(P_in, P_th, eta_g, eta_s, eta_m, eta_t, R2):
    """Linear input/output relation ``(P_in - P_th) eta_g eta_s eta_m eta_t (1 - R2)``, floored at 0."""
    return max(0.0, (P_in - P_th) * eta_g * eta_s * eta_m * eta_t * (1 - R2))


def slope_efficiency(eta_g, eta_s, eta_m, eta_t, R2):
    return eta_g * eta_s * eta_m * eta_t * (1 - R2)
