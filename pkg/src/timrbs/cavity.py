"""Round-trip operator of the resonant-beam cavity and its Fox-Li eigenmode.

Plane order for one round trip, starting on the input reflector::

    input-reflector -L1-> gain -L2-> concave -sep-> convex -D_t-> output-reflector
    output-reflector -D_t-> convex -sep-> concave -L2-> gain -L1-> input-reflector

Without the telescope the gain medium faces the output reflector across
``D_t`` and ``L2`` is unused.  Every plane is a hard circular aperture; the
output reflector multiplies the amplitude by ``sqrt(R2)``, the input
reflector by ``sqrt(R1)``.  Gain and saturation are not part of the field
operator; they enter through :mod:`timrbs.power_model`.
"""
from dataclasses import dataclass, field as dc_field
import logging
import math

import numpy as np

from .errors import ConfigurationError, UndefinedMetricError
from .field_grid import (
    GridSpec, beam_radius_20pct, field_power, make_field, UniformDisk,
)
from .optics import (
    BACKWARD, DEFAULT_WAVELENGTH, FORWARD, GAIN_APERTURE, OpticalElement,
    PropagationSpec, apply_screen, propagate, telescope_pass, telescope_separation,
)

log = logging.getLogger(__name__)

INPUT_REFLECTOR = "input-reflector"
GAIN = "gain"
CONCAVE = "concave"
CONVEX = "convex"
OUTPUT_REFLECTOR = "output-reflector"
PLANES = (GAIN, CONCAVE, CONVEX, OUTPUT_REFLECTOR, INPUT_REFLECTOR)

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 2000


@dataclass(frozen=True)
class CavityLayout:
    """Geometry of the cavity; defaults reproduce the reference design.

    Lengths and radii in meters.  ``f_concave`` is stored with its physical
    (negative) sign.  ``r_concave`` / ``r_convex`` default to the reflector
    radius.  ``gain_focal_length`` optionally turns the gain aperture into a
    thin lens.
    """

    with_tim: bool = True
    D_t: float = 10.0
    r_in: float = 2.5e-3
    r_out: float = 2.5e-3
    r_gain: float = 1.5e-3
    L1: float = 0.2
    L2: float = 0.05
    R1: float = 1.0
    R2: float = 0.7
    f_concave: float = -0.05
    f_convex: float = 0.1
    r_concave: float = 2.5e-3
    r_convex: float = 2.5e-3
    gain_focal_length: float = None
    wavelength: float = DEFAULT_WAVELENGTH
    telescope_method: str = "scaled"

    def __post_init__(self):
        for name in ("D_t", "r_in", "r_out", "r_gain", "L1", "wavelength"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"must be positive, got {getattr(self, name)!r}", name)
        if not 0 < self.R2 < 1:
            raise ConfigurationError(f"output reflectivity must lie in (0, 1), got {self.R2}", "R2")
        if not 0 < self.R1 <= 1:
            raise ConfigurationError(f"input reflectivity must lie in (0, 1], got {self.R1}", "R1")
        if self.r_gain > self.r_in:
            raise ConfigurationError(
                f"gain aperture {self.r_gain} larger than input reflector {self.r_in}", "r_gain")
        if self.with_tim:
            if not self.L2 > 0:
                raise ConfigurationError(f"must be positive, got {self.L2!r}", "L2")
            concave, convex = self.telescope
            telescope_separation(concave, convex)

    @property
    def telescope(self):
        return (OpticalElement(self.r_concave, self.f_concave),
                OpticalElement(self.r_convex, self.f_convex))

    @property
    def gain_element(self):
        return OpticalElement(self.r_gain, self.gain_focal_length, kind=GAIN_APERTURE)


@dataclass
class PowerLog:
    """Plane powers recorded during one round trip, in traversal order.

    Entries are ``(label, power)`` with labels such as ``"gain>"`` (forward
    pass, after the aperture) or ``"gain<"`` (backward pass).
    """

    entries: list = dc_field(default_factory=list)

    def add(self, label, power):
        self.entries.append((label, float(power)))

    def labels(self):
        return [k for k, _ in self.entries]

    def power(self, label):
        for k, p in self.entries:
            if k == label:
                return p
        raise KeyError(label)

    def index(self, label):
        return self.labels().index(label)


def leg_efficiency(power_log, start, end):
    """Transmission efficiency ``P(end) / P(start)`` between two logged planes."""
    labels = power_log.labels()
    if start not in labels or end not in labels:
        raise KeyError(f"planes {start!r}/{end!r} not both in log {labels}")
    i, j = power_log.index(start), power_log.index(end)
    if j < i:
        raise ValueError(f"plane {end!r} precedes {start!r} in the log")
    p0 = power_log.power(start)
    if p0 == 0:
        raise UndefinedMetricError(f"zero power at plane {start!r}")
    return power_log.power(end) / p0


def _hop(f, distance, layout):
    return propagate(f, PropagationSpec(distance, layout.wavelength), check_guard=False)


def round_trip(f, layout):
    """Apply one cavity round trip to ``f`` sitting on the input reflector.

    Returns
    -------
    out : ComplexField
        Field on the input reflector after the return pass (input-reflector
        aperture and ``sqrt(R1)`` applied).
    power_log : PowerLog
    fields : dict
        Forward-pass fields keyed by plane name, plus ``"gain-return"`` and
        the output/input reflector fields.
    """
    wl = layout.wavelength
    plog = PowerLog()
    fields = {}
    plog.add(INPUT_REFLECTOR + "|", field_power(f))

    u = apply_screen(_hop(f, layout.L1, layout), layout.gain_element, wl)
    plog.add(GAIN + ">", field_power(u))
    fields[GAIN] = u
    if layout.with_tim:
        concave, convex = layout.telescope
        u = _hop(u, layout.L2, layout)
        tp = telescope_pass(u, concave, convex, FORWARD, wl, layout.telescope_method)
        for name, p in tp.planes:
            plog.add(name + ">", p)
        fields.update(tp.fields)
        u = tp.field
    u = apply_screen(_hop(u, layout.D_t, layout), OpticalElement(layout.r_out), wl)
    plog.add(OUTPUT_REFLECTOR + ">", field_power(u))
    fields[OUTPUT_REFLECTOR] = u

    u = u * math.sqrt(layout.R2)
    plog.add(OUTPUT_REFLECTOR + "<", field_power(u))
    u = _hop(u, layout.D_t, layout)
    if layout.with_tim:
        tp = telescope_pass(u, concave, convex, BACKWARD, wl, layout.telescope_method)
        for name, p in tp.planes:
            plog.add(name + "<", p)
        u = _hop(tp.field, layout.L2, layout)
    u = apply_screen(u, layout.gain_element, wl)
    plog.add(GAIN + "<", field_power(u))
    fields["gain-return"] = u
    u = apply_screen(_hop(u, layout.L1, layout), OpticalElement(layout.r_in), wl)
    plog.add(INPUT_REFLECTOR + "<", field_power(u))
    fields[INPUT_REFLECTOR] = u
    u = u * math.sqrt(layout.R1)
    return u, plog, fields


def leg_efficiencies(power_log, with_tim):
    """Per-leg efficiencies from a round-trip log.

    Telescope legs are returned per direction (``*_fwd`` / ``*_bwd``) and as
    their geometric mean, so that ``eta_t * eta_m**2`` equals the product of
    every logged leg.
    """
    e = lambda a, b: leg_efficiency(power_log, a, b)  # noqa: E731
    out = {"eta1": e(INPUT_REFLECTOR + "|", GAIN + ">")}
    if with_tim:
        out["eta_ce_fwd"] = e(GAIN + ">", CONCAVE + ">")
        out["eta_cx_fwd"] = e(CONCAVE + ">", CONVEX + ">")
        out["eta2"] = e(CONVEX + ">", OUTPUT_REFLECTOR + ">")
        out["eta3"] = e(OUTPUT_REFLECTOR + "<", CONVEX + "<")
        out["eta_cx_bwd"] = e(CONVEX + "<", CONCAVE + "<")
        out["eta_ce_bwd"] = e(CONCAVE + "<", GAIN + "<")
        out["eta_ce"] = math.sqrt(out["eta_ce_fwd"] * out["eta_ce_bwd"])
        out["eta_cx"] = math.sqrt(out["eta_cx_fwd"] * out["eta_cx_bwd"])
    else:
        out["eta2"] = e(GAIN + ">", OUTPUT_REFLECTOR + ">")
        out["eta3"] = e(OUTPUT_REFLECTOR + "<", GAIN + "<")
        out["eta_ce"] = out["eta_cx"] = 1.0
    out["eta4"] = e(GAIN + "<", INPUT_REFLECTOR + "<")
    return out


@dataclass
class ModeSolution:
    """Self-reproducing mode and the quantities derived from it."""

    layout: CavityLayout
    grid: GridSpec
    mode_at: dict
    gamma: complex
    eta_legs: dict
    beam_radius_gain: float
    iterations: int
    converged: bool
    power_log: PowerLog
    history: list = dc_field(default_factory=list, repr=False)

    @property
    def gamma_mag(self):
        return abs(self.gamma)

    @property
    def eta_m(self):
        return self.eta_legs["eta_ce"] * self.eta_legs["eta_cx"]

    @property
    def eta_t(self):
        e = self.eta_legs
        return e["eta1"] * e["eta2"] * e["eta3"] * e["eta4"]

    @property
    def eta_roundtrip(self):
        return self.eta_t * self.eta_m ** 2

    def summary(self):
        e = self.eta_legs
        return {
            "with_tim": self.layout.with_tim,
            "D_t": self.layout.D_t,
            "grid_n": self.grid.n,
            "window": self.grid.window,
            "gamma_mag": self.gamma_mag,
            **{k: e[k] for k in ("eta1", "eta2", "eta3", "eta4", "eta_ce", "eta_cx")},
            "eta_m": self.eta_m,
            "eta_t": self.eta_t,
            "eta_roundtrip": self.eta_roundtrip,
            "beam_radius_gain": self.beam_radius_gain,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _unit(v):
    return v / np.linalg.norm(v)


def fox_li_solve(layout, grid=None, seed=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                 keep_history=False):
    """Power-iterate the round trip until the gain-plane field reproduces itself.

    Each pass is renormalized to unit power.  The run counts as converged once
    the relative L2 change of the unit-power, phase-aligned gain-plane field
    stays below ``tol`` on two consecutive passes.  Non-convergence is
    reported through ``converged=False``; the last iterate is returned.

    Parameters
    ----------
    layout : CavityLayout
    grid : GridSpec, optional
        Defaults to ``GridSpec()`` (1024 samples over 20 mm).
    seed : profile descriptor, optional
        Field placed on the input reflector.  Defaults to a uniform disk
        filling the input reflector.
    tol : float
    max_iter : int
    keep_history : bool
        Record ``(|gamma|, change)`` per pass in ``ModeSolution.history``.
    """
    if not tol > 0:
        raise ConfigurationError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ConfigurationError(f"max_iter must be >= 1, got {max_iter}")
    grid = grid or GridSpec()
    seed = seed if seed is not None else UniformDisk(min(layout.r_in, grid.window / 2))
    f = make_field(grid, seed)

    prev_gain = None
    below = 0
    history = []
    converged = False
    for it in range(1, max_iter + 1):
        p_in = field_power(f)
        out, plog, fields = round_trip(f, layout)
        p_out = field_power(out)
        if p_out == 0:
            raise UndefinedMetricError("round trip extinguished the field; apertures too small")
        gain = _unit(fields[GAIN].values.ravel())
        change = np.inf
        if prev_gain is not None:
            overlap = np.vdot(gain, prev_gain)
            aligned = gain * (overlap / abs(overlap)) if overlap != 0 else gain
            change = float(np.linalg.norm(aligned - prev_gain))
        below = below + 1 if change < tol else 0
        gamma = np.vdot(f.values.ravel(), out.values.ravel()) / np.vdot(f.values.ravel(),
                                                                        f.values.ravel())
        gamma = complex(gamma / abs(gamma) * math.sqrt(p_out / p_in))
        if keep_history:
            history.append((abs(gamma), change))
        prev_gain = gain
        if below >= 2:
            converged = True
            break
        f = out * (1 / math.sqrt(p_out))
    else:
        log.warning("Fox-Li did not converge in %d passes (last change %.3g)", max_iter, change)

    etas = leg_efficiencies(plog, layout.with_tim)
    mode_at = {name: fields[name] for name in PLANES if name in fields}
    mode_at["gain-return"] = fields["gain-return"]
    return ModeSolution(
        layout=layout,
        grid=grid,
        mode_at=mode_at,
        gamma=gamma,
        eta_legs=etas,
        beam_radius_gain=beam_radius_20pct(fields[GAIN]),
        iterations=it,
        converged=converged,
        power_log=plog,
        history=history,
    )


def round_trip_matrix(layout, grid):
    """Dense ``n^2 x n^2`` matrix of the round trip, assembled column by column.

    Only practical for coarse grids (``n <= 64``).
    """
    n = grid.n
    m = np.empty((n * n, n * n), dtype=complex)
    basis = np.zeros((n, n), dtype=complex)
    from .field_grid import ComplexField
    for col in range(n * n):
        basis.flat[col] = 1.0
        out, _, _ = round_trip(ComplexField(grid, basis), layout)
        m[:, col] = out.values.ravel()
        basis.flat[col] = 0.0
    return m
