"""Diffraction screens and Fresnel propagation between planes.

Phase convention: free-space propagation over ``L`` uses the kernel

    h(x, y) = i exp(-ikL) / (lambda L) * exp(-ik (x^2 + y^2) / (2L))

and every other phase factor is written in the same (``exp(-ikz)``) convention,
so a thin lens of focal length ``f`` multiplies the field by
``exp(+ik r^2 / (2f))``.  With this sign a positive ``f`` focuses.

Two discretizations of the convolution are provided:

``"transfer-function"``
    multiply the spectrum by the analytic Fresnel transfer function.  Exact
    and unitary on the periodic grid; well sampled for
    ``L <= n * pitch**2 / wavelength``.
``"impulse-response"``
    FFT convolution with the sampled kernel, i.e. a Riemann sum of the
    Fresnel integral.  Well sampled for ``L >= n * pitch**2 / wavelength``.
"""
from dataclasses import dataclass
from functools import lru_cache
import warnings

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, MethodError
from .field_grid import ComplexField, field_power, magnify

#: Nd:YVO4 emission line [m].
DEFAULT_WAVELENGTH = 1064e-9

APERTURE = "aperture"
THIN_LENS = "thin-lens"
GAIN_APERTURE = "gain-aperture"

TRANSFER_FUNCTION = "transfer-function"
IMPULSE_RESPONSE = "impulse-response"
AUTO = "auto"

#: Width of the band (fraction of the window, per side) checked for stray energy.
GUARD_BAND = 0.10
GUARD_BAND_TOL = 1e-6


class GuardBandWarning(UserWarning):
    """Field energy close to the grid edge; wraparound or truncation may bias results."""


@dataclass(frozen=True)
class OpticalElement:
    """Circular hard aperture of ``radius``, optionally a thin lens.

    ``focal_length`` is signed; negative means diverging.
    """

    radius: float
    focal_length: float = None
    kind: str = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigurationError(f"element radius must be positive, got {self.radius}")
        if self.focal_length is not None and self.focal_length == 0:
            raise ConfigurationError("focal length must be nonzero")
        if self.kind is None:
            kind = APERTURE if self.focal_length is None else THIN_LENS
            object.__setattr__(self, "kind", kind)
        elif self.kind not in (APERTURE, THIN_LENS, GAIN_APERTURE):
            raise ConfigurationError(f"unknown element kind {self.kind!r}")


@dataclass(frozen=True)
class PropagationSpec:
    distance: float
    wavelength: float = DEFAULT_WAVELENGTH
    method: str = AUTO

    def __post_init__(self):
        if not self.distance > 0:
            raise ConfigurationError(f"propagation distance must be positive, got {self.distance}")
        if not self.wavelength > 0:
            raise ConfigurationError(f"wavelength must be positive, got {self.wavelength}")
        if self.method not in (AUTO, TRANSFER_FUNCTION, IMPULSE_RESPONSE):
            raise ConfigurationError(f"unknown propagation method {self.method!r}")


def pupil(spec, radius):
    """Binary pupil: 1 where ``x^2 + y^2 <= radius^2``."""
    return spec.r2 <= radius ** 2


def lens_phase(spec, focal_length, wavelength=DEFAULT_WAVELENGTH):
    k = 2 * np.pi / wavelength
    return np.exp(1j * k * spec.r2 / (2 * focal_length))


def apply_screen(f, element, wavelength=DEFAULT_WAVELENGTH):
    """Field on the rear surface of ``element``: ``U' = U * A * P``."""
    values = np.where(pupil(f.spec, element.radius), f.values, 0)
    if element.focal_length is not None:
        values = values * lens_phase(f.spec, element.focal_length, wavelength)
    return f.with_values(values)


def critical_distance(spec, wavelength=DEFAULT_WAVELENGTH):
    """Distance at which both discretizations are equally well sampled [m]."""
    return spec.n * spec.pitch ** 2 / wavelength


def select_method(spec, p):
    """Resolve ``p.method`` against the sampling criterion.

    Raises
    ------
    MethodError
        If an explicitly requested method is undersampled at ``p.distance``.
    """
    zc = critical_distance(spec, p.wavelength)
    admissible = TRANSFER_FUNCTION if p.distance <= zc else IMPULSE_RESPONSE
    if p.method == AUTO:
        return admissible
    if p.method != admissible:
        raise MethodError(
            f"{p.method} is undersampled at L={p.distance:g} m on a grid with "
            f"critical distance {zc:g} m; use {admissible}", admissible=admissible)
    return p.method


@lru_cache(maxsize=64)
def _transfer_function(spec, distance, wavelength):
    fx = spec.freqs
    f2 = fx[None, :] ** 2 + fx[:, None] ** 2
    k = 2 * np.pi / wavelength
    return np.exp(-1j * k * distance) * np.exp(1j * np.pi * wavelength * distance * f2)


@lru_cache(maxsize=64)
def _impulse_response_spectrum(spec, distance, wavelength, pad):
    n = spec.n * (2 if pad else 1)
    x = (np.arange(n) - n // 2) * spec.pitch
    r2 = x[None, :] ** 2 + x[:, None] ** 2
    k = 2 * np.pi / wavelength
    h = (1j * np.exp(-1j * k * distance) / (wavelength * distance)
         * np.exp(-1j * k * r2 / (2 * distance)) * spec.pitch ** 2)
    return sfft.fft2(sfft.ifftshift(h))


def guard_band_fraction(f, band=GUARD_BAND):
    """Fraction of the field power lying in the outer ``band`` of the window."""
    total = np.sum(np.abs(f.values) ** 2)
    if total == 0:
        return 0.0
    edge = int(np.ceil(band * f.spec.n))
    inner = np.abs(f.values[edge:-edge, edge:-edge]) ** 2
    return float(1 - inner.sum() / total)


def propagate(f, p, pad=False, check_guard=True):
    """Fresnel-diffract ``f`` over ``p.distance``.

    Parameters
    ----------
    f : ComplexField
    p : PropagationSpec
    pad : bool
        Impulse-response method only: zero-pad to ``2n`` so the FFT computes
        the linear (not circular) convolution.  Energy leaving the window is
        then discarded instead of wrapping around.
    check_guard : bool
        Warn when the input has appreciable energy near the grid edge.

    Returns
    -------
    ComplexField
    """
    spec = f.spec
    method = select_method(spec, p)
    if check_guard:
        frac = guard_band_fraction(f)
        if frac > GUARD_BAND_TOL:
            warnings.warn(
                f"{frac:.2e} of the field power lies in the outer {GUARD_BAND:.0%} of the window",
                GuardBandWarning, stacklevel=2)
    if method == TRANSFER_FUNCTION:
        h = _transfer_function(spec, p.distance, p.wavelength)
        out = sfft.ifft2(sfft.fft2(f.values) * h)
    elif pad:
        n = spec.n
        big = np.zeros((2 * n, 2 * n), dtype=complex)
        big[n // 2:n // 2 + n, n // 2:n // 2 + n] = f.values
        h = _impulse_response_spectrum(spec, p.distance, p.wavelength, True)
        out = sfft.ifft2(sfft.fft2(big) * h)[n // 2:n // 2 + n, n // 2:n // 2 + n]
    else:
        h = _impulse_response_spectrum(spec, p.distance, p.wavelength, False)
        out = sfft.ifft2(sfft.fft2(f.values) * h)
    return f.with_values(out)


def edge_absorber(spec, fraction=0.05):
    """Raised-cosine amplitude taper over the outer ``fraction`` of the window."""
    x = np.abs(spec.coords)
    half = spec.window / 2
    start = half * (1 - 2 * fraction)
    t = np.clip((x - start) / (half - start), 0, 1)
    w = 0.5 * (1 + np.cos(np.pi * t))
    return np.outer(w, w)


# ---------------------------------------------------------------------------
# telescope

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class TelescopeResult:
    """Output of one telescope pass.

    ``planes`` lists ``(name, power)`` after each aperture in traversal order;
    ``eta_ce`` / ``eta_cx`` are the concave-side and convex-side leg ratios
    (entry -> concave lens and concave lens -> convex lens for the forward
    pass, in mirrored order for the backward one).
    """

    field: ComplexField
    planes: tuple
    eta_first: float
    eta_second: float
    fields: dict


def telescope_separation(concave, convex):
    """Lens spacing that makes the foci coincide (Galilean telescope) [m]."""
    if concave.focal_length is None or convex.focal_length is None:
        raise ConfigurationError("telescope elements need focal lengths")
    if concave.focal_length >= 0 or convex.focal_length <= 0:
        raise ConfigurationError(
            "telescope needs a diverging (f<0) concave lens and a converging (f>0) convex lens")
    sep = convex.focal_length + concave.focal_length
    if sep <= 0:
        raise ConfigurationError(
            f"nonpositive lens separation {sep:g} m: |f_concave| must be smaller than f_convex")
    return sep


def telescope_magnification(concave, convex):
    """Beam-width magnification of the forward (concave -> convex) pass."""
    return convex.focal_length / -concave.focal_length


def telescope_pass(f, concave, convex, direction=FORWARD,
                   wavelength=DEFAULT_WAVELENGTH, method="scaled"):
    """Send ``f`` through the afocal lens pair.

    The forward pass enters at the concave lens and leaves from the convex
    lens; the backward pass is the reverse.  ``f`` is the field arriving at
    the entry lens.

    ``method="direct"`` applies screen, propagation and screen literally.  It
    needs a grid fine enough to sample the lens chirps.  ``method="scaled"``
    evaluates the same operator in expanding coordinates: between the lenses
    the field is the entry field propagated over ``separation / M`` and
    magnified by ``M``, where ``M = 1 - separation / f_entry``.  The exit lens
    cancels the residual spherical phase exactly, leaving a pure magnification
    that is applied by band-limited interpolation.
    """
    sep = telescope_separation(concave, convex)
    if direction == FORWARD:
        first, second = concave, convex
    elif direction == BACKWARD:
        first, second = convex, concave
    else:
        raise ConfigurationError(f"unknown telescope direction {direction!r}")

    p_in = field_power(f)
    a = apply_screen(f, OpticalElement(first.radius), wavelength)
    p_a = field_power(a)
    fields = {"first": a}
    if method == "direct":
        a = apply_screen(a, first, wavelength) if first.focal_length else a
        b = propagate(a, PropagationSpec(sep, wavelength), check_guard=False)
        b = apply_screen(b, second, wavelength)
        fields["second"] = b
        out = b
        p_b = field_power(b)
    elif method == "scaled":
        m = 1 - sep / first.focal_length
        b = propagate(a, PropagationSpec(sep / m, wavelength), check_guard=False)
        b = apply_screen(b, OpticalElement(second.radius / m), wavelength)
        p_b = field_power(b)
        out = magnify(b, m)
        fields["second"] = out
    else:
        raise ConfigurationError(f"unknown telescope method {method!r}")
    names = ("concave", "convex") if direction == FORWARD else ("convex", "concave")
    eta_first = p_a / p_in if p_in > 0 else 0.0
    eta_second = p_b / p_a if p_a > 0 else 0.0
    return TelescopeResult(
        field=out,
        planes=((names[0], p_a), (names[1], p_b)),
        eta_first=eta_first,
        eta_second=eta_second,
        fields={names[0]: fields["first"], names[1]: fields["second"]},
    )
