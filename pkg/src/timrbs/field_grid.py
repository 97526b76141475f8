"""Sampled complex scalar fields on a square grid and metrics computed from them.

A :class:`ComplexField` always carries the :class:`GridSpec` it was sampled
on.  Sample ``(j, i)`` sits at ``x = (i - n//2) * pitch``,
``y = (j - n//2) * pitch`` so the optical axis is exactly on a sample.
"""
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np
import scipy.fft as sfft
from scipy import signal

from .errors import ConfigurationError, GridMismatchError, UndefinedMetricError

#: Threshold (fraction of peak amplitude) defining the reported beam radius.
BEAM_RADIUS_LEVEL = 0.2


@dataclass(frozen=True)
class GridSpec:
    """Square sampling grid.

    Parameters
    ----------
    n : int
        Samples per side, a power of two, at least 32.
    window : float
        Physical side length of the grid [m].
    """

    n: int = 1024
    window: float = 0.02

    def __post_init__(self):
        n = int(self.n)
        if n != self.n or n < 32 or n & (n - 1):
            raise ConfigurationError(f"grid n must be a power of two >= 32, got {self.n!r}")
        if not self.window > 0:
            raise ConfigurationError(f"grid window must be positive, got {self.window!r}")

    @property
    def pitch(self):
        return self.window / self.n

    @cached_property
    def coords(self):
        """1-D sample coordinates along either axis [m]."""
        return (np.arange(self.n) - self.n // 2) * self.pitch

    @cached_property
    def r2(self):
        """Squared radial coordinate on the full grid [m^2]."""
        x = self.coords
        return x[None, :] ** 2 + x[:, None] ** 2

    @cached_property
    def freqs(self):
        """Spatial frequencies in FFT order [1/m]."""
        return sfft.fftfreq(self.n, d=self.pitch)


@dataclass(frozen=True)
class ComplexField:
    """Complex amplitude samples ``values`` on ``spec``."""

    spec: GridSpec
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.spec.n, self.spec.n):
            raise GridMismatchError(
                f"values shape {v.shape} does not match grid n={self.spec.n}")
        object.__setattr__(self, "values", v)

    def with_values(self, values):
        return ComplexField(self.spec, values)

    def __mul__(self, scalar):
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class BeamMetrics:
    total_power: float
    peak_amplitude: float
    beam_radius_20pct: float


# ---------------------------------------------------------------------------
# seed profiles

@dataclass(frozen=True)
class UniformDisk:
    radius: float


@dataclass(frozen=True)
class Gaussian:
    """Amplitude ``exp(-r^2 / waist^2)``."""
    waist: float


@dataclass(frozen=True)
class RandomPhase:
    """Unit amplitude inside ``radius`` (default ``window/4``) with i.i.d. phases."""
    seed: int = 0
    radius: float = None


_PROFILE_KINDS = {
    "uniform-disk": UniformDisk,
    "gaussian": Gaussian,
    "random-phase": RandomPhase,
}


def parse_profile(desc):
    """Build a profile from a descriptor such as ``{"kind": "gaussian", "waist": 1e-3}``."""
    if isinstance(desc, (UniformDisk, Gaussian, RandomPhase)):
        return desc
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigurationError(f"profile descriptor needs a 'kind', got {desc!r}")
    params = dict(desc)
    kind = params.pop("kind")
    if kind not in _PROFILE_KINDS:
        raise ConfigurationError(
            f"unknown profile kind {kind!r}; expected one of {sorted(_PROFILE_KINDS)}")
    cls = _PROFILE_KINDS[kind]
    try:
        return cls(**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for profile {kind!r}: {exc}") from None


def make_field(spec, profile):
    """Seed field on ``spec`` with total power normalized to 1."""
    profile = parse_profile(profile)
    half = spec.window / 2
    r2 = spec.r2
    if isinstance(profile, UniformDisk):
        if not 0 < profile.radius <= half:
            raise ConfigurationError(f"disk radius {profile.radius} outside (0, window/2]")
        values = (r2 <= profile.radius ** 2).astype(complex)
    elif isinstance(profile, Gaussian):
        if not 0 < profile.waist <= half:
            raise ConfigurationError(f"gaussian waist {profile.waist} outside (0, window/2]")
        values = np.exp(-r2 / profile.waist ** 2).astype(complex)
    else:
        radius = spec.window / 4 if profile.radius is None else profile.radius
        if not 0 < radius <= half:
            raise ConfigurationError(f"random-phase radius {radius} outside (0, window/2]")
        rng = np.random.default_rng(profile.seed)
        phase = rng.uniform(0, 2 * np.pi, size=(spec.n, spec.n))
        values = np.where(r2 <= radius ** 2, np.exp(1j * phase), 0)
    f = ComplexField(spec, values)
    p = field_power(f)
    if p == 0:
        raise ConfigurationError(f"profile {profile!r} has no samples on the grid")
    return f * (1 / np.sqrt(p))


def field_power(f):
    """Riemann-sum power ``sum |U|^2 * pitch^2``."""
    return float(np.sum(np.abs(f.values) ** 2) * f.spec.pitch ** 2)


def spectral_power(f):
    """Power evaluated in the frequency domain with a unitary FFT."""
    spectrum = sfft.fft2(f.values, norm="ortho")
    return float(np.sum(np.abs(spectrum) ** 2) * f.spec.pitch ** 2)


def normalize(f):
    """Scale ``f`` to unit power."""
    p = field_power(f)
    if p == 0:
        raise UndefinedMetricError("cannot normalize an all-zero field")
    return f * (1 / np.sqrt(p))


def beam_radius_20pct(f, level=BEAM_RADIUS_LEVEL):
    """Radius of the smallest centred circle holding every sample with
    ``|U| >= level * max|U|``.

    Samples exactly on the threshold count as inside, so the reported radius
    errs large.
    """
    amp = np.abs(f.values)
    peak = amp.max()
    if peak == 0:
        raise UndefinedMetricError("beam radius undefined for an all-zero field")
    inside = amp >= level * peak
    return float(np.sqrt(f.spec.r2[inside].max()))


def beam_metrics(f):
    amp = np.abs(f.values)
    return BeamMetrics(
        total_power=field_power(f),
        peak_amplitude=float(amp.max()),
        beam_radius_20pct=beam_radius_20pct(f),
    )


def intensity(f, normalization="peak"):
    """Intensity ``|U|^2``, scaled to unit peak (``"peak"``), unit power
    (``"power"``) or left as is (``None``)."""
    i = np.abs(f.values) ** 2
    if normalization is None:
        return i
    if normalization == "peak":
        m = i.max()
        return i / m if m > 0 else i
    if normalization == "power":
        p = i.sum() * f.spec.pitch ** 2
        return i / p if p > 0 else i
    raise ValueError(f"unknown normalization {normalization!r}")


def check_same_grid(*fields):
    spec = fields[0].spec
    for f in fields[1:]:
        if f.spec != spec:
            raise GridMismatchError(f"grid mismatch: {spec} vs {f.spec}")
    return spec


def relative_l2(a, b, align_phase=False):
    """``||a - b|| / ||b||``; optionally remove the best global phase of ``a`` first."""
    check_same_grid(a, b)
    va, vb = a.values, b.values
    if align_phase:
        overlap = np.vdot(va, vb)
        if overlap != 0:
            va = va * (overlap / abs(overlap))
    return float(np.linalg.norm(va - vb) / np.linalg.norm(vb))


# ---------------------------------------------------------------------------
# transverse rescaling

def _zoom_axis(spectrum, scale, axis):
    """Evaluate the trigonometric interpolant along ``axis`` at sample
    positions divided by ``scale``.

    ``spectrum`` holds centred DFT coefficients (index ``k + n//2``) and is
    already band-limited by the caller.
    """
    n = spectrum.shape[axis]
    # f(t_j) = (1/n) sum_k Y_k exp(2 pi i k t_j / n),  t_j = (j - n/2) / scale
    w = np.exp(2j * np.pi / (scale * n))
    a = np.exp(1j * np.pi / scale)
    out = signal.czt(spectrum, m=n, w=w, a=a, axis=axis)
    k0 = -(n // 2)
    t = (np.arange(n) - n // 2) / scale
    pre = np.exp(2j * np.pi * k0 * t / n) / n
    # targets beyond the grid are outside the field support
    pre[np.abs(t) > n // 2 - 1] = 0
    shape = [1, 1]
    shape[axis] = n
    return out * pre.reshape(shape)


def magnify(f, scale):
    """Transverse magnification ``U'(x) = U(x / scale) / scale``.

    Power is preserved for band-limited fields that stay on the grid.  Content
    that would land above the grid's Nyquist frequency (``scale < 1``) or
    outside the window (``scale > 1``) is discarded.
    """
    if scale == 1:
        return f
    if not scale > 0:
        raise ConfigurationError(f"magnification must be positive, got {scale}")
    n = f.spec.n
    k = np.arange(n) - n // 2
    # centred spectrum: Y_k = sum_m v_m exp(-2 pi i k (m - n/2) / n)
    sign = np.where(k % 2, -1.0, 1.0)
    spectrum = sfft.fftshift(sfft.fft2(f.values)) * np.outer(sign, sign)
    keep = np.abs(k) < 0.5 * n * min(1.0, scale)
    spectrum *= np.outer(keep, keep)
    out = _zoom_axis(_zoom_axis(spectrum, scale, 0), scale, 1)
    return f.with_values(out / scale)
