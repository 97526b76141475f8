"""Scenario files, parameter sweeps and result tables.

A scenario is a JSON object; every key is optional and defaults to the
reference design.  Unknown keys are rejected.  Example::

    {
      "layout": {"with_tim": true, "D_t": 10.0},
      "grid": {"n": 1024, "window": 0.02},
      "gain": {"I_s_W_cm2": 1260, "eta_s": 0.99, "eta_g": 0.72},
      "sweep": {"variable": "D_t", "values": [2, 4, 6, 8, 10]},
      "fixed": {"P_in": 200, "theta": 0.5},
      "reach": {"P_in": [100, 200, 300], "D_max": 80.0, "resolution": 0.1},
      "seed": {"kind": "uniform-disk", "radius": 0.0025},
      "solver": {"tol": 1e-6, "max_iter": 2000},
      "outputs": ["csv"]
    }

``fixed.P_in`` and ``fixed.theta`` also accept lists; rows are then emitted
for every combination, ordered by sweep index first.
"""
from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, field as dc_field, fields as dc_fields, replace
import itertools
import json
import logging
import math
import threading

from .cavity import CavityLayout, DEFAULT_MAX_ITER, DEFAULT_TOL, fox_li_solve
from .errors import ConfigurationError
from .field_grid import GridSpec, UniformDisk, parse_profile
from .power_model import (
    GainParams, LinkBudget, output_beam_power, power_threshold,
)
from .receiver import APDParams, PVParams, receive

log = logging.getLogger(__name__)

SWEEP_VARIABLES = ("D_t", "P_in", "theta")

CSV_COLUMNS = (
    "D_t_m", "P_in_W", "theta", "eta1", "eta2", "eta3", "eta4", "eta_ce", "eta_cx",
    "eta_m", "eta_t", "eta_roundtrip", "gamma_mag", "beam_radius_gain_m", "P_out_W",
    "P_th_W", "P_e_W", "C_bpsHz", "iterations", "converged",
)


@dataclass(frozen=True)
class Sweep:
    variable: str = "D_t"
    values: tuple = tuple(float(d) for d in range(2, 21, 2))

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigurationError(
                f"unknown sweep variable {self.variable!r}; expected one of {SWEEP_VARIABLES}",
                "variable")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ConfigurationError("sweep values must be non-empty", "values")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ConfigurationError("sweep values strictly increasing", "values")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class Scenario:
    layout: CavityLayout = CavityLayout()
    grid: GridSpec = GridSpec()
    gain: dict = dc_field(default_factory=lambda: {"I_s": 1260e4, "eta_s": 0.99, "eta_g": 0.72})
    pv: PVParams = PVParams()
    apd: APDParams = APDParams()
    sweep: Sweep = Sweep()
    P_in: tuple = (200.0,)
    theta: tuple = (0.5,)
    reach_P_in: tuple = ()
    reach_D_max: float = 80.0
    reach_resolution: float = 0.1
    seed: object = None
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    outputs: tuple = ("csv",)

    def gain_params(self, layout=None):
        layout = layout or self.layout
        return GainParams.for_radius(layout.r_gain, **self.gain)

    @property
    def seed_profile(self):
        return self.seed if self.seed is not None else UniformDisk(
            min(self.layout.r_in, self.grid.window / 2))


@dataclass(frozen=True)
class ResultRow:
    D_t: float
    P_in: float
    theta: float
    eta1: float
    eta2: float
    eta3: float
    eta4: float
    eta_ce: float
    eta_cx: float
    eta_m: float
    eta_t: float
    eta_roundtrip: float
    gamma_mag: float
    beam_radius_gain: float
    P_out: float
    P_th: float
    P_e: float
    C: float
    iterations: int
    converged: bool

    def as_record(self):
        """Values keyed by the published column names."""
        return dict(zip(CSV_COLUMNS, (getattr(self, f.name) for f in dc_fields(self))))


# ---------------------------------------------------------------------------
# loading

_SECTION_KEYS = {
    "layout": {f.name for f in dc_fields(CavityLayout)},
    "grid": {"n", "window"},
    "gain": {"I_s_W_cm2", "eta_s", "eta_g"},
    "pv": {f.name for f in dc_fields(PVParams)},
    "apd": {f.name for f in dc_fields(APDParams)},
    "sweep": {"variable", "values"},
    "fixed": {"P_in", "theta"},
    "reach": {"P_in", "D_max", "resolution"},
    "solver": {"tol", "max_iter"},
}
_TOP_KEYS = set(_SECTION_KEYS) | {"seed", "outputs"}


def _section(d, name):
    sec = d.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigurationError("must be a JSON object", name)
    unknown = set(sec) - _SECTION_KEYS[name]
    if unknown:
        raise ConfigurationError(f"unknown key(s) {sorted(unknown)}", name)
    return sec


def _as_tuple(v, path):
    vals = tuple(v) if isinstance(v, (list, tuple)) else (v,)
    if not vals or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in vals):
        raise ConfigurationError("expected a number or a non-empty list of numbers", path)
    return tuple(float(x) for x in vals)


def _build(cls, kwargs, path):
    try:
        return cls(**kwargs)
    except ConfigurationError as exc:
        sub = f"{path}.{exc.key_path}" if exc.key_path else path
        raise ConfigurationError(exc.reason, sub) from None
    except TypeError as exc:
        raise ConfigurationError(str(exc), path) from None


def scenario_from_dict(d):
    """Validate a decoded scenario object and fill in defaults."""
    if not isinstance(d, dict):
        raise ConfigurationError("scenario must be a JSON object")
    unknown = set(d) - _TOP_KEYS
    if unknown:
        raise ConfigurationError(f"unknown top-level key(s) {sorted(unknown)}")

    layout = _build(CavityLayout, _section(d, "layout"), "layout")
    grid = _build(GridSpec, _section(d, "grid"), "grid")
    g = dict(_section(d, "gain"))
    gain = {"I_s": g.pop("I_s_W_cm2", 1260) * 1e4,
            "eta_s": g.pop("eta_s", 0.99), "eta_g": g.pop("eta_g", 0.72)}
    _build(GainParams, {"area": 1.0, **gain}, "gain")
    pv = _build(PVParams, _section(d, "pv"), "pv")
    apd = _build(APDParams, _section(d, "apd"), "apd")
    sweep = _build(Sweep, _section(d, "sweep"), "sweep")
    fixed = _section(d, "fixed")
    P_in = _as_tuple(fixed.get("P_in", 200.0), "fixed.P_in")
    theta = _as_tuple(fixed.get("theta", 0.5), "fixed.theta")
    if any(p < 0 for p in P_in):
        raise ConfigurationError("input power must be nonnegative", "fixed.P_in")
    if any(not 0 <= t <= 1 for t in theta):
        raise ConfigurationError("PS ratio must lie in [0, 1]", "fixed.theta")
    reach = _section(d, "reach")
    reach_P_in = _as_tuple(reach["P_in"], "reach.P_in") if "P_in" in reach else ()
    solver = _section(d, "solver")
    tol = float(solver.get("tol", DEFAULT_TOL))
    max_iter = solver.get("max_iter", DEFAULT_MAX_ITER)
    if not tol > 0:
        raise ConfigurationError("must be positive", "solver.tol")
    if not isinstance(max_iter, int) or max_iter < 1:
        raise ConfigurationError("must be an integer >= 1", "solver.max_iter")
    seed = None
    if "seed" in d:
        try:
            seed = parse_profile(d["seed"])
        except ConfigurationError as exc:
            raise ConfigurationError(str(exc), "seed") from None
    outputs = d.get("outputs", ["csv"])
    if not isinstance(outputs, list) or not set(outputs) <= {"csv", "json"}:
        raise ConfigurationError("expected a list drawn from ['csv', 'json']", "outputs")
    return Scenario(
        layout=layout, grid=grid, gain=gain, pv=pv, apd=apd, sweep=sweep,
        P_in=P_in, theta=theta, reach_P_in=reach_P_in,
        reach_D_max=float(reach.get("D_max", 80.0)),
        reach_resolution=float(reach.get("resolution", 0.1)),
        seed=seed, tol=tol, max_iter=max_iter, outputs=tuple(outputs),
    )


def load_scenario(path):
    """Read and validate a scenario JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"scenario file not found: {path}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigurationError(f"malformed scenario JSON in {path}: {exc}") from None
    return scenario_from_dict(d)


# ---------------------------------------------------------------------------
# running

class ModeCache:
    """Write-once cache of mode solutions keyed by layout, grid and solver settings.

    Parameters
    ----------
    keep_fields : bool
        Keep the per-plane mode fields. Off by default: rows and reach searches
        need only the scalar metrics, and at n=1024 each solution carries
        about 100 MB of fields.
    """

    def __init__(self, keep_fields=False):
        self.keep_fields = keep_fields
        self._store = {}
        self._locks = {}
        self._guard = threading.Lock()

    def get(self, layout, grid, seed, tol, max_iter):
        key = (layout, grid, seed, tol, max_iter)
        with self._guard:
            if key in self._store:
                return self._store[key]
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            if key not in self._store:
                sol = fox_li_solve(layout, grid, seed=seed, tol=tol, max_iter=max_iter)
                if not self.keep_fields:
                    sol = replace(sol, mode_at={})
                with self._guard:
                    self._store[key] = sol
            return self._store[key]

    def __len__(self):
        return len(self._store)


class _NoCache:
    def get(self, layout, grid, seed, tol, max_iter):
        return fox_li_solve(layout, grid, seed=seed, tol=tol, max_iter=max_iter)


def solve_point(s, layout, cache=None):
    cache = cache if cache is not None else _NoCache()
    return cache.get(layout, s.grid, s.seed_profile, s.tol, s.max_iter)


def make_row(s, solution, P_in, theta):
    """Combine a mode solution with the power and receiver models."""
    gp = s.gain_params(solution.layout)
    budget = LinkBudget.from_mode(solution)
    P_out = output_beam_power(budget, gp, P_in)
    P_th = power_threshold(budget, gp)
    rx = receive(P_out, theta, s.pv, s.apd)
    e = solution.eta_legs
    return ResultRow(
        D_t=solution.layout.D_t, P_in=float(P_in), theta=float(theta),
        eta1=e["eta1"], eta2=e["eta2"], eta3=e["eta3"], eta4=e["eta4"],
        eta_ce=e["eta_ce"], eta_cx=e["eta_cx"], eta_m=solution.eta_m,
        eta_t=solution.eta_t, eta_roundtrip=solution.eta_roundtrip,
        gamma_mag=solution.gamma_mag, beam_radius_gain=solution.beam_radius_gain,
        P_out=P_out, P_th=P_th, P_e=rx.P_e, C=rx.C,
        iterations=solution.iterations, converged=solution.converged,
    )


def _points(s):
    """(layout, P_in, theta) for every row, in output order."""
    pts = []
    for v in s.sweep.values:
        layout, P_ins, thetas = s.layout, s.P_in, s.theta
        if s.sweep.variable == "D_t":
            layout = replace(layout, D_t=v)
        elif s.sweep.variable == "P_in":
            P_ins = (v,)
        else:
            thetas = (v,)
        for P_in, theta in itertools.product(P_ins, thetas):
            pts.append((layout, P_in, theta))
    return pts


def run_sweep(s, threads=1, cache=None):
    """One :class:`ResultRow` per sweep value (per fixed-parameter combination).

    Distinct layouts are solved once and reused.  Rows come back in sweep
    order whatever the completion order of the worker pool.
    """
    cache = ModeCache() if cache is None else cache
    pts = _points(s)
    layouts = list(dict.fromkeys(p[0] for p in pts))
    if threads > 1 and len(layouts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda lay: solve_point(s, lay, cache), layouts))
    rows = []
    for layout, P_in, theta in pts:
        sol = solve_point(s, layout, cache)
        if not sol.converged:
            log.warning("mode at D_t=%g m did not converge in %d passes", layout.D_t, sol.iterations)
        rows.append(make_row(s, sol, P_in, theta))
    return rows


def max_reach(s, P_in, layout=None, cache=None, D_lo=None, D_hi=None):
    """Largest ``D_t`` at which ``P_in`` exceeds the oscillation threshold [m].

    Bisection on ``P_in - P_th(D_t)`` down to ``s.reach_resolution``; returns
    the last distance known to lase.  Returns 0 when the cavity is below
    threshold already at ``D_lo``, and ``D_hi`` when it still lases there.
    """
    layout = layout or s.layout
    cache = ModeCache() if cache is None else cache
    D_lo = D_lo if D_lo is not None else min(s.sweep.values) if s.sweep.variable == "D_t" else 1.0
    D_hi = D_hi if D_hi is not None else s.reach_D_max

    def lases(D):
        sol = solve_point(s, replace(layout, D_t=D), cache)
        return P_in > power_threshold(LinkBudget.from_mode(sol), s.gain_params(layout))

    if not lases(D_lo):
        return 0.0
    if lases(D_hi):
        return D_hi
    while D_hi - D_lo > s.reach_resolution:
        mid = 0.5 * (D_lo + D_hi)
        if lases(mid):
            D_lo = mid
        else:
            D_hi = mid
    return D_lo


@dataclass
class Comparison:
    rows: dict
    max_reach: dict

    def summary(self):
        return {"max_reach_m": {("TIM" if k else "no-TIM"): v for k, v in self.max_reach.items()}}


def compare_layouts(s, threads=1, cache=None):
    """Run the sweep with and without the telescope and report max reach.

    ``max_reach[with_tim][P_in]`` uses ``s.reach_P_in`` (or the fixed input
    powers when that is empty).
    """
    cache = ModeCache() if cache is None else cache
    rows, reach = {}, {}
    for with_tim in (True, False):
        sub = replace(s, layout=replace(s.layout, with_tim=with_tim))
        rows[with_tim] = run_sweep(sub, threads=threads, cache=cache)
        reach[with_tim] = {P: max_reach(sub, P, cache=cache) for P in (s.reach_P_in or s.P_in)}
    return Comparison(rows=rows, max_reach=reach)


# ---------------------------------------------------------------------------
# output

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return f"{v:.17e}"


def emit_results(rows, fmt, path):
    """Write rows as CSV (fixed header) or JSON (list of records keyed by column)."""
    if not rows:
        raise ValueError("no rows to write")
    records = [r.as_record() for r in rows]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for rec in records:
                w.writerow([_fmt(rec[c]) for c in CSV_COLUMNS])
        elif fmt == "json":
            json.dump(records, fh, indent=1)
            fh.write("\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")
    return path


def read_results(path):
    """Parse a file written by :func:`emit_results` back into records."""
    with open(path, encoding="utf-8") as fh:
        if path.endswith(".json"):
            return json.load(fh)
        out = []
        for rec in csv.DictReader(fh):
            parsed = {}
            for k, v in rec.items():
                if k == "converged":
                    parsed[k] = v == "true"
                elif k == "iterations":
                    parsed[k] = int(v)
                else:
                    parsed[k] = float(v)
            out.append(parsed)
        return out


def finite(rows):
    return all(math.isfinite(v) for r in rows for v in r.as_record().values()
               if isinstance(v, float))
