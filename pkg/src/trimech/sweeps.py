"""Parameter sweeps and optimization: power sweeps with mode tracking,
squeezing sweeps, instability thresholds, and the cooling landscape.

All sweeps parameterize the drive by the effective detuning (closed-form
fixed point per point) and report model-unit drives |a_in|^2 alongside
watts when a physical parameter set provides the conversion.  A sweep
truncates at the first point without a stable stationary state and
records the bracketing drives, so downstream consumers see only rows
with valid covariance-derived scalars.

The (detuning, power) optimizer is deterministic: a coarse grid (linear
in detuning, logarithmic in drive) followed by coordinate pattern
search with successive halving from the best few coarse cells.  The
cooling ridge is narrow in power, which is why refinement marches each
improving direction as far as it pays before halving the step.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import (DegenerateTrapError, NumericalError, PhysicsError,
                     UnstableSystemError)
from .linear import linear_model, match_modes, normal_modes, steady_covariance
from .params import HBAR, ModelParams, PhysicalParams, nondimensionalize
from .steady import fixed_point


def drive_from_watts(p: PhysicalParams, power_watts):
    """Input power in watts to model-unit photon flux |a_in|^2 / kappa_c."""
    return power_watts / (HBAR * p.cavity_freq) / p.cavity_decay


def watts_from_drive(p: PhysicalParams, drive):
    return drive * p.cavity_decay * HBAR * p.cavity_freq


def solve_point(m: ModelParams):
    """Fixed point, linear model and covariance for one parameter set.

    Returns (state, model, covariance); raises DegenerateTrapError or
    UnstableSystemError when no stable stationary state exists.
    """
    s = fixed_point(m)
    lm = linear_model(m, s)
    if not lm.stable:
        raise UnstableSystemError(
            f"unstable at drive {m.drive:.6g}, detuning {m.detuning:.6g}")
    return s, lm, steady_covariance(lm)


def is_stable(m: ModelParams) -> bool:
    """Stability verdict including trap degeneracy."""
    try:
        s = fixed_point(m)
    except DegenerateTrapError:
        return False
    return linear_model(m, s).stable


@dataclass(frozen=True)
class PowerSweepResult:
    drive: np.ndarray             # stable rows only
    power_w: np.ndarray           # NaN when no conversion was given
    freqs: np.ndarray             # (n, 3): cavity, mirror, sphere branches
    dampings: np.ndarray          # (n, 3)
    n1: np.ndarray
    n2: np.ndarray
    threshold_bracket: tuple      # (last stable, first unstable drive) or None
    hybridization: dict           # min mechanical-branch separation summary


@dataclass(frozen=True)
class SqueezeSweepResult:
    drive: np.ndarray
    power_w: np.ndarray
    var_x1: np.ndarray
    var_p1: np.ndarray
    var_x2: np.ndarray
    var_p2: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    threshold_bracket: tuple
    max_S2: dict                  # {"value", "drive", "power_w"}


def _sweep_rows(m: ModelParams, drives):
    """Yield (drive, state, model, cov) until the first unstable drive.

    Returns the list of rows and the threshold bracket, if the sweep hit
    instability.
    """
    rows = []
    bracket = None
    last_stable = None
    for drive in drives:
        mi = replace(m, drive=float(drive))
        try:
            row = solve_point(mi)
        except (UnstableSystemError, DegenerateTrapError, NumericalError):
            # instability, an inverted trap, or a point so close to the
            # boundary that no covariance can be certified: end the sweep
            bracket = (last_stable, float(drive))
            break
        rows.append((float(drive), *row))
        last_stable = float(drive)
    return rows, bracket


def power_sweep(m: ModelParams, drives, base: PhysicalParams = None) -> PowerSweepResult:
    """Normal-mode frequencies and occupations along a drive grid.

    Modes are tracked by continuity: the first row's modes are matched
    to (|detuning|, omega1, omega2) to label the cavity, mirror and
    sphere branches, and each subsequent row is matched to the previous
    one by minimal total frequency jump.  The hybridization entry flags
    the row where the mirror and sphere branches come closest.
    """
    rows, bracket = _sweep_rows(m, drives)
    if not rows:
        raise PhysicsError("no stable point in the swept drive range")

    reference = [abs(m.detuning), m.omega1, m.omega2]
    freqs, damps, n1s, n2s, kept = [], [], [], [], []
    for drive, s, lm, cov in rows:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # overdamped rows fall back to 0-frequency
            modes = normal_modes(lm.drift)
        tracked = match_modes(reference, modes)
        reference = [f for f, _ in tracked]
        freqs.append([f for f, _ in tracked])
        damps.append([d for _, d in tracked])
        n1s.append(cov.n1)
        n2s.append(cov.n2)
        kept.append(drive)

    freqs = np.asarray(freqs)
    kept = np.asarray(kept)
    sep = np.abs(freqs[:, 1] - freqs[:, 2])
    i_min = int(np.argmin(sep))
    n1s = np.asarray(n1s)
    n2s = np.asarray(n2s)
    hybrid = {
        "index": i_min,
        "drive": float(kept[i_min]),
        "separation": float(sep[i_min]),
        "n1": float(n1s[i_min]),
        "n2": float(n2s[i_min]),
        "occupation_mismatch": float(abs(n1s[i_min] - n2s[i_min])
                                     / max(n1s[i_min], n2s[i_min], 1e-300)),
    }
    power_w = (watts_from_drive(base, kept) if base is not None
               else np.full_like(kept, np.nan))
    return PowerSweepResult(
        drive=kept, power_w=power_w, freqs=freqs, dampings=np.asarray(damps),
        n1=n1s, n2=n2s, threshold_bracket=bracket, hybridization=hybrid,
    )


def squeezing_sweep(m: ModelParams, drives, base: PhysicalParams = None) -> SqueezeSweepResult:
    """Quadrature variances and squeezing along a drive grid."""
    rows, bracket = _sweep_rows(m, drives)
    if not rows:
        raise PhysicsError("no stable point in the swept drive range")
    kept = np.array([r[0] for r in rows])
    covs = [r[3] for r in rows]
    S2 = np.array([c.S2 for c in covs])
    i_max = int(np.argmax(S2))
    power_w = (watts_from_drive(base, kept) if base is not None
               else np.full_like(kept, np.nan))
    return SqueezeSweepResult(
        drive=kept, power_w=power_w,
        var_x1=np.array([c.var_x1 for c in covs]),
        var_p1=np.array([c.var_p1 for c in covs]),
        var_x2=np.array([c.var_x2 for c in covs]),
        var_p2=np.array([c.var_p2 for c in covs]),
        S1=np.array([c.S1 for c in covs]),
        S2=S2,
        threshold_bracket=bracket,
        max_S2={"value": float(S2[i_max]), "drive": float(kept[i_max]),
                "power_w": float(power_w[i_max])},
    )


def instability_threshold(m: ModelParams, drive_lo, drive_hi, rel_tol=1e-4) -> float:
    """Critical drive where stability is lost, by geometric bisection.

    Requires a stable lower bound and an unstable upper bound; the
    returned value is the last stable drive of a bracket of relative
    width `rel_tol`.
    """
    if not (0 < drive_lo < drive_hi):
        raise ValueError("need 0 < drive_lo < drive_hi")
    lo = float(drive_lo)
    hi = float(drive_hi)
    if not is_stable(replace(m, drive=lo)):
        raise ValueError(f"lower bound {lo:.6g} is not stable")
    if is_stable(replace(m, drive=hi)):
        raise ValueError(f"upper bound {hi:.6g} is not unstable")
    while hi / lo > 1.0 + rel_tol:
        mid = math.sqrt(lo * hi)
        if is_stable(replace(m, drive=mid)):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class OptimizeResult:
    value: float
    detuning: float
    drive: float
    on_boundary: bool
    evaluations: int


def optimize_scalar(objective, detuning_bounds, drive_bounds,
                    coarse=(25, 25), refine_starts=3, step_floor=1e-3) -> OptimizeResult:
    """Deterministic minimizer over (detuning, drive).

    `objective(detuning, drive)` returns a scalar, +inf where undefined
    (unstable or degenerate).  Stage one evaluates a coarse grid, linear
    in detuning and logarithmic in drive; stage two runs coordinate
    pattern search (march while improving, then halve the step) from the
    best `refine_starts` coarse cells down to a relative step floor.
    Emits a warning when the optimum sits on a bound.
    """
    d_lo, d_hi = map(float, detuning_bounds)
    p_lo, p_hi = map(float, drive_bounds)
    if not (d_lo < d_hi and 0 < p_lo < p_hi):
        raise ValueError("bounds must be ordered and drives positive")
    n_det, n_drv = coarse
    dets = np.linspace(d_lo, d_hi, n_det)
    logs = np.linspace(math.log10(p_lo), math.log10(p_hi), n_drv)

    evals = 0

    def f(x):
        nonlocal evals
        evals += 1
        return objective(x[0], 10.0 ** x[1])

    cells = []
    for dv in dets:
        for lg in logs:
            val = f((dv, lg))
            if math.isfinite(val):
                cells.append((val, dv, lg))
    if not cells:
        return OptimizeResult(math.inf, math.nan, math.nan, False, evals)
    cells.sort(key=lambda c: (c[0], c[1], c[2]))

    lo_b = (d_lo, math.log10(p_lo))
    hi_b = (d_hi, math.log10(p_hi))
    step0 = (dets[1] - dets[0] if n_det > 1 else 0.1 * (d_hi - d_lo),
             logs[1] - logs[0] if n_drv > 1 else 0.1)

    # Stage two is nested coordinate descent.  The objective's valley is a
    # needle in drive (the hybridization window is well under a percent
    # wide) that drifts smoothly with detuning, so the drive coordinate
    # gets an exact line minimization (local scan plus marching halving)
    # and the detuning coordinate an outer march over those per-detuning
    # minima, warm-started at the neighbouring needle position.
    lg_lo, lg_hi = lo_b[1], hi_b[1]

    def drive_minimum(det, seed_lg, span=0.3, scan=25):
        lo = max(lg_lo, seed_lg - span)
        hi = min(lg_hi, seed_lg + span)
        if hi <= lo:
            lo, hi = lg_lo, lg_hi
        grid = np.linspace(lo, hi, scan)
        vals = [f((det, lg)) for lg in grid]
        i = int(np.argmin(vals))
        fb, lg = vals[i], grid[i]
        if not math.isfinite(fb):
            return math.inf, seed_lg
        step = grid[1] - grid[0]
        while step > 1e-4:
            moved = False
            for sgn in (1.0, -1.0):
                nxt = min(max(lg + sgn * step, lg_lo), lg_hi)
                if nxt == lg:
                    continue
                v = f((det, nxt))
                if v < fb:
                    fb, lg = v, nxt
                    moved = True
                    while True:
                        nxt = min(max(lg + sgn * step, lg_lo), lg_hi)
                        if nxt == lg:
                            break
                        v = f((det, nxt))
                        if v < fb:
                            fb, lg = v, nxt
                        else:
                            break
            if not moved:
                step *= 0.5
        return fb, lg

    best_val, best_x = math.inf, None
    for val, det0, lg0 in cells[:refine_starts]:
        fb, lg = drive_minimum(det0, lg0)
        det = det0
        step = step0[0]
        floor = step_floor * max(abs(det), 1.0)
        while step > floor:
            improved = False
            for sgn in (1.0, -1.0):
                det_t = min(max(det + sgn * step, lo_b[0]), hi_b[0])
                if det_t == det:
                    continue
                v, lg_t = drive_minimum(det_t, lg)
                if v < fb:
                    fb, det, lg = v, det_t, lg_t
                    improved = True
                    while True:
                        det_t = min(max(det + sgn * step, lo_b[0]), hi_b[0])
                        if det_t == det:
                            break
                        v, lg_t = drive_minimum(det_t, lg)
                        if v < fb:
                            fb, det, lg = v, det_t, lg_t
                        else:
                            break
            if not improved:
                step *= 0.5
                floor = step_floor * max(abs(det), 1.0)
        if fb < best_val:
            best_val, best_x = fb, [det, lg]

    on_boundary = (best_x[0] in (d_lo, d_hi)
                   or best_x[1] in (math.log10(p_lo), math.log10(p_hi)))
    if on_boundary:
        warnings.warn("optimum lies on a search bound; consider widening the box",
                      stacklevel=2)
    return OptimizeResult(value=best_val, detuning=best_x[0],
                          drive=10.0 ** best_x[1], on_boundary=on_boundary,
                          evaluations=evals)


def sphere_occupation_objective(m: ModelParams):
    """Objective closure returning the sphere occupation, +inf when unstable."""
    def objective(detuning, drive):
        mi = replace(m, detuning=float(detuning), drive=float(drive),
                     detuning_mode="effective")
        try:
            _, _, cov = solve_point(mi)
        except (UnstableSystemError, DegenerateTrapError, NumericalError):
            return math.inf
        return cov.n2
    return objective


@dataclass(frozen=True)
class LandscapePoint:
    omega1: float
    omega2: float
    n2_min: float
    n2_thermal: float
    detuning: float
    drive: float
    ok: bool
    message: str = ""


@dataclass(frozen=True)
class LandscapeResult:
    points: list          # row-major over (omega1, omega2)
    omega1: np.ndarray
    omega2: np.ndarray
    ridge: dict           # omega1 -> omega2 minimizing the cooled occupation


def occupation_landscape(base: PhysicalParams, omega1_grid, omega2_grid,
                         detuning_bounds=(-45.0, -2.0),
                         drive_bounds=(1e6, 1e12),
                         coarse=(25, 25), threads=1) -> LandscapeResult:
    """Minimized sphere occupation over (detuning, drive) per frequency cell.

    Mechanical frequencies are taken in units of the cavity decay rate;
    each cell re-derives the couplings and bath occupations from `base`
    at the shifted frequencies, so the frequency scaling of g1, g2 and
    chi is applied consistently.  Cells where the optimizer finds no
    stable point are recorded, not fatal.  omega2 must lie strictly
    between the cavity linewidth (1 in model units) and omega1.
    """
    omega1_grid = np.atleast_1d(np.asarray(omega1_grid, dtype=float))
    omega2_grid = np.atleast_1d(np.asarray(omega2_grid, dtype=float))
    if omega1_grid.size == 0 or omega2_grid.size == 0:
        raise ValueError("frequency axes must be non-empty")
    if np.any(omega2_grid <= 1.0) or np.any(omega2_grid >= omega1_grid.max()):
        raise ValueError("omega2 grid must lie inside (1, max(omega1)) in "
                         "units of the cavity decay rate")

    kappa = base.cavity_decay

    def solve_cell(idx):
        i, j = idx
        o1, o2 = omega1_grid[i], omega2_grid[j]
        if o2 >= o1:
            return LandscapePoint(o1, o2, math.inf, math.nan, math.nan,
                                  math.nan, False, "omega2 >= omega1 excluded")
        phys = replace(base, mirror_freq=o1 * kappa, sphere_freq=o2 * kappa)
        m = nondimensionalize(phys, detuning=-1.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # boundary-optimum warnings recorded via flag
            opt = optimize_scalar(sphere_occupation_objective(m),
                                  detuning_bounds, drive_bounds, coarse=coarse)
        if not math.isfinite(opt.value):
            return LandscapePoint(o1, o2, math.inf, m.n2, math.nan, math.nan,
                                  False, "no stable point in bounds")
        return LandscapePoint(o1, o2, opt.value, m.n2, opt.detuning,
                              opt.drive, True)

    indices = [(i, j) for i in range(omega1_grid.size)
               for j in range(omega2_grid.size)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(solve_cell, indices))
    else:
        points = [solve_cell(idx) for idx in indices]

    ridge = {}
    for i, o1 in enumerate(omega1_grid):
        row = [p for p in points[i * omega2_grid.size:(i + 1) * omega2_grid.size]
               if p.ok]
        if row:
            ridge[float(o1)] = float(min(row, key=lambda p: p.n2_min).omega2)
    return LandscapeResult(points=points, omega1=omega1_grid,
                           omega2=omega2_grid, ridge=ridge)
