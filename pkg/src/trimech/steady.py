"""Classical (mean-field) fixed points of the three-mode dynamics.

Everything here is in model units (kappa_c == 1, hbar == 1).  Setting
the time derivatives and noises to zero in the mean-field equations of
motion gives

    a_bar  = sqrt(2) * a_in / (i*dt_eff - 1),
    x1_bar = g1 * |a_bar|^2 / Omega1,
    x2_bar = 2 g2 chi |a_bar|^2 x1_bar / Omega2
           = 2 g1 g2 chi |a_bar|^4 / (Omega1 Omega2),

with the drive-shifted mechanical frequencies

    Omega1 = omega1 + 2 g2 chi^2 |a_bar|^2 - 4 g2^2 chi^2 |a_bar|^4 / Omega2,
    Omega2 = omega2 + 2 g2 |a_bar|^2,

and the effective detuning dt_eff = dt + g1 x1_bar - g2 (chi x1_bar - x2_bar)^2.

x1_bar follows from stationarity of the mirror momentum equation (it is
not fixed independently of it); both displacement relations above are
mutually consistent with that equation.  Omega2 <= 0 means the sphere's
effective potential is flat or inverted and no valid fixed point exists.

With an effective-detuning parameterization the fixed point is in closed
form.  With a bare detuning the scalar self-consistency condition
dt_eff = dt + g1 x1(dt_eff) - g2 (chi x1 - x2)^2(dt_eff) is solved by a
dense scan plus bisection; several roots may coexist (optical
bistability) and all are returned.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTrapError, NumericalError
from .params import ModelParams

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ClassicalSteadyState:
    """Mean-field solution in model units."""

    a_bar: complex        # intracavity amplitude
    x1_bar: float         # static mirror displacement
    x2_bar: float         # static sphere displacement
    Omega1: float         # drive-shifted mirror frequency
    Omega2: float         # drive-shifted sphere frequency
    delta_eff: float      # effective detuning
    photon_number: float  # |a_bar|^2


def cavity_amplitude(delta_eff, a_in) -> complex:
    """Intracavity amplitude for a given effective detuning and input.

    |a_bar|^2 = 2 |a_in|^2 / (delta_eff^2 + 1): twice the input flux on
    resonance, Lorentzian falloff with detuning.
    """
    return _SQRT2 * a_in / (1j * delta_eff - 1.0)


def effective_frequencies(m: ModelParams, photon_number):
    """Drive-shifted mechanical frequencies (Omega1, Omega2).

    Raises DegenerateTrapError when Omega2 <= 0: the quadratic coupling
    has flattened or inverted the sphere's trap, and the expansion about
    a static displacement is meaningless.
    """
    na = photon_number
    Omega2 = m.omega2 + 2.0 * m.g2 * na
    if Omega2 <= 0:
        raise DegenerateTrapError(
            f"sphere trap degenerate: Omega2 = {Omega2:.6g} at |a|^2 = {na:.6g}")
    Omega1 = (m.omega1 + 2.0 * m.g2 * m.chi ** 2 * na
              - 4.0 * m.g2 ** 2 * m.chi ** 2 * na ** 2 / Omega2)
    return Omega1, Omega2


def fixed_point(m: ModelParams) -> ClassicalSteadyState:
    """Closed-form fixed point for an effective-detuning parameterization."""
    if m.detuning_mode != "effective":
        raise ValueError("fixed_point requires detuning_mode='effective'; "
                         "use self_consistent_fixed_points for a bare detuning")
    return _expand(m, m.detuning)


def _expand(m: ModelParams, delta_eff) -> ClassicalSteadyState:
    a_in = math.sqrt(m.drive)
    na = 2.0 * m.drive / (delta_eff ** 2 + 1.0)
    Omega1, Omega2 = effective_frequencies(m, na)
    if Omega1 == 0:
        raise DegenerateTrapError("mirror effective frequency vanished")
    x1 = m.g1 * na / Omega1
    x2 = 2.0 * m.g2 * m.chi * na * x1 / Omega2
    return ClassicalSteadyState(
        a_bar=cavity_amplitude(delta_eff, a_in),
        x1_bar=x1, x2_bar=x2,
        Omega1=Omega1, Omega2=Omega2,
        delta_eff=delta_eff, photon_number=na,
    )


def effective_detuning(delta_bare, x1_bar, x2_bar, m: ModelParams):
    """Detuning corrected for the static optomechanical displacements."""
    return delta_bare + m.g1 * x1_bar - m.g2 * (m.chi * x1_bar - x2_bar) ** 2


def _consistency_residual(m: ModelParams, delta_bare, delta_eff):
    """dt + g1 x1(dt_eff) - g2 (chi x1 - x2)^2 - dt_eff; nan if trap degenerate."""
    try:
        s = _expand(m, delta_eff)
    except DegenerateTrapError:
        return math.nan
    return effective_detuning(delta_bare, s.x1_bar, s.x2_bar, m) - delta_eff


def self_consistent_fixed_points(m: ModelParams, window=None, scan_points=2001,
                                 tol=1e-12):
    """All fixed points for a bare-detuning parameterization.

    The scalar self-consistency condition is scanned on `scan_points`
    evenly spaced effective detunings over `window` (default
    +/- (|detuning| + 50)); each sign change is refined by bisection to
    `tol`.  Returns the expanded states sorted by photon number; more
    than one entry signals optical bistability.
    """
    if m.detuning_mode != "bare":
        raise ValueError("self_consistent_fixed_points requires detuning_mode='bare'")
    delta = m.detuning
    if window is None:
        half = abs(delta) + 50.0
        window = (-half, half)
    grid = np.linspace(window[0], window[1], scan_points)
    res = np.array([_consistency_residual(m, delta, d) for d in grid])

    roots = []
    for i in range(len(grid) - 1):
        r0, r1 = res[i], res[i + 1]
        if math.isnan(r0) or math.isnan(r1):
            continue
        if r0 == 0.0:
            roots.append(grid[i])
            continue
        if r0 * r1 < 0.0:
            lo, hi, flo = grid[i], grid[i + 1], r0
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = _consistency_residual(m, delta, mid)
                if math.isnan(fm):
                    break
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            roots.append(0.5 * (lo + hi))
    if res[-1] == 0.0:
        roots.append(grid[-1])

    if not roots:
        raise NumericalError(
            f"no self-consistent fixed point found for detuning {delta} "
            f"in window {window}")

    states = [_expand(m, r) for r in roots]
    states.sort(key=lambda s: s.photon_number)
    return states


def stationarity_residuals(m: ModelParams, s: ClassicalSteadyState):
    """Residuals of the zero-noise equations of motion at the fixed point.

    Returns |residual| for the cavity equation and the two momentum
    equations; the position equations are satisfied identically since
    the static momenta vanish.  Used by tests and the validation report.
    """
    a_in = math.sqrt(m.drive)
    ra = (1j * s.delta_eff - 1.0) * s.a_bar - _SQRT2 * a_in
    na = abs(s.a_bar) ** 2
    lever = m.chi * s.x1_bar - s.x2_bar
    rp1 = -m.omega1 * s.x1_bar + (m.g1 - 2.0 * m.g2 * m.chi * lever) * na
    rp2 = -m.omega2 * s.x2_bar + 2.0 * m.g2 * lever * na
    return abs(ra), abs(rp1), abs(rp2)
