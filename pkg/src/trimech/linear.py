"""Linearized fluctuation dynamics: drift/diffusion matrices, stability,
normal modes, stationary covariance, occupations and squeezing.

The fluctuation vector is ordered (dx, dp, dx1, dp1, dx2, dp2) with the
cavity quadratures dx = (da + da^dag)/sqrt(2), dp = i(da^dag - da)/sqrt(2);
a vacuum mode has variance 1/2 per quadrature in this convention.  The
mean field enters through the quadrature amplitudes xb = sqrt(2) Re(a_bar)
and pb = sqrt(2) Im(a_bar); the input-field phase is chosen so that the
mean amplitude is real, hence pb = 0 and xb = sqrt(2 |a_bar|^2).

First moments of the fluctuations obey d<R>/dt = A <R>; the stationary
covariance of a stable system solves the Lyapunov equation

    A V + V A^T = -D,

with the diffusion matrix D assembled from the symmetrized input noise
correlators: vacuum optical input contributes kappa_c per cavity
quadrature, each mechanical bath contributes 2*gamma_j*(2*n_j + 1) on its
momentum row, and all cross-correlations vanish because the three noises
are independent.

The production Lyapunov solver works in the eigenbasis of A (transform D,
divide by eigenvalue-pair sums, transform back).  Near-degenerate pair
sums fall back to the direct vectorized solve with a warning.
"""

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, UnstableSystemError
from .params import ModelParams
from .steady import ClassicalSteadyState

#: stability margin: stable means max Re(eig) < -EPS_STABLE
EPS_STABLE = 1e-12

#: eigenvalue-pair sums smaller than this trigger the vectorized fallback
PAIR_SUM_FLOOR = 1e-10

#: Lyapunov residual contract, relative to max|D|
RESIDUAL_REL = 1e-10


@dataclass(frozen=True)
class LinearModel:
    """Drift and diffusion matrices with the stability verdict."""

    drift: np.ndarray        # 6x6 real
    diffusion: np.ndarray    # 6x6 real symmetric PSD
    eigenvalues: np.ndarray  # 6 complex
    stable: bool


@dataclass(frozen=True)
class SteadyCovariance:
    """Stationary covariance matrix and derived scalars."""

    V: np.ndarray
    n1: float
    n2: float
    var_x1: float
    var_p1: float
    var_x2: float
    var_p2: float
    S1: float
    S2: float


def drift_matrix(m: ModelParams, s: ClassicalSteadyState) -> np.ndarray:
    """Drift matrix of the linearized dynamics (kappa_c = 1 units).

    `s` must be the fixed point belonging to `m`; the effective detuning
    and static displacements are read from it.  The mean field is taken
    real (pb = 0) by the input-phase convention, xb = sqrt(2 |a_bar|^2).
    """
    dt = s.delta_eff
    na = s.photon_number
    xb = math.sqrt(2.0 * na)
    pb = 0.0
    lever = m.chi * s.x1_bar - s.x2_bar
    g_lin = m.g1 - 2.0 * m.g2 * m.chi * lever  # mirror-field, displacement-corrected
    g_sph = 2.0 * m.g2 * lever                 # sphere-field, via the shared standing wave
    nq = xb * xb + pb * pb                     # = 2 |a_bar|^2
    return np.array([
        [-1.0,       -dt,        -g_lin * pb,                      0.0,   -g_sph * pb,                 0.0],
        [dt,         -1.0,        g_lin * xb,                      0.0,    g_sph * xb,                 0.0],
        [0.0,         0.0,        0.0,                             m.omega1, 0.0,                      0.0],
        [g_lin * xb,  g_lin * pb, -m.omega1 - m.g2 * m.chi ** 2 * nq, -2.0 * m.gamma1, m.g2 * m.chi * nq, 0.0],
        [0.0,         0.0,        0.0,                             0.0,    0.0,                        m.omega2],
        [g_sph * xb,  g_sph * pb, m.g2 * m.chi * nq,               0.0,   -m.omega2 - m.g2 * nq,       -2.0 * m.gamma2],
    ])


def diffusion_matrix(m: ModelParams) -> np.ndarray:
    """Symmetrized noise-input covariance D (kappa_c = 1 units)."""
    return np.diag([
        1.0,
        1.0,
        0.0,
        2.0 * m.gamma1 * (2.0 * m.n1 + 1.0),
        0.0,
        2.0 * m.gamma2 * (2.0 * m.n2 + 1.0),
    ])


def _eigvals_checked(A):
    """Eigenvalues of a real matrix, verified to come in conjugate pairs."""
    try:
        lam = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise NumericalError(f"eigenvalue solver failed: {exc}") from exc
    scale = max(np.abs(lam).max(), 1.0)
    paired = np.sort_complex(lam)
    conjed = np.sort_complex(np.conj(lam))
    if not np.allclose(paired, conjed, atol=1e-9 * scale, rtol=1e-9):
        raise NumericalError("eigenvalues of a real matrix failed to pair into conjugates")
    return lam


def stability(A, eps_stable=EPS_STABLE):
    """Routh-Hurwitz style verdict: stable iff max Re(eig) < -eps_stable.

    Returns (stable, eigenvalues).  Marginal spectra (eigenvalues on the
    imaginary axis) are reported unstable under the strict inequality.
    """
    lam = _eigvals_checked(np.asarray(A, dtype=float))
    return bool(lam.real.max() < -eps_stable), lam


def linear_model(m: ModelParams, s: ClassicalSteadyState) -> LinearModel:
    """Bundle drift, diffusion and the stability verdict."""
    A = drift_matrix(m, s)
    stable, lam = stability(A)
    return LinearModel(drift=A, diffusion=diffusion_matrix(m),
                       eigenvalues=lam, stable=stable)


def normal_modes(A, imag_floor=1e-9):
    """Normal modes as (frequency, damping) pairs, sorted by frequency.

    Complex-conjugate eigenvalue pairs give frequency |Im| and damping
    -Re.  Purely real eigenvalues (overdamped spectra) cannot be paired;
    each is returned individually with zero frequency and a warning is
    emitted.
    """
    lam = _eigvals_checked(np.asarray(A, dtype=float))
    scale = max(np.abs(lam).max(), 1.0)
    floor = imag_floor * scale
    complex_part = lam[lam.imag > floor]
    real_part = lam[np.abs(lam.imag) <= floor]
    modes = [(abs(ev.imag), -ev.real) for ev in complex_part]
    if len(real_part):
        warnings.warn("eigenvalues could not all be paired into oscillatory modes; "
                      "returning zero-frequency entries", stacklevel=2)
        modes.extend((0.0, -ev.real) for ev in np.sort(real_part.real))
    modes.sort(key=lambda fd: fd[0])
    return modes


def match_modes(reference_freqs, modes):
    """Reorder `modes` to follow `reference_freqs` with minimal frequency jumps.

    Used for continuity-based tracking across a parameter sweep: the
    assignment of len(reference_freqs) entries out of `modes` minimizing
    the total |f - f_ref| is returned, in reference order.
    """
    k = len(reference_freqs)
    if len(modes) < k:
        raise ValueError("fewer candidate modes than reference branches")
    best, best_cost = None, math.inf
    for perm in itertools.permutations(range(len(modes)), k):
        cost = sum(abs(modes[j][0] - reference_freqs[i]) for i, j in enumerate(perm))
        if cost < best_cost:
            best, best_cost = perm, cost
    return [modes[j] for j in best]


def _lyapunov_eigenbasis(A, D, refine=2):
    lam, S = np.linalg.eig(A)
    pair_sums = lam[:, None] + lam[None, :]

    def solve_for(rhs):
        # rhs_tilde = S^-1 rhs S^-T; rhs symmetric lets the second solve
        # reuse the transposed right-hand side.
        Rt = np.linalg.solve(S, np.linalg.solve(S, rhs).T)
        Vt = -Rt / pair_sums
        V = (S @ Vt @ S.T).real
        return 0.5 * (V + V.T)

    V = solve_for(D)
    # iterative refinement: correct with the residual re-solved through the
    # same factorization; sharpens near-marginal pair divisions
    for _ in range(refine):
        residual = A @ V + V @ A.T + D
        V = V + solve_for(residual)
    return V, np.abs(pair_sums).min()


def _residual(A, V, D):
    return np.abs(A @ V + V @ A.T + D).max()


def solve_lyapunov(A, D, pair_floor=PAIR_SUM_FLOOR) -> np.ndarray:
    """Stationary covariance solving A V + V A^T = -D.

    A must be stable (raises UnstableSystemError otherwise).  The result
    is symmetrized and satisfies max|A V + V A^T + D| < 1e-10 * max|D|;
    when eigenvalue-pair sums come within `pair_floor` of zero the
    ill-conditioned eigenbasis path is bypassed in favour of the direct
    vectorized solve (warning emitted, best-effort accuracy).
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    stable, lam = stability(A)
    if not stable:
        raise UnstableSystemError(
            f"no stationary covariance: max Re(eig) = {lam.real.max():.6g}")

    from .validate import lyapunov_direct  # oracle doubles as degenerate fallback

    pair_min = np.abs(lam[:, None] + lam[None, :]).min()
    bound = RESIDUAL_REL * max(np.abs(D).max(), np.finfo(float).tiny)
    if pair_min < pair_floor:
        warnings.warn(
            f"near-degenerate eigenvalue pair (|sum| = {pair_min:.3g}); "
            "using vectorized solve", stacklevel=2)
        return lyapunov_direct(A, D)

    V, _ = _lyapunov_eigenbasis(A, D)
    if _residual(A, V, D) > bound:
        V_alt = lyapunov_direct(A, D)
        if _residual(A, V_alt, D) < _residual(A, V, D):
            V = V_alt
        if _residual(A, V, D) > bound:
            raise NumericalError(
                f"Lyapunov residual {_residual(A, V, D):.3g} exceeds contract "
                f"{bound:.3g}")
    return V


def occupation(V, oscillator, clamp=True):
    """Mean phonon number of mechanical oscillator 1 or 2.

    n_j = (<x_j^2> + <p_j^2> - 1)/2.  Small negative values (roundoff)
    are clamped to zero when `clamp`; a warning is emitted if the raw
    value is below -1e-9.
    """
    if oscillator not in (1, 2):
        raise ValueError("oscillator must be 1 or 2")
    i = 2 * oscillator
    raw = 0.5 * (V[i, i] + V[i + 1, i + 1] - 1.0)
    if raw < -1e-9:
        warnings.warn(f"occupation n_{oscillator} = {raw:.3g} below physical floor",
                      stacklevel=2)
    if clamp and raw < 0.0:
        return 0.0
    return raw


def squeezing(V, oscillator):
    """Squeezing figure of merit 1/(2 min(<x_j^2>, <p_j^2>)).

    Exceeds 1 exactly when one quadrature variance dips below the
    vacuum value 1/2.
    """
    if oscillator not in (1, 2):
        raise ValueError("oscillator must be 1 or 2")
    i = 2 * oscillator
    return 1.0 / (2.0 * min(V[i, i], V[i + 1, i + 1]))


def symplectic_form(n_modes=3) -> np.ndarray:
    """Block-diagonal symplectic form for (x, p) mode ordering."""
    s = np.zeros((2 * n_modes, 2 * n_modes))
    for j in range(n_modes):
        s[2 * j, 2 * j + 1] = 1.0
        s[2 * j + 1, 2 * j] = -1.0
    return s


def physicality_floor(V) -> float:
    """Smallest eigenvalue of the Hermitian matrix V + (i/2) sigma.

    Nonnegative (up to roundoff) for every covariance matrix of a
    physical Gaussian state.
    """
    n_modes = V.shape[0] // 2
    H = V + 0.5j * symplectic_form(n_modes)
    return float(np.linalg.eigvalsh(H).min().real)


def steady_covariance(model: LinearModel) -> SteadyCovariance:
    """Solve for the stationary covariance and derive the scalar summaries."""
    if not model.stable:
        raise UnstableSystemError("system is unstable; no steady covariance")
    V = solve_lyapunov(model.drift, model.diffusion)
    return SteadyCovariance(
        V=V,
        n1=occupation(V, 1),
        n2=occupation(V, 2),
        var_x1=V[2, 2], var_p1=V[3, 3],
        var_x2=V[4, 4], var_p2=V[5, 5],
        S1=squeezing(V, 1),
        S2=squeezing(V, 2),
    )
