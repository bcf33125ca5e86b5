"""Closed-form distances and bounds between ideal gates and their approximations.

The displacement family admits a complete picture: the worst-case sine distance
over energy-bounded inputs ``f_sine``, the trace-distance lower bound ``d1``
with its explicit 4x4 difference operator, and the simplex bound for tensor
products of displacements. Beamsplitter/phase jitter gives the quadrature bound
``g_angle_bound``; squeezer and SUM gates get the two-mode-squeezed-vacuum
fidelities and sine distances used for the headline accuracy numbers; the
general one-mode residual channel gets its large-energy fidelity asymptotic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import floor

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from .errors import (
    DimensionMismatch,
    NumericalBreakdown,
    OutOfRange,
    QuadratureFailure,
    TruncationTooSmall,
)
from . import gaussian_core as gc
from . import fock_oracle as fo

# Reflectivity realizing unit gain G = 1 in the measurement-induced SUM gate.
R_UNIT_GAIN = (np.sqrt(5.0) - 1.0) ** 2 / 4.0

# Offline squeezing parameter corresponding to 15 dB, the strongest squeezing
# demonstrated experimentally.
R_15_DB = 1.726

QUAD_ABS_TOL = 1e-8
QUAD_LIMIT = 10_000


@dataclass(frozen=True)
class EnergyConstraint:
    """Mean photon-number budget E with its integer/fractional split."""

    E: float
    floor_E: int
    frac_E: float

    @classmethod
    def of(cls, E: float) -> "EnergyConstraint":
        if E < 0:
            raise OutOfRange(f"energy constraint must be >= 0, got {E}")
        fl = floor(E)
        return cls(float(E), fl, float(E) - fl)

    @property
    def ceil_E(self) -> int:
        return self.floor_E if self.frac_E == 0.0 else self.floor_E + 1


@dataclass(frozen=True)
class BoundValue:
    """A bound (or plain metric value) with its direction and provenance tag."""

    value: float
    kind: str  # "lower" | "upper" | "value"
    method: str  # "closed_form" | "quadrature" | "sdp" | "fock_trace"


# ---------------------------------------------------------------------------
# Displacement family
# ---------------------------------------------------------------------------

def f_sine(eta: float, E: float) -> float:
    """Energy-constrained sine distance between a displacement and its simulation.

    f(eta, E) = sqrt(1 - [(1 - {E}) sqrt(eta)^floor(E) + {E} sqrt(eta)^ceil(E)]^2);
    an upper bound on half the energy-constrained diamond distance.
    """
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange(f"transmissivity must lie in [0, 1], got {eta}")
    ec = EnergyConstraint.of(E)
    root = np.sqrt(eta)
    bracket = (1.0 - ec.frac_E) * root**ec.floor_E + ec.frac_E * root**ec.ceil_E
    return float(np.sqrt(max(1.0 - bracket * bracket, 0.0)))


def optimal_state_vec(E: float, M: int) -> np.ndarray:
    """State vector saturating the energy-constrained sine distance.

    sqrt(1-{E}) |0>_R |floor(E)>_A + sqrt({E}) |1>_R |ceil(E)>_A on the
    (R, A) truncated pair, with mean photon number on A exactly E.
    """
    ec = EnergyConstraint.of(E)
    if M < ec.ceil_E or (ec.frac_E > 0 and M < 1):
        raise TruncationTooSmall(f"cutoff M={M} cannot host energy E={E}")
    dim = M + 1
    vec = np.zeros(dim * dim, dtype=complex)
    vec[0 * dim + ec.floor_E] = np.sqrt(1.0 - ec.frac_E)
    if ec.frac_E > 0:
        vec[1 * dim + ec.ceil_E] = np.sqrt(ec.frac_E)
    return vec


def optimal_state(E: float, M: int) -> fo.FockDensity:
    """Density form of :func:`optimal_state_vec` on dims (M+1, M+1)."""
    dim = M + 1
    return fo.density_from_vec(optimal_state_vec(E, M), (dim, dim))


def d1(eta: float, E: float) -> float:
    """Trace-distance lower bound on half the energy-constrained diamond distance.

    Only defined for fractional energies 0 < E < 1; for E >= 1 use
    :func:`displacement_trace_distance_oracle`.
    """
    if not 0.0 < E < 1.0:
        raise OutOfRange(f"closed-form d1 needs 0 < E < 1, got {E}")
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange(f"transmissivity must lie in [0, 1], got {eta}")
    fE = E
    root = np.sqrt(eta)
    kappa_sq = fE * (4.0 + fE * (eta + 2.0 * root - 3.0))
    kappa = np.sqrt(max(kappa_sq, 0.0))
    return float(0.5 * (fE * (1.0 - eta) + (1.0 - root) * kappa))


def varrho_matrix(eta: float, E: float):
    """Difference operator between the loss-degraded and intact optimal state.

    Returns the explicit 4x4 Hermitian matrix on the {|0>,|1>}_A (x) {|0>,|1>}_R
    block (basis order |a r>) together with its trace norm, which equals
    2 * d1(eta, E).
    """
    if not 0.0 < E < 1.0:
        raise OutOfRange(f"the 4x4 difference form needs 0 < E < 1, got {E}")
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange(f"transmissivity must lie in [0, 1], got {eta}")
    fE = E
    root = np.sqrt(eta)
    off = -np.sqrt((1.0 - fE) * fE) * (1.0 - root)
    mat = np.zeros((4, 4))
    mat[1, 1] = fE * (1.0 - eta)
    mat[3, 3] = -fE * (1.0 - eta)
    mat[0, 3] = mat[3, 0] = off
    norm = float(np.sum(np.abs(np.linalg.eigvalsh(mat))))
    return mat, norm


def displacement_trace_distance_oracle(eta: float, E: float, M: int = 30) -> float:
    """Half trace distance between the optimal state and its loss-degraded copy.

    Fock-space route valid for any E >= 0 (the closed form d1 covers 0 < E < 1).
    """
    if not 0.0 < eta <= 1.0:
        raise OutOfRange(f"transmissivity must lie in (0, 1], got {eta}")
    psi = optimal_state(E, M)
    loss = fo.kraus_pure_loss(eta, M)
    degraded = fo.apply_truncated(loss, psi, on_modes=(1,))
    return 0.5 * fo.trace_distance_fock(psi, degraded)


def tensor_disp_bound(etas, E: float) -> float:
    """Upper bound on half the diamond distance for a tensor of displacements.

    Maximizes sum_i f_sine(eta_i, E_i) over nonnegative energy allocations with
    sum E_i <= E, by dynamic programming on a budget grid with iterative
    refinement down to an axis resolution of 1e-3.
    """
    etas = [float(e) for e in etas]
    if not etas or len(etas) > 8:
        raise OutOfRange(f"between 1 and 8 channels supported, got {len(etas)}")
    if any(not 0.0 <= e <= 1.0 for e in etas):
        raise OutOfRange("every transmissivity must lie in [0, 1]")
    if E < 0:
        raise OutOfRange(f"energy budget must be >= 0, got {E}")
    if len(etas) == 1 or E == 0.0:
        return f_sine(etas[0], E) if len(etas) == 1 else 0.0

    def dp(lo, span, step):
        """Best allocation with E_i = lo_i + k_i * step, sum E_i <= E."""
        budget = E - sum(lo)
        nb = int(np.floor(budget / step + 1e-12)) + 1
        best = np.zeros(nb)
        choices = []
        for i, eta in enumerate(etas):
            npts = min(int(np.floor(span[i] / step + 1e-12)) + 1, nb)
            vals = np.array([f_sine(eta, lo[i] + k * step) for k in range(npts)])
            new = np.full(nb, -np.inf)
            pick = np.zeros(nb, dtype=int)
            for j in range(nb):
                k_max = min(npts - 1, j)
                cand = vals[: k_max + 1] + best[j - k_max : j + 1][::-1]
                k = int(np.argmax(cand))
                new[j] = cand[k]
                pick[j] = k
            best = new
            choices.append(pick)
        j = int(np.argmax(best))
        value = float(best[j])
        alloc = [0.0] * len(etas)
        for i in range(len(etas) - 1, -1, -1):
            k = int(choices[i][j])
            alloc[i] = lo[i] + k * step
            j -= k
        return value, alloc

    step = max(E / 200.0, 1e-3)
    lo = [0.0] * len(etas)
    span = [E] * len(etas)
    value, alloc = dp(lo, span, step)
    while step > 1e-3:
        step = max(step / 8.0, 1e-3)
        lo = [max(0.0, a - 10 * step) for a in alloc]
        span = [min(E, a + 10 * step) - l for a, l in zip(alloc, lo)]
        v, alloc = dp(lo, span, step)
        value = max(value, v)
    return value


# ---------------------------------------------------------------------------
# Truncated-normal jitter bounds
# ---------------------------------------------------------------------------

def _norm_cdf(x: float) -> float:
    return 0.5 * (1.0 + erf(x / np.sqrt(2.0)))


def trunc_normal_pdf(x: float, loc: float, scale: float, lo: float, hi: float) -> float:
    """Density of a normal(loc, scale) conditioned on [lo, hi]."""
    if scale <= 0:
        raise OutOfRange(f"scale must be positive, got {scale}")
    if lo >= hi:
        raise OutOfRange(f"empty support [{lo}, {hi}]")
    if x < lo or x > hi:
        raise OutOfRange(f"evaluation point {x} outside [{lo}, {hi}]")
    z = (x - loc) / scale
    mass = _norm_cdf((hi - loc) / scale) - _norm_cdf((lo - loc) / scale)
    if mass <= 0:
        raise NumericalBreakdown("truncation interval carries no probability mass")
    return float(np.exp(-0.5 * z * z) / (np.sqrt(2.0 * np.pi) * scale * mass))


def g_angle_bound(loc: float, scale: float, E: float) -> float:
    """Upper bound on half the diamond distance for angle-jittered gates.

    Integrates 2*sqrt(E*|angle - loc|) against the truncated-normal jitter on
    [0, 2*pi]; the integrand kink at the center is handled by splitting the
    adaptive quadrature there. Covers both jittered beamsplitters and jittered
    phase rotations.
    """
    if scale <= 0:
        raise OutOfRange(f"scale must be positive, got {scale}")
    if E < 0:
        raise OutOfRange(f"energy constraint must be >= 0, got {E}")
    if not 0.0 <= loc <= 2.0 * np.pi:
        raise OutOfRange(f"angle must lie in [0, 2*pi], got {loc}")
    if E == 0.0:
        return 0.0

    def integrand(theta):
        return trunc_normal_pdf(theta, loc, scale, 0.0, 2.0 * np.pi) * 2.0 * np.sqrt(
            E * abs(theta - loc)
        )

    # Split at the kink and bracket the density spike so narrow scales are
    # never stepped over by the initial quadrature nodes.
    raw = [loc + k * scale for k in (-8.0, -4.0, -1.0, 0.0, 1.0, 4.0, 8.0)]
    points = sorted({p for p in raw if 0.0 < p < 2.0 * np.pi})
    value, abserr = quad(
        integrand, 0.0, 2.0 * np.pi, points=points or None,
        epsabs=QUAD_ABS_TOL, epsrel=1e-10, limit=QUAD_LIMIT,
    )
    if abserr > 1e-6:
        raise QuadratureFailure(f"quadrature error estimate {abserr} too large")
    return float(value)


# ---------------------------------------------------------------------------
# Squeezer family
# ---------------------------------------------------------------------------

def _squeezer_noise(r: float, r_E: float) -> float:
    return (np.exp(2.0 * r) - 1.0) * np.exp(-2.0 * r_E)


def squeezer_sv_fidelity(r: float, r_E: float, z: float) -> float:
    """Fidelity of the measurement-induced squeezer on squeezed vacuum |z>."""
    if r_E < 0:
        raise OutOfRange(f"offline squeezing must be >= 0, got {r_E}")
    if z <= 0:
        raise OutOfRange(f"squeezed-vacuum parameter must be positive, got {z}")
    c = _squeezer_noise(r, r_E)
    return float(np.sqrt(2.0 * z / (2.0 * z + c)))


def squeezer_tms_fidelity(r: float, r_E: float, N: float) -> float:
    """Fidelity of the measurement-induced squeezer on a two-mode squeezed input."""
    if r_E < 0:
        raise OutOfRange(f"offline squeezing must be >= 0, got {r_E}")
    if N < 0:
        raise OutOfRange(f"input mean photon number must be >= 0, got {N}")
    c = _squeezer_noise(r, r_E)
    return float(1.0 / np.sqrt(1.0 + (N + 0.5) * c))


def squeezer_tms_sine(r: float, r_E: float, N: float) -> float:
    """Sine distance sqrt(1 - F) of :func:`squeezer_tms_fidelity`."""
    return gc.sine_distance(squeezer_tms_fidelity(r, r_E, N))


# ---------------------------------------------------------------------------
# SUM family
# ---------------------------------------------------------------------------

def sum_sv_fidelity(z: float, R: float, rA: float, rB: float) -> float:
    """Fidelity of the measurement-induced SUM gate on |z> (x) |z>."""
    if z <= 0:
        raise OutOfRange(f"squeezed-vacuum parameter must be positive, got {z}")
    _check_sum_params(R, rA, rB)
    a = 2.0 * z * R + (1.0 - R) * np.exp(-2.0 * rA)
    b = 2.0 * R + z * (1.0 - R) * np.exp(-2.0 * rB)
    return float(2.0 * np.sqrt(z) * R / np.sqrt(a * b))


def _check_sum_params(R: float, rA: float, rB: float):
    if not 0.0 < R <= 1.0:
        raise OutOfRange(f"reflectivity parameter must lie in (0, 1], got {R}")
    if rA < 0 or rB < 0:
        raise OutOfRange("offline squeezing parameters must be >= 0")


def sum_tms_fidelity(N: float, R: float, rA: float, rB: float) -> float:
    """Fidelity of the measurement-induced SUM gate on two two-mode-squeezed pairs.

    F = 2 R e^{rA + rB} / sqrt((kappa - 2 e^{2 rA} R)(kappa - 2 e^{2 rB} R)) with
    kappa = (R - 1)(1 + 2N); symmetric under rA <-> rB.
    """
    if N < 0:
        raise OutOfRange(f"input mean photon number must be >= 0, got {N}")
    _check_sum_params(R, rA, rB)
    kappa = (R - 1.0) * (1.0 + 2.0 * N)
    a = kappa - 2.0 * np.exp(2.0 * rA) * R
    b = kappa - 2.0 * np.exp(2.0 * rB) * R
    rad = a * b
    if rad <= 0:
        raise NumericalBreakdown("nonpositive radicand in SUM fidelity")
    return float(min(2.0 * R * np.exp(rA + rB) / np.sqrt(rad), 1.0))


def sum_sine(rB: float, N: float, rA: float = R_15_DB, R: float = R_UNIT_GAIN) -> float:
    """Sine distance of the SUM simulation at unit gain and 15 dB on one ancilla."""
    return gc.sine_distance(sum_tms_fidelity(N, R, rA, rB))


def sum_tms_fidelity_via_channel(N: float, R: float, rA: float, rB: float) -> float:
    """Independent route to :func:`sum_tms_fidelity` through the noise channel.

    Applies the residual channel to the two signal arms of a four-mode input,
    then rotates signal and reference pairs by twinned beamsplitters chosen to
    decouple the position and momentum noise onto separate rotated modes. The
    four-mode state splits exactly into two two-mode blocks whose fidelities
    multiply.
    """
    from .gate_zoo import sum_residual  # local import to avoid a cycle

    if N < 0:
        raise OutOfRange(f"input mean photon number must be >= 0, got {N}")
    _check_sum_params(R, rA, rB)
    tms = gc.state_tms(N)
    state4 = gc.tensor_state(tms, tms)  # modes (R1, A1, R2, A2)
    noisy = gc.apply_channel(gc.extend_channel(sum_residual(rA, rB, R), 4, [1, 3]), state4)

    phi = -np.arctan(1.0 / np.sqrt(R))
    rot = gc.symplectic_bs_real(phi)
    for modes in ([1, 3], [0, 2]):
        rot4 = gc.extend_channel(rot, 4, modes)
        state4 = gc.apply_channel(rot4, state4)
        noisy = gc.apply_channel(rot4, noisy)

    for st in (state4, noisy):
        cross = st.cov[np.ix_([0, 1, 2, 3], [4, 5, 6, 7])]
        if np.max(np.abs(cross)) > 1e-10:
            raise NumericalBreakdown("rotated state failed to decouple into pairs")
    f1 = gc.fidelity_gaussian(gc.reduce_state(state4, [0, 1]), gc.reduce_state(noisy, [0, 1]))
    f2 = gc.fidelity_gaussian(gc.reduce_state(state4, [2, 3]), gc.reduce_state(noisy, [2, 3]))
    return float(f1 * f2)


# ---------------------------------------------------------------------------
# Arbitrary one-mode Gaussian unitary residuals
# ---------------------------------------------------------------------------

def arbitrary_unitary_fidelity(Xres, Yres, nbar: float) -> float:
    """Fidelity of a residual channel acting on one arm of a two-mode squeezed probe."""
    if nbar < 0:
        raise OutOfRange(f"probe mean photon number must be >= 0, got {nbar}")
    ch = gc.GaussianChannel(1, 1, np.asarray(Xres, float), np.asarray(Yres, float), np.zeros(2))
    probe = gc.state_tms(nbar)
    out = gc.apply_channel(gc.extend_channel(ch, 2, [1]), probe)
    return gc.fidelity_gaussian(probe, out)


def arbitrary_unitary_coefficient(Xres) -> float:
    """Limit of nbar^2 * fidelity for a non-unitary residual channel.

    Equals 1 / |(1 - x11)(1 - x22) - x12 x21|; diverges (returns inf) when the
    residual's scaling matrix fixes the probe to first order.
    """
    X = np.asarray(Xres, dtype=float)
    if X.shape != (2, 2):
        raise DimensionMismatch(f"expected a 2x2 scaling matrix, got {X.shape}")
    denom = (1.0 - X[0, 0]) * (1.0 - X[1, 1]) - X[0, 1] * X[1, 0]
    if denom == 0.0:
        return float("inf")
    return float(1.0 / abs(denom))


# ---------------------------------------------------------------------------
# Unit conversions
# ---------------------------------------------------------------------------

def r_to_db(r: float) -> float:
    """Squeezing parameter to decibels: 10 log10(exp(2r))."""
    return float(10.0 * np.log10(np.exp(2.0 * r)))


def db_to_r(db: float) -> float:
    """Decibels to squeezing parameter; exact inverse of :func:`r_to_db`."""
    return float(db * np.log(10.0) / 20.0)
