"""Ideal Gaussian gates and their experimentally realizable approximations.

Each gate family pairs an ideal unitary channel with the noisy channel that a
laboratory protocol actually implements:

* displacement  -- beamsplitter + strong coherent ancilla, equal to the ideal
  displacement preceded by a pure-loss channel;
* beamsplitter  -- either surrounded by photon loss, or an angle-jittered
  mixture with truncated-normal jitter;
* phase         -- loss-preceded rotation, or angle-jittered mixture;
* squeezer      -- measurement-induced squeezing with an offline squeezed
  ancilla, equal to the ideal squeezer composed with a residual noise channel;
* sum           -- measurement-induced QND interaction, likewise ideal gate
  composed with a two-mode residual noise channel.

Mixture gates are not Gaussian channels; they are represented by their angle
density plus a base-channel builder, and are evaluated by integrating
state-level or fidelity-level integrands over the angle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DimensionMismatch, OutOfRange
from .gaussian_core import (
    GaussianChannel,
    GaussianState,
    apply_channel,
    channel_from_dilation,
    channel_from_symplectic,
    char_fn,
    compose,
    fidelity_gaussian,
    identity_channel,
    is_pure,
    state_coherent,
    symplectic_bs,
    symplectic_bs_real,
    symplectic_phase,
    symplectic_squeeze,
    symplectic_sum,
    tensor_state,
)
from .metrics_bounds import trunc_normal_pdf

# Noise-parameter ladders used by the convergence tests: three decades each.
LADDER_ETA = (0.9, 0.99, 0.999, 0.9999)
LADDER_RE = (1.0, 2.0, 4.0, 8.0)
LADDER_SIGMA = (0.5, 0.1, 0.02, 0.004)

GATE_FAMILIES = ("displacement", "beamsplitter", "phase", "squeezer", "sum")


@dataclass(frozen=True)
class TruncatedNormalParams:
    loc: float
    scale: float
    lo: float
    hi: float

    def __post_init__(self):
        if self.scale <= 0:
            raise OutOfRange(f"scale must be positive, got {self.scale}")
        if self.lo >= self.hi:
            raise OutOfRange(f"empty support [{self.lo}, {self.hi}]")

    def pdf(self, x: float) -> float:
        return trunc_normal_pdf(x, self.loc, self.scale, self.lo, self.hi)


@dataclass(frozen=True)
class AngleMixture:
    """Statistical mixture of one-parameter gates over a truncated-normal angle."""

    density: TruncatedNormalParams
    base: Callable[[float], GaussianChannel]
    family: str


ApproxGate = Union[GaussianChannel, AngleMixture]


@dataclass(frozen=True)
class GatePair:
    label: str
    ideal: GaussianChannel
    approx: ApproxGate


# ---------------------------------------------------------------------------
# Loss and displacement
# ---------------------------------------------------------------------------

def pure_loss(eta: float) -> GaussianChannel:
    """Pure-loss channel: X = sqrt(eta) I, Y = (1 - eta) I."""
    if not 0.0 < eta <= 1.0:
        raise OutOfRange(f"transmissivity must lie in (0, 1], got {eta}")
    X = np.sqrt(eta) * np.eye(2)
    Y = (1.0 - eta) * np.eye(2)
    return GaussianChannel(1, 1, X, Y, np.zeros(2))


def displacement_vector(alpha: complex) -> np.ndarray:
    alpha = complex(alpha)
    return np.sqrt(2.0) * np.array([alpha.real, alpha.imag])


def ideal_displacement(alpha: complex) -> GaussianChannel:
    return GaussianChannel(1, 1, np.eye(2), np.zeros((2, 2)), displacement_vector(alpha))


def approx_displacement(eta: float, alpha: complex) -> GaussianChannel:
    """Displacement simulated with a beamsplitter and a coherent ancilla.

    Equal to the ideal displacement composed after a pure-loss channel of
    transmissivity eta; the ancilla amplitude alpha/sqrt(1-eta) drops out.
    """
    if not 0.0 < eta < 1.0:
        raise OutOfRange(f"transmissivity must lie in (0, 1), got {eta}")
    return compose(ideal_displacement(alpha), pure_loss(eta))


def raw_displacement_construction(eta: float, alpha: complex) -> GaussianChannel:
    """The same simulation built literally: couple to |alpha/sqrt(1-eta)>, trace out."""
    if not 0.0 < eta < 1.0:
        raise OutOfRange(f"transmissivity must lie in (0, 1), got {eta}")
    beta = complex(alpha) / np.sqrt(1.0 - eta)
    theta = np.arccos(np.sqrt(eta))
    return channel_from_dilation(symplectic_bs_real(theta), state_coherent(beta))


# ---------------------------------------------------------------------------
# Beamsplitter and phase rotation
# ---------------------------------------------------------------------------

def approx_bs_loss(eta: float, phi: float, eta_loss: float) -> GaussianChannel:
    """Beamsplitter with equal photon loss on both arms, folded to one side.

    Loss channels of equal transmissivity commute with the beamsplitter, so
    the two-sided loss model collapses to B o (L (x) L) with the squared
    transmissivity absorbed into eta_loss by the caller.
    """
    if not 0.0 < eta < 1.0:
        raise OutOfRange(f"beamsplitter transmissivity must lie in (0, 1), got {eta}")
    if not 0.0 < eta_loss <= 1.0:
        raise OutOfRange(f"loss transmissivity must lie in (0, 1], got {eta_loss}")
    theta = np.arccos(np.sqrt(eta))
    bs = symplectic_bs(theta, phi)
    X = bs.X * np.sqrt(eta_loss)
    Y = (1.0 - eta_loss) * np.eye(4)
    return GaussianChannel(2, 2, X, Y, np.zeros(4))


def approx_phase_loss(phi: float, eta: float) -> GaussianChannel:
    """Phase rotation preceded by a pure-loss channel."""
    return compose(symplectic_phase(phi), pure_loss(eta))


def approx_mixture(loc: float, scale: float, family: str) -> AngleMixture:
    """Angle-jittered beamsplitter (phi = 0) or phase rotation.

    The angle is drawn from a truncated normal on [0, 2*pi) centered at the
    intended value; the channel is the corresponding average.
    """
    if scale <= 0:
        raise OutOfRange(f"scale must be positive, got {scale}")
    if family == "beamsplitter":
        base = lambda th: symplectic_bs(th, 0.0)
    elif family == "phase":
        base = symplectic_phase
    else:
        raise OutOfRange(f"unknown mixture family {family!r}")
    params = TruncatedNormalParams(loc, scale, 0.0, 2.0 * np.pi)
    return AngleMixture(params, base, family)


def _angle_panels(params: TruncatedNormalParams, order: int = 48):
    """Gauss-Legendre nodes/weights on panels refined around the density peak."""
    edges = np.unique(
        np.clip(
            [params.lo, params.loc - 8 * params.scale, params.loc,
             params.loc + 8 * params.scale, params.hi],
            params.lo,
            params.hi,
        )
    )
    base_x, base_w = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        nodes.append(0.5 * (b - a) * base_x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * base_w)
    return np.concatenate(nodes), np.concatenate(weights)


def mixture_fidelity(mix: AngleMixture, state: GaussianState, ideal_angle: float) -> float:
    """Fidelity between the ideal gate output and the mixture output.

    Valid whenever the ideal output is pure, in which case the fidelity is
    linear in the mixture and reduces to the angle-averaged pure-vs-unitary
    fidelity integrand.
    """
    ideal_out = apply_channel(mix.base(ideal_angle), state)
    if not is_pure(ideal_out):
        raise OutOfRange("mixture fidelity requires a pure ideal output")
    thetas, wts = _angle_panels(mix.density)
    acc = 0.0
    for th, w in zip(thetas, wts):
        acc += w * mix.density.pdf(th) * fidelity_gaussian(
            ideal_out, apply_channel(mix.base(th), state)
        )
    return float(min(max(acc, 0.0), 1.0))


def mixture_char_fn(mix: AngleMixture, state: GaussianState, r) -> complex:
    """Characteristic function of the mixture output at one phase point."""
    thetas, wts = _angle_panels(mix.density)
    acc = 0.0 + 0.0j
    for th, w in zip(thetas, wts):
        acc += w * mix.density.pdf(th) * char_fn(apply_channel(mix.base(th), state), r)
    return complex(acc)


# ---------------------------------------------------------------------------
# Squeezer
# ---------------------------------------------------------------------------

def squeezer_residual(eta: float, r_E: float) -> GaussianChannel:
    """Residual channel left after undoing the ideal squeezer.

    X = I, Y = diag((1-eta) exp(-2 r_E)/eta, 0): ancilla noise enters the
    position quadrature only.
    """
    if not 0.0 < eta < 1.0:
        raise OutOfRange(f"transmissivity must lie in (0, 1), got {eta}")
    if r_E < 0:
        raise OutOfRange(f"offline squeezing must be >= 0, got {r_E}")
    noise = (1.0 - eta) * np.exp(-2.0 * r_E) / eta
    return GaussianChannel(1, 1, np.eye(2), np.diag([noise, 0.0]), np.zeros(2))


def approx_squeezer(r: float, r_E: float) -> GaussianChannel:
    """Measurement-induced squeezer: ideal S(r) composed with the residual.

    The beamsplitter transmissivity is tied to the target squeezing through
    exp(-r) = sqrt(eta).
    """
    eta = np.exp(-2.0 * r)
    if not 0.0 < eta < 1.0:
        raise OutOfRange("approximate squeezer needs r > 0")
    return compose(symplectic_squeeze(r), squeezer_residual(eta, r_E))


def canonical_b1_conjugation(eta: float, r_E: float, V) -> np.ndarray:
    """Conjugate the additive-noise canonical form back to the residual channel.

    Computes sx K^-1 [(K sx V sx K) + diag(0, 1)] K^-1 sx with
    K = diag(s, 1/s), s = sqrt(1-eta) exp(-r_E) / sqrt(eta); the result equals
    V + diag(s^2, 0), i.e. the residual channel's action on the covariance.
    """
    if not 0.0 < eta < 1.0:
        raise OutOfRange(f"transmissivity must lie in (0, 1), got {eta}")
    if r_E < 0:
        raise OutOfRange(f"offline squeezing must be >= 0, got {r_E}")
    V = np.asarray(V, dtype=float)
    if V.shape != (2, 2):
        raise DimensionMismatch(f"expected a one-mode covariance, got shape {V.shape}")
    s = np.sqrt(1.0 - eta) * np.exp(-r_E) / np.sqrt(eta)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    K = np.diag([s, 1.0 / s])
    Kinv = np.diag([1.0 / s, s])
    y_b1 = np.diag([0.0, 1.0])
    inner = K @ sx @ V @ sx @ K + y_b1
    return sx @ Kinv @ inner @ Kinv @ sx


# ---------------------------------------------------------------------------
# SUM gate
# ---------------------------------------------------------------------------

def sum_residual(rA: float, rB: float, R: float) -> GaussianChannel:
    """Residual two-mode noise channel of the measurement-induced SUM gate."""
    if not 0.0 < R <= 1.0:
        raise OutOfRange(f"reflectivity parameter must lie in (0, 1], got {R}")
    if rA < 0 or rB < 0:
        raise OutOfRange("offline squeezing parameters must be >= 0")
    alpha = (1.0 - R) * np.exp(-2.0 * rA) / (1.0 + R)
    beta = (1.0 - R) * np.exp(-2.0 * rB) / (1.0 + R)
    sr = np.sqrt(R)
    Y = np.array(
        [
            [alpha, 0.0, -alpha / sr, 0.0],
            [0.0, beta / R, 0.0, beta / sr],
            [-alpha / sr, 0.0, alpha / R, 0.0],
            [0.0, beta / sr, 0.0, beta],
        ]
    )
    return GaussianChannel(2, 2, np.eye(4), Y, np.zeros(4))


def gain_from_reflectivity(R: float) -> float:
    if not 0.0 < R <= 1.0:
        raise OutOfRange(f"reflectivity parameter must lie in (0, 1], got {R}")
    return 1.0 / np.sqrt(R) - np.sqrt(R)


def reflectivity_from_gain(G: float) -> float:
    if G < 0:
        raise OutOfRange(f"gain must be >= 0, got {G}")
    sr = 0.5 * (np.sqrt(G * G + 4.0) - G)
    return sr * sr


def approx_sum(rA: float, rB: float, R: float) -> GaussianChannel:
    """Measurement-induced SUM gate: ideal gate composed with the residual."""
    return compose(symplectic_sum(gain_from_reflectivity(R)), sum_residual(rA, rB, R))


# ---------------------------------------------------------------------------
# Factory
# ---------------------------------------------------------------------------

def _parse_value(text: str):
    text = text.strip()
    if any(c in text for c in "ij") and not text.startswith("inf"):
        return complex(text.replace("i", "j"))
    return float(text)


def gate_pair(spec: str) -> GatePair:
    """Build a gate pair from a string id like ``"displacement:eta=0.99,alpha=1+0i"``.

    Families and parameters:

    * ``displacement``: eta, alpha
    * ``beamsplitter``: theta (or eta), optional phi; plus eta_loss or sigma
    * ``phase``: phi; plus eta or sigma
    * ``squeezer``: r, r_E
    * ``sum``: rA, rB, and R or G
    """
    if ":" not in spec:
        raise OutOfRange(f"malformed gate id {spec!r}; expected 'family:key=value,...'")
    label, _, tail = spec.partition(":")
    label = label.strip().lower()
    params = {}
    for item in tail.split(","):
        if not item.strip():
            continue
        key, _, val = item.partition("=")
        if not val:
            raise OutOfRange(f"malformed parameter {item!r} in gate id {spec!r}")
        params[key.strip()] = _parse_value(val)

    if label == "displacement":
        alpha = params.get("alpha", 0.0)
        return GatePair(
            label,
            ideal_displacement(alpha),
            approx_displacement(float(params["eta"]), alpha),
        )
    if label == "beamsplitter":
        phi = float(params.get("phi", 0.0))
        if "theta" in params:
            theta = float(params["theta"])
        elif "eta" in params:
            theta = float(np.arccos(np.sqrt(params["eta"])))
        else:
            raise OutOfRange("beamsplitter needs theta or eta")
        ideal = symplectic_bs(theta, phi)
        if "sigma" in params:
            return GatePair(label, ideal, approx_mixture(theta, float(params["sigma"]), label))
        eta = float(np.cos(theta) ** 2)
        return GatePair(label, ideal, approx_bs_loss(eta, phi, float(params["eta_loss"])))
    if label == "phase":
        phi = float(params["phi"])
        ideal = symplectic_phase(phi)
        if "sigma" in params:
            return GatePair(label, ideal, approx_mixture(phi, float(params["sigma"]), label))
        return GatePair(label, ideal, approx_phase_loss(phi, float(params["eta"])))
    if label == "squeezer":
        r = float(params["r"])
        return GatePair(label, symplectic_squeeze(r), approx_squeezer(r, float(params["r_E"])))
    if label == "sum":
        if "R" in params:
            R = float(params["R"])
        elif "G" in params:
            R = reflectivity_from_gain(float(params["G"]))
        else:
            raise OutOfRange("sum gate needs R or G")
        G = gain_from_reflectivity(R)
        return GatePair(
            label,
            symplectic_sum(G),
            approx_sum(float(params["rA"]), float(params["rB"]), R),
        )
    raise OutOfRange(f"unknown gate family {label!r}")


def identity_like(pair: GatePair) -> GaussianChannel:
    """Identity channel on the same number of modes as the pair's ideal gate."""
    return identity_channel(pair.ideal.n_in)
