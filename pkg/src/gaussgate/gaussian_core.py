"""Phase-space representation of Gaussian states and channels.

Conventions used throughout the package:

* Quadrature ordering is interleaved, ``r = (x1, p1, ..., xn, pn)``, with
  commutator ``[r, r^T] = i*Omega`` and ``Omega = diag([[0,1],[-1,0]], ...)``.
* The covariance matrix is ``V_ij = <{r_i - mu_i, r_j - mu_j}>`` (anticommutator,
  not halved), so the vacuum covariance is the identity.
* Annihilation operator ``a = (x + i p)/sqrt(2)``; a coherent state ``|alpha>``
  therefore has mean vector ``sqrt(2)*(Re alpha, Im alpha)``.
* A channel ``(X, Y, d)`` acts as ``mu -> X mu + d`` and ``V -> X V X^T + Y``;
  it is physical iff ``Y + i Omega - i X Omega X^T >= 0``.
* Fidelity is the squared convention ``F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1^2``.

All values are immutable after construction and all operations are pure
functions, so everything here is safe to use from multiple threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeParameter,
    NumericalBreakdown,
    OutOfRange,
    UncertaintyViolation,
)

# Tolerances fixed package-wide: symmetric matrices must match their transpose
# to SYM_TOL elementwise; PSD checks allow eigenvalues down to -PSD_TOL.
SYM_TOL = 1e-10
PSD_TOL = 1e-9

# Squeezed-vacuum covariances below this z are rejected as numerically singular.
MIN_SQUEEZE_Z = 1e-12

SIGMA_Z = np.diag([1.0, -1.0])


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form for ``n_modes`` modes in interleaved ordering."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _symmetrize(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.T)


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def min_eig_hermitian(mat: np.ndarray) -> float:
    """Smallest eigenvalue of a (numerically) Hermitian matrix."""
    herm = 0.5 * (mat + mat.conj().T)
    return float(np.linalg.eigvalsh(herm)[0])


@dataclass(frozen=True)
class GaussianState:
    """An n-mode Gaussian state given by its mean vector and covariance matrix."""

    n_modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        if self.n_modes < 1:
            raise DimensionMismatch("n_modes must be a positive integer")
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        dim = 2 * self.n_modes
        if mean.shape != (dim,):
            raise DimensionMismatch(
                f"mean has length {mean.shape[0]}, expected {dim}"
            )
        if cov.shape != (dim, dim):
            raise DimensionMismatch(f"cov has shape {cov.shape}, expected ({dim}, {dim})")
        if np.max(np.abs(cov - cov.T)) > SYM_TOL:
            raise UncertaintyViolation("covariance matrix is not symmetric")
        cov = _symmetrize(cov)
        if min_eig_hermitian(cov + 1j * omega(self.n_modes)) < -PSD_TOL:
            raise UncertaintyViolation(
                "covariance matrix violates the uncertainty relation V + i*Omega >= 0"
            )
        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "cov", _readonly(cov))


@dataclass(frozen=True)
class GaussianChannel:
    """A Gaussian channel ``(X, Y, d)`` from ``n_in`` to ``n_out`` modes."""

    n_in: int
    n_out: int
    X: np.ndarray
    Y: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        if self.n_in < 1 or self.n_out < 1:
            raise DimensionMismatch("mode counts must be positive integers")
        din, dout = 2 * self.n_in, 2 * self.n_out
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        d = np.asarray(self.d, dtype=float).reshape(-1)
        if X.shape != (dout, din):
            raise DimensionMismatch(f"X has shape {X.shape}, expected ({dout}, {din})")
        if Y.shape != (dout, dout):
            raise DimensionMismatch(f"Y has shape {Y.shape}, expected ({dout}, {dout})")
        if d.shape != (dout,):
            raise DimensionMismatch(f"d has length {d.shape[0]}, expected {dout}")
        if np.max(np.abs(Y - Y.T)) > SYM_TOL:
            raise UncertaintyViolation("noise matrix Y is not symmetric")
        Y = _symmetrize(Y)
        cptp = Y + 1j * omega(self.n_out) - 1j * X @ omega(self.n_in) @ X.T
        if min_eig_hermitian(cptp) < -PSD_TOL:
            raise UncertaintyViolation(
                "(X, Y) does not define a physical channel: "
                "Y + i*Omega - i*X Omega X^T has a negative eigenvalue"
            )
        object.__setattr__(self, "X", _readonly(X))
        object.__setattr__(self, "Y", _readonly(Y))
        object.__setattr__(self, "d", _readonly(d))


@dataclass(frozen=True)
class PhasePoint:
    """A phase-space evaluation point for characteristic functions."""

    r: np.ndarray = field()

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float).reshape(-1)
        if r.size == 0 or r.size % 2 != 0:
            raise DimensionMismatch("phase-space points must have even, nonzero length")
        object.__setattr__(self, "r", _readonly(r))


def _as_point(r) -> np.ndarray:
    if isinstance(r, PhasePoint):
        return r.r
    return PhasePoint(np.asarray(r, dtype=float)).r


# ---------------------------------------------------------------------------
# State constructors
# ---------------------------------------------------------------------------

def make_state(n_modes: int, mean, cov) -> GaussianState:
    """Validate and build a Gaussian state from raw mean/covariance data."""
    return GaussianState(n_modes=n_modes, mean=np.asarray(mean), cov=np.asarray(cov))


def state_vacuum(n_modes: int = 1) -> GaussianState:
    return GaussianState(n_modes, np.zeros(2 * n_modes), np.eye(2 * n_modes))


def state_coherent(alpha: complex) -> GaussianState:
    """Coherent state |alpha>: vacuum covariance, displaced mean."""
    alpha = complex(alpha)
    mean = np.sqrt(2.0) * np.array([alpha.real, alpha.imag])
    return GaussianState(1, mean, np.eye(2))


def state_squeezed_vacuum(z: float) -> GaussianState:
    """Squeezed vacuum with covariance diag(z, 1/z); requires z > 0."""
    if z < MIN_SQUEEZE_Z:
        raise NegativeParameter(f"squeezed-vacuum parameter z={z} below {MIN_SQUEEZE_Z}")
    return GaussianState(1, np.zeros(2), np.diag([z, 1.0 / z]))


def state_thermal(nbar: float) -> GaussianState:
    """Thermal state with mean photon number nbar >= 0."""
    if nbar < 0:
        raise NegativeParameter(f"thermal mean photon number must be >= 0, got {nbar}")
    return GaussianState(1, np.zeros(2), (2.0 * nbar + 1.0) * np.eye(2))


def state_tms(N: float) -> GaussianState:
    """Two-mode squeezed vacuum with mean photon number N per arm."""
    if N < 0:
        raise NegativeParameter(f"two-mode squeezing parameter must be >= 0, got {N}")
    a = 2.0 * N + 1.0
    c = 2.0 * np.sqrt(N * (N + 1.0))
    cov = np.block([[a * np.eye(2), c * SIGMA_Z], [c * SIGMA_Z, a * np.eye(2)]])
    return GaussianState(2, np.zeros(4), cov)


def tensor_state(*states: GaussianState) -> GaussianState:
    """Tensor product of Gaussian states (block-diagonal covariance)."""
    n = sum(st.n_modes for st in states)
    mean = np.concatenate([st.mean for st in states])
    cov = np.zeros((2 * n, 2 * n))
    k = 0
    for st in states:
        d = 2 * st.n_modes
        cov[k : k + d, k : k + d] = st.cov
        k += d
    return GaussianState(n, mean, cov)


def reduce_state(st: GaussianState, modes) -> GaussianState:
    """Marginal state on the given modes (partial trace over the rest)."""
    modes = list(modes)
    if any(m < 0 or m >= st.n_modes for m in modes):
        raise DimensionMismatch(f"modes {modes} out of range for {st.n_modes}-mode state")
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes]).astype(int)
    return GaussianState(len(modes), st.mean[idx], st.cov[np.ix_(idx, idx)])


def mean_photons(st: GaussianState) -> np.ndarray:
    """Mean photon number of each mode, including the mean-field contribution."""
    out = np.empty(st.n_modes)
    for m in range(st.n_modes):
        i = 2 * m
        var = st.cov[i, i] + st.cov[i + 1, i + 1]
        out[m] = 0.25 * var + 0.5 * (st.mean[i] ** 2 + st.mean[i + 1] ** 2) - 0.5
    return out


def is_pure(st: GaussianState, tol: float = 1e-8) -> bool:
    """A Gaussian state is pure iff det(V) = 1."""
    return abs(np.linalg.det(st.cov) - 1.0) <= tol


# ---------------------------------------------------------------------------
# Channel constructors and channel algebra
# ---------------------------------------------------------------------------

def identity_channel(n_modes: int = 1) -> GaussianChannel:
    dim = 2 * n_modes
    return GaussianChannel(n_modes, n_modes, np.eye(dim), np.zeros((dim, dim)), np.zeros(dim))


def channel_from_symplectic(X: np.ndarray, d=None) -> GaussianChannel:
    """Unitary Gaussian channel (Y = 0) from a symplectic matrix."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0] // 2
    if d is None:
        d = np.zeros(2 * n)
    return GaussianChannel(n, n, X, np.zeros((2 * n, 2 * n)), d)


def symplectic_phase(phi: float) -> GaussianChannel:
    """Phase rotation exp(i n phi): a -> exp(i phi) a."""
    c, s = np.cos(phi), np.sin(phi)
    return channel_from_symplectic(np.array([[c, -s], [s, c]]))


def symplectic_squeeze(r: float) -> GaussianChannel:
    """Single-mode squeezer: <x> -> exp(-r) <x>, <p> -> exp(r) <p>."""
    return channel_from_symplectic(np.diag([np.exp(-r), np.exp(r)]))


def symplectic_bs(theta: float, phi: float = 0.0) -> GaussianChannel:
    """Two-mode beamsplitter exp[i theta (e^{i phi} a^dag b + e^{-i phi} a b^dag)].

    The Heisenberg action is ``a -> cos(theta) a + i e^{i phi} sin(theta) b``
    and ``b -> cos(theta) b + i e^{-i phi} sin(theta) a``, with transmissivity
    ``cos(theta)^2``; it matches the truncated Fock-space exponential exactly.
    """
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    X = np.array(
        [
            [ct, 0.0, -st * sp, -st * cp],
            [0.0, ct, st * cp, -st * sp],
            [st * sp, -st * cp, ct, 0.0],
            [st * cp, st * sp, 0.0, ct],
        ]
    )
    return channel_from_symplectic(X)


def symplectic_bs_real(theta: float) -> GaussianChannel:
    """Phase-free beamsplitter rotation used in loss dilations.

    Acts as ``x_a -> cos(theta) x_a + sin(theta) x_b`` on both quadratures;
    equal to the general beamsplitter at relative phase -pi/2.
    """
    ct, st = np.cos(theta), np.sin(theta)
    X = np.block([[ct * np.eye(2), st * np.eye(2)], [-st * np.eye(2), ct * np.eye(2)]])
    return channel_from_symplectic(X)


def symplectic_sum(G: float) -> GaussianChannel:
    """Two-mode QND interaction exp(-i G x1 p2): x2 -> x2 + G x1, p1 -> p1 - G p2."""
    X = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, -G],
            [G, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    return channel_from_symplectic(X)


def apply_channel(ch: GaussianChannel, st: GaussianState) -> GaussianState:
    """Push a Gaussian state through a Gaussian channel."""
    if ch.n_in != st.n_modes:
        raise DimensionMismatch(
            f"channel expects {ch.n_in} modes, state has {st.n_modes}"
        )
    mean = ch.X @ st.mean + ch.d
    cov = ch.X @ st.cov @ ch.X.T + ch.Y
    return GaussianState(ch.n_out, mean, cov)


def compose(ch2: GaussianChannel, ch1: GaussianChannel) -> GaussianChannel:
    """Channel composition ch2 after ch1."""
    if ch1.n_out != ch2.n_in:
        raise DimensionMismatch(
            f"cannot compose: first channel outputs {ch1.n_out} modes, "
            f"second expects {ch2.n_in}"
        )
    X = ch2.X @ ch1.X
    Y = ch2.X @ ch1.Y @ ch2.X.T + ch2.Y
    d = ch2.X @ ch1.d + ch2.d
    return GaussianChannel(ch1.n_in, ch2.n_out, X, Y, d)


def extend_channel(ch: GaussianChannel, n_modes: int, modes) -> GaussianChannel:
    """Embed a channel acting on the given modes of an n-mode system.

    Identity on every other mode; requires ch.n_in == ch.n_out.
    """
    modes = list(modes)
    if ch.n_in != ch.n_out:
        raise DimensionMismatch("only square channels can be embedded")
    if len(modes) != ch.n_in or len(set(modes)) != len(modes):
        raise DimensionMismatch(f"need {ch.n_in} distinct target modes, got {modes}")
    if any(m < 0 or m >= n_modes for m in modes):
        raise DimensionMismatch(f"modes {modes} out of range for {n_modes} modes")
    dim = 2 * n_modes
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes]).astype(int)
    X = np.eye(dim)
    Y = np.zeros((dim, dim))
    d = np.zeros(dim)
    X[np.ix_(idx, idx)] = ch.X
    Y[np.ix_(idx, idx)] = ch.Y
    d[idx] = ch.d
    return GaussianChannel(n_modes, n_modes, X, Y, d)


def channel_from_dilation(symp: GaussianChannel, env: GaussianState) -> GaussianChannel:
    """Reduced channel on the leading modes of a symplectic dilation.

    The environment state occupies the trailing modes of ``symp``; the output
    keeps the first ``symp.n_out - env.n_modes`` modes.
    """
    n_sys = symp.n_in - env.n_modes
    if n_sys < 1:
        raise DimensionMismatch("environment has at least as many modes as the dilation")
    ds = 2 * n_sys
    S_aa = symp.X[:ds, :ds]
    S_ab = symp.X[:ds, ds:]
    X = S_aa
    Y = S_ab @ env.cov @ S_ab.T + symp.Y[:ds, :ds]
    d = S_ab @ env.mean + symp.d[:ds]
    return GaussianChannel(n_sys, n_sys, X, Y, d)


# ---------------------------------------------------------------------------
# Characteristic functions
# ---------------------------------------------------------------------------

def char_fn(st: GaussianState, r) -> complex:
    """Wigner characteristic function chi(r) = exp(-r^T O^T V O r / 4 + i r^T O^T mu)."""
    rv = _as_point(r)
    if rv.size != 2 * st.n_modes:
        raise DimensionMismatch(
            f"phase point has length {rv.size}, state needs {2 * st.n_modes}"
        )
    w = omega(st.n_modes) @ rv  # (Omega r); r^T Omega^T V Omega r = w^T V w
    return complex(np.exp(-0.25 * w @ st.cov @ w + 1j * (w @ st.mean)))


def char_fn_batch(st: GaussianState, rs: np.ndarray) -> np.ndarray:
    """Characteristic function at many phase points (rows of ``rs``) at once."""
    rs = np.asarray(rs, dtype=float)
    if rs.ndim != 2 or rs.shape[1] != 2 * st.n_modes:
        raise DimensionMismatch(
            f"expected shape (k, {2 * st.n_modes}), got {rs.shape}"
        )
    w = rs @ omega(st.n_modes).T
    quad = np.einsum("ki,ij,kj->k", w, st.cov, w)
    return np.exp(-0.25 * quad + 1j * (w @ st.mean))


def char_fn_pushforward(ch: GaussianChannel, chi_in, r) -> complex:
    """Characteristic function of a channel output, given that of the input.

    ``chi_in`` is a callable on phase points of the input system; the result is
    ``chi_in(O^T X^T O r) * exp(-r^T O^T Y O r / 4 + i r^T O^T d)`` and agrees
    with ``char_fn(apply_channel(ch, st), r)`` whenever ``chi_in`` came from a
    Gaussian state ``st``.
    """
    rv = _as_point(r)
    if rv.size != 2 * ch.n_out:
        raise DimensionMismatch(
            f"phase point has length {rv.size}, channel outputs {2 * ch.n_out} quadratures"
        )
    Om_out = omega(ch.n_out)
    Om_in = omega(ch.n_in)
    arg = Om_in.T @ ch.X.T @ Om_out @ rv
    w = Om_out @ rv
    return complex(chi_in(arg) * np.exp(-0.25 * w @ ch.Y @ w + 1j * (w @ ch.d)))


# ---------------------------------------------------------------------------
# Fidelity and distances
# ---------------------------------------------------------------------------

def _mean_overlap_factor(st1: GaussianState, st2: GaussianState, vsum: np.ndarray) -> float:
    delta = st1.mean - st2.mean
    if not np.any(delta):
        return 1.0
    sol = np.linalg.solve(vsum, delta)
    return float(np.exp(-delta @ sol))


def _fidelity_one_mode(st1: GaussianState, st2: GaussianState) -> float:
    vsum = st1.cov + st2.cov
    big_delta = np.linalg.det(vsum)
    small_delta = (np.linalg.det(st1.cov) - 1.0) * (np.linalg.det(st2.cov) - 1.0)
    small_delta = max(small_delta, 0.0)
    denom = np.sqrt(big_delta + small_delta) - np.sqrt(small_delta)
    if denom <= 0 or not np.isfinite(denom):
        raise NumericalBreakdown("singular covariance sum in one-mode fidelity")
    return 2.0 / denom * _mean_overlap_factor(st1, st2, vsum)


def _fidelity_two_mode(st1: GaussianState, st2: GaussianState) -> float:
    V1, V2 = st1.cov, st2.cov
    Om = omega(2)
    vsum = V1 + V2
    big_delta = np.linalg.det(vsum) / 16.0
    gamma = np.linalg.det(Om @ V1 @ Om @ V2 - np.eye(4)) / 16.0
    lam = (np.linalg.det(V1 + 1j * Om) * np.linalg.det(V2 + 1j * Om)).real / 16.0
    gamma = max(gamma, 0.0)
    lam = max(lam, 0.0)
    root = np.sqrt(gamma) + np.sqrt(lam)
    inner = root * root - big_delta
    denom = root - np.sqrt(max(inner, 0.0))
    if denom <= 0 or not np.isfinite(denom):
        raise NumericalBreakdown("singular denominator in two-mode fidelity")
    return _mean_overlap_factor(st1, st2, vsum) / denom


def fidelity_gaussian(st1: GaussianState, st2: GaussianState) -> float:
    """Uhlmann fidelity ||sqrt(rho) sqrt(sigma)||_1^2 between Gaussian states.

    Closed forms are implemented for one and two modes; larger systems are
    handled by the Fock-space oracle instead.
    """
    if st1.n_modes != st2.n_modes:
        raise DimensionMismatch("fidelity needs states with equal mode counts")
    if st1.n_modes == 1:
        fid = _fidelity_one_mode(st1, st2)
    elif st1.n_modes == 2:
        fid = _fidelity_two_mode(st1, st2)
    else:
        raise DimensionMismatch(
            "closed-form Gaussian fidelity covers 1 and 2 modes only; "
            "use the Fock oracle for larger systems"
        )
    if fid > 1.0 + 1e-6:
        raise NumericalBreakdown(f"fidelity {fid} exceeds 1 beyond tolerance")
    return float(min(max(fid, 0.0), 1.0))


def sine_distance(F: float) -> float:
    """Sine distance sqrt(1 - F) for a fidelity value F in [0, 1]."""
    if not (-1e-12 <= F <= 1.0 + 1e-12):
        raise OutOfRange(f"fidelity must lie in [0, 1], got {F}")
    return float(np.sqrt(max(1.0 - min(F, 1.0), 0.0)))


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def state_to_json(st: GaussianState) -> dict:
    return {"n_modes": st.n_modes, "mean": st.mean.tolist(), "cov": st.cov.tolist()}


def state_from_json(obj: dict) -> GaussianState:
    return make_state(int(obj["n_modes"]), obj["mean"], obj["cov"])


def channel_to_json(ch: GaussianChannel) -> dict:
    return {
        "n_in": ch.n_in,
        "n_out": ch.n_out,
        "X": ch.X.tolist(),
        "Y": ch.Y.tolist(),
        "d": ch.d.tolist(),
    }


def channel_from_json(obj: dict) -> GaussianChannel:
    return GaussianChannel(
        int(obj["n_in"]), int(obj["n_out"]), np.asarray(obj["X"]),
        np.asarray(obj["Y"]), np.asarray(obj["d"]),
    )
