"""Brute-force ground truth on truncated Fock spaces.

Everything here works with dense complex matrices on ``span{|0>, ..., |M>}``
(per mode) and is deliberately independent of the phase-space layer, so it can
serve as an oracle for the closed-form results implemented elsewhere.

Unitaries generated by non-number-conserving Hamiltonians (displacement,
squeezing) are built by exponentiating the truncated generator in a buffered
dimension ``M + K`` with ``K = 2*ceil(|param|^2) + 10`` and cutting the result
back to ``M + 1``, which keeps edge-of-cutoff artifacts away from the retained
block. Dense storage is intended for total dimensions up to a few thousand.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np
from scipy.linalg import expm

from .errors import (
    DimensionMismatch,
    EigenFailure,
    OutOfRange,
    TruncationTooSmall,
)

HERM_TOL = 1e-10
EIG_TOL = 1e-9
LEAK_TOL = 1e-6


@dataclass(frozen=True)
class FockDensity:
    """Density matrix on a truncated multi-mode Fock space."""

    dims: tuple
    mat: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        mat = np.asarray(self.mat, dtype=complex)
        total = int(np.prod(dims))
        if mat.shape != (total, total):
            raise DimensionMismatch(f"matrix shape {mat.shape} != ({total}, {total})")
        if np.max(np.abs(mat - mat.conj().T)) > HERM_TOL:
            raise DimensionMismatch("density matrix is not Hermitian")
        mat = 0.5 * (mat + mat.conj().T)
        # Cholesky of mat + tol*I certifies all eigenvalues >= -tol cheaply;
        # the eigendecomposition only runs to report an actual violation.
        try:
            np.linalg.cholesky(mat + EIG_TOL * np.eye(total))
        except np.linalg.LinAlgError:
            evals = np.linalg.eigvalsh(mat)
            if evals[0] < -EIG_TOL:
                raise DimensionMismatch(
                    f"density matrix has eigenvalue {evals[0]} < 0"
                ) from None
        if abs(np.trace(mat).real - 1.0) > 1e-10:
            raise DimensionMismatch(f"density matrix trace {np.trace(mat).real} != 1")
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", mat)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))


@dataclass(frozen=True)
class TruncatedChannel:
    """Kraus representation of a channel on truncated Fock spaces.

    All Kraus operators share the shape (out_dim, in_dim). ``completeness_defect``
    reports ``max |sum K^dag K - I|`` so callers can see the truncation leakage.
    """

    kraus: tuple

    def __post_init__(self):
        kraus = tuple(np.asarray(K, dtype=complex) for K in self.kraus)
        if not kraus:
            raise DimensionMismatch("channel needs at least one Kraus operator")
        shape = kraus[0].shape
        if any(K.shape != shape for K in kraus):
            raise DimensionMismatch("all Kraus operators must share one shape")
        object.__setattr__(self, "kraus", kraus)

    @property
    def in_dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus[0].shape[0]

    def completeness_defect(self) -> float:
        acc = sum(K.conj().T @ K for K in self.kraus)
        return float(np.max(np.abs(acc - np.eye(self.in_dim))))


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

def op_number(M: int) -> np.ndarray:
    """Truncated number operator diag(0, 1, ..., M); exact."""
    if M < 1:
        raise OutOfRange("cutoff M must be >= 1")
    return np.diag(np.arange(M + 1, dtype=float)).astype(complex)


def op_annihilation(M: int) -> np.ndarray:
    """<m|a|n> = sqrt(n) delta_{m,n-1} on the truncated space."""
    if M < 1:
        raise OutOfRange("cutoff M must be >= 1")
    return np.diag(np.sqrt(np.arange(1, M + 1, dtype=float)), 1).astype(complex)


def op_creation(M: int) -> np.ndarray:
    return op_annihilation(M).conj().T


def _buffered_cut(generator_builder, M: int, K: int, support=None) -> np.ndarray:
    big = M + K
    U = expm(generator_builder(big))
    cut = U[: M + 1, : M + 1]
    if support is not None:
        if support > M:
            raise DimensionMismatch(f"support {support} exceeds cutoff {M}")
        deficit = 1.0 - np.sum(np.abs(cut[:, : support + 1]) ** 2, axis=0)
        if np.max(deficit) > LEAK_TOL:
            raise TruncationTooSmall(
                f"unitary leaks {np.max(deficit):.3e} probability out of the "
                f"first {M + 1} levels on the requested subspace"
            )
    return cut


def op_displacement(alpha: complex, M: int, support=None) -> np.ndarray:
    """Truncated displacement exp(alpha a^dag - alpha* a).

    ``support`` optionally names the highest input Fock level that must be
    mapped unitarily; leakage beyond 1e-6 on that subspace raises.
    """
    alpha = complex(alpha)
    K = 2 * ceil(abs(alpha) ** 2) + 10

    def gen(dim):
        a = op_annihilation(dim - 1)
        return alpha * a.conj().T - np.conj(alpha) * a

    return _buffered_cut(gen, M, K, support)


def op_squeeze(r: float, M: int, support=None) -> np.ndarray:
    """Truncated squeezer exp[(r/2)(a^2 - a^dag^2)] for real r."""
    K = 2 * ceil(r * r) + 10

    def gen(dim):
        a = op_annihilation(dim - 1)
        return 0.5 * r * (a @ a - a.conj().T @ a.conj().T)

    return _buffered_cut(gen, M, K, support)


def op_bs(theta: float, phi: float, M: int) -> np.ndarray:
    """Two-mode beamsplitter exp[i theta (e^{i phi} a^dag b + h.c.)] on (M+1)^2.

    The generator conserves total photon number, so it splits into tridiagonal
    blocks over total-photon shells; each shell is exponentiated exactly via
    its eigendecomposition. No buffering is needed: the result is exact on
    states with at most M photons in total.
    """
    dim = M + 1
    U = np.zeros((dim * dim, dim * dim), dtype=complex)
    for n in range(2 * M + 1):
        ks = np.arange(max(0, n - M), min(n, M) + 1)
        size = ks.size
        flat = ks * dim + (n - ks)
        if size == 1:
            U[flat[0], flat[0]] = 1.0
            continue
        # <k+1, n-k-1| a^dag b |k, n-k> = sqrt((k+1)(n-k))
        off = np.sqrt((ks[:-1] + 1.0) * (n - ks[:-1]))
        H = np.zeros((size, size), dtype=complex)
        H[np.arange(size - 1) + 1, np.arange(size - 1)] = np.exp(1j * phi) * off
        H[np.arange(size - 1), np.arange(size - 1) + 1] = np.exp(-1j * phi) * off
        evals, vecs = np.linalg.eigh(H)
        block = (vecs * np.exp(1j * theta * evals)) @ vecs.conj().T
        U[np.ix_(flat, flat)] = block
    return U


def op_phase(phi: float, M: int) -> np.ndarray:
    return np.diag(np.exp(1j * phi * np.arange(M + 1)))


# ---------------------------------------------------------------------------
# State vectors and densities
# ---------------------------------------------------------------------------

def vec_fock(n: int, dim: int) -> np.ndarray:
    if n >= dim:
        raise TruncationTooSmall(f"|{n}> does not fit in dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def vec_coherent(alpha: complex, dim: int) -> np.ndarray:
    """Coherent-state amplitudes e^{-|a|^2/2} a^n / sqrt(n!), renormalized."""
    alpha = complex(alpha)
    n = np.arange(dim)
    logfact = np.cumsum(np.concatenate([[0.0], np.log(np.arange(1, dim))]))
    with np.errstate(divide="ignore"):
        logmag = n * np.log(np.abs(alpha)) if alpha != 0 else np.where(n == 0, 0.0, -np.inf)
    amps = np.exp(-0.5 * np.abs(alpha) ** 2 + logmag - 0.5 * logfact) * np.exp(
        1j * np.angle(alpha) * n
    )
    tail = 1.0 - np.sum(np.abs(amps) ** 2)
    if tail > LEAK_TOL:
        raise TruncationTooSmall(
            f"coherent state |{alpha}| loses {tail:.3e} mass at dimension {dim}"
        )
    return amps / np.linalg.norm(amps)


def vec_squeezed_vacuum(z: float, dim: int) -> np.ndarray:
    """Squeezed vacuum with covariance diag(z, 1/z), built from the squeezer."""
    r = -0.5 * np.log(z)
    v = op_squeeze(r, dim - 1) @ vec_fock(0, dim)
    return v / np.linalg.norm(v)


def vec_tms(N: float, dim: int) -> np.ndarray:
    """Two-mode squeezed vacuum sum_n sqrt((N/(N+1))^n / (N+1)) |n>|n>."""
    if N < 0:
        raise OutOfRange("two-mode squeezing parameter must be >= 0")
    n = np.arange(dim)
    amps = np.sqrt((N / (N + 1.0)) ** n / (N + 1.0)) if N > 0 else (n == 0).astype(float)
    v = np.zeros(dim * dim, dtype=complex)
    v[n * dim + n] = amps
    return v / np.linalg.norm(v)


def density_from_vec(vec: np.ndarray, dims) -> FockDensity:
    vec = np.asarray(vec, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    return FockDensity(tuple(dims), np.outer(vec, vec.conj()))


def thermal_density(nbar: float, dim: int) -> FockDensity:
    if nbar < 0:
        raise OutOfRange("thermal mean photon number must be >= 0")
    n = np.arange(dim)
    p = (nbar / (nbar + 1.0)) ** n / (nbar + 1.0) if nbar > 0 else (n == 0).astype(float)
    return FockDensity((dim,), np.diag(p / np.sum(p)).astype(complex))


def expect(op: np.ndarray, rho: FockDensity) -> float:
    return float(np.trace(op @ rho.mat).real)


def mean_total_photons(rho: FockDensity) -> float:
    total = 0.0
    for mode in range(len(rho.dims)):
        nop = _embed_op(op_number(rho.dims[mode] - 1), rho.dims, mode)
        total += float(np.trace(nop @ rho.mat).real)
    return total


def _embed_op(op: np.ndarray, dims, mode: int) -> np.ndarray:
    mats = [np.eye(d, dtype=complex) for d in dims]
    mats[mode] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def moments_from_fock(rho: FockDensity) -> tuple:
    """Mean vector and covariance matrix (vacuum = identity convention)."""
    n_modes = len(rho.dims)
    quads = []
    for mode, d in enumerate(rho.dims):
        a = op_annihilation(d - 1)
        x = (a + a.conj().T) / np.sqrt(2.0)
        p = (a - a.conj().T) / (1j * np.sqrt(2.0))
        quads.append(_embed_op(x, rho.dims, mode))
        quads.append(_embed_op(p, rho.dims, mode))
    mean = np.array([np.trace(q @ rho.mat).real for q in quads])
    cov = np.zeros((2 * n_modes, 2 * n_modes))
    for i in range(2 * n_modes):
        for j in range(i, 2 * n_modes):
            anti = quads[i] @ quads[j] + quads[j] @ quads[i]
            cov[i, j] = cov[j, i] = np.trace(anti @ rho.mat).real - 2 * mean[i] * mean[j]
    return mean, cov


# ---------------------------------------------------------------------------
# Channels
# ---------------------------------------------------------------------------

def kraus_pure_loss(eta: float, M: int) -> TruncatedChannel:
    """Pure-loss Kraus operators <n-k|K_k|n> = sqrt(C(n,k) eta^{n-k} (1-eta)^k).

    Exactly trace preserving on span{|0>, ..., |M>}.
    """
    if not 0.0 < eta <= 1.0:
        raise OutOfRange(f"transmissivity must lie in (0, 1], got {eta}")
    if eta == 1.0:
        return TruncatedChannel((np.eye(M + 1, dtype=complex),))
    dim = M + 1
    logfact = np.cumsum(np.concatenate([[0.0], np.log(np.arange(1, dim))]))
    kraus = []
    for k in range(dim):
        K = np.zeros((dim, dim), dtype=complex)
        for n in range(k, dim):
            logc = logfact[n] - logfact[k] - logfact[n - k]
            K[n - k, n] = np.exp(
                0.5 * (logc + (n - k) * np.log(eta) + k * np.log(1.0 - eta))
            )
        kraus.append(K)
    return TruncatedChannel(tuple(kraus))


def kraus_unitary(U: np.ndarray) -> TruncatedChannel:
    return TruncatedChannel((np.asarray(U, dtype=complex),))


def apply_truncated(
    ch: TruncatedChannel, rho: FockDensity, on_modes=(0,), max_leak: float = 1e-8
) -> FockDensity:
    """Apply sum_k K rho K^dag on the given tensor factors, identity elsewhere.

    Truncated unitaries are not exactly trace preserving; the resulting trace
    deficit is never absorbed silently: it raises TruncationTooSmall beyond
    ``max_leak``, and :func:`apply_truncated_with_deficit` exposes the number.
    """
    out, deficit = apply_truncated_with_deficit(ch, rho, on_modes)
    if deficit > max_leak:
        raise TruncationTooSmall(
            f"channel application leaks {deficit:.3e} trace (> {max_leak:.1e}); "
            "increase the cutoff"
        )
    return out


def apply_truncated_with_deficit(
    ch: TruncatedChannel, rho: FockDensity, on_modes=(0,)
) -> tuple:
    """Same as :func:`apply_truncated`, returning (state, trace deficit)."""
    on_modes = tuple(on_modes)
    dims = list(rho.dims)
    if any(m < 0 or m >= len(dims) for m in on_modes):
        raise DimensionMismatch(f"modes {on_modes} out of range for dims {dims}")
    d_sel = int(np.prod([dims[m] for m in on_modes]))
    if ch.in_dim != d_sel:
        raise DimensionMismatch(
            f"channel input dimension {ch.in_dim} != selected subsystem {d_sel}"
        )
    rest = [m for m in range(len(dims)) if m not in on_modes]
    perm = list(on_modes) + rest
    d_rest = int(np.prod([dims[m] for m in rest])) if rest else 1

    tensor = rho.mat.reshape(dims + dims)
    tensor = np.transpose(tensor, perm + [len(dims) + p for p in perm])
    block = tensor.reshape(d_sel, d_rest, d_sel, d_rest)

    out = np.zeros((ch.out_dim, d_rest, ch.out_dim, d_rest), dtype=complex)
    for K in ch.kraus:
        tmp = (K @ block.reshape(d_sel, -1)).reshape(
            ch.out_dim, d_rest, d_sel, d_rest
        )
        # Contract the bra-side selected leg with K* (BLAS-backed).
        out += np.tensordot(tmp, K.conj(), axes=([2], [1])).transpose(0, 1, 3, 2)

    new_sel_dims = [ch.out_dim] if len(on_modes) == 1 else None
    if new_sel_dims is None:
        # Multi-mode Kraus blocks keep per-mode dimensions only if unchanged.
        if ch.out_dim != d_sel:
            raise DimensionMismatch(
                "multi-mode channels must preserve the selected dimensions"
            )
        new_sel_dims = [dims[m] for m in on_modes]
    out_dims_perm = new_sel_dims + [dims[m] for m in rest]
    full = out.reshape(
        out_dims_perm + out_dims_perm
    )
    inv = np.argsort(perm)
    full = np.transpose(full, list(inv) + [len(dims) + i for i in inv])
    final_dims = [0] * len(dims)
    for pos, m in enumerate(perm):
        final_dims[m] = out_dims_perm[pos]
    total = int(np.prod(final_dims))
    mat = full.reshape(total, total)
    trace = float(np.trace(mat).real)
    deficit = abs(1.0 - trace)
    return FockDensity(tuple(final_dims), mat / trace), deficit


def choi_of(ch: TruncatedChannel, M: int) -> np.ndarray:
    """Choi matrix (I (x) ch)(|Gamma><Gamma|), |Gamma> = sum_{n<=M} |n>|n>."""
    if ch.in_dim != M + 1:
        raise DimensionMismatch(f"channel input dimension {ch.in_dim} != {M + 1}")
    J = np.zeros(((M + 1) * ch.out_dim,) * 2, dtype=complex)
    for K in ch.kraus:
        v = K.T.reshape(-1)  # (I (x) K)|Gamma> laid out as [n_R, j_B]
        J += np.outer(v, v.conj())
    return J


def partial_trace(mat: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace of a square matrix over all factors not in ``keep``."""
    dims = list(dims)
    keep = tuple(keep)
    tensor = mat.reshape(dims + dims)
    out_dims = [dims[k] for k in keep]
    traced = [m for m in range(len(dims)) if m not in keep]
    for m in sorted(traced, reverse=True):
        tensor = np.trace(tensor, axis1=m, axis2=m + len(dims))
        dims.pop(m)
    d = int(np.prod(out_dims))
    return tensor.reshape(d, d)


# ---------------------------------------------------------------------------
# Distances and truncation machinery
# ---------------------------------------------------------------------------

def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    evals, vecs = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    if not np.all(np.isfinite(evals)):
        raise EigenFailure("eigendecomposition returned non-finite values")
    evals = np.clip(evals, 0.0, None)
    return (vecs * np.sqrt(evals)) @ vecs.conj().T


def _pure_vector(rho: FockDensity):
    """State vector if rho is pure to high accuracy, else None.

    Purity is detected from Tr(rho^2) and the candidate vector is verified as
    an eigenvector, so the fast path never silently degrades the oracle.
    """
    purity = float(np.trace(rho.mat @ rho.mat).real)
    if purity < 1.0 - 1e-12:
        return None
    vec = rho.mat @ np.ones(rho.total_dim)
    for _ in range(3):
        norm = np.linalg.norm(vec)
        if norm < 1e-12:
            vec = rho.mat @ np.random.default_rng(0).normal(size=rho.total_dim)
            continue
        vec = rho.mat @ (vec / norm)
    vec = vec / np.linalg.norm(vec)
    if np.linalg.norm(rho.mat @ vec - vec) > 1e-10:
        return None
    return vec


def fidelity_fock(rho: FockDensity, sigma: FockDensity) -> float:
    """||sqrt(rho) sqrt(sigma)||_1^2 via Hermitian eigendecompositions.

    Pure inputs short-circuit to the exact overlap expression <psi|sigma|psi>.
    """
    if rho.dims != sigma.dims:
        raise DimensionMismatch(f"dims {rho.dims} != {sigma.dims}")
    for a, b in ((rho, sigma), (sigma, rho)):
        vec = _pure_vector(a)
        if vec is not None:
            val = float((vec.conj() @ b.mat @ vec).real)
            return min(max(val, 0.0), 1.0)
    s = _psd_sqrt(rho.mat)
    inner = s @ sigma.mat @ s
    evals = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    val = float(np.sum(np.sqrt(np.clip(evals, 0.0, None))) ** 2)
    return min(max(val, 0.0), 1.0) if val < 1.0 + 1e-10 else 1.0


def trace_distance_fock(rho: FockDensity, sigma: FockDensity) -> float:
    """Full trace norm ||rho - sigma||_1 in [0, 2]."""
    if rho.dims != sigma.dims:
        raise DimensionMismatch(f"dims {rho.dims} != {sigma.dims}")
    evals = np.linalg.eigvalsh(rho.mat - sigma.mat)
    val = float(np.sum(np.abs(evals)))
    return min(max(val, 0.0), 2.0) if val < 2.0 + 1e-10 else 2.0


def trace_norm(mat: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix via its eigenvalues."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T)))))


def project_truncate(rho: FockDensity, M: int, mode: int = 0) -> tuple:
    """Project one factor onto span{|0>..|M>}, renormalize, report the pass mass.

    Returns ``(rho_M, p_pass)`` with ``rho_M`` embedded in the original dims.
    """
    if mode < 0 or mode >= len(rho.dims):
        raise DimensionMismatch(f"mode {mode} out of range for dims {rho.dims}")
    if M + 1 >= rho.dims[mode]:
        raise DimensionMismatch(
            f"cutoff M={M} is not below the current dimension {rho.dims[mode]}"
        )
    proj = np.zeros((rho.dims[mode], rho.dims[mode]), dtype=complex)
    proj[: M + 1, : M + 1] = np.eye(M + 1)
    P = _embed_op(proj, rho.dims, mode)
    cut = P @ rho.mat @ P
    p_pass = float(np.trace(cut).real)
    if p_pass <= 0:
        raise TruncationTooSmall("projection removed all probability mass")
    return FockDensity(rho.dims, cut / p_pass), p_pass


# ---------------------------------------------------------------------------
# Choi JSON interchange
# ---------------------------------------------------------------------------

def choi_to_json(J: np.ndarray, dim: int) -> dict:
    """Serialize a Choi matrix on R (x) B with per-factor dimension ``dim``."""
    J = np.asarray(J, dtype=complex)
    if J.shape != (dim * dim, dim * dim):
        raise DimensionMismatch(f"Choi shape {J.shape} != ({dim * dim}, {dim * dim})")
    return {"dim": dim, "re": J.real.tolist(), "im": J.imag.tolist()}


def choi_from_json(obj: dict) -> tuple:
    dim = int(obj["dim"])
    J = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    if J.shape != (dim * dim, dim * dim):
        raise DimensionMismatch("Choi payload does not match its declared dimension")
    return J, dim
