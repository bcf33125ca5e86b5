"""Self-check suite behind `gaussgate check`.

Each check exercises one library invariant end to end and reports a pass/fail
with a numeric detail. The `fast` level finishes in seconds; `full` adds the
SDP sweeps and the large-cutoff oracle comparisons. All library calls go
through module attributes so a corrupted function is actually caught.
"""

from __future__ import annotations

import numpy as np

from . import ecd_sdp as es
from . import fock_oracle as fo
from . import gate_zoo as gz
from . import gaussian_core as gc
from . import metrics_bounds as mb

CHAR_GRID = np.linspace(-3.0, 3.0, 17)


def _grid_points(n_modes):
    pts = []
    for u in CHAR_GRID:
        for v in CHAR_GRID:
            pts.append([u, v] * n_modes)
    return np.array(pts)


def char_gap(ideal, approx, state) -> float:
    """Sup over the fixed phase-space grid of |chi_approx - chi_ideal|."""
    pts = _grid_points(ideal.n_out)
    chi_ideal = gc.char_fn_batch(gc.apply_channel(ideal, state), pts)
    if isinstance(approx, gz.AngleMixture):
        thetas, wts = gz._angle_panels(approx.density)
        chi_mix = np.zeros(len(pts), dtype=complex)
        for th, w in zip(thetas, wts):
            out = gc.apply_channel(approx.base(th), state)
            chi_mix += w * approx.density.pdf(th) * gc.char_fn_batch(out, pts)
        return float(np.max(np.abs(chi_mix - chi_ideal)))
    chi_approx = gc.char_fn_batch(gc.apply_channel(approx, state), pts)
    return float(np.max(np.abs(chi_approx - chi_ideal)))


def ladder_pairs():
    """(family, input state, [(ideal, approx), ...]) along each noise ladder."""
    coh = gc.state_coherent(0.5)
    coh_vac = gc.tensor_state(coh, gc.state_vacuum())
    sv_pair = gc.tensor_state(gc.state_squeezed_vacuum(0.5), gc.state_squeezed_vacuum(0.5))
    out = []
    out.append((
        "displacement", coh,
        [(gz.ideal_displacement(0.7 + 0.2j), gz.approx_displacement(eta, 0.7 + 0.2j))
         for eta in gz.LADDER_ETA],
    ))
    theta = np.arccos(np.sqrt(0.7))
    out.append((
        "beamsplitter", coh_vac,
        [(gc.symplectic_bs(theta, 0.0), gz.approx_bs_loss(0.7, 0.0, eta))
         for eta in gz.LADDER_ETA],
    ))
    out.append((
        "beamsplitter-jitter", coh_vac,
        [(gc.symplectic_bs(np.pi / 4, 0.0), gz.approx_mixture(np.pi / 4, s, "beamsplitter"))
         for s in gz.LADDER_SIGMA],
    ))
    out.append((
        "phase", coh,
        [(gc.symplectic_phase(0.9), gz.approx_phase_loss(0.9, eta)) for eta in gz.LADDER_ETA],
    ))
    out.append((
        "phase-jitter", coh,
        [(gc.symplectic_phase(0.9), gz.approx_mixture(0.9, s, "phase"))
         for s in gz.LADDER_SIGMA],
    ))
    out.append((
        "squeezer", gc.state_squeezed_vacuum(0.8),
        [(gc.symplectic_squeeze(0.46), gz.approx_squeezer(0.46, rE)) for rE in gz.LADDER_RE],
    ))
    G = gz.gain_from_reflectivity(mb.R_UNIT_GAIN)
    out.append((
        "sum", sv_pair,
        [(gc.symplectic_sum(G), gz.approx_sum(r, r, mb.R_UNIT_GAIN)) for r in gz.LADDER_RE],
    ))
    return out


# ---------------------------------------------------------------------------
# Individual checks: return (ok, detail)
# ---------------------------------------------------------------------------

def check_symplectic():
    worst = 0.0
    cases = [
        gc.symplectic_phase(0.7), gc.symplectic_squeeze(0.46),
        gc.symplectic_bs(0.6, 1.1), gc.symplectic_bs_real(0.3), gc.symplectic_sum(1.0),
    ]
    for ch in cases:
        om = gc.omega(ch.n_in)
        worst = max(worst, float(np.max(np.abs(ch.X @ om @ ch.X.T - om))))
    return worst <= 1e-10, f"max |X Omega X^T - Omega| = {worst:.3e}"


def check_cptp():
    worst = 0.0
    cases = [
        gz.pure_loss(0.01), gz.pure_loss(0.99), gz.approx_displacement(0.7, 1 + 0.5j),
        gz.approx_bs_loss(0.7, 0.0, 0.9), gz.squeezer_residual(0.5, 1.0),
        gz.sum_residual(0.0, 0.0, mb.R_UNIT_GAIN), gz.approx_sum(1.0, 1.0, mb.R_UNIT_GAIN),
    ]
    for ch in cases:
        om = gc.omega(ch.n_out)
        cond = ch.Y + 1j * om - 1j * ch.X @ gc.omega(ch.n_in) @ ch.X.T
        worst = min(worst, gc.min_eig_hermitian(cond))
    return worst >= -1e-9, f"min eig of CPTP condition = {worst:.3e}"


def check_pushforward():
    rng = np.random.default_rng(11)
    worst = 0.0
    pairs = [
        (gz.pure_loss(0.6), gc.state_coherent(0.4 + 0.3j)),
        (gz.approx_squeezer(0.46, 1.0), gc.state_thermal(0.5)),
        (gz.approx_sum(1.0, 0.5, mb.R_UNIT_GAIN), gc.state_tms(0.3)),
    ]
    for ch, st in pairs:
        chi_in = lambda r, s=st: gc.char_fn(s, r)
        out = gc.apply_channel(ch, st)
        for _ in range(100):
            r = rng.uniform(-3, 3, size=2 * ch.n_out)
            worst = max(worst, abs(
                gc.char_fn_pushforward(ch, chi_in, r) - gc.char_fn(out, r)
            ))
    return worst <= 1e-10, f"max pushforward mismatch = {worst:.3e}"


def _random_state_with_fock(rng, two_mode, M, max_leak=2e-5):
    """Random Gaussian state tracked in both representations.

    Parameter ranges keep per-mode energies below ~1 so the truncated
    unitaries leak far less than the comparison tolerances.
    """
    if two_mode:
        N = rng.uniform(0.0, 0.35)
        st = gc.state_tms(N)
        rho = fo.density_from_vec(fo.vec_tms(N, M + 1), (M + 1, M + 1))
        theta, phi = rng.uniform(0, np.pi / 2), rng.uniform(0, 2 * np.pi)
        ch = gc.symplectic_bs(theta, phi)
        st = gc.apply_channel(ch, st)
        rho = fo.apply_truncated(
            fo.kraus_unitary(fo.op_bs(theta, phi, M)), rho, (0, 1), max_leak=max_leak
        )
        alpha = (rng.normal() + 1j * rng.normal()) * 0.25
        st = gc.apply_channel(gc.extend_channel(gz.ideal_displacement(alpha), 2, [1]), st)
        rho = fo.apply_truncated(
            fo.kraus_unitary(fo.op_displacement(alpha, M)), rho, (1,), max_leak=max_leak
        )
        return st, rho
    nbar = rng.uniform(0.0, 0.35)
    st = gc.state_thermal(nbar)
    rho = fo.thermal_density(nbar, M + 1)
    r = rng.uniform(-0.4, 0.4)
    st = gc.apply_channel(gc.symplectic_squeeze(r), st)
    rho = fo.apply_truncated(
        fo.kraus_unitary(fo.op_squeeze(r, M)), rho, (0,), max_leak=max_leak
    )
    alpha = (rng.normal() + 1j * rng.normal()) * 0.3
    st = gc.apply_channel(gz.ideal_displacement(alpha), st)
    rho = fo.apply_truncated(
        fo.kraus_unitary(fo.op_displacement(alpha, M)), rho, (0,), max_leak=max_leak
    )
    return st, rho


def fidelity_engine_vs_oracle(n_cases, M, seed=5):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(n_cases):
        st1, rho1 = _random_state_with_fock(rng, k % 2 == 1, M)
        st2, rho2 = _random_state_with_fock(rng, k % 2 == 1, M)
        worst = max(worst, abs(
            gc.fidelity_gaussian(st1, st2) - fo.fidelity_fock(rho1, rho2)
        ))
    return worst


def check_fidelity_oracle():
    worst = fidelity_engine_vs_oracle(8, 20)
    return worst <= 1e-4, f"max |engine - oracle| = {worst:.3e} (8 cases, M=20)"


def check_bound_ordering():
    worst = -np.inf
    for eta in np.linspace(0.02, 0.98, 25):
        for E in (0.06, 0.3, 0.7, 0.95):
            worst = max(worst, mb.d1(eta, E) - mb.f_sine(eta, E))
    return worst <= 1e-12, f"max (d1 - f) = {worst:.3e}"


def check_f_monotone():
    etas = np.linspace(0.0, 1.0, 100)
    ok = True
    for E in (0.06, 0.5, 1.0, 2.0, 5.0):
        vals = [mb.f_sine(e, E) for e in etas]
        ok = ok and all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    for eta in (0.1, 0.5, 0.9):
        vals = [mb.f_sine(eta, E) for E in (0.06, 0.5, 1.0, 2.0, 5.0)]
        ok = ok and all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))
    return ok, "f nonincreasing in eta, nondecreasing in E"


def check_g_monotone():
    scales = (0.05, 0.1, 0.2, 0.35, 0.5)
    ok = True
    for E in (0.06, 0.2):
        vals = [mb.g_angle_bound(np.pi / 4, s, E) for s in scales]
        ok = ok and all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))
    for s in scales:
        ok = ok and mb.g_angle_bound(np.pi / 4, s, 0.06) <= mb.g_angle_bound(
            np.pi / 4, s, 0.2
        ) + 1e-12
    small = mb.g_angle_bound(np.pi / 4, 1e-4, 0.06)
    ok = ok and small < mb.g_angle_bound(np.pi / 4, 0.004, 0.06)
    return ok, f"g monotone in scale and E; g(1e-4) = {small:.3e}"


def check_ladders():
    ok = True
    details = []
    for family, state, rungs in ladder_pairs():
        gaps = [char_gap(ideal, approx, state) for ideal, approx in rungs]
        mono = all(a >= b - 1e-12 for a, b in zip(gaps, gaps[1:]))
        ok = ok and mono and gaps[-1] < 1e-3
        details.append(f"{family}: {gaps[0]:.2e} -> {gaps[-1]:.2e}")
    return ok, "; ".join(details)


def check_uniform_witnesses():
    f_big = np.exp(-420.0 * (1.0 - np.sqrt(0.8)) ** 2)
    sum_small = mb.sum_sv_fidelity(1e-4, mb.R_UNIT_GAIN, 1.0, 1.0)
    sq_small = mb.squeezer_sv_fidelity(0.46, 1.0, 1e-6)
    ok = f_big < 0.01 and sum_small < 0.05 and sq_small < 0.05
    return ok, (
        f"displacement high-energy F = {f_big:.3e}; "
        f"sum z->0 F = {sum_small:.3e}; squeezer z->0 F = {sq_small:.3e}"
    )


def check_kraus_complete():
    worst = 0.0
    for eta in (0.1, 0.5, 0.9):
        for M in (6, 12, 24):
            worst = max(worst, fo.kraus_pure_loss(eta, M).completeness_defect())
    return worst <= 1e-10, f"max |sum K^dag K - I| = {worst:.3e}"


def check_truncation_bounds(m_full=30, n_states=10, cutoffs=(5, 10)):
    rng = np.random.default_rng(23)
    ok = True
    worst = 0.0
    for _ in range(n_states):
        rho = _random_low_energy_density(rng, m_full, 2.0)
        energy = fo.expect(fo.op_number(m_full), rho)
        for M in cutoffs:
            cut, p_pass = fo.project_truncate(rho, M)
            ok = ok and p_pass >= 1.0 - energy / (M + 1.0) - 1e-12
            dist = 0.5 * fo.trace_distance_fock(rho, cut)
            bound = np.sqrt(energy / (M + 1.0))
            ok = ok and dist <= bound + 1e-12
            worst = max(worst, dist - bound)
    return ok, f"max (distance - bound) = {worst:.3e}"


def _random_low_energy_density(rng, m_full, energy_cap):
    dim = m_full + 1
    vecs = []
    weights = rng.dirichlet(np.ones(3))
    for _ in range(3):
        alpha = (rng.normal() + 1j * rng.normal()) * 0.6
        base = fo.vec_coherent(alpha, dim)
        k = rng.integers(0, 3)
        vec = np.roll(base, k)
        vec[:k] = 0.0
        vecs.append(vec / np.linalg.norm(vec))
    mat = sum(w * np.outer(v, v.conj()) for w, v in zip(weights, vecs))
    rho = fo.FockDensity((dim,), mat / np.trace(mat).real)
    energy = fo.expect(fo.op_number(m_full), rho)
    if energy > energy_cap:
        # Blend toward vacuum to respect the energy budget.
        w = energy_cap / (energy * 1.1)
        vac = np.zeros((dim, dim), dtype=complex)
        vac[0, 0] = 1.0
        rho = fo.FockDensity((dim,), w * rho.mat + (1 - w) * vac)
    return rho


def check_sdp_overlap():
    ok = True
    worst_gap = 0.0
    for eta in np.arange(0.1, 0.95, 0.1):
        e = round(float(eta), 2)
        sol = es.solve_ecd(es.displacement_problem(e, 0.06, 6))
        d2 = 0.5 * sol.primal
        ok = ok and mb.d1(e, 0.06) <= d2 + 1e-6 and d2 <= mb.f_sine(e, 0.06) + 1e-6
        ok = ok and sol.dual_gap <= 1e-6
        if e <= 0.2:
            ok = ok and d2 - mb.d1(e, 0.06) <= 0.02
        worst_gap = max(worst_gap, sol.dual_gap)
    return ok, f"d1 <= d2 <= f on the eta grid; worst certified gap = {worst_gap:.2e}"


def check_sdp_sandwich():
    d4 = es.d2_displacement(0.5, 0.06, 4)
    d8 = es.d2_displacement(0.5, 0.06, 8)
    ok = d4 <= d8 + 1e-6 and d8 - d4 <= 2.0 * np.sqrt(0.06 / 5.0)
    return ok, f"d2(M=4) = {d4:.8f}, d2(M=8) = {d8:.8f}"


def check_oracle_large():
    worst = fidelity_engine_vs_oracle(6, 40, seed=7)
    ok1 = worst <= 1e-4
    ok2, detail2 = check_truncation_bounds(m_full=60, n_states=10, cutoffs=(5, 10, 20))
    return ok1 and ok2, f"M=40 engine-oracle gap = {worst:.3e}; {detail2}"


CHECKS = [
    ("core.symplectic-form", "symplectic constructors satisfy X Omega X^T = Omega",
     "fast", check_symplectic),
    ("core.cptp-condition", "constructed channels satisfy the physicality condition",
     "fast", check_cptp),
    ("core.charfn-pushforward", "characteristic-function transport matches state transport",
     "fast", check_pushforward),
    ("core.fidelity-engine", "closed-form Gaussian fidelity matches the Fock oracle",
     "fast", check_fidelity_oracle),
    ("metrics.bound-ordering", "trace-distance lower bound never exceeds the sine upper bound",
     "fast", check_bound_ordering),
    ("metrics.f-monotonicity", "sine bound decreases with transmissivity, grows with energy",
     "fast", check_f_monotone),
    ("metrics.g-monotonicity", "angle-jitter bound grows with scale and energy",
     "fast", check_g_monotone),
    ("gates.strong-convergence", "characteristic-function gaps shrink along noise ladders",
     "fast", check_ladders),
    ("gates.uniform-failure", "worst-case witnesses show the approximations are input-dependent",
     "fast", check_uniform_witnesses),
    ("oracle.kraus-completeness", "pure-loss Kraus operators resolve the identity",
     "fast", check_kraus_complete),
    ("oracle.truncation-bounds", "projection mass and gentle-measurement bounds hold",
     "fast", check_truncation_bounds),
    ("sdp.bound-overlap", "SDP distance sits between the closed-form bounds",
     "full", check_sdp_overlap),
    ("sdp.truncation-sandwich", "SDP value is monotone and sandwiched across cutoffs",
     "full", check_sdp_sandwich),
    ("oracle.large-cutoff", "high-cutoff oracle comparisons and truncation bounds",
     "full", check_oracle_large),
]


def run_checks(level: str = "fast"):
    """Run the invariant suite; returns (all_ok, report rows)."""
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    report = []
    all_ok = True
    for check_id, description, tier, func in CHECKS:
        if tier == "full" and level != "full":
            continue
        try:
            ok, detail = func()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok = all_ok and ok
        report.append({
            "id": check_id,
            "property": description,
            "status": "pass" if ok else "fail",
            "detail": detail,
        })
    return all_ok, report
