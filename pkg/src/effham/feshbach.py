"""Projection-operator effective Hamiltonians and resonance extraction.

Partition a finite Hermitian H over index sets P and Q.  Eliminating the
Q-space amplitudes from the eigenproblem exactly gives the energy-dependent
P-space operator

    H_eff(E) = PHP + PHQ (E - QHQ)^{-1} QHP,

whose self-consistent eigenvalues lambda(E) = E coincide with the true
eigenvalues of H wherever the resolvent is regular.  Evaluated just above
the real axis inside a (discretized) continuum, E -> E + i*eta, the second
term acquires a negative-definite imaginary part and an embedded discrete
state shows up as a complex energy E_r - i*Gamma/2: a resonance with a
shift and a width.

The module builds two model families on this skeleton:

* two-channel: one or more discrete levels coupled to a uniformly
  discretized energy band (state-space partition),
* grid-1d: a radial well-plus-barrier potential on a uniform grid with a
  three-point Laplacian, P = inner region including the barrier
  (configuration-space partition).

Width extraction is certified against a time-domain oracle: propagate the
full discretized H, fit the log of the survival probability, and compare
the fitted rate with Gamma.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import (
    DimensionError,
    NoContinuumError,
    NonFiniteError,
    SingularMatrixError,
    SingularResolventError,
)
from .numkit import solve_linear, solve_tridiagonal

__all__ = [
    "PartitionedHamiltonian",
    "FeshbachModel",
    "ResonanceResult",
    "SurvivalFit",
    "effective_hamiltonian",
    "q_component",
    "assemble_state",
    "bound_state_search",
    "resonance_scan",
    "resonance_search",
    "decay_oracle",
    "two_channel_model",
    "grid_1d_model",
    "preset_model",
    "available_presets",
]


class PartitionedHamiltonian:
    """Hermitian matrix with a fixed P/Q index split.

    p_indices and q_indices must be disjoint, sorted, and together cover
    every index exactly once.  The four blocks PHP, PHQ, QHP, QHQ are
    extracted once at construction; a tridiagonal (or diagonal) Q-block is
    detected and later resolvent solves take the banded fast path.
    """

    def __init__(self, h, p_indices, q_indices=None):
        h = np.asarray(h, dtype=np.complex128)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DimensionError(f"H must be square, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise NonFiniteError("H contains non-finite entries")
        n = h.shape[0]
        scale = max(1.0, float(np.abs(h).max()))
        if np.abs(h - h.conj().T).max() > 1e-12 * scale:
            raise ValueError("H is not Hermitian to working precision")
        p = np.asarray(sorted(int(i) for i in p_indices), dtype=int)
        if q_indices is None:
            q = np.setdiff1d(np.arange(n), p)
        else:
            q = np.asarray(sorted(int(i) for i in q_indices), dtype=int)
        if p.size == 0 or q.size == 0:
            raise ValueError("both P and Q must be non-empty")
        merged = np.concatenate([p, q])
        if np.unique(merged).size != n or merged.size != n or merged.min() < 0 or merged.max() >= n:
            raise ValueError("p_indices and q_indices must partition the index set")
        self.h = h
        self.p_indices = p
        self.q_indices = q
        self.php = h[np.ix_(p, p)]
        self.phq = h[np.ix_(p, q)]
        self.qhp = h[np.ix_(q, p)]
        self.qhq = h[np.ix_(q, q)]
        self._qhq_banded = _is_tridiagonal(self.qhq)

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @property
    def n_p(self) -> int:
        return self.p_indices.size

    @property
    def n_q(self) -> int:
        return self.q_indices.size

    def q_eigenvalues(self) -> np.ndarray:
        """Spectrum of the Q-block (the resolvent's poles), ascending."""
        if self._qhq_banded and self.n_q > 2:
            ab = np.zeros((2, self.n_q), dtype=self.qhq.dtype)
            ab[0, :] = self.qhq.diagonal()
            ab[1, :-1] = self.qhq.diagonal(-1)
            return scipy.linalg.eigvals_banded(ab, lower=True)
        return np.linalg.eigvalsh(self.qhq)


def _is_tridiagonal(a: np.ndarray) -> bool:
    n = a.shape[0]
    if n <= 2:
        return True
    mask = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :]) > 1
    return not np.any(a[mask])


def _resolvent_apply(ph: PartitionedHamiltonian, e: complex, rhs: np.ndarray) -> np.ndarray:
    """Compute (E - QHQ)^{-1} rhs, banded when the Q-block allows it."""
    nq = ph.n_q
    if ph._qhq_banded:
        diag = e - ph.qhq.diagonal()
        lower = -ph.qhq.diagonal(-1) if nq > 1 else np.zeros(0)
        upper = -ph.qhq.diagonal(1) if nq > 1 else np.zeros(0)
        try:
            with warnings.catch_warnings():
                # a pole of the resolvent divides by zero inside the banded
                # solver; the finiteness check below is the real error path
                warnings.simplefilter("ignore", RuntimeWarning)
                x = solve_tridiagonal(diag, lower, upper, rhs)
        except SingularMatrixError as exc:
            raise SingularResolventError(e, exc.pivot) from exc
        if not np.all(np.isfinite(x)):
            raise SingularResolventError(e, 0.0)
        return x
    a = e * np.eye(nq) - ph.qhq
    try:
        return solve_linear(a, rhs)
    except SingularMatrixError as exc:
        raise SingularResolventError(e, exc.pivot) from exc


def effective_hamiltonian(ph: PartitionedHamiltonian, e: complex) -> np.ndarray:
    """P-space effective Hamiltonian PHP + PHQ (E - QHQ)^{-1} QHP.

    Exact for any finite partition: its self-consistent eigenvalues
    reproduce the full spectrum.  Hermitian for real E away from the
    Q-block spectrum; for Im E > 0 the second term's anti-Hermitian part
    is negative semidefinite (decay, never gain).
    """
    x = _resolvent_apply(ph, e, ph.qhp)
    out = ph.php + ph.phq @ x
    if out.shape != (ph.n_p, ph.n_p):
        raise DimensionError("effective Hamiltonian block has wrong shape")
    return out


def q_component(ph: PartitionedHamiltonian, e: complex, p_psi) -> np.ndarray:
    """Q-space amplitudes (E - QHQ)^{-1} QHP p_psi.

    When (E, p_psi) solves the self-consistent P-space eigenproblem, the
    reassembled vector from assemble_state is an eigenvector of the full H.
    """
    p_psi = np.asarray(p_psi, dtype=np.complex128)
    if p_psi.shape != (ph.n_p,):
        raise DimensionError(f"p_psi must have shape ({ph.n_p},), got {p_psi.shape}")
    return _resolvent_apply(ph, e, ph.qhp @ p_psi)


def assemble_state(ph: PartitionedHamiltonian, p_psi, q_psi) -> np.ndarray:
    """Scatter P- and Q-space amplitudes back into a full-dimension vector."""
    psi = np.zeros(ph.dim, dtype=np.complex128)
    psi[ph.p_indices] = np.asarray(p_psi, dtype=np.complex128)
    psi[ph.q_indices] = np.asarray(q_psi, dtype=np.complex128)
    return psi


# ---------------------------------------------------------------------------
# self-consistent root search on the real axis


def bound_state_search(
    ph: PartitionedHamiltonian,
    window: tuple[float, float],
    refine_tol: float = 1e-12,
    pole_gap: float = 1e-9,
) -> list[float]:
    """Real energies in the window where an eigenvalue of H_eff(E) equals E.

    d(H_eff)/dE = -PHQ (E - QHQ)^{-2} QHP is negative semidefinite, so
    every ordered eigenvalue branch lambda_k(E) is non-increasing between
    consecutive poles of the resolvent and lambda_k(E) - E crosses zero at
    most once per pole-free interval.  The search therefore subdivides the
    window at Q-block eigenvalues and bisects each branch with a sign
    change; no branch-order bookkeeping is needed because sorted order is
    preserved on each interval.

    Roots within pole_gap of a pole are not searched for (the resolvent is
    singular there); an empty list means no sign change, not an error.
    """
    lo, hi = float(window[0]), float(window[1])
    if not (hi > lo):
        raise ValueError("window must have positive length")
    poles = ph.q_eigenvalues()
    scale = max(1.0, float(np.abs(ph.h).max()))
    gap = pole_gap * scale
    inner = [float(p) for p in poles if lo < p < hi]
    cuts = [lo] + inner + [hi]
    roots: list[float] = []

    def branch_values(e: float) -> np.ndarray:
        return np.linalg.eigvalsh(effective_hamiltonian(ph, e)) - e

    for j, (a, b) in enumerate(zip(cuts[:-1], cuts[1:])):
        # step off the interior pole boundaries; endpoints sitting within
        # gap of a pole get the same nudge
        aa = a + gap if (j > 0 or np.any(np.abs(poles - a) <= gap)) else a
        bb = b - gap if (j < len(cuts) - 2 or np.any(np.abs(poles - b) <= gap)) else b
        if bb <= aa:
            continue
        fa, fb = branch_values(aa), branch_values(bb)
        for k in range(ph.n_p):
            if fa[k] > 0.0 > fb[k]:
                x0, x1, f0 = aa, bb, fa[k]
                while x1 - x0 > refine_tol * max(1.0, abs(x0)):
                    xm = 0.5 * (x0 + x1)
                    fm = branch_values(xm)[k]
                    if fm > 0.0:
                        x0, f0 = xm, fm
                    else:
                        x1 = xm
                roots.append(0.5 * (x0 + x1))
            elif fa[k] == 0.0:
                roots.append(aa)
    roots.sort()
    deduped: list[float] = []
    for r in roots:
        if not deduped or abs(r - deduped[-1]) > 10 * refine_tol * max(1.0, abs(r)):
            deduped.append(r)
    return deduped


# ---------------------------------------------------------------------------
# models


@dataclass
class FeshbachModel:
    """A partitioned Hamiltonian with the metadata the scans need.

    continuum_energies are the Q-block eigenvalues (ascending); delta_e_at
    gives the local level spacing, which sets the resolvent smoothing eta
    and the recurrence time 2*pi/delta_e of the discretized continuum.
    h0 + v reproduce the full H (diagonal part vs. coupling for the
    two-channel family, kinetic vs. potential for grid-1d).
    """

    kind: str
    ph: PartitionedHamiltonian
    h0: np.ndarray
    v: np.ndarray
    continuum_energies: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def band(self) -> tuple[float, float]:
        ce = self.continuum_energies
        return float(ce[0]), float(ce[-1])

    def delta_e_at(self, e: float) -> float:
        ce = self.continuum_energies
        if ce.size < 2:
            raise NoContinuumError("model has fewer than two continuum levels")
        k = int(np.clip(np.searchsorted(ce, e), 1, ce.size - 1))
        lo = max(0, k - 3)
        hi = min(ce.size, k + 3)
        return float(np.median(np.diff(ce[lo:hi])))

    def recurrence_time(self, e: float) -> float:
        return 2.0 * math.pi / self.delta_e_at(e)


def two_channel_model(
    e_bound,
    band: tuple[float, float],
    n_continuum: int,
    coupling,
) -> FeshbachModel:
    """Discrete levels coupled to a uniformly discretized energy band.

    coupling is either a constant or a callable v(E) giving the discrete
    matrix element between each bound level and the continuum state at
    energy E.  With uniform spacing delta_e the density of states is
    rho = 1/delta_e and the golden-rule width of a level at E_r inside the
    band is 2*pi*v(E_r)^2*rho.
    """
    e_bound = np.atleast_1d(np.asarray(e_bound, dtype=float))
    nb = e_bound.size
    if n_continuum < 2:
        raise ValueError("n_continuum must be at least 2")
    emin, emax = float(band[0]), float(band[1])
    if not (emax > emin):
        raise ValueError("band must have positive width")
    e_k = np.linspace(emin, emax, n_continuum)
    if callable(coupling):
        v_k = np.asarray([coupling(e) for e in e_k], dtype=float)
    else:
        v_k = np.full(n_continuum, float(coupling))
    if not np.all(np.isfinite(v_k)):
        raise NonFiniteError("coupling evaluates to non-finite values")
    n = nb + n_continuum
    h0 = np.zeros((n, n))
    h0[np.arange(nb), np.arange(nb)] = e_bound
    h0[np.arange(nb, n), np.arange(nb, n)] = e_k
    v = np.zeros((n, n))
    v[:nb, nb:] = v_k[None, :]
    v[nb:, :nb] = v_k[:, None]
    ph = PartitionedHamiltonian(h0 + v, p_indices=np.arange(nb))
    return FeshbachModel(
        kind="two-channel",
        ph=ph,
        h0=h0,
        v=v,
        continuum_energies=e_k,
        params={
            "e_bound": e_bound.tolist(),
            "band": [emin, emax],
            "n_continuum": n_continuum,
        },
    )


def grid_1d_model(
    grid_spacing: float,
    potential,
    r_c: float,
) -> FeshbachModel:
    """Radial grid Hamiltonian -d^2/dr^2 + V(r) with box boundaries.

    potential is a sequence of V samples on the grid r_j = (j+1)*h,
    j = 0..N-1, with the wave function pinned to zero at r = 0 and
    r = (N+1)*h.  P-space collects the grid points with r <= r_c (the
    inner region, which must include the barrier); Q-space is the outer
    region, whose Hamiltonian block is tridiagonal, so resolvent solves
    stay O(N) during energy scans.
    """
    h = float(grid_spacing)
    if h <= 0.0:
        raise ValueError("grid_spacing must be positive")
    v_r = np.asarray(potential, dtype=float)
    if v_r.ndim != 1 or v_r.size < 3:
        raise DimensionError("potential must be a 1-d array of at least 3 samples")
    if not np.all(np.isfinite(v_r)):
        raise NonFiniteError("potential contains non-finite samples")
    n = v_r.size
    r = h * np.arange(1, n + 1)
    kin = 1.0 / h**2
    h0 = np.zeros((n, n))
    np.fill_diagonal(h0, 2.0 * kin)
    idx = np.arange(n - 1)
    h0[idx, idx + 1] = -kin
    h0[idx + 1, idx] = -kin
    v = np.diag(v_r)
    p = np.nonzero(r <= r_c)[0]
    if p.size == 0 or p.size == n:
        raise ValueError("r_c must split the grid into non-empty inner and outer regions")
    ph = PartitionedHamiltonian(h0 + v, p_indices=p)
    ce = ph.q_eigenvalues()
    return FeshbachModel(
        kind="grid-1d",
        ph=ph,
        h0=h0,
        v=v,
        continuum_energies=ce,
        params={"grid_spacing": h, "r_c": float(r_c), "n_grid": n},
    )


def well_barrier_potential(
    grid_spacing: float,
    n_grid: int,
    well_width: float,
    barrier_height: float,
    barrier_width: float,
) -> np.ndarray:
    """V(r) = 0 in the well (r < well_width), barrier_height on the barrier
    shoulder, 0 outside: the minimal shape-resonance profile."""
    r = grid_spacing * np.arange(1, n_grid + 1)
    v = np.zeros(n_grid)
    on_barrier = (r >= well_width) & (r < well_width + barrier_width)
    v[on_barrier] = barrier_height
    return v


# ---------------------------------------------------------------------------
# resonance scan


@dataclass
class ResonanceResult:
    """Self-consistent resonance parameters from the smoothed resolvent.

    residual is |Re lambda(E_r + i*eta) - E_r| after refinement;
    gamma_double_eta is the width recomputed at 2*eta, a direct read on
    how much the answer leans on the smoothing.
    """

    e_r: float
    gamma: float
    shift: float
    eta: float
    residual: float
    gamma_double_eta: float
    e_unperturbed: float
    warnings: tuple[str, ...] = ()


def _ordered_eig(heff: np.ndarray, ref_vecs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with columns ordered to follow ref_vecs.

    Maximum-overlap assignment keeps each branch attached to its P-space
    character across the scan, so avoided crossings do not swap labels.
    """
    vals, vecs = np.linalg.eig(heff)
    overlap = np.abs(ref_vecs.conj().T @ vecs)
    row, col = linear_sum_assignment(-overlap)
    order = np.empty_like(col)
    order[row] = col
    return vals[order], vecs[:, order]


def _scan_window(model: FeshbachModel, e_window, eta_factor: float, n_scan: int):
    lo, hi = float(e_window[0]), float(e_window[1])
    if not (hi > lo):
        raise ValueError("e_window must have positive length")
    band_lo, band_hi = model.band
    if hi < band_lo or lo > band_hi:
        raise NoContinuumError(
            f"window [{lo}, {hi}] does not overlap the continuum band [{band_lo}, {band_hi}]"
        )
    ph = model.ph
    delta_e = model.delta_e_at(0.5 * (lo + hi))
    warnings: tuple[str, ...] = ()
    eta = eta_factor * delta_e
    if eta < delta_e:
        warnings = (f"eta = {eta:.3e} below the level spacing {delta_e:.3e}",)
    e0, p_vecs = np.linalg.eigh(ph.php)
    grid = np.linspace(lo, hi, n_scan)
    vals = np.empty((n_scan, ph.n_p), dtype=np.complex128)
    ref = p_vecs
    refs = []
    for i, e in enumerate(grid):
        vals[i], ref = _ordered_eig(effective_hamiltonian(ph, e + 1j * eta), ref)
        refs.append(ref)
    return grid, vals, refs, eta, e0, warnings


def resonance_scan(
    model: FeshbachModel,
    e_window: tuple[float, float],
    eta_factor: float = 3.0,
    n_scan: int = 201,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Branch-tracked eigenvalues of H_eff(E + i*eta) across a window.

    Returns (energies, lambda values with shape (n_scan, |P|), eta); the
    raw series behind resonance_search, for plotting Re lambda - E
    crossings and the width profile -2 Im lambda.
    """
    grid, vals, _, eta, _, _ = _scan_window(model, e_window, eta_factor, n_scan)
    return grid, vals, eta


def resonance_search(
    model: FeshbachModel,
    e_window: tuple[float, float],
    eta_factor: float = 3.0,
    n_scan: int = 201,
    refine_tol: float = 1e-10,
) -> list[ResonanceResult]:
    """Locate embedded resonances by scanning H_eff(E + i*eta) over a window.

    eta = eta_factor * delta_e smooths the discretized continuum into an
    effective density of states.  For each P-space branch (tracked by
    overlap matching) the resonance position solves Re lambda(E + i*eta) = E
    by bisection between scan points, the width is -2 Im lambda there, and
    the shift is measured from the branch's unperturbed PHP eigenvalue.
    Each result also carries the width recomputed at 2*eta.
    """
    ph = model.ph
    grid, vals, refs, eta, e0, warnings = _scan_window(model, e_window, eta_factor, n_scan)
    n_scan = grid.size

    def branch_at(e: float, eta_val: float, ref: np.ndarray):
        return _ordered_eig(effective_hamiltonian(ph, e + 1j * eta_val), ref)

    results: list[ResonanceResult] = []
    for k in range(ph.n_p):
        g = vals[:, k].real - grid
        for i in range(n_scan - 1):
            if not (g[i] > 0.0 >= g[i + 1]):
                continue
            x0, x1 = float(grid[i]), float(grid[i + 1])
            ref_k = refs[i]
            lam = vals[i, k]
            while x1 - x0 > refine_tol:
                xm = 0.5 * (x0 + x1)
                vm, ref_m = branch_at(xm, eta, ref_k)
                if vm[k].real - xm > 0.0:
                    x0, ref_k, lam = xm, ref_m, vm[k]
                else:
                    x1 = xm
            e_r = 0.5 * (x0 + x1)
            lam, _ = branch_at(e_r, eta, ref_k)
            gamma = -2.0 * lam[k].imag
            if gamma < -1e-10:
                raise AssertionError(f"negative width {gamma} from +i*eta resolvent")
            lam2, _ = branch_at(e_r, 2.0 * eta, ref_k)
            results.append(
                ResonanceResult(
                    e_r=e_r,
                    gamma=max(gamma, 0.0),
                    shift=e_r - float(e0[k]),
                    eta=eta,
                    residual=abs(lam[k].real - e_r),
                    gamma_double_eta=max(-2.0 * lam2[k].imag, 0.0),
                    e_unperturbed=float(e0[k]),
                    warnings=warnings,
                )
            )
    results.sort(key=lambda r: r.e_r)
    return results


# ---------------------------------------------------------------------------
# time-domain oracle


@dataclass
class SurvivalFit:
    """ln-survival fit of the decay of an embedded state.

    rate is the fitted |psi(0)| -> exp(-rate*t/2)-squared decay constant,
    i.e. S(t) ~ exp(-rate*t); compare directly with Gamma.  revived flags
    a post-minimum rise of the survival probability (discrete-spectrum
    recurrence), which invalidates the exponential window.
    """

    rate: float
    log_intercept: float
    residual_rms: float
    revived: bool
    recurrence_time: float
    times: np.ndarray
    survival: np.ndarray
    fit_slice: tuple[int, int]


def decay_oracle(
    model: FeshbachModel,
    initial=None,
    t_final: float | None = None,
    n_steps: int = 400,
    s_high: float = 0.8,
    s_low: float = 0.01,
) -> SurvivalFit:
    """Propagate the full H and fit the survival-probability decay rate.

    initial is a P-space vector (default: the lowest PHP eigenvector,
    i.e. the embedded level the presets are built around).  The constant-H
    midpoint-exponential steps of the direct propagator all equal
    exp(-iH*dt) here, so the propagation is done in the eigenbasis of H
    once and sampled at n_steps times; this is the same scheme with the
    matrix exponential evaluated exactly.

    The fit uses ln S(t) over the window s_low < S < s_high: the upper cut
    skips the quadratic short-time region and the reorganization transient
    of an initial state that is not exactly the resonance eigenvector, the
    lower cut stops before background and recurrence noise dominate.
    residual_rms reports the fit quality and a revival (rise after the
    minimum by more than 10x the residual scale) only flags the result, it
    does not raise.
    """
    ph = model.ph
    if initial is None:
        _, p_vecs = np.linalg.eigh(ph.php)
        initial = p_vecs[:, 0]
    p_psi = np.asarray(initial, dtype=np.complex128)
    if p_psi.shape != (ph.n_p,):
        raise DimensionError(f"initial must have shape ({ph.n_p},), got {p_psi.shape}")
    norm = np.linalg.norm(p_psi)
    if norm == 0.0:
        raise ValueError("initial state must be nonzero")
    p_psi = p_psi / norm
    psi0 = assemble_state(ph, p_psi, np.zeros(ph.n_q))

    e_c = float((p_psi.conj() @ ph.php @ p_psi).real)
    t_rec = model.recurrence_time(e_c)
    if t_final is None:
        t_final = 0.25 * t_rec
    times = np.linspace(0.0, float(t_final), n_steps + 1)

    evals, evecs = np.linalg.eigh(ph.h)
    c0 = evecs.conj().T @ psi0
    # <psi0|psi(t)> = sum_n |c_n|^2 exp(-i E_n t); survival is its |.|^2
    overlaps = np.exp(-1j * np.outer(times, evals)) @ (np.abs(c0) ** 2)
    survival = np.abs(overlaps) ** 2

    below_hi = np.nonzero(survival < s_high)[0]
    i0 = int(below_hi[0]) if below_hi.size else 1
    i0 = max(i0, 1)
    below_lo = np.nonzero(survival[i0:] < s_low)[0]
    i1 = i0 + int(below_lo[0]) if below_lo.size else n_steps + 1
    if i1 - i0 < 4:
        i1 = min(n_steps + 1, i0 + 4)
    t_fit = times[i0:i1]
    s_fit = survival[i0:i1]
    logs = np.log(np.clip(s_fit, 1e-300, None))
    slope, intercept = np.polyfit(t_fit, logs, 1)
    resid = logs - (slope * t_fit + intercept)
    residual_rms = float(np.sqrt(np.mean(resid**2)))

    k_min = int(np.argmin(survival))
    s_min = float(survival[k_min])
    rise = float(survival[k_min:].max() - s_min) if k_min < survival.size - 1 else 0.0
    revived = rise > max(0.02, 10.0 * residual_rms * max(s_min, 1e-12))

    return SurvivalFit(
        rate=float(-slope),
        log_intercept=float(intercept),
        residual_rms=residual_rms,
        revived=revived,
        recurrence_time=t_rec,
        times=times,
        survival=survival,
        fit_slice=(i0, i1),
    )


# ---------------------------------------------------------------------------
# bundled presets


def _flat_model(v: float) -> FeshbachModel:
    return two_channel_model(e_bound=[0.0], band=(-1.0, 1.0), n_continuum=480, coupling=v)


_PRESETS = {
    "two-channel-flat": {
        "description": "one level mid-band, flat coupling; golden-rule width ~0.05",
        "build": lambda: _flat_model(5.8e-3),
        "e_window": (-0.2, 0.2),
        "decay_t": 80.0,
    },
    "feshbach-narrow-pair": {
        "description": "two weakly coupled levels just above threshold; narrow pair",
        "build": lambda: two_channel_model(
            e_bound=[-0.8, -0.55],
            band=(-1.0, 1.0),
            n_continuum=1440,
            coupling=8e-4,
        ),
        "e_window": (-0.95, -0.35),
        "decay_t": 900.0,
    },
    "shape-barrier-1d": {
        "description": "radial well behind a finite barrier; broad shape resonance",
        "build": lambda: grid_1d_model(
            grid_spacing=0.4,
            potential=well_barrier_potential(
                grid_spacing=0.4,
                n_grid=2460,
                well_width=4.0,
                barrier_height=0.6,
                barrier_width=2.4,
            ),
            r_c=6.4,
        ),
        "e_window": (0.05, 0.55),
        "decay_t": 110.0,
    },
}


def available_presets() -> dict[str, dict]:
    """Catalog of bundled scenario presets: name -> description and defaults."""
    out = {}
    for name, entry in _PRESETS.items():
        out[name] = {
            "description": entry["description"],
            "e_window": list(entry["e_window"]),
            "decay_t": entry["decay_t"],
        }
    return out


def preset_model(name: str, coupling_scale: float = 1.0) -> tuple[FeshbachModel, dict]:
    """Build a bundled preset by name; returns (model, defaults).

    coupling_scale multiplies the off-diagonal coupling block (two-channel
    presets only), which is how the width-scaling sweep drives v.
    """
    if name not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {sorted(_PRESETS)}")
    entry = _PRESETS[name]
    model = entry["build"]()
    if coupling_scale != 1.0:
        if model.kind != "two-channel":
            raise ValueError("coupling_scale applies only to two-channel presets")
        h = model.h0 + coupling_scale * model.v
        ph = PartitionedHamiltonian(h, p_indices=model.ph.p_indices)
        model = FeshbachModel(
            kind=model.kind,
            ph=ph,
            h0=model.h0,
            v=coupling_scale * model.v,
            continuum_energies=model.continuum_energies,
            params={**model.params, "coupling_scale": coupling_scale},
        )
    defaults = {"e_window": entry["e_window"], "decay_t": entry["decay_t"]}
    return model, defaults
