"""Unitary integration of two-level (and general spin-j) driven dynamics.

The evolution operator for H(t) = -J . B(t) is parametrized as the ordered
product

    U(t) = exp(-i mu3 J+) exp(-i mu2 J-) exp(-i mu1 Jz),

where the three complex functions mu_k(t) obey coupled first-order equations:
a Riccati equation for mu3 that decouples, and quadratures for mu2 and mu1
driven by it (with B+- = Bx +- i By):

    mu3' = -B-/2 - (B+/2) mu3^2 + i B3 mu3
    mu1' = -B3 - i B+ mu3
    mu2' = i mu2 mu1' - B+/2

mu2 and Im(mu1) are redundant for a unitary evolution; they are integrated
independently anyway so the exact relations

    mu2 = conj(mu3) / (1 + |mu3|^2),     exp(Im mu1) = 1 + |mu3|^2

stay available as falsifiable invariants of the integration.

mu3 is a stereographic coordinate and blows up when the evolving state passes
near the antipode of the initial basis state.  Integration therefore restarts
the gauge (mu = 0) whenever |mu3| crosses a threshold, recording the
accumulated evolution operator per segment; phases and Re(mu1) accumulate
additively across segments.

The factorization U = U1(mu3) * U2(mu1) (both built below) isolates the phase
content of the evolution in U2.  The U2 equation i U2' = H_eff U2 has
diagonal H_eff whose two parts split the phase of the first basis component
into a dynamical piece (the diagonal of U1^-1 H U1, i.e. the instantaneous
energy expectation) and a geometric piece (the diagonal of -i U1^-1 U1').
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .errors import NonFiniteError, OdeSingularityError
from .fields import Field
from .numkit import OdeSettings, mat_exp, ode_integrate

__all__ = [
    "SpinRepresentation",
    "WnSegment",
    "MuTrajectory",
    "PhaseSplit",
    "EffectiveHamiltonianCheck",
    "integrate_mu",
    "reconstruct_evolution",
    "evolve_state",
    "density_matrix",
    "split_u1_u2",
    "effective_hamiltonian_td",
    "phase_split",
    "direct_propagate",
]

_STATE_DIM = 5  # (mu3, mu2, mu1, dynamical integrand, geometric integrand)


# ---------------------------------------------------------------------------
# spin representations


@dataclass(frozen=True)
class SpinRepresentation:
    """Matrices J+, J-, Jz for spin j in the basis m = j, j-1, ..., -j."""

    j: float
    jp: np.ndarray
    jm: np.ndarray
    jz: np.ndarray

    @classmethod
    def from_j(cls, j: float) -> "SpinRepresentation":
        twoj = round(2 * j)
        if abs(2 * j - twoj) > 1e-12 or twoj < 1:
            raise ValueError(f"j must be a positive half-integer, got {j}")
        j = twoj / 2.0
        dim = twoj + 1
        m = j - np.arange(dim)
        jz = np.diag(m).astype(np.complex128)
        jp = np.zeros((dim, dim), dtype=np.complex128)
        for k in range(1, dim):
            # J+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>
            jp[k - 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
        return cls(j=j, jp=jp, jm=jp.conj().T, jz=jz)

    @property
    def dim(self) -> int:
        return self.jz.shape[0]

    def hamiltonian(self, bp: complex, bm: complex, b3: float) -> np.ndarray:
        """H = -J . B expressed through ladder operators."""
        return -(0.5 * (bm * self.jp + bp * self.jm) + b3 * self.jz)


# ---------------------------------------------------------------------------
# the mu equations and their phase integrands


def _mu_rhs(field: Field):
    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        bp, bm, b3 = field.b_components(t)
        mu3, mu2 = y[0], y[1]
        mu1dot = -b3 - 1j * bp * mu3
        mu3dot = -0.5 * bm - 0.5 * bp * mu3 * mu3 + 1j * b3 * mu3
        mu2dot = 1j * mu2 * mu1dot - 0.5 * bp
        g_dyn, g_geo = _phase_integrands(mu3, bp, bm, b3)
        return np.array([mu3dot, mu2dot, mu1dot, g_dyn, g_geo], dtype=np.complex128)

    return rhs


def _phase_integrands(mu3, bp, bm, b3):
    """(1,1) entries of the two diagonal pieces of the U2-frame Hamiltonian.

    g_dyn is the (1,1) entry of U1^-1 H U1 and g_geo the (1,1) entry of
    i U1^-1 U1' (the latter evaluated analytically, with mu3' already
    eliminated through its own equation of motion).  Their difference is
    mu1'/2 identically.
    """
    m2 = mu3.real * mu3.real + mu3.imag * mu3.imag
    c3 = np.conjugate(mu3)
    denom = 2.0 * (1.0 + m2)
    g_dyn = (1j * c3 * bm - 1j * mu3 * bp - b3 * (1.0 - m2)) / denom
    g_geo = (1j * c3 * bm + 1j * mu3 * m2 * bp + 2.0 * m2 * b3) / denom
    return g_dyn, g_geo


def u1_frame_hamiltonian(mu3: complex, bp: complex, bm: complex, b3: float) -> np.ndarray:
    """U1^-1 H U1 for j = 1/2, written out analytically.

    The (2,1) numerator carries (conj mu3)^2 B-; expanding the product
    U1^-1 H U1 confirms that power (the |mu3|^2 sometimes quoted there is a
    transcription slip and breaks the identity for complex mu3).
    """
    mu3 = complex(mu3)
    m2 = abs(mu3) ** 2
    c3 = mu3.conjugate()
    n = 1.0 + m2
    diag = (1j * c3 * bm - 1j * mu3 * bp - b3 * (1.0 - m2)) / (2.0 * n)
    off_upper = 1j * mu3 * b3 - 0.5 * bm - 0.5 * mu3 * mu3 * bp
    off_lower = (-2j * c3 * b3 - bp - c3 * c3 * bm) / (2.0 * n * n)
    return np.array([[diag, off_upper], [off_lower, -diag]], dtype=np.complex128)


def u1_frame_connection(mu3: complex, bp: complex, bm: complex, b3: float) -> np.ndarray:
    """i U1^-1 U1' for j = 1/2 with mu3' eliminated via its equation of motion.

    Off-diagonals coincide with those of u1_frame_hamiltonian entry by entry,
    so the difference of the two (the effective Hamiltonian for U2) is purely
    diagonal: mu1'/2 * sigma_z.
    """
    mu3 = complex(mu3)
    m2 = abs(mu3) ** 2
    c3 = mu3.conjugate()
    n = 1.0 + m2
    mu3dot = -0.5 * bm - 0.5 * bp * mu3 * mu3 + 1j * b3 * mu3
    # conj(mu3dot) written out so the identity also holds for complex drives
    mu3dot_c = -0.5 * bp - 0.5 * bm * c3 * c3 - 1j * b3 * c3
    diag = -1j * c3 * mu3dot / n
    return np.array(
        [[diag, mu3dot], [mu3dot_c / (n * n), -diag]], dtype=np.complex128
    )


# ---------------------------------------------------------------------------
# trajectory container


@dataclass
class WnSegment:
    """One gauge segment of a mu integration."""

    t_start: float
    t_end: float
    interpolant: Callable[[float], np.ndarray]
    y_end: np.ndarray            # in-segment (mu3, mu2, mu1, int g_dyn, int g_geo)
    carry: np.ndarray            # summed y_end of all earlier segments
    u_start_half: np.ndarray     # accumulated j=1/2 evolution operator at t_start
    restarted: bool              # True if the segment ended in a gauge restart


@dataclass
class PhaseSplit:
    """Additive decomposition of the phase of the first basis component."""

    t: float
    total: float
    dynamical: float
    geometric: float
    sample_times: np.ndarray
    total_samples: np.ndarray
    dynamical_samples: np.ndarray
    geometric_samples: np.ndarray
    dynamical_rate: np.ndarray
    geometric_rate: np.ndarray

    @property
    def additivity_residual(self) -> float:
        return abs(self.total - (self.dynamical + self.geometric))


@dataclass
class MuTrajectory:
    """Sampled Wei-Norman parameters with per-segment dense interpolants."""

    field: Field
    t_span: tuple[float, float]
    settings: OdeSettings
    restart_threshold: float
    times: np.ndarray            # sample grid over the full span
    mu3: np.ndarray
    mu2: np.ndarray
    mu1: np.ndarray
    segments: list[WnSegment]
    _acc: np.ndarray = dc_field(repr=False, default=None)  # (n,5) accumulated state

    @property
    def n_restarts(self) -> int:
        return sum(1 for s in self.segments if s.restarted)

    @property
    def switches(self) -> list[tuple[float, np.ndarray]]:
        """(switch time, accumulated j=1/2 evolution operator at the switch)."""
        out = []
        for seg in self.segments:
            if seg.restarted:
                u = _wn_matrix_half(seg.y_end) @ seg.u_start_half
                out.append((seg.t_end, u))
        return out

    def segment_index(self, t: float) -> int:
        t0, t1 = self.t_span
        if not (t0 - 1e-12 <= t <= t1 + 1e-12):
            raise ValueError(f"t = {t} outside trajectory span {self.t_span}")
        ends = [s.t_end for s in self.segments[:-1]]
        return int(np.searchsorted(ends, t, side="left"))

    def evaluate(self, t: float) -> np.ndarray:
        """In-segment state vector (mu3, mu2, mu1, int g_dyn, int g_geo) at t."""
        seg = self.segments[self.segment_index(t)]
        return np.asarray(seg.interpolant(t), dtype=np.complex128)

    def mu_values(self, t: float) -> tuple[complex, complex, complex]:
        y = self.evaluate(t)
        return complex(y[0]), complex(y[1]), complex(y[2])

    def accumulated(self, t: float) -> np.ndarray:
        """Carry of earlier segments plus the in-segment state at t.

        Only the additive components (mu1 and the two phase integrals) are
        meaningful in the carry; mu3/mu2 reset at each restart.
        """
        idx = self.segment_index(t)
        seg = self.segments[idx]
        return seg.carry + np.asarray(seg.interpolant(t), dtype=np.complex128)

    def accumulated_samples(self) -> np.ndarray:
        return self._acc


# ---------------------------------------------------------------------------
# integration with gauge restarts


def integrate_mu(
    field: Field,
    t_span: tuple[float, float],
    settings: OdeSettings | None = None,
    n_samples: int = 1001,
    restart_threshold: float = 10.0,
    max_segments: int = 1000,
) -> MuTrajectory:
    """Integrate the mu equations over t_span with automatic gauge restarts.

    All five components (mu3, mu2, mu1 and the two phase integrands) ride in
    one adaptive RK45 run per segment, so the additive phase identity holds at
    the level of the right-hand side.  When |mu3| crosses restart_threshold
    the segment is closed, its accumulated state recorded, and integration
    resumes from mu = 0.
    """
    if settings is None:
        settings = OdeSettings()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    if restart_threshold <= 0:
        raise ValueError("restart_threshold must be positive")

    rhs = _mu_rhs(field)

    def crossing(t, y):
        return abs(y[0]) - restart_threshold

    crossing.terminal = True
    crossing.direction = 1.0

    segments: list[WnSegment] = []
    carry = np.zeros(_STATE_DIM, dtype=np.complex128)
    u_half = np.eye(2, dtype=np.complex128)
    t_cur = t0
    while True:
        if len(segments) >= max_segments:
            raise OdeSingularityError(
                f"gauge restart limit of {max_segments} segments exceeded", t_cur
            )
        res = ode_integrate(
            rhs,
            np.zeros(_STATE_DIM, dtype=np.complex128),
            (t_cur, t1),
            settings,
            events=[crossing],
        )
        restarted = res.status == 1
        t_end = float(res.t_events[0][0]) if restarted else t1
        if restarted and t_end - t_cur <= 1e-12 * max(abs(t_cur), abs(t1), 1.0):
            raise OdeSingularityError(
                "restart threshold crossed immediately after a gauge restart; "
                "field too singular for the stereographic parametrization",
                t_end,
            )
        y_end = np.asarray(res.interpolant(t_end), dtype=np.complex128)
        seg = WnSegment(
            t_start=t_cur,
            t_end=t_end,
            interpolant=res.interpolant,
            y_end=y_end,
            carry=carry.copy(),
            u_start_half=u_half.copy(),
            restarted=restarted,
        )
        segments.append(seg)
        if not restarted:
            break
        carry = carry + y_end
        u_half = _wn_matrix_half(y_end) @ u_half
        t_cur = t_end

    times = np.linspace(t0, t1, n_samples)
    samples = np.empty((n_samples, _STATE_DIM), dtype=np.complex128)
    acc = np.empty((n_samples, _STATE_DIM), dtype=np.complex128)
    ends = [s.t_end for s in segments[:-1]]
    idxs = np.searchsorted(ends, times, side="left")
    for i, (t, k) in enumerate(zip(times, idxs)):
        seg = segments[int(k)]
        y = np.asarray(seg.interpolant(min(max(t, seg.t_start), seg.t_end)))
        samples[i] = y
        acc[i] = seg.carry + y
    return MuTrajectory(
        field=field,
        t_span=(t0, t1),
        settings=settings,
        restart_threshold=restart_threshold,
        times=times,
        mu3=samples[:, 0],
        mu2=samples[:, 1],
        mu1=samples[:, 2],
        segments=segments,
        _acc=acc,
    )


# ---------------------------------------------------------------------------
# reconstruction of evolution operators and states


def _wn_matrix_half(y: np.ndarray) -> np.ndarray:
    """Closed-form j=1/2 evolution operator from (mu3, mu2, mu1).

    Uses the resolved form with the unitarity constraints substituted for
    mu2, keeping the integrated complex mu1 in the prefactor:

        U = e^{-i mu1/2}/(1+|mu3|^2) * [[1, -i mu3 e^{i Re mu1}],
                                        [-i conj(mu3), e^{i Re mu1}]]
    """
    mu3 = complex(y[0])
    mu1 = complex(y[2])
    m2 = abs(mu3) ** 2
    pref = np.exp(-0.5j * mu1) / (1.0 + m2)
    eir = np.exp(1j * mu1.real)
    return pref * np.array(
        [[1.0, -1j * mu3 * eir], [-1j * np.conjugate(mu3), eir]],
        dtype=np.complex128,
    )


def _wn_matrix_general(rep: SpinRepresentation, y: np.ndarray) -> np.ndarray:
    mu3, mu2, mu1 = complex(y[0]), complex(y[1]), complex(y[2])
    return (
        mat_exp(-1j * mu3 * rep.jp)
        @ mat_exp(-1j * mu2 * rep.jm)
        @ mat_exp(-1j * mu1 * rep.jz)
    )


def _wn_matrix(rep: SpinRepresentation, y: np.ndarray) -> np.ndarray:
    if rep.dim == 2:
        return _wn_matrix_half(y)
    return _wn_matrix_general(rep, y)


def _segment_start_unitaries(mu: MuTrajectory, rep: SpinRepresentation) -> list[np.ndarray]:
    us = [np.eye(rep.dim, dtype=np.complex128)]
    for seg in mu.segments[:-1]:
        us.append(_wn_matrix(rep, seg.y_end) @ us[-1])
    return us


def reconstruct_evolution(
    mu: MuTrajectory,
    rep: SpinRepresentation,
    times: float | Sequence[float],
) -> np.ndarray:
    """Evolution operator U(t) in the given spin representation.

    For j = 1/2 the closed-form two-by-two matrix is used; for higher spin
    the same mu functions feed the exponential product (only commutation
    relations enter the derivation, so one trajectory serves every j).
    Returns shape (d, d) for scalar t, else (n, d, d).
    """
    scalar = np.isscalar(times)
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    starts = _segment_start_unitaries(mu, rep)
    out = np.empty((ts.size, rep.dim, rep.dim), dtype=np.complex128)
    for i, t in enumerate(ts):
        k = mu.segment_index(float(t))
        y = mu.segments[k].interpolant(float(t))
        out[i] = _wn_matrix(rep, np.asarray(y)) @ starts[k]
    return out[0] if scalar else out


def evolve_state(
    mu: MuTrajectory,
    rep: SpinRepresentation,
    times: float | Sequence[float],
    psi0: np.ndarray | None = None,
) -> np.ndarray:
    """Propagate psi0 (default: the first basis state) through U(t)."""
    if psi0 is None:
        psi0 = np.zeros(rep.dim, dtype=np.complex128)
        psi0[0] = 1.0
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if psi0.shape != (rep.dim,):
        raise ValueError(f"psi0 shape {psi0.shape} does not match dim {rep.dim}")
    us = reconstruct_evolution(mu, rep, times)
    return us @ psi0


def density_matrix(mu: MuTrajectory, t: float) -> np.ndarray:
    """Pure-state density matrix of the (1,0)-initialized two-level system.

    Within the first gauge segment this is algebraically

        rho = [[1, i mu3], [-i conj(mu3), |mu3|^2]] / (1 + |mu3|^2);

    the implementation goes through the reconstructed state so it stays the
    density matrix of the same physical state across gauge restarts, and is
    normalized so trace and idempotency are exact by construction.
    """
    rep = SpinRepresentation.from_j(0.5)
    psi = evolve_state(mu, rep, t)
    return np.outer(psi, psi.conj()) / np.vdot(psi, psi).real


def split_u1_u2(
    mu: MuTrajectory, t: float, unitarized: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Current-segment factorization U = U1(mu3) U2(mu1) at time t (j = 1/2).

    U1 = [[1/(1+|mu3|^2), -i mu3], [-i conj(mu3)/(1+|mu3|^2), 1]] carries the
    population motion (det U1 = 1, not unitary); U2 = diag(e^{-i mu1/2},
    e^{+i mu1/2}) carries the phases.  With unitarized=True, U1 is rebalanced
    by diag((1+|mu3|^2)^(1/2), (1+|mu3|^2)^(-1/2)) into an exactly unitary
    factor and U2 absorbs the inverse, preserving the product.

    Across gauge restarts these are the factors of the current segment's
    operator only; right-multiply by the segment's accumulated start operator
    to get the full U(t).
    """
    mu3, _, mu1 = mu.mu_values(t)
    m2 = abs(mu3) ** 2
    u1 = np.array(
        [
            [1.0 / (1.0 + m2), -1j * mu3],
            [-1j * np.conjugate(mu3) / (1.0 + m2), 1.0],
        ],
        dtype=np.complex128,
    )
    u2 = np.diag([np.exp(-0.5j * mu1), np.exp(0.5j * mu1)]).astype(np.complex128)
    if unitarized:
        r = np.sqrt(1.0 + m2)
        d = np.diag([r, 1.0 / r]).astype(np.complex128)
        d_inv = np.diag([1.0 / r, r]).astype(np.complex128)
        u1 = u1 @ d
        u2 = d_inv @ u2
    return u1, u2


@dataclass
class EffectiveHamiltonianCheck:
    """Analytic effective Hamiltonian plus its numerical cross-check."""

    t: float
    h_eff: np.ndarray          # analytic: (mu1'/2) sigma_z
    h_eff_numeric: np.ndarray  # U1^-1 H U1 - i U1^-1 U1' with U1' by centered FD
    max_off_diagonal: float
    diagonal_error: float


def effective_hamiltonian_td(
    mu: MuTrajectory,
    field: Field | None = None,
    t: float = 0.0,
    fd_step: float = 1e-4,
    off_diag_tol: float = 1e-7,
    diag_tol: float = 1e-7,
) -> EffectiveHamiltonianCheck:
    """Effective Hamiltonian governing the phase factor U2 at time t.

    Computed two ways and cross-asserted: (a) numerically as
    U1^-1 H U1 - i U1^-1 U1' with the time derivative by centered finite
    difference on the dense mu3 output, and (b) analytically as the diagonal
    (-B3 - i mu3 B+) sigma_z / 2.  The off-diagonals of (a) must cancel to
    off_diag_tol and its diagonal must agree with (b) to diag_tol; both
    checks are finite-difference limited, hence the ~1e-7 defaults.

    Within fd_step of a segment edge the stencil shifts inward and the
    whole comparison is evaluated at its center (reported in the result),
    keeping both routes at the same instant.
    """
    if field is None:
        field = mu.field
    k = mu.segment_index(t)
    seg = mu.segments[k]
    h = min(fd_step, 0.25 * (seg.t_end - seg.t_start))
    lo, hi = seg.t_start, seg.t_end
    tm, tp = t - h, t + h
    if tm < lo:
        tm, tp = lo, lo + 2 * h
    elif tp > hi:
        tm, tp = hi - 2 * h, hi

    def u1_of(tt: float) -> np.ndarray:
        mu3 = complex(seg.interpolant(tt)[0])
        m2 = abs(mu3) ** 2
        return np.array(
            [
                [1.0 / (1.0 + m2), -1j * mu3],
                [-1j * np.conjugate(mu3) / (1.0 + m2), 1.0],
            ],
            dtype=np.complex128,
        )

    tc = 0.5 * (tm + tp)
    u1 = u1_of(tc)
    u1dot = (u1_of(tp) - u1_of(tm)) / (tp - tm)
    # det U1 = 1 so the inverse is the adjugate
    u1inv = np.array(
        [[u1[1, 1], -u1[0, 1]], [-u1[1, 0], u1[0, 0]]], dtype=np.complex128
    )
    bp, bm, b3 = field.b_components(tc)
    rep = SpinRepresentation.from_j(0.5)
    h_lab = rep.hamiltonian(bp, bm, b3)
    h_num = u1inv @ h_lab @ u1 - 1j * (u1inv @ u1dot)

    mu3_t = complex(seg.interpolant(tc)[0])
    mu1dot = -b3 - 1j * bp * mu3_t
    h_ana = np.diag([0.5 * mu1dot, -0.5 * mu1dot]).astype(np.complex128)

    off = float(max(abs(h_num[0, 1]), abs(h_num[1, 0])))
    diag_err = float(max(abs(h_num[0, 0] - h_ana[0, 0]), abs(h_num[1, 1] - h_ana[1, 1])))
    if off > off_diag_tol:
        raise AssertionError(
            f"off-diagonal of numerical H_eff did not cancel: {off:.3e} > {off_diag_tol:.1e}"
        )
    if diag_err > diag_tol:
        raise AssertionError(
            f"numerical H_eff diagonal deviates from analytic: {diag_err:.3e} > {diag_tol:.1e}"
        )
    return EffectiveHamiltonianCheck(
        t=tc,
        h_eff=h_ana,
        h_eff_numeric=h_num,
        max_off_diagonal=off,
        diagonal_error=diag_err,
    )


def phase_split(
    mu: MuTrajectory, field: Field | None = None, t: float | None = None
) -> PhaseSplit:
    """Split the accumulated phase of the first basis component at time t.

    total     = -Re(mu1)/2 accumulated across segments,
    dynamical = -Re integral of the (1,1) entry of U1^-1 H U1
                (the instantaneous energy expectation),
    geometric = -Re integral of the (1,1) entry of -i U1^-1 U1'
              = +Re integral of g_geo,

    with both integrands evaluated analytically from mu3 (mu3' eliminated via
    its equation of motion, no finite differences) and integrated inside the
    same adaptive run as mu itself, so total = dynamical + geometric holds to
    roundoff.  Per-sample rates are exposed for plotting.
    """
    if field is None:
        field = mu.field
    t_final = mu.t_span[1] if t is None else float(t)
    acc = mu.accumulated(t_final)
    total = -0.5 * acc[2].real
    dynamical = -acc[3].real
    geometric = acc[4].real

    acc_s = mu.accumulated_samples()
    rates_d = np.empty(mu.times.size)
    rates_g = np.empty(mu.times.size)
    for i, ti in enumerate(mu.times):
        bp, bm, b3 = field.b_components(float(ti))
        g_d, g_g = _phase_integrands(mu.mu3[i], bp, bm, b3)
        rates_d[i] = -g_d.real
        rates_g[i] = g_g.real
    return PhaseSplit(
        t=t_final,
        total=float(total),
        dynamical=float(dynamical),
        geometric=float(geometric),
        sample_times=mu.times.copy(),
        total_samples=-0.5 * acc_s[:, 2].real,
        dynamical_samples=-acc_s[:, 3].real,
        geometric_samples=acc_s[:, 4].real,
        dynamical_rate=rates_d,
        geometric_rate=rates_g,
    )


# ---------------------------------------------------------------------------
# brute-force reference propagation


def _su2_step_matrices(b: np.ndarray, dt: float) -> np.ndarray:
    """Closed-form midpoint exponentials exp(-i H dt) for j = 1/2.

    H = -B.sigma/2, so exp(-i H dt) = cos(|B|dt/2) I + i sin(|B|dt/2) Bhat.sigma.
    """
    norm = np.linalg.norm(b, axis=1)
    phi = 0.5 * norm * dt
    c = np.cos(phi)
    s_over = np.where(norm > 0.0, np.sin(phi) / np.where(norm > 0.0, norm, 1.0), 0.5 * dt)
    bx, by, bz = b[:, 0], b[:, 1], b[:, 2]
    u = np.empty((b.shape[0], 2, 2), dtype=np.complex128)
    u[:, 0, 0] = c + 1j * s_over * bz
    u[:, 0, 1] = 1j * s_over * (bx - 1j * by)
    u[:, 1, 0] = 1j * s_over * (bx + 1j * by)
    u[:, 1, 1] = c - 1j * s_over * bz
    return u


def _general_step_matrices(rep: SpinRepresentation, b: np.ndarray, dt: float) -> np.ndarray:
    n = b.shape[0]
    d = rep.dim
    hs = np.empty((n, d, d), dtype=np.complex128)
    for i in range(n):
        bp = complex(b[i, 0], b[i, 1])
        hs[i] = rep.hamiltonian(bp, bp.conjugate(), float(b[i, 2]))
    w, v = np.linalg.eigh(hs)
    phases = np.exp(-1j * w * dt)
    return np.einsum("nik,nk,njk->nij", v, phases, v.conj())


def _ordered_product(mats: np.ndarray) -> np.ndarray:
    """Product mats[-1] @ ... @ mats[0] by pairwise reduction (exact order)."""
    while mats.shape[0] > 1:
        n = mats.shape[0]
        even = n - (n % 2)
        combined = np.matmul(mats[1:even:2], mats[0:even:2])
        if n % 2:
            combined = np.concatenate([combined, mats[-1:]], axis=0)
        mats = combined
    return mats[0]


def direct_propagate(
    field: Field,
    rep: SpinRepresentation,
    t_span: tuple[float, float],
    n_steps: int,
    return_samples: bool = False,
):
    """Second-order reference propagation by midpoint exponentials.

    Splits t_span into n_steps uniform steps and applies exp(-i H(t_mid) dt)
    per step.  Global error is O(dt^2); unitarity is exact up to roundoff.
    With return_samples=True returns (times, (n_steps+1, d, d) cumulative
    operators); otherwise just U(t_end).
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (t1 > t0 and n_steps >= 1):
        raise ValueError("need t1 > t0 and n_steps >= 1")
    dt = (t1 - t0) / n_steps
    mids = t0 + (np.arange(n_steps) + 0.5) * dt
    b = field.evaluate_many(mids)
    if not np.all(np.isfinite(b)):
        raise NonFiniteError("field produced non-finite values on the step grid")
    if rep.dim == 2:
        steps = _su2_step_matrices(b, dt)
    else:
        steps = _general_step_matrices(rep, b, dt)
    if not return_samples:
        return _ordered_product(steps)
    out = np.empty((n_steps + 1, rep.dim, rep.dim), dtype=np.complex128)
    out[0] = np.eye(rep.dim)
    acc = np.eye(rep.dim, dtype=np.complex128)
    for i in range(n_steps):
        acc = steps[i] @ acc
        out[i + 1] = acc
    times = t0 + np.arange(n_steps + 1) * dt
    return times, out
