"""Figure rendering for the CLI report path.

Every renderer takes already-computed series, writes one PNG next to the
delimited output, and returns the path.  The Agg backend keeps this
headless-safe; nothing here recomputes physics.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "render_mu",
    "render_phase",
    "render_resonance",
    "render_survival",
    "render_varcheck",
]


def render_mu(path, times, mu3, mu2, mu1, switches=()) -> str:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(times, np.abs(mu3), label="|mu3|", color="tab:blue")
    ax1.plot(times, mu3.real, label="Re mu3", color="tab:blue", ls="--", lw=0.8)
    ax1.plot(times, mu3.imag, label="Im mu3", color="tab:cyan", ls=":", lw=0.8)
    ax1.plot(times, np.abs(mu2), label="|mu2|", color="tab:orange", lw=0.8)
    for t_sw in switches:
        ax1.axvline(t_sw, color="0.6", lw=0.7, ls="--")
    ax1.set_ylabel("mu3, mu2")
    ax1.legend(loc="best", fontsize=8)
    ax2.plot(times, mu1.real, label="Re mu1", color="tab:green")
    ax2.plot(times, mu1.imag, label="Im mu1", color="tab:red", ls="--")
    ax2.set_xlabel("t")
    ax2.set_ylabel("mu1")
    ax2.legend(loc="best", fontsize=8)
    fig.suptitle("Wei-Norman parameters")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)


def render_phase(path, times, total, dynamical, geometric, dyn_rate, geo_rate) -> str:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(times, total, label="total", color="k")
    ax1.plot(times, dynamical, label="dynamical", color="tab:blue", ls="--")
    ax1.plot(times, geometric, label="geometric", color="tab:red")
    ax1.set_ylabel("accumulated phase (rad)")
    ax1.legend(loc="best", fontsize=8)
    ax2.plot(times, dyn_rate, label="dynamical rate", color="tab:blue", lw=0.8)
    ax2.plot(times, geo_rate, label="geometric rate", color="tab:red", lw=0.8)
    ax2.set_xlabel("t")
    ax2.set_ylabel("rate (rad / time)")
    ax2.legend(loc="best", fontsize=8)
    fig.suptitle("Dynamical / geometric phase split")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)


def render_resonance(path, energies, lam, results) -> str:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for k in range(lam.shape[1]):
        ax1.plot(energies, lam[:, k].real - energies, label=f"branch {k}")
        ax2.plot(energies, -2.0 * lam[:, k].imag)
    ax1.axhline(0.0, color="0.5", lw=0.7)
    for r in results:
        ax1.axvline(r.e_r, color="tab:red", lw=0.8, ls="--")
        ax2.axvline(r.e_r, color="tab:red", lw=0.8, ls="--")
    ax1.set_ylabel("Re lambda(E + i eta) - E")
    ax1.legend(loc="best", fontsize=8)
    ax2.set_xlabel("E")
    ax2.set_ylabel("-2 Im lambda(E + i eta)")
    fig.suptitle("Smoothed effective-Hamiltonian scan")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)


def render_survival(path, times, survival, rate, log_intercept, fit_slice) -> str:
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.semilogy(times, np.clip(survival, 1e-300, None), label="survival", color="tab:blue")
    i0, i1 = fit_slice
    tf = times[i0:i1]
    ax.semilogy(tf, np.exp(log_intercept - rate * tf), label=f"fit rate {rate:.4g}",
                color="tab:red", ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel("S(t)")
    ax.legend(loc="best", fontsize=8)
    fig.suptitle("Survival probability of the embedded state")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)


def render_varcheck(path, epsilons, trial_errors, var_errors, slope) -> str:
    fig, ax = plt.subplots(figsize=(6.2, 4.4))
    ax.loglog(epsilons, trial_errors, "o-", label="trial error")
    ax.loglog(epsilons, var_errors, "s-", label=f"corrected (slope {slope:.3f})")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("operator-norm error at t_final")
    ax.legend(loc="best", fontsize=8)
    fig.suptitle("Second-order variational improvement")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)
