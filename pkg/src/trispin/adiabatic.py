"""All-orders oracle: eliminate the multiply-occupied block exactly.

Setting the amplitudes of the energetically distant states stationary
turns the Schroedinger equation into a linear system for the fast block;
solving it at zero quasi-energy gives

    H_eff = H_MM - H_MF (H_FF)^{-1} H_FM,      H = H0 + V.

Because the full fast block (including tunneling within it) is
inverted, this resums the perturbative series to all orders and is an
independent check of the order-2/3 engine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .perturb import EffectiveHamiltonian, spin_map, h_eff_second, h_eff_third

COND_LIMIT = 1e12


@dataclass
class AdiabaticResult:
    h_eff: EffectiveHamiltonian
    condition_number: float
    dims: tuple   # (total, fast, slow)


def _blocks(h0, v, m_indices):
    dim = h0.dim
    m = np.asarray(m_indices, dtype=int)
    f = np.setdiff1d(np.arange(dim), m)
    h_full = (h0.mat + v.mat).toarray()
    return m, f, h_full


def adiabatic_eliminate(h0, v, m_indices, cond_limit=COND_LIMIT):
    """Exact elimination of the fast block; returns the spin-ordered
    effective Hamiltonian and the fast-block condition number."""
    m, f, h_full = _blocks(h0, v, m_indices)
    hmm = h_full[np.ix_(m, m)]
    hmf = h_full[np.ix_(m, f)]
    hff = h_full[np.ix_(f, f)]
    cond = float(np.linalg.cond(hff)) if len(f) else 0.0
    if not np.isfinite(cond) or cond > cond_limit:
        raise ValueError(
            "fast block not invertible; parameters too close to resonance")
    if len(f):
        block = hmm - hmf @ la.solve(hff, hmf.conj().T, assume_a="her")
    else:
        block = hmm
    block = 0.5 * (block + block.conj().T)
    smap = spin_map(h0.basis, m_indices)
    perm = np.array([np.where(m == p)[0][0] for p in smap.spin_to_fock])
    block = block[np.ix_(perm, perm)]
    heff = EffectiveHamiltonian(block, order="all", provenance="adiabatic")
    return AdiabaticResult(heff, cond, (h0.dim, len(f), len(m)))


def truncated_series(h0, v, m_indices, order=3):
    """Neumann expansion of the fast-block inverse, truncated.

    Order 2 reproduces the superexchange formula and order 3 adds the
    two-intermediate term; both must agree with the perturbative engine
    to machine precision.
    """
    m, f, h_full = _blocks(h0, v, m_indices)
    energies = h0.diagonal().real
    ef = energies[f]
    vmf = v.mat.toarray()[np.ix_(m, f)]
    vff = v.mat.toarray()[np.ix_(f, f)]
    if np.any(np.abs(ef) < 1e-12 * max(1.0, np.abs(energies).max())):
        raise ValueError("zero-energy fast state; series undefined")
    block = -(vmf / ef) @ vmf.conj().T
    if order >= 3:
        block = block + (vmf / ef) @ vff @ (vmf.conj().T / ef[:, None])
    smap = spin_map(h0.basis, m_indices)
    perm = np.array([np.where(m == p)[0][0] for p in smap.spin_to_fock])
    return EffectiveHamiltonian(block[np.ix_(perm, perm)], order=f"<={order}",
                                provenance="adiabatic-series")


def series_compare(h0, v, m_indices):
    """Residuals between the exact elimination, its truncated series and
    the perturbative engine.  Requires the Neumann series to converge,
    i.e. the tunneling norm within the fast block below the smallest
    fast energy."""
    m = np.asarray(m_indices, dtype=int)
    f = np.setdiff1d(np.arange(h0.dim), m)
    ef = h0.diagonal().real[f]
    vff = v.mat.toarray()[np.ix_(f, f)]
    vff_norm = la.norm(vff, 2)
    emin = np.abs(ef).min() if len(f) else np.inf
    if vff_norm >= emin:
        raise ValueError("tunneling too large: fast-block series does not "
                         f"converge (|V_FF| = {vff_norm:.3g} >= {emin:.3g})")
    exact = adiabatic_eliminate(h0, v, m_indices)
    h2 = h_eff_second(h0, v, m_indices)
    h3 = h_eff_third(h0, v, m_indices)
    series3 = truncated_series(h0, v, m_indices, order=3)
    engine = h2.matrix + h3.matrix
    return {
        "adiabatic_vs_engine": la.norm(exact.h_eff.matrix - engine, 2),
        "series_vs_engine": la.norm(series3.matrix - engine, 2),
        "engine_third_norm": la.norm(h3.matrix, 2),
        "condition_number": exact.condition_number,
        "dims": exact.dims,
    }
