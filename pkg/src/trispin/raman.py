"""SU(2)-rotated tunneling and the covariance of the effective model.

Two-beam transitions activate the tunneling of the rotated internal
states (c+, c-) = g (a, b) with rates (j_plus, j_minus).  Expanding the
rotated bilinears back into the bare modes turns the per-link hopping
matrix into K = g^dag diag(j_plus, j_minus) g.  When the collision part
is species-blind (all U equal) the effective Hamiltonian transforms
covariantly at every order:

    engine(K-tunneling) = G^dag engine(diag-tunneling) G,  G = g tensor^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .hubbard import build_v_mixed
from .perturb import h_eff_second, h_eff_third


@dataclass(frozen=True)
class SU2Rotation:
    """g(phi, theta) = [[cos t, e^{i phi} sin t], [sin t, -e^{i phi} cos t]].

    theta is the matrix parameter; the Bloch-sphere rotation angle of
    the internal states is 2*theta.
    """

    phi: float
    theta: float

    @property
    def matrix(self):
        c, s = math.cos(self.theta), math.sin(self.theta)
        phase = np.exp(1j * self.phi)
        return np.array([[c, phase * s], [s, -phase * c]])

    def unitarity_defect(self):
        g = self.matrix
        return np.abs(g @ g.conj().T - np.eye(2)).max()


def hop_matrix(g, j_plus, j_minus):
    """Bare-mode hopping matrix of the rotated tunneling."""
    gm = g.matrix
    return gm.conj().T @ np.diag([j_plus, j_minus]) @ gm


def rotate_tunneling(v, g, basis=None, j_plus=None, j_minus=None):
    """Rebuild a tunneling operator with every link rotated by g.

    ``v`` must have been produced by build_v / build_v_mixed so that its
    graph and hopping matrices are known.  By default the rotated rates
    are identified with the diagonal of the original hopping matrices
    (j_plus = J_up, j_minus = J_down per link); scalar overrides apply
    to every link.
    """
    graph = v.meta.get("graph")
    hops = v.meta.get("hop_matrices")
    if graph is None or hops is None:
        raise ValueError("operator does not carry tunneling metadata")
    basis = basis if basis is not None else v.basis
    gm = g.matrix
    rotated = {}
    for link, kmat in hops.items():
        kmat = np.asarray(kmat)
        if j_plus is not None or j_minus is not None:
            diag = np.diag([j_plus if j_plus is not None else kmat[0, 0],
                            j_minus if j_minus is not None else kmat[1, 1]])
        else:
            diag = kmat
        rotated[link] = gm.conj().T @ diag @ gm
    return build_v_mixed(basis, graph, rotated,
                         v.meta.get("mode_order", "standard"))


def spin_rotation_matrix(g, n_sites):
    """n-fold tensor power of g on the spin space."""
    out = np.array([[1.0 + 0j]])
    for _ in range(n_sites):
        out = np.kron(out, g.matrix)
    return out


def covariance_check(h0, v, g, m_indices):
    """Max residual over orders 2 and 3 of the covariance relation.

    Exact (to roundoff) when the collision energies are species-blind;
    with unequal U's the returned residual is data, not an invariant.
    """
    v_rot = rotate_tunneling(v, g)
    big_g = spin_rotation_matrix(g, h0.basis.n_sites)
    residual = 0.0
    for engine in (h_eff_second, h_eff_third):
        direct = engine(h0, v_rot, m_indices).matrix
        sandwiched = big_g.conj().T @ engine(h0, v, m_indices).matrix @ big_g
        residual = max(residual, la.norm(direct - sandwiched, 2))
    return residual
