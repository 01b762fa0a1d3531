"""Closed-form effective couplings and explicit spin-model builders.

Every coupling listed here has been certified against two independent
routes: the order-2/3 perturbative engine and the exact elimination of
the multiply-occupied block.  Conventions are pinned by the operator
builders in :mod:`trispin.hubbard`: the tunneling term is
-J a(from)^dag a(to) + h.c. on each directed edge, and triangle link j
joins sites j and j+1 (mod 3).

Sign notes fixed by the cross-validation (see trispin.conformance for
the audit machinery):

* bosonic A_j, B_j, lambda1..lambda4 hold as stated below to machine
  precision at every order-3 string;
* fermionic mu3, mu4 carry the sign produced by the anticommuting
  exchange loops (the variant with both signs flipped circulates in
  closed-form listings and is kept in the audit tables);
* for purely imaginary tunneling, the antisymmetric two-site exchange
  (sigma^x sigma^y - sigma^y sigma^x) and the three-site mixed-product
  term have the coefficients named tau3 and tau4 here; the fermionic
  tau4 reduces to the standard flux-induced chirality coefficient
  -3|J|^3/U^2 at equal couplings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import pauli
from .fock import Species, Statistics

EPSILON_PATTERNS = (("XYZ", 1.0), ("YZX", 1.0), ("ZXY", 1.0),
                    ("XZY", -1.0), ("ZYX", -1.0), ("YXZ", -1.0))


@dataclass
class CouplingSet:
    """Named effective couplings; per-link entries are 3-tuples."""

    family: str
    values: dict

    def __getitem__(self, name):
        return self.values[name]

    def link(self, name, j):
        value = self.values[name]
        return value[j] if isinstance(value, (tuple, list)) else value

    def to_json_dict(self):
        vals = {}
        for name, value in sorted(self.values.items()):
            if isinstance(value, (tuple, list)):
                vals[name] = [float(x) for x in value]
            else:
                vals[name] = float(value)
        return {"family": self.family, "values": vals}


def _triangle_tunnelings(params):
    ju = [params.j(l, Species.UP) for l in range(3)]
    jd = [params.j(l, Species.DOWN) for l in range(3)]
    return ju, jd


def _require_real(js, what):
    if any(abs(j.imag) > 1e-14 * max(1.0, abs(j)) for j in js):
        raise ValueError(f"{what} formulas require real tunnelings")
    return [j.real for j in js]


def bosonic_couplings(params):
    """Real-tunneling bosonic triangle couplings A_j, B_j, lambda1..4.

    Index convention: link j joins sites j, j+1; B_j collects the two
    links meeting at site j; the lambda4_j pattern sits on sites
    (j, j+1, j+2) with the lone down-species hop on the direct link
    between the outer pair.
    """
    if params.statistics is not Statistics.BOSON:
        raise ValueError("bosonic couplings need bosonic statistics")
    uu, dd, ud = params.u_upup, params.u_dndn, params.u_updn
    for u in (uu, dd, ud):
        if u == 0 or math.isinf(u):
            raise ValueError("collision energies must be finite and nonzero")
    ju, jd = (_require_real(j, "bosonic coupling")
              for j in _triangle_tunnelings(params))
    tu = ju[0] * ju[1] * ju[2]
    td = jd[0] * jd[1] * jd[2]

    def nxt(seq, j, k):
        return seq[(j + k) % 3]

    A = tuple(
        -tu * (3 / (2 * uu ** 2) + 1 / (2 * ud ** 2) + 1 / (ud * uu))
        - ju[j] ** 2 * (1 / uu + 1 / (2 * ud))
        - td * (3 / (2 * dd ** 2) + 1 / (2 * ud ** 2) + 1 / (ud * dd))
        - jd[j] ** 2 * (1 / dd + 1 / (2 * ud))
        for j in range(3))
    B = tuple(
        -(ju[j] ** 2 + nxt(ju, j, 2) ** 2) / uu
        - tu / uu * (1 / ud + 9 / (2 * uu))
        + (jd[j] ** 2 + nxt(jd, j, 2) ** 2) / dd
        + td / dd * (1 / ud + 9 / (2 * dd))
        for j in range(3))
    lam1 = tuple(
        -tu * (9 / (2 * uu ** 2) - 1 / (2 * ud ** 2) - 1 / (ud * uu))
        - ju[j] ** 2 * (1 / uu - 1 / (2 * ud))
        - td * (9 / (2 * dd ** 2) - 1 / (2 * ud ** 2) - 1 / (ud * dd))
        - jd[j] ** 2 * (1 / dd - 1 / (2 * ud))
        for j in range(3))
    lam2 = tuple(
        -jd[j] * nxt(ju, j, 1) * nxt(ju, j, 2)
        * (3 / (2 * ud ** 2) + 1 / (2 * uu ** 2) + 1 / (ud * uu))
        - ju[j] * jd[j] / (2 * ud)
        - ju[j] * nxt(jd, j, 1) * nxt(jd, j, 2)
        * (3 / (2 * ud ** 2) + 1 / (2 * dd ** 2) + 1 / (ud * dd))
        - jd[j] * ju[j] / (2 * ud)
        for j in range(3))
    lam3 = (-tu / uu * (3 / (2 * uu) - 1 / ud)
            + td / dd * (3 / (2 * dd) - 1 / ud))
    lam4 = tuple(
        -ju[j] * nxt(ju, j, 1) * nxt(jd, j, 2) / uu * (1 / (2 * uu) + 1 / ud)
        + jd[j] * nxt(jd, j, 1) * nxt(ju, j, 2) / dd * (1 / (2 * dd) + 1 / ud)
        for j in range(3))
    return CouplingSet("bosonic", {
        "A": A, "B": B, "lambda1": lam1, "lambda2": lam2,
        "lambda3": lam3, "lambda4": lam4,
    })


def fermionic_couplings(params, three_spin_sign=1.0):
    """Fermionic triangle couplings mu1..mu4 (collision channel U_updn).

    ``three_spin_sign=-1`` selects the audit variant with both
    three-spin couplings negated; the default carries the sign that the
    anticommuting exchange loops actually produce.
    """
    if params.statistics is not Statistics.FERMION:
        raise ValueError("fermionic couplings need fermionic statistics")
    u = params.u_updn
    if u == 0 or math.isinf(u):
        raise ValueError("collision energy U must be finite and nonzero")
    ju, jd = (_require_real(j, "fermionic coupling")
              for j in _triangle_tunnelings(params))

    mu1 = tuple(-(ju[j] ** 2 + jd[j] ** 2) / (2 * u) for j in range(3))
    mu2 = tuple(ju[j] * jd[j] / u for j in range(3))
    mu3 = three_spin_sign * (ju[0] * ju[1] * ju[2]
                             - jd[0] * jd[1] * jd[2]) / (2 * u ** 2)
    mu4 = tuple(
        -three_spin_sign * 3 / (2 * u ** 2)
        * (ju[j] * ju[(j + 1) % 3] * jd[(j + 2) % 3]
           - jd[j] * jd[(j + 1) % 3] * ju[(j + 2) % 3])
        for j in range(3))
    return CouplingSet("fermionic", {
        "mu1": mu1, "mu2": mu2, "mu3": mu3, "mu4": mu4,
    })


def _require_imaginary(js, what):
    if any(abs(j.real) > 1e-14 * max(1.0, abs(j)) for j in js):
        raise ValueError(
            f"complex-coupling formulas require purely imaginary J ({what})")


def _uniform(js, what):
    if max(abs(j - js[0]) for j in js) > 1e-14 * max(1.0, abs(js[0])):
        raise ValueError(f"{what} formulas require link-uniform tunnelings")
    return js[0]


def complex_tunneling_couplings(params, statistics=None):
    """Couplings for purely imaginary, link-uniform tunnelings.

    tau3 multiplies the per-link antisymmetric exchange
    (sigma^x_i sigma^y_{i+1} - sigma^y_i sigma^x_{i+1}); tau4 multiplies
    one mixed product sigma_1.(sigma_2 x sigma_3) per triangle.  All
    outputs are real.  The cross-species channel may carry the inf
    sentinel (its inverse enters as zero).
    """
    statistics = statistics or params.statistics
    ju_l, jd_l = _triangle_tunnelings(params)
    _require_imaginary(ju_l + jd_l, "triangle")
    ju = _uniform(ju_l, "complex-coupling")
    jd = _uniform(jd_l, "complex-coupling")
    ju2, jd2 = (ju ** 2).real, (jd ** 2).real     # = -|J|^2
    sym_u = (1j * ju ** 2 * jd).real              # i J_up^2 J_dn
    sym_d = (1j * jd ** 2 * ju).real              # i J_dn^2 J_up
    if statistics is Statistics.FERMION:
        u = params.u_updn
        if u == 0 or math.isinf(u):
            raise ValueError("fermionic complex couplings need finite U_updn")
        return CouplingSet("complex_fermionic", {
            "A": (ju2 + jd2) / (2 * u),
            "B": 0.0,
            "tau1": -(ju2 + jd2) / (2 * u),
            "tau2": -(ju * jd).real / u,
            "tau3": 0.0,
            "tau4": -(3 / (2 * u ** 2)) * (sym_u + sym_d),
        })
    uu, dd, ud = params.u_upup, params.u_dndn, params.u_updn
    for u in (uu, dd):
        if u == 0 or math.isinf(u):
            raise ValueError("bosonic complex couplings need finite "
                             "same-species channels")
    if ud == 0:
        raise ValueError("cross channel must be nonzero")
    inv_ud = 0.0 if math.isinf(ud) else 1.0 / ud

    def w_two(y):
        return 3 * inv_ud ** 2 / 2 + 1 / (2 * y ** 2) + inv_ud / y

    def w_three(y):
        return (1 / y) * (1 / (2 * y) + inv_ud)

    return CouplingSet("complex_bosonic", {
        "A": ju2 / uu + jd2 / dd + (ju2 + jd2) * inv_ud / 2,
        "B": 2 * ju2 / uu - 2 * jd2 / dd,
        "tau1": ju2 / uu + jd2 / dd - (ju2 + jd2) * inv_ud / 2,
        "tau2": (ju * jd).real * inv_ud,
        "tau3": -(w_two(uu) * sym_u - w_two(dd) * sym_d),
        "tau4": -(w_three(uu) * sym_u + w_three(dd) * sym_d),
    })


def chirality_point_params(magnitude, scale=1.0):
    """Parameter point isolating the antisymmetric-exchange term: the
    cross channel is excluded, the same-species channels are opposite
    (-scale, +scale) and the two species tunnel with opposite imaginary
    amplitudes of size ``magnitude``."""
    from .hubbard import HubbardParams
    tun = {}
    for link in range(3):
        tun[(link, Species.UP)] = -1j * magnitude
        tun[(link, Species.DOWN)] = 1j * magnitude
    return HubbardParams(Statistics.BOSON, u_upup=-scale, u_dndn=scale,
                         u_updn=math.inf, tunneling=tun)


def rotated_xy_couplings(j, u, nu3_variant="certified"):
    """Couplings of the x-quantized model produced when only one rotated
    internal state tunnels (rate ``j``) at equal collision energies.

    The string coefficients are B per single-site sigma^x, nu1 per link
    and 3*nu3 on the triple product.  ``nu3_variant="printed"`` selects
    the audit value nu3/3.
    """
    if u == 0:
        raise ValueError("collision energy must be nonzero")
    nu3 = -j ** 3 / (2 * u ** 2)
    if nu3_variant == "printed":
        nu3 = nu3 / 3.0
    elif nu3_variant != "certified":
        raise ValueError(f"unknown nu3 variant {nu3_variant!r}")
    return CouplingSet("rotated_xy", {
        "A": -1.5 * j ** 2 / u - 3 * j ** 3 / u ** 2,
        "B": -2 * j ** 2 / u - 5.5 * j ** 3 / u ** 2,
        "nu1": -0.5 * j ** 2 / u - 3 * j ** 3 / u ** 2,
        "nu3": nu3,
    })


@dataclass
class SpinHamiltonianSpec:
    """Explicit term list: (pattern, first site, coefficient)."""

    n_sites: int
    boundary: str = "periodic"
    terms: list = field(default_factory=list)

    def add(self, pattern, offset, coeff):
        if coeff != 0.0:
            self.terms.append((pattern, offset, coeff))


def build_spin_hamiltonian(spec, return_dropped=False):
    """Dense matrix of a term list under the boundary rule.

    Open-boundary terms that fall off the edge are dropped (and
    returned when ``return_dropped`` is set), never an error.
    """
    n = spec.n_sites
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    dropped = []
    for pattern, offset, coeff in spec.terms:
        sites = [offset + k for k in range(len(pattern))]
        if spec.boundary == "periodic":
            sites = [s % n for s in sites]
        elif any(s >= n or s < 0 for s in sites):
            dropped.append((pattern, offset, coeff))
            continue
        string = pauli.embed(pattern, sites, n)
        out += coeff * pauli.string_matrix(string)
    if return_dropped:
        return out, dropped
    return out


def triangle_spin_spec(couplings):
    """Term list of the triangle model matching a coupling family."""
    spec = SpinHamiltonianSpec(3, "periodic")
    family = couplings.family
    if family == "bosonic":
        for j in range(3):
            spec.add("I", j, couplings.link("A", j))
            spec.add("Z", j, couplings.link("B", j))
            spec.add("ZZ", j, couplings.link("lambda1", j))
            spec.add("XX", j, couplings.link("lambda2", j))
            spec.add("YY", j, couplings.link("lambda2", j))
            spec.add("ZZZ", j, couplings["lambda3"])
            spec.add("XZX", j, couplings.link("lambda4", j))
            spec.add("YZY", j, couplings.link("lambda4", j))
    elif family == "fermionic":
        for j in range(3):
            spec.add("I", j, couplings.link("mu1", j))
            spec.add("ZZ", j, -couplings.link("mu1", j))
            spec.add("XX", j, couplings.link("mu2", j))
            spec.add("YY", j, couplings.link("mu2", j))
            spec.add("Z", j, couplings["mu3"])
            spec.add("ZZZ", j, -couplings["mu3"])
            spec.add("XZX", j, couplings.link("mu4", j))
            spec.add("YZY", j, couplings.link("mu4", j))
    elif family in ("complex_bosonic", "complex_fermionic"):
        for j in range(3):
            spec.add("I", j, couplings["A"])
            spec.add("Z", j, couplings["B"])
            spec.add("ZZ", j, couplings["tau1"])
            spec.add("XX", j, couplings["tau2"])
            spec.add("YY", j, couplings["tau2"])
            spec.add("XY", j, couplings["tau3"])
            spec.add("YX", j, -couplings["tau3"])
        for pattern, sign in EPSILON_PATTERNS:
            spec.add(pattern, 0, sign * couplings["tau4"])
    elif family == "rotated_xy":
        for j in range(3):
            spec.add("I", j, couplings["A"])
            spec.add("X", j, couplings["B"])
            spec.add("XX", j, couplings["nu1"])
            spec.add("XXX", j, couplings["nu3"])
    elif family == "chirality":
        for pattern, sign in EPSILON_PATTERNS:
            spec.add(pattern, 0, sign * couplings["tau4"])
    else:
        raise ValueError(f"unknown coupling family {family!r}")
    return spec


def coupling_matrix(couplings):
    return build_spin_hamiltonian(triangle_spin_spec(couplings))


def expected_string_coefficients(couplings):
    """Exact Pauli-string coefficients implied by a coupling set."""
    from .perturb import pauli_decompose
    return pauli_decompose(coupling_matrix(couplings)).nonzero(0.0)
