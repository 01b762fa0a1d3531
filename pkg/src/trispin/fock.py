"""Occupation-number states and ladder operators for two atomic species.

Sites are labeled 0..n_sites-1 and each site carries two internal modes,
one per species.  A state stores the flat occupation tuple
``(n_up[0], n_dn[0], n_up[1], n_dn[1], ...)`` so that the global mode
index of (site, species) is ``2*site + species``.  That flat order is
also the fermionic sign convention: the amplitude of a ladder operator
on mode m picks up (-1)**(number of occupied modes preceding m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class Species(Enum):
    UP = 0
    DOWN = 1


class Statistics(Enum):
    BOSON = "boson"
    FERMION = "fermion"


CREATE = "create"
ANNIHILATE = "annihilate"


@dataclass(frozen=True)
class FockState:
    """Occupation numbers of both species on every site.

    ``occ`` is the flat tuple (up0, dn0, up1, dn1, ...); fermionic states
    keep every entry at 0 or 1.
    """

    occ: tuple
    statistics: Statistics

    @property
    def n_sites(self):
        return len(self.occ) // 2

    def occupation(self, site, species):
        return self.occ[2 * site + species.value]

    def site_occupations(self, site):
        return self.occ[2 * site], self.occ[2 * site + 1]

    @property
    def n_up(self):
        return sum(self.occ[0::2])

    @property
    def n_down(self):
        return sum(self.occ[1::2])

    def __str__(self):
        sites = [f"({self.occ[2*i]},{self.occ[2*i+1]})" for i in range(self.n_sites)]
        return "|" + " ".join(sites) + ">"


@dataclass(frozen=True)
class SectorSpec:
    """Conserved-number sector selecting a finite block of Fock space.

    Either fix (n_up, n_down) or the total atom number.  ``site_cap``
    bounds the per-site per-species occupation (fermions are capped at 1
    regardless).  ``forbid_cross_occupancy`` drops every configuration
    where some site hosts both species at once; this realizes an
    infinite cross-species collision energy as an exact exclusion.
    """

    n_up: int | None = None
    n_down: int | None = None
    n_total: int | None = None
    site_cap: int | None = None
    forbid_cross_occupancy: bool = False
    forbid_same_species_doubles: bool = False

    def __post_init__(self):
        fixed_pair = self.n_up is not None and self.n_down is not None
        if not fixed_pair and self.n_total is None:
            raise ValueError("sector must fix (n_up, n_down) or n_total")
        if fixed_pair and self.n_total is not None:
            if self.n_up + self.n_down != self.n_total:
                raise ValueError("inconsistent sector: n_up + n_down != n_total")
        for value in (self.n_up, self.n_down, self.n_total):
            if value is not None and value < 0:
                raise ValueError("negative atom number in sector")
        if self.site_cap is not None and self.site_cap < 0:
            raise ValueError("negative occupation cutoff")

    @property
    def total(self):
        if self.n_total is not None:
            return self.n_total
        return self.n_up + self.n_down


@dataclass
class Basis:
    """Ordered sector basis with an exact state -> position map."""

    states: list
    statistics: Statistics
    n_sites: int
    sector: SectorSpec
    index: dict = field(repr=False, default=None)

    def __post_init__(self):
        if self.index is None:
            self.index = {state.occ: k for k, state in enumerate(self.states)}

    def __len__(self):
        return len(self.states)

    @property
    def dim(self):
        return len(self.states)

    def position(self, state):
        return self.index[state.occ]


def enumerate_basis(n_sites, statistics, sector):
    """Enumerate all states of a sector in lexicographic occupation order.

    Raises ``ValueError("empty basis")`` when the sector admits no
    states (e.g. more fermions than available modes).
    """
    if n_sites < 1:
        raise ValueError("need at least one site")
    total = sector.total
    cap = 1 if statistics is Statistics.FERMION else (
        sector.site_cap if sector.site_cap is not None else total)
    n_modes = 2 * n_sites

    states = []
    occ = [0] * n_modes

    def remaining_possible(mode, need):
        # crude budget bound: every remaining mode can hold up to `cap`
        return need <= cap * (n_modes - mode)

    def emit():
        state = FockState(tuple(occ), statistics)
        if sector.n_up is not None:
            if state.n_up != sector.n_up or state.n_down != sector.n_down:
                return
        if sector.forbid_cross_occupancy:
            for site in range(n_sites):
                if occ[2 * site] > 0 and occ[2 * site + 1] > 0:
                    return
        if sector.forbid_same_species_doubles:
            if any(n > 1 for n in occ):
                return
        states.append(state)

    def recurse(mode, placed):
        if mode == n_modes:
            if placed == total:
                emit()
            return
        need = total - placed
        if not remaining_possible(mode, need):
            return
        for n in range(0, min(cap, need) + 1):
            occ[mode] = n
            recurse(mode + 1, placed + n)
        occ[mode] = 0

    recurse(0, 0)
    if not states:
        raise ValueError("empty basis")
    return Basis(states=states, statistics=statistics, n_sites=n_sites,
                 sector=sector)


def _fermion_sign(occ, mode, mode_order):
    if mode_order == "standard":
        preceding = sum(occ[:mode])
    elif mode_order == "reversed":
        preceding = sum(occ[mode + 1:])
    else:
        raise ValueError(f"unknown mode order {mode_order!r}")
    return -1.0 if preceding % 2 else 1.0


def apply_ladder(state, site, species, kind, mode_order="standard"):
    """Apply a creation or annihilation operator to one mode.

    Returns ``(new_state, amplitude)`` or ``None`` when the result
    vanishes (annihilating an empty mode, creating on an occupied
    fermionic mode).  Bosonic amplitudes are sqrt(n+1) / sqrt(n);
    fermionic amplitudes are +-1 per the global mode-ordering sign.
    """
    if not 0 <= site < state.n_sites:
        raise ValueError(f"site {site} out of range")
    mode = 2 * site + species.value
    n = state.occ[mode]
    occ = list(state.occ)
    if kind == CREATE:
        if state.statistics is Statistics.FERMION:
            if n == 1:
                return None
            occ[mode] = 1
            amp = _fermion_sign(state.occ, mode, mode_order)
        else:
            occ[mode] = n + 1
            amp = math.sqrt(n + 1)
    elif kind == ANNIHILATE:
        if n == 0:
            return None
        occ[mode] = n - 1
        if state.statistics is Statistics.FERMION:
            amp = _fermion_sign(state.occ, mode, mode_order)
        else:
            amp = math.sqrt(n)
    else:
        raise ValueError(f"unknown ladder kind {kind!r}")
    return FockState(tuple(occ), state.statistics), amp


def transfer(state, to_site, to_species, from_site, from_species,
             mode_order="standard"):
    """Move one atom between modes: create(to) after annihilate(from).

    The composition order matters for fermionic signs and matches the
    normal-ordered bilinear a(to)^dag a(from).
    """
    step = apply_ladder(state, from_site, from_species, ANNIHILATE, mode_order)
    if step is None:
        return None
    mid, amp1 = step
    step = apply_ladder(mid, to_site, to_species, CREATE, mode_order)
    if step is None:
        return None
    out, amp2 = step
    return out, amp1 * amp2


def hop(state, from_site, to_site, species, mode_order="standard"):
    """Species-preserving tunneling move between two sites."""
    if from_site == to_site:
        raise ValueError("hop requires distinct sites")
    return transfer(state, to_site, species, from_site, species, mode_order)
