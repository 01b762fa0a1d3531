"""Pauli-string helpers shared by the spin-model builders.

Strings are written with site 0 leftmost; the matching spin basis index
is big-endian, bit 0 of the leftmost site, with 0 = up and 1 = down.
"""

from __future__ import annotations

from itertools import product

import numpy as np

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# permutation/phase form: letter -> (bit flip, phase(bit))
_ACTION = {
    "I": (0, (1.0, 1.0)),
    "X": (1, (1.0, 1.0)),
    "Y": (1, (1j, -1j)),
    "Z": (0, (1.0, -1.0)),
}


def string_matrix(string):
    """Dense matrix of an n-letter Pauli string."""
    out = np.array([[1.0 + 0j]])
    for letter in string:
        out = np.kron(out, PAULI[letter])
    return out


def embed(pattern, sites, n_sites):
    """Pauli string with ``pattern[k]`` placed on ``sites[k]``."""
    letters = ["I"] * n_sites
    for letter, site in zip(pattern, sites):
        if letters[site] != "I":
            raise ValueError("pattern places two letters on one site")
        letters[site] = letter
    return "".join(letters)


def all_strings(n_sites):
    for letters in product("IXYZ", repeat=n_sites):
        yield "".join(letters)


def string_action(string):
    """Return (flip_mask, phase_fn) so that P|j> = phase(j)|j ^ mask>."""
    n = len(string)
    mask = 0
    flips = []
    for site, letter in enumerate(string):
        bit = n - 1 - site
        flip, phases = _ACTION[letter]
        if flip:
            mask |= 1 << bit
        flips.append((bit, phases))

    def phase(j):
        p = 1.0 + 0j
        for bit, phases in flips:
            p *= phases[(j >> bit) & 1]
        return p

    return mask, phase


def string_trace_with(string, matrix):
    """Tr(P M) evaluated without forming the string matrix."""
    mask, phase = string_action(string)
    dim = matrix.shape[0]
    # sum_j <j|P M|j> = sum_j phase(j') M[j', j] with j' = j ^ mask
    total = 0.0 + 0j
    for j in range(dim):
        jp = j ^ mask
        total += phase(jp) * matrix[jp, j]
    return total
