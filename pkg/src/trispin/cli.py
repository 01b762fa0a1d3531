"""Batch front-end: coupling evaluation, parameter scans, cross-oracle
verification and spin-model diagnostics.

All physical quantities are expressed in units of a declared energy
scale (by default the cross-species collision energy).  Scans are
dispatched to a worker pool capped by TRISPIN_THREADS; output ordering
is row-major over the grid regardless of scheduling, and floats are
printed with 17 significant digits so identical configurations yield
byte-identical files.

Exit codes: 0 success, 1 hard invariant failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import chainlab, closedform, conformance, pauli
from .fock import Species, Statistics
from .hubbard import HubbardParams

SOFT_CAP = conformance.SOFT_REGIME_LIMIT
HARD_CAP = conformance.HARD_REGIME_LIMIT


class UsageError(Exception):
    pass


def _fmt(x):
    return f"{x:.17g}"


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config: {exc}")


def _setting(args, config, name, default=None, required=False):
    value = getattr(args, name, None)
    if value is None:
        value = config.get(name, default)
    if value is None and required:
        raise UsageError(f"missing required setting --{name.replace('_', '-')}")
    return value


def _triangle_params(family, j_up, j_dn, u_upup, u_dndn, u_updn):
    if family == "fermionic" or family == "complex_fermionic":
        statistics = Statistics.FERMION
        return HubbardParams.uniform(statistics, 3, j_up, j_dn,
                                     u_updn=u_updn)
    statistics = Statistics.BOSON
    if u_upup is None or u_dndn is None:
        raise UsageError("bosonic families need --uuu and --udd")
    tun = {}
    for link in range(3):
        tun[(link, Species.UP)] = complex(j_up)
        tun[(link, Species.DOWN)] = complex(j_dn)
    return HubbardParams(statistics, u_upup=u_upup, u_dndn=u_dndn,
                         u_updn=u_updn, tunneling=tun)


def _couplings_for(family, j_up, j_dn, u_upup, u_dndn, u_updn):
    if family in ("complex_bosonic", "complex_fermionic"):
        j_up, j_dn = 1j * j_up, 1j * j_dn
    params = _triangle_params(family, j_up, j_dn, u_upup, u_dndn, u_updn)
    if family == "bosonic":
        return closedform.bosonic_couplings(params)
    if family == "fermionic":
        return closedform.fermionic_couplings(params)
    if family in ("complex_bosonic", "complex_fermionic"):
        return closedform.complex_tunneling_couplings(params)
    if family == "rotated_xy":
        return closedform.rotated_xy_couplings(j_up, u_updn)
    raise UsageError(f"unknown family {family!r}")


def cmd_couplings(args, config):
    family = _setting(args, config, "family", required=True)
    u_updn = _setting(args, config, "uud", required=True)
    j_up = _setting(args, config, "j_up", required=True)
    j_dn = _setting(args, config, "j_dn", 0.0)
    u_upup = _setting(args, config, "uuu")
    u_dndn = _setting(args, config, "udd")
    couplings = _couplings_for(family, float(j_up), float(j_dn),
                               None if u_upup is None else float(u_upup),
                               None if u_dndn is None else float(u_dndn),
                               float(u_updn))
    json.dump(couplings.to_json_dict(), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


SCAN_COLUMNS = {
    "bosonic": ("A", "B", "lambda1", "lambda2", "lambda3", "lambda4"),
    "fermionic": ("mu1", "mu2", "mu3", "mu4"),
    "complex_bosonic": ("A", "B", "tau1", "tau2", "tau3", "tau4"),
    "complex_fermionic": ("A", "B", "tau1", "tau2", "tau3", "tau4"),
}


def _scan_row(task):
    family, j_up, j_dn, u_upup, u_dndn, u_updn = task
    couplings = _couplings_for(family, j_up, j_dn, u_upup, u_dndn, u_updn)
    values = []
    for name in SCAN_COLUMNS[family]:
        value = couplings[name]
        values.append(value[0] if isinstance(value, tuple) else value)
    return (j_up, j_dn, *values)


def _grid(config, args, axis):
    lo = float(_setting(args, config, f"{axis}_min", 0.0))
    hi = float(_setting(args, config, f"{axis}_max", required=True))
    steps = int(_setting(args, config, f"{axis}_steps", required=True))
    return [lo + (hi - lo) * k / (steps - 1) if steps > 1 else lo
            for k in range(steps)]


def cmd_scan(args, config):
    family = _setting(args, config, "family", required=True)
    if family not in SCAN_COLUMNS:
        raise UsageError(f"unknown scan family {family!r}")
    u_updn = float(_setting(args, config, "uud", 1.0))
    u_upup = _setting(args, config, "uuu")
    u_dndn = _setting(args, config, "udd")
    u_upup = float(u_upup) if u_upup is not None else None
    u_dndn = float(u_dndn) if u_dndn is not None else None
    ups = _grid(config, args, "j_up")
    dns = _grid(config, args, "j_dn")
    scale = min(abs(u) for u in (u_upup, u_dndn, u_updn) if u)
    peak = max(max(map(abs, ups)), max(map(abs, dns))) / scale
    if peak > HARD_CAP:
        raise UsageError(
            f"grid reaches J/U = {peak:.3g}, beyond the hard cap {HARD_CAP}")
    if peak > SOFT_CAP:
        print(f"# warning: J/U up to {peak:.3g} strains the perturbative "
              "regime", file=sys.stderr)
    tasks = [(family, ju, jd, u_upup, u_dndn, u_updn)
             for ju in ups for jd in dns]
    workers = int(os.environ.get("TRISPIN_THREADS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_row, tasks, chunksize=64))
    else:
        rows = [_scan_row(t) for t in tasks]
    out = sys.stdout
    out.write("j_up,j_dn," + ",".join(SCAN_COLUMNS[family]) + "\n")
    for row in rows:
        out.write(",".join(_fmt(x) for x in row) + "\n")
    return 0


def cmd_verify(args, config):
    n_draws = int(_setting(args, config, "draws", 20))
    seed = int(_setting(args, config, "seed", 2024))
    j_over_u = float(_setting(args, config, "j_over_u", 0.05))
    report = conformance.run_verification(n_draws=n_draws, seed=seed,
                                          j_over_u=j_over_u)
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0 if report["ok"] else 1


def cmd_chain(args, config):
    n = int(_setting(args, config, "sites", 12))
    lo = float(_setting(args, config, "bx_min", 0.5))
    hi = float(_setting(args, config, "bx_max", 1.5))
    step = float(_setting(args, config, "bx_step", 0.05))
    count = int(round((hi - lo) / step)) + 1
    grid = [lo + k * step for k in range(count)]
    scan = chainlab.duality_scan(np.asarray(grid), n)
    out = sys.stdout
    out.write("parameter,E0,E1,gap,degeneracy0\n")
    for i, bx in enumerate(scan.bx_values):
        out.write(",".join([_fmt(bx), _fmt(scan.e0[i]), _fmt(scan.e1[i]),
                            _fmt(scan.gap[i]),
                            str(int(scan.ground_degeneracy[i]))]) + "\n")
    summary_path = _setting(args, config, "summary")
    if summary_path:
        summary = {
            "argmin_bx": scan.argmin_bx,
            "duality_defect": [float(d) for d in scan.duality_defect],
        }
        with open(summary_path, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
    return 0


def cmd_chiral(args, config):
    magnitude = float(_setting(args, config, "j_mag", 0.05))
    scale = float(_setting(args, config, "u", 1.0))
    from .hubbard import build_h0, build_v, hilbert_basis, make_triangle, \
        projector_single_occupancy
    from .perturb import h_eff_up_to_third, pauli_decompose
    params = closedform.chirality_point_params(magnitude, scale)
    graph = make_triangle()
    basis = hilbert_basis(graph, params)
    h0 = build_h0(basis, params)
    v = build_v(basis, graph, params)
    m = projector_single_occupancy(basis)
    h = h_eff_up_to_third(h0, v, m)
    dec = pauli_decompose(h)
    matrix = h.matrix.copy()
    zeeman = {}
    for site in range(3):
        string = "".join("Z" if k == site else "I" for k in range(3))
        zeeman[string] = dec[string]
        matrix -= dec[string] * pauli.string_matrix(string)
    report = chainlab.diagonalize(matrix, k=2)
    tau4 = magnitude ** 3 / scale ** 2
    ground = report.eigenvectors
    overlaps = {}
    for sector, positions in (("+1/2", (1, 2, 4)), ("-1/2", (6, 5, 3))):
        best = None
        for tag, omega in (("omega", np.exp(2j * np.pi / 3)),
                           ("conj_omega", np.exp(-2j * np.pi / 3))):
            vec = chainlab.circulating_state(positions, omega)
            value = float(np.linalg.norm(ground.conj().T @ vec))
            if best is None or value > best[1]:
                best = (tag, value)
        overlaps[sector] = {"omega": best[0], "overlap": best[1]}
    json.dump({
        "tau4": tau4,
        "eigenvalues": [float(e) for e in report.eigenvalues],
        "eigenvalues_over_tau4": [float(e / tau4) for e in report.eigenvalues],
        "compensating_field": {k: float(v.real) for k, v in zeeman.items()},
        "ground_overlaps": overlaps,
    }, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="trispin",
        description="Effective spin models from two-species Hubbard "
                    "dynamics on triangles and zig-zag chains.")
    parser.add_argument("--config", help="JSON configuration document")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("couplings", help="evaluate a coupling family")
    p.add_argument("--family")
    p.add_argument("--j-up", dest="j_up", type=float)
    p.add_argument("--j-dn", dest="j_dn", type=float)
    p.add_argument("--u", dest="uud", type=float)
    p.add_argument("--uuu", type=float)
    p.add_argument("--udd", type=float)
    p.add_argument("--uud", dest="uud", type=float)
    p.set_defaults(func=cmd_couplings)

    p = sub.add_parser("scan", help="coupling surfaces over a J grid")
    p.add_argument("--family")
    for axis in ("j-up", "j-dn"):
        key = axis.replace("-", "_")
        p.add_argument(f"--{axis}-min", dest=f"{key}_min", type=float)
        p.add_argument(f"--{axis}-max", dest=f"{key}_max", type=float)
        p.add_argument(f"--{axis}-steps", dest=f"{key}_steps", type=int)
    p.add_argument("--u", dest="uud", type=float)
    p.add_argument("--uuu", type=float)
    p.add_argument("--udd", type=float)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="cross-oracle conformance report")
    p.add_argument("--draws", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--j-over-u", dest="j_over_u", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("chain", help="duality gap scan of the three-spin chain")
    p.add_argument("--sites", type=int)
    p.add_argument("--bx-min", dest="bx_min", type=float)
    p.add_argument("--bx-max", dest="bx_max", type=float)
    p.add_argument("--bx-step", dest="bx_step", type=float)
    p.add_argument("--summary")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("chiral", help="chirality-point spectrum and overlaps")
    p.add_argument("--j-mag", dest="j_mag", type=float)
    p.add_argument("--u", dest="u", type=float)
    p.set_defaults(func=cmd_chiral)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
