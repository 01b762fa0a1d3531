import math

import pytest

from trispin.conformance import (formula_tolerance, oracle_tolerance,
                                 run_triangle_draw, run_verification,
                                 scaling_ladder)
from trispin.fock import Species, Statistics
from trispin.hubbard import (HubbardParams, graph_from_json, graph_to_json,
                             make_zigzag, params_from_json, params_to_json)


def _uniform(statistics, j):
    return HubbardParams.uniform(
        statistics, 3, j, 0.5 * j, u_updn=1.0,
        u_upup=None if statistics is Statistics.FERMION else 1.0,
        u_dndn=None if statistics is Statistics.FERMION else 1.0)


def test_regime_guards():
    with pytest.raises(ValueError, match="hard cap"):
        run_triangle_draw(_uniform(Statistics.FERMION, 0.55))
    draw = run_triangle_draw(_uniform(Statistics.FERMION, 0.4))
    assert any("perturbative-regime" in w for w in draw.warnings)


def test_tolerances_scale_with_fourth_power():
    assert formula_tolerance(0.1, 1.0) == pytest.approx(1e-6)
    assert formula_tolerance(1e-4, 1.0) == 1e-12
    assert oracle_tolerance(0.05, 2.0) == pytest.approx(200 * 0.05 ** 4 * 2)


def test_scaling_ladder_sections():
    section = scaling_ladder(Statistics.BOSON, (0.06, 0.03))
    assert section["fitted_power"] >= 0.9
    assert all(r["condition_number"] < 1e3 for r in section["rows"])


def test_full_report_structure():
    report = run_verification(n_draws=1, seed=11)
    assert report["ok"] is True
    assert set(report["scaling"]) == {"boson", "fermion"}
    assert len(report["covariance"]) == 10
    assert len(report["covariance_unequal_u"]) == 4
    assert max(d["residual"] for d in report["covariance"]) <= 1e-11
    # broken-symmetry residuals are reported as data
    assert max(d["residual"] for d in report["covariance_unequal_u"]) > 1e-9


def test_graph_round_trip():
    graph = make_zigzag(5)
    clone = graph_from_json(graph_to_json(graph))
    assert clone.n_sites == graph.n_sites
    assert clone.edges == graph.edges
    assert clone.geometry == graph.geometry


def test_params_round_trip():
    tun = {(0, Species.UP): 0.1 + 0.02j, (2, Species.DOWN): -0.05j}
    params = HubbardParams(Statistics.BOSON, u_upup=1.2, u_dndn=math.inf,
                           u_updn=1.0, tunneling=tun)
    clone = params_from_json(params_to_json(params))
    assert clone.statistics is Statistics.BOSON
    assert clone.u_upup == params.u_upup
    assert math.isinf(clone.u_dndn)
    assert clone.tunneling == {k: complex(v) for k, v in tun.items()}
