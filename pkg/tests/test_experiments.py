import json

import pytest

from specsync import available_scenarios, run_scenario
from specsync.experiments import build_fig6_system


SMALL_BASIS_EQ = {"systems": 3, "n_min": 5, "n_max": 8, "t_final": 5.0, "dt": 0.01}
SMALL_SBM = {"sizes": [60, 240], "seeds": 3, "required": 2}


class TestRegistry:
    def test_lists_all_nine(self):
        assert available_scenarios() == (
            "basis_equivalence",
            "fig2_cluster_sync",
            "fig3_linearization_error",
            "fig4_hierarchical",
            "fig5_qep",
            "fig6_single_mode",
            "phase_lag_ex1",
            "phase_lag_ex2",
            "sbm_limit",
        )

    def test_unknown_scenario_rejected(self):
        with pytest.raises(ValueError, match="unknown scenario"):
            run_scenario("fig7_imaginary")

    def test_unknown_config_key_rejected(self):
        with pytest.raises(ValueError, match="config keys"):
            run_scenario("basis_equivalence", config={"sytems": 1})


class TestDeterminism:
    def test_same_seed_same_metrics(self):
        a = run_scenario("basis_equivalence", config=SMALL_BASIS_EQ, seed=3)
        b = run_scenario("basis_equivalence", config=SMALL_BASIS_EQ, seed=3)
        assert a.metrics == b.metrics
        assert a.passed and b.passed

    def test_result_json_written(self, tmp_path):
        res = run_scenario("basis_equivalence", config=SMALL_BASIS_EQ, seed=1, out_dir=tmp_path)
        payload = json.loads((tmp_path / "basis_equivalence" / "result.json").read_text())
        assert payload["passed"] == res.passed
        assert payload["seed"] == 1
        assert (tmp_path / "basis_equivalence" / "discrepancies.csv").exists()


class TestSmallRuns:
    def test_small_sbm_passes(self):
        res = run_scenario("sbm_limit", config=SMALL_SBM, seed=2)
        assert res.passed, [a.detail for a in res.assertions if not a.passed]

    def test_fig2_artifacts(self, tmp_path):
        res = run_scenario(
            "fig2_cluster_sync", config={"steps": 2000}, seed=0, out_dir=tmp_path
        )
        assert res.passed, [a.detail for a in res.assertions if not a.passed]
        assert (tmp_path / "fig2_cluster_sync" / "coefficients.csv").exists()
        assert (tmp_path / "fig2_cluster_sync" / "phases.csv").exists()

    def test_assertions_reported_not_raised(self):
        # An impossible tolerance turns into a reported failure.
        res = run_scenario("basis_equivalence", config=dict(SMALL_BASIS_EQ, tol=1e-300), seed=0)
        assert not res.passed
        assert any(not a.passed for a in res.assertions)


class TestFig6Construction:
    def test_discriminant_pattern(self):
        g, p, basis, system, r1, r2 = build_fig6_system(seed=0)
        from specsync import discriminant_report

        entries = {e.mode: e for e in discriminant_report(system, basis)}
        assert entries[r1].delta < 0
        assert all(e.delta > 0 for m, e in entries.items() if m != r1)
        assert g.n == 6 and p.k == 3
