import dataclasses
import math

import pytest

from anssns.errors import ConfigurationError
from anssns.harness import (
    DESK_REPLICATES,
    DESK_STEPS,
    PAPER_REPLICATES,
    PAPER_STEPS,
    coverage_table,
    emit_experiment_configs,
    experiment_spec,
    run_experiment,
)
from anssns.model import LogNormalMeanVar, Uniform


def tiny_spec(**kw):
    """Experiment 1 model 4 shrunk to a seconds-scale smoke configuration."""
    spec = experiment_spec(1, models=[4], master_seed=kw.pop("master_seed", 1))
    return dataclasses.replace(spec, replicates=2, steps=500, burn_in=200,
                               thin=25, **kw)


class TestExperimentGrids:
    def test_exp1_rows_match_table_order(self):
        spec = experiment_spec(1)
        grid = [(r.lam, r.alpha) for r in spec.models]
        assert grid == [(100, 5), (200, 5), (100, 10), (200, 10),
                        (100, 5), (200, 5), (100, 10), (200, 10)]
        row4 = spec.models[3]
        assert row4.truth.values["sigma_x"] == pytest.approx(0.02 / 0.7)
        assert row4.truth.values["sigma_y"] == pytest.approx(0.7 * 0.02)
        assert row4.truth.values["theta_0"] == pytest.approx(math.pi / 4)
        assert row4.truth_targets["ratio"] == pytest.approx(1 / 0.49, abs=5e-3)
        assert row4.kappa == pytest.approx(20.0)

    def test_exp1_proposal_sds_by_clustering_strength(self):
        spec = experiment_spec(1)
        strong = {p.name: p.proposal_sd for p in spec.models[0].space.params}
        weak = {p.name: p.proposal_sd for p in spec.models[4].space.params}
        assert strong == {"alpha": 4.0, "sigma_x": 0.01, "sigma_y": 0.005,
                          "theta_0": 0.2}
        assert weak == {"alpha": 4.0, "sigma_x": 0.02, "sigma_y": 0.010,
                        "theta_0": 0.2}
        assert spec.models[0].move_sd == 0.025

    def test_exp1_uniform_priors_and_initial_state(self):
        row = experiment_spec(1).models[0]
        by_name = {p.name: p for p in row.space.params}
        assert by_name["alpha"].prior == Uniform(1, 30)
        assert by_name["sigma_x"].prior == Uniform(0.002, 0.2)
        assert by_name["theta_0"].prior == Uniform(0, math.pi / 2)
        assert by_name["alpha"].initial == 7.0
        assert by_name["sigma_x"].initial == 0.05
        assert by_name["sigma_y"].initial == 0.01
        assert by_name["theta_0"].initial == pytest.approx(math.pi / 3)

    def test_exp1_informative_priors(self):
        spec = experiment_spec(1, priors="informative")
        strong = {p.name: p.prior for p in spec.models[0].space.params}
        weak = {p.name: p.prior for p in spec.models[4].space.params}
        assert strong["sigma_x"] == LogNormalMeanVar(0.03, 4e-5)
        assert strong["sigma_y"] == LogNormalMeanVar(0.01, 4e-5)
        assert weak["sigma_x"] == LogNormalMeanVar(0.06, 8e-5)
        assert weak["sigma_y"] == LogNormalMeanVar(0.03, 8e-5)
        assert strong["alpha"] == Uniform(1, 30)

    def test_exp2_isotropic_truth(self):
        row = experiment_spec(2).models[3]
        assert row.truth.values["sigma_x"] == row.truth.values["sigma_y"] == 0.02
        assert row.truth_targets["ratio"] == 1.0
        assert "theta_0" not in row.reported

    def test_exp3_grid_and_tuning(self):
        spec = experiment_spec(3)
        assert [(r.lam, r.alpha, r.truth.values["theta_1"]) for r in spec.models] == [
            (200, 5, 0.5), (200, 10, 0.5), (200, 5, 1.0), (200, 10, 1.0)]
        row = spec.models[0]
        assert row.truth.values["sigma_x"] == pytest.approx(0.04)
        assert row.truth.values["sigma_y"] == pytest.approx(0.01)
        assert row.truth_targets["ratio"] == pytest.approx(4.0)
        by_name = {p.name: p for p in row.space.params}
        assert by_name["alpha"].proposal_sd == 3.0
        assert by_name["sigma_x"].proposal_sd == 0.01
        assert by_name["sigma_y"].proposal_sd == 0.002
        assert by_name["theta_0"].proposal_sd == by_name["theta_1"].proposal_sd == 0.1
        assert by_name["theta_1"].prior == Uniform(-1, 2)
        assert by_name["theta_1"].initial == 0.75
        assert row.move_sd == 0.25
        assert spec.test == "circularity+direction"

    def test_exp4_grid_and_parameterization(self):
        spec = experiment_spec(4)
        assert [(r.alpha, r.truth.values["sigma_x_1"]) for r in spec.models] == [
            (5, 1.0), (10, 1.0), (5, 1.5), (10, 1.5)]
        row = spec.models[0]
        assert row.truth.values["sigma_x_0"] == pytest.approx(math.log(0.01))
        by_name = {p.name: p for p in row.space.params}
        assert by_name["sigma_x_0"].prior == Uniform(math.log(0.002), math.log(0.2))
        assert by_name["sigma_x_1"].prior == Uniform(-5, 5)
        assert by_name["sigma_x_0"].initial == pytest.approx(math.log(0.015))
        assert by_name["sigma_x_1"].initial == 1.25
        assert by_name["theta_0"].initial == 0.0
        assert all(by_name[k].proposal_sd == 0.1 for k in
                   ("sigma_x_0", "sigma_x_1", "sigma_y_0", "sigma_y_1", "theta_0"))
        assert by_name["alpha"].proposal_sd == 3.0
        assert spec.test == "envelope"
        # truth field is circular everywhere
        f = row.truth.field
        assert f.sigma_x_at(0.7, 0.2) == pytest.approx(f.sigma_y_at(0.7, 0.2))
        assert f.sigma_x_at(1.0, 0.0) == pytest.approx(0.01 * math.e)

    def test_scales(self):
        desk = experiment_spec(1)
        assert (desk.replicates, desk.steps) == (DESK_REPLICATES, DESK_STEPS)
        paper = experiment_spec(1, paper=True)
        assert (paper.replicates, paper.steps, paper.burn_in, paper.thin) == (
            PAPER_REPLICATES, PAPER_STEPS, 25_000, 100)

    def test_model_subsetting(self):
        spec = experiment_spec(1, models=[4, 2])
        assert [r.index for r in spec.models] == [2, 4]
        with pytest.raises(ConfigurationError):
            experiment_spec(1, models=[9])

    def test_informative_only_for_experiment_1(self):
        with pytest.raises(ConfigurationError):
            experiment_spec(2, priors="informative")

    def test_unknown_experiment(self):
        with pytest.raises(ConfigurationError):
            experiment_spec(5)


class TestConfigEmission:
    @pytest.mark.parametrize("exp_id", [1, 2, 3, 4])
    def test_regeneration_is_byte_stable(self, exp_id, tmp_path):
        for paper in (False, True):
            sub_a = tmp_path / f"a{paper}"
            sub_b = tmp_path / f"b{paper}"
            pa = emit_experiment_configs(experiment_spec(exp_id, paper=paper), sub_a)
            pb = emit_experiment_configs(experiment_spec(exp_id, paper=paper), sub_b)
            assert [p.name for p in pa] == [p.name for p in pb]
            for x, y in zip(pa, pb):
                assert x.read_bytes() == y.read_bytes()

    def test_emitted_configs_load(self, tmp_path):
        from anssns.config import load_config

        for path in emit_experiment_configs(experiment_spec(3), tmp_path):
            cfg = load_config(path)
            assert cfg.truth is not None
            assert cfg.truth.kappa * cfg.truth.alpha == pytest.approx(200.0)


@pytest.fixture(scope="module")
def tiny_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("exp")
    return run_experiment(tiny_spec(), out_dir=out), out


class TestRunExperiment:
    def test_every_replicate_accounted_once(self, tiny_report):
        report, _ = tiny_report
        keys = [(r.model, r.replicate) for r in report.results]
        assert keys == [(4, 0), (4, 1)]
        assert not report.failures()

    def test_rejection_fractions_sum_to_one(self, tiny_report):
        report, _ = tiny_report
        frac = report.rejection_fraction(4)
        assert 0.0 <= frac <= 1.0
        assert frac + (1 - frac) == 1.0

    def test_coverage_table_rows(self, tiny_report):
        report, _ = tiny_report
        rows = coverage_table(report)
        assert len(rows) == 1
        row = rows[0]
        assert row["model"] == 4
        for name in ("alpha", "sigma_x", "sigma_y", "theta_0", "ratio"):
            assert 0.0 <= row[name] <= 1.0
            assert (row[name] * report.spec.replicates) == pytest.approx(
                round(row[name] * report.spec.replicates))

    def test_artifacts_layout(self, tiny_report):
        _, out = tiny_report
        assert (out / "report.txt").exists()
        assert (out / "coverage.csv").exists()
        assert (out / "exp1_model4.cfg").exists()
        for rep in (0, 1):
            d = out / "model4" / f"rep{rep}"
            assert (d / "pattern.csv").exists()
            assert (d / "truth.txt").exists()
            assert (d / "samples.csv").exists()

    def test_deterministic_report(self):
        a = run_experiment(tiny_spec())
        b = run_experiment(tiny_spec())
        assert a.render_text() == b.render_text()

    def test_worker_count_does_not_change_results(self):
        seq = run_experiment(tiny_spec(master_seed=3))
        par = run_experiment(tiny_spec(master_seed=3), workers=2)
        assert seq.render_text() == par.render_text()

    def test_failures_are_collected_not_raised(self):
        spec = tiny_spec()
        dead_row = dataclasses.replace(spec.models[0], lam=1e-8)
        spec = dataclasses.replace(spec, models=(dead_row,))
        report = run_experiment(spec)
        assert len(report.failures()) == spec.replicates
        for r in report.failures():
            assert "empty pattern" in r.error
        with pytest.raises(ConfigurationError):
            report.rejection_fraction(4)

    def test_exp3_direction_fraction_present(self):
        spec = experiment_spec(3, models=[1], master_seed=2)
        spec = dataclasses.replace(spec, replicates=1, steps=400, burn_in=100,
                                   thin=20)
        report = run_experiment(spec)
        assert report.results[0].direction_reject is not None
        assert "direction rejection fraction" in report.render_text()
