import math

import pytest

from anssns.config import emit_config, load_config, parse_prior
from anssns.errors import ConfigurationError
from anssns.model import LogNormalMeanVar, LogUniform, Uniform
from helpers import experiment1_space

BASE = """\
[model]
window = 0 1 0 1
window_ext = -0.2 1.2 -0.2 1.2
theta_covariates = x

[priors]
alpha = uniform 1 30
sigma_x = uniform 0.002 0.2
sigma_y = uniform 0.002 0.2
theta_0 = uniform 0 1.5707963267948966
theta_1 = uniform -1 2

[proposals]
alpha = 3
sigma_x = 0.01
sigma_y = 0.002
theta_0 = 0.1
theta_1 = 0.1
move = 0.25

[initial]
alpha = 7
sigma_x = 0.05
sigma_y = 0.01
theta_0 = 1.0471975511965976
theta_1 = 0.75

[schedule]
steps = 2000
burn_in = 1000
thin = 10

[seeds]
seed = 3

[truth]
alpha = 10
lambda = 200
sigma_x = 0.04
sigma_y = 0.01
theta_0 = 0.7853981633974483
theta_1 = 0.5
"""


def write(tmp_path, text):
    p = tmp_path / "model.cfg"
    p.write_text(text)
    return p


class TestParsePrior:
    def test_families(self):
        assert parse_prior("uniform 1 30") == Uniform(1, 30)
        assert parse_prior("lognormal 0.03 4e-5") == LogNormalMeanVar(0.03, 4e-5)
        assert parse_prior("loguniform 0.002 0.2") == LogUniform(0.002, 0.2)

    def test_errors(self):
        with pytest.raises(ConfigurationError):
            parse_prior("normal 0 1")
        with pytest.raises(ConfigurationError):
            parse_prior("uniform 1")


class TestLoadConfig:
    def test_full_document(self, tmp_path):
        cfg = load_config(write(tmp_path, BASE))
        assert cfg.space.names == ("alpha", "sigma_x", "sigma_y", "theta_0", "theta_1")
        assert cfg.space.params[0].prior == Uniform(1, 30)
        assert cfg.move_sd == 0.25
        assert (cfg.steps, cfg.burn_in, cfg.thin) == (2000, 1000, 10)
        assert cfg.seed == 3
        assert cfg.truth.alpha == 10.0
        assert cfg.truth.kappa == pytest.approx(20.0)  # lambda / alpha / |W|
        assert cfg.truth.field.theta_at(0.0, 0.5) == pytest.approx(math.pi / 4)
        mc = cfg.mcmc()
        assert (mc.n_steps, mc.seed, mc.move_sd) == (2000, 3, 0.25)
        assert cfg.mcmc(seed=99).seed == 99

    def test_kappa_direct(self, tmp_path):
        cfg = load_config(write(tmp_path, BASE.replace("lambda = 200", "kappa = 20")))
        assert cfg.truth.kappa == 20.0

    def test_kappa_and_lambda_conflict(self, tmp_path):
        text = BASE.replace("lambda = 200", "lambda = 200\nkappa = 20")
        with pytest.raises(ConfigurationError, match="exactly one"):
            load_config(write(tmp_path, text))

    def test_unknown_key_rejected(self, tmp_path):
        text = BASE.replace("alpha = 3", "alpha = 3\nalpa = 4")
        with pytest.raises(ConfigurationError, match="alpa"):
            load_config(write(tmp_path, text))

    def test_unknown_section_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError, match="extras"):
            load_config(write(tmp_path, BASE + "\n[extras]\nx = 1\n"))

    def test_missing_prior_entry(self, tmp_path):
        text = BASE.replace("theta_1 = uniform -1 2\n", "")
        with pytest.raises(ConfigurationError, match="theta_1"):
            load_config(write(tmp_path, text))

    def test_missing_move(self, tmp_path):
        text = BASE.replace("move = 0.25\n", "")
        with pytest.raises(ConfigurationError, match="move"):
            load_config(write(tmp_path, text))

    def test_truth_optional(self, tmp_path):
        head, _, _ = BASE.partition("[truth]")
        cfg = load_config(write(tmp_path, head))
        assert cfg.truth is None

    def test_named_covariates(self, tmp_path):
        raster = tmp_path / "z.txt"
        raster.write_text("1 1 -0.5 -0.5 2.5 2.5\n2.0\n")
        text = BASE.replace(
            "theta_covariates = x",
            f"theta_covariates = elev\n\n[covariates]\nelev = raster:{raster}",
        )
        cfg = load_config(write(tmp_path, text))
        assert cfg.space.cov_theta[0].values(0.4, 0.4) == 2.0

    def test_sd_scale_with_sigma_covariates_rejected(self, tmp_path):
        text = BASE.replace("theta_covariates = x",
                            "theta_covariates = x\nsigma_x_covariates = x")
        with pytest.raises(ConfigurationError, match="sd"):
            load_config(write(tmp_path, text))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "absent.cfg")


class TestEmitConfig:
    def test_roundtrip_through_loader(self, tmp_path):
        space = experiment1_space()
        text = emit_config(space, move_sd=0.025, steps=500, burn_in=100, thin=10,
                           seed=4)
        cfg = load_config(write(tmp_path, text))
        assert cfg.space.names == space.names
        for ours, theirs in zip(cfg.space.params, space.params):
            assert ours.prior == theirs.prior
            assert ours.proposal_sd == theirs.proposal_sd
            assert ours.initial == theirs.initial
        assert cfg.move_sd == 0.025 and cfg.seed == 4

    def test_emission_is_byte_stable(self):
        space = experiment1_space()
        a = emit_config(space, 0.025, 500, 100, 10, seed=4)
        b = emit_config(space, 0.025, 500, 100, 10, seed=4)
        assert a == b
