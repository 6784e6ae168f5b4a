"""Gradient and density correctness at realistic model sizes."""
import math

import numpy as np
import pytest
from scipy import integrate

from tppflow.autodiff import ParamStore, grad_check
from tppflow.core.noise import NoiseStream
from tppflow.core.synthetic import lognormal_renewal
from tppflow.models.hawkes import HawkesParams, HawkesStatistics, nll_graph, simulate_dataset
from tppflow.models.heads import LogNormalParams, kl_lognormal, lognormal_logpdf
from tppflow.models.imtpp import ImtppConfig, ImtppModel, elbo_graph
from tppflow.models.mtpp import ModelConfig, MtppModel, sequence_nll_graph

pytestmark = pytest.mark.slow

MODEL = ModelConfig(embedding_size=4, input_size=4, hidden_size=8)


class TestGradients:
    """Finite-difference checks of every training objective."""

    def test_mtpp_loss(self):
        """Test the joint mark, time and distance loss."""
        ds = lognormal_renewal(1, 6, num_marks=3, locations=True, seed=0)
        model = MtppModel.for_dataset(ds, MODEL, seed=1)
        objective = lambda tape: sequence_nll_graph(model, tape, ds.sequences[0])
        assert grad_check(objective, model.store, floor=1e-5) < 1e-4

    def test_imtpp_elbo(self):
        """Test the ELBO with missing events summed over their count at median noise."""
        ds = lognormal_renewal(1, 5, num_marks=2, seed=3)
        model = ImtppModel.create(ds.vocab, False, LogNormalParams(math.log(0.2), 0.5), MODEL, seed=2,
                                  config=ImtppConfig(max_missing=3))
        objective = lambda tape: elbo_graph(model, tape, ds.sequences[0], NoiseStream.deterministic()).elbo
        assert grad_check(objective, model.store, floor=1e-5) < 1e-4

    def test_hawkes_nll(self):
        """Test the Hawkes likelihood over three users."""
        params = HawkesParams([0.3, 0.2, 0.1], np.full((3, 3), 0.1), beta=2.0)
        sequences = list(simulate_dataset(params, 3, 30.0, seed=4))
        stats = HawkesStatistics.build(sequences, 3, 2.0, 30.0)
        store = ParamStore()
        store.add('mu', params.mu)
        store.add('A', params.A)
        assert grad_check(lambda t: nll_graph(t.param('mu'), t.param('A'), stats), store) < 1e-4


class TestDensities:
    """Quadrature and Monte-Carlo checks of the log-normal helpers."""

    def test_unit_mass(self):
        """Test that ten random densities integrate to one."""
        rng = np.random.default_rng(0)
        for mu, sigma2 in zip(rng.uniform(-1.0, 1.0, 10), rng.uniform(0.1, 2.0, 10)):
            p = LogNormalParams(mu, sigma2)
            pdf = lambda x: math.exp(lognormal_logpdf(x, p)) if x > 0 else 0.0
            mass = integrate.quad(pdf, 0.0, 1.0)[0] + integrate.quad(pdf, 1.0, np.inf)[0]
            assert mass == pytest.approx(1.0, abs=1e-3)

    def test_kl_matches_monte_carlo(self):
        """Test the closed-form KL against a million-sample estimate for ten pairs."""
        rng = np.random.default_rng(1)
        for _ in range(10):
            mu_q = rng.uniform(-1.0, 1.0)
            q = LogNormalParams(mu_q, rng.uniform(0.3, 1.5))
            p = LogNormalParams(mu_q + rng.choice([-1.0, 1.0]) * rng.uniform(1.0, 2.0), rng.uniform(0.3, 1.5))
            z = mu_q + math.sqrt(q.sigma2_value) * rng.standard_normal(1_000_000)
            x = np.exp(z)
            estimate = np.mean(lognormal_logpdf(x, q) - lognormal_logpdf(x, p))
            assert kl_lognormal(q, p) == pytest.approx(estimate, rel=1e-2)
