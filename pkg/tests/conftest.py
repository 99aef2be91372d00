"""Shared fixtures.

The heavy objects (default-scale simulations and reconstructions, ablation
studies) are session-scoped because several acceptance criteria and module
tests read the same runs; building them once keeps the suite inside its
wall-clock budget on a single core.
"""
import pytest

from pdfisp.config import ImagingConfig
from pdfisp.forward import build_greens, incident_fields, simulate
from pdfisp.geometry import build_array, build_grid
from pdfisp.losses import LossContext
from pdfisp.reconstruct import reconstruct
from pdfisp.scenes import builtin_scene
from pdfisp.spectral import SpectralBasis
from pdfisp.studies import StudySpec, run_ablation


class Setup:
    """Geometry, operators, and incident fields for one configuration."""

    def __init__(self, config: ImagingConfig):
        self.config = config
        self.grid = build_grid(config)
        self.array = build_array(config)
        self.ops = build_greens(config, self.array, self.grid)
        self.e_inc = incident_fields(config, self.array, self.grid)
        self.basis = SpectralBasis(config.m1, config.m2, config.m_f)

    def loss_context(self, data, r_fixed=None) -> LossContext:
        cfg = self.config
        return LossContext(data=data, e_inc=self.e_inc.views, ops=self.ops,
                           basis=self.basis, beta=cfg.beta,
                           lambdas=(cfg.lambda1, cfg.lambda2, cfg.lambda3),
                           tau_b=cfg.tau_b, r_fixed=r_fixed)


# ----------------------------------------------------------------------
# Small problems for module-level checks


@pytest.fixture(scope="session")
def tiny_setup():
    cfg = ImagingConfig(m1=16, m2=16, m_f=3, n_tx=8, n_rx=8).validate()
    return Setup(cfg)


@pytest.fixture(scope="session")
def tiny_sim(tiny_setup):
    scene = builtin_scene("austria", 2.0, scale=0.9)
    return simulate(tiny_setup.config, scene)


@pytest.fixture(scope="session")
def tiny_ctx(tiny_setup, tiny_sim):
    return tiny_setup.loss_context(tiny_sim.data)


# ----------------------------------------------------------------------
# Default-scale runs shared by the acceptance criteria


@pytest.fixture(scope="session")
def default_config():
    return ImagingConfig().validate()


@pytest.fixture(scope="session")
def default_setup(default_config):
    return Setup(default_config)


@pytest.fixture(scope="session")
def austria2_sim(default_config):
    """Noise-free default benchmark dataset (three-component scene, eps 2)."""
    return simulate(default_config, builtin_scene("austria", 2.0))


@pytest.fixture(scope="session")
def austria2_recon(default_config, austria2_sim):
    return reconstruct(default_config, austria2_sim.data,
                       chi_true=austria2_sim.chi_true)


@pytest.fixture(scope="session")
def eps5_ablation(default_config):
    """Full pipeline vs single-switch ablations, eps 5 noise-free, seed 0."""
    spec = StudySpec(config=default_config, kind="ablation", scene_eps=5.0,
                     snr_db=float("inf"), ablations=("no_cco", "no_bridge"), seed=0)
    return run_ablation(spec)


@pytest.fixture(scope="session")
def eps8_noisy_ablation(default_config):
    """Full pipeline vs the bound ablation, eps 8 at 1 dB, seed 0."""
    spec = StudySpec(config=default_config, kind="ablation", scene_eps=8.0,
                     snr_db=1.0, ablations=("no_bound",), seed=0)
    return run_ablation(spec)


# ----------------------------------------------------------------------
# Synthetic bench-style measurement file


@pytest.fixture(scope="session")
def foamdiel_file(tmp_path_factory):
    """Synthetic two-target bench file with a 5 GHz slice, written once."""
    from pdfisp.fresnel import write_synthetic_foamdiel

    path = tmp_path_factory.mktemp("fresnel") / "foamdiel_synth.exp"
    write_synthetic_foamdiel(path, frequency=5e9)
    return path
