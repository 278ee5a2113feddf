"""Random deployments and channel realizations."""

import numpy as np
from loguru import logger
from scipy.spatial.distance import cdist

from src.core.scenario.units import db_to_linear, path_loss_db
from src.models.system import ChannelRealization, Deployment, SystemConfig


def generate_deployment(cfg: SystemConfig, rng: np.random.Generator) -> Deployment:
    """Drop BSs and users i.i.d. uniformly on the square ``[0, side_length]²``.

    BS positions are drawn first, then users, so adding users never moves BSs.
    """
    bs_positions = rng.uniform(0.0, cfg.side_length, size=(cfg.num_bs, 2))
    user_positions = rng.uniform(0.0, cfg.side_length, size=(cfg.num_users, 2))
    return Deployment(bs_positions=bs_positions, user_positions=user_positions)


def link_distances(dep: Deployment) -> np.ndarray:
    """``(U, B)`` Euclidean user-to-BS distances in meters."""
    return cdist(dep.user_positions, dep.bs_positions)


def generate_channels(
    cfg: SystemConfig,
    dep: Deployment,
    rng: np.random.Generator,
) -> ChannelRealization:
    """Draw path loss, shadowing and Rayleigh fading for every link and band.

    Shadowing is drawn once per (user, BS) link and shared by all bands;
    fading is an independent unit-mean exponential power factor per
    (user, BS, band). Noise is ``noise_psd + 10 log10(band_width)`` on every
    BS and band.
    """
    distances = link_distances(dep)
    loss_db = path_loss_db(
        distances,
        a=cfg.pathloss_a,
        b=cfg.pathloss_b,
        min_distance=cfg.min_distance,
    )
    shadowing_db = rng.normal(0.0, cfg.shadowing_sigma, size=distances.shape)
    large_scale = db_to_linear(-loss_db - shadowing_db)

    shape = (cfg.num_users, cfg.num_bs, cfg.num_bands)
    if cfg.rayleigh_fading:
        fading = rng.exponential(1.0, size=shape)
    else:
        fading = np.ones(shape)
    gain = large_scale[:, :, None] * fading

    noise = np.full((cfg.num_bs, cfg.num_bands), db_to_linear(cfg.noise_power_dbm))

    if np.any(gain <= 0):
        # Exponential draws of exactly zero are possible in principle
        tiny = np.finfo(float).tiny
        logger.warning(f"Clamping {int(np.sum(gain <= 0))} zero channel gains")
        gain = np.maximum(gain, tiny)

    return ChannelRealization(gain=gain, noise=noise)
