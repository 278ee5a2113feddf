"""User affiliation rules."""

import numpy as np

from src.core.cells.partition import VirtualCellPartition, build_partition
from src.core.clustering.models import Clustering
from src.core.scenario.generator import link_distances
from src.models.experiment import AffiliationRule, ChannelMetric
from src.models.system import ChannelRealization, Deployment


def affiliate_closest(dep: Deployment, clustering: Clustering) -> VirtualCellPartition:
    """Each user joins the cell of its nearest BS (ties to the lowest BS index)."""
    serving = np.argmin(link_distances(dep), axis=1)
    return build_partition(clustering.groups(), serving, AffiliationRule.CLOSEST)


def channel_quality(chan: ChannelRealization, metric: ChannelMetric = ChannelMetric.MAX) -> np.ndarray:
    """``(U, B)`` scalar channel quality of every user-BS pair."""
    if metric == ChannelMetric.MEAN:
        return chan.gain.mean(axis=2)
    return chan.gain.max(axis=2)


def affiliate_best_channel(
    chan: ChannelRealization,
    clustering: Clustering,
    metric: ChannelMetric = ChannelMetric.MAX,
) -> VirtualCellPartition:
    """Each user joins the cell of the BS it has the strongest channel to.

    Args:
        chan: Channel realization
        clustering: BS clustering
        metric: How bands are folded into one number per (user, BS)
    """
    serving = np.argmax(channel_quality(chan, metric), axis=1)
    return build_partition(clustering.groups(), serving, AffiliationRule.BEST_CHANNEL)
