"""Clustering, 2-D projection and distribution summaries of section embeddings."""

from .density import DistributionData, kde, silverman_bandwidth
from .kmeans import ClusterModel, kmeans, label_clusters
from .tsne import Projection2D, tsne

__all__ = [
    "ClusterModel",
    "DistributionData",
    "Projection2D",
    "kde",
    "kmeans",
    "label_clusters",
    "silverman_bandwidth",
    "tsne",
]
