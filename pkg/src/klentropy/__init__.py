"""Weighted Kozachenko-Leonenko k-nearest-neighbour entropy estimation."""

__version__ = "0.1.0"

from .densities import lambda1_constant, make_model, parse_model
from .estimator import EntropyEstimate, kl_estimate, weighted_kl_estimate, xi_values
from .inference import ConfidenceInterval, confidence_interval, variance_estimate
from .inflation import ball_intersection_alpha, inflation_table, inflation_value, t_k
from .knn import NeighbourDistances, PointCloud, ZeroDistanceError, all_knn_distances
from .weights import WeightVector, canonical_weights, unit_weights, validate_weights

__all__ = [
    "EntropyEstimate",
    "ConfidenceInterval",
    "NeighbourDistances",
    "PointCloud",
    "WeightVector",
    "ZeroDistanceError",
    "all_knn_distances",
    "ball_intersection_alpha",
    "canonical_weights",
    "confidence_interval",
    "inflation_table",
    "inflation_value",
    "kl_estimate",
    "lambda1_constant",
    "make_model",
    "parse_model",
    "t_k",
    "unit_weights",
    "validate_weights",
    "variance_estimate",
    "weighted_kl_estimate",
    "xi_values",
]
