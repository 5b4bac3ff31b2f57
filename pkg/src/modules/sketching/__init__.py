"""
Gaussian kernel sketching - embeds points and point sets into Euclidean space so that
kernel distances survive up to (1 +- eps) relative and alpha additive error.
"""

from .pointset import PointSet, as_pointset
from .count_sketch import CountSketchMap
from .tensor_sketch import RecursiveTensorSketchMap, Tensor2Combiner
from .planner import AccuracyTarget, PlannedConfig, plan, plan_two_sample
from .sketchers import Embedding, GaussianSketchHighD, GaussianSketchLowD, build_sketch, embed_set
from .kernel_distance import DistanceReport, exact_dk2, sketched_dk2
from .compress import JlProjector, median_estimate, replicated_dk2
from .kpca import GramFactor, RankKBasis, gram_factor, kpca_error, kpca_fit
from .apps import SetIndex, TwoSampleResult, nn_index_build, nn_query, two_sample_test

__all__ = [
    'PointSet',
    'as_pointset',
    'CountSketchMap',
    'RecursiveTensorSketchMap',
    'Tensor2Combiner',
    'AccuracyTarget',
    'PlannedConfig',
    'plan',
    'plan_two_sample',
    'Embedding',
    'GaussianSketchHighD',
    'GaussianSketchLowD',
    'build_sketch',
    'embed_set',
    'DistanceReport',
    'exact_dk2',
    'sketched_dk2',
    'JlProjector',
    'median_estimate',
    'replicated_dk2',
    'GramFactor',
    'RankKBasis',
    'gram_factor',
    'kpca_error',
    'kpca_fit',
    'SetIndex',
    'TwoSampleResult',
    'nn_index_build',
    'nn_query',
    'two_sample_test',
]
