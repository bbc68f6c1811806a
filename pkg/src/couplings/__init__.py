from .zero_coupling import ZeroCoupling
from .target_coupling import TargetCoupling
from .anchor_distance_coupling import AnchorDistanceCoupling
from .pairwise_distance_coupling import PairwiseDistanceCoupling
from .convolution_coupling import ConvolutionCoupling

__all__ = [
    'ZeroCoupling',
    'TargetCoupling',
    'AnchorDistanceCoupling',
    'PairwiseDistanceCoupling',
    'ConvolutionCoupling'
]
