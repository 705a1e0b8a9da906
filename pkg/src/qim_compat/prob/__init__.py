"""
Finite joint distributions and information measures.
"""

from .distributions import (
    Variable, JointDistribution, Event, marginal, condition, product, probability,
    check_determines, check_ci,
)
from .information import (
    entropy, conditional_entropy, co_information, mutual_information, total_correlation,
    kl_divergence, information_profile, InformationProfile,
)

__all__ = [
    'Variable', 'JointDistribution', 'Event', 'marginal', 'condition', 'product', 'probability',
    'check_determines', 'check_ci',
    'entropy', 'conditional_entropy', 'co_information', 'mutual_information', 'total_correlation',
    'kl_divergence', 'information_profile', 'InformationProfile',
]
