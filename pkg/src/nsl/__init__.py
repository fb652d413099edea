"""Noise stability of three-set partitions: Gaussian, spherical and discrete.

Submodules
----------
special_functions      Bessel functions and ratios, Hermite polynomials, Gaussian tails
spherical_stability    circle kernel eigenvalues and arc stabilities
gaussian_stability     Mehler kernel, sector and radial-profile stabilities
certified_checks       grid verifications of the supporting inequalities
hardness_constants     alpha2, alpha3, beta3
discrete_social_choice voting rules on {1..k}^n
cli                    command-line front end
"""

from .special_functions import bessel_i, bessel_ratio, bessel_ratios, hermite, gaussian_tail
from .spherical_stability import (
    ArcPartition,
    SphericalKernelParams,
    arc_F,
    arc_deficit,
    lambda_bounds,
    lambda_sequence,
)
from .gaussian_stability import (
    RadialPartitionProfile,
    StabilityValue,
    bilinear_profile_stability,
    cone_partition_stability,
    profile_stability,
)
from .certified_checks import CheckReport, run_check, run_group
from .hardness_constants import alpha2, alpha3, beta3, majority_limit, plurality_limit
from .discrete_social_choice import NoiseKernel, VotingRule, noise_stability_exact, noise_stability_mc

__version__ = "0.1.0"
