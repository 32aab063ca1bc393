"""Detect meromorphic extensions of boundary data through multiply connected planar domains."""

__version__ = "0.1.0"

from .argument import (ProbeReport, RationalProbe, argument_principle_check, make_probe,
                       probe_harness, winding_number)
from .cauchy import (BoundarySamples, MomentSequence, ProbeConfig, boundary_mismatch,
                     cauchy_transform, compute_moments, holo_test, reconstruct)
from .geometry import (BoundaryCurve, DomainBoundary, RegionTag, annulus, build_domain,
                       contour_integral, locate_point, unit_disc)
from .poles import (DetectConfig, ExtensionReport, build_hankel, classify_roots, detect,
                    null_vector, poly_roots, tail_residuals)
