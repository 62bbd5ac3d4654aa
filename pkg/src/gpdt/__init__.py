"""Finite groupoids, their convolution *-algebras, Laplacians, Kazhdan constants and projections."""

__version__ = "0.1.0"

from .algebra import (AlgebraElement, KernelFunction, adjoint, check_negative_type,
                      check_positive_type, conditional_expectation, convolve, i_norm, psi,
                      schoenberg_transform)
from .config import DEFAULT, Tolerances
from .graphs import FiniteGraph, complete_graph, cycle_graph, path_graph, random_regular_graph
from .groupoid import (FiniteGroupoid, build_coarse_truncation, build_explicit, build_group,
                       build_hls_truncation, build_pair, build_transformation, disjoint_union,
                       groupoid_from_group, orbits, validate)
from .kazhdan import (BisectionFamily, canonical_family, exactness_witness, expectation_law_check,
                      generator_family, kazhdan_constant, kazhdan_projection, laplacian)
from .representations import (InvariantMeasure, constant_vectors, gns_rep, invariant_measures,
                              regular_rep, regular_reps, trivial_rep)
from .spectral import eigh, eigvalsh, smallest_nonzero_eig, spectral_report
