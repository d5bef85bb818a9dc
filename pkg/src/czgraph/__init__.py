"""Exact toolkit for the Ceresa-Zharkov class of graphs and tropical curves.

Computes the polynomial polarization matrix of a graph's cycle basis, the
action of the associated unipotent multitwist on the third exterior power of
a symplectic lattice, and decides triviality of Ceresa-Zharkov classes two
independent ways: integer-linear feasibility over polynomial coefficients,
and the forbidden-minor characterization (no K4 or L3 minor).
"""

__version__ = "0.1.0"

from .polyring import IntPolynomial, Monomial, parse_polynomial
from .intlin import (DiophantineResult, IntMatrix, hermite_normal_form,
                     lattice_membership, smith_normal_form, solve_diophantine)
from .graph import (CycleBasisContext, Edge, MultiGraph, TropicalCurve,
                    blocks, build_cycle_context, contract_edge, delete_edge,
                    genus, load_graph_file, parse_graph_text,
                    render_graph_text, specialize_Q, stabilize,
                    subdivide_edge)
from .minors import (MinorWitness, canonical_form, enumerate_graphs,
                     has_minor, is_hyperelliptic_type)
from .extalg import (HElement, LElement, delta_G_H, delta_G_L, delta_ell_H,
                     image1_coeffs, image2_coeffs, pairing, psi_G,
                     wedge_with_omega)
from .ceresa import (V_TAU_K4, V_TAU_L3, CeresaCocycle, CZClass,
                     TrivialityVerdict, classify, compute_w, image_lattice,
                     is_cz_trivial_curve, is_cz_trivial_graph,
                     pushforward_contract, pushforward_subdivide, specialize)

__all__ = [
    "IntPolynomial", "Monomial", "parse_polynomial",
    "DiophantineResult", "IntMatrix", "hermite_normal_form",
    "lattice_membership", "smith_normal_form", "solve_diophantine",
    "CycleBasisContext", "Edge", "MultiGraph", "TropicalCurve",
    "blocks", "build_cycle_context", "contract_edge", "delete_edge",
    "genus", "load_graph_file", "parse_graph_text", "render_graph_text",
    "specialize_Q", "stabilize", "subdivide_edge",
    "MinorWitness", "canonical_form", "enumerate_graphs", "has_minor",
    "is_hyperelliptic_type",
    "HElement", "LElement", "delta_G_H", "delta_G_L", "delta_ell_H",
    "image1_coeffs", "image2_coeffs", "pairing", "psi_G", "wedge_with_omega",
    "V_TAU_K4", "V_TAU_L3", "CeresaCocycle", "CZClass", "TrivialityVerdict",
    "classify", "compute_w", "image_lattice", "is_cz_trivial_curve",
    "is_cz_trivial_graph", "pushforward_contract", "pushforward_subdivide",
    "specialize",
]
