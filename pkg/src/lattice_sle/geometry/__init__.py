from .lattices import (CORNERS, DiscreteDomain, LatticeSpec, build_rectangle_domain,
                       continuum_rectangle, corner_id, hexagonal_domain, square_domain,
                       triangular_domain)
from .medial import medial_faces, medial_graph, medial_positions
from .conformal import (ConformalMap, agm, corner_cross_ratio, domain_to_halfplane, ellipk,
                        halfplane_normalized, halfplane_to_strip, phi_prime, psi_prime,
                        rect_to_halfplane, sc_cross_ratio_oracle)

__all__ = [
    "CORNERS", "DiscreteDomain", "LatticeSpec", "build_rectangle_domain", "continuum_rectangle",
    "corner_id", "hexagonal_domain", "square_domain", "triangular_domain", "medial_faces",
    "medial_graph", "medial_positions", "ConformalMap", "agm", "corner_cross_ratio",
    "domain_to_halfplane", "ellipk", "halfplane_normalized", "halfplane_to_strip", "phi_prime",
    "psi_prime", "rect_to_halfplane", "sc_cross_ratio_oracle",
]
