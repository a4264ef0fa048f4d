"""Persistent homology of directional densities and of samples drawn from them."""

from .analytic import (
    GFunction,
    betti0_curve,
    betti0_function,
    cech_barcode,
    duality_check,
    g_function,
    morse_barcode,
)
from .complexes import FilteredComplex, cech_filtration, lower_star_filtration, rips_filtration
from .core import (
    F2,
    INF,
    QQ,
    Barcode,
    BettiZeroCurve,
    FieldSpec,
    PersistenceInterval,
    interval_length,
    symmetric_difference,
)
from .distributions import (
    Bingham,
    MatrixVonMises,
    VonMises,
    VonMisesFisher,
    Watson,
    bessel_i,
    bingham_norm,
    density,
    sample,
    watson_norm,
)
from .geometry import PointCloud, cayley_klein, smallest_enclosing_ball_radius
from .metric import brute_force_distance, distance, optimal_matching
from .persistence import (
    DiscretizedDensity,
    circle_mesh,
    icosphere,
    reduce,
    sublevel_persistence,
    superlevel_cech_persistence,
)

__version__ = "0.1.0"

__all__ = [
    "Barcode",
    "bessel_i",
    "betti0_curve",
    "betti0_function",
    "BettiZeroCurve",
    "Bingham",
    "bingham_norm",
    "brute_force_distance",
    "cayley_klein",
    "cech_barcode",
    "cech_filtration",
    "circle_mesh",
    "density",
    "DiscretizedDensity",
    "distance",
    "duality_check",
    "F2",
    "FieldSpec",
    "FilteredComplex",
    "g_function",
    "GFunction",
    "icosphere",
    "INF",
    "interval_length",
    "lower_star_filtration",
    "MatrixVonMises",
    "morse_barcode",
    "optimal_matching",
    "PersistenceInterval",
    "PointCloud",
    "QQ",
    "reduce",
    "rips_filtration",
    "sample",
    "smallest_enclosing_ball_radius",
    "sublevel_persistence",
    "superlevel_cech_persistence",
    "symmetric_difference",
    "VonMises",
    "VonMisesFisher",
    "Watson",
    "watson_norm",
]
