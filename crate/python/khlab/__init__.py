from ._khlab import (
    SUITES,
    Complex,
    Diagram,
    alpha_invariants,
    burnside_verify,
    homology,
    jones,
    movie_map,
    s_invariant,
    verify,
)

__all__ = [
    "SUITES",
    "Complex",
    "Diagram",
    "alpha_invariants",
    "burnside_verify",
    "homology",
    "jones",
    "movie_map",
    "s_invariant",
    "verify",
]
