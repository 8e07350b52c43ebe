"""Perfect matchings in random regular graphs: exact oracles, asymptotic
moment formulas and a degree-raising coupling with exact marginals."""

__version__ = "0.1.0"
