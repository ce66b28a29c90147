"""staudtlab: exact projective-line and Jordan-map machinery over small rings."""

from .rings import (
    Dual,
    Element,
    GF,
    Mat,
    Quat,
    Rational,
    Ring,
    Sum,
    Tri,
    Zmod,
)
from .specparse import eval_expr, parse_element, parse_expr, parse_ring_spec

__all__ = [
    "Dual",
    "Element",
    "GF",
    "Mat",
    "Quat",
    "Rational",
    "Ring",
    "Sum",
    "Tri",
    "Zmod",
    "eval_expr",
    "parse_element",
    "parse_expr",
    "parse_ring_spec",
]
