"""Structure fields, defining functions, Levi forms and pointwise normalization."""
from .affine import J_ST, AffineMap
from .defining import (CallableDefiningFunction, ComposedDefiningFunction, DefiningFunction,
                       PolynomialDefiningFunction, unit_sphere_function)
from .expansion import QuadraticExpansion, quadratic_expansion
from .levi import is_strictly_psh, levi_form, levi_matrix
from .normalize import normalize_at_point
from .polynomial import ComplexPolynomial, parse_monomial
from .regions import Ball, Polydisc, Sublevel
from .structures import (STANDARD, CallableStructure, ConstantStructure, DeformationData,
                         DeformationStructure, PushforwardStructure, StructureField,
                         TransportedStructure, ValidationReport, c1_deviation, c2_distance,
                         deformation_from_matrix, matrix_from_deformation, validate_structure)
