"""TPTP syntax: parsing, printing, kernel conversion and SZS statuses."""

from .ast import (
    ROLES,
    AnnotatedFormula,
    Binary,
    Connective,
    Dialect,
    DistinctObject,
    Expr,
    Func,
    Include,
    Number,
    Quantified,
    TypeDecl,
    TypedVar,
    Unary,
    Var,
)
from .kernel import (
    ConversionError,
    DialectMismatch,
    TPTPTypeError,
    UndeclaredSymbol,
    Unsupported,
    convert_formula,
    from_kernel,
    kernel_problem,
    problem_to_kernel,
    render_problem,
    to_kernel,
    type_declarations,
    type_from_kernel,
)
from .parser import IncludeNotFound, TPTPSyntaxError, parse, parse_expression, parse_file
from .printer import format_expr, format_formula, format_problem
from .szs import NO_STATUS, SUCCESS, NoStatus, SZSStatus, format_szs, parse_szs

__all__ = [
    "ROLES",
    "AnnotatedFormula",
    "Binary",
    "Connective",
    "Dialect",
    "DistinctObject",
    "Expr",
    "Func",
    "Include",
    "Number",
    "Quantified",
    "TypeDecl",
    "TypedVar",
    "Unary",
    "Var",
    "ConversionError",
    "DialectMismatch",
    "TPTPTypeError",
    "UndeclaredSymbol",
    "Unsupported",
    "convert_formula",
    "from_kernel",
    "kernel_problem",
    "problem_to_kernel",
    "render_problem",
    "to_kernel",
    "type_declarations",
    "type_from_kernel",
    "IncludeNotFound",
    "TPTPSyntaxError",
    "parse",
    "parse_expression",
    "parse_file",
    "format_expr",
    "format_formula",
    "format_problem",
    "NO_STATUS",
    "SUCCESS",
    "NoStatus",
    "SZSStatus",
    "format_szs",
    "parse_szs",
]
