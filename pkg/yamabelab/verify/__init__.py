from yamabelab.verify.concavity import check_concavity_inequality, form_convergence
from yamabelab.verify.family import (
    FamilyTemplate,
    IndexReport,
    covering_window,
    eigenfunction_template,
    gram_matrix,
    translated_family_bound,
)
from yamabelab.verify.intersection import IntersectionResult, check_intersection
from yamabelab.verify.negative import (
    NegativeDirection,
    build_negative_direction,
    export_direction,
    reduced_quadratic_form,
)
from yamabelab.verify.oscillation import OscillationCertificate, OscillationFailure, detect_oscillation

__all__ = [
    "FamilyTemplate",
    "IndexReport",
    "IntersectionResult",
    "NegativeDirection",
    "OscillationCertificate",
    "OscillationFailure",
    "build_negative_direction",
    "check_concavity_inequality",
    "check_intersection",
    "covering_window",
    "detect_oscillation",
    "eigenfunction_template",
    "export_direction",
    "form_convergence",
    "gram_matrix",
    "reduced_quadratic_form",
    "translated_family_bound",
]
