"""Exact sectional-category invariants for finitely presented commutative
differential graded algebras over the rationals.

The layers, bottom up:

    linalg      exact rational echelon forms and solvers
    core        presentations, elements, derivations, morphisms, tensors
    homology    graded homology, kernels, ideal powers, nilpotency, duality
    construct   minimal Sullivan models, path fibrations, acyclic closures,
                fibers, cofibers, pushouts, diagonal surjections
    semifree    semifree modules, quotient resolutions, join levels,
                module retractions
    invariants  the bound chains (toomer/mcat/cat, htc/mtc/tc, sectional)
                and machine-checkable certificates
    lang, cli   the text format and the command line front end
"""

from .core import (AlgebraElement, CdgaError, CdgaMorphism, DegreeMismatch,
                   Derivation, Generator, IdealNotClosed, Inhomogeneous,
                   NotFree, NotQuasiIso, NotSimplyConnected, NotSquareZero,
                   NotSurjective, PedigreeMissing, Presentation,
                   PresentationMismatch, RangeExceedsCap, SeriesNonterminating,
                   TopDegreeMismatch, direct_sum, identity_morphism,
                   linear_part, quotient_by_ideal, sub_presentation, tensor,
                   tensor_power, word_length_truncation)
from .homology import (HomologyReport, HomologyView, IdealPowers,
                       NilpotencyResult, PresentationView, homology,
                       is_quasi_iso, kernel_basis, kernel_ideal_generators,
                       nil_ideal, poincare_duality_check,
                       positive_part_generators, quasi_iso_failure,
                       surjectivity_failure)
from .construct import (CofiberModel, DiagonalModel, RelativeModel,
                        SullivanModelResult, acyclic_closure,
                        build_minimal_model, cofiber_model, diagonal_model,
                        find_isomorphism, loop_space_model,
                        multiplication_morphism, path_fibration_model,
                        pushout_model, sullivan_model_of)
from .semifree import (GaneaLevel, ModuleHomology, QuotientResolution,
                       RetractionResult, SemiFreeModule, find_module_retraction,
                       ganea_level, resolve_quotient, semifree_from_relative,
                       verify_module_retraction)
from .invariants import (Bound, CatReport, Certificate, SurjectionReport,
                         TCReport, augmentation_morphism, cat_bounds,
                         certificate_from_json, certificate_to_json,
                         split_retraction_certificate, surjection_bounds,
                         tc_bounds, toomer, verify_certificate)
from .lang import (ParseError, make_presentation, parse_document,
                   parse_element, print_presentation, realize_document)

__version__ = "0.1.0"
