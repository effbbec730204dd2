"""Exact computations with Lie algebroids, Q-algebroids and their models.

Everything works over the rationals with ``fractions.Fraction``.  The layers
are: graded algebras (:mod:`core`), derivations (:mod:`derivations`),
algebroid differentials (:mod:`algebroid`), cohomology (:mod:`cohomology`),
Weil, BRST, double and equivariant models (:mod:`models`), Poisson and
Courant structures (:mod:`symplectic`) and problem files (:mod:`ingest`).
"""

from .core import AlgebraError, Context, Element
from .derivations import (Derivation, commutator, exp_apply, exp_conjugate, is_homological, square_witness)
from .algebroid import (AlgebroidChart, AlgebroidSpec, Section, SpecError, anchor_and_bracket_from_differential,
                        build_differential, check_cartan_relations, contraction, jacobiator_witness,
                        lie_derivative)
from .cohomology import BettiTable, betti, subcomplex_betti
from .models import (BialgebraSpec, MatchedPairSpec, SplittingData, basic_operators, brst, cartan_model,
                     drinfeld_double, ginzburg_model, matched_pair_double, tangent_lift_differential, weil)
from .symplectic import (QuadraticLieSpec, courant_lifted_action, courant_model, cotangent_context,
                         lie_poisson, poisson_differential)
from .ingest import InputError, ProblemFile, emit_report, parse

__version__ = "0.1.0"
