"""Correction terms of double branched covers and the concordance-order obstruction."""

__version__ = "0.1.0"

from .dtable import DTable, canonical_relabel, symmetry_centers  # noqa: E402
from .errors import (  # noqa: E402
    BadIndex, BadTwistCount, GroupMismatch, KnotOrderError, NoSymmetricLabeling, NotCoprime,
    NotNegativeDefinite, NotSymmetric, ParseError, PresentationUnavailable, SingularMatrix,
    UnsupportedDeterminant, UnsupportedType, ValidationError,
)
from .exact import (  # noqa: E402
    Cokernel, ExactRational, FiniteAbelianGroup, GroupElement, IntMatrix, cokernel, element_order,
    format_fraction, parse_fraction, smith_normal_form,
)
from .goeritz import (  # noqa: E402
    CharacteristicClass, GoeritzForm, WhiteGraph, characteristic_classes, d_table_from_goeritz,
    extend_twisted, graph_to_goeritz, is_negative_definite, max_square_in_class, two_bridge_chain,
)
from .lens import LensSpace, d_lens, d_table_lens  # noqa: E402
from .obstruction import (  # noqa: E402
    INCONCLUSIVE, OBSTRUCTED, UNSUPPORTED, ObstructionReport, ProductGroup, SubgroupWitness,
    admissible_subgroup_types, check_vanishing, enumerate_cyclic_subgroups,
    enumerate_subgroups_of_type, obstruct_order, passing_subgroups,
)
from .knotdb import BatchReport, KnotRecord, batch_report, load_knot_db, resolve_dtable  # noqa: E402
