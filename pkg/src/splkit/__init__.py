"""splkit: bottom-up product-line extraction, validation and composition."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    Artifact,
    AtomTemplate,
    Configuration,
    Feature,
    GlobalTable,
    Group,
    RequirementSet,
    ResolvedAtom,
    atom_id,
    feature_dependencies,
    resolve_atom,
)
from .extraction import (  # noqa: F401
    DepEdge,
    FeatureModel,
    build_feature_tree,
    derive_dependency_edges,
    recompute_on_attribute_change,
)
from .validation import (  # noqa: F401
    ValidationReport,
    exists,
    suggest_fix,
    toggle_activation,
    valid_set,
    validate_configuration,
)
from .protocol import Session  # noqa: F401
