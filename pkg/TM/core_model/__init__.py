from TM.core_model.model import (
    Arc,
    ArcKind,
    Direction,
    Stage,
    StageKind,
    StaticModel,
    Thimac,
    add_flow,
    add_stage,
    add_thimac,
    add_trigger,
    canonical_form,
    isomorphic,
)
from TM.core_model.validation import ERROR, WARNING, Diagnostic, errors_of, validate_model
