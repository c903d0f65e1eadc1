from TM.tmlang.parser import (
    FlowStatement,
    Segment,
    SourceSpan,
    TmDocument,
    TriggerStatement,
    parse,
    parse_file,
    tokenize,
)
from TM.tmlang.serializer import serialize
from TM.tmlang.interchange import from_json, load_model, model_from_dict, model_to_dict, to_json
