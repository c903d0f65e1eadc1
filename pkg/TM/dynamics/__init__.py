from TM.dynamics.events import (
    DynamicModel,
    Event,
    EventEdge,
    EventGraph,
    Region,
    define_event,
    derive_event_graph,
    events_from_data,
    events_overlapping,
    load_events,
    validate_dynamic,
)
