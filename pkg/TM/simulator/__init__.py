from TM.simulator.simulate import (
    TickRecord,
    Token,
    Trace,
    load_sources,
    simulate,
    sources_from_data,
    trace_to_chronology,
)
