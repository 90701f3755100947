"""Multi-access coded caching toolkit.

Builds delivery schemes for multi-access caching systems with arbitrary
user-cache access topology by coloring the conflict graph of the retrieve
array, verifies them by simulating the XOR broadcasts bit-exactly, and
computes matching exact and greedy lower bounds on the delivery load.
"""

from ._version import __version__  # noqa: F401
from .coloring import (  # noqa: F401
    VertexColoring,
    assemble_q,
    dsatur,
    read_coloring_doc,
    repair,
    validate_coloring,
    write_coloring_doc,
)
from .combinatorics import PacketIndex, rank_subset, subsets_lex, unrank_subset  # noqa: F401
from .converse import (  # noqa: F401
    ConverseReport,
    DemandSetFamily,
    greedy_converse,
    ic_converse_dp,
    ic_converse_enum,
    permutation_value,
)
from .delivery import (  # noqa: F401
    DecodeReport,
    FileLibrary,
    TransmissionSchedule,
    decode_all,
    load,
    make_schedule,
)
from .graph import (  # noqa: F401
    ConflictGraph,
    GraphBundle,
    GraphMeta,
    build_conflict_graph,
    export_graph,
    import_graph,
)
from .pda import (  # noqa: F401
    PdaArray,
    PdaParams,
    ValidationReport,
    Violation,
    build_mn_pda,
    measured_params,
    mn_pda_params,
    regularity,
    validate_pda,
)
from .system import (  # noqa: F401
    AccessTopology,
    NodePlacement,
    RetrieveArray,
    SystemConfig,
    build_node_placement,
    derive_retrieve_array,
    format_topology,
    generate_topology,
    parse_topology,
    uncached_sets,
)
