"""Unsupervised neural coloring of conflict graphs.

Consumes the graph/coloring/stats documents written by the companion
delivery toolkit, trains a message-passing model against a relaxed
same-color-penalty objective plus a color-count regularizer, and emits
(possibly improper) colorings for the toolkit to repair and score.
"""

__version__ = "0.1.0"

from .data import GraphSample, load_dataset, load_graph_document, load_stats, merge_batch  # noqa: F401
from .losses import color_count_loss, potts_loss, total_loss  # noqa: F401
from .model import ColoristNet  # noqa: F401
from .train import TrainConfig, infer_coloring, load_checkpoint, train  # noqa: F401
