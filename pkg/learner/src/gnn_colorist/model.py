"""Message-passing model: gated neighbor aggregation, three graph-convolution
layers, and an embedding-based color projection.

The input feature is one standardized scalar per vertex, lifted to the hidden
width by the neighbor module before the convolution stack.  Although the
graphs are undirected, every neighbor-target pair is treated as a directed
message; each message is a linear lift of the source feature, gated by a
sigmoid attention score, and summed at the target.  The convolution layers
average over the closed neighborhood with symmetric degree normalization
(self-loops included), each followed by a rectified-linear activation and
dropout.  Logits are inner products between final vertex embeddings and a
learnable per-color embedding matrix.
"""

from __future__ import annotations

import torch
from torch import nn


class NeighborGate(nn.Module):
    """Gated directed messages: lift the source feature, weight it by a
    sigmoid attention score, sum into the target."""

    def __init__(self, in_dim: int, hidden_dim: int):
        super().__init__()
        self.lift = nn.Linear(in_dim, hidden_dim, bias=False)
        self.attention = nn.Parameter(torch.randn(hidden_dim) / hidden_dim**0.5)

    def forward(self, x: torch.Tensor, edge_index: torch.Tensor) -> torch.Tensor:
        messages = self.lift(x)  # message depends only on the source vertex
        gates = torch.sigmoid(messages @ self.attention)
        weighted = messages * gates.unsqueeze(1)
        out = torch.zeros_like(messages)
        if edge_index.numel():
            src, dst = edge_index[0], edge_index[1]
            out.index_add_(0, dst, weighted[src])
        return out  # isolated vertices keep the zero vector (empty sum)


class GraphConv(nn.Module):
    """Symmetric-normalized neighborhood averaging with self-loops."""

    def __init__(self, dim: int):
        super().__init__()
        self.weight = nn.Linear(dim, dim)

    def forward(self, h: torch.Tensor, edge_index: torch.Tensor) -> torch.Tensor:
        z = self.weight(h)
        deg = torch.ones(h.shape[0], dtype=h.dtype, device=h.device)  # self-loop
        if edge_index.numel():
            src, dst = edge_index[0], edge_index[1]
            deg.index_add_(0, dst, torch.ones_like(deg[src]))
        inv_sqrt = deg.rsqrt()
        out = z * (inv_sqrt * inv_sqrt).unsqueeze(1)  # self term: 1/deg
        if edge_index.numel():
            out = out.index_add(0, dst, z[src] * (inv_sqrt[src] * inv_sqrt[dst]).unsqueeze(1))
        return out


class ColoristNet(nn.Module):
    def __init__(
        self,
        num_colors: int,
        hidden_dim: int = 128,
        num_layers: int = 3,
        dropout: float = 0.1,
        in_dim: int = 1,
    ):
        super().__init__()
        self.num_colors = num_colors
        self.hidden_dim = hidden_dim
        self.neighbor = NeighborGate(in_dim, hidden_dim)
        self.convs = nn.ModuleList(GraphConv(hidden_dim) for _ in range(num_layers))
        self.dropout = nn.Dropout(dropout)
        self.color_embeddings = nn.Parameter(torch.randn(num_colors, hidden_dim) / hidden_dim**0.5)

    def forward(self, x: torch.Tensor, edge_index: torch.Tensor) -> torch.Tensor:
        """Per-vertex logits over the full color budget: Y = B L^T."""
        h = self.neighbor(x, edge_index)
        for conv in self.convs:
            h = self.dropout(torch.relu(conv(h, edge_index)))
        return h @ self.color_embeddings.t()
