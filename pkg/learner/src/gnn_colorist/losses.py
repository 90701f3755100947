"""Training objective: soft same-color penalty plus a color-count regularizer.

The discrete objective charges unit energy for every edge whose endpoints
share a color.  Relaxing colors to per-vertex probability vectors makes the
edge term the inner product of the endpoint distributions, summed once per
undirected edge and scaled by the interaction strength J; it vanishes exactly
when every edge's endpoints have disjoint support.  The sign is positive so
that minimization separates adjacent vertices (a reward-shaped sign would
pull them together).

The regularizer estimates the number of active colors as the sum over colors
of the maximum assignment probability any vertex gives that color, and
penalizes the squared deviation from the label color count, normalized by the
color budget.
"""

from __future__ import annotations

import torch


def soft_assignment(logits: torch.Tensor, temperature: float = 1.0) -> torch.Tensor:
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    return torch.softmax(logits / temperature, dim=1)


def potts_loss(assignment: torch.Tensor, und_edges: torch.Tensor, interaction: float = 1.0) -> torch.Tensor:
    """J * sum over undirected edges of p_u . p_v (each edge counted once)."""
    if interaction <= 0:
        raise ValueError("interaction strength must be positive")
    if und_edges.numel() == 0:
        return assignment.new_zeros(())
    pu = assignment[und_edges[:, 0]]
    pv = assignment[und_edges[:, 1]]
    return interaction * (pu * pv).sum()


def color_count_loss(assignment: torch.Tensor, label_count: int, budget: int) -> torch.Tensor:
    """((sum_c max_v p_{v,c}) - label_count)^2 / budget for one graph."""
    if label_count < 1:
        raise ValueError("label color count must be at least 1")
    usage = assignment.max(dim=0).values  # soft per-color usage
    estimated = usage.sum()
    return (estimated - label_count) ** 2 / budget


def total_loss(
    logits: torch.Tensor,
    und_edges: torch.Tensor,
    graph_of: torch.Tensor,
    s_labels: list[int],
    budget: int,
    temperature: float = 1.0,
    interaction: float = 1.0,
    count_weight: float = 0.1,
) -> torch.Tensor:
    """Batch objective, averaged per graph: edges separate, counts anchor.

    Only the first `budget` logit columns participate (the batch color
    budget is the largest label color count among the merged graphs).
    """
    assignment = soft_assignment(logits[:, :budget], temperature)
    loss = potts_loss(assignment, und_edges, interaction)
    for gi, label_count in enumerate(s_labels):
        vertices = graph_of == gi
        if vertices.any() and label_count >= 1:
            loss = loss + count_weight * color_count_loss(
                assignment[vertices], label_count, budget
            )
    return loss / max(len(s_labels), 1)
