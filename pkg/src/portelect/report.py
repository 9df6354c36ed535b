"""Delimited summaries and figures for a graph's view-class structure.

`write_report` renders, into an output directory: per-node class membership
at every depth (CSV), per-depth class counts (CSV), the degree census (CSV),
a class-count curve (PNG), and, for small graphs, a drawing colored by the
deepest classes with port labels at the edge ends (PNG).
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .graph import PortLabeledGraph
from .views import refine_classes, stabilized_partition

DRAW_LIMIT = 200


def write_report(
    g: PortLabeledGraph,
    out_dir: str,
    depth: int | None = None,
    name: str = "graph",
    draw_limit: int = DRAW_LIMIT,
    seed: int = 0,
) -> dict:
    """Write CSVs and figures; returns a summary dict of what was produced."""
    os.makedirs(out_dir, exist_ok=True)
    if depth is None:
        part, depth = stabilized_partition(g)
    else:
        part = refine_classes(g, depth)

    files = {}

    path = os.path.join(out_dir, f"{name}_classes.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "degree"] + [f"class_depth_{d}" for d in range(depth + 1)])
        for v in range(g.n):
            w.writerow([v, g.degree(v)] + [part.at(d)[v] for d in range(depth + 1)])
    files["classes"] = path

    path = os.path.join(out_dir, f"{name}_class_counts.csv")
    counts = [part.num_classes(d) for d in range(depth + 1)]
    singles = [len(part.singletons(d)) for d in range(depth + 1)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["depth", "classes", "singletons"])
        for d in range(depth + 1):
            w.writerow([d, counts[d], singles[d]])
    files["class_counts"] = path

    path = os.path.join(out_dir, f"{name}_degree_census.csv")
    census: dict[int, int] = {}
    for d in g.degrees:
        census[d] = census.get(d, 0) + 1
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["degree", "count"])
        for d in sorted(census):
            w.writerow([d, census[d]])
    files["degree_census"] = path

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(range(depth + 1), counts, where="post", label="view classes")
    ax.step(range(depth + 1), singles, where="post", label="singleton classes")
    ax.set_xlabel("view depth")
    ax.set_ylabel("count")
    ax.set_title(f"view-class refinement (n={g.n})")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, f"{name}_class_counts.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    files["class_counts_png"] = path

    drawn = False
    if g.n <= draw_limit:
        files["drawing"] = _draw_graph(g, part, depth, out_dir, name, seed)
        drawn = True

    return {
        "nodes": g.n,
        "edges": g.edge_count,
        "depth": depth,
        "classes_at_depth": counts[-1],
        "singletons_at_depth": singles[-1],
        "drawing": drawn,
        "files": files,
    }


def _draw_graph(
    g: PortLabeledGraph, part, depth: int, out_dir: str, name: str, seed: int
) -> str:
    import networkx as nx

    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from((u, v) for u, _, v, _ in g.edges())
    pos = nx.spring_layout(nxg, seed=seed)
    ids = part.at(depth)
    fig, ax = plt.subplots(figsize=(7, 7))
    nx.draw_networkx_edges(nxg, pos, ax=ax, edge_color="0.6")
    nx.draw_networkx_nodes(
        nxg, pos, ax=ax, node_size=260, node_color=[ids[v] for v in range(g.n)],
        cmap="viridis",
    )
    nx.draw_networkx_labels(nxg, pos, ax=ax, font_size=8, font_color="white")
    if g.n <= 30:
        # port numbers sit near their endpoint, a third of the way along the edge
        for u, p, v, q in g.edges():
            (xu, yu), (xv, yv) = pos[u], pos[v]
            ax.text(xu + (xv - xu) * 0.22, yu + (yv - yu) * 0.22, str(p),
                    fontsize=7, color="firebrick", ha="center")
            ax.text(xv + (xu - xv) * 0.22, yv + (yu - yv) * 0.22, str(q),
                    fontsize=7, color="firebrick", ha="center")
    ax.set_title(f"nodes colored by depth-{depth} view class")
    ax.set_axis_off()
    fig.tight_layout()
    path = os.path.join(out_dir, f"{name}_drawing.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
