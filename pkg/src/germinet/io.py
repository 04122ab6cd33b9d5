"""Edge list and ground-truth community file parsing and writing.

The formats follow the SNAP conventions: edge lists are one "u v" pair per
line (tabs or spaces, '#' comments), community files hold one community per
line as whitespace-separated node ids. Files speak the original id space;
graphs remap internally and keep the mapping.
"""

from __future__ import annotations

import logging

from .errors import DataError
from .graph import Graph, build_graph

logger = logging.getLogger(__name__)


def parse_edge_list(path) -> Graph:
    """Read a SNAP-style edge list; malformed lines report their number."""
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer node id in {line!r}")
            if u < 0 or v < 0:
                raise DataError(f"{path}:{lineno}: negative node id")
            edges.append((u, v))
    if not edges:
        raise DataError(f"{path}: no edges found")
    return build_graph(edges)


def parse_communities(path, g: Graph) -> list[list[int]]:
    """Read a community file, resolving ids through the graph's mapping.

    Unknown ids are skipped with a warning; communities losing every node
    are dropped with a warning. Returned node ids are the graph's compact
    ids.
    """
    communities = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            members = []
            skipped = 0
            for token in line.split():
                try:
                    original = int(token)
                except ValueError:
                    raise DataError(f"{path}:{lineno}: non-integer node id {token!r}")
                node = g.id_map.get(original)
                if node is None:
                    skipped += 1
                    continue
                members.append(node)
            if skipped:
                logger.warning(
                    "%s:%d: skipped %d node ids absent from the graph",
                    path, lineno, skipped,
                )
            if members:
                communities.append(members)
            else:
                logger.warning("%s:%d: community had no resolvable nodes", path, lineno)
    return communities


def write_edge_list(g: Graph, path, comment: str | None = None) -> None:
    """Write the graph as an edge list in original node ids."""
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        for i in range(g.m):
            a = int(g.original_ids[g.edges_u[i]])
            b = int(g.original_ids[g.edges_v[i]])
            fh.write(f"{a}\t{b}\n")


def write_communities(g: Graph, communities, path) -> None:
    """Write communities (compact ids) as one line per community, original ids."""
    with open(path, "w", encoding="utf-8") as fh:
        for members in communities:
            fh.write(" ".join(str(int(g.original_ids[v])) for v in members))
            fh.write("\n")
