"""Weighted digraphs and the personalized PageRank solver.

Graphs here are per-document and small, so adjacency dicts beat any sparse
matrix machinery.  Undirected relations are stored as two symmetric edges.
"""

from __future__ import annotations

import warnings

from .errors import InvalidParameter, NoConvergenceWarning
from .textproc import ProcessedDocument, Token

DAMPING = 0.85
TOL = 1e-7
MAX_ITER = 200


class WeightedDigraph:
    def __init__(self):
        self._adj: dict[str, dict[str, float]] = {}

    def add_node(self, label: str) -> None:
        self._adj.setdefault(label, {})

    def add_edge(self, u: str, v: str, weight: float = 1.0) -> None:
        """Accumulate weight on the directed edge u -> v."""
        if u == v:
            raise InvalidParameter(f"self-loop on {u!r}")
        if weight <= 0:
            raise InvalidParameter(f"edge weight must be positive, got {weight}")
        self.add_node(u)
        self.add_node(v)
        self._adj[u][v] = self._adj[u].get(v, 0.0) + weight

    def set_edge(self, u: str, v: str, weight: float) -> None:
        if u == v:
            raise InvalidParameter(f"self-loop on {u!r}")
        if weight <= 0:
            raise InvalidParameter(f"edge weight must be positive, got {weight}")
        self.add_node(u)
        self.add_node(v)
        self._adj[u][v] = weight

    def add_symmetric_edge(self, u: str, v: str, weight: float = 1.0) -> None:
        self.add_edge(u, v, weight)
        self.add_edge(v, u, weight)

    @property
    def nodes(self) -> list[str]:
        return list(self._adj)

    @property
    def n_nodes(self) -> int:
        return len(self._adj)

    def out_edges(self, u: str) -> dict[str, float]:
        return self._adj[u]

    def edge_weight(self, u: str, v: str) -> float:
        return self._adj.get(u, {}).get(v, 0.0)

    def out_weight(self, u: str) -> float:
        return sum(self._adj[u].values())

    def to_dot(self) -> str:
        lines = ["digraph g {"]
        for u in self._adj:
            lines.append(f'  "{u}";')
        for u, targets in self._adj.items():
            for v, w in targets.items():
                lines.append(f'  "{u}" -> "{v}" [weight={w:g}];')
        lines.append("}")
        return "\n".join(lines)


def default_node_filter(token: Token) -> bool:
    return token.is_alphabetic and not token.is_stopword


def build_cooccurrence_graph(
    doc: ProcessedDocument,
    window: int = 2,
    weighted: bool = True,
    node_filter=default_node_filter,
) -> WeightedDigraph:
    """Symmetric word graph: nodes are stems of tokens passing ``node_filter``,
    edges link pairs within ``window`` positions inside one sentence."""
    if window < 2:
        raise InvalidParameter(f"window must be >= 2, got {window}")
    graph = WeightedDigraph()
    for start, end in doc.sentences:
        toks = [t for t in doc.tokens[start:end] if node_filter(t)]
        for t in toks:
            graph.add_node(t.stem)
        for i, a in enumerate(toks):
            for b in toks[i + 1 :]:
                if b.position - a.position > window - 1:
                    break
                if a.stem == b.stem:
                    continue
                if weighted:
                    graph.add_symmetric_edge(a.stem, b.stem, 1.0)
                else:
                    graph.set_edge(a.stem, b.stem, 1.0)
                    graph.set_edge(b.stem, a.stem, 1.0)
    return graph


def pagerank(
    graph: WeightedDigraph,
    damping: float = DAMPING,
    personalization: dict[str, float] | None = None,
    tol: float = TOL,
    max_iter: int = MAX_ITER,
) -> dict[str, float]:
    """Personalized PageRank by power iteration from a uniform start.

    Dangling mass is redistributed according to the personalization vector
    each sweep, so returned scores always sum to 1.
    """
    nodes = graph.nodes
    n = len(nodes)
    if n == 0:
        raise InvalidParameter("graph has no nodes")
    if not 0 < damping < 1:
        raise InvalidParameter(f"damping must be in (0, 1), got {damping}")
    if tol <= 0:
        raise InvalidParameter(f"tol must be positive, got {tol}")

    if personalization is None:
        p = {v: 1.0 / n for v in nodes}
    else:
        mass = sum(max(personalization.get(v, 0.0), 0.0) for v in nodes)
        if mass <= 0:
            raise InvalidParameter("personalization has no positive mass on graph nodes")
        p = {v: max(personalization.get(v, 0.0), 0.0) / mass for v in nodes}

    out_weight = {v: graph.out_weight(v) for v in nodes}
    scores = {v: 1.0 / n for v in nodes}
    for _ in range(max_iter):
        dangling = sum(scores[v] for v in nodes if out_weight[v] == 0.0)
        new = {v: (1.0 - damping) * p[v] + damping * dangling * p[v] for v in nodes}
        for u in nodes:
            if out_weight[u] == 0.0:
                continue
            share = damping * scores[u] / out_weight[u]
            for v, w in graph.out_edges(u).items():
                new[v] += share * w
        residual = sum(abs(new[v] - scores[v]) for v in nodes)
        scores = new
        if residual < tol:
            break
    else:
        warnings.warn(
            f"PageRank did not reach tol={tol} within {max_iter} iterations "
            f"(residual {residual:.3e})",
            NoConvergenceWarning,
        )
    return scores
