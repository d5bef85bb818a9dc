"""Connected multigraphs with loops and parallel edges, and the polynomial
polarization matrix attached to a cycle basis.

Edges carry string ids and a stored (tail, head) orientation.  A
CycleBasisContext fixes an edge ordering e_1..e_n whose last n-g edges form
a spanning tree; the fundamental cycles of the g non-tree edges give a basis
of the cycle space and the symmetric g x g matrix Q whose entry q_ij is the
signed sum of x_e over edges traversed by both cycles.

All structures are immutable values.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from .polyring import IntPolynomial, idkey


class GraphError(ValueError):
    pass


class ParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PreconditionError(GraphError):
    pass


class Edge(NamedTuple):
    id: str
    tail: str
    head: str

    def is_loop(self) -> bool:
        return self.tail == self.head

    def other(self, v: str) -> str:
        if v == self.tail:
            return self.head
        if v == self.head:
            return self.tail
        raise KeyError(v)


class MultiGraph:
    """Connected multigraph; loops and parallel edges allowed.

    Construction validates connectivity and edge-id uniqueness.  Vertices
    mentioned only in `vertices` (isolated) make the graph disconnected
    unless they are the whole graph.
    """

    __slots__ = ("vertices", "edges", "_by_id", "_incidence")

    def __init__(self, vertices: Iterable[str], edges: Iterable[Edge | tuple]):
        vs = {str(v) for v in vertices}
        es = []
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(str(e[0]), str(e[1]), str(e[2]))
            else:
                e = Edge(str(e.id), str(e.tail), str(e.head))
            es.append(e)
            vs.add(e.tail)
            vs.add(e.head)
        es.sort(key=lambda e: idkey(e.id))
        ids = [e.id for e in es]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise GraphError(f"duplicate edge ids: {dup}")
        if not vs:
            raise GraphError("graph needs at least one vertex")
        self.vertices = frozenset(vs)
        self.edges = tuple(es)
        self._by_id = {e.id: e for e in es}
        inc: dict[str, list[Edge]] = {v: [] for v in vs}
        for e in es:
            inc[e.tail].append(e)
            if not e.is_loop():
                inc[e.head].append(e)
        self._incidence = inc
        if not self._connected():
            raise GraphError("graph is not connected")

    def _connected(self) -> bool:
        start = next(iter(self.vertices))
        seen = {start}
        todo = deque([start])
        while todo:
            u = todo.popleft()
            for e in self._incidence[u]:
                w = e.other(u)
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen == self.vertices

    # -- basic queries ---------------------------------------------------

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._by_id[str(edge_id)]
        except KeyError:
            raise GraphError(f"no edge with id {edge_id!r}") from None

    def has_edge(self, edge_id: str) -> bool:
        return str(edge_id) in self._by_id

    def edge_ids(self) -> list[str]:
        return [e.id for e in self.edges]

    def incident(self, v: str) -> list[Edge]:
        return list(self._incidence[v])

    def valence(self, v: str) -> int:
        """Number of half-edges at v; a loop contributes 2."""
        total = 0
        for e in self._incidence[v]:
            total += 2 if e.is_loop() else 1
        return total

    def sorted_vertices(self) -> list[str]:
        return sorted(self.vertices, key=idkey)

    def is_stable(self) -> bool:
        return all(self.valence(v) >= 3 for v in self.vertices)

    def __eq__(self, other) -> bool:
        return (isinstance(other, MultiGraph) and self.vertices == other.vertices
                and self.edges == other.edges)

    def __hash__(self) -> int:
        return hash((self.vertices, self.edges))

    def __repr__(self) -> str:
        return f"MultiGraph(|V|={len(self.vertices)}, edges={[e.id for e in self.edges]})"


def genus(g: MultiGraph) -> int:
    """First Betti number |E| - |V| + 1 of a connected graph."""
    return len(g.edges) - len(g.vertices) + 1


def is_bridge(g: MultiGraph, edge_id: str) -> bool:
    e = g.edge(edge_id)
    if e.is_loop():
        return False
    remaining = [x for x in g.edges if x.id != e.id]
    seen = {e.tail}
    todo = deque([e.tail])
    inc: dict[str, list[Edge]] = {}
    for x in remaining:
        inc.setdefault(x.tail, []).append(x)
        inc.setdefault(x.head, []).append(x)
    while todo:
        u = todo.popleft()
        for x in inc.get(u, []):
            w = x.other(u)
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return e.head not in seen


def bridges(g: MultiGraph) -> list[str]:
    return [e.id for e in g.edges if is_bridge(g, e.id)]


def contract_edge(g: MultiGraph, edge_id: str) -> MultiGraph:
    """Contract a non-loop edge; genus is preserved, |V| and |E| drop by 1.

    The surviving vertex is the endpoint with the smaller id.  Edges
    parallel to the contracted one become loops.
    """
    e = g.edge(edge_id)
    if e.is_loop():
        raise PreconditionError(f"cannot contract loop edge {edge_id!r}")
    keep, gone = sorted((e.tail, e.head), key=idkey)
    new_edges = []
    for x in g.edges:
        if x.id == e.id:
            continue
        t = keep if x.tail == gone else x.tail
        h = keep if x.head == gone else x.head
        new_edges.append(Edge(x.id, t, h))
    return MultiGraph(g.vertices - {gone}, new_edges)


def delete_edge(g: MultiGraph, edge_id: str) -> MultiGraph:
    """Delete an edge; rejected if the deletion would disconnect the graph."""
    e = g.edge(edge_id)
    if is_bridge(g, edge_id):
        raise PreconditionError(f"deleting bridge {edge_id!r} would disconnect the graph")
    survivors = [x for x in g.edges if x.id != e.id]
    touched = {x.tail for x in survivors} | {x.head for x in survivors}
    if len(g.vertices) > 1 and touched != g.vertices:
        raise PreconditionError(
            f"deleting edge {edge_id!r} would isolate a vertex")
    return MultiGraph(g.vertices, survivors)


def subdivide_edge(g: MultiGraph, edge_id: str,
                   new_ids: tuple[str, str] | None = None) -> MultiGraph:
    """Replace edge f = (t, h) by t -> m -> h through a fresh 2-valent vertex.

    Default half ids are f+"a" and f+"b"; the new vertex id is "m"+f.
    """
    e = g.edge(edge_id)
    id1, id2 = new_ids if new_ids else (e.id + "a", e.id + "b")
    for nid in (id1, id2):
        if g.has_edge(nid):
            raise GraphError(f"subdivision id {nid!r} already in use")
    mid = f"m{e.id}"
    while mid in g.vertices:
        mid += "_"
    new_edges = [x for x in g.edges if x.id != e.id]
    new_edges.append(Edge(id1, e.tail, mid))
    new_edges.append(Edge(id2, mid, e.head))
    return MultiGraph(g.vertices | {mid}, new_edges)


def blocks(g: MultiGraph) -> list[MultiGraph]:
    """Biconnected components (blocks); each loop is its own block.

    The genera of the blocks sum to the genus of the graph.
    """
    loops = [e for e in g.edges if e.is_loop()]
    rest = [e for e in g.edges if not e.is_loop()]
    out = [MultiGraph({e.tail}, [e]) for e in loops]

    inc: dict[str, list[Edge]] = {v: [] for v in g.vertices}
    for e in rest:
        inc[e.tail].append(e)
        inc[e.head].append(e)

    index: dict[str, int] = {}
    low: dict[str, int] = {}
    counter = [0]
    stack: list[Edge] = []
    used: set[str] = set()

    def emit(upto: Edge) -> None:
        comp = []
        while True:
            e = stack.pop()
            comp.append(e)
            if e.id == upto.id:
                break
        vs = {e.tail for e in comp} | {e.head for e in comp}
        out.append(MultiGraph(vs, comp))

    def dfs(root: str) -> None:
        # iterative DFS so deep graphs cannot blow the recursion limit
        work = [(root, None, iter(inc[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        while work:
            v, parent_edge, it = work[-1]
            advanced = False
            for e in it:
                if e.id in used:
                    continue
                w = e.other(v)
                if w not in index:
                    used.add(e.id)
                    stack.append(e)
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    work.append((w, e, iter(inc[w])))
                    advanced = True
                    break
                elif index[w] < index[v]:
                    used.add(e.id)
                    stack.append(e)
                    low[v] = min(low[v], index[w])
            if not advanced:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                    if low[v] >= index[u]:
                        emit(parent_edge)

    roots = [v for v in g.sorted_vertices() if inc[v]]
    if roots:
        dfs(roots[0])
    out.sort(key=lambda b: idkey(b.edges[0].id))
    return out


def two_edge_connectivize(g: MultiGraph) -> MultiGraph:
    """Contract every separating (bridge) edge; genus is unchanged."""
    while True:
        bs = bridges(g)
        if not bs:
            return g
        g = contract_edge(g, bs[0])


def stabilize(g: MultiGraph) -> MultiGraph:
    """The unique stable graph tropically equivalent to g (genus >= 2 only).

    Removes 1-valent vertices and smooths 2-valent ones until every vertex
    has valence >= 3 (loops count twice).  Smoothing merges the two distinct
    incident edges, keeping the smaller edge id.  Idempotent.
    """
    if genus(g) < 2:
        raise PreconditionError(f"stabilize needs genus >= 2, got {genus(g)}")
    while True:
        leaf = next((v for v in g.sorted_vertices() if g.valence(v) == 1), None)
        if leaf is not None:
            e = g.incident(leaf)[0]
            g = MultiGraph(g.vertices - {leaf}, [x for x in g.edges if x.id != e.id])
            continue
        mid = next((v for v in g.sorted_vertices()
                    if g.valence(v) == 2 and len(g.vertices) > 1), None)
        if mid is None:
            return g
        inc = g.incident(mid)
        if len(inc) != 2:
            raise GraphError(f"2-valent vertex {mid!r} with a loop cannot be smoothed")
        e1, e2 = sorted(inc, key=lambda e: idkey(e.id))
        a, b = e1.other(mid), e2.other(mid)
        merged = Edge(e1.id, a, b)
        keep = [x for x in g.edges if x.id not in (e1.id, e2.id)]
        g = MultiGraph(g.vertices - {mid}, keep + [merged])


# -- cycle basis and the polynomial matrix Q ------------------------------


@dataclass(frozen=True)
class CycleBasisContext:
    """Edge ordering, spanning tree, fundamental cycles and the matrix Q.

    order[:g] are the non-tree (basis) edges e_1..e_g; order[g:] is the
    spanning tree.  cycles[j] maps edge ids to +1/-1 signs of the j-th
    fundamental cycle, oriented along its defining edge.  Q[i][j] is the
    linear form sum_e s_i(e) s_j(e) x_e.
    """

    graph: MultiGraph
    order: tuple[str, ...]
    tree: tuple[str, ...]
    cycles: tuple[Mapping[str, int], ...]
    Q: tuple[tuple[IntPolynomial, ...], ...]

    @property
    def g(self) -> int:
        return len(self.cycles)

    def basis_edges(self) -> tuple[str, ...]:
        return self.order[:self.g]

    def beta_class(self, edge_id: str) -> tuple[int, ...]:
        """Signs (s_1(e), ..., s_g(e)): the homology class dual to the edge,
        written in the beta basis.  Non-tree edge e_j gives the unit vector j;
        a bridge gives the zero vector."""
        edge_id = str(edge_id)
        self.graph.edge(edge_id)
        return tuple(c.get(edge_id, 0) for c in self.cycles)

    def q_entry(self, i: int, j: int) -> IntPolynomial:
        """1-based access matching the written matrix."""
        return self.Q[i - 1][j - 1]


def _default_spanning_tree(g: MultiGraph) -> list[str]:
    """BFS from the least vertex id, scanning incident edges by least id."""
    start = min(g.vertices, key=idkey)
    seen = {start}
    tree: list[str] = []
    todo = deque([start])
    while todo:
        u = todo.popleft()
        for e in sorted(g.incident(u), key=lambda e: idkey(e.id)):
            w = e.other(u)
            if w not in seen:
                seen.add(w)
                tree.append(e.id)
                todo.append(w)
    return tree


def _validate_tree(g: MultiGraph, tree_ids: Iterable[str]) -> list[str]:
    ids = [str(t) for t in tree_ids]
    if len(set(ids)) != len(ids):
        raise PreconditionError("tree hint repeats edges")
    for t in ids:
        g.edge(t)
    if len(ids) != len(g.vertices) - 1:
        raise PreconditionError(
            f"tree hint has {len(ids)} edges, need {len(g.vertices) - 1}")
    # spanning and acyclic follows from size + connectivity over all vertices
    seen: set[str] = set()
    parent: dict[str, str] = {}
    edges = [g.edge(t) for t in ids]
    if any(e.is_loop() for e in edges):
        raise PreconditionError("tree hint contains a loop")
    start = min(g.vertices, key=idkey)
    seen.add(start)
    todo = deque([start])
    inc: dict[str, list[Edge]] = {}
    for e in edges:
        inc.setdefault(e.tail, []).append(e)
        inc.setdefault(e.head, []).append(e)
    while todo:
        u = todo.popleft()
        for e in inc.get(u, []):
            w = e.other(u)
            if w not in seen:
                seen.add(w)
                todo.append(w)
    if seen != g.vertices:
        raise PreconditionError("tree hint does not span the graph")
    return ids


def _tree_path_signs(g: MultiGraph, tree_ids: list[str],
                     src: str, dst: str) -> dict[str, int]:
    """Signed edges of the unique tree path src -> dst."""
    if src == dst:
        return {}
    inc: dict[str, list[Edge]] = {}
    for t in tree_ids:
        e = g.edge(t)
        inc.setdefault(e.tail, []).append(e)
        inc.setdefault(e.head, []).append(e)
    prev: dict[str, tuple[str, Edge]] = {}
    seen = {src}
    todo = deque([src])
    while todo:
        u = todo.popleft()
        if u == dst:
            break
        for e in inc.get(u, []):
            w = e.other(u)
            if w not in seen:
                seen.add(w)
                prev[w] = (u, e)
                todo.append(w)
    signs: dict[str, int] = {}
    v = dst
    while v != src:
        u, e = prev[v]
        signs[e.id] = 1 if (e.tail, e.head) == (u, v) else -1
        v = u
    return signs


def build_cycle_context(g: MultiGraph, tree_hint: Iterable[str] | None = None,
                        basis_order: Iterable[str] | None = None) -> CycleBasisContext:
    """Build the cycle basis and Q for a connected graph.

    Without a hint the spanning tree is chosen deterministically (BFS from
    the least vertex id, preferring least edge ids).  basis_order may pin
    the ordering of the non-tree edges; by default they are sorted by id.
    """
    tree = _validate_tree(g, tree_hint) if tree_hint is not None else _default_spanning_tree(g)
    tree_set = set(tree)
    nontree = [e.id for e in g.edges if e.id not in tree_set]
    if basis_order is not None:
        basis = [str(b) for b in basis_order]
        if sorted(basis, key=idkey) != sorted(nontree, key=idkey):
            raise PreconditionError("basis_order must list exactly the non-tree edges")
    else:
        basis = sorted(nontree, key=idkey)
    tree_sorted = sorted(tree, key=idkey)

    cycles = []
    for b in basis:
        e = g.edge(b)
        signs = {e.id: 1}
        if not e.is_loop():
            signs.update(_tree_path_signs(g, tree_sorted, e.head, e.tail))
        cycles.append(signs)

    gn = len(basis)
    Q = []
    for i in range(gn):
        row = []
        for j in range(gn):
            entry = IntPolynomial.zero()
            ci, cj = cycles[i], cycles[j]
            small, big = (ci, cj) if len(ci) <= len(cj) else (cj, ci)
            for eid, s in small.items():
                t = big.get(eid)
                if t:
                    entry = entry + IntPolynomial.variable(eid, s * t)
            row.append(entry)
        Q.append(tuple(row))

    return CycleBasisContext(
        graph=g,
        order=tuple(basis + tree_sorted),
        tree=tuple(tree_sorted),
        cycles=tuple(dict(c) for c in cycles),
        Q=tuple(Q),
    )


# -- tropical curves -------------------------------------------------------


@dataclass(frozen=True)
class TropicalCurve:
    """A connected multigraph with positive integer edge lengths."""

    graph: MultiGraph
    lengths: Mapping[str, int]

    def __post_init__(self):
        lens = {str(k): int(v) for k, v in self.lengths.items()}
        for e in self.graph.edges:
            if e.id not in lens:
                raise PreconditionError(f"edge {e.id!r} has no length")
            if lens[e.id] < 1:
                raise PreconditionError(f"edge {e.id!r} has non-positive length")
        extra = set(lens) - {e.id for e in self.graph.edges}
        if extra:
            raise PreconditionError(f"lengths given for unknown edges {sorted(extra)}")
        object.__setattr__(self, "lengths", lens)

    def genus(self) -> int:
        return genus(self.graph)


def specialize_Q(ctx: CycleBasisContext, curve: TropicalCurve) -> list[list[int]]:
    """Evaluate Q at the curve's edge lengths; positive definite integer matrix."""
    if curve.graph != ctx.graph:
        raise PreconditionError("curve does not match the context's graph")
    return [[entry.evaluate(curve.lengths) for entry in row] for row in ctx.Q]


# -- text and JSON formats -------------------------------------------------


def parse_graph_text(text: str) -> tuple[MultiGraph, dict[str, int] | None]:
    """Parse the line format: 'v <id>' and 'e <id> <tail> <head> [length]'.

    '#' starts a comment.  Returns the graph and, when any edge carried a
    length, the (complete) length map.
    """
    vertices: list[str] = []
    edges: list[Edge] = []
    lengths: dict[str, int] = {}
    touched = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "v":
            if len(parts) != 2:
                raise ParseError("vertex line needs exactly one id", lineno)
            vertices.append(parts[1])
        elif parts[0] == "e":
            if len(parts) not in (4, 5):
                raise ParseError("edge line needs: e <id> <tail> <head> [length]", lineno)
            eid, tail, head = parts[1], parts[2], parts[3]
            if any(x.id == eid for x in edges):
                raise ParseError(f"duplicate edge id {eid!r}", lineno)
            edges.append(Edge(eid, tail, head))
            if len(parts) == 5:
                try:
                    lengths[eid] = int(parts[4])
                except ValueError:
                    raise ParseError(f"bad length {parts[4]!r}", lineno) from None
                touched = True
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", lineno)
    if not edges and not vertices:
        raise ParseError("empty graph file")
    # semantic failures (disconnected graph) propagate as GraphError, which
    # callers treat as precondition violations rather than parse errors
    graph = MultiGraph(vertices, edges)
    if touched:
        missing = [e.id for e in graph.edges if e.id not in lengths]
        if missing:
            raise ParseError(f"lengths missing for edges {missing}")
        return graph, lengths
    return graph, None


def render_graph_text(g: MultiGraph, lengths: Mapping[str, int] | None = None) -> str:
    """Canonical text form; parse(render(g)) reproduces g bit-exactly."""
    lines = [f"v {v}" for v in g.sorted_vertices()]
    for e in g.edges:
        if lengths is not None:
            lines.append(f"e {e.id} {e.tail} {e.head} {int(lengths[e.id])}")
        else:
            lines.append(f"e {e.id} {e.tail} {e.head}")
    return "\n".join(lines) + "\n"


def graph_to_json_dict(g: MultiGraph, lengths: Mapping[str, int] | None = None) -> dict:
    edges = []
    for e in g.edges:
        item = {"id": e.id, "tail": e.tail, "head": e.head}
        if lengths is not None:
            item["length"] = int(lengths[e.id])
        edges.append(item)
    return {"vertices": g.sorted_vertices(), "edges": edges}


def graph_from_json_dict(data: dict) -> tuple[MultiGraph, dict[str, int] | None]:
    try:
        vertices = [str(v) for v in data.get("vertices", [])]
        raw_edges = data["edges"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad graph JSON: {exc}") from None
    edges = []
    lengths: dict[str, int] = {}
    touched = False
    for item in raw_edges:
        edges.append(Edge(str(item["id"]), str(item["tail"]), str(item["head"])))
        if "length" in item:
            lengths[str(item["id"])] = int(item["length"])
            touched = True
    graph = MultiGraph(vertices, edges)
    if touched:
        missing = [e.id for e in graph.edges if e.id not in lengths]
        if missing:
            raise ParseError(f"lengths missing for edges {missing}")
        return graph, lengths
    return graph, None


def parse_graph_json(text: str) -> tuple[MultiGraph, dict[str, int] | None]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON: {exc.msg}", exc.lineno) from None
    return graph_from_json_dict(data)


def load_graph_file(path: str) -> tuple[MultiGraph, dict[str, int] | None]:
    """Load either the text or the JSON graph format, by sniffing."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_graph_json(text)
    return parse_graph_text(text)
