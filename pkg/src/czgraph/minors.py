"""Forbidden-minor machinery: K4/L3 detection with replayable witnesses,
graph canonical forms, and enumeration of stable multigraphs.

K4 is the complete graph on four vertices; L3 is the triangle with every
edge doubled ("loop of 3 loops", genus 4).  A connected graph is of
hyperelliptic type exactly when it has neither as a minor.

Minor search is a memoized DFS over single edge deletions/contractions with
genus and size pruning; negative results are cached by canonical form.  A
series-parallel reduction decides the K4 case quickly and independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations
from typing import Iterable, Iterator

from .graph import (Edge, MultiGraph, PreconditionError, contract_edge,
                    delete_edge, genus, is_bridge)
from .polyring import idkey

PATTERNS = ("K4", "L3")

_PATTERN_GENUS = {"K4": 3, "L3": 4}
_PATTERN_MIN_VERTICES = {"K4": 4, "L3": 3}


# -- canonical forms -------------------------------------------------------


def _refine_colors(n: int, adj: list[dict[int, int]], loops: list[int]) -> list[int]:
    """Iterative refinement of vertex colors by loop count, valence and
    neighbor color multiset; stable coloring limits the permutations tried."""
    colors = [0] * n
    signature = [(loops[v], sum(adj[v].values())) for v in range(n)]
    order = sorted(range(n), key=lambda v: signature[v])
    rank = {sig: i for i, sig in enumerate(sorted(set(signature)))}
    colors = [rank[signature[v]] for v in range(n)]
    for _ in range(n):
        sigs = []
        for v in range(n):
            neigh = sorted((colors[w], m) for w, m in adj[v].items())
            sigs.append((colors[v], tuple(neigh)))
        rank = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        new = [rank[sigs[v]] for v in range(n)]
        if new == colors:
            break
        colors = new
    return colors


def canonical_form(g: MultiGraph) -> tuple:
    """Hashable certificate, equal for two graphs iff they are isomorphic.

    Minimizes the sorted (loop-count, edge-multiset) encoding over all
    vertex relabelings consistent with a refined coloring.
    """
    verts = g.sorted_vertices()
    n = len(verts)
    vidx = {v: i for i, v in enumerate(verts)}
    adj: list[dict[int, int]] = [dict() for _ in range(n)]
    loops = [0] * n
    for e in g.edges:
        a, b = vidx[e.tail], vidx[e.head]
        if a == b:
            loops[a] += 1
        else:
            adj[a][b] = adj[a].get(b, 0) + 1
            adj[b][a] = adj[b].get(a, 0) + 1

    colors = _refine_colors(n, adj, loops)
    classes: dict[int, list[int]] = {}
    for v in range(n):
        classes.setdefault(colors[v], []).append(v)
    class_list = [classes[c] for c in sorted(classes)]

    best: tuple | None = None
    for parts in _class_permutations(class_list):
        pos = [0] * n
        for i, v in enumerate(parts):
            pos[v] = i
        enc_loops = tuple(sorted((pos[v], loops[v]) for v in range(n) if loops[v]))
        enc_edges = []
        for a in range(n):
            for b, m in adj[a].items():
                if a < b:
                    x, y = sorted((pos[a], pos[b]))
                    enc_edges.append((x, y, m))
        enc = (n, enc_loops, tuple(sorted(enc_edges)))
        if best is None or enc < best:
            best = enc
    return best if best is not None else (n, (), ())


def _class_permutations(class_list: list[list[int]]) -> Iterator[list[int]]:
    """All vertex orders that permute only within refinement classes."""
    if not class_list:
        yield []
        return
    head, rest = class_list[0], class_list[1:]
    for perm in permutations(head):
        for tail in _class_permutations(rest):
            yield list(perm) + tail


def are_isomorphic(g1: MultiGraph, g2: MultiGraph) -> bool:
    return canonical_form(g1) == canonical_form(g2)


# -- pattern predicates -----------------------------------------------------


def is_k4(g: MultiGraph) -> bool:
    """Exactly K4: four vertices, six edges, simple, all valences 3."""
    if len(g.vertices) != 4 or len(g.edges) != 6:
        return False
    if any(e.is_loop() for e in g.edges):
        return False
    pairs = {frozenset((e.tail, e.head)) for e in g.edges}
    return len(pairs) == 6


def is_l3(g: MultiGraph) -> bool:
    """Exactly L3: three vertices, each pair joined by exactly two edges."""
    if len(g.vertices) != 3 or len(g.edges) != 6:
        return False
    if any(e.is_loop() for e in g.edges):
        return False
    count: dict[frozenset, int] = {}
    for e in g.edges:
        key = frozenset((e.tail, e.head))
        count[key] = count.get(key, 0) + 1
    return len(count) == 3 and all(m == 2 for m in count.values())


_IS_PATTERN = {"K4": is_k4, "L3": is_l3}


# -- fast K4 test (series-parallel reduction) -------------------------------


def has_k4_minor_fast(g: MultiGraph) -> bool:
    """K4-minor test by degree-<=2 reduction of the underlying simple graph.

    A graph has no K4 minor iff it reduces to nothing by repeatedly deleting
    loops/parallels and eliminating vertices of degree <= 2 (treewidth <= 2);
    a simple graph with minimum degree >= 3 always contains a K4 minor.
    """
    adj: dict[str, set[str]] = {v: set() for v in g.vertices}
    for e in g.edges:
        if not e.is_loop():
            adj[e.tail].add(e.head)
            adj[e.head].add(e.tail)
    changed = True
    while changed:
        changed = False
        for v in list(adj):
            deg = len(adj[v])
            if deg <= 1:
                for w in adj[v]:
                    adj[w].discard(v)
                del adj[v]
                changed = True
            elif deg == 2:
                a, b = sorted(adj[v], key=idkey)
                adj[a].discard(v)
                adj[b].discard(v)
                del adj[v]
                if a != b:
                    adj[a].add(b)
                    adj[b].add(a)
                changed = True
    return bool(adj)


# -- minor search with witnesses --------------------------------------------


@dataclass(frozen=True)
class MinorWitness:
    """Replayable minor map: contract/delete the listed edges in order."""

    pattern: str
    ops: tuple[tuple[str, str], ...]  # ("contract"|"delete", edge_id)

    @property
    def contraction_set(self) -> tuple[str, ...]:
        return tuple(eid for op, eid in self.ops if op == "contract")

    @property
    def deletion_set(self) -> tuple[str, ...]:
        return tuple(eid for op, eid in self.ops if op == "delete")

    def replay(self, g: MultiGraph) -> MultiGraph:
        for op, eid in self.ops:
            g = contract_edge(g, eid) if op == "contract" else delete_edge(g, eid)
        return g

    def verify(self, g: MultiGraph) -> bool:
        try:
            result = self.replay(g)
        except (PreconditionError, Exception):
            return False
        return _IS_PATTERN[self.pattern](result)

    def to_json_dict(self) -> dict:
        return {"pattern": self.pattern,
                "ops": [[op, eid] for op, eid in self.ops],
                "contract": list(self.contraction_set),
                "delete": list(self.deletion_set)}


_negative_cache: dict[tuple[str, tuple], bool] = {}


def clear_minor_cache() -> None:
    _negative_cache.clear()


def _minor_dfs(g: MultiGraph, pattern: str) -> tuple[tuple[str, str], ...] | None:
    if genus(g) < _PATTERN_GENUS[pattern]:
        return None
    if len(g.vertices) < _PATTERN_MIN_VERTICES[pattern] or len(g.edges) < 6:
        return None
    if _IS_PATTERN[pattern](g):
        return ()
    key = (pattern, canonical_form(g))
    if key in _negative_cache:
        return None
    if pattern == "K4" and not has_k4_minor_fast(g):
        _negative_cache[key] = True
        return None
    for e in g.edges:
        if not e.is_loop():
            sub = _minor_dfs(contract_edge(g, e.id), pattern)
            if sub is not None:
                return (("contract", e.id),) + sub
        if not is_bridge(g, e.id):
            sub = _minor_dfs(delete_edge(g, e.id), pattern)
            if sub is not None:
                return (("delete", e.id),) + sub
    _negative_cache[key] = True
    return None


def has_minor(g: MultiGraph, pattern: str) -> tuple[bool, MinorWitness | None]:
    """Decide whether `pattern` (K4 or L3) is a minor of g.

    On success the witness replays on g to an exact copy of the pattern;
    contraction never touches loops and deletion never uses bridges, so
    every intermediate graph stays connected.
    """
    if pattern not in PATTERNS:
        raise PreconditionError(f"unknown pattern {pattern!r}; choose from {PATTERNS}")
    ops = _minor_dfs(g, pattern)
    if ops is None:
        return False, None
    return True, MinorWitness(pattern, ops)


def is_hyperelliptic_type(g: MultiGraph) -> bool:
    """No K4 and no L3 minor."""
    if has_k4_minor_fast(g):
        return False
    found, _ = has_minor(g, "L3")
    return not found


# -- enumeration of stable multigraphs --------------------------------------


def _slot_list(n: int) -> list[tuple[int, int]]:
    slots = [(v, v) for v in range(n)]
    slots += [(u, v) for u in range(n) for v in range(u + 1, n)]
    slots.sort()
    return slots


def _connected_mult(n: int, slots: list[tuple[int, int]], mult: list[int]) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (u, v), m in zip(slots, mult):
        if m and u != v:
            parent[find(u)] = find(v)
    return len({find(v) for v in range(n)}) == 1


def enumerate_graphs(max_edges: int,
                     genus_range: tuple[int, int | None] | None = None) -> Iterator[MultiGraph]:
    """All isomorphism classes of connected stable multigraphs, each once.

    Stable means every valence >= 3 (loops counting twice), which forces
    genus >= 2; the degenerate single-vertex edgeless graph is excluded.
    Emission order is deterministic: by vertex count, then edge count, then
    discovery order of the canonical representative.
    """
    lo, hi = genus_range if genus_range else (0, None)
    seen: set[tuple] = set()
    max_vertices = max(1, (2 * max_edges) // 3)
    for n in range(1, max_vertices + 1):
        slots = _slot_list(n)
        for total in range(max(2, n), max_edges + 1):
            g_val = total - n + 1
            if g_val < max(lo, 2) or (hi is not None and g_val > hi):
                continue
            for combo in combinations_with_replacement(range(len(slots)), total):
                mult = [0] * len(slots)
                for idx in combo:
                    mult[idx] += 1
                val = [0] * n
                for (u, v), m in zip(slots, mult):
                    if u == v:
                        val[u] += 2 * m
                    else:
                        val[u] += m
                        val[v] += m
                if any(x < 3 for x in val):
                    continue
                if not _connected_mult(n, slots, mult):
                    continue
                edges = []
                eid = 1
                for (u, v), m in zip(slots, mult):
                    for _ in range(m):
                        edges.append(Edge(str(eid), str(u + 1), str(v + 1)))
                        eid += 1
                graph = MultiGraph({str(v + 1) for v in range(n)}, edges)
                form = canonical_form(graph)
                if form in seen:
                    continue
                seen.add(form)
                yield graph


def single_step_minors(g: MultiGraph) -> Iterator[tuple[str, str, MultiGraph]]:
    """All connected one-operation minors: (op, edge_id, result)."""
    for e in g.edges:
        if not e.is_loop():
            yield "contract", e.id, contract_edge(g, e.id)
        if not is_bridge(g, e.id):
            yield "delete", e.id, delete_edge(g, e.id)
