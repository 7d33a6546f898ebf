"""Bratteli diagram data model: incidence matrices, vertex classes, cylinders.

Conventions, fixed once and validated against the worked examples:

* ``F[v][w]`` is the number of edges from vertex v at level n+1 to vertex
  w at level n.  ``A = F^T`` drives the walk digraph: a path moves v -> w
  exactly when ``A[v][w] > 0``.
* The root sits at level 0 and is joined to vertex w at level 1 by as
  many edges as the column sum of F at w, i.e. the diagram looks
  stationary from the top.  Level-N path counts then satisfy
  ``h^{(N+1)} = F h^{(N)}`` with ``h^{(1)}`` the column sums, and the
  dyadic odometer has 2^N cylinders of measure 2^{-N} at level N.
* Class order: ``beta precedes alpha`` iff beta reaches alpha in the walk
  digraph (beta is upstream).  This is the orientation under which the
  published example diagrams classify as printed.

Vertices are 0-based internally; reports print them 1-based.
"""

import os
from dataclasses import dataclass

DEFAULT_PATH_CAP = int(os.environ.get("BRATTELI_MAX_CELLS", str(10**6)))


class EnumerationTooLargeError(Exception):
    """A cylinder enumeration exceeds the configured cap."""


class DiagramError(ValueError):
    """Malformed diagram data."""


def _validate_matrix(matrix):
    if not matrix or any(len(row) != len(matrix) for row in matrix):
        raise DiagramError("incidence matrix must be square and non-empty")
    for row in matrix:
        for entry in row:
            if not isinstance(entry, int) or entry < 0:
                raise DiagramError("incidence entries must be non-negative integers")
    n = len(matrix)
    for v in range(n):
        if all(matrix[v][w] == 0 for w in range(n)):
            raise DiagramError(f"vertex {v + 1} has no outgoing edge (zero row)")
        if all(matrix[w][v] == 0 for w in range(n)):
            raise DiagramError(f"vertex {v + 1} has no incoming edge (zero column)")


class StationaryDiagram:
    """Stationary diagram: one incidence matrix repeated at every level."""

    def __init__(self, matrix, name=None):
        matrix = tuple(tuple(int(e) for e in row) for row in matrix)
        _validate_matrix(matrix)
        self.F = matrix
        self.vertex_count = len(matrix)
        self.name = name

    stationary = True

    def vertices_at(self, level):
        return self.vertex_count

    def matrix_at(self, level):
        """Incidence between level+1 and level, for level >= 1."""
        return self.F

    def A(self):
        n = self.vertex_count
        return tuple(tuple(self.F[w][v] for w in range(n)) for v in range(n))

    def root_edges(self):
        n = self.vertex_count
        return tuple(sum(self.F[v][w] for v in range(n)) for w in range(n))

    def path_counts(self, level):
        """h^{(N)}: number of root paths of length `level` ending at each vertex."""
        if level < 1:
            raise ValueError("level must be >= 1")
        h = list(self.root_edges())
        for _ in range(level - 1):
            h = [sum(self.F[v][w] * h[w] for w in range(self.vertex_count))
                 for v in range(self.vertex_count)]
        return tuple(h)

    def telescope(self, k):
        """Diagram with incidence F^k.  Cylinder measures at level k*N agree
        with the original; the class structure is preserved whenever every
        class is primitive (a periodic class splits under powers)."""
        if k < 1:
            raise ValueError("telescoping step must be >= 1")
        if k == 1:
            return self
        n = self.vertex_count
        power = self.F
        for _ in range(k - 1):
            power = tuple(
                tuple(sum(power[i][t] * self.F[t][j] for t in range(n)) for j in range(n))
                for i in range(n)
            )
        return StationaryDiagram(power, name=f"{self.name or 'diagram'}^[{k}]")

    def restrict(self, vertices):
        """Subdiagram on a vertex subset.  Returns (diagram, old->new map)."""
        vertices = tuple(sorted(vertices))
        index = {v: i for i, v in enumerate(vertices)}
        sub = tuple(tuple(self.F[v][w] for w in vertices) for v in vertices)
        _validate_matrix(sub)
        return StationaryDiagram(sub), index

    def to_json_dict(self):
        doc = {
            "schema_version": 1,
            "kind": "stationary",
            "matrix": [list(row) for row in self.F],
        }
        if self.name:
            doc["metadata"] = {"name": self.name}
        return doc

    def __eq__(self, other):
        return isinstance(other, StationaryDiagram) and self.F == other.F

    def __hash__(self):
        return hash(self.F)

    def __repr__(self):
        return f"StationaryDiagram({self.vertex_count} vertices)"


class FiniteRankDiagram:
    """Diagram with level matrices drawn from a finite prefix followed by a
    repeating cycle; vertex counts are bounded by the rank."""

    def __init__(self, prefix, cycle, name=None):
        self.prefix = tuple(tuple(tuple(int(e) for e in row) for row in m) for m in prefix)
        self.cycle = tuple(tuple(tuple(int(e) for e in row) for row in m) for m in cycle)
        if not self.cycle:
            raise DiagramError("finite rank diagram needs a non-empty repeating cycle")
        self.name = name
        for m in self.prefix + self.cycle:
            if not m or any(len(row) != len(m[0]) for row in m):
                raise DiagramError("level matrices must be rectangular")
        # compatibility: rows of F_n (= vertices at level n+1) must equal
        # columns of F_{n+1}
        seq = list(self.prefix) + list(self.cycle) + [self.cycle[0]]
        for a, b in zip(seq, seq[1:]):
            if len(a) != len(b[0]):
                raise DiagramError("consecutive level matrices have incompatible shapes")
        self.rank = max(max(len(m), len(m[0])) for m in seq)

    stationary = False

    def matrix_at(self, level):
        if level < 1:
            raise ValueError("level must be >= 1")
        if level <= len(self.prefix):
            return self.prefix[level - 1]
        return self.cycle[(level - 1 - len(self.prefix)) % len(self.cycle)]

    def vertices_at(self, level):
        if level < 1:
            raise ValueError("level must be >= 1")
        return len(self.matrix_at(level)[0]) if level == 1 else len(self.matrix_at(level - 1))

    def root_edges(self):
        m = self.matrix_at(1)
        cols = len(m[0])
        return tuple(sum(m[v][w] for v in range(len(m))) for w in range(cols))

    def path_counts(self, level):
        if level < 1:
            raise ValueError("level must be >= 1")
        h = list(self.root_edges())
        for n in range(1, level):
            m = self.matrix_at(n)
            h = [sum(m[v][w] * h[w] for w in range(len(h))) for v in range(len(m))]
        return tuple(h)

    def to_json_dict(self):
        doc = {
            "schema_version": 1,
            "kind": "finite_rank",
            "prefix": [[list(row) for row in m] for m in self.prefix],
            "cycle": [[list(row) for row in m] for m in self.cycle],
        }
        if self.name:
            doc["metadata"] = {"name": self.name}
        return doc

    def __eq__(self, other):
        return (
            isinstance(other, FiniteRankDiagram)
            and self.prefix == other.prefix
            and self.cycle == other.cycle
        )

    def __hash__(self):
        return hash((self.prefix, self.cycle))

    def __repr__(self):
        return f"FiniteRankDiagram(rank {self.rank})"


def diagram_from_json_dict(doc):
    if not isinstance(doc, dict):
        raise DiagramError("document must be a JSON object")
    if doc.get("schema_version") != 1:
        raise DiagramError("unsupported schema_version (expected 1)")
    kind = doc.get("kind")
    meta = doc.get("metadata") or {}
    name = meta.get("name")
    if kind == "stationary":
        if "matrix" not in doc:
            raise DiagramError("stationary document needs a 'matrix' field")
        return StationaryDiagram(doc["matrix"], name=name)
    if kind == "finite_rank":
        if "cycle" not in doc:
            raise DiagramError("finite_rank document needs a 'cycle' field")
        return FiniteRankDiagram(doc.get("prefix", []), doc["cycle"], name=name)
    raise DiagramError(f"unknown diagram kind: {kind!r}")


@dataclass(frozen=True)
class ClassDecomposition:
    """Strongly connected classes of the walk digraph with the access order."""

    classes: tuple            # tuple of sorted vertex tuples, ordered by lowest vertex
    class_of: tuple           # vertex -> class index
    reach: tuple              # reach[i][j]: class i reaches class j (reflexive)

    def precedes(self, beta, alpha):
        """beta strictly precedes alpha: beta reaches alpha, beta != alpha."""
        return beta != alpha and self.reach[beta][alpha]

    def upstream_of(self, alpha):
        """Classes beta with beta preceding-or-equal alpha."""
        return tuple(i for i in range(len(self.classes)) if self.reach[i][alpha])

    def one_step_successors(self, diagram, beta):
        """Classes gamma != beta hit by a single edge out of beta."""
        a = diagram.A()
        out = set()
        for v in self.classes[beta]:
            for w, mult in enumerate(a[v]):
                if mult and self.class_of[w] != beta:
                    out.add(self.class_of[w])
        return tuple(sorted(out))

    def minimal_components(self):
        """Classes reached by no other class (each supports a minimal set
        of the tail relation)."""
        k = len(self.classes)
        return tuple(
            j for j in range(k)
            if not any(self.reach[i][j] for i in range(k) if i != j)
        )


def class_decomposition(diagram):
    """Tarjan SCCs of the walk digraph, with deterministic numbering by
    lowest vertex id, plus the reachability closure."""
    a = diagram.A()
    n = len(a)
    adj = [[w for w in range(n) if a[v][w]] for v in range(n)]

    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    sccs = []
    counter = [0]

    def strongconnect(root):
        work = [(root, 0)]
        while work:
            v, pi = work.pop()
            if pi == 0:
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for i in range(pi, len(adj[v])):
                w = adj[v][i]
                if index[w] is None:
                    work.append((v, i + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(tuple(sorted(comp)))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])

    for v in range(n):
        if index[v] is None:
            strongconnect(v)

    sccs.sort(key=lambda comp: comp[0])
    class_of = [0] * n
    for i, comp in enumerate(sccs):
        for v in comp:
            class_of[v] = i

    k = len(sccs)
    reach = [[False] * k for _ in range(k)]
    for i in range(k):
        reach[i][i] = True
    for v in range(n):
        for w in adj[v]:
            reach[class_of[v]][class_of[w]] = True
    for t in range(k):
        for i in range(k):
            if reach[i][t]:
                row_t = reach[t]
                row_i = reach[i]
                for j in range(k):
                    if row_t[j]:
                        row_i[j] = True

    return ClassDecomposition(
        classes=tuple(sccs),
        class_of=tuple(class_of),
        reach=tuple(tuple(row) for row in reach),
    )


class CylinderSet:
    """A finite path from the root: visited vertices and edge choices.

    ``vertices[k]`` is the vertex at level k+1; ``edges[0]`` picks the root
    edge and ``edges[k]`` the edge between levels k and k+1.
    """

    __slots__ = ("diagram", "vertices", "edges")

    def __init__(self, diagram, vertices, edges, _checked=False):
        self.diagram = diagram
        self.vertices = tuple(vertices)
        self.edges = tuple(edges)
        if _checked:
            return
        if len(self.vertices) != len(self.edges) or not self.vertices:
            raise ValueError("a cylinder needs one edge choice per visited vertex")
        r = diagram.root_edges()
        if not (0 <= self.edges[0] < r[self.vertices[0]]):
            raise ValueError("root edge index out of range")
        for k in range(1, len(self.vertices)):
            m = diagram.matrix_at(k)
            mult = m[self.vertices[k]][self.vertices[k - 1]]
            if not (0 <= self.edges[k] < mult):
                raise ValueError(f"no edge {self.edges[k]} between levels {k} and {k+1}")

    def __eq__(self, other):
        if not isinstance(other, CylinderSet):
            return NotImplemented
        return (
            self.diagram is other.diagram
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((id(self.diagram), self.vertices, self.edges))

    @property
    def level(self):
        return len(self.vertices)

    @property
    def terminal_vertex(self):
        return self.vertices[-1]

    def key(self):
        return (self.vertices, self.edges)

    def children(self):
        m = self.diagram.matrix_at(self.level)
        v = self.terminal_vertex
        out = []
        for w in range(len(m)):
            for e in range(m[w][v]):
                out.append(
                    CylinderSet(
                        self.diagram, self.vertices + (w,), self.edges + (e,), _checked=True
                    )
                )
        return out

    def refine_to(self, level):
        if level < self.level:
            raise ValueError("cannot coarsen a cylinder")
        cells = [self]
        for _ in range(level - self.level):
            cells = [child for c in cells for child in c.children()]
        return cells

    def contains(self, other):
        return (
            other.level >= self.level
            and other.vertices[: self.level] == self.vertices
            and other.edges[: self.level] == self.edges
        )

    def to_json_dict(self):
        return {"vertices": [v + 1 for v in self.vertices], "edges": list(self.edges)}

    def __repr__(self):
        path = "".join(f"({v + 1},{e})" for v, e in zip(self.vertices, self.edges))
        return f"Cyl[{path}]"


def cylinders_at_level(diagram, level, cap=None):
    """All length-`level` cylinders, lexicographic order; guarded by a cap."""
    cap = DEFAULT_PATH_CAP if cap is None else cap
    total = sum(diagram.path_counts(level))
    if total > cap:
        raise EnumerationTooLargeError(
            f"{total} cylinders at level {level} exceed the cap of {cap}"
        )
    r = diagram.root_edges()
    cells = [
        CylinderSet(diagram, (v,), (e,))
        for v in range(len(r))
        for e in range(r[v])
    ]
    for _ in range(level - 1):
        cells = [child for c in cells for child in c.children()]
    return cells


class ClopenSet:
    """A clopen set in canonical form: distinct cylinders at one common level."""

    __slots__ = ("diagram", "cylinders")

    def __init__(self, diagram, cylinders, normalized=False):
        self.diagram = diagram
        if normalized:
            self.cylinders = tuple(cylinders)
        else:
            self.cylinders = self._normalize(cylinders)

    def _normalize(self, cylinders):
        cylinders = list(cylinders)
        if not cylinders:
            return ()
        top = max(c.level for c in cylinders)
        seen = {}
        for c in cylinders:
            for leaf in c.refine_to(top):
                seen[leaf.key()] = leaf
        return tuple(seen[k] for k in sorted(seen))

    @property
    def level(self):
        return self.cylinders[0].level if self.cylinders else 0

    def is_empty(self):
        return not self.cylinders

    def union(self, other):
        return ClopenSet(self.diagram, self.cylinders + other.cylinders)

    def difference(self, other):
        level = max(self.level, other.level or self.level)
        mine = {c.key(): c for cyl in self.cylinders for c in cyl.refine_to(level)}
        for cyl in other.cylinders:
            for c in cyl.refine_to(level):
                mine.pop(c.key(), None)
        return ClopenSet(self.diagram, [mine[k] for k in sorted(mine)], normalized=True)

    def refined_to(self, level):
        return ClopenSet(
            self.diagram,
            [c for cyl in self.cylinders for c in cyl.refine_to(level)],
            normalized=True,
        )

    def disjoint_from(self, other):
        level = max(self.level, other.level or self.level)
        mine = {c.key() for cyl in self.cylinders for c in cyl.refine_to(level)}
        theirs = {c.key() for cyl in other.cylinders for c in cyl.refine_to(level)}
        return not (mine & theirs)

    def contains_clopen(self, other):
        if other.is_empty():
            return True
        level = max(self.level, other.level)
        mine = {c.key() for cyl in self.cylinders for c in cyl.refine_to(level)}
        return all(
            c.key() in mine for cyl in other.cylinders for c in cyl.refine_to(level)
        )

    def to_json_dict(self):
        return {"cylinders": [c.to_json_dict() for c in self.cylinders]}

    def __eq__(self, other):
        if not isinstance(other, ClopenSet):
            return NotImplemented
        if self.is_empty() or other.is_empty():
            return self.is_empty() and other.is_empty()
        level = max(self.level, other.level)
        mine = {c.key() for cyl in self.cylinders for c in cyl.refine_to(level)}
        theirs = {c.key() for cyl in other.cylinders for c in cyl.refine_to(level)}
        return mine == theirs

    def __hash__(self):
        return hash(tuple(c.key() for c in self.cylinders))

    def __len__(self):
        return len(self.cylinders)

    def __iter__(self):
        return iter(self.cylinders)

    def __repr__(self):
        return f"ClopenSet({len(self.cylinders)} cylinders at level {self.level})"


def clopen_normalize(clopen):
    """Canonical form: all cylinders at the common maximal level, deduplicated."""
    return ClopenSet(clopen.diagram, clopen.cylinders)


def whole_space(diagram, level=1):
    return ClopenSet(diagram, cylinders_at_level(diagram, level), normalized=True)


def condensation_dot(diagram, decomposition=None, name=None):
    """DOT text of the condensation DAG, classes labelled by their vertices."""
    dec = decomposition or class_decomposition(diagram)
    lines = [f'digraph "{name or diagram.name or "diagram"}" {{']
    lines.append("  rankdir=TB;")
    for i, comp in enumerate(dec.classes):
        label = "{" + ",".join(str(v + 1) for v in comp) + "}"
        shape = "doublecircle" if i in dec.minimal_components() else "ellipse"
        lines.append(f'  c{i} [label="{label}", shape={shape}];')
    k = len(dec.classes)
    a = diagram.A()
    for i in range(k):
        succ = set()
        for v in dec.classes[i]:
            for w in range(len(a)):
                if a[v][w] and dec.class_of[w] != i:
                    succ.add(dec.class_of[w])
        for j in sorted(succ):
            lines.append(f"  c{i} -> c{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
