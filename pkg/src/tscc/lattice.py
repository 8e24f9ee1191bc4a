"""Square-octagon torus and its inflation into the subsystem-code hypergraph.

Unit cell ``(i, j)`` of an ``L x L`` torus (``L = d // 2``) holds one tilted
square with corner sites N, E, S, W. Cells are linked N(i, j)-S(i-1, j) and
E(i, j)-W(i, j+1); the octagon of cell ``(i, j)`` sits below and to the right
of its square. Squares are green and octagons alternate red/blue on a
checkerboard, which needs ``L`` even, so ``d`` must be a multiple of 4.

Hypergraph qubit ``3*v + c`` is the corner of colex vertex ``v`` that lies in
the face of color index ``c`` (r=0, g=1, b=2). The color index is also the
qubit's stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COLORS = ("r", "g", "b")
COLOR_INDEX = {c: i for i, c in enumerate(COLORS)}
# Successor on the color cycle r -> b -> g -> r.
SUCC = {"r": "b", "b": "g", "g": "r"}
PRED = {v: k for k, v in SUCC.items()}

N, E, S, W = range(4)
SITE_NAMES = "NESW"


@dataclass(frozen=True)
class Face:
    index: int
    color: str
    cycle: tuple[int, ...]
    cell: tuple[int, int]
    shape: str


@dataclass(frozen=True)
class Colex:
    """Trivalent, 3-face-colorable lattice on a torus."""

    d: int
    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    faces: tuple[Face, ...]
    edge_faces: tuple[tuple[int, int], ...]
    vertex_edges: tuple[tuple[int, ...], ...]
    vertex_faces: tuple[tuple[int, int, int], ...]  # face index per color r, g, b

    @property
    def L(self) -> int:
        return self.d // 2

    def vertex_position(self, v: int) -> tuple[int, int, str]:
        cell, site = divmod(v, 4)
        i, j = divmod(cell, self.L)
        return i, j, SITE_NAMES[site]

    def face_edges(self, f: int) -> list[int]:
        """Edge indices along the boundary of face ``f``, in cycle order."""
        cyc = self.faces[f].cycle
        lookup = self._edge_lookup
        return [lookup[frozenset((cyc[k], cyc[(k + 1) % len(cyc)]))] for k in range(len(cyc))]

    @property
    def _edge_lookup(self) -> dict[frozenset, int]:
        cached = self.__dict__.get("_lookup")
        if cached is None:
            cached = {frozenset(e): i for i, e in enumerate(self.edges)}
            object.__setattr__(self, "_lookup", cached)
        return cached

    def faces_of_color(self, color: str) -> list[int]:
        return [f.index for f in self.faces if f.color == color]


def build_colex(d: int) -> Colex:
    """Periodic 4.8.8 colex with ``d*d/2`` faces.

    Raises:
        ValueError: if ``d`` is not a positive multiple of 4. Smaller or
            other even distances admit no consistent 3-coloring of this
            lattice on a torus.
    """
    if not isinstance(d, (int, np.integer)) or d <= 0 or d % 2:
        raise ValueError(f"distance must be a positive even integer, got {d!r}")
    if d % 4:
        raise ValueError(f"the square-octagon torus is 3-colorable only for d divisible by 4, got d={d}")
    L = d // 2

    def vid(i: int, j: int, site: int) -> int:
        return 4 * ((i % L) * L + (j % L)) + site

    faces: list[Face] = []
    for i in range(L):
        for j in range(L):
            square = (vid(i, j, N), vid(i, j, E), vid(i, j, S), vid(i, j, W))
            octagon = (
                vid(i, j, E), vid(i, j, S), vid(i + 1, j, N), vid(i + 1, j, E),
                vid(i + 1, j + 1, W), vid(i + 1, j + 1, N), vid(i, j + 1, S), vid(i, j + 1, W),
            )
            faces.append(Face(len(faces), "g", square, (i, j), "square"))
            faces.append(Face(len(faces), "r" if (i + j) % 2 == 0 else "b", octagon, (i, j), "octagon"))

    edges: list[tuple[int, int]] = []
    for i in range(L):
        for j in range(L):
            for a, b in ((N, E), (E, S), (S, W), (W, N)):
                edges.append((vid(i, j, a), vid(i, j, b)))
            edges.append((vid(i, j, N), vid(i - 1, j, S)))
            edges.append((vid(i, j, E), vid(i, j + 1, W)))
    edges = [tuple(sorted(e)) for e in edges]

    nv = 4 * L * L
    lookup = {frozenset(e): k for k, e in enumerate(edges)}
    edge_faces: list[list[int]] = [[] for _ in edges]
    vertex_faces = [[-1, -1, -1] for _ in range(nv)]
    for f in faces:
        cyc = f.cycle
        for k in range(len(cyc)):
            edge_faces[lookup[frozenset((cyc[k], cyc[(k + 1) % len(cyc)]))]].append(f.index)
            slot = COLOR_INDEX[f.color]
            if vertex_faces[cyc[k]][slot] != -1:
                raise AssertionError("vertex meets two faces of one color")
            vertex_faces[cyc[k]][slot] = f.index
    vertex_edges: list[list[int]] = [[] for _ in range(nv)]
    for k, (a, b) in enumerate(edges):
        vertex_edges[a].append(k)
        vertex_edges[b].append(k)

    return Colex(
        d=d,
        num_vertices=nv,
        edges=tuple(edges),
        faces=tuple(faces),
        edge_faces=tuple(tuple(sorted(ef)) for ef in edge_faces),
        vertex_edges=tuple(tuple(ve) for ve in vertex_edges),
        vertex_faces=tuple(tuple(vf) for vf in vertex_faces),
    )


@dataclass(frozen=True)
class Rank2Edge:
    index: int
    qubits: tuple[int, int]
    kind: str  # "dashed" carries an XX gauge operator, "solid" a YY one
    face: int
    colex_edge: int

    @property
    def pauli(self) -> str:
        return "X" if self.kind == "dashed" else "Y"


@dataclass(frozen=True)
class RectFace:
    """Four-sided face between two rank-2 edges and two rank-3 edges."""

    index: int
    qubits: tuple[int, int, int, int]
    colex_edge: int
    faces: tuple[int, int]
    tag: str  # color pair such as "rg"
    rank2: tuple[int, int]


@dataclass(frozen=True)
class HyperFace:
    """Colored face of the hypergraph.

    ``sigma1`` lists the rank-2 edges of the inner boundary cycle in order.
    ``outer`` lists, per colex edge of the face, the rank-2 edge on the
    neighbouring face's side; together with the rank-3 edges of the face's
    vertices they make up the hypercycle ``sigma2``.
    """

    index: int
    color: str
    corners: tuple[int, ...]
    sigma1: tuple[int, ...]
    outer: tuple[int, ...]
    rank3: tuple[int, ...]


@dataclass(frozen=True)
class Hypergraph:
    colex: Colex
    num_qubits: int
    rank2_edges: tuple[Rank2Edge, ...]
    rank3_edges: tuple[tuple[int, int, int], ...]
    faces: tuple[HyperFace, ...]
    rect_faces: tuple[RectFace, ...]
    parent_vertex: np.ndarray = field(repr=False)
    qubit_face: np.ndarray = field(repr=False)
    stack: np.ndarray = field(repr=False)

    def rects_with_tag(self, tag: str) -> list[int]:
        key = "".join(sorted(tag, key=COLOR_INDEX.get))
        return [r.index for r in self.rect_faces if r.tag == key]


def qubit_of(v: int, color: str) -> int:
    return 3 * v + COLOR_INDEX[color]


def edge_kind(face_color: str, neighbour_color: str) -> str:
    """Type of the rank-2 edge on ``face_color``'s side of a colex edge."""
    return "dashed" if neighbour_color == SUCC[face_color] else "solid"


def inflate(colex: Colex) -> Hypergraph:
    """Replace each colex vertex by a triangle and split every colex edge."""
    nq = 3 * colex.num_vertices
    rank3 = tuple((3 * v, 3 * v + 1, 3 * v + 2) for v in range(colex.num_vertices))

    rank2: list[Rank2Edge] = []
    rects: list[RectFace] = []
    side_edge: dict[tuple[int, int], int] = {}  # (colex edge, face) -> rank-2 index
    for e, (a, b) in enumerate(colex.edges):
        f0, f1 = colex.edge_faces[e]
        c0, c1 = colex.faces[f0].color, colex.faces[f1].color
        pair = []
        for f, c, other in ((f0, c0, c1), (f1, c1, c0)):
            idx = len(rank2)
            rank2.append(Rank2Edge(idx, (qubit_of(a, c), qubit_of(b, c)), edge_kind(c, other), f, e))
            side_edge[(e, f)] = idx
            pair.append(idx)
        tag = "".join(sorted(c0 + c1, key=COLOR_INDEX.get))
        rects.append(RectFace(
            len(rects),
            (qubit_of(a, c0), qubit_of(b, c0), qubit_of(a, c1), qubit_of(b, c1)),
            e, (f0, f1), tag, (pair[0], pair[1]),
        ))

    faces = []
    for f in colex.faces:
        fedges = colex.face_edges(f.index)
        sigma1 = tuple(side_edge[(e, f.index)] for e in fedges)
        outer = []
        for e in fedges:
            g = [x for x in colex.edge_faces[e] if x != f.index][0]
            outer.append(side_edge[(e, g)])
        faces.append(HyperFace(
            f.index, f.color,
            tuple(qubit_of(v, f.color) for v in f.cycle),
            sigma1, tuple(outer), tuple(f.cycle),
        ))

    parent = np.arange(nq, dtype=np.int64) // 3
    stack = np.arange(nq, dtype=np.int64) % 3
    qface = np.array([colex.vertex_faces[q // 3][q % 3] for q in range(nq)], dtype=np.int64)
    for arr in (parent, stack, qface):
        arr.flags.writeable = False
    return Hypergraph(colex, nq, tuple(rank2), rank3, tuple(faces), tuple(rects), parent, qface, stack)


def lattice_json(h: Hypergraph) -> dict:
    """Plain-data description of the colex and its hypergraph."""
    c = h.colex
    return {
        "d": c.d,
        "colex": {
            "vertices": [
                {"index": v, "cell": list(c.vertex_position(v)[:2]), "site": c.vertex_position(v)[2],
                 "faces": list(c.vertex_faces[v])}
                for v in range(c.num_vertices)
            ],
            "edges": [list(e) for e in c.edges],
            "faces": [{"index": f.index, "color": f.color, "shape": f.shape, "cycle": list(f.cycle)}
                      for f in c.faces],
        },
        "hypergraph": {
            "num_qubits": h.num_qubits,
            "rank2_edges": [{"qubits": list(e.qubits), "kind": e.kind, "face": e.face} for e in h.rank2_edges],
            "rank3_edges": [list(t) for t in h.rank3_edges],
            "rect_faces": [{"qubits": list(r.qubits), "tag": r.tag} for r in h.rect_faces],
        },
    }
