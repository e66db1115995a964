"""Bundled desk-scale complexes used by the tests and the CLI corpus."""

from __future__ import annotations

from .complexes import Cell, BallComplex, validate_complex, product

__all__ = [
    "point", "interval", "circle", "square", "cube", "octahedron",
    "torus", "moebius", "square_sign_corrupted", "CORPUS_BUILDERS",
    "manifold_promises",
]


def point():
    return validate_complex([Cell("p", 0, [])])


def interval():
    return validate_complex([
        Cell("v0", 0, []),
        Cell("v1", 0, []),
        Cell("e", 1, [("v1", 1), ("v0", -1)]),
    ])


def circle(n=3):
    """An n-edge circle (n >= 3 keeps it a regular complex)."""
    cells = [Cell(f"v{i}", 0, []) for i in range(n)]
    for i in range(n):
        j = (i + 1) % n
        cells.append(Cell(f"e{i}", 1, [(f"v{j}", 1), (f"v{i}", -1)]))
    return validate_complex(cells)


def square():
    """One 2-cell, four edges, four vertices."""
    cells = [Cell(v, 0, []) for v in ("v00", "v10", "v01", "v11")]
    cells += [
        Cell("eb", 1, [("v10", 1), ("v00", -1)]),
        Cell("et", 1, [("v11", 1), ("v01", -1)]),
        Cell("el", 1, [("v01", 1), ("v00", -1)]),
        Cell("er", 1, [("v11", 1), ("v10", -1)]),
        Cell("f", 2, [("eb", 1), ("er", 1), ("et", -1), ("el", -1)]),
    ]
    return validate_complex(cells)


def square_sign_corrupted():
    """The square with one edge incidence sign flipped: d o d != 0."""
    cells = [Cell(v, 0, []) for v in ("v00", "v10", "v01", "v11")]
    cells += [
        Cell("eb", 1, [("v10", 1), ("v00", -1)]),
        Cell("et", 1, [("v11", 1), ("v01", -1)]),
        Cell("el", 1, [("v01", 1), ("v00", -1)]),
        Cell("er", 1, [("v11", 1), ("v10", -1)]),
        Cell("f", 2, [("eb", 1), ("er", 1), ("et", 1), ("el", -1)]),
    ]
    return [(c.id, c.dim, c.faces) for c in cells]


def cube():
    """The 3-fold product of the interval: 27 cells."""
    return product(product(interval(), interval()), interval())


def torus():
    return product(circle(), circle())


def octahedron():
    """The octahedral 2-sphere: 6 vertices, 12 edges, 8 triangles."""
    verts = ["x", "X", "y", "Y", "z", "Z"]
    opposite = {"x": "X", "X": "x", "y": "Y", "Y": "y", "z": "Z", "Z": "z"}
    cells = [Cell(v, 0, []) for v in sorted(verts)]
    edges = []
    for i, a in enumerate(sorted(verts)):
        for b in sorted(verts)[i + 1:]:
            if opposite[a] == b:
                continue
            edges.append((a, b))
    for a, b in edges:
        cells.append(Cell(f"{a}{b}", 1, [(b, 1), (a, -1)]))

    def edge_id(a, b):
        a, b = sorted((a, b))
        return f"{a}{b}"

    for sx in ("x", "X"):
        for sy in ("y", "Y"):
            for sz in ("z", "Z"):
                a, b, c = sorted((sx, sy, sz))
                cells.append(Cell(f"{a}{b}{c}", 2, [
                    (edge_id(b, c), 1),
                    (edge_id(a, c), -1),
                    (edge_id(a, b), 1),
                ]))
    return validate_complex(cells)


def moebius():
    """Minimal 5-vertex triangulated Moebius band; not orientable."""
    tris = [(1, 2, 3), (2, 3, 4), (3, 4, 5), (1, 4, 5), (1, 2, 5)]
    verts = sorted({v for t in tris for v in t})
    cells = [Cell(f"v{v}", 0, []) for v in verts]
    edges = sorted({tuple(sorted((t[i], t[j])))
                    for t in tris for i in range(3) for j in range(3)
                    if i < j})
    for a, b in edges:
        cells.append(Cell(f"e{a}{b}", 1, [(f"v{b}", 1), (f"v{a}", -1)]))
    for t in tris:
        a, b, c = sorted(t)
        cells.append(Cell(f"t{a}{b}{c}", 2, [
            (f"e{b}{c}", 1), (f"e{a}{c}", -1), (f"e{a}{b}", 1)]))
    return validate_complex(cells)


def moebius_boundary_cells():
    X = moebius()
    edge_face_count = {}
    for c in X.cells.values():
        if c.dim == 2:
            for f, _ in c.faces:
                edge_face_count[f] = edge_face_count.get(f, 0) + 1
    bd = {e for e, k in edge_face_count.items() if k == 1}
    for e in sorted(bd):
        bd |= set(f for f, _ in X.cells[e].faces)
    return sorted(bd)


def boundary_subcomplex(X):
    """Cells of the (n-1)-faces hit once by n-cells, with their closures."""
    n = X.dim()
    count = {}
    for c in X.cells.values():
        if c.dim == n:
            for f, _ in c.faces:
                count[f] = count.get(f, 0) + 1
    bd = set()
    for f, k in count.items():
        if k == 1:
            bd |= set(X.below(f))
    return sorted(bd)


CORPUS_BUILDERS = {
    "point": point,
    "interval": interval,
    "circle": circle,
    "square": square,
    "cube": cube,
    "octahedron": octahedron,
    "torus": torus,
    "moebius": moebius,
}


def manifold_promises():
    """Promise tags and declared boundaries for the corpus manifolds."""
    return {
        "point": ("closed-orientable", []),
        "interval": ("with-boundary", ["v0", "v1"]),
        "circle": ("closed-orientable", []),
        "square": ("with-boundary", None),   # None: computed boundary
        "cube": ("with-boundary", None),
        "octahedron": ("closed-orientable", []),
        "torus": ("closed-orientable", []),
        "moebius": ("with-boundary", None),
    }
