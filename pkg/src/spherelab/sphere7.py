"""R^7 / 7-sphere algebra kernel.

A bilinear antisymmetric cross product exists on R^7 (and only on R^3 and
R^7); unlike the 3D one it is not unique and not Jacobi.  It is fixed here
by a table of signed Fano triples (i, j, k) meaning e_i x e_j = e_k, with
total antisymmetry and every unordered pair {i, j} covered exactly once.
Any such octonion-derived table satisfies

    |x x y|^2 = |x|^2 |y|^2 - (x . y)^2          (norm identity)
    (x x y) . z = x . (y x z)                    (mixed product)
    x x (x x y) = (x . y) x - |x|^2 y

but generally fails the Jacobi identity.  Points of the unit 7-sphere are
scalar + 7-vector pairs multiplied by

    (a, X)(b, Y) = (ab - X.Y,  aY + bX - X x Y),

which preserves the unit norm because of the norm identity.

The triple-product deviation vector

    Z(x, y, z) = x x (y x z) - y (x . z) + z (x . y)

measures the failure of the 3D BAC-CAB rule; it vanishes on associative
(quaternionic) triples and makes the generalized Lagrange identity

    (N1 x N2).(N3 x N4) = (N1.N3)(N2.N4) - (N1.N4)(N2.N3) + N1 . Z(N2,N3,N4)

exact for every table with the mixed-product property.

The module also provides the fixed sign/slot embeddings of R^3 measurement
directions into R^7 used by the three- and four-particle correlation
models.  The cross-product table is injectable everywhere so downstream
results can be recomputed under alternative tables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import require_orientation, require_unit

# Cyclic convention (i, i+1, i+3) mod 7: e1 x e2 = e4, etc.
DEFAULT_TRIPLES = (
    (1, 2, 4),
    (2, 3, 5),
    (3, 4, 6),
    (4, 5, 7),
    (5, 6, 1),
    (6, 7, 2),
    (7, 1, 3),
)


@dataclass(frozen=True)
class CrossTable:
    """Structure constants f_ijk for e_i x e_j = sum_k f_ijk e_k.

    Built from 7 signed triples (1-based indices; a negative third entry k
    means e_i x e_j = -e_|k|).  Total antisymmetry is imposed on each
    triple; construction checks that every unordered index pair is covered
    exactly once, which makes |e_i x e_j| = 1 for all basis pairs i != j.
    The full norm identity on generic vectors is a property of the triple
    system itself and is exercised by the identity suite, not assumed here.
    """

    table_id: str
    triples: tuple[tuple[int, int, int], ...]
    _f: np.ndarray = field(init=False, repr=False, compare=False)
    _ii: np.ndarray = field(init=False, repr=False, compare=False)
    _jj: np.ndarray = field(init=False, repr=False, compare=False)
    _signs: np.ndarray = field(init=False, repr=False, compare=False)
    _scatter: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        f = np.zeros((7, 7, 7))
        seen_pairs = set()
        ii, jj, kk, signs = [], [], [], []
        for i, j, k in self.triples:
            sign = 1.0 if k > 0 else -1.0
            i0, j0, k0 = i - 1, j - 1, abs(k) - 1
            if len({i0, j0, k0}) != 3 or not all(0 <= m < 7 for m in (i0, j0, k0)):
                raise ValueError(f"bad triple {(i, j, k)!r}")
            for a, b, c in ((i0, j0, k0), (j0, k0, i0), (k0, i0, j0)):
                pair = frozenset((a, b))
                if pair in seen_pairs:
                    raise ValueError(f"index pair {sorted(p + 1 for p in pair)} covered twice")
                seen_pairs.add(pair)
                f[a, b, c] = sign
                f[b, a, c] = -sign
                ii.append(a)
                jj.append(b)
                kk.append(c)
                signs.append(sign)
        if len(seen_pairs) != 21:
            raise ValueError("triples must cover all 21 index pairs")
        scatter = np.zeros((21, 7))
        scatter[np.arange(21), kk] = 1.0
        for name, value in (
            ("_f", f),
            ("_ii", np.array(ii)),
            ("_jj", np.array(jj)),
            ("_signs", np.array(signs)),
            ("_scatter", scatter),
        ):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def structure_constants(self) -> np.ndarray:
        return self._f

    def to_json(self) -> str:
        return json.dumps({"id": self.table_id, "triples": [list(t) for t in self.triples]})

    @classmethod
    def from_json(cls, doc: str) -> "CrossTable":
        data = json.loads(doc)
        return cls(data["id"], tuple(tuple(int(x) for x in t) for t in data["triples"]))

    @classmethod
    def from_file(cls, path) -> "CrossTable":
        return cls.from_json(Path(path).read_text())


DEFAULT_TABLE = CrossTable("cyclic-124", DEFAULT_TRIPLES)


def _relabeled(table_id: str, swap: dict[int, int]) -> CrossTable:
    relabel = lambda i: int(np.sign(i)) * swap.get(abs(i), abs(i))
    return CrossTable(table_id, tuple(tuple(relabel(x) for x in t) for t in DEFAULT_TRIPLES))


# Alternative tables for recomputing everything downstream: a basis
# relabeling (still octonionic) and the mirror table with all signs flipped
# (the opposite algebra; also satisfies the norm and mixed-product identities).
BUILTIN_TABLES = {
    "cyclic-124": DEFAULT_TABLE,
    "cyclic-124-swap12": _relabeled("cyclic-124-swap12", {1: 2, 2: 1}),
    "cyclic-124-mirror": CrossTable(
        "cyclic-124-mirror", tuple((i, j, -k) for i, j, k in DEFAULT_TRIPLES)
    ),
}


def get_table(table: CrossTable | str | None) -> CrossTable:
    if table is None:
        return DEFAULT_TABLE
    if isinstance(table, CrossTable):
        return table
    try:
        return BUILTIN_TABLES[table]
    except KeyError:
        raise ValueError(f"unknown cross table {table!r}; built-ins: {sorted(BUILTIN_TABLES)}")


def cross7(x, y, table: CrossTable | None = None) -> np.ndarray:
    """Seven-dimensional cross product under the given table (broadcasts over
    leading axes).

    Evaluated as sign * (x_i y_j - x_j y_i) over the 21 covered index pairs,
    which makes antisymmetry and x cross x = 0 exact in floating point, not
    just up to roundoff.
    """
    t = get_table(table)
    x, y = np.asarray(x, float), np.asarray(y, float)
    terms = t._signs * (x[..., t._ii] * y[..., t._jj] - x[..., t._jj] * y[..., t._ii])
    return terms @ t._scatter


@dataclass(frozen=True)
class SevenPoint:
    """Scalar + 7-vector pair; unit points satisfy a^2 + |X|^2 = 1."""

    a: float
    x: np.ndarray

    def __post_init__(self):
        arr = np.array(self.x, dtype=float)
        if arr.shape != (7,):
            raise ValueError(f"vector part must have shape (7,), got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "x", arr)

    def norm(self) -> float:
        return float(np.sqrt(self.a**2 + np.dot(self.x, self.x)))

    def allclose(self, other: "SevenPoint", tol: float = 1e-12) -> bool:
        return abs(self.a - other.a) <= tol and bool(np.max(np.abs(self.x - other.x)) <= tol)

    def __repr__(self) -> str:
        return f"SevenPoint(a={self.a:.6g}, x={np.array2string(self.x, precision=6)})"


IDENTITY7 = SevenPoint(1.0, np.zeros(7))


def oct_product(p: SevenPoint, q: SevenPoint, table: CrossTable | None = None) -> SevenPoint:
    """(a, X)(b, Y) = (ab - X.Y, aY + bX - X x Y); unit inputs give a unit output."""
    xy = cross7(p.x, q.x, table)
    return SevenPoint(p.a * q.a - float(np.dot(p.x, q.x)), p.a * q.x + q.a * p.x - xy)


def beable7(n, orientation: int) -> SevenPoint:
    """Pure-vector unit point (0, orientation * N) about direction N."""
    n = require_unit(n, dim=7, name="7D direction", tol=1e-9)
    orientation = require_orientation(orientation)
    return SevenPoint(0.0, orientation * n)


def z_deviation(n2, n3, n4, table: CrossTable | None = None) -> np.ndarray:
    """Deviation of the triple product from the 3D BAC-CAB rule.

    Zero on associative triples; always orthogonal to n2, n3, n4 and to
    n3 x n4 (consequences of the mixed-product identity).
    """
    n2, n3, n4 = (np.asarray(v, float) for v in (n2, n3, n4))
    return (
        cross7(n2, cross7(n3, n4, table), table)
        - n3 * float(np.dot(n2, n4))
        + n4 * float(np.dot(n2, n3))
    )


def lagrange_residual(n1, n2, n3, n4, table: CrossTable | None = None) -> float:
    """Defect of the generalized Lagrange identity; identically ~0 for any
    table with the mixed-product property."""
    n1 = np.asarray(n1, float)
    lhs = float(np.dot(cross7(n1, n2, table), cross7(n3, n4, table)))
    rhs = (
        float(np.dot(n1, n3)) * float(np.dot(n2, n4))
        - float(np.dot(n1, n4)) * float(np.dot(n2, n3))
        + float(np.dot(n1, z_deviation(n2, n3, n4, table)))
    )
    return lhs - rhs


def jacobiator(x, y, z, table: CrossTable | None = None) -> np.ndarray:
    """x x (y x z) + y x (z x x) + z x (x x y); nonzero in 7D in general."""
    return (
        cross7(x, cross7(y, z, table), table)
        + cross7(y, cross7(z, x, table), table)
        + cross7(z, cross7(x, y, table), table)
    )


def _embed(n, signs: tuple[int, int, int], slots: tuple[int, int, int]) -> np.ndarray:
    out = np.zeros(7)
    for sign, slot, comp in zip(signs, slots, n):
        out[slot - 1] = sign * comp
    return out


def embed_ghz4(n1, n2, n3, n4) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """R^3 -> R^7 embeddings for the four-particle model.

    Sign/slot patterns:
        N1 = (-n1x, +n1y, -n1z, 0, 0, 0, 0)
        N2 = (+n2x, +n2y, 0, +n2z, 0, 0, 0)
        N3 = (+n3x, +n3y, 0, 0, +n3z, 0, 0)
        N4 = (+n4x, -n4y, 0, 0, 0, -n4z, 0)
    Unit inputs give unit outputs (each is a signed permutation of components).
    """
    n1, n2, n3, n4 = (require_unit(v) for v in (n1, n2, n3, n4))
    return (
        _embed(n1, (-1, 1, -1), (1, 2, 3)),
        _embed(n2, (1, 1, 1), (1, 2, 4)),
        _embed(n3, (1, 1, 1), (1, 2, 5)),
        _embed(n4, (1, -1, -1), (1, 2, 6)),
    )


def ghz3_reference_direction(alpha: float, delta: float) -> np.ndarray:
    """Unit reference direction n0 = (sin a cos d, sin a sin d, cos a)."""
    sa = np.sin(alpha)
    return np.array([sa * np.cos(delta), sa * np.sin(delta), np.cos(alpha)])


def embed_ghz3(
    n1, n2, n3, alpha: float, delta: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """R^3 -> R^7 embeddings for the three-particle model plus its fixed
    reference point direction N0.

    Sign/slot patterns:
        N0 = (-n0x, +n0y, -n0z, 0, 0, 0, 0)   n0 from (alpha, delta)
        N1 = (+n1x, +n1y, 0, +n1z, 0, 0, 0)
        N2 = (+n2x, -n2y, 0, 0, -n2z, 0, 0)
        N3 = (-n3x, -n3y, 0, 0, 0, +n3z, 0)
    """
    n1, n2, n3 = (require_unit(v) for v in (n1, n2, n3))
    n0 = ghz3_reference_direction(alpha, delta)
    return (
        _embed(n0, (-1, 1, -1), (1, 2, 3)),
        _embed(n1, (1, 1, 1), (1, 2, 4)),
        _embed(n2, (1, -1, -1), (1, 2, 5)),
        _embed(n3, (-1, -1, 1), (1, 2, 6)),
    )
