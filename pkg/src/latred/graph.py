"""Plumbing graphs: data model, parsing, validation, blow-ups, Seifert stars."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd

import numpy as np


class GraphError(ValueError):
    """Raised for malformed graph or Seifert documents."""


def bareiss_det(rows):
    """Exact determinant of a square integer matrix (fraction-free Bareiss)."""
    a = [[int(v) for v in r] for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def leading_minors(rows):
    """All leading principal minors of an integer matrix, exactly."""
    n = len(rows)
    return [bareiss_det([r[:k] for r in rows[:k]]) for k in range(1, n + 1)]


@dataclass(frozen=True)
class PlumbingGraph:
    """A decorated tree; vertex ``j`` carries the Euler number ``euler[j]``.

    Vertex ids are ``0..s-1`` and their order is the total order used to
    orient cubes.  Edges are stored as sorted pairs.
    """

    euler: tuple
    edges: tuple
    _form: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "euler", tuple(int(e) for e in self.euler))
        object.__setattr__(
            self, "edges", tuple(tuple(sorted((int(a), int(b)))) for a, b in self.edges)
        )

    @property
    def s(self) -> int:
        return len(self.euler)

    @property
    def valency(self) -> tuple:
        deg = [0] * self.s
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return tuple(deg)

    def neighbors(self, v: int) -> list:
        return [b if a == v else a for a, b in self.edges if v in (a, b)]

    def nodes(self) -> list:
        """Vertices of valency at least three."""
        return [j for j, dj in enumerate(self.valency) if dj >= 3]

    def to_document(self) -> dict:
        return {
            "vertices": [{"id": j, "e": e} for j, e in enumerate(self.euler)],
            "edges": [list(e) for e in self.edges],
        }

    def key(self) -> str:
        """Stable textual identity, used for provenance in reports."""
        return json.dumps(self.to_document(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class SeifertData:
    """Central Euler number ``b`` and legs ``(alpha, omega)``."""

    b: int
    legs: tuple

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple((int(a), int(w)) for a, w in self.legs))
        if len(self.legs) < 3:
            raise GraphError("a Seifert star needs at least three legs")
        for a, w in self.legs:
            if not (0 < w < a) or gcd(a, w) != 1:
                raise GraphError(f"invalid leg ({a},{w}): need 0<omega<alpha, coprime")


def parse_graph(text) -> PlumbingGraph:
    """Parse a graph document (JSON text or an already decoded dict).

    Structural checks only: ids, duplicates, self-loops and edge endpoints.
    Definiteness is left to :func:`validate_graph`.
    """
    try:
        doc = json.loads(text) if isinstance(text, (str, bytes)) else text
        verts = doc["vertices"]
        edges = doc.get("edges", [])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph document: {exc}") from exc
    ids = []
    euler = {}
    for v in verts:
        try:
            vid, e = int(v["id"]), int(v["e"])
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed vertex entry {v!r}") from exc
        if vid in euler:
            raise GraphError(f"duplicate vertex id {vid}")
        euler[vid] = e
        ids.append(vid)
    s = len(ids)
    if sorted(ids) != list(range(s)):
        raise GraphError("vertex ids must be exactly 0..s-1")
    seen = set()
    clean = []
    for ed in edges:
        if len(ed) != 2:
            raise GraphError(f"malformed edge {ed!r}")
        a, b = int(ed[0]), int(ed[1])
        if a == b:
            raise GraphError(f"self-loop at vertex {a}")
        if not (0 <= a < s and 0 <= b < s):
            raise GraphError(f"edge {ed!r} references an unknown vertex")
        pair = (min(a, b), max(a, b))
        if pair in seen:
            raise GraphError(f"duplicate edge {ed!r}")
        seen.add(pair)
        clean.append(pair)
    return PlumbingGraph(tuple(euler[j] for j in range(s)), tuple(clean))


def parse_seifert(text) -> SeifertData:
    try:
        doc = json.loads(text) if isinstance(text, (str, bytes)) else text
        return SeifertData(int(doc["b"]), tuple((int(a), int(w)) for a, w in doc["legs"]))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed Seifert document: {exc}") from exc


def intersection_form(g: PlumbingGraph) -> np.ndarray:
    """The symmetric intersection matrix (diagonal ``e_j``, 1 on edges)."""
    if g._form is None:
        m = np.diag(np.array(g.euler, dtype=np.int64)) if g.s else np.zeros((0, 0), np.int64)
        for a, b in g.edges:
            m[a, b] = m[b, a] = 1
        m.setflags(write=False)
        object.__setattr__(g, "_form", m)
    return g._form


def _components(g: PlumbingGraph) -> int:
    parent = list(range(g.s))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in g.edges:
        parent[find(a)] = find(b)
    return len({find(v) for v in range(g.s)})


@dataclass
class ValidationReport:
    checks: dict
    minors: list

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": {k: bool(v) for k, v in self.checks.items()},
            "minors_of_minus_I": [str(m) for m in self.minors],
        }


def validate_graph(g: PlumbingGraph) -> ValidationReport:
    """Connectivity, tree-ness and exact negative definiteness."""
    checks = {}
    checks["nonempty"] = g.s >= 1
    checks["connected"] = g.s >= 1 and _components(g) == 1
    checks["tree"] = checks["connected"] and len(g.edges) == g.s - 1
    minus_i = (-intersection_form(g)).tolist()
    minors = leading_minors(minus_i) if g.s else []
    checks["negative_definite"] = g.s >= 1 and all(m > 0 for m in minors)
    return ValidationReport(checks, minors)


def require_valid(g: PlumbingGraph) -> PlumbingGraph:
    rep = validate_graph(g)
    if not rep.ok:
        failed = [k for k, v in rep.checks.items() if not v]
        raise GraphError(f"graph fails validation: {', '.join(failed)}")
    return g


def det_minus_form(g: PlumbingGraph) -> int:
    return bareiss_det((-intersection_form(g)).tolist())


def blow_up(g: PlumbingGraph, site) -> PlumbingGraph:
    """Insert a (-1)-vertex, appended with id ``s``.

    ``site`` is a vertex id (attach a (-1)-leaf), an edge ``(a, b)``
    (subdivide it), or ``("free", a)`` which is the same as the vertex
    case: blowing up a generic point of the curve ``E_a``.
    """
    euler = list(g.euler)
    edges = [tuple(e) for e in g.edges]
    new = g.s
    if isinstance(site, tuple) and len(site) == 2 and site[0] == "free":
        site = int(site[1])
    if isinstance(site, (int, np.integer)):
        a = int(site)
        if not 0 <= a < g.s:
            raise GraphError(f"no vertex {a}")
        euler[a] -= 1
        euler.append(-1)
        edges.append((a, new))
    elif isinstance(site, (tuple, list)) and len(site) == 2:
        a, b = sorted((int(site[0]), int(site[1])))
        if (a, b) not in edges:
            raise GraphError(f"no edge {site!r}")
        edges.remove((a, b))
        euler[a] -= 1
        euler[b] -= 1
        euler.append(-1)
        edges += [(a, new), (b, new)]
    else:
        raise GraphError(f"invalid blow-up site {site!r}")
    return PlumbingGraph(tuple(euler), tuple(sorted(edges)))


def negative_continued_fraction(alpha: int, omega: int) -> list:
    """``alpha/omega = b_1 - 1/(b_2 - ...)`` with every ``b_i >= 2``."""
    if not (0 < omega < alpha) and not (omega == alpha == 1):
        raise GraphError("need 0 < omega < alpha")
    out = []
    p, q = alpha, omega
    while q:
        c = -(-p // q)
        out.append(c)
        p, q = q, c * q - p
    return out


def star_shaped(sd: SeifertData) -> PlumbingGraph:
    """Star with centre 0 (Euler number ``b``), legs appended in order."""
    euler = [sd.b]
    edges = []
    for alpha, omega in sd.legs:
        prev = 0
        for c in negative_continued_fraction(alpha, omega):
            euler.append(-c)
            edges.append((prev, len(euler) - 1))
            prev = len(euler) - 1
    g = PlumbingGraph(tuple(euler), tuple(edges))
    if not validate_graph(g).ok:
        raise GraphError("Seifert data does not give a negative definite star")
    return g


def chain_det(decorations) -> int:
    """Determinant of ``-I`` for a string of vertices with given Euler numbers."""
    n = len(decorations)
    m = [[0] * n for _ in range(n)]
    for i, e in enumerate(decorations):
        m[i][i] = -e
        if i + 1 < n:
            m[i][i + 1] = m[i + 1][i] = -1
    return bareiss_det(m)


# Reference graphs -----------------------------------------------------------

def fix1() -> PlumbingGraph:
    return PlumbingGraph((-2,), ())


def fix2() -> PlumbingGraph:
    return PlumbingGraph((-2, -3), ((0, 1),))


def fix3() -> PlumbingGraph:
    """Chain -2,-1,-7,-3,-3,-7,-1,-2 with a -3 leaf on each -1 vertex."""
    euler = (-2, -1, -7, -3, -3, -7, -1, -2, -3, -3)
    edges = ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 8), (6, 9))
    return PlumbingGraph(euler, edges)


def chain(decorations) -> PlumbingGraph:
    n = len(decorations)
    return PlumbingGraph(tuple(decorations), tuple((i, i + 1) for i in range(n - 1)))


def dynkin(kind: str, n: int) -> PlumbingGraph:
    """ADE graphs with all decorations -2 (A_n, D_n, E_6..E_8)."""
    kind = kind.upper()
    if kind == "A":
        return chain([-2] * n)
    if kind == "D":
        if n < 4:
            raise GraphError("D_n needs n >= 4")
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
        return PlumbingGraph((-2,) * n, tuple(edges))
    if kind == "E":
        if n not in (6, 7, 8):
            raise GraphError("E_n needs n in 6..8")
        # arm lengths 1, 2, n-4 around branch vertex 0
        edges = [(0, 1), (0, 2), (2, 3), (0, 4)]
        prev = 4
        for v in range(5, n):
            edges.append((prev, v))
            prev = v
        return PlumbingGraph((-2,) * n, tuple(edges))
    raise GraphError(f"unknown Dynkin type {kind}")
