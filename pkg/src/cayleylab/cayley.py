"""Cayley-graph balls, word metrics and growth tables.

A ball of radius R holds every distinct normal form at word-metric
distance <= R from the identity, numbered deterministically: layer by
layer (breadth-first), shortlex within each layer, identity = vertex 0.
Edges carry generator labels; the inverse edge always exists since the
generating set is inverse-closed.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import graphs
from .errors import BallTooLarge, RadiusTooSmall, TableTooShort, TruncatedDistance
from .words import shortlex_key

DEFAULT_VERTEX_CAP = 5_000_000
VERTEX_CAP_ENV = "CAYLEYLAB_MAX_VERTICES"


def _vertex_cap(explicit=None):
    if explicit is not None:
        return explicit
    env = os.environ.get(VERTEX_CAP_ENV)
    return int(env) if env else DEFAULT_VERTEX_CAP


@dataclass
class CayleyBall:
    presentation: object
    radius: int
    vertices: list          # vertex id -> normal form (bytes)
    index: dict             # normal form -> vertex id
    dist0: np.ndarray       # vertex id -> distance from identity
    edges: list             # (u, v, letter) with u * letter = v, both directions present
    neighbor_lists: list    # vertex id -> neighbor ids in generator order
    _csr: object = field(default=None, repr=False)
    _bfs_cache: dict = field(default_factory=dict, repr=False)

    @property
    def num_vertices(self):
        return len(self.vertices)

    def csr(self):
        if self._csr is None:
            self._csr = graphs.adjacency_csr(
                self.num_vertices, ((u, v) for u, v, _ in self.edges)
            )
        return self._csr

    def vertex_word(self, v):
        return self.vertices[v]

    def vertex_label(self, v):
        return self.presentation.format(self.vertices[v])

    def vertex_id(self, word):
        nf = self.presentation.normal_form(word)
        if nf not in self.index:
            raise KeyError(
                f"element {self.presentation.format(nf)} is outside the radius-"
                f"{self.radius} ball"
            )
        return self.index[nf]

    def contains(self, word):
        return self.presentation.normal_form(word) in self.index

    # -- canonical geodesics ----------------------------------------------

    def bfs_tree_from(self, source):
        """Memoized breadth-first parents/distances with generator-order ties."""
        cached = self._bfs_cache.get(source)
        if cached is None:
            cached = graphs.bfs_tree(self.neighbor_lists, source)
            self._bfs_cache[source] = cached
        return cached

    def first_geodesic(self, u, v):
        """The canonical shortest path u -> v (breadth-first tree path)."""
        parent, _ = self.bfs_tree_from(u)
        return graphs.path_from_parents(parent, u, v)

    def sphere(self, n):
        return [v for v in range(self.num_vertices) if self.dist0[v] == n]


def build_ball(presentation, radius, max_vertices=None):
    """Breadth-first materialization of the radius-R ball.

    Vertex numbering is deterministic: layers in distance order, shortlex
    within a layer.  Raises BallTooLarge past the vertex cap (default
    5e6, overridable via CAYLEYLAB_MAX_VERTICES or ``max_vertices``).
    """
    if radius < 0:
        raise RadiusTooSmall("radius must be >= 0")
    cap = _vertex_cap(max_vertices)
    alphabet = presentation.alphabet
    letters = list(alphabet.letters())
    strategy = presentation.strategy

    if hasattr(strategy, "append_letter"):
        step = strategy.append_letter
    else:
        def step(word, letter):
            return presentation.normal_form(word + bytes([letter]))

    identity = presentation.identity
    seen = {identity: 0}
    layers = [[identity]]
    products = [[-1] * len(letters)]  # provisional id -> per-letter product id
    words = [identity]
    frontier = [0]
    for _ in range(radius):
        nxt = []
        for pid in frontier:
            u = words[pid]
            row = products[pid]
            for s in letters:
                v = step(u, s)
                vid = seen.get(v)
                if vid is None:
                    vid = len(words)
                    if vid >= cap:
                        raise BallTooLarge(
                            f"vertex cap {cap} exceeded at radius sweep"
                        )
                    seen[v] = vid
                    words.append(v)
                    products.append([-1] * len(letters))
                    nxt.append(vid)
                row[s] = vid
        if not nxt:
            break
        layers.append([words[pid] for pid in nxt])
        frontier = nxt
    # boundary layer: products of the last frontier still need resolution
    for pid in frontier:
        u = words[pid]
        row = products[pid]
        for s in letters:
            v = step(u, s)
            row[s] = seen.get(v, -1)

    # final numbering: (layer, shortlex)
    final_words = []
    dist0 = []
    for depth, layer in enumerate(layers):
        for w in sorted(layer, key=shortlex_key):
            final_words.append(w)
            dist0.append(depth)
    renumber = [0] * len(words)
    index = {}
    for new_id, w in enumerate(final_words):
        renumber[seen[w]] = new_id
        index[w] = new_id

    edges = []
    neighbor_lists = [[] for _ in final_words]
    for old_id, row in enumerate(products):
        u = renumber[old_id]
        for s, old_v in enumerate(row):
            if old_v >= 0:
                v = renumber[old_v]
                edges.append((u, v, s))
                neighbor_lists[u].append(v)
    edges.sort()
    return CayleyBall(
        presentation=presentation,
        radius=radius,
        vertices=final_words,
        index=index,
        dist0=np.array(dist0, dtype=np.int32),
        edges=edges,
        neighbor_lists=neighbor_lists,
    )


def word_distance(ball, u, v):
    """Graph distance between two ball vertices, certified as the word metric.

    Certification requires dist0(u) + dist0(v) <= R: then no geodesic can
    leave the ball.  Otherwise TruncatedDistance is raised, carrying the
    in-ball distance (an upper bound).
    """
    if isinstance(u, bytes):
        u = ball.vertex_id(u)
    if isinstance(v, bytes):
        v = ball.vertex_id(v)
    _, dist = ball.bfs_tree_from(u)
    d = dist[v]
    if d < 0:
        raise TruncatedDistance("vertices not connected inside the ball", None)
    if int(ball.dist0[u]) + int(ball.dist0[v]) > ball.radius:
        raise TruncatedDistance(
            f"cannot certify distance: dist0(u)+dist0(v) = "
            f"{int(ball.dist0[u]) + int(ball.dist0[v])} exceeds radius {ball.radius}",
            in_ball_distance=d,
        )
    return d


# ---------------------------------------------------------------------------
# growth
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthTable:
    values: tuple   # B(n), n = 0..R
    sphere: tuple   # S(n) = B(n) - B(n-1), S(0) = 1

    @property
    def radius(self):
        return len(self.values) - 1


def growth_table(presentation, radius, max_vertices=None):
    ball = build_ball(presentation, radius, max_vertices)
    return growth_from_ball(ball)


def growth_from_ball(ball):
    counts = np.bincount(ball.dist0, minlength=ball.radius + 1)
    values = np.cumsum(counts)
    return GrowthTable(values=tuple(int(x) for x in values), sphere=tuple(int(x) for x in counts))


@dataclass(frozen=True)
class GrowthClassification:
    kind: str                # "polynomial" | "exponential" | "inconclusive"
    parameter: float         # degree estimate or exponential rate
    residual_poly: float
    residual_exp: float


def _least_squares(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return 0.0, my, 0.0
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    intercept = my - slope * mx
    rss = sum((y - slope * x - intercept) ** 2 for x, y in zip(xs, ys))
    return slope, intercept, (rss / n) ** 0.5


def classify_growth(table, residual_factor=1.5):
    """Fit log B(n) against c*log n and c*n over the top half of the table."""
    if len(table.values) < 6:
        raise TableTooShort("growth classification needs a table of length >= 6")
    radius = table.radius
    start = max(1, radius // 2)
    ns = list(range(start, radius + 1))
    logb = [float(np.log(table.values[n])) for n in ns]
    if all(table.values[n] == table.values[start] for n in ns):
        return GrowthClassification("polynomial", 0.0, 0.0, 0.0)
    d, _, res_poly = _least_squares([float(np.log(n)) for n in ns], logb)
    r, _, res_exp = _least_squares([float(n) for n in ns], logb)
    lo, hi = sorted((res_poly, res_exp))
    if hi <= residual_factor * lo:
        return GrowthClassification("inconclusive", 0.0, res_poly, res_exp)
    if res_poly < res_exp:
        return GrowthClassification("polynomial", d, res_poly, res_exp)
    return GrowthClassification("exponential", r, res_poly, res_exp)


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------


def growth_to_csv(table):
    lines = ["n,ball,sphere"]
    for n, (b, s) in enumerate(zip(table.values, table.sphere)):
        lines.append(f"{n},{b},{s}")
    return "\n".join(lines) + "\n"


def ball_to_dot(ball, name="cayley"):
    """Undirected DOT export: vertex label = normal form, edge label = generator."""
    out = [f'graph "{name}" {{']
    for v in range(ball.num_vertices):
        out.append(f'  n{v} [label="{ball.vertex_label(v)}"];')
    for u, v, s in ball.edges:
        if u < v or (u == v and s % 2 == 0):
            out.append(
                f'  n{u} -- n{v} [label="{ball.presentation.alphabet.symbols[s]}"];'
            )
    out.append("}")
    return "\n".join(out) + "\n"


def ball_to_json(ball):
    payload = {
        "schema": "cayley-ball/1",
        "group": ball.presentation.spec_string(),
        "generators": list(ball.presentation.alphabet.generators),
        "radius": ball.radius,
        "vertices": [ball.vertex_label(v) for v in range(ball.num_vertices)],
        "dist0": [int(d) for d in ball.dist0],
        "edges": [
            [u, v, ball.presentation.alphabet.symbols[s]] for u, v, s in ball.edges
        ],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
