"""Quasi-isometry constant fitting over finite metric samples.

The two-sided embedding inequality for a map q between metric samples is

    d_X(x1, x2)/L - C  <=  d_Y(q x1, q x2)  <=  L * d_X(x1, x2) + C

with L >= 1 and C >= 0.  The inequality only pins constants down
existentially, so the fitter returns a canonical pair: the
lexicographically minimal (L, then C) over a quarter-step grid on L
refined by binary search to 1/1024, subject to the additive constant cap
C <= min(1, diameter of the range sample).  The cap keeps the fitted pair
at the sharp end of the admissible region (an (L, C) with C at global
scale is vacuous on a finite sample) and makes collapse maps report
NotEmbedding instead of absurd constants.

All feasibility arithmetic is exact: integer distances, Fraction L.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import graphs
from .errors import DegenerateDomain, NotEmbedding, NotQuasiIsometry, OutOfBall

L_MAX_DEFAULT = 64
GRID_STEP = Fraction(1, 4)
REFINE_TOL = Fraction(1, 1024)


# ---------------------------------------------------------------------------
# samples
# ---------------------------------------------------------------------------


class FiniteMetricSample:
    """Finite point set with an exact integer distance matrix."""

    def __init__(self, dist, ident="sample", labels=None, check=True):
        self.dist = np.asarray(dist, dtype=np.int64)
        self.ident = ident
        self.labels = labels
        if self.dist.ndim != 2 or self.dist.shape[0] != self.dist.shape[1]:
            raise ValueError("distance matrix must be square")
        if check:
            self._validate()

    def _validate(self):
        d = self.dist
        if (d < 0).any():
            raise ValueError("distances must be nonnegative")
        if (np.diag(d) != 0).any():
            raise ValueError("dist(x, x) must be 0")
        if (d != d.T).any():
            raise ValueError("distance matrix must be symmetric")
        n = d.shape[0]
        for k in range(n):
            # triangle inequality via one intermediate point at a time
            through = d[:, k][:, None] + d[k, :][None, :]
            if (d > through).any():
                raise ValueError("triangle inequality violated")

    @property
    def size(self):
        return self.dist.shape[0]

    @property
    def diameter(self):
        return int(self.dist.max()) if self.size else 0

    @classmethod
    def from_ball(cls, ball, vertex_ids=None, ident=None):
        """Sample the ball's graph metric on the given vertices (all by default)."""
        if vertex_ids is None:
            vertex_ids = list(range(ball.num_vertices))
        vertex_ids = list(vertex_ids)
        rows = graphs.dijkstra_rows(ball.csr(), vertex_ids)
        dist = rows[:, vertex_ids]
        if np.isinf(dist).any():
            raise ValueError("sample vertices are not mutually connected in the ball")
        labels = [ball.vertex_label(v) for v in vertex_ids]
        return cls(
            dist.astype(np.int64),
            ident=ident or f"{ball.presentation.spec_string()}-ball{ball.radius}",
            labels=labels,
            check=False,
        )


@dataclass
class MapSample:
    domain: FiniteMetricSample
    range_: FiniteMetricSample
    assignment: np.ndarray  # domain point index -> range point index

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=np.int64)
        if self.assignment.shape != (self.domain.size,):
            raise ValueError("assignment must be total on the domain")
        if self.domain.size and (
            self.assignment.min() < 0 or self.assignment.max() >= self.range_.size
        ):
            raise ValueError("assignment targets out of range")

    def image_distances(self):
        """Matrix d_Y(q(x1), q(x2)) aligned with the domain matrix."""
        a = self.assignment
        return self.range_.dist[np.ix_(a, a)]

    def to_json(self):
        payload = {
            "schema": "qi-map/1",
            "domain": self.domain.ident,
            "range": self.range_.ident,
            "assignment": [int(x) for x in self.assignment],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


@dataclass(frozen=True)
class QiConstants:
    L: Fraction
    C: Fraction
    coverage: int
    witness_lower: tuple = None   # (i, j) pair binding the lower inequality
    witness_upper: tuple = None

    def as_floats(self):
        return float(self.L), float(self.C)


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------


def _distance_profile(m: MapSample):
    """Per-distinct-domain-distance extremes of the image distance.

    Only extreme pairs can bind the inequality, so feasibility checks need
    one (min image dist) and one (max image dist) representative per
    distinct domain distance.
    """
    dx = m.domain.dist
    dy = m.image_distances()
    profile = {}
    witnesses = {}
    values = np.unique(dx)
    for val in values:
        mask = dx == val
        dmin = int(dy[mask].min())
        dmax = int(dy[mask].max())
        profile[int(val)] = (dmin, dmax)
        lo_idx = np.argwhere(mask & (dy == dmin))[0]
        hi_idx = np.argwhere(mask & (dy == dmax))[0]
        witnesses[int(val)] = (tuple(int(t) for t in lo_idx), tuple(int(t) for t in hi_idx))
    return profile, witnesses


def _c_min(profile, L: Fraction):
    """Smallest admissible C at multiplicative constant L, with binding dx."""
    best = Fraction(0)
    arg_lower = None
    arg_upper = None
    for dx, (dmin, dmax) in profile.items():
        lower_gap = Fraction(dx, 1) / L - dmin
        if lower_gap > best:
            best = lower_gap
            arg_lower, arg_upper = dx, None
        upper_gap = Fraction(dmax) - L * dx
        if upper_gap > best:
            best = upper_gap
            arg_lower, arg_upper = None, dx
    return best, arg_lower, arg_upper


def coverage_of(m: MapSample) -> int:
    image = np.unique(m.assignment)
    return int(m.range_.dist[:, image].min(axis=1).max())


def fit_qi_constants(m: MapSample, l_max=L_MAX_DEFAULT, c_cap=None) -> QiConstants:
    """Canonical embedding constants, or NotEmbedding.

    Lexicographically minimal (L, then C): the smallest L on the quarter
    grid admitting C <= cap is refined by binary search to 1/1024, then C
    is the exact minimum at that L.  cap defaults to min(1, range
    diameter).
    """
    if m.domain.size < 2:
        raise DegenerateDomain("need at least two domain points to fit constants")
    profile, pair_witnesses = _distance_profile(m)
    if c_cap is None:
        c_cap = min(Fraction(1), Fraction(m.range_.diameter))
    else:
        c_cap = Fraction(c_cap)

    def feasible(L):
        return _c_min(profile, L)[0] <= c_cap

    found = None
    L = Fraction(1)
    while L <= l_max:
        if feasible(L):
            found = L
            break
        L += GRID_STEP
    if found is None:
        raise NotEmbedding(
            f"no L <= {l_max} admits the inequality with C <= {float(c_cap)}"
        )
    if found > 1:
        lo, hi = found - GRID_STEP, found
        while hi - lo > REFINE_TOL:
            mid = (lo + hi) / 2
            if feasible(mid):
                hi = mid
            else:
                lo = mid
        found = hi
    c_val, arg_lower, arg_upper = _c_min(profile, found)
    wl = pair_witnesses[arg_lower][0] if arg_lower is not None else None
    wu = pair_witnesses[arg_upper][1] if arg_upper is not None else None
    return QiConstants(
        L=found,
        C=c_val,
        coverage=coverage_of(m),
        witness_lower=wl,
        witness_upper=wu,
    )


def check_qi_constants(m: MapSample, L, C, max_witnesses=10):
    """All pairs violating the two-sided inequality at the given constants."""
    L = Fraction(L)
    C = Fraction(C)
    dx = m.domain.dist
    dy = m.image_distances()
    violations = []
    n = m.domain.size
    for i in range(n):
        for j in range(i, n):
            dxi = int(dx[i, j])
            dyi = int(dy[i, j])
            if Fraction(dxi) / L - C > dyi:
                violations.append((i, j, "lower"))
            elif dyi > L * dxi + C:
                violations.append((i, j, "upper"))
            if len(violations) >= max_witnesses:
                return violations
    return violations


def fit_report_json(qi: QiConstants):
    payload = {
        "L": float(qi.L),
        "C": float(qi.C),
        "coverage": qi.coverage,
        "witnesses": [
            list(w) for w in (qi.witness_lower, qi.witness_upper) if w is not None
        ],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# the tree collapse map
# ---------------------------------------------------------------------------


@dataclass
class _TreeBall:
    parent: list
    depth: list
    children: list

    @property
    def size(self):
        return len(self.parent)


def _trivalent_ball(radius):
    """Rooted combinatorial ball of the 3-regular tree: root has 3 children,
    every other internal vertex 2."""
    parent = [-1]
    depth = [0]
    children = [[]]
    frontier = [0]
    for d in range(radius):
        nxt = []
        for v in frontier:
            fanout = 3 if v == 0 else 2
            for _ in range(fanout):
                w = len(parent)
                parent.append(v)
                depth.append(d + 1)
                children.append([])
                children[v].append(w)
                nxt.append(w)
        frontier = nxt
    return _TreeBall(parent, depth, children)


def _collapse_classes(tree: _TreeBall, k: int):
    """Partition the trivalent ball into collapse classes for valence k.

    Every uncovered vertex of odd depth starts a thick path that runs
    through first children for k-3 edges; everything else is a singleton
    class.  Contracting each class gives a graph of valence ~k away from
    the root.
    """
    cls = [-1] * tree.size
    next_class = 0
    for v in range(tree.size):
        if cls[v] != -1 or tree.depth[v] % 2 == 0:
            continue
        cur = v
        cls[cur] = next_class
        for _ in range(k - 3):
            if not tree.children[cur]:
                break
            cur = tree.children[cur][0]
            if cls[cur] != -1:
                break
            cls[cur] = next_class
        next_class += 1
    for v in range(tree.size):
        if cls[v] == -1:
            cls[v] = next_class
            next_class += 1
    return cls, next_class


def build_tree_qi(k, radius):
    """The collapse map from a trivalent tree ball onto a valence-k tree.

    Thick paths of length k-3 (first-child chains started at odd depths)
    map onto single vertices; all other edges map isometrically onto
    edges.  Returns a MapSample whose range is the contracted tree with
    its graph metric.
    """
    if k < 4:
        raise ValueError("target valence must be >= 4")
    if radius < 2:
        raise ValueError("radius must be >= 2")
    tree = _trivalent_ball(radius)
    cls, n_cls = _collapse_classes(tree, k)

    # domain distances: tree metric via parent walks would be quadratic in
    # paths; the ball is small, so BFS over the explicit edge list instead
    edges = [(v, tree.parent[v]) for v in range(1, tree.size)]
    csr = graphs.adjacency_csr(tree.size, edges)
    dom_rows = graphs.dijkstra_rows(csr, list(range(tree.size)))
    domain = FiniteMetricSample(
        dom_rows.astype(np.int64), ident=f"tree3-ball{radius}", check=False
    )

    quotient_edges = set()
    for v in range(1, tree.size):
        a, b = cls[v], cls[tree.parent[v]]
        if a != b:
            quotient_edges.add((min(a, b), max(a, b)))
    qcsr = graphs.adjacency_csr(n_cls, sorted(quotient_edges))
    rng_rows = graphs.dijkstra_rows(qcsr, list(range(n_cls)))
    range_ = FiniteMetricSample(
        rng_rows.astype(np.int64), ident=f"tree{k}-image-ball{radius}", check=False
    )
    return MapSample(domain=domain, range_=range_, assignment=np.array(cls))


# ---------------------------------------------------------------------------
# quasi-converse, nets, Hausdorff
# ---------------------------------------------------------------------------


@dataclass
class QuasiConverse:
    map: MapSample
    displacement: int          # max over both composite displacements
    displacement_domain: int   # sup d_X(x, qbar(q(x)))
    displacement_range: int    # sup d_Y(y, q(qbar(y)))


def quasi_converse(m: MapSample, max_coverage=None) -> QuasiConverse:
    """Nearest-image preimage map, ties broken by lowest domain index."""
    cov = coverage_of(m)
    if max_coverage is not None and cov > max_coverage:
        raise NotQuasiIsometry(f"coverage {cov} exceeds bound {max_coverage}")
    dy_to_images = m.range_.dist[:, m.assignment]  # range point x domain point
    back = np.argmin(dy_to_images, axis=1)  # argmin picks the lowest index on ties
    converse = MapSample(domain=m.range_, range_=m.domain, assignment=back)
    disp_range = int(
        np.max(m.range_.dist[np.arange(m.range_.size), m.assignment[back]])
    )
    disp_domain = int(
        np.max(m.domain.dist[np.arange(m.domain.size), back[m.assignment]])
    )
    return QuasiConverse(
        map=converse,
        displacement=max(disp_domain, disp_range),
        displacement_domain=disp_domain,
        displacement_range=disp_range,
    )


@dataclass
class NetReport:
    separated: bool
    covering: bool
    separation_witness: tuple = None  # pair of net points too close
    covering_witness: int = None      # point left uncovered

    @property
    def passed(self):
        return self.separated and self.covering


def check_net(sample: FiniteMetricSample, net_ids, delta, epsilon) -> NetReport:
    """Is the subset delta-separated and epsilon-covering (closed bounds)?"""
    net_ids = sorted(set(int(i) for i in net_ids))
    sep_witness = None
    for a_pos, a in enumerate(net_ids):
        for b in net_ids[a_pos + 1:]:
            if sample.dist[a, b] < delta:
                sep_witness = (a, b)
                break
        if sep_witness:
            break
    cover_witness = None
    if net_ids:
        nearest = sample.dist[:, net_ids].min(axis=1)
        bad = np.nonzero(nearest > epsilon)[0]
        if bad.size:
            cover_witness = int(bad[0])
    else:
        cover_witness = 0 if sample.size else None
    return NetReport(
        separated=sep_witness is None,
        covering=cover_witness is None,
        separation_witness=sep_witness,
        covering_witness=cover_witness,
    )


def hausdorff_distance(set_a, set_b, sample: FiniteMetricSample):
    """Exact max-min Hausdorff distance between two point subsets."""
    set_a = sorted(set(int(i) for i in set_a))
    set_b = sorted(set(int(i) for i in set_b))
    if not set_a or not set_b:
        raise ValueError("both subsets must be nonempty")
    d_ab = int(sample.dist[np.ix_(set_a, set_b)].min(axis=1).max())
    d_ba = int(sample.dist[np.ix_(set_b, set_a)].min(axis=1).max())
    return max(d_ab, d_ba)


# ---------------------------------------------------------------------------
# quasi-action probe
# ---------------------------------------------------------------------------


@dataclass
class QuasiActionReport:
    defect_compose: int     # sup dist(q_l(q_e(g)), q_{le}(g))
    defect_inverse: int     # sup dist(q_l(q_{l^-1}(g)), g)
    kernel_size: int        # |{l : sup dist(q_l(g), g) <= K}|
    kernel_elements: list
    probes_used: int

    @property
    def defect(self):
        return max(self.defect_compose, self.defect_inverse)


def substitution_assignment(ball_from, ball_to, images):
    """Vertex map induced by sending each generator to an image word.

    ``images`` maps each generator letter index of the source presentation
    to a word of the target presentation.  Vertices whose image leaves the
    target ball get -1.
    """
    out = np.full(ball_from.num_vertices, -1, dtype=np.int64)
    target = ball_to.presentation
    for v in range(ball_from.num_vertices):
        word = ball_from.vertex_word(v)
        image = target.identity
        ok = True
        for letter in word:
            if letter % 2 == 0:
                piece = images[letter]
            else:
                piece = target.invert(images[letter - 1])
            image = target.multiply(image, piece)
        nf = target.normal_form(image)
        if nf in ball_to.index:
            out[v] = ball_to.index[nf]
        else:
            out[v] = -1
    return out


def quasi_action_probe(
    ball_lambda,
    ball_g,
    q_assign,
    qbar_assign,
    lambda_words,
    probe_radius,
    kernel_bound=0,
):
    """Empirical quasi-action defects for q_l = q . L_l . qbar.

    ``q_assign`` maps lambda-ball vertices to G-ball vertices (-1 when the
    image leaves the ball), ``qbar_assign`` the other way.  Probes are the
    G-ball vertices within ``probe_radius`` whose every required
    composition stays inside both balls; OutOfBall if none survive.
    """
    lam_pres = ball_lambda.presentation
    q_assign = np.asarray(q_assign, dtype=np.int64)
    qbar_assign = np.asarray(qbar_assign, dtype=np.int64)

    def q_lambda(word, g_vertex):
        lv = qbar_assign[g_vertex]
        if lv < 0:
            return -1
        shifted = lam_pres.multiply(word, ball_lambda.vertex_word(lv))
        if shifted not in ball_lambda.index:
            return -1
        return int(q_assign[ball_lambda.index[shifted]])

    words = [lam_pres.normal_form(w) for w in lambda_words]
    probes = [
        g for g in range(ball_g.num_vertices) if ball_g.dist0[g] <= probe_radius
    ]
    if not probes:
        raise OutOfBall("no probe vertices at this radius")

    def graph_dist(u, v):
        _, dist = ball_g.bfs_tree_from(u)
        d = dist[v]
        if d < 0:
            raise OutOfBall("probe images disconnected in the ball")
        return d

    defect_compose = 0
    used = 0
    for wl in words:
        for we in words:
            wle = lam_pres.multiply(wl, we)
            any_probe = False
            for g in probes:
                inner = q_lambda(we, g)
                if inner < 0:
                    continue
                lhs = q_lambda(wl, inner)
                rhs = q_lambda(wle, g)
                if lhs < 0 or rhs < 0:
                    continue
                any_probe = True
                defect_compose = max(defect_compose, graph_dist(lhs, rhs))
            if not any_probe:
                raise OutOfBall(
                    "no probe survives the composition "
                    f"{lam_pres.format(wl)} . {lam_pres.format(we)}"
                )
            used += 1
    defect_inverse = 0
    for wl in words:
        winv = lam_pres.invert(wl)
        for g in probes:
            inner = q_lambda(winv, g)
            if inner < 0:
                continue
            outer = q_lambda(wl, inner)
            if outer < 0:
                continue
            defect_inverse = max(defect_inverse, graph_dist(outer, g))

    kernel = []
    for wl in words:
        worst = 0
        defined = False
        for g in probes:
            img = q_lambda(wl, g)
            if img < 0:
                continue
            defined = True
            worst = max(worst, graph_dist(img, g))
        if defined and worst <= kernel_bound:
            kernel.append(lam_pres.format(wl))
    return QuasiActionReport(
        defect_compose=defect_compose,
        defect_inverse=defect_inverse,
        kernel_size=len(kernel),
        kernel_elements=kernel,
        probes_used=used,
    )
