"""Finitely generated groups with desk-scale decidable word problems.

A :class:`Presentation` bundles an alphabet, relators and a *strategy*: a
total, terminating normal-form procedure for one family of groups.  The
catalog covers free groups, free abelian groups, the discrete Heisenberg
group, Baumslag-Solitar groups BS(p, q), direct and free products of
catalog members, and a generic shortlex rewriting fallback whose confluence
the caller must assert.  Two words represent the same element exactly when
their normal forms are equal (within the strategy's guarantee).

Subgroup membership is answered by per-strategy oracles: folded-automaton
tracing for free groups, integer lattice solving for free abelian groups,
and a bounded product enumeration fallback that answers yes/unknown and
never claims membership falsely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    MembershipUnknown,
    NonConfluentRules,
    PresentationFormatError,
    UnsupportedWord,
)
from .words import EMPTY, Alphabet, Word, free_reduce, invert, shortlex_less


# ---------------------------------------------------------------------------
# strategies
# ---------------------------------------------------------------------------


class FreeGroupStrategy:
    name = "free"

    def __init__(self, n):
        self.n = n

    def spec_string(self):
        return f"free:{self.n}"

    def normal_form(self, alphabet, word):
        return free_reduce(word)

    @staticmethod
    def append_letter(word, letter):
        # fast path for ball BFS: word is already reduced
        if word and word[-1] == letter ^ 1:
            return word[:-1]
        return word + bytes([letter])


class FreeAbelianStrategy:
    """Canonical form: generators in index order, exponents as signed runs."""

    name = "abelian"

    def __init__(self, n):
        self.n = n

    def spec_string(self):
        return f"abelian:{self.n}"

    def normal_form(self, alphabet, word):
        counts = [0] * self.n
        for b in word:
            counts[b >> 1] += -1 if b & 1 else 1
        out = bytearray()
        for g, c in enumerate(counts):
            letter = 2 * g if c > 0 else 2 * g + 1
            out.extend([letter] * abs(c))
        return bytes(out)

    def exponents(self, word):
        counts = [0] * self.n
        for b in word:
            counts[b >> 1] += -1 if b & 1 else 1
        return counts

    def word_from_exponents(self, counts):
        out = bytearray()
        for g, c in enumerate(counts):
            letter = 2 * g if c > 0 else 2 * g + 1
            out.extend([letter] * abs(c))
        return bytes(out)


class HeisenbergStrategy:
    """Discrete Heisenberg group on generators x, y.

    Elements are the integer triples (a, b, c) of upper unitriangular 3x3
    matrices; (a,b,c)*(a',b',c') = (a+a', b+b', c+c'+a*b').  The canonical
    word is x^a y^b k^c with k = x- y- x y (the commutator, which is
    central and evaluates to (0, 0, 1)).
    """

    name = "heis"
    # letters: x=0, x-=1, y=2, y-=3
    _TABLE = {0: (1, 0, 0), 1: (-1, 0, 0), 2: (0, 1, 0), 3: (0, -1, 0)}

    def spec_string(self):
        return "heis"

    def evaluate(self, word):
        a, b, c = 0, 0, 0
        for letter in word:
            da, db, dc = self._TABLE[letter]
            c += dc + a * db
            a += da
            b += db
        return a, b, c

    def normal_form(self, alphabet, word):
        a, b, c = self.evaluate(word)
        # x^a y^b alone evaluates to (a, b, a*b): correct with commutator power
        c -= a * b
        out = bytearray()
        out.extend([0 if a > 0 else 1] * abs(a))
        out.extend([2 if b > 0 else 3] * abs(b))
        commutator = bytes([1, 3, 0, 2]) if c > 0 else bytes([3, 1, 2, 0])
        out.extend(commutator * abs(c))
        return bytes(out)


class BaumslagSolitarStrategy:
    """BS(p, q) = < a, b | a b^p a- = b^q >, a = stable letter.

    Normal forms are the standard HNN forms obtained by Britton pinch
    reduction (a b^{pk} a- -> b^{qk}, a- b^{qk} a -> b^{pk}) interleaved
    with pushing whole multiples leftwards so that the exponent following
    a equals its residue mod p and the exponent following a- its residue
    mod q.
    """

    name = "bs"
    # letters: a=0, a-=1, b=2, b-=3

    def __init__(self, p, q):
        if p < 1 or q < 1:
            raise ValueError("BS(p, q) requires p, q >= 1")
        self.p = p
        self.q = q

    def spec_string(self):
        return f"bs:{self.p},{self.q}"

    @staticmethod
    def _to_alternating(word):
        """[m0, e1, m1, ..., en, mn] for b^m0 a^e1 b^m1 ... a^en b^mn."""
        exps = [0]
        signs = []
        for letter in word:
            if letter == 2:
                exps[-1] += 1
            elif letter == 3:
                exps[-1] -= 1
            else:
                signs.append(1 if letter == 0 else -1)
                exps.append(0)
        return exps, signs

    def _britton(self, exps, signs):
        changed = True
        while changed:
            changed = False
            for i in range(len(signs) - 1):
                m = exps[i + 1]
                if signs[i] == 1 and signs[i + 1] == -1 and m % self.p == 0:
                    merged = exps[i] + self.q * (m // self.p) + exps[i + 2]
                elif signs[i] == -1 and signs[i + 1] == 1 and m % self.q == 0:
                    merged = exps[i] + self.p * (m // self.q) + exps[i + 2]
                else:
                    continue
                exps[i : i + 3] = [merged]
                del signs[i : i + 2]
                changed = True
                break

    def normal_form(self, alphabet, word):
        exps, signs = self._to_alternating(word)
        while True:
            self._britton(exps, signs)
            moved = False
            for i in range(len(signs), 0, -1):
                modulus = self.p if signs[i - 1] == 1 else self.q
                outward = self.q if signs[i - 1] == 1 else self.p
                k, r = divmod(exps[i], modulus)
                if k:
                    exps[i] = r
                    exps[i - 1] += outward * k
                    moved = True
            if not moved:
                break
        out = bytearray()

        def emit_b(m):
            out.extend([2 if m > 0 else 3] * abs(m))

        emit_b(exps[0])
        for s, m in zip(signs, exps[1:]):
            out.append(0 if s == 1 else 1)
            emit_b(m)
        return bytes(out)


class DirectProductStrategy:
    """Letters of the two factors commute; canonical form is nf(left)nf(right)."""

    name = "product"

    def __init__(self, left: "Presentation", right: "Presentation"):
        self.left = left
        self.right = right
        self.split = len(left.alphabet)

    def spec_string(self):
        return f"product({self.left.spec_string()}, {self.right.spec_string()})"

    def _split(self, word):
        lw = bytes(b for b in word if b < self.split)
        rw = bytes(b - self.split for b in word if b >= self.split)
        return lw, rw

    def normal_form(self, alphabet, word):
        lw, rw = self._split(word)
        lnf = self.left.normal_form(lw)
        rnf = self.right.normal_form(rw)
        return lnf + bytes(b + self.split for b in rnf)


class FreeProductStrategy:
    """Alternating normal form: nonempty factor-normal blocks, sides alternating."""

    name = "freeproduct"

    def __init__(self, left: "Presentation", right: "Presentation"):
        self.left = left
        self.right = right
        self.split = len(left.alphabet)

    def spec_string(self):
        return f"freeproduct({self.left.spec_string()}, {self.right.spec_string()})"

    def _block_nf(self, side, block):
        if side == 0:
            return self.left.normal_form(block)
        shifted = bytes(b - self.split for b in block)
        return bytes(b + self.split for b in self.right.normal_form(shifted))

    def normal_form(self, alphabet, word):
        blocks = []
        for b in word:
            side = 0 if b < self.split else 1
            if blocks and blocks[-1][0] == side:
                blocks[-1][1].append(b)
            else:
                blocks.append((side, bytearray([b])))
        blocks = [(side, self._block_nf(side, bytes(body))) for side, body in blocks]
        while True:
            blocks = [blk for blk in blocks if blk[1]]
            for i in range(len(blocks) - 1):
                if blocks[i][0] == blocks[i + 1][0]:
                    side = blocks[i][0]
                    merged = self._block_nf(side, blocks[i][1] + blocks[i + 1][1])
                    blocks[i : i + 2] = [(side, merged)]
                    break
            else:
                break
        return b"".join(body for _, body in blocks)


class RewritingStrategy:
    """Shortlex-reducing rewriting with caller-asserted confluence.

    Rules must strictly decrease shortlex order; free reduction is always
    applied as well.  No completion is attempted: when ``confluent`` is
    False the strategy refuses to canonicalize.
    """

    name = "rewrite"

    def __init__(self, rules, confluent=False):
        for lhs, rhs in rules:
            if not shortlex_less(rhs, lhs):
                raise ValueError("rewriting rule must decrease shortlex order")
        self.rules = tuple(rules)
        self.confluent = confluent

    def spec_string(self):
        return "rewrite"

    def normal_form(self, alphabet, word):
        if not self.confluent:
            raise NonConfluentRules(
                "rewriting rules are not flagged confluent; refusing to canonicalize"
            )
        word = free_reduce(word)
        changed = True
        while changed:
            changed = False
            for lhs, rhs in self.rules:
                idx = word.find(lhs)
                if idx >= 0:
                    word = free_reduce(word[:idx] + rhs + word[idx + len(lhs):])
                    changed = True
                    break
        return word


# ---------------------------------------------------------------------------
# subgroup specifications and membership oracles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupSpec:
    """Finitely generated subgroup given by generator words.

    ``oracle`` selects the membership procedure: "auto" picks the exact
    per-strategy oracle when one exists and falls back to bounded
    enumeration; "exhaustive" forces the enumeration oracle, which answers
    yes/unknown only.
    """

    generators: tuple
    oracle: str = "auto"
    label: str = ""

    def describe(self, presentation):
        if self.label:
            return self.label
        return "<" + ",".join(presentation.alphabet.format(g) for g in self.generators) + ">"


class _StallingsAutomaton:
    """Folded labeled graph recognizing membership in a f.g. free subgroup.

    Built as a wedge of loops at the base state, then folded: whenever two
    same-label edges leave one state their targets are identified.  Tracing
    a reduced word from the base back to the base decides membership.
    """

    def __init__(self, generators):
        self.adj = [[]]  # state -> list of (letter, target), pre-fold multigraph
        self.parent = [0]
        for gen in generators:
            word = free_reduce(gen)
            state = 0
            for i, letter in enumerate(word):
                nxt = 0 if i == len(word) - 1 else self._new_state()
                self.adj[state].append((letter, nxt))
                self.adj[nxt].append((letter ^ 1, state))
                state = nxt
        self._fold()
        self.trans = {}
        for s in range(len(self.adj)):
            if self._find(s) == s:
                self.trans[s] = {l: self._find(t) for l, t in self.adj[s]}

    def _new_state(self):
        self.adj.append([])
        self.parent.append(len(self.adj) - 1)
        return len(self.adj) - 1

    def _find(self, s):
        while self.parent[s] != s:
            self.parent[s] = self.parent[self.parent[s]]
            s = self.parent[s]
        return s

    def _union(self, a, b):
        a, b = self._find(a), self._find(b)
        if a == b:
            return
        if b == 0:
            a, b = b, a
        self.parent[b] = a
        self.adj[a].extend(self.adj[b])
        self.adj[b] = []

    def _fold(self):
        changed = True
        while changed:
            changed = False
            for s in range(len(self.adj)):
                if self._find(s) != s:
                    continue
                seen = {}
                for letter, target in self.adj[s]:
                    target = self._find(target)
                    if letter in seen and seen[letter] != target:
                        self._union(seen[letter], target)
                        changed = True
                        break
                    seen[letter] = target
                if changed:
                    break

    def accepts(self, word):
        state = 0
        for letter in free_reduce(word):
            state = self.trans[state].get(letter)
            if state is None:
                return False
        return state == 0

    def words_within(self, radius):
        """All reduced accepted words of length <= radius (complete)."""
        out = [EMPTY]
        stack = [(0, EMPTY)]
        while stack:
            state, word = stack.pop()
            if len(word) == radius:
                continue
            for letter, target in sorted(self.trans[state].items()):
                if word and letter == word[-1] ^ 1:
                    continue
                nxt = word + bytes([letter])
                if target == 0:
                    out.append(nxt)
                stack.append((target, nxt))
        return sorted(set(out), key=lambda w: (len(w), w))


def _integer_solvable(columns, target):
    """Is target an integer combination of the given integer columns?

    Column-style Hermite reduction: for each row, gcd-eliminate until at
    most one remaining column is nonzero there, fix its coefficient by
    divisibility, subtract, and drop it from the remaining set.
    """
    n = len(target)
    remaining = [list(c) for c in columns]
    t = list(target)
    for i in range(n):
        while True:
            nz = [c for c in remaining if c[i] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda c: abs(c[i]))
            base = nz[0]
            progressed = False
            for c in nz[1:]:
                k = c[i] // base[i]
                if k:
                    for r in range(n):
                        c[r] -= k * base[r]
                    progressed = True
            if not progressed:
                break
        pivot = next((c for c in remaining if c[i] != 0), None)
        if pivot is None:
            continue
        if t[i] % pivot[i] != 0:
            return False
        k = t[i] // pivot[i]
        for r in range(n):
            t[r] -= k * pivot[r]
        remaining.remove(pivot)
    return all(x == 0 for x in t)


class _AbelianLattice:
    def __init__(self, strategy, generators):
        self.n = strategy.n
        self.strategy = strategy
        self.columns = [tuple(strategy.exponents(g)) for g in generators]

    def contains(self, word):
        return _integer_solvable(self.columns, tuple(self.strategy.exponents(word)))

    def vectors_within(self, radius):
        """All lattice points of 1-norm <= radius (complete)."""
        out = []

        def rec(prefix, remaining, dims_left):
            if dims_left == 1:
                for v in range(-remaining, remaining + 1):
                    vec = prefix + (v,)
                    if self.contains_vector(vec):
                        out.append(vec)
                return
            for v in range(-remaining, remaining + 1):
                rec(prefix + (v,), remaining - abs(v), dims_left - 1)

        rec((), radius, self.n)
        return out

    def contains_vector(self, vec):
        return _integer_solvable(self.columns, vec)


def _membership_backend(presentation, spec):
    strategy = presentation.strategy
    if spec.oracle == "auto":
        if isinstance(strategy, FreeGroupStrategy):
            return ("free", _StallingsAutomaton(spec.generators))
        if isinstance(strategy, FreeAbelianStrategy):
            return ("abelian", _AbelianLattice(strategy, spec.generators))
    return ("exhaustive", None)


def subgroup_member(presentation, spec, word, radius=None):
    """Answer "yes" / "no" / "unknown". Never a false yes.

    The exhaustive oracle enumerates products of the subgroup generators to
    depth ``radius`` and cannot certify absence, so it answers unknown
    instead of no.
    """
    word = presentation.normal_form(word)
    kind, backend = _membership_backend(presentation, spec)
    if kind == "free":
        return "yes" if backend.accepts(word) else "no"
    if kind == "abelian":
        return "yes" if backend.contains(word) else "no"
    if radius is None or radius < len(word):
        raise MembershipUnknown(
            "exhaustive membership oracle needs radius >= |word|"
        )
    seen = {EMPTY}
    frontier = [EMPTY]
    gens = [presentation.normal_form(g) for g in spec.generators]
    gens += [invert(g) for g in gens]
    for _ in range(radius):
        nxt = []
        for u in frontier:
            for g in gens:
                v = presentation.multiply(u, g)
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
        if word in seen:
            return "yes"
    return "yes" if word in seen else "unknown"


def subgroup_elements_within(presentation, spec, radius):
    """Normal forms of subgroup elements of word length <= radius.

    Returns (elements, complete).  Exact oracles produce complete lists;
    the exhaustive fallback enumerates generator products to depth
    ``radius`` and is flagged incomplete because of possible distortion.
    """
    kind, backend = _membership_backend(presentation, spec)
    if kind == "free":
        return [free_reduce(w) for w in backend.words_within(radius)], True
    if kind == "abelian":
        vecs = backend.vectors_within(radius)
        words = [presentation.strategy.word_from_exponents(list(v)) for v in vecs]
        return sorted(words, key=lambda w: (len(w), w)), True
    gens = [presentation.normal_form(g) for g in spec.generators]
    gens += [invert(g) for g in gens]
    seen = {EMPTY}
    frontier = [EMPTY]
    for _ in range(radius):
        nxt = []
        for u in frontier:
            for g in gens:
                v = presentation.multiply(u, g)
                if v not in seen and len(v) <= radius:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return sorted(seen, key=lambda w: (len(w), w)), False


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    alphabet: Alphabet
    strategy: object
    relators: tuple = ()
    peripherals: tuple = ()

    def __post_init__(self):
        for r in self.relators:
            self.alphabet.validate(r)

    def spec_string(self):
        return self.strategy.spec_string()

    @property
    def identity(self) -> Word:
        return EMPTY

    def normal_form(self, word: Word) -> Word:
        self.alphabet.validate(word)
        return self.strategy.normal_form(self.alphabet, word)

    def multiply(self, u: Word, v: Word) -> Word:
        return self.normal_form(u + v)

    def invert(self, word: Word) -> Word:
        return self.normal_form(invert(word))

    def parse(self, text: str) -> Word:
        return self.alphabet.parse(text)

    def format(self, word: Word) -> str:
        return self.alphabet.format(word)

    def generator_words(self):
        return [bytes([i]) for i in self.alphabet.letters()]


_FREE_NAMES = "abcdefgh"
_ABELIAN_NAMES = "xyzw"


def _default_names(pool, n, prefix):
    if n <= len(pool):
        return [pool[i] for i in range(n)]
    return [f"{prefix}{i + 1}" for i in range(n)]


def free_group(n, names=None):
    names = names or _default_names(_FREE_NAMES, n, "g")
    return Presentation(Alphabet(names), FreeGroupStrategy(n))


def free_abelian(n, names=None):
    names = names or _default_names(_ABELIAN_NAMES, n, "x")
    return Presentation(Alphabet(names), FreeAbelianStrategy(n))


def heisenberg(names=("x", "y")):
    return Presentation(Alphabet(names), HeisenbergStrategy())


def baumslag_solitar(p, q, names=("a", "b")):
    alphabet = Alphabet(names)
    # relator a b^p a- b^-q
    relator = bytes([0] + [2] * p + [1] + [3] * q)
    return Presentation(alphabet, BaumslagSolitarStrategy(p, q), relators=(relator,))


def _combine(kind, left, right):
    names = left.alphabet.generators + right.alphabet.generators
    if len(set(names)) != len(names):
        raise ValueError(f"factor generator names collide: {names}")
    alphabet = Alphabet(names)
    strategy = kind(left, right)
    return Presentation(alphabet, strategy)


def direct_product(left, right):
    return _combine(DirectProductStrategy, left, right)


def free_product(left, right):
    return _combine(FreeProductStrategy, left, right)


def rewriting_presentation(names, rules, confluent=False, relators=()):
    alphabet = Alphabet(names)
    parsed = tuple((alphabet.parse(l), alphabet.parse(r)) for l, r in rules)
    return Presentation(
        alphabet, RewritingStrategy(parsed, confluent), relators=tuple(relators)
    )


def with_peripherals(presentation, peripherals):
    return Presentation(
        presentation.alphabet,
        presentation.strategy,
        presentation.relators,
        tuple(peripherals),
    )


# ---------------------------------------------------------------------------
# group spec strings and presentation files
# ---------------------------------------------------------------------------

_ATOMIC_ARITY = {"free": None, "abelian": None, "heis": 2, "bs": 2}


def parse_group_spec(spec, names=None):
    """Build a presentation from a compact spec: free:2, abelian:3, heis, bs:1,2.

    ``free`` and ``abelian`` without an explicit arity take their rank from
    ``names`` (the presentation file style, where the generators line fixes
    the rank).
    """
    head, _, arg = spec.partition(":")
    if head in ("free", "abelian"):
        if arg:
            n = int(arg)
        elif names:
            n = len(names)
        else:
            raise PresentationFormatError(f"spec {spec!r} needs a rank or generator names")
        if names and len(names) != n:
            raise PresentationFormatError(
                f"spec {spec!r} rank {n} does not match {len(names)} generator names"
            )
        return free_group(n, names) if head == "free" else free_abelian(n, names)
    if head == "heis":
        if arg:
            raise PresentationFormatError("heis takes no parameters")
        return heisenberg(names or ("x", "y"))
    if head == "bs":
        try:
            p, q = (int(x) for x in arg.split(","))
        except ValueError:
            raise PresentationFormatError(f"bad bs spec {spec!r}") from None
        return baumslag_solitar(p, q, names or ("a", "b"))
    raise PresentationFormatError(f"unknown group spec {spec!r}")


def _atomic_arity(spec):
    head, _, arg = spec.partition(":")
    if head in ("free", "abelian"):
        if not arg:
            raise PresentationFormatError(
                f"factor spec {spec!r} needs an explicit rank, e.g. {head}:1"
            )
        return int(arg)
    if head in _ATOMIC_ARITY and _ATOMIC_ARITY[head] is not None:
        return _ATOMIC_ARITY[head]
    raise PresentationFormatError(f"unknown factor spec {spec!r}")


_KNOWN_KEYS = {"generators", "relator", "strategy", "peripheral"}


def parse_presentation_file(text):
    """Parse the presentation text format.

    Recognized keys: ``generators``, ``relator``, ``strategy``,
    ``peripheral``.  For product/freeproduct strategies the two factor
    specs follow on the strategy line and the generators line lists the
    factor generators in order.  Unknown keys are rejected.
    """
    generators = None
    relators = []
    strategy_line = None
    peripheral_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in _KNOWN_KEYS:
            raise PresentationFormatError(f"line {lineno}: unknown key {key!r}")
        value = value.strip()
        if key == "generators":
            generators = value.split()
        elif key == "relator":
            relators.append(value)
        elif key == "strategy":
            strategy_line = value
        elif key == "peripheral":
            peripheral_lines.append(value)
    if generators is None:
        raise PresentationFormatError("missing generators line")
    if strategy_line is None:
        raise PresentationFormatError("missing strategy line")

    parts = strategy_line.split()
    head = parts[0]
    if head in ("product", "freeproduct"):
        if len(parts) != 3:
            raise PresentationFormatError(
                f"strategy {head} needs two factor specs"
            )
        n_left = _atomic_arity(parts[1])
        n_right = _atomic_arity(parts[2])
        if n_left + n_right != len(generators):
            raise PresentationFormatError(
                f"generators line has {len(generators)} names, factors need "
                f"{n_left}+{n_right}"
            )
        left = parse_group_spec(parts[1], generators[:n_left])
        right = parse_group_spec(parts[2], generators[n_left:])
        pres = direct_product(left, right) if head == "product" else free_product(left, right)
    elif head == "rewrite":
        if len(parts) != 1:
            raise PresentationFormatError("strategy rewrite takes no parameters")
        alphabet = Alphabet(generators)
        rules = []
        for r in relators:
            w = free_reduce(alphabet.parse(r))
            if not w:
                continue
            cut = (len(w) + 1) // 2
            u, v_inv = w[:cut], invert(w[cut:])
            lhs, rhs = (u, v_inv) if shortlex_less(v_inv, u) else (v_inv, u)
            rules.append((lhs, rhs))
        pres = Presentation(
            alphabet,
            RewritingStrategy(tuple(rules), confluent=False),
            relators=tuple(alphabet.parse(r) for r in relators),
        )
    else:
        if len(parts) != 1:
            raise PresentationFormatError(f"bad strategy line {strategy_line!r}")
        pres = parse_group_spec(head, generators)
        if relators:
            parsed = tuple(pres.alphabet.parse(r) for r in relators)
            pres = Presentation(pres.alphabet, pres.strategy, parsed)

    if peripheral_lines:
        periph = tuple(
            SubgroupSpec(tuple(pres.alphabet.parse(w) for w in line.split()))
            for line in peripheral_lines
        )
        pres = with_peripherals(pres, periph)
    return pres
