"""Atomic link labels: Seifert links, key-chains, unlinks and database atoms.

Component names are fixed per label kind:

* ``SeifertLink``: ``fiber[i]`` for the regular fibres, plus ``star1``/``star2``.
* ``KeyChain``: ``key[i]`` and ``keyring``.
* ``Unlink``: ``"0"``, ``"1"``, ...
* ``AtomRef``: whatever the atom database declares.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import TYPE_CHECKING, Iterable, Iterator, Union

from splicegraph.errors import SpliceError

if TYPE_CHECKING:
    from splicegraph.atomdb import AtomDatabase

STAR1 = "star1"
STAR2 = "star2"
KEYRING = "keyring"
_STARS = (STAR1, STAR2)


def fiber(i: int) -> str:
    return f"fiber[{i}]"


def key(i: int) -> str:
    return f"key[{i}]"


def _index(name: str) -> int:
    return int(name[name.index("[") + 1 : -1])


def is_fiber(name: str) -> bool:
    return name.startswith("fiber[")


def is_key(name: str) -> bool:
    return name.startswith("key[")


# ---------------------------------------------------------------------------
# slopes and descriptors


@dataclass(frozen=True, order=True)
class Slope:
    """Extended rational ``num/den``; ``Slope(1, 0)`` is infinity."""

    num: int
    den: int

    def __post_init__(self) -> None:
        n, d = self.num, self.den
        if n == 0 and d == 0:
            raise SpliceError("INVALID_SLOPE", "0/0 is not a slope")
        g = math.gcd(n, d)
        n, d = n // g, d // g
        if d < 0 or (d == 0 and n < 0):
            n, d = -n, -d
        object.__setattr__(self, "num", n)
        object.__setattr__(self, "den", d)

    @property
    def is_infinite(self) -> bool:
        return self.den == 0

    def reciprocal_of(self, other: Slope) -> bool:
        """True when ``self * other == 1``; ``0`` and infinity count as reciprocal."""
        return self.num * other.num == self.den * other.den

    def __str__(self) -> str:
        if self.den == 0:
            return "inf"
        return str(self.num) if self.den == 1 else f"{self.num}/{self.den}"


@dataclass(frozen=True)
class SeifertManifoldDescriptor:
    """Symbolic ``M(g, b; a1/b1, ...)``."""

    g: int
    b: int
    slopes: tuple[Slope, ...] = ()

    def __post_init__(self) -> None:
        if self.b < 0:
            raise SpliceError("INVALID_DESCRIPTOR", "boundary count must be >= 0")
        object.__setattr__(self, "slopes", tuple(self.slopes))

    def __str__(self) -> str:
        inner = ", ".join(str(s) for s in self.slopes)
        return f"M({self.g},{self.b};{(' ' + inner) if inner else ''})"


FIBRE_COMPLEMENT_OF_S3_FIBRING = "FIBRE_COMPLEMENT_OF_S3_FIBRING"
SOLID_TORUS_FIBRING = "SOLID_TORUS_FIBRING"
KEYCHAIN_TYPE = "KEYCHAIN_TYPE"
NOT_EMBEDDABLE = "NOT_EMBEDDABLE"


def classify_embeddable(d: SeifertManifoldDescriptor) -> str:
    """Decide which family of Seifert-fibred submanifolds of S^3 ``d`` belongs to."""
    if d.g != 0 or d.b < 1:
        return NOT_EMBEDDABLE
    k = len(d.slopes)
    if k == 2:
        s1, s2 = d.slopes
        if abs(s1.num * s2.den - s2.num * s1.den) == 1:
            return FIBRE_COMPLEMENT_OF_S3_FIBRING
        return NOT_EMBEDDABLE
    if k == 0 and d.b >= 2:
        return KEYCHAIN_TYPE
    if k <= 1:
        return SOLID_TORUS_FIBRING
    return NOT_EMBEDDABLE


# ---------------------------------------------------------------------------
# Brunnian sets


@dataclass(frozen=True)
class BrunnianSet:
    """Family of index subsets whose sublinks are unlinks.

    The empty set is never stored but always counts as a member.
    """

    ground: frozenset[str]
    members: frozenset[frozenset[str]]

    @classmethod
    def of(cls, ground: Iterable[str], members: Iterable[Iterable[str]]) -> BrunnianSet:
        fam = frozenset(frozenset(m) for m in members)
        return cls(frozenset(ground), frozenset(m for m in fam if m))

    def __contains__(self, subset: object) -> bool:
        s = frozenset(subset)  # type: ignore[arg-type]
        return not s or s in self.members

    def __iter__(self) -> Iterator[frozenset[str]]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def sorted_members(self) -> list[list[str]]:
        return sorted((sorted(m) for m in self.members), key=lambda m: (len(m), m))

    def union_closed(self) -> bool:
        for s, t in combinations(self.members, 2):
            if s & t and (s | t) not in self.members:
                return False
        return True

    def downward_closed(self) -> bool:
        for s in self.members:
            for x in s:
                if len(s) > 1 and (s - {x}) not in self.members:
                    return False
        return True

    def rename(self, mapping: dict[str, str]) -> BrunnianSet:
        return BrunnianSet.of(
            (mapping.get(x, x) for x in self.ground),
            ({mapping.get(x, x) for x in m} for m in self.members),
        )

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(m) + "}" for m in self.sorted_members()) + "}"


def all_nonempty_subsets(items: Iterable[str]) -> list[frozenset[str]]:
    items = sorted(items)
    return [frozenset(c) for r in range(1, len(items) + 1) for c in combinations(items, r)]


# ---------------------------------------------------------------------------
# labels


@dataclass(frozen=True)
class SeifertLink:
    """``S(p, q | X)``: gcd(p, q) regular fibres plus the singular fibres in X."""

    p: int
    q: int
    X: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.p == 0 or self.q == 0:
            raise SpliceError("INVALID_PARAM", "p and q must be nonzero")
        xs = frozenset(self.X)
        if not xs <= set(_STARS):
            raise SpliceError("INVALID_PARAM", f"bad singular fibre set {sorted(xs)}")
        object.__setattr__(self, "X", xs)

    @property
    def gcd(self) -> int:
        return math.gcd(self.p, self.q)

    @property
    def components(self) -> tuple[str, ...]:
        return tuple(fiber(i) for i in range(self.gcd)) + tuple(s for s in _STARS if s in self.X)

    def is_unknot(self) -> bool:
        return not self.X and self.gcd == 1 and (abs(self.p) == 1 or abs(self.q) == 1)

    def is_hopf(self) -> bool:
        comps = self.components
        if len(comps) != 2:
            return False
        if not self.X:
            return abs(self.p) == 2 and abs(self.q) == 2
        # one fibre and one singular fibre; Hopf iff both unknotted with |lk| = 1
        return abs(linking_number(self, comps[0], comps[1])) == 1

    def __str__(self) -> str:
        flags = ",".join("*1" if s == STAR1 else "*2" for s in _STARS if s in self.X)
        return f"S({self.p},{self.q}|{flags})"


def torus_knot(p: int, q: int) -> SeifertLink:
    return SeifertLink(p, q)


UNKNOT = SeifertLink(1, 1)
HOPF = SeifertLink(2, 2)


@dataclass(frozen=True)
class KeyChain:
    """``H^p``: a keyring with ``p`` keys; the first ``neg`` clasps are left-handed."""

    p: int
    neg: int = 0

    def __post_init__(self) -> None:
        if self.p < 0 or not 0 <= self.neg <= self.p:
            raise SpliceError("INVALID_PARAM", f"bad key-chain H({self.p};neg={self.neg})")

    @property
    def components(self) -> tuple[str, ...]:
        return tuple(key(i) for i in range(self.p)) + (KEYRING,)

    def clasp_sign(self, k: str) -> int:
        return -1 if _index(k) < self.neg else 1

    def __str__(self) -> str:
        return f"H({self.p})" if not self.neg else f"H({self.p};neg={self.neg})"


@dataclass(frozen=True)
class Unlink:
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise SpliceError("INVALID_PARAM", "an unlink needs at least one component")

    @property
    def components(self) -> tuple[str, ...]:
        return tuple(str(i) for i in range(self.n))

    def __str__(self) -> str:
        return f"U({self.n})"


@dataclass(frozen=True)
class AtomRef:
    """Reference to a database atom; components are the atom's declared labels."""

    name: str
    components: tuple[str, ...] = field(default=())

    def __str__(self) -> str:
        return f"atom({self.name})"


LinkLabel = Union[SeifertLink, KeyChain, Unlink, AtomRef]


def atom_ref(name: str, db: AtomDatabase | None = None) -> AtomRef:
    rec = _db(db).lookup(name)
    return AtomRef(rec.name, tuple(rec.components))


def _db(db: AtomDatabase | None) -> AtomDatabase:
    if db is not None:
        return db
    from splicegraph.atomdb import default_db

    return default_db()


def is_seifert_fibred(label: LinkLabel) -> bool:
    return isinstance(label, (SeifertLink, KeyChain))


def is_unknot(label: LinkLabel) -> bool:
    if isinstance(label, SeifertLink):
        return label.is_unknot()
    if isinstance(label, Unlink):
        return label.n == 1
    if isinstance(label, KeyChain):
        return label.p == 0
    return False


def is_hopf(label: LinkLabel) -> bool:
    if isinstance(label, SeifertLink):
        return label.is_hopf()
    if isinstance(label, KeyChain):
        return label.p == 1
    return False


# ---------------------------------------------------------------------------
# linking numbers, slopes, Brunnian sets


def _check_comp(label: LinkLabel, c: str) -> None:
    if c not in label.components:
        raise SpliceError("UNKNOWN_COMPONENT", f"{c!r} is not a component of {label}")


def linking_number(
    label: LinkLabel, c1: str, c2: str, db: AtomDatabase | None = None
) -> int:
    _check_comp(label, c1)
    _check_comp(label, c2)
    if c1 == c2:
        raise SpliceError("SAME_COMPONENT", "linking number needs two distinct components")
    if isinstance(label, SeifertLink):
        g = label.gcd
        pp, qq = label.p // g, label.q // g
        kinds = {c1, c2}
        if kinds == {STAR1, STAR2}:
            return 1
        if STAR1 in kinds:
            return pp
        if STAR2 in kinds:
            return qq
        return pp * qq
    if isinstance(label, KeyChain):
        if KEYRING in (c1, c2):
            k = c1 if c2 == KEYRING else c2
            return label.clasp_sign(k)
        return 0
    if isinstance(label, Unlink):
        return 0
    rec = _db(db).lookup(label.name)
    return rec.linking(c1, c2)


def fibre_slope(label: LinkLabel, c: str) -> Slope:
    _check_comp(label, c)
    if is_unknot(label) or is_hopf(label):
        raise SpliceError("NON_UNIQUE", f"{label} has no unique Seifert fibring")
    if isinstance(label, SeifertLink):
        g = label.gcd
        if c == STAR1:
            return Slope(label.p, label.q)
        if c == STAR2:
            return Slope(label.q, label.p)
        return Slope((label.p // g) * (label.q // g), 1)
    if isinstance(label, KeyChain):
        return Slope(1, 0) if c == KEYRING else Slope(0, 1)
    raise SpliceError("NO_FIBRE_SLOPE", f"{label} is not Seifert-fibred")


def strong_brunnian(label: LinkLabel, db: AtomDatabase | None = None) -> BrunnianSet:
    comps = label.components
    if isinstance(label, SeifertLink):
        p, q = abs(label.p), abs(label.q)
        if p % q == 0 or q % p == 0:
            return BrunnianSet.of(comps, ({c} for c in comps))
        return BrunnianSet.of(comps, ({s} for s in label.X))
    if isinstance(label, KeyChain):
        keys = comps[:-1]
        return BrunnianSet.of(comps, all_nonempty_subsets(keys) + [frozenset({KEYRING})])
    if isinstance(label, Unlink):
        return BrunnianSet.of(comps, all_nonempty_subsets(comps))
    rec = _db(db).lookup(label.name)
    return rec.brunnian()


def _min_nonneg_inverse(a: int, m: int) -> int:
    if m == 1:
        return 0
    return pow(a % m, -1, m)


def complement_descriptor(label: LinkLabel) -> SeifertManifoldDescriptor:
    if isinstance(label, KeyChain):
        return SeifertManifoldDescriptor(0, label.p + 1)
    if not isinstance(label, SeifertLink):
        raise SpliceError("NO_DESCRIPTOR", f"{label} is not Seifert-fibred")
    g = label.gcd
    pp, qq = label.p // g, label.q // g
    # p'm - lq' = 1 with the least non-negative m
    m = _min_nonneg_inverse(pp, abs(qq))
    l = (pp * m - 1) // qq
    X = label.X
    if not X:
        return SeifertManifoldDescriptor(0, g, (Slope(m, qq), Slope(l, pp)))
    if X == {STAR1}:
        return SeifertManifoldDescriptor(0, 1 + g, (Slope(m, qq),))
    if X == {STAR2}:
        return SeifertManifoldDescriptor(0, 1 + g, (Slope(l, pp),))
    return SeifertManifoldDescriptor(0, 2 + g)


# ---------------------------------------------------------------------------
# canonical forms

Param = tuple[int, int, frozenset]


def _orbit_moves(p: int, q: int, X: frozenset) -> Iterator[tuple[Param, dict[str, str]]]:
    """Single applications of the generating relations, with component maps."""
    g = math.gcd(p, q)
    fibres = {fiber(i): fiber(i) for i in range(g)}
    ident = {**fibres, **{s: s for s in X}}
    yield (-p, -q, X), ident
    swapped = frozenset(STAR2 if s == STAR1 else STAR1 for s in X)
    yield (q, p, swapped), {**fibres, **{s: (STAR2 if s == STAR1 else STAR1) for s in X}}
    if STAR1 in X and q > 0 and p % q == 0:
        # singular fibre *1 becomes a regular fibre
        yield (p + p // q, q + 1, X - {STAR1}), {**ident, STAR1: fiber(g)}
    if STAR1 not in X and q >= 2 and p % q == 0:
        last = fiber(g - 1)
        m = dict(ident)
        m[last] = STAR1
        yield (p - p // q, q - 1, X | {STAR1}), m


def seifert_orbit(s: SeifertLink) -> list[tuple[SeifertLink, dict[str, str]]]:
    """Every parameter triple reachable from ``s`` under relations (1)-(3).

    Each entry carries one component map from ``s`` to that representative.
    """
    start: Param = (s.p, s.q, s.X)
    seen: dict[Param, dict[str, str]] = {start: {c: c for c in s.components}}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        cmap = seen[cur]
        for nxt, step in _orbit_moves(*cur):
            if nxt not in seen:
                seen[nxt] = {c: step[v] for c, v in cmap.items()}
                queue.append(nxt)
    return [(SeifertLink(p, q, X), m) for (p, q, X), m in seen.items()]


def _canon_key(s: SeifertLink) -> tuple:
    return (
        len(s.X),
        s.p < 0,
        abs(s.p) > abs(s.q),
        abs(s.p),
        abs(s.q),
        s.p * s.q < 0,
        tuple(sorted(s.X)),
    )


@dataclass(frozen=True)
class Canonical:
    """Result of canonicalising a label.

    ``cmap`` sends old component names to new ones; ``flip`` holds the old
    components whose orientation sign must be reversed.
    """

    label: LinkLabel
    cmap: dict[str, str]
    flip: frozenset[str] = frozenset()


def _canon_seifert(s: SeifertLink) -> Canonical:
    comps = s.components
    if s.is_unknot():
        return Canonical(UNKNOT, {comps[0]: fiber(0)})
    if s.is_hopf():
        lk = linking_number(s, comps[0], comps[1])
        cmap = {comps[0]: fiber(0), comps[1]: fiber(1)}
        return Canonical(HOPF, cmap, frozenset({comps[1]}) if lk < 0 else frozenset())
    best, best_map = min(seifert_orbit(s), key=lambda e: _canon_key(e[0]))
    return Canonical(best, best_map)


def seifert_canon(s: SeifertLink) -> SeifertLink:
    """Least representative of the unoriented isotopy class of ``s``."""
    return _canon_seifert(s).label  # type: ignore[return-value]


def seifert_equiv(s1: SeifertLink, s2: SeifertLink) -> bool:
    return seifert_canon(s1) == seifert_canon(s2)


def canonical_label(label: LinkLabel) -> Canonical:
    """Canonical representative of any label, mapping unknots and Hopf links to S(1,1), S(2,2)."""
    if isinstance(label, SeifertLink):
        return _canon_seifert(label)
    if isinstance(label, KeyChain):
        if label.p == 0:
            return Canonical(UNKNOT, {KEYRING: fiber(0)})
        if label.p == 1:
            flip = frozenset({KEYRING}) if label.neg else frozenset()
            return Canonical(HOPF, {key(0): fiber(0), KEYRING: fiber(1)}, flip)
        return Canonical(label, {c: c for c in label.components})
    if isinstance(label, Unlink) and label.n == 1:
        return Canonical(UNKNOT, {"0": fiber(0)})
    return Canonical(label, {c: c for c in label.components})


def label_symmetry_classes(label: LinkLabel) -> list[list[str]]:
    """Partition of components into classes that any relabelling may permute freely."""
    if isinstance(label, SeifertLink):
        fibres = [c for c in label.components if is_fiber(c)]
        return [fibres] + [[s] for s in _STARS if s in label.X]
    if isinstance(label, KeyChain):
        keys = list(label.components[:-1])
        return [keys[: label.neg], keys[label.neg :], [KEYRING]]
    if isinstance(label, Unlink):
        return [list(label.components)]
    return [[c] for c in label.components]


def label_text(label: LinkLabel) -> str:
    return str(label)
