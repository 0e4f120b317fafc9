"""Database of non-parametric link atoms (hyperbolic links and friends).

Every combinatorially checkable property of a record is verified on load:
Brunnian-set shape, linking consistency, Alexander normalisation at ``t = 1``
and closure of the declared symmetry group.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

from splicegraph.errors import AtomValidationError, SpliceError
from splicegraph.laurent import LaurentPoly
from splicegraph.links import BrunnianSet

Symmetry = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class AtomRecord:
    name: str
    components: tuple[str, ...]
    strong_brunnian: tuple[tuple[str, ...], ...]
    symmetries: tuple[Symmetry, ...] = ()
    linking_matrix: tuple[tuple[int, ...], ...] = ()
    component_alexander: Mapping[str, LaurentPoly] = field(default_factory=dict)
    volume: str | None = None
    sublinks: Mapping[frozenset[str], str] = field(default_factory=dict)
    is_KGL_for: str | None = None

    def index(self, c: str) -> int:
        try:
            return self.components.index(c)
        except ValueError:
            raise SpliceError("UNKNOWN_COMPONENT", f"{c!r} is not a component of {self.name}")

    def brunnian(self) -> BrunnianSet:
        return BrunnianSet.of(self.components, self.strong_brunnian)

    def linking(self, c1: str, c2: str) -> int:
        if not self.linking_matrix:
            raise SpliceError("NO_LINKING_DATA", f"atom {self.name} has no linking matrix")
        return self.linking_matrix[self.index(c1)][self.index(c2)]

    def volume_decimal(self) -> Decimal | None:
        return None if self.volume is None else Decimal(self.volume)

    def alexander_of(self, c: str) -> LaurentPoly:
        try:
            return self.component_alexander[c]
        except KeyError:
            raise SpliceError(
                "NO_ALEXANDER_DATA", f"atom {self.name} has no polynomial for {c!r}"
            ) from None

    def permutation_group(self) -> list[tuple[int, ...]]:
        """Component permutations realised by declared symmetries (identity included)."""
        n = len(self.components)
        perms = {tuple(range(n))}
        perms.update(p for p, _ in self.symmetries)
        return sorted(perms)

    # -- serialisation -------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "components": list(self.components),
            "strong_brunnian": [list(s) for s in self.strong_brunnian],
            "symmetries": [{"perm": list(p), "signs": list(s)} for p, s in self.symmetries],
            "linking_matrix": [list(r) for r in self.linking_matrix],
            "component_alexander": {
                c: poly.to_json() for c, poly in self.component_alexander.items()
            },
            "volume": self.volume,
            "sublinks": [
                {"subset": sorted(s), "expr": e}
                for s, e in sorted(self.sublinks.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
            ],
            "is_KGL_for": self.is_KGL_for,
        }


def _sort_family(fam: Iterable[Iterable[str]]) -> tuple[tuple[str, ...], ...]:
    sets = {tuple(sorted(s)) for s in fam}
    return tuple(sorted(sets, key=lambda s: (len(s), s)))


def record_from_json(data: Mapping[str, Any]) -> AtomRecord:
    """Parse one record; structural problems raise ``AtomValidationError``."""
    name = str(data.get("name", "?"))
    try:
        comps = tuple(str(c) for c in data["components"])
        alex = {
            str(c): LaurentPoly.from_json(p)
            for c, p in (data.get("component_alexander") or {}).items()
        }
        volume = data.get("volume")
        if volume is not None and not isinstance(volume, str):
            volume = str(volume)
        return AtomRecord(
            name=name,
            components=comps,
            strong_brunnian=_sort_family(data.get("strong_brunnian", [])),
            symmetries=tuple(
                (tuple(int(i) for i in s["perm"]), tuple(int(i) for i in s["signs"]))
                for s in data.get("symmetries", [])
            ),
            linking_matrix=tuple(tuple(int(x) for x in r) for r in data.get("linking_matrix", [])),
            component_alexander=alex,
            volume=volume,
            sublinks={
                frozenset(str(c) for c in s["subset"]): str(s["expr"])
                for s in data.get("sublinks", [])
            },
            is_KGL_for=data.get("is_KGL_for"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise AtomValidationError([(name, "record", f"malformed record: {exc}")]) from None


def validate_record(rec: AtomRecord) -> list[tuple[str, str, str]]:
    """Field-level diagnostics for ``rec``; an empty list means the record is sound."""
    out: list[tuple[str, str, str]] = []

    def bad(fld: str, msg: str) -> None:
        out.append((rec.name, fld, msg))

    comps = rec.components
    n = len(comps)
    if not rec.name:
        bad("name", "empty name")
    if n == 0 or len(set(comps)) != n:
        bad("components", "components must be a nonempty list of distinct labels")
        return out
    cset = set(comps)

    fam = [frozenset(s) for s in rec.strong_brunnian]
    for s in fam:
        if not s:
            bad("strong_brunnian", "the empty set is not stored")
        elif not s <= cset:
            bad("strong_brunnian", f"{sorted(s)} uses unknown components")
    ub = BrunnianSet.of(comps, fam)
    if not ub.downward_closed():
        bad("strong_brunnian", "every sublink of an unlink is an unlink (family not downward closed)")

    lm = rec.linking_matrix
    if lm:
        if len(lm) != n or any(len(r) != n for r in lm):
            bad("linking_matrix", f"expected a {n}x{n} matrix")
        else:
            for i in range(n):
                if lm[i][i] != 0:
                    bad("linking_matrix", "diagonal entries must be 0")
                for j in range(n):
                    if lm[i][j] != lm[j][i]:
                        bad("linking_matrix", "matrix is not symmetric")
            for s in fam:
                idx = [comps.index(c) for c in s if c in cset]
                for i in idx:
                    for j in idx:
                        if i != j and lm[i][j] != 0:
                            bad("strong_brunnian", f"{sorted(s)} has nonzero linking number")
                            break
                    else:
                        continue
                    break

    for c, poly in rec.component_alexander.items():
        if c not in cset:
            bad("component_alexander", f"unknown component {c!r}")
        elif poly.is_zero() or abs(poly.evaluate(1)) != 1:
            bad("component_alexander", f"polynomial of {c!r} is not +-1 at t=1")

    if rec.volume is not None:
        try:
            if Decimal(rec.volume) <= 0:
                bad("volume", "volume must be positive")
        except InvalidOperation:
            bad("volume", f"not a decimal: {rec.volume!r}")

    ident = (tuple(range(n)), (1,) * n)
    group: set[Symmetry] = set(rec.symmetries)
    for perm, signs in group:
        if sorted(perm) != list(range(n)) or len(signs) != n or any(s not in (1, -1) for s in signs):
            bad("symmetries", f"malformed symmetry {list(perm)}/{list(signs)}")
            group = set()
            break
    if group:
        group.add(ident)
        for a in group:
            for b in group:
                if _compose(a, b) not in group:
                    bad("symmetries", "declared symmetries are not closed under composition")
                    break
            else:
                continue
            break
        for perm, _ in group:
            image = {frozenset(comps[perm[comps.index(c)]] for c in s) for s in fam}
            if image != set(fam):
                bad("symmetries", f"permutation {list(perm)} does not preserve strong_brunnian")
                break

    for s, expr in rec.sublinks.items():
        if not s or not s < cset:
            bad("sublinks", f"subset {sorted(s)} must be a proper nonempty subset")
        elif s in ub:
            want = {"O", "U(1)"} if len(s) == 1 else {f"U({len(s)})"}
            if expr.replace(" ", "") not in want:
                bad("sublinks", f"{sorted(s)} is an unlink but resolves to {expr!r}")

    if rec.is_KGL_for is not None:
        if rec.is_KGL_for not in cset:
            bad("is_KGL_for", f"unknown component {rec.is_KGL_for!r}")
        elif (cset - {rec.is_KGL_for}) not in ub:
            bad("is_KGL_for", "the non-distinguished components must form an unlink")
    return out


def _compose(a: Symmetry, b: Symmetry) -> Symmetry:
    """Apply ``b`` first, then ``a``."""
    pa, sa = a
    pb, sb = b
    return tuple(pa[pb[i]] for i in range(len(pb))), tuple(sb[i] * sa[pb[i]] for i in range(len(pb)))


class AtomDatabase:
    """Immutable name-indexed collection of validated atom records."""

    def __init__(self, records: Iterable[AtomRecord] = ()) -> None:
        recs: dict[str, AtomRecord] = {}
        diags: list[tuple[str, str, str]] = []
        for r in records:
            if r.name in recs:
                diags.append((r.name, "name", "duplicate atom name"))
                continue
            diags.extend(validate_record(r))
            recs[r.name] = r
        if diags:
            raise AtomValidationError(diags)
        self._records = recs

    def __contains__(self, name: object) -> bool:
        return name in self._records

    def __len__(self) -> int:
        return len(self._records)

    def names(self) -> list[str]:
        return list(self._records)

    def records(self) -> list[AtomRecord]:
        return list(self._records.values())

    def lookup(self, name: str) -> AtomRecord:
        try:
            return self._records[name]
        except KeyError:
            raise SpliceError("UNKNOWN_ATOM", f"no atom named {name!r}") from None

    def resolve_sublink(self, name: str, subset: Iterable[str]) -> str:
        """DSL expression for the sublink of atom ``name`` on ``subset``."""
        rec = self.lookup(name)
        s = frozenset(subset)
        if not s or not s < set(rec.components):
            raise SpliceError("BAD_SUBSET", f"{sorted(s)} is not a proper nonempty subset")
        if s in rec.sublinks:
            return rec.sublinks[s]
        if s in rec.brunnian():
            return "O" if len(s) == 1 else f"U({len(s)})"
        raise SpliceError("NO_SUBLINK_RECORD", f"atom {name} has no record for {sorted(s)}")

    def merged(self, other: AtomDatabase) -> AtomDatabase:
        """New database where records of ``other`` override same-named ones."""
        recs = dict(self._records)
        recs.update(other._records)
        return AtomDatabase(recs.values())

    def to_json(self) -> dict[str, Any]:
        return {"atoms": [r.to_json() for r in self._records.values()]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AtomDatabase):
            return NotImplemented
        return self._records == other._records


def loads(text: str) -> AtomDatabase:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AtomValidationError([("<file>", "json", str(exc))]) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("atoms"), list):
        raise AtomValidationError([("<file>", "atoms", "top level must be {\"atoms\": [...]}")])
    return AtomDatabase(record_from_json(r) for r in doc["atoms"])


def load(source: str | Path | Mapping[str, Any]) -> AtomDatabase:
    """Load from a path or an already-decoded ``{"atoms": [...]}`` mapping."""
    if isinstance(source, Mapping):
        return loads(json.dumps(source))
    return loads(Path(source).read_text(encoding="utf-8"))


def seed_path() -> Path:
    return Path(str(resources.files("splicegraph") / "data" / "seed_atoms.json"))


@lru_cache(maxsize=1)
def default_db() -> AtomDatabase:
    return load(seed_path())
