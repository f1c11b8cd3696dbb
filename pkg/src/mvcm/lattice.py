"""Generator-set algebra for finite atomic distributive lattices.

Every element of an :class:`AtomLattice` is the set of atoms (generators) it
is the join of, stored as a bit pattern over the atom roster.  Join and meet
are union and intersection, the Heyting implication is complement-union.

:class:`FiniteLatticeTable` is the explicit, table-driven counterpart used as
an independent oracle: it knows nothing about atoms and checks the lattice,
distributivity, atomicity and residuation axioms by exhaustion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

MAX_ATOMS = 64
TOP_LABEL = "Th"
BOTTOM_LABEL = "0"


class LatticeError(ValueError):
    """Base class for lattice construction and algebra errors."""


class LatticeMismatchError(LatticeError):
    """Raised when two operands belong to different lattices."""


class LabelError(LatticeError):
    """Raised for labels that cannot be parsed against a lattice."""


class TableFormatError(LatticeError):
    """Raised for malformed :class:`FiniteLatticeTable` input."""


class ResiduationError(LatticeError):
    """Raised when a residual set has no greatest element."""


class AtomSet:
    """An element of an :class:`AtomLattice`, identified by its atom set."""

    __slots__ = ("lattice", "mask")

    def __init__(self, lattice: AtomLattice, mask: int = 0):
        if mask < 0 or mask > lattice.full_mask:
            raise LatticeError(f"mask {mask:#x} outside the atom roster")
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, name, value):
        raise AttributeError("AtomSet is immutable")

    @property
    def members(self) -> frozenset[str]:
        return frozenset(self.lattice.atoms[i] for i in self._indices())

    def atoms(self) -> tuple[str, ...]:
        """Member atoms in roster order."""
        return tuple(self.lattice.atoms[i] for i in self._indices())

    def _indices(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[str]:
        return iter(self.atoms())

    def __contains__(self, atom: str) -> bool:
        return atom in self.lattice.index and bool(self.mask >> self.lattice.index[atom] & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AtomSet):
            return NotImplemented
        return self.mask == other.mask and self.lattice.atoms == other.lattice.atoms

    def __hash__(self) -> int:
        return hash((self.lattice.atoms, self.mask))

    def __or__(self, other: AtomSet) -> AtomSet:
        return join(self, other)

    def __and__(self, other: AtomSet) -> AtomSet:
        return meet(self, other)

    def __xor__(self, other: AtomSet) -> AtomSet:
        return sym_diff(self, other)

    def __sub__(self, other: AtomSet) -> AtomSet:
        return set_minus(self, other)

    def __le__(self, other: AtomSet) -> bool:
        return leq(self, other)

    def __ge__(self, other: AtomSet) -> bool:
        return leq(other, self)

    def __lt__(self, other: AtomSet) -> bool:
        return leq(self, other) and self.mask != other.mask

    def __gt__(self, other: AtomSet) -> bool:
        return leq(other, self) and self.mask != other.mask

    def __repr__(self) -> str:
        return f"AtomSet({self.lattice.format(self)})"

    def __str__(self) -> str:
        return self.lattice.format(self)


class AtomLattice:
    """The powerset lattice over an atom roster, with linguistic labels.

    ``names`` maps labels to iterables of atom identifiers.  The bottom label
    ``"0"`` and a top label for the full set are added when missing.
    """

    def __init__(
        self,
        atoms: Sequence[str],
        names: Mapping[str, Iterable[str]] | None = None,
        top_label: str = TOP_LABEL,
    ):
        atoms = tuple(atoms)
        if len(set(atoms)) != len(atoms):
            raise LatticeError("atom identifiers must be unique")
        if len(atoms) > MAX_ATOMS:
            raise LatticeError(f"at most {MAX_ATOMS} atoms are supported, got {len(atoms)}")
        for a in atoms:
            _check_identifier(a, "atom")
        self.atoms = atoms
        self.index = {a: i for i, a in enumerate(atoms)}
        self.full_mask = (1 << len(atoms)) - 1

        table: dict[str, AtomSet] = {}
        for label, members in (names or {}).items():
            _check_identifier(label, "label")
            table[label] = self.element(members)
        if BOTTOM_LABEL in table and table[BOTTOM_LABEL].mask != 0:
            raise LatticeError(f"label {BOTTOM_LABEL!r} is reserved for the empty set")
        table.setdefault(BOTTOM_LABEL, self.bottom)
        if not any(v.mask == self.full_mask for v in table.values()):
            if top_label in table:
                raise LatticeError(f"label {top_label!r} is reserved for the full atom set")
            table[top_label] = self.top

        by_value: dict[int, str] = {}
        for label, value in table.items():
            if value.mask in by_value:
                raise LatticeError(
                    f"labels {by_value[value.mask]!r} and {label!r} name the same element"
                )
            by_value[value.mask] = label
        self.names: dict[str, AtomSet] = table
        self._label_of = by_value

    @property
    def bottom(self) -> AtomSet:
        return AtomSet(self, 0)

    @property
    def top(self) -> AtomSet:
        return AtomSet(self, self.full_mask)

    @property
    def top_label(self) -> str:
        return self._label_of[self.full_mask]

    def __len__(self) -> int:
        return 1 << len(self.atoms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AtomLattice):
            return NotImplemented
        return self.atoms == other.atoms and self._label_of == other._label_of

    def __hash__(self) -> int:
        return hash(self.atoms)

    def __repr__(self) -> str:
        return f"AtomLattice(atoms={list(self.atoms)}, names={len(self.names)})"

    def element(self, members: Iterable[str]) -> AtomSet:
        mask = 0
        for a in members:
            if a not in self.index:
                raise LabelError(f"unknown atom {a!r}")
            mask |= 1 << self.index[a]
        return AtomSet(self, mask)

    def from_mask(self, mask: int) -> AtomSet:
        return AtomSet(self, mask)

    def elements(self) -> Iterator[AtomSet]:
        """All ``2**n`` elements, in bit-pattern order."""
        for mask in range(self.full_mask + 1):
            yield AtomSet(self, mask)

    def generators(self) -> list[AtomSet]:
        return [AtomSet(self, 1 << i) for i in range(len(self.atoms))]

    def label_of(self, a: AtomSet) -> str | None:
        return self._label_of.get(a.mask)

    def parse(self, text: str) -> AtomSet:
        """Resolve a label or an explicit ``{atom,...}`` set."""
        s = "".join(text.split())
        if not s:
            raise LabelError("empty label")
        if s.startswith("{"):
            if not s.endswith("}"):
                raise LabelError(f"unterminated atom set {text!r}")
            body = s[1:-1]
            if not body:
                return self.bottom
            parts = body.split(",")
            if any(not p for p in parts):
                raise LabelError(f"empty atom in {text!r}")
            try:
                return self.element(parts)
            except LabelError as exc:
                raise LabelError(f"{exc} in {text!r}") from None
        try:
            return self.names[s]
        except KeyError:
            raise LabelError(f"unknown label {s!r}") from None

    def format(self, a: AtomSet) -> str:
        label = self._label_of.get(a.mask)
        if label is not None:
            return label
        return "{" + ",".join(a.atoms()) + "}"


def _check_identifier(name: str, what: str) -> None:
    if not isinstance(name, str) or not name or any(ch in name for ch in "{},= \t\n#:"):
        raise LatticeError(f"invalid {what} identifier {name!r}")


def _same(a: AtomSet, b: AtomSet) -> None:
    if a.lattice is not b.lattice and a.lattice.atoms != b.lattice.atoms:
        raise LatticeMismatchError("operands belong to different lattices")


def join(a: AtomSet, b: AtomSet) -> AtomSet:
    _same(a, b)
    return AtomSet(a.lattice, a.mask | b.mask)


def meet(a: AtomSet, b: AtomSet) -> AtomSet:
    """Greatest lower bound; also the monoid multiplication."""
    _same(a, b)
    return AtomSet(a.lattice, a.mask & b.mask)


def implies(a: AtomSet, b: AtomSet) -> AtomSet:
    """Heyting implication ``a => b``: the largest ``c`` with ``a & c <= b``."""
    _same(a, b)
    return AtomSet(a.lattice, (~a.mask & a.lattice.full_mask) | b.mask)


def sym_diff(a: AtomSet, b: AtomSet) -> AtomSet:
    _same(a, b)
    return AtomSet(a.lattice, a.mask ^ b.mask)


def set_minus(a: AtomSet, b: AtomSet) -> AtomSet:
    _same(a, b)
    return AtomSet(a.lattice, a.mask & ~b.mask)


def leq(a: AtomSet, b: AtomSet) -> bool:
    _same(a, b)
    return a.mask & ~b.mask == 0


def generator_count(a: AtomSet) -> int:
    return a.mask.bit_count()


def join_all(items: Iterable[AtomSet], lattice: AtomLattice) -> AtomSet:
    mask = 0
    for a in items:
        _same(a, lattice.bottom)
        mask |= a.mask
    return AtomSet(lattice, mask)


# ---------------------------------------------------------------------------
# Table-driven oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteLatticeTable:
    """A finite lattice given by its order relation and a monoid table.

    ``leq`` is a set of ``(x, y)`` pairs meaning ``x <= y``; ``monoid`` maps
    ``(x, y)`` to ``x * y``.  Elements may be any hashable identifiers.
    """

    elements: tuple[Hashable, ...]
    leq: frozenset[tuple[Hashable, Hashable]]
    monoid: Mapping[tuple[Hashable, Hashable], Hashable]
    unit: Hashable
    _idx: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "leq", frozenset(self.leq))
        if not elements:
            raise TableFormatError("table has no elements")
        if len(set(elements)) != len(elements):
            raise TableFormatError("duplicate element identifiers")
        idx = {e: i for i, e in enumerate(elements)}
        object.__setattr__(self, "_idx", idx)
        for x, y in self.leq:
            if x not in idx or y not in idx:
                raise TableFormatError(f"order pair ({x!r}, {y!r}) uses an unknown element")
        if self.unit not in idx:
            raise TableFormatError(f"unit {self.unit!r} is not an element")
        for x, y in product(elements, repeat=2):
            if (x, y) not in self.monoid:
                raise TableFormatError(f"monoid table misses ({x!r}, {y!r})")
            if self.monoid[x, y] not in idx:
                raise TableFormatError(f"monoid value for ({x!r}, {y!r}) is not an element")

    def le(self, x, y) -> bool:
        return (x, y) in self.leq

    def mul(self, x, y):
        return self.monoid[x, y]

    def _down_up(self) -> tuple[list[int], list[int]]:
        # bit i of down[k] set iff elements[i] <= elements[k]
        n = len(self.elements)
        down = [0] * n
        up = [0] * n
        for x, y in self.leq:
            i, k = self._idx[x], self._idx[y]
            down[k] |= 1 << i
            up[i] |= 1 << k
        return down, up

    def greatest(self, candidates: Iterable):
        """Greatest element of ``candidates`` under ``leq``, or ``None``."""
        down, _ = self._down_up_cached()
        c = self._mask_of(candidates)
        for k in _bits(c):
            if c & ~down[k] == 0:
                return self.elements[k]
        return None

    def least(self, candidates: Iterable):
        _, up = self._down_up_cached()
        c = self._mask_of(candidates)
        for k in _bits(c):
            if c & ~up[k] == 0:
                return self.elements[k]
        return None

    def _mask_of(self, candidates: Iterable) -> int:
        m = 0
        for e in candidates:
            m |= 1 << self._idx[e]
        return m

    def _down_up_cached(self) -> tuple[list[int], list[int]]:
        cached = self.__dict__.get("_du")
        if cached is None:
            cached = self._down_up()
            object.__setattr__(self, "_du", cached)
        return cached

    def join(self, x, y):
        """Least upper bound, or ``None`` if it does not exist."""
        _, up = self._down_up_cached()
        return self._least_of(up[self._idx[x]] & up[self._idx[y]])

    def meet(self, x, y):
        down, _ = self._down_up_cached()
        return self._greatest_of(down[self._idx[x]] & down[self._idx[y]])

    def _least_of(self, c: int):
        _, up = self._down_up_cached()
        for k in _bits(c):
            if c & ~up[k] == 0:
                return self.elements[k]
        return None

    def _greatest_of(self, c: int):
        down, _ = self._down_up_cached()
        for k in _bits(c):
            if c & ~down[k] == 0:
                return self.elements[k]
        return None


def _bits(m: int) -> Iterator[int]:
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


@dataclass
class ValidityReport:
    is_lattice: bool = True
    is_distributive: bool = True
    is_atomic: bool = True
    is_residuated: bool = True
    is_integrally_closed: bool = True
    is_integral: bool = True
    counterexamples: list[tuple[str, tuple]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(
            (
                self.is_lattice,
                self.is_distributive,
                self.is_atomic,
                self.is_residuated,
                self.is_integrally_closed,
                self.is_integral,
            )
        )

    def flags(self) -> dict[str, bool]:
        return {
            "lattice": self.is_lattice,
            "distributive": self.is_distributive,
            "atomic": self.is_atomic,
            "residuated": self.is_residuated,
            "integrally_closed": self.is_integrally_closed,
            "integral": self.is_integral,
        }

    def witnesses(self, law: str) -> list[tuple]:
        return [w for name, w in self.counterexamples if name == law]


# Law name -> flag it falsifies.
_LAW_FLAG = {
    "reflexive": "is_lattice",
    "antisymmetric": "is_lattice",
    "transitive": "is_lattice",
    "join_exists": "is_lattice",
    "meet_exists": "is_lattice",
    "distributive": "is_distributive",
    "atomic": "is_atomic",
    "unit": "is_residuated",
    "associative": "is_residuated",
    "right_residual_exists": "is_residuated",
    "left_residual_exists": "is_residuated",
    "adjunction": "is_residuated",
    "integrally_closed": "is_integrally_closed",
    "integral": "is_integral",
}


class _Collector:
    def __init__(self, report: ValidityReport, cap: int):
        self.report = report
        self.cap = cap
        self.counts: dict[str, int] = {}

    def fail(self, law: str, *witness) -> None:
        setattr(self.report, _LAW_FLAG[law], False)
        n = self.counts.get(law, 0)
        if n < self.cap:
            self.report.counterexamples.append((law, witness))
        self.counts[law] = n + 1


def validate(table: FiniteLatticeTable, max_witnesses: int = 10) -> ValidityReport:
    """Check the lattice and residuation axioms of ``table`` exhaustively.

    Collects up to ``max_witnesses`` counterexamples per law.  Checks that
    depend on a lattice structure (distributivity, atomicity) are marked
    failed with a ``("not a lattice",)`` witness when the order is not one.
    """
    report = ValidityReport()
    col = _Collector(report, max_witnesses)
    els = table.elements
    le = table.le

    for x in els:
        if not le(x, x):
            col.fail("reflexive", x)
    for x, y in product(els, repeat=2):
        if x != y and le(x, y) and le(y, x):
            col.fail("antisymmetric", x, y)
    for x, y, z in product(els, repeat=3):
        if le(x, y) and le(y, z) and not le(x, z):
            col.fail("transitive", x, y, z)

    jn: dict = {}
    mt: dict = {}
    if report.is_lattice:
        for x, y in product(els, repeat=2):
            j = table.join(x, y)
            m = table.meet(x, y)
            if j is None:
                col.fail("join_exists", x, y)
            if m is None:
                col.fail("meet_exists", x, y)
            jn[x, y] = j
            mt[x, y] = m

    if report.is_lattice:
        for x, y, z in product(els, repeat=3):
            if mt[x, jn[y, z]] != jn[mt[x, y], mt[x, z]]:
                col.fail("distributive", x, y, z)
        bottom = table.least(list(els))
        gens = _join_irreducibles(table, jn, bottom)
        for g, h in product(gens, repeat=2):
            if g != h and mt[g, h] != bottom:
                col.fail("atomic", g, h)
    else:
        report.is_distributive = False
        report.is_atomic = False
        report.counterexamples.append(("distributive", ("not a lattice",)))
        report.counterexamples.append(("atomic", ("not a lattice",)))

    mul = table.mul
    u = table.unit
    for x in els:
        if mul(u, x) != x or mul(x, u) != x:
            col.fail("unit", x)
    for x, y, z in product(els, repeat=3):
        if mul(mul(x, y), z) != mul(x, mul(y, z)):
            col.fail("associative", x, y, z)

    right: dict = {}
    left: dict = {}
    for a, b in product(els, repeat=2):
        r = table.greatest([y for y in els if le(mul(a, y), b)])
        l = table.greatest([x for x in els if le(mul(x, a), b)])
        if r is None:
            col.fail("right_residual_exists", a, b)
        if l is None:
            col.fail("left_residual_exists", a, b)
        right[a, b] = r
        left[b, a] = l
    if report.is_residuated:
        # x*y <= z  <=>  y <= x->z  <=>  x <= z<-y
        for x, y, z in product(els, repeat=3):
            lhs = le(mul(x, y), z)
            if lhs != le(y, right[x, z]) or lhs != le(x, left[z, y]):
                col.fail("adjunction", x, y, z)
        for x in els:
            if right[x, x] != u or left[x, x] != u:
                col.fail("integrally_closed", x)
    else:
        report.is_integrally_closed = False
        report.counterexamples.append(("integrally_closed", ("residuals undefined",)))

    for x in els:
        if not le(x, u):
            col.fail("integral", x)
    return report


def _join_irreducibles(table: FiniteLatticeTable, jn: dict, bottom) -> list:
    """Non-bottom elements that are not the join of two strictly smaller ones."""
    out = []
    for x in table.elements:
        if x == bottom:
            continue
        below = [y for y in table.elements if y != x and table.le(y, x)]
        if not any(jn[y, z] == x for y in below for z in below):
            out.append(x)
    return out


def brute_force_residual(table: FiniteLatticeTable, a, b, side: str = "right"):
    """Greatest ``y`` with ``a * y <= b`` (``side="right"``) or ``y * a <= b``.

    Plain exhaustive scan; deliberately independent of :func:`implies`.
    """
    if side == "right":
        cands = [y for y in table.elements if table.le(table.mul(a, y), b)]
    elif side == "left":
        cands = [y for y in table.elements if table.le(table.mul(y, a), b)]
    else:
        raise ValueError(f"side must be 'right' or 'left', got {side!r}")
    best = table.greatest(cands)
    if best is None:
        raise ResiduationError(f"no greatest residual for ({a!r}, {b!r})")
    return best


def table_from_lattice(lattice: AtomLattice) -> FiniteLatticeTable:
    """Meet-monoid table of ``lattice`` with bit masks as element identifiers.

    The order is rebuilt from subset tests on ``frozenset`` members, so the
    oracle never touches the bit-level operations it is meant to check.
    """
    masks = list(range(lattice.full_mask + 1))
    sets = {m: lattice.from_mask(m).members for m in masks}
    order = {(x, y) for x in masks for y in masks if sets[x] <= sets[y]}
    by_set = {s: m for m, s in sets.items()}
    monoid = {(x, y): by_set[sets[x] & sets[y]] for x in masks for y in masks}
    return FiniteLatticeTable(tuple(masks), frozenset(order), monoid, lattice.full_mask)


def chain_table(n: int = 2) -> FiniteLatticeTable:
    """The ``n``-element chain ``0 < 1 < ... < n-1`` with min as monoid."""
    els = tuple(range(n))
    order = {(x, y) for x in els for y in els if x <= y}
    monoid = {(x, y): min(x, y) for x in els for y in els}
    return FiniteLatticeTable(els, frozenset(order), monoid, n - 1)


def diamond_m3() -> FiniteLatticeTable:
    """The non-distributive diamond ``M3`` with its meet as monoid."""
    els = ("0", "a", "b", "c", "1")
    order = {(x, x) for x in els}
    order |= {("0", x) for x in els} | {(x, "1") for x in els}
    rank = {"0": 0, "a": 1, "b": 1, "c": 1, "1": 2}

    def m(x, y):
        if x == y:
            return x
        if rank[x] == 2:
            return y
        if rank[y] == 2:
            return x
        return "0"

    monoid = {(x, y): m(x, y) for x in els for y in els}
    return FiniteLatticeTable(els, frozenset(order), monoid, "1")
