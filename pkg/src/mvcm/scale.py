"""The uncertainty-degree lattice of the hybrid-energy example.

Five atoms: the three base assessments ``ba0`` ("b and 0"), ``b`` and ``bn0``
("neither b nor 0"), plus one generator per medium-level branch, ``0c`` and
``0d``.  Branch elements carry ``b`` so that ``c & d == b`` and
``c | d == h``; the "or" names are joins of their two parts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import AtomLattice, AtomSet

ATOMS = ("ba0", "b", "bn0", "0c", "0d")

DECOMPOSITION: dict[str, tuple[str, ...]] = {
    "0": (),
    "b": ("b",),
    "ba0": ("ba0",),
    "bn0": ("bn0",),
    "bora": ("b", "ba0"),
    "born": ("b", "bn0"),
    "Tb": ("ba0", "b", "bn0"),
    "0c": ("0c",),
    "0d": ("0d",),
    "0h": ("0c", "0d"),
    "c": ("b", "0c"),
    "d": ("b", "0d"),
    "h": ("b", "0c", "0d"),
    "ca0c": ("ba0", "0c"),
    "cn0c": ("bn0", "0c"),
    "da0d": ("ba0", "0d"),
    "dn0d": ("bn0", "0d"),
    "ha0h": ("ba0", "0c", "0d"),
    "hn0h": ("bn0", "0c", "0d"),
    # ca0c | cn0c; c | cn0c would be {b,bn0,0c}, reachable as an explicit set
    "caorn": ("ba0", "bn0", "0c"),
    "hora": ("b", "ba0", "0c", "0d"),
    "horn": ("b", "bn0", "0c", "0d"),
    "Th": ATOMS,
}


@dataclass(frozen=True)
class NamedScale:
    """An :class:`AtomLattice` together with its label table."""

    lattice: AtomLattice

    @property
    def decomposition(self) -> dict[str, AtomSet]:
        return dict(self.lattice.names)

    def __getitem__(self, label: str) -> AtomSet:
        return self.lattice.parse(label)


def build_paper_lattice() -> NamedScale:
    return NamedScale(AtomLattice(ATOMS, DECOMPOSITION))


def parse_element(scale: NamedScale | AtomLattice, text: str) -> AtomSet:
    """Resolve ``text`` to an element.

    Accepts a dictionary label (``"born"``) or an explicit brace-delimited
    atom list (``"{ba0, 0c}"``, ``"{}"``).  Raises
    :class:`~mvcm.lattice.LabelError` naming the offending label.
    """
    return _lattice(scale).parse(text)


def format_element(scale: NamedScale | AtomLattice, a: AtomSet) -> str:
    return _lattice(scale).format(a)


def _lattice(scale: NamedScale | AtomLattice) -> AtomLattice:
    return scale.lattice if isinstance(scale, NamedScale) else scale
