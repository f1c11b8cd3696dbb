"""Plain-text model files and trace rendering.

One directive per line, ``#`` starts a comment::

    lattice atoms <id> <id> ...          # optional; default: the five-atom scale
    element <name> = <atom> <atom> ...   # optional named elements
    concept <id> [clamped]
    weight <src> -> <dst> : [-]<label>
    init <case>: <id>=<label> <id>=<label> ...
    doc <id> : <label> <label> ...
    edit <case> <k>: <id>=<label> ...    # outward change of clamped concepts

Labels are dictionary names or explicit atom sets such as ``{ba0, 0c}``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .engine import IterationTrace, MapModel, ModelError, SignedWeight
from .lattice import AtomLattice, AtomSet, LatticeError
from .scale import ATOMS, DECOMPOSITION, NamedScale, build_paper_lattice

BUNDLED = ("hybrid_energy.mvcm", "hybrid_energy_neg.mvcm")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        where = f"line {self.line}" if self.line else "file"
        return f"{where}: {self.severity}: {self.message}"


@dataclass
class ModelDocument:
    lines: list[str]
    model: MapModel | None = None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    @property
    def ok(self) -> bool:
        return self.model is not None and not self.errors


class _Bad(Exception):
    pass


_TOKEN = re.compile(r"[^\s{]*\{[^}]*\}?|\S+")


def _tokens(text: str) -> list[str]:
    """Whitespace split that keeps brace groups (``{a, b}``) together."""
    return [t.strip() for t in _TOKEN.findall(text)]


def _assignments(text: str, lat: AtomLattice) -> list[tuple[str, AtomSet]]:
    out = []
    for tok in _tokens(text):
        if "=" not in tok:
            raise _Bad(f"expected <concept>=<label>, got {tok!r}")
        name, label = tok.split("=", 1)
        out.append((name.strip(), _label(lat, label)))
    return out


def _label(lat: AtomLattice, text: str) -> AtomSet:
    try:
        return lat.parse(text)
    except LatticeError as exc:
        raise _Bad(str(exc)) from None


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_model_file(text: str) -> ModelDocument:
    """Parse model text, collecting line-numbered diagnostics.

    Lattice directives are read first, so directive order is free.  Any
    error-level diagnostic leaves ``model`` as ``None``.
    """
    lines = text.splitlines()
    doc = ModelDocument(lines)
    diag = doc.diagnostics

    def err(n: int, msg: str) -> None:
        diag.append(Diagnostic(n, msg))

    atoms: list[str] | None = None
    elements: dict[str, list[str]] = {}
    body: list[tuple[int, str, str]] = []
    for n, raw in enumerate(lines, 1):
        line = _strip(raw)
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "lattice":
            parts = rest.split()
            if not parts or parts[0] != "atoms" or len(parts) < 2:
                err(n, "expected 'lattice atoms <id> ...'")
            elif atoms is not None:
                err(n, "lattice atoms declared twice")
            else:
                atoms = parts[1:]
        elif head == "element":
            name, eq, members = rest.partition("=")
            name = name.strip()
            if not eq or not name or " " in name:
                err(n, "expected 'element <name> = <atom> ...'")
            elif name in elements:
                err(n, f"element {name!r} defined twice")
            else:
                elements[name] = members.split()
        elif head in ("concept", "weight", "init", "doc", "edit"):
            body.append((n, head, rest))
        else:
            err(n, f"unknown directive {head!r}")

    try:
        if atoms is None:
            names = {k: list(v) for k, v in DECOMPOSITION.items()}
            names.update(elements)
            lat = AtomLattice(ATOMS, names)
        else:
            lat = AtomLattice(atoms, elements)
    except LatticeError as exc:
        err(0, f"invalid lattice: {exc}")
        return doc

    concepts: list[str] = []
    clamped: set[str] = set()
    weights: dict[tuple[str, str], SignedWeight] = {}
    cases: dict[str, dict[str, AtomSet]] = {}
    case_line: dict[str, int] = {}
    docs: dict[str, tuple[AtomSet, ...]] = {}
    edits: dict[str, dict[int, dict[str, AtomSet]]] = {}
    edit_lines: list[tuple[int, str, int, list[tuple[str, AtomSet]]]] = []

    for n, head, rest in body:
        if head == "concept":
            parts = rest.split()
            if not parts or len(parts) > 2 or (len(parts) == 2 and parts[1] != "clamped"):
                err(n, "expected 'concept <id> [clamped]'")
            elif parts[0] in concepts:
                err(n, f"concept {parts[0]!r} declared twice")
            else:
                concepts.append(parts[0])
                if len(parts) == 2:
                    clamped.add(parts[0])

    known = set(concepts)

    def check_concept(n: int, c: str) -> None:
        if c not in known:
            raise _Bad(f"unknown concept {c!r}")

    for n, head, rest in body:
        try:
            if head == "weight":
                m = re.fullmatch(r"(\S+)\s*->\s*(\S+)\s*:\s*(-?)\s*(.+)", rest)
                if not m:
                    raise _Bad("expected 'weight <src> -> <dst> : [-]<label>'")
                src, dst, minus, label = m.groups()
                check_concept(n, src)
                check_concept(n, dst)
                if (src, dst) in weights:
                    raise _Bad(f"duplicate weight {src} -> {dst}")
                value = _label(lat, label)
                if value.mask == 0:
                    diag.append(Diagnostic(n, f"zero weight {src} -> {dst} ignored", "warning"))
                    continue
                weights[src, dst] = SignedWeight(value, bool(minus))
            elif head == "init":
                name, colon, values = rest.partition(":")
                name = name.strip()
                if not colon or not name or " " in name:
                    raise _Bad("expected 'init <case>: <id>=<label> ...'")
                if name in cases:
                    raise _Bad(f"init case {name!r} defined twice")
                assigned: dict[str, AtomSet] = {}
                for c, v in _assignments(values, lat):
                    check_concept(n, c)
                    if c in assigned:
                        raise _Bad(f"concept {c!r} assigned twice in case {name!r}")
                    assigned[c] = v
                missing = [c for c in concepts if c not in assigned]
                if missing:
                    raise _Bad(f"init case {name!r} misses {', '.join(missing)}")
                cases[name] = assigned
                case_line[name] = n
            elif head == "doc":
                c, colon, values = rest.partition(":")
                c = c.strip()
                if not colon:
                    raise _Bad("expected 'doc <id> : <label> ...'")
                check_concept(n, c)
                if c in docs:
                    raise _Bad(f"doc set for {c!r} defined twice")
                items = tuple(_label(lat, t) for t in _tokens(values))
                if not items:
                    raise _Bad(f"doc set for {c!r} is empty")
                docs[c] = items
            elif head == "edit":
                spec, colon, values = rest.partition(":")
                parts = spec.split()
                if not colon or len(parts) != 2 or not parts[1].isdigit():
                    raise _Bad("expected 'edit <case> <k>: <id>=<label> ...'")
                case, k = parts[0], int(parts[1])
                if k < 1:
                    raise _Bad("edits start at iteration 1")
                pairs = _assignments(values, lat)
                for c, _ in pairs:
                    check_concept(n, c)
                    if c not in clamped:
                        raise _Bad(f"edit targets non-clamped concept {c!r}")
                edit_lines.append((n, case, k, pairs))
        except _Bad as exc:
            err(n, str(exc))

    for n, case, k, pairs in edit_lines:
        if case not in cases:
            err(n, f"edit for unknown init case {case!r}")
            continue
        slot = edits.setdefault(case, {}).setdefault(k, {})
        for c, v in pairs:
            if c in slot:
                err(n, f"concept {c!r} edited twice at iteration {k} of {case!r}")
            slot[c] = v

    if not concepts:
        err(0, "no concepts declared")
    if doc.errors:
        return doc
    try:
        doc.model = MapModel(
            scale=NamedScale(lat),
            concepts=tuple(concepts),
            weights=weights,
            clamped=frozenset(clamped),
            init_cases=cases,
            docs=docs,
            edits=edits,
        )
    except ModelError as exc:
        err(0, str(exc))
    return doc


def load_model(path: str | Path) -> ModelDocument:
    """Read a model file; bare bundled names resolve to the packaged copies."""
    return parse_model_file(read_model_text(path))


def read_model_text(path: str | Path) -> str:
    p = Path(path)
    if not p.exists() and p.name in BUNDLED and str(path) == p.name:
        return bundled_text(p.name)
    return p.read_text(encoding="utf-8")


def bundled_text(name: str) -> str:
    return resources.files("mvcm").joinpath("data", name).read_text(encoding="utf-8")


def load_bundled(name: str) -> MapModel:
    doc = parse_model_file(bundled_text(name))
    if not doc.ok:
        raise ModelError("; ".join(map(str, doc.errors)))
    return doc.model


def format_model(model: MapModel) -> str:
    """Canonical text for ``model``; parsing it gives back an equal model."""
    lat = model.lattice
    out: list[str] = []
    default = build_paper_lattice().lattice
    if lat.atoms == default.atoms and all(
        lat.names.get(k) == v for k, v in default.names.items()
    ):
        extra = {k: v for k, v in lat.names.items() if k not in default.names}
        if extra:
            for name, value in extra.items():
                out.append(f"element {name} = {' '.join(value.atoms())}")
            out.append("")
    else:
        out.append("lattice atoms " + " ".join(lat.atoms))
        for name, value in lat.names.items():
            if name == "0" or (name == "Th" and value == lat.top):
                continue
            out.append(f"element {name} = {' '.join(value.atoms())}")
        out.append("")
    for c in model.concepts:
        out.append(f"concept {c}" + (" clamped" if c in model.clamped else ""))
    if model.weights:
        out.append("")
    for src in model.concepts:
        for dst in model.concepts:
            w = model.weights.get((src, dst))
            if w is not None:
                out.append(f"weight {src} -> {dst} : {w.format()}")
    if model.init_cases:
        out.append("")
    for case, values in model.init_cases.items():
        pairs = " ".join(f"{c}={lat.format(values[c])}" for c in model.concepts)
        out.append(f"init {case}: {pairs}")
        for k in sorted(model.edits.get(case, {})):
            changes = model.edits[case][k]
            pairs = " ".join(f"{c}={lat.format(v)}" for c, v in changes.items())
            out.append(f"edit {case} {k}: {pairs}")
    if model.docs:
        out.append("")
    for c in model.concepts:
        if c in model.docs:
            out.append(f"doc {c} : " + " ".join(lat.format(v) for v in model.docs[c]))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


def summary_line(trace: IterationTrace) -> str:
    if trace.converged:
        return f"converged in {trace.steps} iterations"
    return f"not converged after {trace.steps} iterations"


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    fmt = lambda r: "  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip()
    return [fmt(header), *map(fmt, rows)]


def serialize_trace(trace: IterationTrace, format: str = "table") -> str:
    """Render a trace as an aligned table or as tab-separated records.

    ``lines`` records are ``k<TAB>concept<TAB>label<TAB>{atoms}``.
    """
    if format == "table":
        rows = [
            [str(k)] + [v.lattice.format(v) for v in state]
            for k, state in enumerate(trace.states)
        ]
        body = _table(["k", *trace.concepts], rows)
    elif format == "lines":
        body = [
            f"{k}\t{c}\t{v.lattice.format(v)}\t{{{','.join(v.atoms())}}}"
            for k, state in enumerate(trace.states)
            for c, v in zip(trace.concepts, state)
        ]
    else:
        raise ValueError(f"unknown trace format {format!r}")
    return "\n".join(body + [summary_line(trace)]) + "\n"


def serialize_coefficients(trace: IterationTrace) -> str:
    """Per-step ``f`` and, when recorded, ``r`` vectors as a table."""
    rows = []
    for k, f in enumerate(trace.coeffs):
        rows.append([str(k), "f"] + [v.lattice.format(v) for v in f])
        if trace.r_diag:
            rows.append([str(k), "r"] + [v.lattice.format(v) for v in trace.r_diag[k]])
    return "\n".join(_table(["k", "", *trace.concepts], rows)) + "\n"


_SUMMARY = re.compile(r"(converged in|not converged after) (\d+) iterations")


def read_trace_lines(text: str, lattice: AtomLattice) -> IterationTrace:
    """Inverse of ``serialize_trace(..., "lines")``.

    The atom-set column is authoritative; a label that disagrees with it is
    an error.
    """
    states: dict[int, dict[str, AtomSet]] = {}
    concepts: list[str] = []
    converged = None
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        m = _SUMMARY.fullmatch(line.strip())
        if m:
            converged = m.group(1) == "converged in"
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ValueError(f"line {n}: expected 4 tab-separated fields")
        k, c, label, atoms = int(parts[0]), parts[1], parts[2], lattice.parse(parts[3])
        if lattice.parse(label) != atoms:
            raise ValueError(f"line {n}: label {label!r} does not match {parts[3]}")
        if c not in concepts:
            concepts.append(c)
        states.setdefault(k, {})[c] = atoms
    if converged is None:
        raise ValueError("missing summary line")
    ordered = [tuple(states[k][c] for c in concepts) for k in sorted(states)]
    return IterationTrace(tuple(concepts), states=ordered, converged=converged)


def format_weights(model: MapModel, weights=None) -> str:
    """Weight matrix with sources as rows and targets as columns."""
    weights = model.weights if weights is None else weights
    rows = [
        [src] + [weights[src, dst].format() if (src, dst) in weights else "0" for dst in model.concepts]
        for src in model.concepts
    ]
    return "\n".join(_table(["", *model.concepts], rows)) + "\n"
