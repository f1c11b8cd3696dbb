"""Synchronous iteration of a multi-valued cognitive map.

With the meet as monoid multiplication, one step reads::

    s_i      = join_j (w_ji & A_j^k)            (signed: negatives deducted)
    f_i^k    = s_i => (A_i^k | A_i^(k-1))
    A_i^k+1  = c & f_i^k & s_i

The first step has no ``A^(-1)`` and uses the configured ``f0`` instead of
the recursion.  Iteration stops once three consecutive states coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .lattice import AtomLattice, AtomSet, implies, join, leq, meet, set_minus, sym_diff
from .scale import NamedScale

Vector = tuple[AtomSet, ...]

NEG_MODES = ("symmetric", "strict")


class ModelError(ValueError):
    """Raised when a :class:`MapModel` violates its invariants."""


class NonConvergenceError(RuntimeError):
    """Raised when ``max_iters`` is exhausted without triple equality."""

    def __init__(self, message: str, trace: IterationTrace):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class SignedWeight:
    value: AtomSet
    negative: bool = False

    def __post_init__(self):
        if self.value.mask == 0:
            raise ModelError("zero weights are represented by absence")

    def format(self) -> str:
        label = self.value.lattice.format(self.value)
        return f"-{label}" if self.negative else label


@dataclass(frozen=True)
class MapModel:
    """Concepts, signed weights, initial cases and desired-output sets.

    ``weights[(j, i)]`` is the influence of concept ``j`` on concept ``i``.
    Initial cases and doc lists are keyed by concept id.
    """

    scale: NamedScale
    concepts: tuple[str, ...]
    weights: Mapping[tuple[str, str], SignedWeight] = field(default_factory=dict)
    clamped: frozenset[str] = frozenset()
    init_cases: Mapping[str, Mapping[str, AtomSet]] = field(default_factory=dict)
    docs: Mapping[str, tuple[AtomSet, ...]] = field(default_factory=dict)
    edits: Mapping[str, Mapping[int, Mapping[str, AtomSet]]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "concepts", tuple(self.concepts))
        object.__setattr__(self, "clamped", frozenset(self.clamped))
        object.__setattr__(self, "weights", dict(self.weights))
        object.__setattr__(
            self, "init_cases", {k: dict(v) for k, v in self.init_cases.items()}
        )
        object.__setattr__(self, "docs", {k: tuple(v) for k, v in self.docs.items()})
        object.__setattr__(
            self,
            "edits",
            {case: {k: dict(v) for k, v in sched.items()} for case, sched in self.edits.items()},
        )

        if not self.concepts:
            raise ModelError("no concepts declared")
        if len(set(self.concepts)) != len(self.concepts):
            raise ModelError("duplicate concept identifiers")
        known = set(self.concepts)
        lat = self.lattice
        for c in self.clamped:
            if c not in known:
                raise ModelError(f"clamped concept {c!r} is not declared")
        for (src, dst), w in self.weights.items():
            if src not in known or dst not in known:
                raise ModelError(f"weight {src}->{dst} uses an undeclared concept")
            if w.value.lattice.atoms != lat.atoms:
                raise ModelError(f"weight {src}->{dst} belongs to another lattice")
        for case, values in self.init_cases.items():
            missing = [c for c in self.concepts if c not in values]
            extra = [c for c in values if c not in known]
            if missing:
                raise ModelError(f"init case {case!r} misses {', '.join(missing)}")
            if extra:
                raise ModelError(f"init case {case!r} assigns undeclared {', '.join(extra)}")
        for c, docs in self.docs.items():
            if c not in known:
                raise ModelError(f"doc set for undeclared concept {c!r}")
            if not docs:
                raise ModelError(f"doc set for {c!r} is empty")
        for case, sched in self.edits.items():
            if case not in self.init_cases:
                raise ModelError(f"edits for unknown init case {case!r}")
            _check_edits(sched, self.clamped)

    @property
    def lattice(self) -> AtomLattice:
        return self.scale.lattice

    def incoming(self, target: str) -> list[tuple[str, SignedWeight]]:
        return [(j, self.weights[j, target]) for j in self.concepts if (j, target) in self.weights]

    def initial(self, case: str) -> Vector:
        try:
            values = self.init_cases[case]
        except KeyError:
            raise KeyError(f"unknown init case {case!r}") from None
        return tuple(values[c] for c in self.concepts)

    def vector(self, values: Mapping[str, AtomSet | str]) -> Vector:
        """Concept vector from a mapping of concept id to element or label."""
        out = []
        for c in self.concepts:
            v = values[c]
            out.append(self.lattice.parse(v) if isinstance(v, str) else v)
        return tuple(out)

    def with_weights(self, weights: Mapping[tuple[str, str], SignedWeight]) -> MapModel:
        return replace(self, weights=dict(weights))

    def with_case(self, name: str, values: Mapping[str, AtomSet | str]) -> MapModel:
        cases = dict(self.init_cases)
        cases[name] = dict(zip(self.concepts, self.vector(values)))
        return replace(self, init_cases=cases)


def _check_edits(sched: Mapping[int, Mapping[str, AtomSet]], clamped: frozenset[str]) -> None:
    for k, values in sched.items():
        if k < 1:
            raise ModelError(f"edit at iteration {k}: edits start at iteration 1")
        for c in values:
            if c not in clamped:
                raise ModelError(f"edit at iteration {k} targets non-clamped concept {c!r}")


@dataclass(frozen=True)
class EngineConfig:
    """Iteration settings.  ``None`` for ``f0``/``c_coeff`` means the top."""

    f0: AtomSet | None = None
    c_coeff: AtomSet | None = None
    max_iters: int = 100
    neg_mode: str = "symmetric"
    record_r: bool = False

    def __post_init__(self):
        if self.max_iters < 3:
            raise ValueError("max_iters must be at least 3")
        if self.neg_mode not in NEG_MODES:
            raise ValueError(f"neg_mode must be one of {NEG_MODES}, got {self.neg_mode!r}")


@dataclass
class IterationTrace:
    """States ``A^0..A^n`` and the coefficient vectors that produced them.

    ``coeffs[k]`` is the vector ``f^k`` used to compute ``states[k + 1]``;
    ``r_diag[k]`` is the matching diagnostic when recording is enabled.
    """

    concepts: tuple[str, ...]
    states: list[Vector] = field(default_factory=list)
    coeffs: list[Vector] = field(default_factory=list)
    r_diag: list[Vector] | None = None
    converged: bool = False
    edits: Mapping[int, Mapping[str, AtomSet]] = field(default_factory=dict)

    @property
    def steps(self) -> int:
        """Number of recorded iterations, the initial state included."""
        return len(self.states)

    @property
    def final(self) -> Vector:
        return self.states[-1]

    def value(self, k: int, concept: str) -> AtomSet:
        return self.states[k][self.concepts.index(concept)]

    def column(self, concept: str) -> list[AtomSet]:
        i = self.concepts.index(concept)
        return [s[i] for s in self.states]


def _top(model: MapModel, value: AtomSet | None) -> AtomSet:
    return model.lattice.top if value is None else value


def signed_join(model: MapModel, cfg: EngineConfig, target: str, state: Sequence[AtomSet]) -> AtomSet:
    """Weighted join of the inputs of ``target`` with negatives deducted."""
    lat = model.lattice
    idx = {c: n for n, c in enumerate(model.concepts)}
    pos = neg = lat.bottom
    for j, w in model.incoming(target):
        term = meet(w.value, state[idx[j]])
        if w.negative:
            neg = join(neg, term)
        else:
            pos = join(pos, term)
    if cfg.neg_mode == "strict":
        return set_minus(pos, neg)
    return sym_diff(pos, neg)


def step(
    model: MapModel,
    cfg: EngineConfig,
    prev: Sequence[AtomSet],
    curr: Sequence[AtomSet],
    first: bool = False,
) -> tuple[Vector, Vector]:
    """Advance one synchronous step; returns ``(A^(k+1), f^k)``.

    With ``first=True`` the coefficient is ``cfg.f0`` rather than the
    recursion (there is no state before ``A^0``).  Clamped concepts copy
    their current value and report the top as coefficient.
    """
    top = model.lattice.top
    c = _top(model, cfg.c_coeff)
    f0 = _top(model, cfg.f0)
    nxt: list[AtomSet] = []
    fs: list[AtomSet] = []
    for n, concept in enumerate(model.concepts):
        if concept in model.clamped:
            nxt.append(curr[n])
            fs.append(top)
            continue
        s = signed_join(model, cfg, concept, curr)
        f = f0 if first else implies(s, join(curr[n], prev[n]))
        nxt.append(meet(c, meet(f, s)))
        fs.append(f)
    return tuple(nxt), tuple(fs)


def compute_r(
    model: MapModel, cfg: EngineConfig, prev: Sequence[AtomSet], curr: Sequence[AtomSet]
) -> Vector:
    """Lower residual bound ``r_i = s_i => (A_i^k & A_i^(k-1))``."""
    top = model.lattice.top
    out = []
    for n, concept in enumerate(model.concepts):
        if concept in model.clamped:
            out.append(top)
            continue
        s = signed_join(model, cfg, concept, curr)
        out.append(implies(s, meet(curr[n], prev[n])))
    return tuple(out)


def run(
    model: MapModel,
    cfg: EngineConfig | None = None,
    case: str | Sequence[AtomSet] = "",
    edits: Mapping[int, Mapping[str, AtomSet]] | None = None,
) -> IterationTrace:
    """Iterate from an init case (name or explicit vector) to a fixed point.

    ``edits`` maps an iteration ``k >= 1`` to outward changes of clamped
    concepts, applied to ``A^k`` before it is used; a named case picks up the
    model's schedule by default.  Convergence is only declared on three equal
    states that all follow the last edit.

    Raises :class:`NonConvergenceError`, carrying the partial trace, when
    ``cfg.max_iters`` steps pass without three equal consecutive states.
    """
    cfg = cfg or EngineConfig()
    if isinstance(case, str):
        init = model.initial(case)
        if edits is None:
            edits = model.edits.get(case, {})
    else:
        init = tuple(case)
    edits = edits or {}
    _check_edits(edits, model.clamped)
    if len(init) != len(model.concepts):
        raise ModelError("initial vector does not cover every concept")
    idx = {c: n for n, c in enumerate(model.concepts)}
    last_edit = max(edits, default=0)
    trace = IterationTrace(
        model.concepts, states=[init], r_diag=[] if cfg.record_r else None, edits=edits
    )
    prev = curr = init
    for k in range(cfg.max_iters):
        if k in edits:
            changed = list(curr)
            for c, v in edits[k].items():
                changed[idx[c]] = v
            curr = tuple(changed)
            trace.states[k] = curr
        nxt, f = step(model, cfg, prev, curr, first=(k == 0))
        if trace.r_diag is not None:
            trace.r_diag.append(compute_r(model, cfg, prev, curr))
        trace.coeffs.append(f)
        trace.states.append(nxt)
        if k >= 1 and k - 1 >= last_edit and nxt == curr == prev:
            trace.converged = True
            return trace
        prev, curr = curr, nxt
    raise NonConvergenceError(f"no fixed point after {cfg.max_iters} iterations", trace)


def check_bound(
    trace: IterationTrace,
    init: Sequence[AtomSet] | None = None,
    concepts: Iterable[str] | None = None,
) -> bool:
    """True iff every state stays below ``A^0 | A^1`` concept-wise.

    ``concepts`` restricts the check, e.g. to the non-clamped concepts of a
    run with outward edits.
    """
    if len(trace.states) < 2:
        return True
    a0 = tuple(init) if init is not None else trace.states[0]
    a1 = trace.states[1]
    which = range(len(a0)) if concepts is None else [trace.concepts.index(c) for c in concepts]
    bound = {n: join(a0[n], a1[n]) for n in which}
    return all(leq(state[n], b) for state in trace.states for n, b in bound.items())


def clamped_schedule(model: MapModel, trace: IterationTrace, concept: str) -> list[AtomSet]:
    """Expected per-iteration values of a clamped concept under the edits."""
    n = model.concepts.index(concept)
    value = trace.states[0][n]
    out = []
    for k in range(len(trace.states)):
        value = trace.edits.get(k, {}).get(concept, value)
        out.append(value)
    return out


def trace_violations(model: MapModel, trace: IterationTrace) -> list[str]:
    """Check the containment invariants of a converged-run trace.

    Returns human-readable descriptions of every violated property: step
    containment, the ``A^0 | A^1`` bound and shrinking differences for free
    concepts, ``r <= f`` (with equality on the last step) and clamped
    concepts following their value and edit schedule.  The shrinking check
    is skipped for a step that reads an edited state.
    """
    out: list[str] = []
    states = trace.states
    concepts = model.concepts
    free = [(n, c) for n, c in enumerate(concepts) if c not in model.clamped]
    fmt = model.lattice.format
    for k in range(1, len(states) - 1):
        for n, c in free:
            a_next, a_k, a_prev = states[k + 1][n], states[k][n], states[k - 1][n]
            if not leq(a_next, join(a_k, a_prev)):
                out.append(f"step containment fails for {c} at k={k + 1}: {fmt(a_next)}")
            # an outward edit at k changes the inputs, so differences may grow there
            if k not in trace.edits and not leq(sym_diff(a_next, a_k), sym_diff(a_k, a_prev)):
                out.append(f"difference grows for {c} at k={k + 1}")
    if not check_bound(trace, concepts=[c for _, c in free]):
        out.append("a state leaves the A^0 | A^1 bound")
    for c in model.clamped:
        n = concepts.index(c)
        if [s[n] for s in states] != clamped_schedule(model, trace, c):
            out.append(f"clamped concept {c} departs from its schedule")
    if trace.r_diag:
        for k, (r, f) in enumerate(zip(trace.r_diag, trace.coeffs)):
            for n, c in enumerate(concepts):
                if not leq(r[n], f[n]):
                    out.append(f"r exceeds f for {c} at k={k}")
        if trace.converged and trace.r_diag[-1] != trace.coeffs[-1]:
            out.append("r differs from f at the fixed point")
    return out
