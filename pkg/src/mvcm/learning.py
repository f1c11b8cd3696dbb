"""Weight learning toward expert-chosen desired-output (doc) sets.

For an output concept ``i`` whose value ``A_i`` misses its doc list, a doc
element is chosen and the generator difference ``gen = doc ^ A_i`` drives a
change of every incoming weight::

    dw_ji = A_j => (f_i => gen)

A positive weight is shrunk by ``dw`` (set difference) when ``A_i`` lies
strictly above the doc element and joined with ``dw`` otherwise; negative
weights do the opposite.  Incomparable values therefore grow first and
shrink once they overshoot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .engine import (
    EngineConfig,
    IterationTrace,
    MapModel,
    NonConvergenceError,
    SignedWeight,
    Vector,
    _check_edits,
    run,
    step,
)
from .lattice import AtomSet, generator_count, implies, join, set_minus, sym_diff

MODES = ("end_of_run", "per_step")
DOC_SELECT = ("first", "best")


class LearningError(RuntimeError):
    """Raised when ``max_outer`` rounds leave a target outside its docs."""

    def __init__(self, message: str, result: LearnResult):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class LearnConfig:
    mode: str = "end_of_run"
    doc_select: str = "first"
    max_outer: int = 50
    targets: tuple[str, ...] | None = None  # None: every concept with docs

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.doc_select not in DOC_SELECT:
            raise ValueError(f"doc_select must be one of {DOC_SELECT}, got {self.doc_select!r}")
        if self.max_outer < 1:
            raise ValueError("max_outer must be positive")


@dataclass(frozen=True)
class Correction:
    """One weight correction of one target, for the learning log."""

    round: int
    iteration: int | None
    target: str
    value: AtomSet
    doc: AtomSet
    direction: str  # "grow" or "shrink"
    changed: tuple[tuple[str, SignedWeight | None, SignedWeight | None], ...]


@dataclass
class LearnResult:
    weights: dict[tuple[str, str], SignedWeight]
    trace: IterationTrace
    outer_rounds: int
    achieved: dict[str, AtomSet] = field(default_factory=dict)
    log: list[Correction] = field(default_factory=list)

    @property
    def directions(self) -> list[tuple[int, str, str]]:
        return [(c.round, c.target, c.direction) for c in self.log]


def gen_diff(doc: AtomSet, a: AtomSet) -> AtomSet:
    """Generators separating ``a`` from the desired value ``doc``."""
    return sym_diff(doc, a)


def delta_w(f_i: AtomSet, gen: AtomSet, a_j: AtomSet) -> AtomSet:
    return implies(a_j, implies(f_i, gen))


def apply_weight_update(
    w: SignedWeight, dw: AtomSet, concept_above_doc: bool
) -> SignedWeight | None:
    """Grow or shrink ``w`` by ``dw``; ``None`` when the weight vanishes."""
    shrink = concept_above_doc != w.negative
    value = set_minus(w.value, dw) if shrink else join(w.value, dw)
    if value.mask == 0:
        return None
    return SignedWeight(value, w.negative)


def select_doc(docs: Sequence[AtomSet], a: AtomSet, how: str = "first") -> AtomSet:
    if how == "first":
        return docs[0]
    return min(docs, key=lambda d: generator_count(gen_diff(d, a)))


def _targets(model: MapModel, cfg: LearnConfig) -> tuple[str, ...]:
    targets = cfg.targets if cfg.targets is not None else tuple(
        c for c in model.concepts if c in model.docs
    )
    for t in targets:
        if t not in model.concepts:
            raise ValueError(f"unknown target concept {t!r}")
        if not model.docs.get(t):
            raise ValueError(f"target {t!r} has no doc set")
    return tuple(targets)


def correct(
    model: MapModel,
    weights: dict[tuple[str, str], SignedWeight],
    target: str,
    value: AtomSet,
    f_i: AtomSet,
    inputs: Sequence[AtomSet],
    doc_select: str = "first",
) -> tuple[AtomSet, str, list]:
    """Correct the incoming weights of ``target`` in place.

    ``inputs`` is the concept vector whose values play ``A_j``.  Returns the
    chosen doc element, the direction and the list of changed entries.
    """
    doc = select_doc(model.docs[target], value, doc_select)
    gen = gen_diff(doc, value)
    above = value > doc
    changed = []
    for j_pos, j in enumerate(model.concepts):
        key = (j, target)
        w = weights.get(key)
        if w is None:
            continue
        new = apply_weight_update(w, delta_w(f_i, gen, inputs[j_pos]), above)
        if new != w:
            changed.append((j, w, new))
            if new is None:
                del weights[key]
            else:
                weights[key] = new
    return doc, "shrink" if above else "grow", changed


def _achieved(model: MapModel, targets, final: Vector) -> dict[str, AtomSet]:
    idx = {c: n for n, c in enumerate(model.concepts)}
    return {t: final[idx[t]] for t in targets if final[idx[t]] in model.docs[t]}


def learn(
    model: MapModel,
    engine_cfg: EngineConfig | None,
    learn_cfg: LearnConfig,
    case: str,
) -> LearnResult:
    """Adjust weights until every target's final value lies in its doc list.

    ``end_of_run`` corrects once per converged run from the final state;
    ``per_step`` corrects after every iteration step in which a target is
    outside its docs.  Either way the map is rerun from ``case`` until the
    targets land, at most ``learn_cfg.max_outer`` times.
    """
    engine_cfg = engine_cfg or EngineConfig()
    targets = _targets(model, learn_cfg)
    weights = dict(model.weights)
    idx = {c: n for n, c in enumerate(model.concepts)}
    log: list[Correction] = []
    corrections = 0
    trace = None
    for rnd in range(learn_cfg.max_outer):
        current = model.with_weights(weights)
        if learn_cfg.mode == "end_of_run":
            trace = run(current, engine_cfg, case)
        else:
            trace = _run_per_step(current, engine_cfg, learn_cfg, case, targets, weights, log, rnd)
            current = model.with_weights(weights)
        final = trace.final
        missing = [t for t in targets if final[idx[t]] not in model.docs[t]]
        if not missing:
            return LearnResult(weights, trace, corrections, _achieved(model, targets, final), log)
        corrections += 1
        if learn_cfg.mode == "per_step":
            continue  # already corrected at every step of the run
        f_last = trace.coeffs[-1]
        for t in missing:
            doc, direction, changed = correct(
                current, weights, t, final[idx[t]], f_last[idx[t]], final, learn_cfg.doc_select
            )
            log.append(Correction(rnd, None, t, final[idx[t]], doc, direction, tuple(changed)))
    result = LearnResult(weights, trace, corrections, _achieved(model, targets, trace.final), log)
    raise LearningError(f"targets still outside their docs after {learn_cfg.max_outer} rounds", result)


def learn_cases(
    model: MapModel,
    engine_cfg: EngineConfig | None,
    learn_cfg: LearnConfig,
    cases: Sequence[str],
) -> dict[str, LearnResult]:
    """Learn one matrix serving several init cases.

    Cases are learned in turn, each starting from the weights the previous
    one produced, until a full pass needs no correction.  The returned
    results all carry the final matrix.
    """
    if not cases:
        raise ValueError("no init cases given")
    current = model
    for _ in range(learn_cfg.max_outer):
        results = {}
        for case in cases:
            results[case] = learn(current, engine_cfg, learn_cfg, case)
            current = current.with_weights(results[case].weights)
        if all(r.outer_rounds == 0 for r in results.values()):
            return results
    last = results[cases[-1]]
    raise LearningError(f"no common matrix after {learn_cfg.max_outer} passes", last)


def _run_per_step(
    model: MapModel,
    cfg: EngineConfig,
    learn_cfg: LearnConfig,
    case: str,
    targets: Sequence[str],
    weights: dict[tuple[str, str], SignedWeight],
    log: list[Correction],
    rnd: int,
) -> IterationTrace:
    # Mirrors engine.run, with a weight correction after each step.
    init = model.initial(case)
    edits = model.edits.get(case, {})
    _check_edits(edits, model.clamped)
    idx = {c: n for n, c in enumerate(model.concepts)}
    last_edit = max(edits, default=0)
    trace = IterationTrace(model.concepts, states=[init], edits=edits)
    prev = curr = init
    current = model
    for k in range(cfg.max_iters):
        if k in edits:
            changed = list(curr)
            for c, v in edits[k].items():
                changed[idx[c]] = v
            curr = tuple(changed)
            trace.states[k] = curr
        nxt, f = step(current, cfg, prev, curr, first=(k == 0))
        trace.coeffs.append(f)
        trace.states.append(nxt)
        for t in targets:
            if nxt[idx[t]] not in model.docs[t]:
                doc, direction, changed = correct(
                    current, weights, t, nxt[idx[t]], f[idx[t]], curr, learn_cfg.doc_select
                )
                log.append(Correction(rnd, k + 1, t, nxt[idx[t]], doc, direction, tuple(changed)))
                current = model.with_weights(weights)
        if k >= 1 and k - 1 >= last_edit and nxt == curr == prev:
            trace.converged = True
            return trace
        prev, curr = curr, nxt
    raise NonConvergenceError(f"no fixed point after {cfg.max_iters} iterations", trace)


def weight_diff(
    before: Mapping[tuple[str, str], SignedWeight], after: Mapping[tuple[str, str], SignedWeight]
) -> dict[tuple[str, str], tuple[SignedWeight | None, SignedWeight | None]]:
    """Entries that differ between two weight matrices."""
    keys = set(before) | set(after)
    return {k: (before.get(k), after.get(k)) for k in sorted(keys) if before.get(k) != after.get(k)}
