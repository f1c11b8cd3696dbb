"""Acceptance criteria, one reported line each.

Run ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``
to see the PASS/FAIL summary.
"""

import time
from itertools import product

from mvcm.engine import EngineConfig, run, trace_violations
from mvcm.lattice import brute_force_residual, diamond_m3, implies, leq, meet, table_from_lattice, validate
from mvcm.learning import LearnConfig, learn_cases, weight_diff
from mvcm.modelfile import load_bundled, serialize_trace
from mvcm.scale import build_paper_lattice

PLAIN = ("case1", "case2", "case3")
SCENARIO = ("case3c", "case3d")
MODELS = ("hybrid_energy.mvcm", "hybrid_energy_neg.mvcm")


def report(name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    return ok


def _models():
    return {name: load_bundled(name) for name in MODELS}


def check_oracle_equivalence():
    lat = build_paper_lattice().lattice
    t0 = time.perf_counter()
    table = table_from_lattice(lat)
    els = list(lat.elements())
    bad = sum(implies(a, b).mask != brute_force_residual(table, a.mask, b.mask) for a, b in product(els, els))
    bad += sum(leq(meet(x, y), z) != leq(y, implies(x, z)) for x, y, z in product(els, repeat=3))
    dt = time.perf_counter() - t0
    return bad == 0 and dt < 1, f"{bad} mismatches over 1024 pairs and 32768 triples, {dt:.3f} s"


def check_axiom_validation():
    t0 = time.perf_counter()
    scale = validate(table_from_lattice(build_paper_lattice().lattice))
    m3 = validate(diamond_m3())
    dt = time.perf_counter() - t0
    ok = scale.ok and not m3.is_distributive and bool(m3.witnesses("distributive")) and dt < 1
    return ok, f"scale flags all true={scale.ok}, M3 witness {m3.witnesses('distributive')[:1]}, {dt:.3f} s"


def check_decomposition_consistency():
    model = load_bundled(MODELS[0])
    base = dict(zip(model.concepts, model.initial("case3")))
    got = []
    for start in ("c", "d"):
        m = model.with_case("probe", {**base, "C5": start})
        got.append(m.lattice.format(run(m, None, "probe").value(1, "C5")))
    return got == ["d", "d"], f"C5^1 = {got[0]} (from c), {got[1]} (from d)"


def check_convergence():
    models = _models()
    t0 = time.perf_counter()
    steps = {}
    for name, model in models.items():
        for case in PLAIN:
            trace = run(model, EngineConfig(max_iters=100), case)
            steps[name, case] = trace.steps if trace.converged else None
    dt = time.perf_counter() - t0
    ok = all(s is not None for s in steps.values()) and dt < 1
    return ok, f"rows per run {sorted(set(steps.values()))}, {dt:.3f} s total"


def check_fixed_point_stability():
    failures = []
    total = 0
    for name, model in _models().items():
        for case in PLAIN + SCENARIO:
            final = run(model, None, case).final
            again = run(model, None, list(final), edits={})
            total += 1
            changes = sum(s != final for s in again.states)
            if changes:
                moved = [
                    f"{c} {model.lattice.format(a)}->{model.lattice.format(b)}"
                    for c, a, b in zip(model.concepts, final, again.final)
                    if a != b
                ]
                failures.append(f"{name}:{case} ({', '.join(moved)})")
    return not failures, f"{total - len(failures)}/{total} stable; unstable: {'; '.join(failures)}"


def check_containment():
    bad = []
    for name, model in _models().items():
        for mode in ("symmetric", "strict"):
            for case in PLAIN + SCENARIO:
                trace = run(model, EngineConfig(neg_mode=mode, record_r=True), case)
                bad += [f"{name}:{mode}:{case}: {v}" for v in trace_violations(model, trace)]
    return not bad, "; ".join(bad) or "all steps of 20 traces satisfy the invariants"


def check_clamping():
    bad = []
    for name, model in _models().items():
        for case in PLAIN + SCENARIO:
            trace = run(model, None, case)
            last_edit = max(trace.edits, default=0)
            for c in sorted(model.clamped):
                col = trace.column(c)[last_edit:]
                if any(v != col[0] for v in col):
                    bad.append(f"{name}:{case}:{c}")
    detail = "C1, C3 constant in every row (scenario runs: every row from the outward edit on)"
    return not bad, "; ".join(bad) or detail


def check_learning_goal():
    model = load_bundled(MODELS[1])
    t0 = time.perf_counter()
    results = learn_cases(model, None, LearnConfig(mode="end_of_run"), SCENARIO)
    learned = model.with_weights(results[SCENARIO[-1]].weights)
    finals = {case: run(learned, None, case).final for case in SCENARIO}
    dt = time.perf_counter() - t0
    idx = {c: n for n, c in enumerate(model.concepts)}
    in_doc = all(f[idx[t]] in model.docs[t] for f in finals.values() for t in ("C4", "C5"))
    same = finals["case3c"] == finals["case3d"]
    fmt = model.lattice.format
    shown = " ".join(fmt(v) for v in finals["case3c"])
    return in_doc and same and dt < 1, f"final {shown} for both starts, in-doc={in_doc}, {dt:.3f} s"


def check_learning_locality():
    model = load_bundled(MODELS[1])
    before = {case: run(model, None, case).final for case in SCENARIO}
    idx = {c: n for n, c in enumerate(model.concepts)}
    out_of_doc = {t for f in before.values() for t in model.docs if f[idx[t]] not in model.docs[t]}
    results = learn_cases(model, None, LearnConfig(mode="end_of_run"), SCENARIO)
    diff = weight_diff(model.weights, results[SCENARIO[-1]].weights)
    cols = {dst for _, dst in diff}
    return cols <= out_of_doc and cols == {"C5"}, f"changed {sorted(diff)}; out-of-doc targets {sorted(out_of_doc)}"


def check_sensitivity():
    model = load_bundled(MODELS[1])
    fmt = model.lattice.format
    c5 = {case: run(model, None, case).value(-1, "C5") for case in SCENARIO}
    return c5["case3c"] != c5["case3d"], f"final C5 {fmt(c5['case3c'])} (from c) vs {fmt(c5['case3d'])} (from d)"


def check_determinism():
    model = load_bundled(MODELS[0])
    texts = {serialize_trace(run(model, None, "case3"), "lines") for _ in range(10)}
    return len(texts) == 1, f"{len(texts)} distinct outputs over 10 runs"


CRITERIA = [
    ("algebra oracle equivalence", check_oracle_equivalence),
    ("axiom validation", check_axiom_validation),
    ("decomposition consistency", check_decomposition_consistency),
    ("convergence", check_convergence),
    ("fixed-point stability", check_fixed_point_stability),
    ("containment invariants", check_containment),
    ("clamping", check_clamping),
    ("learning goal", check_learning_goal),
    ("learning locality", check_learning_locality),
    ("initial-value sensitivity", check_sensitivity),
    ("determinism golden", check_determinism),
]


def _check(name, fn):
    ok, detail = fn()
    assert report(name, ok, detail), detail


def test_algebra_oracle_equivalence():
    _check(*CRITERIA[0])


def test_axiom_validation():
    _check(*CRITERIA[1])


def test_decomposition_consistency():
    _check(*CRITERIA[2])


def test_convergence():
    _check(*CRITERIA[3])


def test_fixed_point_stability():
    _check(*CRITERIA[4])


def test_containment_invariants():
    _check(*CRITERIA[5])


def test_clamping():
    _check(*CRITERIA[6])


def test_learning_goal():
    _check(*CRITERIA[7])


def test_learning_locality():
    _check(*CRITERIA[8])


def test_initial_value_sensitivity():
    _check(*CRITERIA[9])


def test_determinism_golden():
    _check(*CRITERIA[10])


if __name__ == "__main__":
    results = [report(name, *fn()) for name, fn in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
