import pytest

from mvcm.engine import (
    EngineConfig,
    MapModel,
    ModelError,
    NonConvergenceError,
    SignedWeight,
    check_bound,
    compute_r,
    run,
    signed_join,
    step,
    trace_violations,
)
from mvcm.lattice import AtomLattice, implies, join, meet, set_minus, sym_diff
from mvcm.scale import NamedScale

SYM = EngineConfig()
STRICT = EngineConfig(neg_mode="strict")
CASES = ("case1", "case2", "case3")


def toy(weights, init, clamped=()):
    lat = AtomLattice(["p", "q"])
    scale = NamedScale(lat)
    concepts = ("X", "Y")
    ws = {k: SignedWeight(lat.element(v)) for k, v in weights.items()}
    case = {c: lat.element(init[c]) for c in concepts}
    return MapModel(scale, concepts, ws, frozenset(clamped), {"start": case})


# --- signed join ------------------------------------------------------------


def test_signed_join_symmetric_vs_strict(energy_neg, L):
    state = energy_neg.vector({"C1": "horn", "C2": "b", "C3": "h", "C4": "h", "C5": "c"})
    assert signed_join(energy_neg, SYM, "C2", state) == L.element(["b", "bn0", "0c"])
    assert signed_join(energy_neg, STRICT, "C2", state) == L.element(["b", "bn0"])


def test_signed_join_oracle(energy_neg, L):
    # frozenset arithmetic as an independent reference
    state = energy_neg.vector({"C1": "horn", "C2": "c", "C3": "d", "C4": "h", "C5": "0c"})
    pos = (L.parse("hora").members & L.parse("horn").members) | (
        L.parse("bora").members & L.parse("d").members
    )
    neg = L.parse("Tb").members & L.parse("c").members
    got = signed_join(energy_neg, SYM, "C4", state)
    assert got.members == pos ^ neg
    assert signed_join(energy_neg, STRICT, "C4", state).members == pos - neg


def test_no_incoming_gives_bottom(energy):
    state = energy.initial("case1")
    m = toy({}, {"X": ["p"], "Y": ["q"]})
    assert signed_join(m, SYM, "X", m.initial("start")).mask == 0
    assert signed_join(energy, SYM, "C1", state) == join(
        meet(energy.lattice.top, state[0]), energy.lattice.bottom
    )


# --- one step ---------------------------------------------------------------


def test_toy_first_step():
    m = toy({("X", "Y"): ["p"]}, {"X": ["p", "q"], "Y": ["q"]})
    a0 = m.initial("start")
    a1, f = step(m, SYM, a0, a0, first=True)
    assert a1[1] == m.lattice.element(["p"])
    assert f[1] == m.lattice.top


def test_step_matches_formula(energy, L):
    trace = run(energy, SYM, "case1")
    for k in range(1, len(trace.states) - 1):
        prev, curr, nxt = trace.states[k - 1], trace.states[k], trace.states[k + 1]
        for n, c in enumerate(energy.concepts):
            if c in energy.clamped:
                continue
            s = signed_join(energy, SYM, c, curr)
            f = implies(s, join(curr[n], prev[n]))
            assert nxt[n] == meet(f, s)
            assert trace.coeffs[k][n] == f


def test_first_step_uses_f0(energy, L):
    f0 = L.parse("Tb")
    trace = run(energy, EngineConfig(f0=f0), "case3")
    for n, c in enumerate(energy.concepts):
        if c not in energy.clamped:
            assert trace.coeffs[0][n] == f0
            assert trace.states[1][n] == meet(f0, signed_join(energy, SYM, c, trace.states[0]))


def test_c_coeff_caps_every_state(energy, L):
    c = L.parse("h")
    trace = run(energy, EngineConfig(c_coeff=c), "case1")
    for state in trace.states[1:]:
        for n, name in enumerate(energy.concepts):
            if name not in energy.clamped:
                assert state[n] <= c


def test_decomposition_consistency(energy, L):
    for start in ("c", "d"):
        m = energy.with_case("x", {**_named(energy, "case3"), "C5": start})
        trace = run(m, SYM, "x")
        assert L.format(trace.value(1, "C5")) == "d"


def _named(model, case):
    return dict(zip(model.concepts, model.initial(case)))


# --- convergence and invariants ------------------------------------------------


@pytest.mark.parametrize("fixture", ["energy", "energy_neg"])
@pytest.mark.parametrize("cfg", [SYM, STRICT], ids=["symmetric", "strict"])
@pytest.mark.parametrize("case", CASES + ("case3c", "case3d"))
def test_runs_converge_with_invariants(request, fixture, cfg, case):
    model = request.getfixturevalue(fixture)
    trace = run(model, EngineConfig(neg_mode=cfg.neg_mode, record_r=True), case)
    assert trace.converged
    assert trace.steps <= 101
    assert trace_violations(model, trace) == []
    last = trace.states[-3:]
    assert last[0] == last[1] == last[2]


def test_swap_map_oscillates():
    # X and Y exchange values forever: synchronous update, no fixed point
    m = toy({("X", "Y"): ["p", "q"], ("Y", "X"): ["p", "q"]}, {"X": ["p"], "Y": ["q"]})
    with pytest.raises(NonConvergenceError) as exc:
        run(m, EngineConfig(max_iters=20), "start")
    trace = exc.value.trace
    assert not trace.converged
    assert len(trace.states) == 21
    xs = trace.column("X")
    assert xs[0] != xs[1] and xs[0] == xs[2]


def test_clamped_concepts_stay_put(energy):
    for case in CASES:
        trace = run(energy, SYM, case)
        for c in energy.clamped:
            col = trace.column(c)
            assert all(v == col[0] for v in col)


def test_edits_apply_once_and_hold(energy_neg, L):
    trace = run(energy_neg, SYM, "case3c")
    assert trace.column("C1")[0] == L.parse("horn")
    assert all(v == L.parse("d") for v in trace.column("C1")[1:])
    assert all(v == L.parse("h") for v in trace.column("C3")[1:])
    assert trace.steps >= 4


def test_edit_validation(energy):
    with pytest.raises(ModelError, match="non-clamped"):
        run(energy, SYM, "case1", edits={1: {"C4": energy.lattice.top}})
    with pytest.raises(ModelError, match="start at iteration 1"):
        run(energy, SYM, "case1", edits={0: {"C1": energy.lattice.top}})


def test_explicit_vector_run(energy):
    a = run(energy, SYM, energy.initial("case2"))
    b = run(energy, SYM, "case2")
    assert a.states == b.states


def test_deterministic(energy_neg):
    first = run(energy_neg, SYM, "case3")
    for _ in range(5):
        assert run(energy_neg, SYM, "case3").states == first.states


# --- bound and diagnostics -------------------------------------------------------


def test_check_bound_detects_forged_state(energy, L):
    trace = run(energy, SYM, "case1")
    assert check_bound(trace)
    forged = list(trace.states[-1])
    forged[3] = L.top
    trace.states.append(tuple(forged))
    assert not check_bound(trace)
    assert check_bound(trace, concepts=["C5"])
    assert any("bound" in v for v in trace_violations(energy, trace))


def test_violation_reports_clamped_drift(energy, L):
    trace = run(energy, SYM, "case1")
    drifted = list(trace.states[-1])
    drifted[0] = L.parse("b")
    trace.states[-1] = tuple(drifted)
    assert any("C1" in v for v in trace_violations(energy, trace))


def test_r_below_f_and_equal_at_fixed_point(energy_neg):
    trace = run(energy_neg, EngineConfig(record_r=True), "case1")
    assert len(trace.r_diag) == len(trace.coeffs)
    for r, f in zip(trace.r_diag, trace.coeffs):
        assert all(a <= b for a, b in zip(r, f))
    assert trace.r_diag[-1] == trace.coeffs[-1]


def test_compute_r_formula(energy, L):
    prev = energy.initial("case1")
    curr = run(energy, SYM, "case1").states[1]
    r = compute_r(energy, SYM, prev, curr)
    n = energy.concepts.index("C4")
    s = signed_join(energy, SYM, "C4", curr)
    assert r[n] == implies(s, meet(curr[n], prev[n]))
    assert r[0] == L.top


# --- model validation -----------------------------------------------------------


def test_model_invariants(energy, L):
    scale = energy.scale
    with pytest.raises(ModelError):
        MapModel(scale, ())
    with pytest.raises(ModelError, match="duplicate"):
        MapModel(scale, ("A", "A"))
    with pytest.raises(ModelError, match="undeclared"):
        MapModel(scale, ("A",), {("A", "B"): SignedWeight(L.top)})
    with pytest.raises(ModelError, match="misses"):
        MapModel(scale, ("A", "B"), init_cases={"x": {"A": L.top}})
    with pytest.raises(ModelError, match="zero"):
        SignedWeight(L.bottom)
    other = AtomLattice(["p"])
    with pytest.raises(ModelError, match="another lattice"):
        MapModel(scale, ("A",), {("A", "A"): SignedWeight(other.top)})


def test_engine_config_checks():
    with pytest.raises(ValueError):
        EngineConfig(max_iters=2)
    with pytest.raises(ValueError):
        EngineConfig(neg_mode="lenient")


def test_signed_weight_format(L):
    assert SignedWeight(L.parse("ca0c"), True).format() == "-ca0c"
    assert SignedWeight(L.parse("Th")).format() == "Th"


def test_unknown_case(energy):
    with pytest.raises(KeyError, match="nope"):
        run(energy, SYM, "nope")


def test_operations_agree_with_sets(L):
    a, b = L.parse("horn"), L.parse("ca0c")
    assert sym_diff(a, b).members == a.members ^ b.members
    assert set_minus(a, b).members == a.members - b.members
