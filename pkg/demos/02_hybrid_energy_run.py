# Iterating the hybrid wind / photovoltaic map to its fixed point.
# C1 (insolation) and C3 (wind) are clamped inputs.

# %%
from mvcm import EngineConfig, load_bundled, run, serialize_trace, trace_violations
from mvcm.modelfile import format_weights

model = load_bundled("hybrid_energy.mvcm")
print(format_weights(model))

# %%
for case in ("case1", "case2", "case3"):
    trace = run(model, None, case)
    print(case)
    print(serialize_trace(trace))

# %%
# f is the coefficient the update used, r its lower residual bound.
trace = run(model, EngineConfig(record_r=True), "case3")
C5 = model.concepts.index("C5")
for k, (f, r) in enumerate(zip(trace.coeffs, trace.r_diag)):
    print(k, model.lattice.format(f[C5]), model.lattice.format(r[C5]))
print("violations:", trace_violations(model, trace))

# %%
# Restarting from the final state does not reproduce it: the first step
# uses the top coefficient, so C4 moves back up to the full input join.
again = run(model, None, list(trace.final), edits={})
print(serialize_trace(again))
