# Negative weights and dependence on the initial state.

# %%
from mvcm import EngineConfig, load_bundled, run, serialize_trace, signed_join

model = load_bundled("hybrid_energy_neg.mvcm")
L = model.lattice

# %%
# A negative term is deducted from the positive join.  The symmetric rule
# also adds generators the deduction does not cover; the strict one drops them.
state = model.vector({"C1": "horn", "C2": "b", "C3": "h", "C4": "h", "C5": "c"})
for mode in ("symmetric", "strict"):
    print(mode, L.format(signed_join(model, EngineConfig(neg_mode=mode), "C2", state)))

# %%
# Insolation drops to d and wind rises to h after the first step.  The
# wind-turbine output ends differently depending on where C5 started.
for case in ("case3c", "case3d"):
    trace = run(model, None, case)
    print(case)
    print(serialize_trace(trace))
