# Learning weights so the outputs land in the desired sets.

# %%
from mvcm import LearnConfig, learn, learn_cases, load_bundled, run
from mvcm.learning import weight_diff
from mvcm.modelfile import format_weights

model = load_bundled("hybrid_energy_neg.mvcm")
L = model.lattice
for c, docs in model.docs.items():
    print(c, [L.format(d) for d in docs])

# %%
result = learn(model, None, LearnConfig(), "case3d")
print("rounds:", result.outer_rounds)
for (src, dst), (old, new) in weight_diff(model.weights, result.weights).items():
    print(f"{src} -> {dst}: {old.format()} => {new.format()}")

# %%
# One matrix for both starting values of C5; the outputs no longer depend on it.
for mode in ("end_of_run", "per_step"):
    weights = learn_cases(model, None, LearnConfig(mode=mode), ["case3c", "case3d"])["case3d"].weights
    learned = model.with_weights(weights)
    print(mode)
    print(format_weights(learned))
    for case in ("case3c", "case3d"):
        print(case, " ".join(L.format(v) for v in run(learned, None, case).final))
