# Working with the uncertainty-degree lattice.
# Elements are sets of atoms; join is union, meet is intersection and
# implication is the largest x with a & x <= b.

# %%
from mvcm import build_paper_lattice, implies, join, meet, sym_diff, validate, table_from_lattice

scale = build_paper_lattice()
L = scale.lattice
print(L.atoms)
print(len(L), "elements")

# %%
# Labels resolve to atom sets; unnamed sets print in braces.
for label in ("b", "c", "d", "h", "horn", "caorn"):
    print(f"{label:6} {sorted(scale[label].atoms())}")

print(L.format(meet(scale["c"], scale["d"])))    # b
print(L.format(join(scale["c"], scale["d"])))    # h
print(L.format(implies(scale["h"], scale["c"])))  # {ba0,b,bn0,0c}
print(L.format(sym_diff(scale["horn"], scale["hora"])))

# %%
# The brute-force table view checks the axioms exhaustively.
report = validate(table_from_lattice(L))
for name, flag in report.flags().items():
    print(f"{name:18} {flag}")
