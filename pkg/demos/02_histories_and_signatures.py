# %% [markdown]
# # Histories, closed sets and the flip map
#
# A generated height-3 condition of width 2: we list its closed sets of
# levels, their signatures, the generators whose history stays inside each
# closed set, and run the flip-closure check on every admissible pair.

# %%
from histforcing import U_set, closed_sets, generate, upsilon
from histforcing.checks import check_flip_closure, run_suite
from histforcing.generate import GeneratorSpec
from histforcing.signatures import admissible_pairs, u_iso

p = generate(GeneratorSpec(seed=171, width=2, height=3))
print(p)
print("history (rows = levels, columns = support):")
print(p.h.T)

# %%
for Z in closed_sets(p):
    print(Z, "U =", U_set(p, Z))
    for entry in upsilon(p, Z):
        print("   ", entry)

# %% [markdown]
# Two different closed sets share a signature here, so the U-sets are order
# isomorphic and the isomorphism preserves histories level by level.

# %%
for Z0, Z1 in admissible_pairs(p):
    if Z0 != Z1:
        print(Z0, "->", Z1, u_iso(p, Z0, Z1))

report = check_flip_closure(p)
print(report.name, report.verdict, report.details)

# %%
for r in run_suite(p):
    print(f"{r.name:24s} {r.verdict:5s} {r.ms:8.1f} ms")
