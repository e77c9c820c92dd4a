# %% [markdown]
# # Two statements that fail at finite scale
#
# Both witnesses come from the shipped corpus and are confirmed by the
# plain-Python oracles, so they are not artifacts of the fast table code.
#
# 1. Fingerprints: the statement that every set of levels below the height is
#    the index fingerprint of some generator. When the heart at level 2
#    contains the official atomic, nobody has fingerprint exactly {1}.

# %%
from histforcing import fingerprint, generate
from histforcing import oracles
from histforcing.checks import check_flip_closure, check_history
from histforcing.generate import corpus_specs

p = generate(corpus_specs()[2])
print(p)
print("fingerprints seen:", sorted({tuple(sorted(fingerprint(p, j))) for j in p.u}))
print(check_history(p).counterexample)

# %% [markdown]
# 2. Flip closure with Z0 = Z1: the flip keeps f on U and zeroes everything
#    else. Zeroing the level-2 blocks can break the majority constraint inside a
#    non-official level-1 component, so the flipped valuation leaves F.

# %%
q = generate(corpus_specs()[74])
r = check_flip_closure(q, budget=float("inf"))
cex = r.counterexample
print(r.verdict, "pairs failing:", r.details["failing_pairs"])
print("f    :", cex["f"])
print("G(f) :", cex["G(f)"])
print("G(f) in F by the recursive definition:", oracles.in_table(q, cex["G(f)"]))
