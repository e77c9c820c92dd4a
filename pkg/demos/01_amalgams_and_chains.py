# %% [markdown]
# # Amalgams and majority chains
#
# Six atomic conditions glued together with tau* = x. The amalgam only keeps
# valuations where the majority of the first triple is at most the majority
# of the second, so sigma_maj of the two triples forms a strictly increasing
# chain of length two in the algebra.

# %%
from histforcing import Var, amalgamate, atomic, build_maj_chain, longest_chain
from histforcing.algebra import full_algebra_depth

q = amalgamate(0, Var(0), (), [(atomic(i, 6), (i,)) for i in range(6)])
print(q)
print("rows kept:", len(q.table), "of", 2 ** len(q.u))

# %%
chain = build_maj_chain(q)
for inst in chain:
    print(inst)
length, witness = longest_chain(q.table, chain)
print("longest strict chain:", length)

# %% [markdown]
# The history table records where each generator came from: the official
# part (zeta* = 0) gets the token t + 1, every other part its own index.

# %%
print(q.h.T)

# %% [markdown]
# For comparison, the depth of the whole (finite) algebra of a small table is
# its number of rows plus one.

# %%
small = amalgamate(0, Var(0), (), [(atomic(i, 3), (i,)) for i in range(3)])
print("rows:", len(small.table), "depth:", full_algebra_depth(small.table))
assert full_algebra_depth(small.table) == len(small.table) + 1
