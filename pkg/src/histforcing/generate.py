"""Seeded generation of conditions for test corpora.

Randomness comes from splitmix64.  ``below(n)`` always consumes exactly one
draw and returns ``next() % n``.  For a spec ``(seed, t, h)`` the draws are
taken in this order:

1. ``base = below(8)``, the offset added to every index at the end;
2. for each level ``1..h``:
   a. heart size ``k = k_min + below(k_max - k_min + 1)``;
   b. ``tau* = pool[below(len(pool))]`` over the pool terms that fit the child;
   c. ``n*`` draws ``below(len(remaining))`` picking the v positions one at a time;
   d. ``zeta* = below(t)``.

Level ``l`` copies the level ``l-1`` template ``t`` times: the first ``k``
indices are shared as the heart, and block ``xi`` is the template's block
shifted by ``xi * (block span + gap)``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import And, Const, Not, Or, Var
from .errors import InvalidInput
from .poset import Condition, amalgamate, atomic, relabel

__all__ = ["SplitMix64", "GeneratorSpec", "TERM_POOLS", "generate", "corpus_specs", "corpus_file_name"]

MASK64 = (1 << 64) - 1

TERM_POOLS = {
    "mixed": (Const(1), Var(0), And(Var(0), Var(1)), Or(Var(0), Not(Var(1))), Not(Var(0))),
    "const1": (Const(1),),
    "var0": (Var(0),),
    "and": (And(Var(0), Var(1)),),
    "nonconstant": (Var(0), And(Var(0), Var(1)), Or(Var(0), Not(Var(1))), Not(Var(0))),
}


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n <= 0:
            raise InvalidInput("below() needs a positive bound")
        return self.next() % n


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int
    width: int
    height: int
    pool: str = "mixed"
    gap: int = 1
    max_support: int = 16


def generate(spec: GeneratorSpec) -> Condition:
    t, height = spec.width, spec.height
    if t < 2:
        raise InvalidInput("width must be at least 2")
    if not 0 <= height <= 4:
        raise InvalidInput("height must lie in [0, 4]")
    if spec.gap < 0:
        raise InvalidInput("gap must be non-negative")
    try:
        pool = TERM_POOLS[spec.pool]
    except KeyError:
        raise InvalidInput(f"unknown term pool {spec.pool!r}") from None

    rng = SplitMix64(spec.seed)
    base = rng.below(8)
    template = atomic(0, t)
    for level in range(1, height + 1):
        m = len(template.u)
        rest = height - level
        feasible = [k for k in range(m)
                    if k + t * (m - k) + rest * (t - 1) <= spec.max_support]
        k_min, k_max = (feasible[0], feasible[-1]) if feasible else (m - 1, m - 1)
        k = k_min + rng.below(k_max - k_min + 1)

        fitting = [term for term in pool if term.arity <= m] or [Const(1)]
        tau = fitting[rng.below(len(fitting))]
        remaining = list(range(m))
        v_pos = []
        for _ in range(tau.arity):
            v_pos.append(remaining.pop(rng.below(len(remaining))))
        v_pos.sort()
        zeta = rng.below(t)

        u = template.u
        shift = u[-1] - u[k] + 1 + spec.gap
        parts = []
        for xi in range(t):
            mapping = {i: (i if n < k else i + xi * shift) for n, i in enumerate(u)}
            child = relabel(template, mapping)
            parts.append((child, [child.u[n] for n in v_pos]))
        template = amalgamate(zeta, tau, u[:k], parts)
    return relabel(template, {i: i + base for i in template.u})


def corpus_specs(n: int = 200, pool: str = "mixed"):
    """Specs for seeds ``0..n-1`` cycling widths 2, 3, 6 and heights 0..3."""
    return [GeneratorSpec(seed=s, width=(2, 3, 6)[s % 3], height=s % 4, pool=pool)
            for s in range(n)]


def corpus_file_name(spec: GeneratorSpec) -> str:
    return f"seed_{spec.seed:03d}_t{spec.width}_h{spec.height}.json"
