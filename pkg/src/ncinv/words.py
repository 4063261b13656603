"""Free-group words and Schreier generators of finite-index kernels.

A SignedWord is a tuple of (letter index, +1/-1) pairs, kept freely
reduced.  The Schreier construction here produces a deterministic free
generating set for the kernel of the homomorphism from the rank-d free
group onto a finite abelian group sending letter i to chars[i].
"""

from __future__ import annotations

from typing import Callable, Sequence

from .ncalg import RatExpr, inv
from .ncalg import mul as _expr_mul

SignedWord = tuple  # tuple[(int, int), ...]


def free_reduce(seq) -> SignedWord:
    out: list = []
    for item in seq:
        i, e = item
        if out and out[-1][0] == i and out[-1][1] == -e:
            out.pop()
        else:
            out.append((i, e))
    return tuple(out)


def invert_word(w: SignedWord) -> SignedWord:
    return tuple((i, -e) for i, e in reversed(w))


def concat(*words: SignedWord) -> SignedWord:
    joined: list = []
    for w in words:
        joined.extend(w)
    return free_reduce(joined)


def schreier_free_generators(
    chars: Sequence, *, mul: Callable, identity
) -> list[SignedWord]:
    """Free generators of the kernel of F_d -> <chars>, letter i -> chars[i].

    Uses a BFS Schreier transversal (letters taken in index order, so
    coset representatives are the BFS-first positive words); for each
    transversal word t and letter a the nontrivial elements t a rep(ta)^-1
    are returned, in transversal-then-letter order.  The count is always
    |image| (d-1) + 1 where image is the subgroup the chars generate.
    """
    d = len(chars)
    reps: dict = {identity: ()}
    order = [identity]
    queue = [identity]
    while queue:
        g = queue.pop(0)
        for i in range(d):
            h = mul(g, chars[i])
            if h not in reps:
                reps[h] = reps[g] + ((i, 1),)
                order.append(h)
                queue.append(h)
    gens: list[SignedWord] = []
    for g in order:
        t = reps[g]
        for i in range(d):
            h = mul(g, chars[i])
            w = free_reduce(t + ((i, 1),) + invert_word(reps[h]))
            if w:
                gens.append(w)
    return gens


def signed_word_to_expr(word: SignedWord, letters: Sequence[RatExpr]) -> RatExpr:
    """Interpret a signed word as a product of letter expressions and
    inverses of letter expressions."""
    return _expr_mul(*(letters[i] if e == 1 else inv(letters[i]) for i, e in word))
