"""Morphisms of FI: injections [m] -> [n] stored as image tuples.

Points are 1-based.  ``pi(n)`` is the standard inclusion r -> r+1 and
``coset_injection(n, k)`` is the order-preserving injection [n] -> [n+1]
whose image misses k.  Module actions only store adjacent transpositions
and ``pi``; everything else is factored through them here.
"""

from __future__ import annotations

import re
from functools import lru_cache
from itertools import combinations, permutations
from math import comb, factorial


class InjectionError(ValueError):
    pass


class Injection:
    __slots__ = ("images", "target")

    def __init__(self, images, target: int):
        images = tuple(int(a) for a in images)
        if len(images) > target:
            raise InjectionError(f"source {len(images)} exceeds target {target}")
        if len(set(images)) != len(images):
            raise InjectionError(f"images {images} are not distinct")
        if any(a < 1 or a > target for a in images):
            raise InjectionError(f"images {images} leave [1, {target}]")
        self.images = images
        self.target = target

    @property
    def source(self) -> int:
        return len(self.images)

    def __call__(self, r: int) -> int:
        return self.images[r - 1]

    def __eq__(self, other):
        return (isinstance(other, Injection) and self.images == other.images
                and self.target == other.target)

    def __hash__(self):
        return hash((self.images, self.target))

    def __repr__(self):
        return f"Injection({format_injection(self)})"

    def is_bijection(self):
        return self.source == self.target

    def missing(self):
        seen = set(self.images)
        return [v for v in range(1, self.target + 1) if v not in seen]


def identity(n: int) -> Injection:
    return Injection(range(1, n + 1), n)


def pi(n: int) -> Injection:
    """The inclusion [n] -> [n+1], r -> r+1."""
    return Injection(range(2, n + 2), n + 1)


def coset_injection(n: int, k: int) -> Injection:
    """Order-preserving [n] -> [n+1] missing the value k (k = 1 gives ``pi(n)``)."""
    if not 1 <= k <= n + 1:
        raise InjectionError(f"k={k} outside [1, {n + 1}]")
    return Injection([r if r < k else r + 1 for r in range(1, n + 1)], n + 1)


def compose(g: Injection, f: Injection) -> Injection:
    """g o f."""
    if f.target != g.source:
        raise InjectionError(f"cannot compose {g} after {f}")
    return Injection([g.images[a - 1] for a in f.images], g.target)


def self_embed(f: Injection) -> Injection:
    return Injection((1,) + tuple(a + 1 for a in f.images), f.target + 1)


def enumerate_injections(m: int, n: int):
    if m > n or m < 0:
        return []
    return [Injection(p, n) for p in permutations(range(1, n + 1), m)]


@lru_cache(maxsize=None)
def injection_tuples(m: int, n: int):
    """All image tuples [m] -> [n] in lexicographic order (cached)."""
    if m > n or m < 0:
        return ()
    return tuple(permutations(range(1, n + 1), m))


@lru_cache(maxsize=None)
def injection_index(m: int, n: int):
    return {t: i for i, t in enumerate(injection_tuples(m, n))}


def count_injections(m: int, n: int) -> int:
    if m > n or m < 0:
        return 0
    return factorial(n) // factorial(n - m)


def rank_injection(images, n: int) -> int:
    """Position of ``images`` in the lexicographic order of injections [m] -> [n]."""
    m = len(images)
    used = []
    r = 0
    for j, a in enumerate(images):
        smaller = a - 1 - sum(1 for u in used if u < a)
        r += smaller * count_injections(m - j - 1, n - j - 1)
        used.append(a)
    return r


def increasing_injections(m: int, n: int):
    """Order-preserving injections [m] -> [n] (one per m-subset), lexicographic."""
    return tuple(combinations(range(1, n + 1), m))


def adjacent_transposition(n: int, i: int) -> Injection:
    if not 1 <= i < n:
        raise InjectionError(f"s_{i} is not in S_{n}")
    img = list(range(1, n + 1))
    img[i - 1], img[i] = img[i], img[i - 1]
    return Injection(img, n)


def adjacent_transpositions(n: int):
    return [adjacent_transposition(n, i) for i in range(1, n)]


def transposition_word(perm) -> list:
    """Indices [i1, ..., ik] with perm = s_i1 o ... o s_ik (perm as an image tuple)."""
    p = list(perm.images if isinstance(perm, Injection) else perm)
    word = []
    while True:
        for i in range(len(p) - 1):
            if p[i] > p[i + 1]:
                # p = (p o s_i) o s_i and p o s_i has one inversion fewer
                p[i], p[i + 1] = p[i + 1], p[i]
                word.append(i + 1)
                break
        else:
            break
    word.reverse()
    return word


def factor_through_pi(f: Injection):
    """Write f = sigma o pi^(n-m) with sigma in S_n; returns the image tuple of sigma.

    pi^(n-m) sends r to r + n - m, so sigma must send n-m+r to f(r); the
    first n-m points go to the missing values in increasing order.
    """
    return tuple(f.missing()) + f.images


def standardize(images):
    """Sorted image and the permutation sigma with images[r] = sorted[sigma(r)]."""
    srt = tuple(sorted(images))
    pos = {a: i + 1 for i, a in enumerate(srt)}
    return srt, tuple(pos[a] for a in images)


def all_permutations(n: int):
    return injection_tuples(n, n)


def compose_tuples(g, f):
    return tuple(g[a - 1] for a in f)


def inverse_permutation(p):
    out = [0] * len(p)
    for i, a in enumerate(p):
        out[a - 1] = i + 1
    return tuple(out)


def binomial(n, k):
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


_INJ_RE = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*:\s*\(([^)]*)\)\s*$")


def parse_injection(text: str) -> Injection:
    """Parse ``m->n:(a1,...,am)``."""
    m = _INJ_RE.match(text)
    if not m:
        raise InjectionError(f"bad injection syntax {text!r}")
    src, tgt, body = int(m.group(1)), int(m.group(2)), m.group(3).strip()
    images = [int(x) for x in body.split(",") if x.strip()] if body else []
    if len(images) != src:
        raise InjectionError(f"{text!r}: expected {src} images, got {len(images)}")
    return Injection(images, tgt)


def format_injection(f: Injection) -> str:
    return f"{f.source}->{f.target}:(" + ",".join(str(a) for a in f.images) + ")"
