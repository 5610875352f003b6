"""Uniform samplers over labelled structures and Monte Carlo estimators.

RNG contract: every stream is a :class:`random.Random` (Mersenne Twister)
seeded with a 64-bit value derived from ``(seed, *keys)`` by BLAKE2b, so
``getrandbits``/``randrange`` sequences are stable across Python versions.
Estimates draw samples in fixed-size blocks, block ``b`` using the stream
``(seed, b)``; results therefore do not depend on the worker count.
"""

from __future__ import annotations

import hashlib
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .config import GUARDS, GuardError
from .core import AtomStructure, EStructure, Structure, cycle_table
from .enumeration import (S, enumerate_class, fas_count_formula, fas_weights,
                          labelled_count, predicate)

BLOCK = 1000


def derive_seed(seed: int, *keys: int) -> int:
    h = hashlib.blake2b(digest_size=8)
    for v in (seed,) + keys:
        h.update(int(v).to_bytes(16, "little", signed=True))
    return int.from_bytes(h.digest(), "little")


def make_rng(seed: int, *keys: int) -> random.Random:
    return random.Random(derive_seed(seed, *keys))


# -- samplers ----------------------------------------------------------------

@lru_cache(maxsize=256)
def _layout(n: int, f: tuple[int, ...], I: frozenset[int]):
    """Per-slot index into ``bits + [0]`` for a frame, plus the diversity cycle count."""
    table = cycle_table(n, f, I)
    div = table.diversity
    k = len(div)
    lookup = np.full(len(table.cycles), k, dtype=np.int64)
    lookup[list(div)] = np.arange(k)
    return table, k, lookup[table.triple_to_cycle]


def _bits(rng: random.Random, k: int) -> np.ndarray:
    out = np.zeros(k + 1, dtype=np.uint8)
    if k:
        x = rng.getrandbits(k)
        raw = np.frombuffer(x.to_bytes((k + 7) // 8, "little"), dtype=np.uint8)
        out[:k] = np.unpackbits(raw, bitorder="little")[:k]
    return out


@lru_cache(maxsize=64)
def _fsiase_base(n: int) -> np.ndarray:
    table = cycle_table(n, None, 0)
    base = np.zeros(n**3, dtype=np.uint8)
    slots = table.slot_lists()
    for a in range(n):
        base[slots[table.index_of((a, 0, a))]] = 1
    return base


def sample_fsiase(n: int, rng: random.Random) -> EStructure:
    """Uniform labelled e-form structure with ``e = 0``: each diversity cycle is
    consistent independently with probability 1/2."""
    _, k, slot_pos = _layout(n, tuple(range(n)), frozenset((0,)))
    T = _fsiase_base(n) | _bits(rng, k)[slot_pos]
    return EStructure(n, 0, T.tobytes())


@lru_cache(maxsize=64)
def _fas_weights(n: int):
    w = fas_weights(n)
    return w, sum(x for _, _, x in w)


def sample_fas(n: int, rng: random.Random, unsafe: bool = False) -> AtomStructure:
    """Uniform labelled member of FAS.

    Picks ``(|I|, #pairs)`` with exact big-integer weights from the counting
    formula, then ``I``, the involution, the identity selections and the
    diversity cycles uniformly.
    """
    if n > GUARDS.fas_formula_n and not unsafe:
        raise GuardError(f"FAS formula only validated for n <= {GUARDS.fas_formula_n}; pass unsafe=True")
    weights, total = _fas_weights(n)
    r = rng.randrange(total)
    for i, p, w in weights:
        if r < w:
            break
        r -= w
    I = sorted(rng.sample(range(n), i))
    D = [a for a in range(n) if a not in I]
    order = D[:]
    rng.shuffle(order)
    f = list(range(n))
    for q in range(p):
        a, b = order[2 * q], order[2 * q + 1]
        f[a], f[b] = b, a
    f = tuple(f)
    Iset = frozenset(I)
    table, k, slot_pos = _layout(n, f, Iset)
    T = _bits(rng, k)[slot_pos]
    slots = table.slot_lists()
    for j in I:
        T[slots[table.index_of((j, j, j))]] = 1
    for a in D:
        mask = rng.randrange(1, 1 << i)
        for q, j in enumerate(I):
            if mask >> q & 1:
                T[slots[table.index_of((a, j, a))]] = 1
    return AtomStructure(n, f, Iset, T.tobytes())


def sampler(cls: str, unsafe: bool = False) -> Callable[[int, random.Random], Structure]:
    if cls == "FSIASe":
        return sample_fsiase
    if cls == "FAS":
        return lambda n, rng: sample_fas(n, rng, unsafe=unsafe)
    raise ValueError(f"no sampler for class {cls!r}")


# -- estimates ---------------------------------------------------------------

@dataclass(frozen=True)
class ProbabilityEstimate:
    predicate: str
    n: int
    samples: int
    seed: int | None
    hits: int
    stderr: float
    method: str  # enumerated | formula | sampled
    cls: str

    @property
    def value(self) -> Fraction:
        return Fraction(self.hits, self.samples)

    def to_json(self) -> dict:
        return {"predicate": self.predicate, "n": self.n, "samples": self.samples,
                "seed": self.seed, "value": float(self.value), "exact": str(self.value),
                "stderr": self.stderr, "method": self.method, "class": self.cls}


def _stderr(hits: int, samples: int) -> float:
    v = hits / samples
    return math.sqrt(v * (1 - v) / samples)


def _default_class(name: str) -> str:
    return "FAS" if name == "symmetric-integral" else "FSIASe"


def _resolve(pred) -> tuple[str, Callable[[Structure], bool]]:
    if isinstance(pred, str):
        return pred, predicate(pred)
    from .fol import Sentence, compile_sentence, render
    if isinstance(pred, Sentence):
        check = compile_sentence(pred)
        return render(pred), check
    raise ValueError(f"unknown predicate {pred!r}")


def _class_size(n: int, cls: str) -> int | None:
    try:
        return labelled_count(n, cls).labelled
    except GuardError:
        return None


def _run_block(args) -> int:
    check, draw, n, seed, block, size = args
    rng = make_rng(seed, block)
    return sum(1 for _ in range(size) if check(draw(n, rng)))


def sampled_hits(check: Callable[[Structure], bool], draw, n: int, samples: int, seed: int,
                 threads: int = 1) -> int:
    jobs = []
    for b, start in enumerate(range(0, samples, BLOCK)):
        jobs.append((check, draw, n, seed, b, min(BLOCK, samples - start)))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(threads) as pool:
            return sum(pool.map(_run_block, jobs))
    return sum(map(_run_block, jobs))


def estimate(pred: Union[str, object], n: int, samples: int = 10_000, seed: int = 0,
             cls: str | None = None, exact: bool | None = None, unsafe: bool = False,
             threads: int = 1) -> ProbabilityEstimate:
    """Labelled probability of ``pred`` among ``n``-atom members of ``cls``.

    ``exact=None`` picks full enumeration whenever the class is enumerable
    and no larger than the requested sample count.
    """
    name, check = _resolve(pred)
    cls = cls or (_default_class(name) if isinstance(pred, str) else "FSIASe")
    enum_guard = GUARDS.enumerate_fas_n if cls == "FAS" else GUARDS.enumerate_fsiase_n
    size = _class_size(n, cls)
    if exact is None:
        exact = n <= enum_guard and size is not None and size <= samples
    if exact:
        if name == "symmetric-integral" and cls == "FAS" and n > enum_guard:
            if n > GUARDS.fas_formula_n and not unsafe:
                raise GuardError(f"exact symmetric-integral fraction beyond n={GUARDS.fas_formula_n} needs unsafe=True")
            total = fas_count_formula(n)
            return ProbabilityEstimate(name, n, total, None, n * 2 ** S(n), 0.0, "formula", cls)
        total = hits = 0
        for A in enumerate_class(n, cls, unsafe=unsafe):
            total += 1
            hits += bool(check(A))
        return ProbabilityEstimate(name, n, total, None, hits, 0.0, "enumerated", cls)
    if samples < 1:
        raise ValueError("samples must be positive")
    draw = sampler(cls, unsafe=unsafe)
    hits = sampled_hits(check, draw, n, samples, seed, threads)
    return ProbabilityEstimate(name, n, samples, seed, hits, _stderr(hits, samples), "sampled", cls)


def extension_failure_bound(n: int, m: int) -> Fraction:
    """Upper bound ``(n-1)^m (1 - 2^-((m^2+3m+2)/2))^(n-m-1)`` on the fraction of
    ``n``-atom structures failing an extension axiom with ``m`` variables."""
    if n <= m + 1:
        raise ValueError(f"need n > m + 1, got n={n}, m={m}")
    forced = (m * m + 3 * m + 2) // 2
    return Fraction(n - 1) ** m * (1 - Fraction(1, 2**forced)) ** (n - m - 1)


@dataclass(frozen=True)
class ExtensionFailure:
    n: int
    pattern: object
    samples: int
    seed: int
    failures: int
    bound: Fraction

    @property
    def fraction(self) -> float:
        return self.failures / self.samples

    @property
    def stderr(self) -> float:
        return _stderr(self.failures, self.samples)

    def within_bound(self, sigmas: float = 5.0) -> bool:
        return self.fraction <= float(self.bound) + sigmas * self.stderr

    def to_json(self) -> dict:
        p = self.pattern
        return {"n": self.n, "m": p.m, "c": p.c, "ci": "".join(map(str, p.ci)),
                "cij": "".join(map(str, p.cij)), "samples": self.samples, "seed": self.seed,
                "failure": self.fraction, "stderr": self.stderr, "bound": float(self.bound),
                "bound_exact": str(self.bound), "method": "sampled",
                "within_bound": self.within_bound()}


def extension_failures(n: int, patterns, samples: int = 10_000, seed: int = 0,
                       distinct: bool = True, threads: int = 1) -> list[ExtensionFailure]:
    """Failure counts of several extension axioms on one shared set of e-form samples.

    Uses the same block streams as :func:`estimate`, so each count equals
    ``samples`` minus the hits of the corresponding sampled estimate.
    """
    from .fol import extension_holds_fast
    patterns = list(patterns)

    def block(b: int) -> list[int]:
        rng = make_rng(seed, b)
        counts = [0] * len(patterns)
        for _ in range(min(BLOCK, samples - b * BLOCK)):
            A = sample_fsiase(n, rng)
            for k, p in enumerate(patterns):
                counts[k] += not extension_holds_fast(A, p, distinct)
        return counts

    blocks = range((samples + BLOCK - 1) // BLOCK)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(block, blocks))
    else:
        parts = [block(b) for b in blocks]
    totals = [sum(col) for col in zip(*parts)] if parts else [0] * len(patterns)
    return [ExtensionFailure(n, p, samples, seed, fails, extension_failure_bound(n, p.m))
            for p, fails in zip(patterns, totals)]
