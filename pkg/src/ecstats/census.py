"""Counts of local reduction types over E(X), jointly across several primes.

Every statistic in :mod:`ecstats.density` and :mod:`ecstats.trace`
depends on a curve only through its local type at the primes involved,
so the family is reduced once to a multiset of local-type tuples.  The
reduction of an a-range is a pure function and the merge is integer
addition, so the result does not depend on how the a-range is split or
how many workers run.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import family
from .reduction import KodairaType, ReductionClass, classify_arrays, decode

log = logging.getLogger(__name__)

_AP_BIAS = 1 << 19
_M_BITS = 16


@dataclass(frozen=True, order=True)
class LocalType:
    """Reduction data of one curve at one prime."""

    cls: ReductionClass = field(compare=False)
    ap: int
    kodaira: KodairaType

    @property
    def good(self) -> bool:
        return self.cls is ReductionClass.GOOD


def encode_columns(cols: dict[str, np.ndarray]) -> np.ndarray:
    # class is recoverable from (kod, ap), so it is not stored
    return ((cols["kod"] << _M_BITS) | cols["m"]) << 20 | (cols["ap"] + _AP_BIAS)


def decode_code(code: int) -> LocalType:
    ap = (code & ((1 << 20) - 1)) - _AP_BIAS
    rest = code >> 20
    m = rest & ((1 << _M_BITS) - 1)
    kod = rest >> _M_BITS
    if kod == 0:
        cls = 0
    elif kod == 1:
        cls = 1 if ap == 1 else 2
    else:
        cls = 3
    c, ap, k = decode(cls, ap, kod, m)
    return LocalType(c, ap, k)


@dataclass
class Census:
    x: int
    primes: tuple[int, ...]
    total: int
    counts: dict[tuple[LocalType, ...], int]

    def count(self, predicate: Callable[[tuple[LocalType, ...]], bool]) -> int:
        return sum(n for key, n in self.counts.items() if predicate(key))

    def items(self):
        """(key, count) pairs in a fixed order."""
        return sorted(self.counts.items())

    def index(self, p: int) -> int:
        try:
            return self.primes.index(p)
        except ValueError:
            raise KeyError(f"prime {p} not in census primes {self.primes}") from None


def _chunk_counts(args) -> Counter:
    x, primes, lo, hi = args
    a, b = family.family_arrays(x, lo, hi)
    out: Counter = Counter()
    if a.size == 0:
        return out
    if not primes:
        out[()] = int(a.size)
        return out
    cols = np.stack([encode_columns(classify_arrays(a, b, p)) for p in primes], axis=1)
    keys, counts = np.unique(cols, axis=0, return_counts=True)
    for k, n in zip(keys.tolist(), counts.tolist()):
        out[tuple(k)] = n
    return out


def compute_census(x: int, primes: Iterable[int], workers: int = 1, chunks: int | None = None) -> Census:
    """Joint local-type counts of E(x) at `primes`."""
    primes = tuple(primes)
    if len(set(primes)) != len(primes):
        raise ValueError(f"duplicate primes in {primes}")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    parts = family.partition_a_range(x, chunks or 4 * workers)
    tasks = [(x, primes, lo, hi) for lo, hi in parts]
    merged: Counter = Counter()
    if workers == 1:
        for t in tasks:
            merged.update(_chunk_counts(t))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_chunk_counts, tasks):
                merged.update(part)
    decoded = {tuple(decode_code(c) for c in key): n for key, n in merged.items()}
    total = sum(decoded.values())
    log.debug("census x=%d primes=%s total=%d keys=%d", x, primes, total, len(decoded))
    return Census(x=x, primes=primes, total=total, counts=decoded)
