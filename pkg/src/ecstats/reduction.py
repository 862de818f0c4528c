"""Local reduction data of y^2 = x^3 + ax + b at a prime p >= 5.

Scalar functions here are the reference implementations.  The batch path
(:func:`local_trace_table`, :func:`classify_arrays`) evaluates whole numpy
columns of curves and is checked against the scalar path in the tests.

Discriminant valuations use 4a^3 + 27b^2 throughout; the classical
discriminant differs by -16, a unit at p >= 5.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .family import discriminant, is_prime

INF_VALUATION = 10**6


class ReductionClass(enum.Enum):
    GOOD = "Good"
    SPLIT = "MultiplicativeSplit"
    NONSPLIT = "MultiplicativeNonSplit"
    ADDITIVE = "Additive"

    @property
    def is_bad(self) -> bool:
        return self is not ReductionClass.GOOD

    @property
    def is_multiplicative(self) -> bool:
        return self in (ReductionClass.SPLIT, ReductionClass.NONSPLIT)


# Order fixes the integer codes used by the batch path.
KODAIRA_TAGS = ("I0", "Im", "II", "III", "IV", "I0*", "Im*", "IV*", "III*", "II*")
_KODAIRA_INDEX = {t: i for i, t in enumerate(KODAIRA_TAGS)}


@dataclass(frozen=True, order=True)
class KodairaType:
    tag: str
    m: int = 0

    def __post_init__(self):
        if self.tag not in _KODAIRA_INDEX:
            raise ValueError(f"unknown Kodaira tag {self.tag!r}")
        if self.tag in ("Im", "Im*"):
            if self.m < 1:
                raise ValueError(f"{self.tag} needs m >= 1")
        elif self.m != 0:
            raise ValueError(f"{self.tag} carries no m")

    @classmethod
    def parse(cls, text: str) -> "KodairaType":
        """Accept 'I0', 'I3', 'II', 'I0*', 'I2*', 'IV*', ... ."""
        t = text.strip()
        if t in _KODAIRA_INDEX and t not in ("Im", "Im*"):
            return cls(t)
        star = t.endswith("*")
        core = t[:-1] if star else t
        if core.startswith("I") and core[1:].isdigit():
            m = int(core[1:])
            if m == 0:
                return cls("I0*" if star else "I0")
            return cls("Im*" if star else "Im", m)
        raise ValueError(f"cannot parse Kodaira type {text!r}")

    @property
    def index(self) -> int:
        return _KODAIRA_INDEX[self.tag]

    def __str__(self) -> str:
        if self.tag == "Im":
            return f"I{self.m}"
        if self.tag == "Im*":
            return f"I{self.m}*"
        return self.tag


@dataclass(frozen=True)
class ReductionReport:
    p: int
    cls: ReductionClass
    ap: int
    kodaira: KodairaType
    vdelta: int

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "class": self.cls.value,
            "ap": self.ap,
            "kodaira": self.kodaira.tag,
            "m": self.kodaira.m,
            "vdelta": self.vdelta,
        }


def _check_prime(p: int) -> None:
    if p < 5 or not is_prime(p):
        raise ValueError(f"expected a prime p >= 5, got {p}")


def p_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _val(n: int, p: int) -> int:
    return INF_VALUATION if n == 0 else p_valuation(n, p)


@lru_cache(maxsize=None)
def quadratic_character_table(p: int) -> tuple[int, ...]:
    """chi[n] = Legendre symbol (n/p) for 0 <= n < p."""
    chi = [-1] * p
    chi[0] = 0
    for y in range(1, (p + 1) // 2):
        chi[y * y % p] = 1
    return tuple(chi)


def trace_of_frobenius(a: int, b: int, p: int) -> int:
    """p + 1 - #E(F_p) by counting points over every x in F_p."""
    _check_prime(p)
    if discriminant(a, b) % p == 0:
        raise ValueError(f"({a}, {b}) has bad reduction at {p}")
    chi = quadratic_character_table(p)
    a %= p
    b %= p
    # #E = 1 + sum_x (1 + chi(f(x))), so a_p = -sum_x chi(f(x))
    return -sum(chi[(x * x * x + a * x + b) % p] for x in range(p))


def _node_is_split(a: int, b: int, p: int) -> bool:
    # node at x0 = -3b/(2a); tangents there are y = +-sqrt(3 x0) (x - x0)
    x0 = (-3 * b * pow(2 * a, -1, p)) % p
    return quadratic_character_table(p)[3 * x0 % p] == 1


def reduction_class(a: int, b: int, p: int) -> ReductionClass:
    _check_prime(p)
    if discriminant(a, b) % p != 0:
        return ReductionClass.GOOD
    if a % p == 0:
        return ReductionClass.ADDITIVE
    return ReductionClass.SPLIT if _node_is_split(a, b, p) else ReductionClass.NONSPLIT


def smooth_point_count(a: int, b: int, p: int) -> int:
    """Nonsingular points of the reduction mod p, the point at infinity included.

    Independent of the split test: for a node this is p - 1 (split) or
    p + 1 (non-split); for a cusp it is p.
    """
    count = 1
    for x in range(p):
        fx = (x**3 + a * x + b) % p
        dfx = (3 * x * x + a) % p
        for y in range(p):
            if (y * y - fx) % p:
                continue
            # singular iff 2y == 0 and f'(x) == 0
            if y == 0 and dfx == 0:
                continue
            count += 1
    return count


def local_trace(a: int, b: int, p: int) -> int:
    """a_p for good reduction, +1 / -1 for split / non-split, 0 for additive."""
    cls = reduction_class(a, b, p)
    if cls is ReductionClass.GOOD:
        return trace_of_frobenius(a, b, p)
    return {ReductionClass.SPLIT: 1, ReductionClass.NONSPLIT: -1}.get(cls, 0)


def kodaira_type(a: int, b: int, p: int) -> KodairaType:
    """Kodaira type from the valuation criteria for a minimal model at p >= 5."""
    _check_prime(p)
    d = discriminant(a, b)
    if d == 0:
        raise ValueError(f"({a}, {b}) is singular")
    vd = p_valuation(d, p)
    if vd == 0:
        return KodairaType("I0")
    va, vb = _val(a, p), _val(b, p)
    if va == 0:
        return KodairaType("Im", vd)
    matches = []
    if va >= 1 and vb == 1:
        matches.append(KodairaType("II"))
    if va == 1 and vb >= 2:
        matches.append(KodairaType("III"))
    if va >= 2 and vb == 2:
        matches.append(KodairaType("IV"))
    if va >= 4 and vb == 5:
        matches.append(KodairaType("II*"))
    if va == 3 and vb >= 5:
        matches.append(KodairaType("III*"))
    if va >= 3 and vb == 4:
        matches.append(KodairaType("IV*"))
    if va >= 2 and vb >= 3 and (va == 2 or vb == 3):
        q = 4 * (a // p**2) ** 3 + 27 * (b // p**3) ** 2
        m = p_valuation(q, p)
        matches.append(KodairaType("Im*", m) if m else KodairaType("I0*"))
    if len(matches) != 1:
        raise RuntimeError(f"Kodaira criteria matched {matches} for ({a}, {b}) at {p}")
    return matches[0]


def kodaira_type_standard(a: int, b: int, p: int) -> KodairaType:
    """Kodaira type from the (v(c4), v(Delta)) table; an oracle for :func:`kodaira_type`.

    With c4 = -48a and Delta = -16(4a^3 + 27b^2), p >= 5.
    """
    _check_prime(p)
    vc4 = _val(-48 * a, p)
    vd = p_valuation(-16 * discriminant(a, b), p)
    if vd == 0:
        return KodairaType("I0")
    if vc4 == 0:
        return KodairaType("Im", vd)
    if vd >= 12 and vc4 >= 4:
        raise ValueError("model is not minimal at p")
    if vc4 == 2 and vd >= 7:
        return KodairaType("Im*", vd - 6)
    table = {2: "II", 3: "III", 4: "IV", 6: "I0*", 8: "IV*", 9: "III*", 10: "II*"}
    if vd in table:
        return KodairaType(table[vd])
    raise RuntimeError(f"no table entry for v(c4)={vc4}, v(Delta)={vd}")


def reduction_report(a: int, b: int, p: int) -> ReductionReport:
    cls = reduction_class(a, b, p)
    return ReductionReport(
        p=p,
        cls=cls,
        ap=local_trace(a, b, p),
        kodaira=kodaira_type(a, b, p),
        vdelta=p_valuation(discriminant(a, b), p),
    )


def normalized_coefficient(a: int, b: int, p: int, e: int, kind: str = "ahat") -> float:
    """hat a_E(p^e) or lambda_E(p^e) for e in {1, 2}."""
    if e not in (1, 2):
        raise ValueError(f"exponent e must be 1 or 2, got {e}")
    if kind not in ("ahat", "lambda"):
        raise ValueError(f"kind must be 'ahat' or 'lambda', got {kind!r}")
    good = reduction_class(a, b, p) is ReductionClass.GOOD
    return coefficient_from_trace(local_trace(a, b, p), good, p, e, kind)


def coefficient_from_trace(ap: int, good: bool, p: int, e: int, kind: str) -> float:
    x = ap / math.sqrt(p)
    if e == 1:
        return x
    if not good:
        return x * x
    return x * x - (2.0 if kind == "ahat" else 1.0)


# ---------------------------------------------------------------------------
# batch path
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def local_trace_table(p: int) -> np.ndarray:
    """T[alpha, beta] = local trace of y^2 = x^3 + alpha x + beta over F_p.

    Good residues get a_p; nodes get +1 (split) or -1 (non-split); the
    cusp (0, 0) gets 0.
    """
    _check_prime(p)
    chi = np.array(quadratic_character_table(p), dtype=np.int64)
    xs = np.arange(p, dtype=np.int64)
    x3 = xs**3 % p
    betas = np.arange(p, dtype=np.int64)
    table = np.zeros((p, p), dtype=np.int64)
    for alpha in range(p):
        f = (x3 + alpha * xs)[None, :] + betas[:, None]
        table[alpha] = -chi[f % p].sum(axis=1)
    for alpha in range(p):
        for beta in range(p):
            if (4 * alpha**3 + 27 * beta**2) % p == 0:
                if alpha == 0:
                    table[alpha, beta] = 0
                else:
                    table[alpha, beta] = 1 if _node_is_split(alpha, beta, p) else -1
    table.setflags(write=False)
    return table


def _valuations(n: np.ndarray, p: int, cap: int = 64) -> np.ndarray:
    """Elementwise p-adic valuation; zeros get INF_VALUATION."""
    v = np.zeros(n.shape, dtype=np.int64)
    r = n.copy()
    live = r != 0
    v[~live] = INF_VALUATION
    for _ in range(cap):
        div = live & (r % p == 0)
        if not div.any():
            break
        v[div] += 1
        r[div] //= p
        live = div
    return v


# class codes for the batch path
GOOD, SPLIT, NONSPLIT, ADDITIVE = 0, 1, 2, 3
CLASS_FROM_CODE = (ReductionClass.GOOD, ReductionClass.SPLIT, ReductionClass.NONSPLIT, ReductionClass.ADDITIVE)


def classify_arrays(a: np.ndarray, b: np.ndarray, p: int) -> dict[str, np.ndarray]:
    """Vectorised reduction data for int64 columns a, b (nonsingular, minimal at p).

    Returns columns ``cls`` (0 good, 1 split, 2 non-split, 3 additive),
    ``ap``, ``kod`` (index into KODAIRA_TAGS), ``m`` and ``vdelta``.
    """
    _check_prime(p)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    ar, br = a % p, b % p
    ap = local_trace_table(p)[ar, br]
    delta = 4 * a**3 + 27 * b * b
    if np.any(delta == 0):
        raise ValueError("singular curve in batch")
    vdelta = _valuations(delta, p)
    n = a.shape[0]
    cls = np.full(n, GOOD, dtype=np.int64)
    kod = np.zeros(n, dtype=np.int64)
    m = np.zeros(n, dtype=np.int64)

    mult = (vdelta > 0) & (ar != 0)
    cls[mult] = np.where(ap[mult] == 1, SPLIT, NONSPLIT)
    kod[mult] = _KODAIRA_INDEX["Im"]
    m[mult] = vdelta[mult]

    add = (vdelta > 0) & (ar == 0)
    cls[add] = ADDITIVE
    if add.any():
        ka, km = _additive_types(a[add], b[add], p)
        kod[add] = ka
        m[add] = km
    return {"cls": cls, "ap": ap, "kod": kod, "m": m, "vdelta": vdelta}


def _additive_types(a: np.ndarray, b: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    va, vb = _valuations(a, p), _valuations(b, p)
    kod = np.full(a.shape, -1, dtype=np.int64)
    m = np.zeros(a.shape, dtype=np.int64)
    rules = [
        ("II", (va >= 1) & (vb == 1)),
        ("III", (va == 1) & (vb >= 2)),
        ("IV", (va >= 2) & (vb == 2)),
        ("II*", (va >= 4) & (vb == 5)),
        ("III*", (va == 3) & (vb >= 5)),
        ("IV*", (va >= 3) & (vb == 4)),
    ]
    for tag, mask in rules:
        kod[mask] = _KODAIRA_INDEX[tag]
    star = (va >= 2) & (vb >= 3) & ((va == 2) | (vb == 3))
    if star.any():
        q = 4 * (a[star] // p**2) ** 3 + 27 * (b[star] // p**3) ** 2
        qm = _valuations(q, p)
        kod[star] = np.where(qm == 0, _KODAIRA_INDEX["I0*"], _KODAIRA_INDEX["Im*"])
        m[star] = qm
    if np.any(kod < 0):
        raise RuntimeError("additive curve matched no Kodaira criterion")
    return kod, m


def decode(cls: int, ap: int, kod: int, m: int) -> tuple[ReductionClass, int, KodairaType]:
    return CLASS_FROM_CODE[cls], ap, KodairaType(KODAIRA_TAGS[kod], m)
