"""Dense multi-index tensors over exact rationals or binary64 floats.

Components are stored flat in lexicographic index order with slot 0 the
leftmost (slowest) index.  All values are immutable after construction
and every operation is a pure function, so tensors are safe to share
between threads.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

from .exact import (
    EXACT,
    FLOAT,
    check_tag,
    coerce_scalar,
    format_scalar,
    mat_identity,
    mat_inverse,
    mat_mul,
    parse_scalar,
    scalar_one,
    scalar_zero,
)

UP = "u"
DOWN = "d"


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, cycle = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            cycle += 1
        if cycle % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class Tensor:
    """A dense rank-r tensor on a D-dimensional space.

    valence holds one "u"/"d" flag per slot; components has length D**r.
    """

    dim: int
    valence: tuple
    components: tuple
    tag: str = EXACT

    def __post_init__(self):
        check_tag(self.tag)
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if any(v not in (UP, DOWN) for v in self.valence):
            raise ValueError(f"bad valence {self.valence!r}")
        if len(self.components) != self.dim ** self.rank:
            raise ValueError(
                f"expected {self.dim ** self.rank} components, got {len(self.components)}"
            )
        object.__setattr__(
            self, "components", tuple(coerce_scalar(c, self.tag) for c in self.components)
        )

    @property
    def rank(self):
        return len(self.valence)

    # -- indexing ---------------------------------------------------------

    def flat(self, idx):
        f = 0
        for k in idx:
            if not 0 <= k < self.dim:
                raise ValueError(f"index {idx} out of range for dim {self.dim}")
            f = f * self.dim + k
        return f

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        if len(idx) != self.rank:
            raise ValueError(f"need {self.rank} indices, got {len(idx)}")
        return self.components[self.flat(idx)]

    def indices(self):
        return itertools.product(range(self.dim), repeat=self.rank)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, dim, valence, tag=EXACT):
        z = scalar_zero(tag)
        return cls(dim, tuple(valence), (z,) * dim ** len(tuple(valence)), tag)

    @classmethod
    def from_entries(cls, dim, valence, entries, tag=EXACT):
        valence = tuple(valence)
        comps = [scalar_zero(tag)] * dim ** len(valence)
        t = cls.zeros(dim, valence, tag)
        for idx, val in entries.items():
            comps[t.flat(tuple(idx))] = coerce_scalar(val, tag)
        return cls(dim, valence, tuple(comps), tag)

    @classmethod
    def delta(cls, dim, tag=EXACT):
        """Identity map as a (1,1) tensor."""
        one = scalar_one(tag)
        return cls.from_entries(dim, (UP, DOWN), {(i, i): one for i in range(dim)}, tag)

    # -- algebra ----------------------------------------------------------

    def _check_compatible(self, other):
        if not isinstance(other, Tensor):
            raise TypeError("expected a Tensor")
        if (self.dim, self.valence) != (other.dim, other.valence):
            raise ValueError("tensor shapes differ")
        if self.tag != other.tag:
            raise ValueError(f"mixed scalar tags {self.tag!r} and {other.tag!r}")

    def __add__(self, other):
        self._check_compatible(other)
        comps = tuple(a + b for a, b in zip(self.components, other.components))
        return Tensor(self.dim, self.valence, comps, self.tag)

    def __sub__(self, other):
        self._check_compatible(other)
        comps = tuple(a - b for a, b in zip(self.components, other.components))
        return Tensor(self.dim, self.valence, comps, self.tag)

    def __neg__(self):
        return Tensor(self.dim, self.valence, tuple(-a for a in self.components), self.tag)

    def scale(self, c):
        c = coerce_scalar(c, self.tag)
        return Tensor(self.dim, self.valence, tuple(c * a for a in self.components), self.tag)

    def max_abs(self):
        zero = scalar_zero(self.tag)
        return max((abs(c) for c in self.components), default=zero)

    def is_zero(self, tol=None):
        if self.tag == EXACT:
            return all(c == 0 for c in self.components)
        tol = 0.0 if tol is None else tol
        return all(abs(c) <= tol for c in self.components)

    # -- JSON form --------------------------------------------------------

    def to_json(self):
        entries = {}
        for idx in self.indices():
            v = self.components[self.flat(idx)]
            if v != 0:
                entries[",".join(map(str, idx))] = format_scalar(v)
        return {
            "dim": self.dim,
            "rank": self.rank,
            "valence": list(self.valence),
            "entries": entries,
        }

    @classmethod
    def from_json(cls, data):
        valence = tuple(data["valence"])
        if data.get("rank", len(valence)) != len(valence):
            raise ValueError("rank does not match valence length")
        entries, tags = {}, set()
        for key, raw in data.get("entries", {}).items():
            idx = tuple(int(p) for p in key.split(","))
            val, tag = parse_scalar(raw)
            entries[idx] = val
            tags.add(tag)
        if len(tags) > 1:
            raise ValueError("mixed exact and float entries")
        tag = tags.pop() if tags else EXACT
        return cls.from_entries(data["dim"], valence, entries, tag)

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class FrameMetric:
    """A constant invertible symmetric bilinear form and its inverse."""

    dim: int
    g: tuple
    g_inv: tuple
    tag: str = EXACT

    def __post_init__(self):
        check_tag(self.tag)
        g = tuple(tuple(coerce_scalar(x, self.tag) for x in row) for row in self.g)
        ginv = tuple(tuple(coerce_scalar(x, self.tag) for x in row) for row in self.g_inv)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "g_inv", ginv)
        for i in range(self.dim):
            for j in range(self.dim):
                if self.tag == EXACT:
                    if g[i][j] != g[j][i]:
                        raise ValueError("metric is not symmetric")
                elif abs(g[i][j] - g[j][i]) > 1e-13:
                    raise ValueError("metric is not symmetric")
        prod = mat_mul([list(r) for r in g], [list(r) for r in ginv])
        ident = mat_identity(self.dim, self.tag)
        for i in range(self.dim):
            for j in range(self.dim):
                err = prod[i][j] - ident[i][j]
                if self.tag == EXACT:
                    if err != 0:
                        raise ValueError("g_inv is not the inverse of g")
                elif abs(err) > 1e-13:
                    raise ValueError("g_inv is not the inverse of g")

    @classmethod
    def from_matrix(cls, rows, tag=None):
        if tag is None:
            tag = FLOAT if any(isinstance(x, float) for row in rows for x in row) else EXACT
        g = [[coerce_scalar(x, tag) for x in row] for row in rows]
        return cls(len(g), tuple(map(tuple, g)), tuple(map(tuple, mat_inverse(g, tag))), tag)

    @classmethod
    def euclidean(cls, dim, tag=EXACT):
        ident = mat_identity(dim, tag)
        return cls(dim, tuple(map(tuple, ident)), tuple(map(tuple, ident)), tag)

    @classmethod
    def light_cone(cls, n, tag=EXACT):
        """Lorentzian frame metric in the order (+, -, 1..n).

        The two null directions pair to 1 and the n transverse directions
        are orthonormal, so the matrix is its own inverse.
        """
        one, zero = scalar_one(tag), scalar_zero(tag)
        d = n + 2
        rows = [[zero] * d for _ in range(d)]
        rows[0][1] = rows[1][0] = one
        for i in range(n):
            rows[2 + i][2 + i] = one
        rows = tuple(map(tuple, rows))
        return cls(d, rows, rows, tag)

    @classmethod
    def diagonal(cls, entries, tag=EXACT):
        d = len(entries)
        rows = mat_identity(d, tag)
        for i, s in enumerate(entries):
            rows[i][i] = coerce_scalar(s, tag)
        return cls.from_matrix(rows, tag)

    def to_json(self):
        return [[format_scalar(x) for x in row] for row in self.g]

    @classmethod
    def from_json(cls, rows):
        parsed = [[parse_scalar(x) for x in row] for row in rows]
        tags = {t for row in parsed for _, t in row}
        if len(tags) > 1:
            raise ValueError("mixed exact and float metric entries")
        tag = tags.pop() if tags else EXACT
        return cls.from_matrix([[v for v, _ in row] for row in parsed], tag)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _check_slot(t, slot):
    if not 0 <= slot < t.rank:
        raise ValueError(f"slot {slot} out of range for rank {t.rank}")


def contract(t, slot_a, slot_b, metric=None):
    """Contract two slots, using the metric when they have equal valence.

    An up/down pair traces directly; two down slots pair through g_inv
    and two up slots through g.  The result keeps the input tag.
    """
    _check_slot(t, slot_a)
    _check_slot(t, slot_b)
    if slot_a == slot_b:
        raise ValueError("contraction slots must be distinct")
    slot_a, slot_b = sorted((slot_a, slot_b))
    va, vb = t.valence[slot_a], t.valence[slot_b]
    pairing = None
    if va == vb:
        if metric is None:
            raise ValueError("metric required to contract two slots of equal valence")
        if metric.tag != t.tag:
            raise ValueError("metric and tensor tags differ")
        if metric.dim != t.dim:
            raise ValueError("metric dimension mismatch")
        pairing = metric.g_inv if va == DOWN else metric.g
    new_valence = tuple(v for k, v in enumerate(t.valence) if k not in (slot_a, slot_b))
    out = Tensor.zeros(t.dim, new_valence, t.tag)
    comps = list(out.components)
    for idx in itertools.product(range(t.dim), repeat=len(new_valence)):
        total = scalar_zero(t.tag)
        for p in range(t.dim):
            for q in range(t.dim):
                if pairing is None and p != q:
                    continue
                full = list(idx)
                full.insert(slot_a, p)
                full.insert(slot_b, q)
                v = t.components[t.flat(tuple(full))]
                if pairing is not None:
                    v = pairing[p][q] * v
                total += v
        comps[out.flat(idx)] = total
    return Tensor(t.dim, new_valence, tuple(comps), t.tag)


def antisymmetrize(t, slots):
    """Signed average over permutations of the listed slots (idempotent)."""
    slots = tuple(slots)
    if len(set(slots)) != len(slots):
        raise ValueError("slots must be distinct")
    for s in slots:
        _check_slot(t, s)
    if len({t.valence[s] for s in slots}) > 1:
        raise ValueError("cannot antisymmetrize slots of mixed valence")
    perms = list(itertools.permutations(range(len(slots))))
    if t.tag == EXACT:
        weight = Fraction(1, len(perms))
    else:
        weight = 1.0 / len(perms)
    comps = []
    for idx in t.indices():
        total = scalar_zero(t.tag)
        for perm in perms:
            full = list(idx)
            for pos, s in enumerate(slots):
                full[s] = idx[slots[perm[pos]]]
            v = t.components[t.flat(tuple(full))]
            total += v if _perm_sign(perm) > 0 else -v
        comps.append(weight * total)
    return Tensor(t.dim, t.valence, tuple(comps), t.tag)


def raise_lower(t, slot, metric):
    """Flip one slot's valence through the frame metric.

    Applying the operation twice restores the input exactly in exact
    mode, since g and g_inv are exact inverses.
    """
    _check_slot(t, slot)
    if metric.tag != t.tag:
        raise ValueError("metric and tensor tags differ")
    if metric.dim != t.dim:
        raise ValueError("metric dimension mismatch")
    lowering = t.valence[slot] == UP
    pairing = metric.g if lowering else metric.g_inv
    new_valence = list(t.valence)
    new_valence[slot] = DOWN if lowering else UP
    out = Tensor.zeros(t.dim, tuple(new_valence), t.tag)
    comps = list(out.components)
    for idx in t.indices():
        total = scalar_zero(t.tag)
        for z in range(t.dim):
            full = list(idx)
            full[slot] = z
            total += pairing[idx[slot]][z] * t.components[t.flat(tuple(full))]
        comps[out.flat(idx)] = total
    return Tensor(t.dim, tuple(new_valence), tuple(comps), t.tag)
