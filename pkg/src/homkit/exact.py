"""Exact rational scalars and small dense linear algebra.

Everything here works on plain nested lists.  Exact values are
``fractions.Fraction``; the float mode mirrors the same operations on
binary64 numbers.  The two modes never mix silently: every container in
the package carries a tag, and operations reject mismatched tags.
"""

from __future__ import annotations

from fractions import Fraction

EXACT = "exact"
FLOAT = "float"

_TAGS = (EXACT, FLOAT)


def check_tag(tag):
    if tag not in _TAGS:
        raise ValueError(f"unknown scalar tag {tag!r}")
    return tag


def coerce_scalar(value, tag):
    """Coerce a number to the given tag, rejecting cross-tag values."""
    if tag == EXACT:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise ValueError(f"exact mode cannot hold {value!r} without silent promotion")
    if isinstance(value, Fraction):
        raise ValueError(f"float mode cannot hold exact value {value!r}")
    return float(value)


def scalar_zero(tag):
    return Fraction(0) if tag == EXACT else 0.0


def scalar_one(tag):
    return Fraction(1) if tag == EXACT else 1.0


def parse_scalar(text):
    """Parse a JSON entry: "p/q" strings are exact, numbers are floats."""
    if isinstance(text, str):
        return Fraction(text), EXACT
    if isinstance(text, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(text, int):
        # bare JSON integers are treated as exact
        return Fraction(text), EXACT
    if isinstance(text, float):
        return float(text), FLOAT
    raise ValueError(f"cannot parse scalar {text!r}")


def format_scalar(value):
    if isinstance(value, Fraction):
        return str(value)
    return value


# ---------------------------------------------------------------------------
# dense matrix helpers (lists of lists, single tag)
# ---------------------------------------------------------------------------


def mat_identity(n, tag=EXACT):
    one, zero = scalar_one(tag), scalar_zero(tag)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_zeros(rows, cols, tag=EXACT):
    zero = scalar_zero(tag)
    return [[zero for _ in range(cols)] for _ in range(rows)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = a[i][0] * b[0][j]
            for l in range(1, k):
                s += a[i][l] * b[l][j]
            row.append(s)
        out.append(row)
    return out


def mat_commutator(a, b):
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def mat_inverse(a, tag=EXACT):
    """Gauss-Jordan inverse; raises ValueError on a singular matrix."""
    n = len(a)
    work = [[coerce_scalar(x, tag) for x in row] for row in a]
    inv = mat_identity(n, tag)
    for col in range(n):
        pivot = None
        if tag == EXACT:
            for r in range(col, n):
                if work[r][col] != 0:
                    pivot = r
                    break
        else:
            best = -1.0
            for r in range(col, n):
                if abs(work[r][col]) > best:
                    best, pivot = abs(work[r][col]), r
            if best == 0.0:
                pivot = None
        if pivot is None:
            raise ValueError("singular matrix")
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
        p = work[col][col]
        if tag == EXACT and p == 0:
            raise ValueError("singular matrix")
        work[col] = [x / p for x in work[col]]
        inv[col] = [x / p for x in inv[col]]
        for r in range(n):
            if r == col:
                continue
            f = work[r][col]
            if f == 0:
                continue
            work[r] = [x - f * y for x, y in zip(work[r], work[col])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


# ---------------------------------------------------------------------------
# exact row reduction and span bookkeeping
# ---------------------------------------------------------------------------


def row_reduce(rows):
    """Reduced row echelon form over the rationals.

    Returns (basis_rows, pivot_columns); zero rows are dropped, so the
    basis rows span the same space as the input and rank decisions need
    no tolerance.
    """
    work = [list(r) for r in rows if any(x != 0 for x in r)]
    basis, pivots = [], []
    ncols = len(rows[0]) if rows else 0
    for row in work:
        row = list(row)
        for b, p in zip(basis, pivots):
            if row[p] != 0:
                f = row[p]
                row = [x - f * y for x, y in zip(row, b)]
        lead = next((j for j in range(ncols) if row[j] != 0), None)
        if lead is None:
            continue
        row = [x / row[lead] for x in row]
        for i, (b, p) in enumerate(zip(basis, pivots)):
            if b[lead] != 0:
                f = b[lead]
                basis[i] = [x - f * y for x, y in zip(b, row)]
        basis.append(row)
        pivots.append(lead)
    order = sorted(range(len(basis)), key=lambda i: pivots[i])
    return [basis[i] for i in order], [pivots[i] for i in order]


def solve_in_span(basis_rows, pivots, target):
    """Express target in the row_reduce basis; None if outside the span."""
    residual = list(target)
    coeffs = []
    for row, p in zip(basis_rows, pivots):
        c = residual[p]
        coeffs.append(c)
        if c != 0:
            residual = [x - c * y for x, y in zip(residual, row)]
    if any(x != 0 for x in residual):
        return None
    return coeffs


def solve_linear(a, b):
    """One exact solution x of a x = b, or None if inconsistent.

    Free variables are set to zero, which keeps generation code
    deterministic.
    """
    nrows, ncols = len(a), len(a[0])
    aug = [list(a[i]) + [b[i]] for i in range(nrows)]
    basis, pivots = row_reduce(aug)
    x = [Fraction(0)] * ncols
    # in reduced echelon form each pivot row reads off one component once
    # the free variables are pinned to zero
    for row, p in zip(basis, pivots):
        if p == ncols:
            return None
        x[p] = row[ncols]
    return x
