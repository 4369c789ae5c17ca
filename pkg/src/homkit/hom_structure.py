"""Homogeneous-structure tensors at a point.

A structure is a pair (g, S) with S all-lower and antisymmetric in its
last two slots.  The module splits S into its three orthogonal pieces
(vectorial, traceless cyclic-free, totally antisymmetric), classifies
the result, and rebuilds the transitive isometry algebra from S plus a
curvature operator with values in a given isotropy span.

Conventions fixed here and used everywhere else:

* the defining one-form is alpha_Z = c12(S)_Z / (D - 1), the unique
  normalization that round-trips the vectorial parametrization
  S_{XYZ} = g_{XY} alpha_Z - g_{XZ} alpha_Y;
* degeneracy reads the sign of alpha(xi) in a mostly-plus signature:
  positive = spacelike, negative = timelike, zero = null;
* the curvature tensor is stored in the convention R(X, Y) =
  nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]; with that convention
  the isotropy part of the bracket of two tangent generators is
  MINUS the curvature operator (the classical symmetric-space formula
  R(X, Y)Z = -[[X, Y], Z]).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .exact import EXACT, format_scalar, row_reduce, scalar_zero, solve_linear
from .lie_algebra import LieAlgebra, jacobi_residual
from .tensor_core import (
    DOWN,
    UP,
    FrameMetric,
    Tensor,
    antisymmetrize,
    contract,
    raise_lower,
)

FLOAT_ZERO_TOL = 1e-10

CLASS_NAMES = {
    frozenset(): "zero",
    frozenset({1}): "T1",
    frozenset({2}): "T2",
    frozenset({3}): "T3",
    frozenset({1, 2}): "T1+T2",
    frozenset({1, 3}): "T1+T3",
    frozenset({2, 3}): "T2+T3",
    frozenset({1, 2, 3}): "T1+T2+T3",
}


@dataclass(frozen=True)
class HomogeneousStructure:
    metric: FrameMetric
    S: Tensor

    def __post_init__(self):
        if self.S.valence != (DOWN, DOWN, DOWN):
            raise ValueError("S must be an all-lower rank-3 tensor")
        if self.S.dim != self.metric.dim:
            raise ValueError("S and metric dimensions differ")
        if self.S.tag != self.metric.tag:
            raise ValueError("S and metric tags differ")
        tol = 0.0 if self.tag == EXACT else 1e-12
        for x, y, z in itertools.product(range(self.dim), repeat=3):
            if y > z:
                continue
            err = self.S[x, y, z] + self.S[x, z, y]
            if (err != 0) if self.tag == EXACT else (abs(err) > tol):
                raise ValueError(
                    f"S is not antisymmetric in its last two slots at ({x},{y},{z})"
                )

    @property
    def dim(self):
        return self.S.dim

    @property
    def tag(self):
        return self.S.tag

    def to_json(self):
        return {"metric": self.metric.to_json(), "S": self.S.to_json()}

    @classmethod
    def from_json(cls, data):
        return cls(FrameMetric.from_json(data["metric"]), Tensor.from_json(data["S"]))


@dataclass(frozen=True)
class StructureClass:
    label: str
    degeneracy: str  # none | spacelike | timelike | null
    xi_norm: object

    def to_json(self):
        return {
            "class": self.label,
            "degeneracy": self.degeneracy,
            "xi_norm": format_scalar(self.xi_norm),
        }


def _is_zero(t, tag):
    return t.is_zero() if tag == EXACT else t.is_zero(FLOAT_ZERO_TOL)


def trace_one_form(hs):
    """The defining one-form, its metric dual, and the dual's norm.

    alpha_Z = g^{AB} S_{ABZ} / (D - 1);  xi = alpha raised;
    norm = alpha(xi) = g^{AB} alpha_A alpha_B.
    """
    d = hs.dim
    if d < 2:
        raise ValueError("trace_one_form needs dimension at least 2")
    c = contract(hs.S, 0, 1, hs.metric)
    if hs.tag == EXACT:
        alpha = c.scale(Fraction(1, d - 1))
    else:
        alpha = c.scale(1.0 / (d - 1))
    xi = raise_lower(alpha, 0, hs.metric)
    norm = scalar_zero(hs.tag)
    for a in range(d):
        norm += alpha[a] * xi[a]
    return alpha, xi, norm


def vectorial_part(metric, alpha):
    """S1_{XYZ} = g_{XY} alpha_Z - g_{XZ} alpha_Y."""
    d = metric.dim
    comps = []
    g = metric.g
    for x, y, z in itertools.product(range(d), repeat=3):
        comps.append(g[x][y] * alpha[z] - g[x][z] * alpha[y])
    return Tensor(d, (DOWN, DOWN, DOWN), tuple(comps), metric.tag)


def decompose(hs):
    """Split S into (S1, S2, S3): trace, cyclic-traceless, 3-form parts.

    The sum reconstructs S exactly, S3 is the total antisymmetrization,
    and S2 is trace-free with vanishing 3-form part.
    """
    alpha, _, _ = trace_one_form(hs)
    s1 = vectorial_part(hs.metric, alpha)
    s3 = antisymmetrize(hs.S, (0, 1, 2))
    s2 = hs.S - s1 - s3
    return s1, s2, s3


def classify(hs):
    """Class label from the nonzero projections, plus causal degeneracy.

    Exact scalars use exact zero tests; floats use the documented
    absolute tolerance on the largest component.
    """
    s1, s2, s3 = decompose(hs)
    parts = set()
    if not _is_zero(s1, hs.tag):
        parts.add(1)
    if not _is_zero(s2, hs.tag):
        parts.add(2)
    if not _is_zero(s3, hs.tag):
        parts.add(3)
    label = CLASS_NAMES[frozenset(parts)]
    _, _, norm = trace_one_form(hs)
    if 1 not in parts:
        degeneracy = "none"
    else:
        if hs.tag == EXACT:
            sign = (norm > 0) - (norm < 0)
        else:
            sign = 0 if abs(norm) <= FLOAT_ZERO_TOL else (1 if norm > 0 else -1)
        degeneracy = {1: "spacelike", -1: "timelike", 0: "null"}[sign]
    return StructureClass(label, degeneracy, norm)


# ---------------------------------------------------------------------------
# isometry algebra reconstruction
# ---------------------------------------------------------------------------


def _is_metric_antisymmetric(metric, m):
    """g(AX, Y) + g(X, AY) = 0 for the action matrix A."""
    d = metric.dim
    g = metric.g
    for x in range(d):
        for y in range(d):
            s = scalar_zero(metric.tag)
            for k in range(d):
                s += g[k][y] * m[k][x] + g[x][k] * m[k][y]
            if s != 0:
                return False
    return True


@dataclass(frozen=True)
class CurvatureAtPoint:
    """Curvature operator data at a point.

    Rbar has valence (d, d, u, d): slots 0,1 are the 2-form arguments and
    slots 2,3 the endomorphism (row, column).  h_basis lists the
    isotropy generators as metric-antisymmetric action matrices.
    """

    Rbar: Tensor
    h_basis: tuple
    metric: FrameMetric

    def __post_init__(self):
        if self.Rbar.valence != (DOWN, DOWN, UP, DOWN):
            raise ValueError("Rbar must have valence (d, d, u, d)")
        if self.Rbar.dim != self.metric.dim:
            raise ValueError("Rbar and metric dimensions differ")
        d = self.metric.dim
        h_basis = tuple(
            tuple(tuple(Fraction(x) if self.Rbar.tag == EXACT else float(x) for x in row) for row in m)
            for m in self.h_basis
        )
        object.__setattr__(self, "h_basis", h_basis)
        for a in range(d):
            for b in range(a, d):
                for c, e in itertools.product(range(d), repeat=2):
                    if self.Rbar[a, b, c, e] != -self.Rbar[b, a, c, e]:
                        raise ValueError("Rbar is not antisymmetric in its form slots")
        for m in h_basis:
            if len(m) != d or any(len(row) != d for row in m):
                raise ValueError("h_basis matrices must be D x D")
            if not _is_metric_antisymmetric(self.metric, m):
                raise ValueError("h_basis matrix is not metric-antisymmetric")

    def operator(self, a, b):
        """Matrix of Rbar(E_a, E_b) as nested lists (row, column)."""
        d = self.metric.dim
        return [[self.Rbar[a, b, r, c] for c in range(d)] for r in range(d)]


class SpanError(ValueError):
    """A curvature value or commutator leaves the modeled isotropy span."""

    def __init__(self, message, bracket):
        super().__init__(f"{message} at bracket {bracket}")
        self.bracket = bracket


def _flatten(m):
    return [x for row in m for x in row]


def build_isometry_algebra(hs, curv, m_labels=None, h_labels=None):
    """Assemble the transitive algebra on m + h' from (S, curvature).

    Brackets: tangent-tangent m-part S_X Y - S_Y X, isotropy part minus
    the curvature operator expanded in h_basis; [A, X] = A X for
    isotropy A; [A, B] the matrix commutator.  Returns the algebra and
    its exact (or float) Jacobi residual magnitude.
    """
    if hs.metric != curv.metric:
        raise ValueError("structure and curvature use different metrics")
    d = hs.dim
    tag = hs.tag
    k = len(curv.h_basis)
    n_total = d + k
    if m_labels is None:
        m_labels = [f"E{i}" for i in range(d)]
    if h_labels is None:
        h_labels = [f"A{p}" for p in range(k)]
    if len(m_labels) != d or len(h_labels) != k:
        raise ValueError("label counts do not match basis sizes")

    if k:
        if tag != EXACT:
            raise ValueError("float-mode reconstruction is not supported; rationalize first")
        rows = [_flatten(m) for m in curv.h_basis]
        basis, _ = row_reduce(rows)
        if len(basis) != k:
            raise ValueError("h_basis matrices are linearly dependent")
        # columns of this system are the flattened h_basis matrices
        a_cols = [[rows[p][i] for p in range(k)] for i in range(len(rows[0]))]

    def expand(matrix, bracket):
        flat = _flatten(matrix)
        if k == 0:
            if any(x != 0 for x in flat):
                raise SpanError("curvature value outside empty isotropy span", bracket)
            return []
        coeffs = solve_linear(a_cols, flat)
        if coeffs is None:
            raise SpanError("value outside span(h_basis)", bracket)
        return coeffs

    # raised S: (S_X Y)^C = g^{CZ} S_{XYZ}
    s_up = raise_lower(hs.S, 2, hs.metric)

    brackets = {}
    zero = scalar_zero(tag)
    # m x m
    for a in range(d):
        for b in range(a + 1, d):
            row = {}
            for c in range(d):
                v = s_up[a, b, c] - s_up[b, a, c]
                if v != 0:
                    row[c] = v
            op = curv.operator(a, b)
            neg_op = [[-x for x in rrow] for rrow in op]
            for p, coeff in enumerate(expand(neg_op, (m_labels[a], m_labels[b]))):
                if coeff != 0:
                    row[d + p] = coeff
            if row:
                brackets[(a, b)] = row
    # h x m: [A, X] = A X
    for p, m in enumerate(curv.h_basis):
        for b in range(d):
            row = {}
            for c in range(d):
                if m[c][b] != 0:
                    row[c] = -m[c][b]  # stored as [X, A] = -A X with X first
            if row:
                brackets[(b, d + p)] = row
    # h x h: matrix commutators
    for p in range(k):
        for q in range(p + 1, k):
            mp, mq = curv.h_basis[p], curv.h_basis[q]
            comm = [
                [
                    sum((mp[i][l] * mq[l][j] - mq[i][l] * mp[l][j] for l in range(d)), zero)
                    for j in range(d)
                ]
                for i in range(d)
            ]
            try:
                coeffs = expand(comm, (h_labels[p], h_labels[q]))
            except SpanError:
                raise SpanError("h_basis not closed under commutators", (h_labels[p], h_labels[q]))
            row = {d + r: c for r, c in enumerate(coeffs) if c != 0}
            if row:
                brackets[(d + p, d + q)] = row
    algebra = LieAlgebra.from_brackets(
        n_total, brackets, labels=list(m_labels) + list(h_labels), tag=tag
    )
    _, residual = jacobi_residual(algebra)
    return algebra, residual
