"""Singular homogeneous plane waves as an explicit chart geometry.

Chart coordinates are ordered (z, s, x^1..x^n), D = n + 2.  The metric
is built from the coframe

    e^+ = dz,   e^- = ds + (Q + s) dz,   e^i = dx^i,

with wave profile Q = x^T M(z) x and M(z) = exp(zF) H exp(-zF).  The
frame metric pairs the two null legs to 1 and keeps the transverse legs
orthonormal, so g_zz = 2(Q + s), g_zs = 1, g_ij = delta_ij.

Every z-derivative is routed through the closed-form profile jet
M' = [F, M], M'' = [F, [F, M]], M''' = [F, [F, [F, M]]]; finite
differencing exists only as a test oracle.  The curvature sign
convention is fixed once:

    R^rho_{sigma mu nu} = d_mu Gamma^rho_{nu sigma}
                        - d_nu Gamma^rho_{mu sigma}
                        + Gamma^rho_{mu lam} Gamma^lam_{nu sigma}
                        - Gamma^rho_{nu lam} Gamma^lam_{mu sigma}.

The float path (numpy) serves the residual sweeps; a separate exact
rational path evaluates the same connection data at chart points with
z = 0, where the profile jet is rational, for bracket-table
reconstruction tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import EXACT, FLOAT, mat_commutator, mat_inverse
from .hom_structure import CurvatureAtPoint, HomogeneousStructure
from .lie_algebra import LieAlgebra
from .tensor_core import DOWN, UP, FrameMetric, Tensor


@dataclass(frozen=True)
class PlaneWaveData:
    """Transverse dimension n, antisymmetric F and symmetric H (exact)."""

    n: int
    F: tuple
    H: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("transverse dimension must be at least 1")
        F = tuple(tuple(Fraction(x) for x in row) for row in self.F)
        H = tuple(tuple(Fraction(x) for x in row) for row in self.H)
        if len(F) != self.n or any(len(r) != self.n for r in F):
            raise ValueError("F must be n x n")
        if len(H) != self.n or any(len(r) != self.n for r in H):
            raise ValueError("H must be n x n")
        for i in range(self.n):
            for j in range(self.n):
                if F[i][j] != -F[j][i]:
                    raise ValueError("F must be antisymmetric")
                if H[i][j] != H[j][i]:
                    raise ValueError("H must be symmetric")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "H", H)

    @property
    def dim(self):
        return self.n + 2

    def to_json(self):
        return {
            "n": self.n,
            "F": [[str(x) for x in row] for row in self.F],
            "H": [[str(x) for x in row] for row in self.H],
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            data["n"],
            tuple(tuple(Fraction(x) for x in row) for row in data["F"]),
            tuple(tuple(Fraction(x) for x in row) for row in data["H"]),
        )


@dataclass(frozen=True)
class ChartPoint:
    z: float
    s: float
    x: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        for v in (self.z, self.s, *self.x):
            if not np.isfinite(v):
                raise ValueError("chart point must be finite")


def sample_points(n, count, seed, low=-2.0, high=2.0):
    """Seeded chart points with every coordinate drawn from [low, high]."""
    rng = random.Random(seed)
    return [
        ChartPoint(rng.uniform(low, high), rng.uniform(low, high),
                   tuple(rng.uniform(low, high) for _ in range(n)))
        for _ in range(count)
    ]


# ---------------------------------------------------------------------------
# matrix exponential and profile jet
# ---------------------------------------------------------------------------


def expm(a, tol=1e-16):
    """Scaling-and-squaring truncated Taylor exponential.

    Adequate for the bounded antisymmetric arguments used here (n <= 8,
    coordinates at desk scale); the Taylor tail is run to float
    round-off after scaling the 1-norm below 1/2.
    """
    a = np.asarray(a, dtype=float)
    norm = np.linalg.norm(a, 1)
    squarings = 0
    if norm > 0.5:
        squarings = int(np.ceil(np.log2(norm / 0.5)))
        a = a / (2.0 ** squarings)
    result = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for k in range(1, 40):
        term = term @ a / k
        result = result + term
        if np.linalg.norm(term, 1) <= tol * np.linalg.norm(result, 1):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def profile_jet(pw, z):
    """M(z) and its first three z-derivatives as float arrays.

    The profile is conjugated by exp(-zF): with this orientation the
    constant frame table of the structure tensor (F in the transverse
    blocks, see frame_structure) is parallel for the connection built
    below, and the reconstructed bracket table comes out with the F
    signs used by pw_isometry_algebra.  Flipping the sign of F flips
    the orientation, so the family of geometries is unchanged.
    """
    f = np.array([[float(v) for v in row] for row in pw.F])
    h = np.array([[float(v) for v in row] for row in pw.H])
    e = expm(-z * f)
    m0 = e @ h @ e.T  # exp(zF) = exp(-zF)^T for antisymmetric F
    m1 = m0 @ f - f @ m0
    m2 = m1 @ f - f @ m1
    m3 = m2 @ f - f @ m2
    return m0, m1, m2, m3


# ---------------------------------------------------------------------------
# metric jet and connection (float path)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeometryJet:
    """Metric and its first three coordinate derivative arrays at a point."""

    g: np.ndarray
    g_inv: np.ndarray
    dg: np.ndarray      # dg[k, m, n] = d_k g_{mn}
    ddg: np.ndarray     # ddg[k, l, m, n]
    dddg: np.ndarray    # dddg[k, l, p, m, n]


def metric_jet(pw, pt):
    n, d = pw.n, pw.dim
    m0, m1, m2, m3 = profile_jet(pw, pt.z)
    x = np.array(pt.x)
    q = x @ m0 @ x

    g = np.zeros((d, d))
    g[0, 0] = 2.0 * (q + pt.s)
    g[0, 1] = g[1, 0] = 1.0
    for i in range(n):
        g[2 + i, 2 + i] = 1.0

    dg = np.zeros((d, d, d))
    dg[0, 0, 0] = 2.0 * (x @ m1 @ x)
    dg[1, 0, 0] = 2.0
    for k in range(n):
        dg[2 + k, 0, 0] = 4.0 * (m0 @ x)[k]

    ddg = np.zeros((d, d, d, d))
    ddg[0, 0, 0, 0] = 2.0 * (x @ m2 @ x)
    for k in range(n):
        v = 4.0 * (m1 @ x)[k]
        ddg[0, 2 + k, 0, 0] = ddg[2 + k, 0, 0, 0] = v
        for l in range(n):
            ddg[2 + k, 2 + l, 0, 0] = 4.0 * m0[k, l]

    dddg = np.zeros((d, d, d, d, d))
    dddg[0, 0, 0, 0, 0] = 2.0 * (x @ m3 @ x)
    for k in range(n):
        v = 4.0 * (m2 @ x)[k]
        dddg[0, 0, 2 + k, 0, 0] = dddg[0, 2 + k, 0, 0, 0] = dddg[2 + k, 0, 0, 0, 0] = v
        for l in range(n):
            w = 4.0 * m1[k, l]
            dddg[0, 2 + k, 2 + l, 0, 0] = w
            dddg[2 + k, 0, 2 + l, 0, 0] = w
            dddg[2 + k, 2 + l, 0, 0, 0] = w

    g_inv = np.linalg.inv(g)
    return GeometryJet(g, g_inv, dg, ddg, dddg)


def _gamma_lower(dg):
    d = dg.shape[0]
    low = np.zeros((d, d, d))
    for m in range(d):
        for n in range(d):
            for s in range(d):
                # Gamma_{mn,s} = (d_m g_{ns} + d_n g_{ms} - d_s g_{mn}) / 2
                low[m, n, s] = 0.5 * (dg[m, n, s] + dg[n, m, s] - dg[s, m, n])
    return low


def christoffel(jet):
    """Levi-Civita symbols Gamma[r, m, n] = Gamma^r_{mn}."""
    return np.einsum("rs,mns->rmn", jet.g_inv, _gamma_lower(jet.dg))


def connection_jet(jet):
    """Gamma, its first and its second coordinate derivatives."""
    ginv, dg, ddg, dddg = jet.g_inv, jet.dg, jet.ddg, jet.dddg
    d = dg.shape[0]

    low = _gamma_lower(dg)
    gamma = np.einsum("rs,mns->rmn", ginv, low)

    dginv = -np.einsum("ra,kab,bs->krs", ginv, dg, ginv)
    dlow = np.zeros((d, d, d, d))
    for k in range(d):
        for m in range(d):
            for n in range(d):
                for s in range(d):
                    dlow[k, m, n, s] = 0.5 * (ddg[k, m, n, s] + ddg[k, n, m, s] - ddg[k, s, m, n])
    dgamma = np.einsum("krs,mns->krmn", dginv, low) + np.einsum("rs,kmns->krmn", ginv, dlow)

    ddginv = (
        -np.einsum("kra,lab,bs->klrs", dginv, dg, ginv)
        - np.einsum("ra,klab,bs->klrs", ginv, ddg, ginv)
        - np.einsum("ra,lab,kbs->klrs", ginv, dg, dginv)
    )
    ddlow = np.zeros((d, d, d, d, d))
    for k in range(d):
        for l in range(d):
            for m in range(d):
                for n in range(d):
                    for s in range(d):
                        ddlow[k, l, m, n, s] = 0.5 * (
                            dddg[k, l, m, n, s] + dddg[k, l, n, m, s] - dddg[k, l, s, m, n]
                        )
    ddgamma = (
        np.einsum("klrs,mns->klrmn", ddginv, low)
        + np.einsum("krs,lmns->klrmn", dginv, dlow)
        + np.einsum("lrs,kmns->klrmn", dginv, dlow)
        + np.einsum("rs,klmns->klrmn", ginv, ddlow)
    )
    return gamma, dgamma, ddgamma


def _riemann_from_connection(gamma, dgamma):
    # R[r, s, m, n] = d_m G^r_{ns} - d_n G^r_{ms} + G^r_{ml} G^l_{ns} - G^r_{nl} G^l_{ms}
    term = np.einsum("rml,lns->rsmn", gamma, gamma)
    return (
        dgamma.transpose(1, 3, 0, 2) - dgamma.transpose(1, 3, 2, 0)
        + term - term.transpose(0, 1, 3, 2)
    )


def riemann(pw, pt):
    """Mixed Riemann tensor R[r, s, m, n] = R^r_{smn} at a chart point."""
    jet = metric_jet(pw, pt)
    gamma, dgamma, _ = connection_jet(jet)
    return _riemann_from_connection(gamma, dgamma)


def riemann_lower(pw, pt):
    jet = metric_jet(pw, pt)
    gamma, dgamma, _ = connection_jet(jet)
    mixed = _riemann_from_connection(gamma, dgamma)
    return np.einsum("rl,lsmn->rsmn", jet.g, mixed)


# ---------------------------------------------------------------------------
# the homogeneous structure, in frame and in coordinates
# ---------------------------------------------------------------------------


def frame_metric(n, tag=EXACT):
    return FrameMetric.light_cone(n, tag)


def frame_structure(pw, tag=EXACT):
    """The constant frame components of S, as an exact structure.

    Nonzero values (frame order +, -, 1..n, antisymmetry in the last
    two slots implied): S_{++-} = -1, S_{+ij} = F_ij,
    S_{i+j} = -delta_ij - F_ij.
    """
    n = pw.n
    entries = {(0, 0, 1): Fraction(-1), (0, 1, 0): Fraction(1)}
    for i in range(n):
        for j in range(n):
            if pw.F[i][j] != 0:
                entries[(0, 2 + i, 2 + j)] = pw.F[i][j]
            v = -Fraction(int(i == j)) - pw.F[i][j]
            if v != 0:
                entries[(2 + i, 0, 2 + j)] = v
                entries[(2 + i, 2 + j, 0)] = -v
    s = Tensor.from_entries(pw.dim, (DOWN, DOWN, DOWN), entries, EXACT)
    metric = frame_metric(n, EXACT)
    if tag == EXACT:
        return HomogeneousStructure(metric, s)
    sf = Tensor(pw.dim, (DOWN, DOWN, DOWN), tuple(float(c) for c in s.components), FLOAT)
    return HomogeneousStructure(FrameMetric.from_matrix([[float(v) for v in row] for row in metric.g]), sf)


def coframe_at(pw, pt):
    """Coframe rows E[A, mu] and their derivatives dE[k, A, mu]."""
    n, d = pw.n, pw.dim
    m0, m1, _, _ = profile_jet(pw, pt.z)
    x = np.array(pt.x)
    q = x @ m0 @ x
    e = np.zeros((d, d))
    e[0, 0] = 1.0
    e[1, 0] = q + pt.s
    e[1, 1] = 1.0
    for i in range(n):
        e[2 + i, 2 + i] = 1.0
    de = np.zeros((d, d, d))
    de[0, 1, 0] = x @ m1 @ x
    de[1, 1, 0] = 1.0
    for k in range(n):
        de[2 + k, 1, 0] = 2.0 * (m0 @ x)[k]
    return e, de


def _coordinate_structure(pw, pt):
    """Coordinate S_{mns}, its derivative, and the coframe used."""
    d = pw.dim
    hs = frame_structure(pw)
    sf = np.zeros((d, d, d))
    for idx in hs.S.indices():
        v = hs.S[idx]
        if v != 0:
            sf[idx] = float(v)
    e, de = coframe_at(pw, pt)
    s_coord = np.einsum("abc,am,bn,cs->mns", sf, e, e, e)
    ds_coord = (
        np.einsum("abc,kam,bn,cs->kmns", sf, de, e, e)
        + np.einsum("abc,am,kbn,cs->kmns", sf, e, de, e)
        + np.einsum("abc,am,bn,kcs->kmns", sf, e, e, de)
    )
    return s_coord, ds_coord, e


def structure_at(pw, pt):
    """Coordinate-component structure at a point plus the coframe matrix."""
    jet = metric_jet(pw, pt)
    s_coord, _, e = _coordinate_structure(pw, pt)
    metric = FrameMetric.from_matrix([[jet.g[i, j] for j in range(pw.dim)] for i in range(pw.dim)])
    s = Tensor(pw.dim, (DOWN, DOWN, DOWN), tuple(s_coord.reshape(-1).tolist()), FLOAT)
    return HomogeneousStructure(metric, s), e


# ---------------------------------------------------------------------------
# parallelism residuals for the metric connection with torsion
# ---------------------------------------------------------------------------


def _point_residuals(pw, pt, sf_array):
    d = pw.dim
    jet = metric_jet(pw, pt)
    gamma, dgamma, ddgamma = connection_jet(jet)

    e, de = coframe_at(pw, pt)
    s_coord = np.einsum("abc,am,bn,cs->mns", sf_array, e, e, e)
    ds_coord = (
        np.einsum("abc,kam,bn,cs->kmns", sf_array, de, e, e)
        + np.einsum("abc,am,kbn,cs->kmns", sf_array, e, de, e)
        + np.einsum("abc,am,bn,kcs->kmns", sf_array, e, e, de)
    )

    ginv, dg = jet.g_inv, jet.dg
    dginv = -np.einsum("ra,kab,bs->krs", ginv, dg, ginv)
    s_up = np.einsum("mns,rs->mnr", s_coord, ginv)
    ds_up = np.einsum("kmns,rs->kmnr", ds_coord, ginv) + np.einsum("mns,krs->kmnr", s_coord, dginv)

    gbar = gamma - s_up.transpose(2, 0, 1)
    dgbar = dgamma - ds_up.transpose(0, 3, 1, 2)

    # metric parallelism
    nabla_g = jet.dg - np.einsum("lkm,ln->kmn", gbar, jet.g) - np.einsum("lkn,ml->kmn", gbar, jet.g)
    r_g = float(np.max(np.abs(nabla_g)))

    # torsion-tensor parallelism
    nabla_s = (
        ds_coord
        - np.einsum("lkm,lns->kmns", gbar, s_coord)
        - np.einsum("lkn,mls->kmns", gbar, s_coord)
        - np.einsum("lks,mnl->kmns", gbar, s_coord)
    )
    r_s = float(np.max(np.abs(nabla_s)))

    # curvature parallelism, on the all-lower Levi-Civita Riemann tensor
    mixed = _riemann_from_connection(gamma, dgamma)
    dmixed = (
        ddgamma.transpose(0, 2, 4, 1, 3) - ddgamma.transpose(0, 2, 4, 3, 1)
        + np.einsum("krml,lns->krsmn", dgamma, gamma)
        + np.einsum("rml,klns->krsmn", gamma, dgamma)
        - np.einsum("krnl,lms->krsmn", dgamma, gamma)
        - np.einsum("rnl,klms->krsmn", gamma, dgamma)
    )
    r_low = np.einsum("rl,lsmn->rsmn", jet.g, mixed)
    dr_low = np.einsum("krl,lsmn->krsmn", jet.dg, mixed) + np.einsum("rl,klsmn->krsmn", jet.g, dmixed)
    nabla_r = (
        dr_low
        - np.einsum("lkr,lsmn->krsmn", gbar, r_low)
        - np.einsum("lks,rlmn->krsmn", gbar, r_low)
        - np.einsum("lkm,rsln->krsmn", gbar, r_low)
        - np.einsum("lkn,rsml->krsmn", gbar, r_low)
    )
    r_r = float(np.max(np.abs(nabla_r)))

    # geodesic residual for xi = d/ds (coordinate index 1)
    r_geo = float(np.max(np.abs(gamma[:, 1, 1])))
    return {"r_g": r_g, "r_S": r_s, "r_R": r_r, "r_geo": r_geo}


def as_residuals(pw, pts, frame_s_override=None):
    """Max parallelism residuals of the metric connection nabla - S.

    Returns {r_g, r_S, r_R, r_geo}: metric, structure-tensor and
    curvature parallelism plus the geodesic defect of the null
    direction, maximized over the given chart points.
    """
    if not pts:
        raise ValueError("at least one chart point is required")
    d = pw.dim
    if frame_s_override is None:
        hs = frame_structure(pw)
        source = hs.S
    else:
        source = frame_s_override
    sf = np.zeros((d, d, d))
    for idx in source.indices():
        v = source[idx]
        if v != 0:
            sf[idx] = float(v)
    worst = {"r_g": 0.0, "r_S": 0.0, "r_R": 0.0, "r_geo": 0.0}
    for pt in pts:
        res = _point_residuals(pw, pt, sf)
        for key in worst:
            worst[key] = max(worst[key], res[key])
    return worst


# ---------------------------------------------------------------------------
# exact connection data at z = 0 and the bracket-table reconstruction
# ---------------------------------------------------------------------------


def _exact_profile_jet(pw):
    # profile derivatives at z = 0, same orientation as profile_jet
    f = [list(row) for row in pw.F]
    m0 = [list(row) for row in pw.H]
    m1 = mat_commutator(m0, f)
    m2 = mat_commutator(m1, f)
    return m0, m1, m2


def exact_curvature(pw, s, x):
    """Frame components of the curvature of nabla - S at (z=0, s, x).

    Returns a CurvatureAtPoint whose operator tensor follows the sign
    convention fixed at the top of this module, together with the
    null-boost action matrices spanning the reachable isotropy.
    All arithmetic is rational, so the result is exact.
    """
    n, d = pw.n, pw.dim
    s = Fraction(s)
    x = [Fraction(v) for v in x]
    if len(x) != n:
        raise ValueError("x must have n components")
    m0, m1, m2 = _exact_profile_jet(pw)

    def quad(m):
        return sum(x[i] * m[i][j] * x[j] for i in range(n) for j in range(n))

    def mv(m):
        return [sum(m[i][j] * x[j] for j in range(n)) for i in range(n)]

    q = quad(m0)
    zero = Fraction(0)

    g = [[zero] * d for _ in range(d)]
    g[0][0] = 2 * (q + s)
    g[0][1] = g[1][0] = Fraction(1)
    for i in range(n):
        g[2 + i][2 + i] = Fraction(1)
    ginv = mat_inverse(g, EXACT)

    dg = [[[zero] * d for _ in range(d)] for _ in range(d)]
    dg[0][0][0] = 2 * quad(m1)
    dg[1][0][0] = Fraction(2)
    v0 = mv(m0)
    for k in range(n):
        dg[2 + k][0][0] = 4 * v0[k]

    ddg = [[[[zero] * d for _ in range(d)] for _ in range(d)] for _ in range(d)]
    ddg[0][0][0][0] = 2 * quad(m2)
    v1 = mv(m1)
    for k in range(n):
        ddg[0][2 + k][0][0] = ddg[2 + k][0][0][0] = 4 * v1[k]
        for l in range(n):
            ddg[2 + k][2 + l][0][0] = 4 * m0[k][l]

    def gamma_low(dgm):
        out = [[[zero] * d for _ in range(d)] for _ in range(d)]
        for m in range(d):
            for nn in range(d):
                for t in range(d):
                    out[m][nn][t] = (dgm[m][nn][t] + dgm[nn][m][t] - dgm[t][m][nn]) / 2
        return out

    low = gamma_low(dg)
    gamma = [[[sum(ginv[r][t] * low[m][nn][t] for t in range(d)) for nn in range(d)] for m in range(d)] for r in range(d)]

    dginv = [
        [
            [
                -sum(ginv[r][a] * dg[k][a][b] * ginv[b][t] for a in range(d) for b in range(d))
                for t in range(d)
            ]
            for r in range(d)
        ]
        for k in range(d)
    ]
    dlow = [
        [
            [
                [(ddg[k][m][nn][t] + ddg[k][nn][m][t] - ddg[k][t][m][nn]) / 2 for t in range(d)]
                for nn in range(d)
            ]
            for m in range(d)
        ]
        for k in range(d)
    ]
    dgamma = [
        [
            [
                [
                    sum(dginv[k][r][t] * low[m][nn][t] + ginv[r][t] * dlow[k][m][nn][t] for t in range(d))
                    for nn in range(d)
                ]
                for m in range(d)
            ]
            for r in range(d)
        ]
        for k in range(d)
    ]

    # coordinate structure tensor and its derivative
    hs = frame_structure(pw)
    e = [[zero] * d for _ in range(d)]
    e[0][0] = Fraction(1)
    e[1][0] = q + s
    e[1][1] = Fraction(1)
    for i in range(n):
        e[2 + i][2 + i] = Fraction(1)
    de = [[[zero] * d for _ in range(d)] for _ in range(d)]
    de[0][1][0] = quad(m1)
    de[1][1][0] = Fraction(1)
    for k in range(n):
        de[2 + k][1][0] = 2 * v0[k]

    s_entries = [(idx, hs.S[idx]) for idx in hs.S.indices() if hs.S[idx] != 0]
    s_coord = [[[zero] * d for _ in range(d)] for _ in range(d)]
    ds_coord = [[[[zero] * d for _ in range(d)] for _ in range(d)] for _ in range(d)]
    for (a, b, c), v in s_entries:
        for m in range(d):
            if e[a][m] == 0 and all(de[k][a][m] == 0 for k in range(d)):
                continue
            for nn in range(d):
                for t in range(d):
                    s_coord[m][nn][t] += v * e[a][m] * e[b][nn] * e[c][t]
                    for k in range(d):
                        ds_coord[k][m][nn][t] += v * (
                            de[k][a][m] * e[b][nn] * e[c][t]
                            + e[a][m] * de[k][b][nn] * e[c][t]
                            + e[a][m] * e[b][nn] * de[k][c][t]
                        )

    s_up = [
        [[sum(s_coord[m][nn][t] * ginv[r][t] for t in range(d)) for r in range(d)] for nn in range(d)]
        for m in range(d)
    ]
    ds_up = [
        [
            [
                [
                    sum(
                        ds_coord[k][m][nn][t] * ginv[r][t] + s_coord[m][nn][t] * dginv[k][r][t]
                        for t in range(d)
                    )
                    for r in range(d)
                ]
                for nn in range(d)
            ]
            for m in range(d)
        ]
        for k in range(d)
    ]

    gbar = [
        [[gamma[r][m][nn] - s_up[m][nn][r] for nn in range(d)] for m in range(d)]
        for r in range(d)
    ]
    dgbar = [
        [
            [[dgamma[k][r][m][nn] - ds_up[k][m][nn][r] for nn in range(d)] for m in range(d)]
            for r in range(d)
        ]
        for k in range(d)
    ]

    # curvature of the connection with torsion
    rbar = [[[[zero] * d for _ in range(d)] for _ in range(d)] for _ in range(d)]
    for r in range(d):
        for t in range(d):
            for m in range(d):
                for nn in range(d):
                    val = dgbar[m][r][nn][t] - dgbar[nn][r][m][t]
                    for l in range(d):
                        val += gbar[r][m][l] * gbar[l][nn][t] - gbar[r][nn][l] * gbar[l][m][t]
                    rbar[r][t][m][nn] = val

    # convert to frame components: form slots from frame vectors, the
    # endomorphism conjugated by the coframe
    theta = mat_inverse(e, EXACT)  # theta[mu][A]: frame vectors as columns
    entries = {}
    for a in range(d):
        for b in range(d):
            for cc in range(d):
                for dd in range(d):
                    val = zero
                    for r in range(d):
                        for t in range(d):
                            if e[cc][r] == 0:
                                continue
                            for m in range(d):
                                if theta[m][a] == 0:
                                    continue
                                for nn in range(d):
                                    val += (
                                        e[cc][r]
                                        * rbar[r][t][m][nn]
                                        * theta[t][dd]
                                        * theta[m][a]
                                        * theta[nn][b]
                                    )
                    if val != 0:
                        entries[(a, b, cc, dd)] = val
    rbar_frame = Tensor.from_entries(d, (DOWN, DOWN, UP, DOWN), entries, EXACT)
    metric = frame_metric(n, EXACT)
    boosts = null_boost_basis(n)
    return CurvatureAtPoint(rbar_frame, boosts, metric)


def null_boost_basis(n):
    """Frame action matrices of the n null boosts.

    Boost j sends E_+ to -E_j and E_j to E_-; rotations never enter the
    reachable isotropy of this geometry.
    """
    d = n + 2
    out = []
    for j in range(n):
        m = [[Fraction(0)] * d for _ in range(d)]
        m[2 + j][0] = Fraction(-1)
        m[1][2 + j] = Fraction(1)
        out.append(tuple(tuple(row) for row in m))
    return tuple(out)


# ---------------------------------------------------------------------------
# the isometry bracket table
# ---------------------------------------------------------------------------


def boost_block(pw):
    """Null-boost coefficient matrix of [U, X_i]: 2H - F - F^2.

    H is the chart profile at z = 0.  The F^2 term is the centrifugal
    shift between the chart profile and the stationary-form profile of
    the same wave; it vanishes with F, where the two parametrizations
    agree.  With this block the bracket table below is exactly the
    algebra reconstructed from (S, curvature) of the chart geometry.
    """
    n = pw.n
    f2 = [
        [sum(pw.F[i][k] * pw.F[k][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]
    return [
        [2 * pw.H[i][j] - pw.F[i][j] - f2[i][j] for j in range(n)]
        for i in range(n)
    ]


def pw_isometry_algebra(pw):
    """Exact bracket table on (U, V, X_i, Xb_i), dimension 2n + 2.

    [U,V] = V, [U,Xb_i] = X_i, [X_i,X_j] = 2F_ij V,
    [X_i,Xb_j] = -delta_ij V,
    [U,X_i] = (2H - F - F^2)_ij Xb_j + (delta + 2F)_ij X_j.
    """
    n = pw.n
    labels = ["U", "V"] + [f"X{i+1}" for i in range(n)] + [f"Xb{i+1}" for i in range(n)]
    bb = boost_block(pw)
    brackets = {(0, 1): {1: Fraction(1)}}
    for i in range(n):
        row = {}
        for j in range(n):
            zc = Fraction(int(i == j)) + 2 * pw.F[i][j]
            if zc != 0:
                row[2 + j] = zc
            if bb[i][j] != 0:
                row[2 + n + j] = bb[i][j]
        if row:
            brackets[(0, 2 + i)] = row
        brackets[(0, 2 + n + i)] = {2 + i: Fraction(1)}
        brackets[(2 + i, 2 + n + i)] = {1: Fraction(-1)}
        for j in range(i + 1, n):
            if pw.F[i][j] != 0:
                brackets[(2 + i, 2 + j)] = {1: 2 * pw.F[i][j]}
    return LieAlgebra.from_brackets(2 * n + 2, brackets, labels=labels, tag=EXACT)
