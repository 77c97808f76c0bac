"""Constructors for the concrete cones used throughout the suite.

Everything here is desk scale on purpose: symbolic determinants stop at
4x4 matrices (24 Leibniz terms), and the flags each constructor sets
(`rog_flag`, `minimality_assumed`) record documented facts about these
specific instances, not computed certificates.

svec convention: a symmetric matrix maps to its diagonal entries followed
by the off-diagonal entries (i < j, row-major), stored raw with no sqrt(2)
scaling, which keeps determinant coefficients rational.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from . import exactlin
from .cones import DerivedCone, HyperCone, contains_by_inequalities
from .poly import HomoPoly, as_fraction, as_vector
from .report import Membership


@dataclass(frozen=True)
class GalleryDescriptor:
    kind: str  # Orthant | OrthantDeriv | PSD | PSDDeriv | SOC | L1 | Spectrahedral
    params: dict = field(default_factory=dict)
    face_descriptor_support: bool = False


# ---------------------------------------------------------------------------
# Polynomial builders
# ---------------------------------------------------------------------------


def elementary_symmetric(nvars: int, degree: int) -> HomoPoly:
    """Sum of all squarefree monomials of the given degree."""
    if not 0 <= degree <= nvars:
        raise ValueError("elementary symmetric degree out of range")
    terms = {}
    for picks in itertools.combinations(range(nvars), degree):
        exp = tuple(1 if i in picks else 0 for i in range(nvars))
        terms[exp] = Fraction(1)
    return HomoPoly(nvars, degree, terms)


def product_of_linear_forms(rows) -> HomoPoly:
    forms = [HomoPoly.linear_form(r) for r in rows]
    out = forms[0]
    for f in forms[1:]:
        out = out * f
    return out


# ---------------------------------------------------------------------------
# svec coordinates
# ---------------------------------------------------------------------------


def svec_dim(n: int) -> int:
    return n * (n + 1) // 2


def svec_index(i: int, j: int, n: int) -> int:
    """Coordinate index of entry (i, j): diagonal first, then i < j row-major."""
    if i == j:
        return i
    if i > j:
        i, j = j, i
    off = n
    for r in range(i):
        off += n - 1 - r
    return off + (j - i - 1)


def svec(matrix) -> tuple[Fraction, ...]:
    rows = exactlin.as_matrix(matrix)
    n = len(rows)
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise ValueError("matrix is not symmetric")
    out = [rows[i][i] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            out.append(rows[i][j])
    return tuple(out)


def smat(vec, n: int):
    vec = as_vector(vec)
    if len(vec) != svec_dim(n):
        raise ValueError("vector has wrong svec dimension")
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = vec[i]
    pos = n
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = vec[pos]
            pos += 1
    return tuple(tuple(r) for r in rows)


def smat_float(vec: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((n, n))
    v = np.asarray(vec, dtype=float)
    for i in range(n):
        out[i, i] = v[i]
    pos = n
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = v[pos]
            pos += 1
    return out


def svec_float(mat: np.ndarray) -> np.ndarray:
    n = mat.shape[0]
    out = np.empty(svec_dim(n))
    for i in range(n):
        out[i] = mat[i, i]
    pos = n
    for i in range(n):
        for j in range(i + 1, n):
            out[pos] = mat[i, j]
            pos += 1
    return out


SYMBOLIC_DET_CAP = 4


def _det_poly_from_entries(entry_vars, n: int) -> HomoPoly:
    """Leibniz expansion where entry (i, j) is a degree-1 polynomial."""
    total = None
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        prod = entry_vars[0][perm[0]]
        for i in range(1, n):
            prod = prod * entry_vars[i][perm[i]]
        prod = prod * sign
        total = prod if total is None else total + prod
    return total


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def symmetric_det_poly(n: int) -> HomoPoly:
    """det of a symmetric n x n matrix as a polynomial in svec coordinates."""
    if not 1 <= n <= SYMBOLIC_DET_CAP:
        raise ValueError(f"symbolic determinant capped at n = {SYMBOLIC_DET_CAP}")
    N = svec_dim(n)
    entries = [
        [HomoPoly.variable(svec_index(i, j, n), N) for j in range(n)] for i in range(n)
    ]
    return _det_poly_from_entries(entries, n)


# ---------------------------------------------------------------------------
# Gallery constructors
# ---------------------------------------------------------------------------


def orthant(n: int) -> HyperCone:
    """Product of the coordinates along the all-ones direction."""
    if n < 1:
        raise ValueError("need n >= 1")
    p = HomoPoly(n, n, {(1,) * n: Fraction(1)})
    return HyperCone(
        p,
        (1,) * n,
        label=f"orthant:{n}",
        minimality_assumed=True,
        rog_flag=True,
        gallery=GalleryDescriptor("Orthant", {"n": n}, face_descriptor_support=True),
    )


def orthant_deriv(n: int, k: int) -> DerivedCone:
    """k-th relaxation of the coordinate cone; generator is k! * e_{n-k}."""
    if not 1 <= k <= n - 1:
        raise ValueError(f"relaxation order {k} outside 1..{n - 1}")
    dc = orthant(n).derivative_cone(k)
    expected = factorial(k) * elementary_symmetric(n, n - k)
    if dc.p_k != expected:
        raise AssertionError("derivative polynomial differs from k! * e_{n-k}")
    return dc


def psd(n: int) -> HyperCone:
    """Symmetric PSD matrices in svec coordinates, determinant polynomial."""
    if not 1 <= n <= SYMBOLIC_DET_CAP:
        raise ValueError(f"symbolic determinant capped at n = {SYMBOLIC_DET_CAP}")
    p = symmetric_det_poly(n)
    e = svec(exactlin.identity(n))
    return HyperCone(
        p,
        e,
        label=f"psd:{n}",
        minimality_assumed=True,
        rog_flag=True,
        gallery=GalleryDescriptor("PSD", {"n": n}, face_descriptor_support=True),
    )


def psd_deriv_member(n: int, k: int, X, tol: float = 1e-8) -> Membership:
    """Relaxation membership for a symmetric matrix via its eigenvalues.

    Works for any n: the matrix goes through a symmetric eigensolver and
    the eigenvalue vector through the derivative-sign description of the
    k-th orthant relaxation.  Values that sit in the tolerance band but on
    the nonnegative side count as In (closed membership); only sign-
    ambiguous values report Boundary-ambiguous.
    """
    mat = np.asarray(X, dtype=float)
    if mat.shape != (n, n):
        raise ValueError("matrix has wrong shape")
    if not np.allclose(mat, mat.T, atol=1e-12 * max(1.0, np.abs(mat).max())):
        raise ValueError("matrix is not symmetric")
    lam = np.linalg.eigvalsh(mat)
    base = orthant(n)
    verdict = contains_by_inequalities(base, k, lam, tol)
    if verdict is Membership.BOUNDARY:
        values = [float(base.derivs[i].eval_float(lam)) for i in range(k, n)]
        if all(v >= 0.0 for v in values):
            return Membership.IN
    return verdict


def soc(n: int) -> HyperCone:
    """Second-order cone in R^n: x0 >= sqrt(x1^2 + ... + x_{n-1}^2)."""
    if n < 2:
        raise ValueError("need ambient dimension >= 2")
    terms = {tuple(2 if i == 0 else 0 for i in range(n)): Fraction(1)}
    for j in range(1, n):
        terms[tuple(2 if i == j else 0 for i in range(n))] = Fraction(-1)
    p = HomoPoly(n, 2, terms)
    e = tuple(Fraction(1 if i == 0 else 0) for i in range(n))
    return HyperCone(
        p,
        e,
        label=f"soc:{n}",
        minimality_assumed=True,
        rog_flag=True,
        gallery=GalleryDescriptor("SOC", {"n": n}),
    )


def l1_cone() -> HyperCone:
    """x3 >= |x1| + |x2| as the product of four linear forms.

    Not rank-one generated: every extreme ray has rank two.  The first
    relaxation equals soc(3) as a set under (x1, x2, x3) -> (x3, x1, x2);
    the derivative polynomial keeps a redundant x3 factor, so it is not of
    minimal degree.
    """
    rows = [
        (1, 1, 1),
        (1, -1, 1),
        (-1, 1, 1),
        (-1, -1, 1),
    ]
    p = product_of_linear_forms(rows)
    return HyperCone(
        p,
        (0, 0, 1),
        label="l1",
        minimality_assumed=True,
        rog_flag=False,
        gallery=GalleryDescriptor("L1", {}),
    )


L1_TO_SOC3 = ((0, 0, 1), (1, 0, 0), (0, 1, 0))  # (x1,x2,x3) -> (x3,x1,x2)


def spectrahedral(
    matrices,
    xbar,
    label: str = "spectrahedral",
    minimality_assumed: bool = False,
    rog_flag: bool = False,
) -> HyperCone:
    """Cone of points x with sum_i x_i A_i positive semidefinite.

    The matrices must be symmetric, at most 4x4, linearly independent, and
    the slice at xbar must be positive definite (checked exactly through
    leading principal minors).  The hyperbolic rank of a point equals the
    matrix rank of its slice, which the suite exercises as a pairing.
    """
    mats = [exactlin.as_matrix(m) for m in matrices]
    if not mats:
        raise ValueError("need at least one matrix")
    n = len(mats[0])
    if n > SYMBOLIC_DET_CAP:
        raise ValueError(f"matrix size capped at {SYMBOLIC_DET_CAP}")
    for m in mats:
        if len(m) != n or any(len(r) != n for r in m):
            raise ValueError("matrices must share one square shape")
        for i in range(n):
            for j in range(i + 1, n):
                if m[i][j] != m[j][i]:
                    raise ValueError("matrices must be symmetric")
    rows = [svec(m) for m in mats]
    if exactlin.rank(rows) != len(mats):
        raise ValueError("matrices are linearly dependent")
    xbar = as_vector(xbar)
    if len(xbar) != len(mats):
        raise ValueError("xbar has wrong dimension")
    slice_at_xbar = _pencil_at(mats, xbar)
    if not _is_positive_definite(slice_at_xbar):
        raise ValueError("pencil at xbar is not positive definite")
    m_vars = len(mats)
    entries = [
        [
            HomoPoly.linear_form([mats[t][i][j] for t in range(m_vars)])
            for j in range(n)
        ]
        for i in range(n)
    ]
    p = _det_poly_from_entries(entries, n)
    return HyperCone(
        p,
        xbar,
        label=label,
        minimality_assumed=minimality_assumed,
        rog_flag=rog_flag,
        gallery=GalleryDescriptor(
            "Spectrahedral",
            {"n": n, "matrices": [[list(map(str, r)) for r in m] for m in mats]},
        ),
    )


def _pencil_at(mats, x):
    n = len(mats[0])
    out = [[Fraction(0)] * n for _ in range(n)]
    for coef, m in zip(x, mats):
        for i in range(n):
            for j in range(n):
                out[i][j] += coef * m[i][j]
    return tuple(tuple(r) for r in out)


def pencil_matrix_float(matrices, x) -> np.ndarray:
    mats = [np.array([[float(v) for v in r] for r in m]) for m in matrices]
    x = np.asarray(x, dtype=float)
    return sum(c * m for c, m in zip(x, mats))


def _is_positive_definite(rows) -> bool:
    n = len(rows)
    for k in range(1, n + 1):
        minor = [r[:k] for r in rows[:k]]
        if exactlin.det(minor) <= 0:
            return False
    return True


def soc3_slice_2x2() -> HyperCone:
    """soc(3) as a 2x2 pencil [[x0+x1, x2], [x2, x0-x1]]: rank-one generated."""
    a0 = ((1, 0), (0, 1))
    a1 = ((1, 0), (0, -1))
    a2 = ((0, 1), (1, 0))
    return spectrahedral(
        [a0, a1, a2],
        (1, 0, 0),
        label="soc3-slice-2x2",
        minimality_assumed=True,
        rog_flag=True,
    )


def soc3_slice_3x3() -> HyperCone:
    """soc(3) as a 3x3 pencil: same set, but boundary slices have rank two."""
    a0 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    a1 = ((0, 1, 0), (1, 0, 0), (0, 0, 0))
    a2 = ((0, 0, 1), (0, 0, 0), (1, 0, 0))
    return spectrahedral([a0, a1, a2], (1, 0, 0), label="soc3-slice-3x3")


# ---------------------------------------------------------------------------
# String ids
# ---------------------------------------------------------------------------


def cone_from_descriptor(data) -> HyperCone:
    """Cone from its descriptor JSON: {"label", "polynomial", "e", "k"?}.

    The optional flag keys record documented assumptions about the
    polynomial, never verified claims; they default to off.
    """
    p = HomoPoly.from_json_dict(data["polynomial"])
    cone = HyperCone(
        p,
        [as_fraction(v) for v in data["e"]],
        label=data.get("label", "cone"),
        minimality_assumed=bool(data.get("minimality_assumed", False)),
        rog_flag=bool(data.get("rog_flag", False)),
    )
    if data.get("k"):
        return cone.derivative_cone(int(data["k"]))
    return cone


def parse_cone_id(cone_id: str):
    """Resolve ids like orthant:4, orthant:4:k=1, psd:3, soc:3, l1,
    spectrahedral:<file>, file:<descriptor.json>; a trailing :k=K wraps
    the cone in its relaxation."""
    parts = cone_id.split(":")
    k = None
    if parts and parts[-1].startswith("k="):
        k = int(parts[-1][2:])
        parts = parts[:-1]
    if not parts:
        raise ValueError(f"empty cone id {cone_id!r}")
    kind = parts[0]
    if kind == "orthant":
        cone = orthant(_one_int(parts, cone_id))
    elif kind == "psd":
        cone = psd(_one_int(parts, cone_id))
    elif kind == "soc":
        cone = soc(_one_int(parts, cone_id))
    elif kind == "l1":
        if len(parts) != 1:
            raise ValueError(f"bad cone id {cone_id!r}")
        cone = l1_cone()
    elif kind == "spectrahedral":
        if len(parts) != 2:
            raise ValueError(f"bad cone id {cone_id!r}")
        cone = _spectrahedral_from_file(parts[1])
    elif kind == "file":
        if len(parts) != 2:
            raise ValueError(f"bad cone id {cone_id!r}")
        with open(parts[1]) as fh:
            cone = cone_from_descriptor(json.load(fh))
        if isinstance(cone, DerivedCone) and k is not None:
            raise ValueError("descriptor already sets k; drop the :k= suffix")
    else:
        raise ValueError(f"unknown cone kind {kind!r}")
    if k is not None:
        return cone.derivative_cone(k)
    return cone


def _one_int(parts, cone_id) -> int:
    if len(parts) != 2:
        raise ValueError(f"bad cone id {cone_id!r}")
    try:
        return int(parts[1])
    except ValueError:
        raise ValueError(f"bad dimension in cone id {cone_id!r}") from None


def _spectrahedral_from_file(path: str) -> HyperCone:
    with open(path) as fh:
        data = json.load(fh)
    mats = [
        [[as_fraction(v) for v in row] for row in m] for m in data["matrices"]
    ]
    xbar = [as_fraction(v) for v in data["xbar"]]
    return spectrahedral(mats, xbar, label=data.get("label", "spectrahedral"))
