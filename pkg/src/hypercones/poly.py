"""Exact sparse arithmetic for homogeneous multivariate polynomials.

Terms are stored as a dict from exponent tuples to `fractions.Fraction`
coefficients, so every identity asserted downstream (derivative formulas,
composition laws, scaling certificates) is an exact statement about
coefficient maps.  Floating point shows up only in the cached term arrays
used by the numeric samplers.

The univariate side (`UniPoly`) carries the exact machinery needed to
certify statements about real roots: division, gcd, square-free
decomposition and Sturm-sequence root counting.
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from math import factorial

import numpy as np

# A dense polarization sum needs 2^degree evaluations.
POLAR_DEGREE_CAP = 24

_RATIONAL_TYPES = (int, Fraction)


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, floats and strings like '3/2' or '0.25'."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)  # exact binary value of the float
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def as_vector(values) -> tuple[Fraction, ...]:
    return tuple(as_fraction(v) for v in values)


def is_exact_vector(values) -> bool:
    """True when every entry is an int or Fraction (floats count as inexact)."""
    return all(isinstance(v, _RATIONAL_TYPES) for v in values)


def _mul_term_dicts(a, b, nvars):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            c = out.get(key)
            out[key] = ca * cb if c is None else c + ca * cb
    return out


class HomoPoly:
    """Homogeneous polynomial with exact rational coefficients.

    Canonical form: no zero coefficients are stored and every exponent
    tuple sums to `degree`.  Instances are treated as immutable; all
    operations return new polynomials.
    """

    __slots__ = ("nvars", "degree", "terms", "_float_terms", "_key")

    def __init__(self, nvars: int, degree: int, terms):
        if nvars < 1:
            raise ValueError("need at least one variable")
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        clean = {}
        for exp, c in terms.items():
            c = as_fraction(c)
            if c == 0:
                continue
            exp = tuple(int(a) for a in exp)
            if len(exp) != nvars or any(a < 0 for a in exp):
                raise ValueError(f"bad exponent {exp} for {nvars} variables")
            if sum(exp) != degree:
                raise ValueError(
                    f"term {exp} has total degree {sum(exp)}, expected {degree}"
                )
            clean[exp] = c
        self.nvars = nvars
        self.degree = degree
        self.terms = clean
        self._float_terms = None
        self._key = None

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def constant(value, nvars: int) -> "HomoPoly":
        return HomoPoly(nvars, 0, {(0,) * nvars: as_fraction(value)})

    @staticmethod
    def variable(i: int, nvars: int) -> "HomoPoly":
        exp = tuple(1 if j == i else 0 for j in range(nvars))
        return HomoPoly(nvars, 1, {exp: Fraction(1)})

    @staticmethod
    def linear_form(coeffs) -> "HomoPoly":
        coeffs = as_vector(coeffs)
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                terms[tuple(1 if j == i else 0 for j in range(n))] = c
        return HomoPoly(n, 1, terms)

    # -- basic queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def _sort_key(self):
        if self._key is None:
            self._key = tuple(sorted(self.terms.items(), reverse=True))
        return self._key

    def sorted_terms(self):
        """Terms in descending graded-lex order (canonical serialization order)."""
        return self._sort_key()

    def __eq__(self, other):
        if not isinstance(other, HomoPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, self._sort_key()))

    def max_abs_coeff(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return max(abs(c) for c in self.terms.values())

    # -- ring operations -------------------------------------------------------

    def _check_same_space(self, other):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other):
        self._check_same_space(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError("cannot add homogeneous parts of different degree")
        out = dict(self.terms)
        for exp, c in other.terms.items():
            out[exp] = out.get(exp, Fraction(0)) + c
        return HomoPoly(self.nvars, self.degree, out)

    def __neg__(self):
        return HomoPoly(self.nvars, self.degree, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, HomoPoly):
            self._check_same_space(other)
            out = _mul_term_dicts(self.terms, other.terms, self.nvars)
            return HomoPoly(self.nvars, self.degree + other.degree, out)
        c = as_fraction(other)
        return HomoPoly(self.nvars, self.degree, {e: c * v for e, v in self.terms.items()})

    __rmul__ = __mul__

    # -- calculus ---------------------------------------------------------------

    def partial(self, i: int) -> "HomoPoly":
        out = {}
        for exp, c in self.terms.items():
            a = exp[i]
            if a:
                e2 = exp[:i] + (a - 1,) + exp[i + 1 :]
                out[e2] = out.get(e2, Fraction(0)) + c * a
        return HomoPoly(self.nvars, max(self.degree - 1, 0), out)

    def _dir_step(self, e) -> "HomoPoly":
        out = {}
        for exp, c in self.terms.items():
            for i, ei in enumerate(e):
                a = exp[i]
                if a and ei:
                    e2 = exp[:i] + (a - 1,) + exp[i + 1 :]
                    out[e2] = out.get(e2, Fraction(0)) + c * a * ei
        return HomoPoly(self.nvars, max(self.degree - 1, 0), out)

    def dir_deriv(self, e, k: int = 1) -> "HomoPoly":
        """k-th directional derivative along e, by k single sparse passes."""
        if not 0 <= k <= self.degree:
            raise ValueError(f"derivative order {k} outside 0..{self.degree}")
        e = as_vector(e)
        if len(e) != self.nvars:
            raise ValueError("direction has wrong dimension")
        q = self
        for _ in range(k):
            q = q._dir_step(e)
        return q

    # -- composition -------------------------------------------------------------

    def compose(self, rows) -> "HomoPoly":
        """Exact expansion of x -> p(Bx) where row i gives the image of x_i.

        `rows` has one row per variable of `self`; the row length sets the
        variable count of the result, so rectangular substitutions (e.g.
        restriction to a subspace basis) are allowed.
        """
        rows = tuple(as_vector(r) for r in rows)
        if len(rows) != self.nvars:
            raise ValueError("matrix has wrong number of rows")
        m = len(rows[0])
        if any(len(r) != m for r in rows):
            raise ValueError("ragged substitution matrix")
        unit = {(0,) * m: Fraction(1)}
        forms = []
        for row in rows:
            f = {}
            for j, c in enumerate(row):
                if c:
                    f[tuple(1 if t == j else 0 for t in range(m))] = c
            forms.append(f)
        pow_cache = {}

        def form_power(i, a):
            key = (i, a)
            got = pow_cache.get(key)
            if got is None:
                got = unit if a == 0 else _mul_term_dicts(form_power(i, a - 1), forms[i], m)
                pow_cache[key] = got
            return got

        acc = {}
        for exp, c in self.terms.items():
            prod = unit
            for i, a in enumerate(exp):
                if a:
                    prod = form_power(i, a) if prod is unit else _mul_term_dicts(prod, form_power(i, a), m)
                    if not prod:
                        break
            for e2, c2 in prod.items():
                acc[e2] = acc.get(e2, Fraction(0)) + c * c2
        return HomoPoly(m, self.degree, acc)

    # -- evaluation ----------------------------------------------------------------

    def eval(self, point) -> Fraction:
        """Exact evaluation at a rational point."""
        if len(point) != self.nvars:
            raise ValueError("point has wrong dimension")
        total = Fraction(0)
        for exp, c in self.terms.items():
            v = c
            for x, a in zip(point, exp):
                if a:
                    v *= x ** a
                    if v == 0:
                        break
            total += v
        return total

    def _float_term_list(self):
        if self._float_terms is None:
            self._float_terms = [(exp, float(c)) for exp, c in self.sorted_terms()]
        return self._float_terms

    def eval_float(self, points) -> np.ndarray:
        """Float evaluation at one point (1d) or a batch of points (2d)."""
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if pts.shape[1] != self.nvars:
            raise ValueError("points have wrong dimension")
        out = np.zeros(len(pts))
        for exp, c in self._float_term_list():
            t = np.full(len(pts), c)
            for j, a in enumerate(exp):
                if a == 1:
                    t = t * pts[:, j]
                elif a:
                    t = t * pts[:, j] ** a
            out += t
        return out[0] if single else out

    # -- serialization ----------------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "nvars": self.nvars,
            "degree": self.degree,
            "terms": [
                {"exp": list(exp), "num": str(c.numerator), "den": str(c.denominator)}
                for exp, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json_dict(cls, data) -> "HomoPoly":
        terms = {
            tuple(t["exp"]): Fraction(int(t["num"]), int(t["den"]))
            for t in data["terms"]
        }
        return cls(int(data["nvars"]), int(data["degree"]), terms)

    def __repr__(self):
        if self.is_zero():
            return "HomoPoly(0)"
        parts = []
        for exp, c in self.sorted_terms()[:8]:
            mono = "*".join(
                f"x{i}" if a == 1 else f"x{i}^{a}" for i, a in enumerate(exp) if a
            )
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        tail = " + ..." if len(self.terms) > 8 else ""
        return "HomoPoly(" + " + ".join(parts) + tail + ")"


def derivatives_along(p: HomoPoly, e) -> tuple[HomoPoly, ...]:
    """The full tower [p, D_e p, ..., D_e^d p] by repeated single passes."""
    e = as_vector(e)
    out = [p]
    for _ in range(p.degree):
        out.append(out[-1]._dir_step(e))
    return tuple(out)


def restrict_line(p: HomoPoly, e, x, derivs=None) -> "UniPoly":
    """Exact coefficients of q(t) = p(t*e - x).

    Uses the closed form c_j = (-1)^(d-j) (D_e^j p)(x) / j!, which follows
    from homogeneity; the leading coefficient is always p(e).  Pass a
    precomputed derivative tower to amortize repeated restrictions.
    """
    e = as_vector(e)
    x = as_vector(x)
    d = p.degree
    if derivs is None:
        derivs = derivatives_along(p, e)
    coeffs = []
    for j in range(d + 1):
        v = derivs[j].eval(x)
        coeffs.append(Fraction((-1) ** (d - j)) * v / factorial(j))
    if coeffs and coeffs[-1] == 0:
        warnings.warn("restriction has zero leading coefficient: p(e) = 0")
    return UniPoly(coeffs)


def restrict_line_naive(p: HomoPoly, e, x) -> "UniPoly":
    """Substitute x_i -> e_i*t - x_i and expand.  Debug oracle for restrict_line."""
    e = as_vector(e)
    x = as_vector(x)
    d = p.degree
    acc = [Fraction(0)] * (d + 1)
    for exp, c in p.terms.items():
        conv = [c]
        for ei, xi, a in zip(e, x, exp):
            for _ in range(a):
                # multiply the running univariate by (ei*t - xi)
                nxt = [Fraction(0)] * (len(conv) + 1)
                for j, v in enumerate(conv):
                    nxt[j] += v * (-xi)
                    nxt[j + 1] += v * ei
                conv = nxt
        for j, v in enumerate(conv):
            acc[j] += v
    return UniPoly(acc)


def polar_form(p: HomoPoly, xs) -> Fraction:
    """Fully symmetric multilinear form P with P(x, ..., x) = p(x).

    Computed by the polarization identity
    P = (1/d!) * sum over nonempty S of (-1)^(d-|S|) p(sum of xs in S),
    a dense 2^d - 1 term sum, hence the degree cap.
    """
    d = p.degree
    if len(xs) != d:
        raise ValueError(f"need exactly {d} arguments, got {len(xs)}")
    if d > POLAR_DEGREE_CAP:
        raise ValueError(f"polarization sum needs 2^{d} evaluations; cap is {POLAR_DEGREE_CAP}")
    if d == 0:
        return p.eval((Fraction(0),) * p.nvars)
    xs = [as_vector(x) for x in xs]
    total = Fraction(0)
    for mask in range(1, 1 << d):
        point = [Fraction(0)] * p.nvars
        size = 0
        m = mask
        i = 0
        while m:
            if m & 1:
                size += 1
                xi = xs[i]
                for j in range(p.nvars):
                    point[j] += xi[j]
            m >>= 1
            i += 1
        total += Fraction((-1) ** (d - size)) * p.eval(point)
    return total / factorial(d)


def polar_form_float(p: HomoPoly, xs) -> float:
    """Float version of polar_form; one batched evaluation per call."""
    d = p.degree
    if len(xs) != d:
        raise ValueError(f"need exactly {d} arguments, got {len(xs)}")
    if d > POLAR_DEGREE_CAP:
        raise ValueError(f"polarization sum needs 2^{d} evaluations; cap is {POLAR_DEGREE_CAP}")
    pts = np.asarray(xs, dtype=float)
    masks = np.arange(1, 1 << d)
    sel = (masks[:, None] >> np.arange(d)[None, :]) & 1
    points = sel @ pts
    sizes = sel.sum(axis=1)
    signs = np.where((d - sizes) % 2 == 0, 1.0, -1.0)
    return float(signs @ p.eval_float(points)) / factorial(d)


# ---------------------------------------------------------------------------
# Univariate polynomials and exact root counting
# ---------------------------------------------------------------------------


class UniPoly:
    """Univariate polynomial, ascending exact rational coefficients c_0..c_d.

    Restriction results keep their full declared length (leading
    coefficient p(e)); arithmetic helpers trim trailing zeros as needed.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = tuple(as_fraction(c) for c in coeffs)
        self.coeffs = cs if cs else (Fraction(0),)

    @property
    def degree(self) -> int:
        """Degree after trimming; -1 for the zero polynomial."""
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return -1

    def is_zero(self) -> bool:
        return self.degree < 0

    def trimmed(self) -> "UniPoly":
        d = self.degree
        return UniPoly(self.coeffs[: d + 1]) if d >= 0 else UniPoly((0,))

    def eval(self, t) -> Fraction:
        t = as_fraction(t)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def eval_float(self, t: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + float(c)
        return acc

    def derivative(self) -> "UniPoly":
        if len(self.coeffs) <= 1:
            return UniPoly((0,))
        return UniPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i >= 1))

    def scaled(self, c) -> "UniPoly":
        c = as_fraction(c)
        return UniPoly(tuple(c * v for v in self.coeffs))

    def monic(self) -> "UniPoly":
        d = self.degree
        if d < 0:
            raise ValueError("zero polynomial has no monic form")
        lead = self.coeffs[d]
        return UniPoly(tuple(c / lead for c in self.coeffs[: d + 1]))

    def trailing_zero_count(self) -> int:
        """Multiplicity of 0 as a root (exact)."""
        if self.is_zero():
            raise ValueError("zero polynomial")
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise AssertionError("unreachable")

    def shifted_down(self, m: int) -> "UniPoly":
        """Divide by t^m (requires the first m coefficients to vanish)."""
        if any(self.coeffs[i] for i in range(m)):
            raise ValueError("polynomial not divisible by t^m")
        return UniPoly(self.coeffs[m:])

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        a, b = self.trimmed().coeffs, other.trimmed().coeffs
        return a == b

    def __hash__(self):
        return hash(self.trimmed().coeffs)

    def __repr__(self):
        return "UniPoly(" + ", ".join(str(c) for c in self.coeffs) + ")"


def uni_divmod(a: UniPoly, b: UniPoly) -> tuple[UniPoly, UniPoly]:
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    da, db = a.degree, b.degree
    rem = list(a.coeffs[: da + 1]) if da >= 0 else [Fraction(0)]
    if da < db:
        return UniPoly((0,)), a.trimmed()
    quo = [Fraction(0)] * (da - db + 1)
    lead = b.coeffs[db]
    for k in range(da - db, -1, -1):
        c = rem[db + k] / lead
        quo[k] = c
        if c:
            for j in range(db + 1):
                rem[j + k] -= c * b.coeffs[j]
    return UniPoly(quo), UniPoly(rem[:db] if db > 0 else [Fraction(0)])


def uni_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd by the Euclidean algorithm."""
    a, b = a.trimmed(), b.trimmed()
    while not b.is_zero():
        a, b = b, uni_divmod(a, b)[1]
    if a.is_zero():
        return a
    return a.monic()


def squarefree_factors(q: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun's decomposition: list of (monic square-free factor, multiplicity)."""
    q = q.trimmed()
    if q.degree <= 0:
        return []
    dq = q.derivative()
    a = uni_gcd(q, dq)
    b = uni_divmod(q, a)[0]
    c = uni_divmod(dq, a)[0]
    d = UniPoly(_sub_coeffs(c.coeffs, b.derivative().coeffs))
    out = []
    i = 1
    while b.degree > 0:
        a = uni_gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b = uni_divmod(b, a)[0] if not a.is_zero() else b
        c = uni_divmod(d, a)[0] if not a.is_zero() else d
        d = UniPoly(_sub_coeffs(c.coeffs, b.derivative().coeffs))
        i += 1
    return out


def _sub_coeffs(a, b):
    n = max(len(a), len(b))
    return tuple(
        (a[i] if i < len(a) else Fraction(0)) - (b[i] if i < len(b) else Fraction(0))
        for i in range(n)
    )


def _sturm_chain(q: UniPoly):
    chain = [q.trimmed()]
    d = chain[0].derivative().trimmed()
    if not d.is_zero():
        chain.append(d)
        while chain[-1].degree > 0:
            r = uni_divmod(chain[-2], chain[-1])[1].trimmed()
            if r.is_zero():
                break
            chain.append(UniPoly(tuple(-c for c in r.coeffs)))
    return chain


def _sign_at(p: UniPoly, t):
    """Sign at a rational point or at +inf / -inf (passed as the strings below)."""
    d = p.degree
    if d < 0:
        return 0
    lead = p.coeffs[d]
    if t == "+inf":
        return 1 if lead > 0 else -1
    if t == "-inf":
        s = 1 if lead > 0 else -1
        return s if d % 2 == 0 else -s
    v = p.eval(t)
    return 0 if v == 0 else (1 if v > 0 else -1)


def _variations(chain, t) -> int:
    signs = [s for s in (_sign_at(p, t) for p in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count_distinct(q: UniPoly, lo=None, hi=None) -> int:
    """Number of distinct real roots of q in (lo, hi]; None bounds mean +-inf.

    Valid for arbitrary (possibly non-square-free) q; the canonical Sturm
    chain counts each real root once.  `lo` must not itself be a root.
    """
    q = q.trimmed()
    if q.is_zero():
        raise ValueError("zero polynomial")
    if q.degree == 0:
        return 0
    chain = _sturm_chain(q)
    a = "-inf" if lo is None else as_fraction(lo)
    b = "+inf" if hi is None else as_fraction(hi)
    return _variations(chain, a) - _variations(chain, b)


def real_root_count_with_mult(q: UniPoly, lo=None, hi=None) -> int:
    """Real roots in (lo, hi] counted with multiplicity (exact)."""
    total = 0
    for factor, mult in squarefree_factors(q):
        total += mult * sturm_count_distinct(factor, lo, hi)
    return total


def is_real_rooted(q: UniPoly) -> bool:
    """True when all roots of q are real (counted with multiplicity)."""
    q = q.trimmed()
    if q.is_zero():
        raise ValueError("zero polynomial")
    if q.degree == 0:
        return True
    return real_root_count_with_mult(q) == q.degree
