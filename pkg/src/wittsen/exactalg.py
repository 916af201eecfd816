"""Exact scalar and linear-algebra substrate.

Everything here is exact: arbitrary-precision integers (Python ``int``),
rationals (``fractions.Fraction``), residues mod p^N, truncated multivariate
polynomials, and Smith normal form over Z, Z/p^N and the p-local integers.
No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class InvalidInputError(ValueError):
    pass


class PrecisionError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def require_prime(p: int) -> None:
    if not is_prime(p):
        raise InvalidInputError(f"{p} is not prime")


def int_valuation(p: int, m: int) -> int:
    """p-adic valuation of a nonzero integer; raises on 0."""
    if m == 0:
        raise InvalidInputError("valuation of 0 is undefined")
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return v


def fraction_valuation(p: int, x: Fraction | int) -> int:
    x = Fraction(x)
    if x == 0:
        raise InvalidInputError("valuation of 0 is undefined")
    return int_valuation(p, x.numerator) - int_valuation(p, x.denominator)


def factorial_valuation(p: int, k: int) -> int:
    """v_p(k!) by Legendre: (k - digit-sum_p(k)) / (p-1)."""
    require_prime(p)
    if k < 0:
        raise InvalidInputError("k must be a natural number")
    s, m = 0, k
    while m:
        s += m % p
        m //= p
    return (k - s) // (p - 1)


# ---------------------------------------------------------------------------
# scalars


@dataclass(frozen=True)
class PAdicScalar:
    """Residue r mod p^N, reduced; arithmetic demands matching (p, N)."""

    p: int
    N: int
    r: int

    def __post_init__(self):
        require_prime(self.p)
        if self.N < 1:
            raise InvalidInputError("precision N must be >= 1")
        object.__setattr__(self, "r", self.r % self.p**self.N)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def _match(self, other: "PAdicScalar") -> None:
        if (self.p, self.N) != (other.p, other.N):
            raise InvalidInputError("mixed (p, N) in PAdicScalar arithmetic")

    def __add__(self, other):
        self._match(other)
        return PAdicScalar(self.p, self.N, self.r + other.r)

    def __sub__(self, other):
        self._match(other)
        return PAdicScalar(self.p, self.N, self.r - other.r)

    def __mul__(self, other):
        self._match(other)
        return PAdicScalar(self.p, self.N, self.r * other.r)

    def __neg__(self):
        return PAdicScalar(self.p, self.N, -self.r)

    def __pow__(self, e: int):
        return PAdicScalar(self.p, self.N, pow(self.r, e, self.modulus))

    def valuation(self) -> int:
        """v_p of the residue, capped at N for the zero residue."""
        if self.r == 0:
            return self.N
        return int_valuation(self.p, self.r)

    def unit_inverse(self) -> "PAdicScalar":
        if self.r % self.p == 0:
            raise InvalidInputError("not a unit mod p^N")
        return PAdicScalar(self.p, self.N, pow(self.r, -1, self.modulus))


# ---------------------------------------------------------------------------
# truncated multivariate polynomials


@dataclass(frozen=True)
class PolyRing:
    """Descriptor for a truncated polynomial/series ring.

    ``bounds[i]`` is the max exponent stored for variable i (None = no cap);
    ``total_bound`` caps the summed exponent of the variables flagged in
    ``counted`` (coefficient-like variables are usually left uncounted).
    ``modulus`` = 0 means characteristic zero (int/Fraction coefficients).
    ``degrees``/``weights`` are bookkeeping used by graded callers.
    """

    vars: tuple[str, ...]
    bounds: tuple = None
    total_bound: int = None
    counted: tuple = None
    modulus: int = 0
    degrees: tuple = None
    weights: tuple = None

    def __post_init__(self):
        n = len(self.vars)
        if self.bounds is None:
            object.__setattr__(self, "bounds", (None,) * n)
        if self.counted is None:
            object.__setattr__(self, "counted", (True,) * n)
        if self.degrees is None:
            object.__setattr__(self, "degrees", (0,) * n)
        if self.weights is None:
            object.__setattr__(self, "weights", (0,) * n)

    def index(self, name: str) -> int:
        return self.vars.index(name)

    def keeps(self, mono: tuple) -> bool:
        for e, b in zip(mono, self.bounds):
            if b is not None and e > b:
                return False
        if self.total_bound is not None:
            if sum(e for e, c in zip(mono, self.counted) if c) > self.total_bound:
                return False
        return True

    def reduce_coeff(self, c):
        if self.modulus:
            if isinstance(c, Fraction):
                if c.denominator % self.modulus == 0:
                    raise InvalidInputError("denominator not invertible mod modulus")
                c = c.numerator * pow(c.denominator, -1, self.modulus)
            return c % self.modulus
        if isinstance(c, Fraction) and c.denominator == 1:
            return c.numerator
        return c


class TruncPoly:
    """Sparse polynomial over PolyRing; monomials above a bound are dropped."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict = None):
        self.ring = ring
        cleaned = {}
        for mono, c in (terms or {}).items():
            if not ring.keeps(mono):
                continue
            c = ring.reduce_coeff(c)
            if c:
                cleaned[mono] = c
        self.terms = cleaned

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(ring):
        return TruncPoly(ring, {})

    @staticmethod
    def const(ring, c):
        return TruncPoly(ring, {(0,) * len(ring.vars): c})

    @staticmethod
    def var(ring, name, exp=1):
        mono = [0] * len(ring.vars)
        mono[ring.index(name)] = exp
        return TruncPoly(ring, {tuple(mono): 1})

    # -- basics ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, mono: tuple):
        return self.terms.get(tuple(mono), 0)

    def constant_term(self):
        return self.terms.get((0,) * len(self.ring.vars), 0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncPoly.const(self.ring, other)
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncPoly.const(self.ring, other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return TruncPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncPoly.const(self.ring, other)
        return self + (-other)

    def __rsub__(self, other):
        return TruncPoly.const(self.ring, other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncPoly(self.ring, {m: c * other for m, c in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                if self.ring.keeps(m):
                    out[m] = out.get(m, 0) + c1 * c2
        return TruncPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = TruncPoly.const(self.ring, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def map_coeffs(self, f):
        return TruncPoly(self.ring, {m: f(c) for m, c in self.terms.items()})

    def exact_div_int(self, d: int):
        """Divide every coefficient by d, insisting on exactness over Z."""
        out = {}
        for m, c in self.terms.items():
            if isinstance(c, int):
                q, r = divmod(c, d)
                if r:
                    raise InvalidInputError(f"coefficient {c} not divisible by {d}")
                out[m] = q
            else:
                out[m] = c / d
        return TruncPoly(self.ring, out)

    def substitute(self, assignment: dict):
        """Replace variables by polynomials/scalars; unlisted vars persist."""
        ring = None
        for v in assignment.values():
            if isinstance(v, TruncPoly):
                ring = v.ring
                break
        if ring is None:
            ring = self.ring
        out = TruncPoly.zero(ring)
        for mono, c in self.terms.items():
            term = TruncPoly.const(ring, c)
            for name, e in zip(self.ring.vars, mono):
                if not e:
                    continue
                if name in assignment:
                    val = assignment[name]
                    if not isinstance(val, TruncPoly):
                        val = TruncPoly.const(ring, val)
                    term = term * val**e
                else:
                    term = term * TruncPoly.var(ring, name, e)
            out = out + term
        return out

    def derivative(self, name: str):
        i = self.ring.index(name)
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                m2 = list(m)
                m2[i] -= 1
                out[tuple(m2)] = c * m[i]
        return TruncPoly(self.ring, out)

    def evaluate(self, values: dict):
        """Full evaluation to a scalar (every variable assigned)."""
        total = 0
        for m, c in self.terms.items():
            t = c
            for name, e in zip(self.ring.vars, m):
                if e:
                    t *= values[name] ** e
            total += t
        return total

    # -- series operations (rely on truncation nilpotence) ------------------

    def _nilpotent_powers(self):
        """Yield self^1, self^2, ... until truncation kills them."""
        power = self
        while not power.is_zero():
            yield power
            power = power * self

    def series_exp(self):
        if self.constant_term() != 0:
            raise InvalidInputError("exp needs constant term 0")
        out = TruncPoly.const(self.ring, 1)
        fact = 1
        for k, power in enumerate(self._nilpotent_powers(), start=1):
            fact *= k
            out = out + power.map_coeffs(lambda c: Fraction(c) / fact)
        return out

    def series_log(self):
        if self.constant_term() != 1:
            raise InvalidInputError("log needs constant term 1")
        g = self - 1
        out = TruncPoly.zero(self.ring)
        for k, power in enumerate(g._nilpotent_powers(), start=1):
            out = out + power.map_coeffs(lambda c, k=k: Fraction((-1) ** (k + 1) * c) / k)
        return out

    def series_inverse(self):
        c0 = self.constant_term()
        if c0 == 0:
            raise InvalidInputError("no series inverse: constant term 0")
        c0 = Fraction(c0)
        g = (self - c0).map_coeffs(lambda c: Fraction(c) / c0)
        out = TruncPoly.const(self.ring, Fraction(1))
        sign = -1
        for power in g._nilpotent_powers():
            out = out + power.map_coeffs(lambda c, s=sign: s * c)
            sign = -sign
        return out.map_coeffs(lambda c: c / c0)

    def min_p_valuation(self, p: int):
        """Minimum v_p over coefficients; None for the zero polynomial."""
        vals = [fraction_valuation(p, c) for c in self.terms.values()]
        return min(vals) if vals else None

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m, c in self.sorted_terms():
            vs = "*".join(
                f"{n}^{e}" if e > 1 else n
                for n, e in zip(self.ring.vars, m)
                if e
            )
            bits.append(f"{c}" if not vs else (f"{c}*{vs}" if c != 1 else vs))
        return " + ".join(bits)


def univariate_ring(name: str, bound: int, modulus: int = 0) -> PolyRing:
    return PolyRing(vars=(name,), bounds=(bound,), modulus=modulus)


def truncated_exp_log(f: TruncPoly, mode: str) -> TruncPoly:
    """Formal exp/log of a rational truncated polynomial."""
    if mode == "exp":
        return f.series_exp()
    if mode == "log":
        return f.series_log()
    raise InvalidInputError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# matrices and Smith normal form


@dataclass
class IntMatrix:
    """Dense rectangular matrix; entries all int or all PAdicScalar."""

    rows: int
    cols: int
    entries: list

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise InvalidInputError("ragged matrix")
        kinds = {type(e) for row in self.entries for e in row}
        if kinds and not (kinds <= {int} or kinds <= {PAdicScalar}):
            raise InvalidInputError("mixed entry rings")

    @staticmethod
    def from_rows(rows: list) -> "IntMatrix":
        return IntMatrix(len(rows), len(rows[0]) if rows else 0, [list(r) for r in rows])

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def is_padic(self) -> bool:
        return any(isinstance(e, PAdicScalar) for row in self.entries for e in row)

    def copy(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [list(r) for r in self.entries])

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        def dot(i, j):
            acc = None
            for k in range(self.cols):
                term = self.entries[i][k] * other.entries[k][j]
                acc = term if acc is None else acc + term
            return 0 if acc is None else acc

        out = [[dot(i, j) for j in range(other.cols)] for i in range(self.rows)]
        return IntMatrix(self.rows, other.cols, out)

    def det(self):
        """Fraction-free determinant (square integer matrices only)."""
        if self.rows != self.cols:
            raise InvalidInputError("det of non-square matrix")
        a = [[Fraction(x) for x in row] for row in self.entries]
        n = self.rows
        det = Fraction(1)
        for i in range(n):
            piv = next((r for r in range(i, n) if a[r][i]), None)
            if piv is None:
                return 0
            if piv != i:
                a[i], a[piv] = a[piv], a[i]
                det = -det
            det *= a[i][i]
            inv = 1 / a[i][i]
            for r in range(i + 1, n):
                f = a[r][i] * inv
                for c in range(i, n):
                    a[r][c] -= f * a[i][c]
        assert det.denominator == 1
        return det.numerator


@dataclass
class SmithDecomposition:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    divisors: list

    def check(self, A: IntMatrix) -> bool:
        prod = self.U.mul(A).mul(self.V)
        return prod.entries == self.D.entries


def _smith_over_Z(A: IntMatrix) -> SmithDecomposition:
    n, m = A.rows, A.cols
    a = [list(r) for r in A.entries]
    U = IntMatrix.identity(n).entries
    V = IntMatrix.identity(m).entries

    def row_op(i, j, f):  # row_i -= f*row_j
        a[i] = [x - f * y for x, y in zip(a[i], a[j])]
        U[i] = [x - f * y for x, y in zip(U[i], U[j])]

    def col_op(i, j, f):  # col_i -= f*col_j
        for r in range(n):
            a[r][i] -= f * a[r][j]
        for r in range(m):
            V[r][i] -= f * V[r][j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in range(n):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(m):
            V[r][i], V[r][j] = V[r][j], V[r][i]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]

    for s in range(min(n, m)):
        while True:
            # leftmost-topmost entry of minimal absolute value in the block
            best = None
            for j in range(s, m):
                for i in range(s, n):
                    x = abs(a[i][j])
                    if x and (best is None or x < best[0]):
                        best = (x, i, j)
            if best is None:
                break
            _, bi, bj = best
            if bi != s:
                swap_rows(s, bi)
            if bj != s:
                swap_cols(s, bj)
            if a[s][s] < 0:
                negate_row(s)
            dirty = False
            for i in range(s + 1, n):
                if a[i][s]:
                    row_op(i, s, a[i][s] // a[s][s])
                    if a[i][s]:
                        dirty = True
            for j in range(s + 1, m):
                if a[s][j]:
                    col_op(j, s, a[s][j] // a[s][s])
                    if a[s][j]:
                        dirty = True
            if dirty:
                continue
            # enforce divisibility of the remaining block by the pivot
            fix = None
            for i in range(s + 1, n):
                for j in range(s + 1, m):
                    if a[i][j] % a[s][s]:
                        fix = i
                        break
                if fix is not None:
                    break
            if fix is None:
                break
            a[s] = [x + y for x, y in zip(a[s], a[fix])]
            U[s] = [x + y for x, y in zip(U[s], U[fix])]

    divisors = [a[i][i] for i in range(min(n, m))]
    D = IntMatrix(n, m, a)
    return SmithDecomposition(IntMatrix(n, n, U), D, IntMatrix(m, m, V), divisors)


def _smith_over_ZpN(A: IntMatrix) -> SmithDecomposition:
    """p-adic variant: pivot = leftmost entry of minimal valuation."""
    sample = A.entries[0][0]
    p, N = sample.p, sample.N
    mod = p**N
    n, m = A.rows, A.cols
    a = [[e.r for e in row] for row in A.entries]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    V = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def val(x):
        return N if x % mod == 0 else int_valuation(p, x % mod)

    for s in range(min(n, m)):
        best = None
        for j in range(s, m):
            for i in range(s, n):
                v = val(a[i][j])
                if v < N and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, bi, bj = best
        if bi != s:
            a[s], a[bi] = a[bi], a[s]
            U[s], U[bi] = U[bi], U[s]
        if bj != s:
            for r in range(n):
                a[r][s], a[r][bj] = a[r][bj], a[r][s]
            for r in range(m):
                V[r][s], V[r][bj] = V[r][bj], V[r][s]
        # normalize pivot to exactly p^v
        unit = (a[s][s] // p**v) % mod
        inv = pow(unit, -1, mod)
        a[s] = [(x * inv) % mod for x in a[s]]
        U[s] = [(x * inv) % mod for x in U[s]]
        for i in range(s + 1, n):
            if a[i][s] % mod:
                f = a[i][s] // p**v
                a[i] = [(x - f * y) % mod for x, y in zip(a[i], a[s])]
                U[i] = [(x - f * y) % mod for x, y in zip(U[i], U[s])]
        for j in range(s + 1, m):
            if a[s][j] % mod:
                f = a[s][j] // p**v
                for r in range(n):
                    a[r][j] = (a[r][j] - f * a[r][s]) % mod
                for r in range(m):
                    V[r][j] = (V[r][j] - f * V[r][s]) % mod

    divisors = [a[i][i] % mod for i in range(min(n, m))]
    wrap = lambda x: PAdicScalar(p, N, x)
    mk = lambda rows, r, c: IntMatrix(r, c, [[wrap(x) for x in row] for row in rows])
    return SmithDecomposition(mk(U, n, n), mk(a, n, m), mk(V, m, m), [wrap(d) for d in divisors])


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """U*A*V = D with D diagonal; over Z the divisor chain d_1 | d_2 | ...

    Over Z/p^N the divisors are exact p-powers (minimal-valuation pivoting).
    """
    if A.rows == 0 or A.cols == 0:
        return SmithDecomposition(
            IntMatrix.identity(A.rows), A.copy(), IntMatrix.identity(A.cols), []
        )
    if A.is_padic():
        return _smith_over_ZpN(A)
    return _smith_over_Z(A)


# ---------------------------------------------------------------------------
# exact SNF over the p-local integers Z_(p)  (Fraction entries,
# minimal-valuation pivoting; divisors are exact powers of p).
# This is the engine behind all homology computations.


class PLocalOps:
    """Arithmetic hooks for Z_(p) viewed inside Q."""

    def __init__(self, p: int):
        require_prime(p)
        self.p = p
        self.residue_order = p

    zero = Fraction(0)
    one = Fraction(1)

    def is_zero(self, x) -> bool:
        return x == 0

    def val(self, x) -> int:
        return fraction_valuation(self.p, x)

    def div(self, a, b):
        return Fraction(a) / Fraction(b)

    def lift(self, x):
        return Fraction(x)

    def scalar(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a


def local_snf(ops, rows: list, ncols: int = None) -> tuple:
    """SNF over a local PID given by `ops`.

    Returns (exponents, rank, Vinv): exponents are the uniformizer-valuations
    of the nonzero diagonal (nondecreasing by minimal-valuation pivoting) and
    Vinv is the tracked inverse of the right transform, so that the columns
    of V beyond the rank span ker and coordinates of a kernel vector in the
    V-basis are Vinv @ vector.
    """
    a = [list(r) for r in rows]
    n = len(a)
    m = ncols if ncols is not None else (len(a[0]) if a else 0)
    vinv = [[ops.one if i == j else ops.zero for j in range(m)] for i in range(m)]
    rank = 0
    exps = []
    for s in range(min(n, m)):
        best = None
        for j in range(s, m):
            for i in range(s, n):
                if not ops.is_zero(a[i][j]):
                    v = ops.val(a[i][j])
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        v, bi, bj = best
        if bi != s:
            a[s], a[bi] = a[bi], a[s]
        if bj != s:
            for r in range(n):
                a[r][s], a[r][bj] = a[r][bj], a[r][s]
            vinv[s], vinv[bj] = vinv[bj], vinv[s]
        piv = a[s][s]
        for i in range(s + 1, n):
            if not ops.is_zero(a[i][s]):
                f = ops.div(a[i][s], piv)
                a[i] = [ops.sub(x, ops.mul(f, y)) for x, y in zip(a[i], a[s])]
        for j in range(s + 1, m):
            if not ops.is_zero(a[s][j]):
                f = ops.div(a[s][j], piv)
                for r in range(n):
                    a[r][j] = ops.sub(a[r][j], ops.mul(f, a[r][s]))
                # col_j -= f*col_s  =>  row_s of Vinv += f*row_j
                vinv[s] = [ops.add(x, ops.mul(f, y)) for x, y in zip(vinv[s], vinv[j])]
        exps.append(v)
        rank += 1
    return exps, rank, vinv
