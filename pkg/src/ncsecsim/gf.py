"""GF(2^k) arithmetic underlying packets, MAC keys, and tags.

Field elements are plain ints in [0, 2^k); their binary digits are the
coefficients of a polynomial over GF(2), reduced modulo an irreducible
polynomial of degree k.  Addition is XOR.  Vectors of elements are thin
wrappers around numpy arrays so that bulk operations (recoding rows,
inner products over long payloads, Monte-Carlo batches) run as table
lookups instead of Python loops.

For k <= 8, multiplication uses log/antilog tables built at construction
time from a searched generator; wider fields (k <= 16) fall back to
shift-and-reduce, which is slower but exact.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, InvalidParameter, InversionOfZero

# Default irreducible polynomials, one per supported bit width.  The k=8
# entry is 0x11B, the widely tabulated choice, so results can be checked
# against published GF(256) tables.
_DEFAULT_POLY = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0x11B,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}

_TABLE_MAX_K = 8


def _poly_degree(p: int) -> int:
    return p.bit_length() - 1


def _poly_mod(a: int, m: int) -> int:
    """Remainder of carry-less division of a by m."""
    dm = _poly_degree(m)
    while a.bit_length() - 1 >= dm and a:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def _is_irreducible(poly: int, k: int) -> bool:
    # Exhaustive trial division by every polynomial of degree 1..k//2.
    for deg in range(1, k // 2 + 1):
        for div in range(1 << deg, 1 << (deg + 1)):
            if _poly_mod(poly, div) == 0:
                return False
    return True


class FieldSpec:
    """A binary extension field GF(2^k) with a fixed reduction polynomial.

    Immutable after construction; all methods are safe for concurrent use.
    """

    def __init__(self, k: int = 8, reduction_polynomial: int | None = None):
        if not isinstance(k, int) or not 1 <= k <= 16:
            raise InvalidParameter(f"field bit width k={k!r} must be an integer in 1..16")
        poly = _DEFAULT_POLY[k] if reduction_polynomial is None else reduction_polynomial
        if _poly_degree(poly) != k:
            raise InvalidParameter(
                f"reduction polynomial {poly:#x} does not have degree {k}"
            )
        if not _is_irreducible(poly, k):
            raise InvalidParameter(f"reduction polynomial {poly:#x} is reducible")
        self.k = k
        self.poly = poly
        self.q = 1 << k
        self.dtype = np.uint8 if k <= 8 else np.uint16
        self._exp: np.ndarray | None = None
        self._log: np.ndarray | None = None
        if k <= _TABLE_MAX_K:
            self._build_tables()

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------
    def _raw_mul(self, a: int, b: int) -> int:
        """Carry-less multiply reduced by the field polynomial (no tables)."""
        acc = 0
        while b:
            if b & 1:
                acc ^= a
            a <<= 1
            if a & self.q:
                a ^= self.poly
            b >>= 1
        return acc

    def _build_tables(self) -> None:
        q = self.q
        gen = 1
        if q > 2:
            # x need not be primitive for an arbitrary irreducible polynomial
            # (it is not for 0x11B), so search for a generator.
            for cand in range(2, q):
                val, order = cand, 1
                while val != 1:
                    val = self._raw_mul(val, cand)
                    order += 1
                if order == q - 1:
                    gen = cand
                    break
        exp = np.zeros(2 * q, dtype=self.dtype)
        log = np.zeros(q, dtype=np.int16)
        val = 1
        for i in range(q - 1):
            exp[i] = val
            log[val] = i
            val = self._raw_mul(val, gen)
        for i in range(q - 1, 2 * q):
            exp[i] = exp[i - (q - 1)]
        self.generator = gen
        self._exp = exp
        self._log = log

    # ------------------------------------------------------------------
    # scalar operations
    # ------------------------------------------------------------------
    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return int(self._exp[int(self._log[a]) + int(self._log[b])])
        return self._raw_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise InversionOfZero("0 has no multiplicative inverse")
        if self._exp is not None:
            return int(self._exp[(self.q - 1) - int(self._log[a])])
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        result = 1
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    # ------------------------------------------------------------------
    # vectorised kernels (arrays of field elements)
    # ------------------------------------------------------------------
    def vec_mul(self, a, b) -> np.ndarray:
        """Elementwise product; broadcasts, so a scalar times a vector works."""
        a = np.asarray(a, dtype=self.dtype)
        b = np.asarray(b, dtype=self.dtype)
        if self._exp is None:
            return np.frompyfunc(self._raw_mul, 2, 1)(a, b).astype(self.dtype)
        idx = self._log[a].astype(np.int32) + self._log[b].astype(np.int32)
        out = self._exp[idx]
        return np.where((a == 0) | (b == 0), 0, out).astype(self.dtype)

    def vec_dot(self, u, v) -> int:
        prod = self.vec_mul(u, v)
        if prod.size == 0:
            return 0
        return int(np.bitwise_xor.reduce(prod))

    def mat_vec_dot(self, rows: np.ndarray, v) -> np.ndarray:
        """Per-row inner products of a matrix with a vector."""
        prod = self.vec_mul(rows, np.asarray(v, dtype=self.dtype)[None, :])
        return np.bitwise_xor.reduce(prod, axis=1)

    def combine_rows(self, coeffs, rows: np.ndarray) -> np.ndarray:
        """Linear combination sum_i coeffs[i] * rows[i]."""
        coeffs = np.asarray(coeffs, dtype=self.dtype)
        if coeffs.shape[0] != rows.shape[0]:
            raise DimensionMismatch(
                f"{coeffs.shape[0]} coefficients for {rows.shape[0]} rows"
            )
        prod = self.vec_mul(coeffs[:, None], rows)
        return np.bitwise_xor.reduce(prod, axis=0)

    def random_elements(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.integers(0, self.q, size=size, dtype=np.uint16).astype(self.dtype)

    # ------------------------------------------------------------------
    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldSpec)
            and self.k == other.k
            and self.poly == other.poly
        )

    def __hash__(self) -> int:
        return hash((self.k, self.poly))

    def __repr__(self) -> str:
        return f"FieldSpec(k={self.k}, poly={self.poly:#x})"


class FieldVector:
    """A fixed-length sequence of field elements tied to a FieldSpec."""

    __slots__ = ("elems", "spec")

    def __init__(self, elems, spec: FieldSpec, _checked: bool = False):
        if _checked:
            arr = np.asarray(elems, dtype=spec.dtype)
        else:
            raw = np.asarray(elems)
            if raw.ndim != 1:
                raise DimensionMismatch(f"expected 1-d data, got shape {raw.shape}")
            if raw.size and (int(raw.min()) < 0 or int(raw.max()) >= spec.q):
                raise InvalidParameter(f"element outside GF({spec.q})")
            arr = raw.astype(spec.dtype)
        if arr.ndim != 1:
            raise DimensionMismatch(f"expected 1-d data, got shape {arr.shape}")
        self.elems = arr
        self.spec = spec

    @classmethod
    def zeros(cls, n: int, spec: FieldSpec) -> "FieldVector":
        return cls(np.zeros(n, dtype=spec.dtype), spec, _checked=True)

    @classmethod
    def random(cls, n: int, spec: FieldSpec, rng: np.random.Generator) -> "FieldVector":
        return cls(spec.random_elements(rng, n), spec, _checked=True)

    def __len__(self) -> int:
        return int(self.elems.size)

    def __getitem__(self, i: int) -> int:
        return int(self.elems[i])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldVector)
            and self.spec == other.spec
            and self.elems.shape == other.elems.shape
            and bool(np.array_equal(self.elems, other.elems))
        )

    def __xor__(self, other: "FieldVector") -> "FieldVector":
        self._check_compatible(other)
        return FieldVector(self.elems ^ other.elems, self.spec, _checked=True)

    __add__ = __xor__  # addition in characteristic 2 is XOR

    def scale(self, alpha: int) -> "FieldVector":
        return FieldVector(self.spec.vec_mul(alpha, self.elems), self.spec, _checked=True)

    def dot(self, other: "FieldVector") -> int:
        self._check_compatible(other)
        return self.spec.vec_dot(self.elems, other.elems)

    def copy(self) -> "FieldVector":
        return FieldVector(self.elems.copy(), self.spec, _checked=True)

    def tolist(self) -> list[int]:
        return [int(x) for x in self.elems]

    def is_zero(self) -> bool:
        return not self.elems.any()

    def _check_compatible(self, other: "FieldVector") -> None:
        if self.spec != other.spec:
            raise DimensionMismatch("vectors from different fields")
        if self.elems.size != other.elems.size:
            raise DimensionMismatch(
                f"length mismatch: {self.elems.size} vs {other.elems.size}"
            )

    def __repr__(self) -> str:
        return f"FieldVector({self.tolist()}, GF({self.spec.q}))"


# Module-level forms of the four core operations, for callers that prefer
# free functions over methods.

def mul(a: int, b: int, spec: FieldSpec) -> int:
    return spec.mul(a, b)


def inv(a: int, spec: FieldSpec) -> int:
    return spec.inv(a)


def dot(u: FieldVector, v: FieldVector) -> int:
    return u.dot(v)


def axpy(alpha: int, x: FieldVector, y: FieldVector) -> FieldVector:
    """alpha*x + y elementwise."""
    x._check_compatible(y)
    return FieldVector(x.spec.vec_mul(alpha, x.elems) ^ y.elems, x.spec, _checked=True)


#: Shared default fields.  Construction is cheap but these save repetition.
GF256 = FieldSpec(8)
GF16 = FieldSpec(4)
