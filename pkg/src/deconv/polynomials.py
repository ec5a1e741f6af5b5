"""Dense real polynomials and the coefficient-level smoothing operator.

Convolving ``p(x) = sum a_j x^j`` with an even unit-mass kernel scaled by
``eps`` maps polynomials to polynomials of the same degree:

    (p * phi_eps)(x) = sum_j a_j sum_{k even, k <= j} C(j, k) c_k eps^k x^(j-k)

with ``c_k`` the kernel moments.  On the coefficient vector this is a
triangular matrix with unit diagonal (the map only pushes mass from a power
down to powers two or more below it), hence a vector-space automorphism:
smoothing a polynomial loses no information, and the inverse is another
triangular map.  For non-even kernels the same expansion holds with signs,
``(-1)^k C(j, k) c_k eps^k``, but the inverse changes character and is not
offered.

The inverse is computed by back-substitution against the stored matrix.
The equivalent alternating sum of iterated convolutions
``sum_j (-1)^j C(q+1, j+1) T^j`` (``q = floor(n/2)``) is available as
``method="series"``; it is the form to check identities against at small
degree, but its intermediates grow like ``(n/2)^(n/2)`` times the input and
drown the answer in rounding noise for degrees beyond roughly 20.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ParameterError
from .kernels import Kernel

DEGREE_TRIM_REL = 1e-14


class Polynomial1D:
    """Immutable dense polynomial; index = power."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[float]):
        arr = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                       dtype=float)
        if arr.ndim != 1:
            raise InputError("coefficients must be one-dimensional")
        if arr.size == 0:
            arr = np.zeros(1)
        if not np.all(np.isfinite(arr)):
            raise InputError("coefficients must be finite")
        # exact trailing zeros carry no information; tiny-but-nonzero entries
        # are kept so that ill-scaled vectors survive round trips
        n = arr.size
        while n > 1 and arr[n - 1] == 0.0:
            n -= 1
        arr = arr[:n].copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, *a):  # immutability
        raise AttributeError("Polynomial1D is immutable")

    # -- structure ----------------------------------------------------------

    def degree(self) -> int:
        """Largest power with a coefficient above 1e-14 * max|a|.

        The threshold suppresses spurious degree inflation left behind by
        alternating sums; the zero polynomial reports degree 0.
        """
        a = np.abs(self.coeffs)
        top = a.max()
        if top == 0.0:
            return 0
        keep = np.nonzero(a > DEGREE_TRIM_REL * top)[0]
        return int(keep[-1]) if keep.size else 0

    def is_zero(self) -> bool:
        return bool(np.all(self.coeffs == 0.0))

    def trimmed(self) -> "Polynomial1D":
        """Copy truncated at degree() (drops sub-threshold trailing noise)."""
        return Polynomial1D(self.coeffs[: self.degree() + 1])

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(length)
        out[: self.coeffs.size] = self.coeffs
        return out

    # -- algebra ------------------------------------------------------------

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        xs = np.asarray(x, dtype=float)
        acc = np.zeros_like(xs)
        for c in self.coeffs[::-1]:
            acc = acc * xs + c
        return float(acc) if acc.ndim == 0 else acc

    def __add__(self, other: "Polynomial1D") -> "Polynomial1D":
        n = max(self.coeffs.size, other.coeffs.size)
        return Polynomial1D(self.padded(n) + other.padded(n))

    def __sub__(self, other: "Polynomial1D") -> "Polynomial1D":
        n = max(self.coeffs.size, other.coeffs.size)
        return Polynomial1D(self.padded(n) - other.padded(n))

    def __mul__(self, scalar: float) -> "Polynomial1D":
        return Polynomial1D(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Polynomial1D({self.coeffs.tolist()!r})"

    # -- serialization --------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps([float(c) for c in self.coeffs])

    @classmethod
    def from_json(cls, text: str) -> "Polynomial1D":
        data = json.loads(text)
        if isinstance(data, dict):  # multi-index form with dim 1
            if data.get("dim") != 1:
                raise InputError("expected a 1-D polynomial")
            coeffs: dict[int, float] = {}
            for term in data["terms"]:
                coeffs[int(term["alpha"][0])] = float(term["coeff"])
            arr = np.zeros(max(coeffs) + 1 if coeffs else 1)
            for k, v in coeffs.items():
                arr[k] = v
            return cls(arr)
        return cls(np.asarray(data, dtype=float))


class ConvOperator:
    """Coefficient-space smoothing operator for one (kernel, eps, max degree).

    The matrix ``M[i][j]`` holds the coefficient of ``x^i`` in the image of
    ``x^j``; it is built once and shared by all operations, so linearity is
    exact and results are reproducible.  The diagonal is exactly 1.0 (zeroth
    moment pinned to 1), which keeps the two leading input coefficients
    bit-identical through the map.
    """

    def __init__(self, kernel: Kernel, epsilon: float, max_degree: int):
        if not (epsilon > 0 and math.isfinite(epsilon)):
            raise ParameterError(f"epsilon must be positive, got {epsilon}")
        if max_degree < 0 or int(max_degree) != max_degree:
            raise ParameterError(f"max_degree must be a nonnegative integer, got {max_degree}")
        self.kernel = kernel
        self.epsilon = float(epsilon)
        self.max_degree = int(max_degree)
        self.matrix = self._build_matrix()
        self.matrix.setflags(write=False)

    def _build_matrix(self) -> np.ndarray:
        n = self.max_degree
        eps = self.epsilon
        even_only = self.kernel.parity == "even"
        M = np.zeros((n + 1, n + 1))
        np.fill_diagonal(M, 1.0)
        step = 2 if even_only else 1
        for j in range(n + 1):
            for k in range(step, j + 1, step):
                c = self.kernel.moment(k)
                if c == 0.0:
                    continue
                term = math.comb(j, k) * c * eps**k
                if not even_only and k % 2 == 1:
                    term = -term
                M[j - k, j] = term
        return M

    # -- forward -------------------------------------------------------------

    def convolve(self, p: Polynomial1D) -> Polynomial1D:
        """Image of p under the smoothing map; degree is preserved.

        Operates on the full stored coefficient vector: entries below the
        degree() reporting threshold still carry structure (e.g. the tail of
        a convergent power series) and are never dropped here.
        """
        d = self._check_degree(p)
        a = p.padded(self.max_degree + 1)
        out = self.matrix @ a
        return Polynomial1D(out[: d + 1])

    def iterate(self, p: Polynomial1D, k: int) -> Polynomial1D:
        """k-fold application (k = 0 returns p)."""
        if k < 0 or int(k) != k:
            raise ParameterError(f"iteration count must be a nonnegative integer, got {k}")
        d = self._check_degree(p)
        a = p.padded(self.max_degree + 1)
        for _ in range(int(k)):
            a = self.matrix @ a
        return Polynomial1D(a[: d + 1])

    def side_polynomial(self, p: Polynomial1D, j: int) -> Polynomial1D:
        """j-th degree-dropping remainder: sum_k (-1)^k C(j, k) T^(j-k) p.

        These satisfy T(p_j) = p_j + p_(j+1) with deg p_j <= deg(p) - 2j
        (down to a constant/affine floor), which is what makes the smoothing
        map invertible degree by degree.
        """
        if j < 0 or int(j) != j:
            raise ParameterError(f"side index must be a nonnegative integer, got {j}")
        if p.is_zero():
            raise ParameterError("side polynomials of the zero polynomial are excluded")
        if j >= 1 and p.degree() < 2:
            raise ParameterError("side polynomials with j >= 1 need degree >= 2")
        d = self._check_degree(p)
        a = p.padded(self.max_degree + 1)
        powers = [a]
        for _ in range(int(j)):
            powers.append(self.matrix @ powers[-1])
        acc = np.zeros_like(a)
        for k in range(int(j) + 1):
            acc += ((-1) ** k * math.comb(int(j), k)) * powers[int(j) - k]
        return Polynomial1D(acc[: d + 1])

    # -- inverse -------------------------------------------------------------

    def invert(self, q: Polynomial1D, method: str = "solve") -> Polynomial1D:
        """Preimage of q: the unique p with convolve(p) = q.

        ``method="solve"`` back-substitutes the unit-triangular system
        (backward stable, no iterated convolutions).  ``method="series"``
        evaluates the alternating binomial sum of iterated convolutions with
        floor(deg/2) applications; both agree exactly in exact arithmetic.
        """
        if self.kernel.parity != "even":
            raise ParameterError(
                "inversion requires an even kernel; the smoothing map is only "
                "an automorphism when odd moments vanish"
            )
        d = self._check_degree(q)
        if method == "solve":
            b = q.padded(self.max_degree + 1)
            r = b.copy()
            for i in range(d, -1, -1):
                r[i] = b[i] - self.matrix[i, i + 1 : d + 1] @ r[i + 1 : d + 1]
            return Polynomial1D(r[: d + 1])
        if method == "series":
            half = d // 2
            a = q.padded(self.max_degree + 1)
            acc = np.zeros_like(a)
            cur = a
            for j in range(half + 1):
                acc += ((-1) ** j * math.comb(half + 1, j + 1)) * cur
                if j < half:
                    cur = self.matrix @ cur
            return Polynomial1D(acc[: d + 1])
        raise ParameterError(f"unknown inversion method {method!r}")

    def _check_degree(self, p: Polynomial1D) -> int:
        """Effective length-based degree: the full stored vector participates."""
        d = p.coeffs.size - 1
        if d > self.max_degree:
            raise ParameterError(
                f"polynomial degree {d} exceeds operator max_degree {self.max_degree}"
            )
        return d


def coefficients_close(
    a: Polynomial1D | Sequence[float],
    b: Polynomial1D | Sequence[float],
    rel_tol: float,
    scale: float | None = None,
) -> bool:
    """Compare coefficient vectors of possibly different lengths."""
    av = a.coeffs if isinstance(a, Polynomial1D) else np.asarray(a, dtype=float)
    bv = b.coeffs if isinstance(b, Polynomial1D) else np.asarray(b, dtype=float)
    n = max(av.size, bv.size)
    pa = np.zeros(n); pa[: av.size] = av
    pb = np.zeros(n); pb[: bv.size] = bv
    denom = scale if scale is not None else max(np.abs(pa).max(), np.abs(pb).max(), 1e-300)
    return bool(np.abs(pa - pb).max() <= rel_tol * denom)
