"""Lattice geometry and the five-point operator.

The library works on two coordinate systems for the square lattice:

* diagonal coordinates ``(m, n)``, on which the four-point relation
  ``psi(m+1, n+1) - psi(m, n) = i f(m, n) (psi(m+1, n) - psi(m, n+1))``
  lives, and
* sublattice coordinates ``(mu, nu)`` with ``m = mu - nu``, ``n = mu + nu``,
  which parameterize the even sublattice ``m + n = 0 (mod 2)``.

On the even sublattice the second-order operator reads

    (L phi)[mu, nu] = a[mu, nu] phi[mu+1, nu] + a[mu-1, nu] phi[mu-1, nu]
                    + b[mu, nu] phi[mu, nu+1] + b[mu, nu-1] phi[mu, nu-1]
                    - c[mu, nu] phi[mu, nu]

with coefficients built from a real, nonvanishing lattice function ``f``:

    a[mu, nu]   = 1 / f(m, n)        a[mu-1, nu] = 1 / f(m-1, n-1)
    b[mu, nu]   = f(m-1, n)          b[mu, nu-1] = f(m, n-1)
    c[mu, nu]   = a[mu, nu] + a[mu-1, nu] + b[mu, nu] + b[mu, nu-1]

The diagonal neighbours of ``(m, n)`` are exactly the ``(mu, nu)``-nearest
neighbours, so ``L`` is a five-point stencil on the even sublattice.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, Mapping, Tuple, Union

__all__ = [
    "ParityError",
    "SingularCoefficientError",
    "WindowError",
    "LatticeIndex",
    "FiveptCoefficients",
    "LatticeField",
    "to_sublattice",
    "from_sublattice",
    "coefficients_from_f",
    "apply_five_point",
    "check_four_point",
]

FValues = Union[Callable[[int, int], float], Mapping[Tuple[int, int], float]]
CoeffSource = Union[
    Callable[[int, int], "FiveptCoefficients"],
    Mapping[Tuple[int, int], "FiveptCoefficients"],
]


class ParityError(ValueError):
    """Raised for (m, n) with m + n odd: no sublattice image exists."""


class SingularCoefficientError(ZeroDivisionError):
    """Raised when f vanishes at a point required by the coefficients."""


class WindowError(LookupError):
    """Raised on access outside a field's index window."""


def to_sublattice(m: int, n: int) -> Tuple[int, int]:
    """Map even-sublattice diagonal coordinates to (mu, nu).

    Inverse of :func:`from_sublattice`; requires m + n even.
    """
    if (m + n) % 2 != 0:
        raise ParityError(f"(m, n) = ({m}, {n}) is not on the even sublattice")
    return (m + n) // 2, (n - m) // 2


def from_sublattice(mu: int, nu: int) -> Tuple[int, int]:
    """Map sublattice coordinates (mu, nu) to diagonal coordinates (m, n)."""
    return mu - nu, mu + nu


@dataclass(frozen=True)
class LatticeIndex:
    """A point of the even sublattice in both coordinate systems."""

    mu: int
    nu: int

    @classmethod
    def from_mn(cls, m: int, n: int) -> "LatticeIndex":
        mu, nu = to_sublattice(m, n)
        return cls(mu, nu)

    @property
    def m(self) -> int:
        return self.mu - self.nu

    @property
    def n(self) -> int:
        return self.mu + self.nu

    @property
    def mn(self) -> Tuple[int, int]:
        return self.m, self.n


def _f_at(f: FValues, m: int, n: int) -> float:
    value = f(m, n) if callable(f) else f[(m, n)]
    if value == 0:
        raise SingularCoefficientError(f"f({m}, {n}) = 0 gives a singular coefficient")
    return float(value)


@dataclass(frozen=True)
class FiveptCoefficients:
    """Stencil coefficients of L at one site.

    ``c`` is redundant (it equals the sum of the four neighbour
    coefficients) but is stored so the invariant can be asserted.
    """

    a_right: float
    a_left: float
    b_up: float
    b_down: float
    c: float

    def neighbour_sum(self) -> float:
        return self.a_right + self.a_left + self.b_up + self.b_down


def coefficients_from_f(f: FValues, mu: int, nu: int) -> FiveptCoefficients:
    """Build the five-point coefficients at (mu, nu) from the lattice function f.

    f may be a callable ``f(m, n)`` or a mapping keyed by ``(m, n)``.
    Raises :class:`SingularCoefficientError` if f vanishes at any of the
    four required arguments.
    """
    m, n = from_sublattice(mu, nu)
    a_right = 1.0 / _f_at(f, m, n)
    a_left = 1.0 / _f_at(f, m - 1, n - 1)
    b_up = _f_at(f, m - 1, n)
    b_down = _f_at(f, m, n - 1)
    return FiveptCoefficients(
        a_right=a_right,
        a_left=a_left,
        b_up=b_up,
        b_down=b_down,
        c=a_right + a_left + b_up + b_down,
    )


@dataclass
class LatticeField:
    """Complex scalars on a rectangular window of an integer lattice.

    The window is ``i_range = (i_min, i_max)`` by ``j_range = (j_min, j_max)``,
    both inclusive.  Index names are deliberately neutral: the same container
    holds fields over (m, n) and over (mu, nu).
    """

    i_range: Tuple[int, int]
    j_range: Tuple[int, int]
    values: Dict[Tuple[int, int], complex] = field(default_factory=dict)

    @classmethod
    def from_function(
        cls,
        i_range: Tuple[int, int],
        j_range: Tuple[int, int],
        fn: Callable[[int, int], complex],
    ) -> "LatticeField":
        out = cls(i_range, j_range)
        for i in range(i_range[0], i_range[1] + 1):
            for j in range(j_range[0], j_range[1] + 1):
                out.values[(i, j)] = complex(fn(i, j))
        return out

    def contains(self, i: int, j: int) -> bool:
        return (
            self.i_range[0] <= i <= self.i_range[1]
            and self.j_range[0] <= j <= self.j_range[1]
        )

    def __getitem__(self, key: Tuple[int, int]) -> complex:
        if not self.contains(*key):
            raise WindowError(f"index {key} outside window {self.i_range} x {self.j_range}")
        return self.values[key]

    def __setitem__(self, key: Tuple[int, int], value: complex) -> None:
        if not self.contains(*key):
            raise WindowError(f"index {key} outside window {self.i_range} x {self.j_range}")
        self.values[key] = complex(value)

    def indices(self) -> Iterator[Tuple[int, int]]:
        for i in range(self.i_range[0], self.i_range[1] + 1):
            for j in range(self.j_range[0], self.j_range[1] + 1):
                yield (i, j)


def _coeffs_at(coeffs: CoeffSource, mu: int, nu: int) -> FiveptCoefficients:
    return coeffs(mu, nu) if callable(coeffs) else coeffs[(mu, nu)]


def apply_five_point(
    phi: LatticeField, coeffs: CoeffSource, mu: int, nu: int
) -> complex:
    """Evaluate (L phi) at (mu, nu); the full stencil must be in the window."""
    co = _coeffs_at(coeffs, mu, nu)
    return (
        co.a_right * phi[(mu + 1, nu)]
        + co.a_left * phi[(mu - 1, nu)]
        + co.b_up * phi[(mu, nu + 1)]
        + co.b_down * phi[(mu, nu - 1)]
        - co.c * phi[(mu, nu)]
    )


def check_four_point(psi: LatticeField, f: FValues) -> float:
    """Max residual of the four-point relation over a field on (m, n).

    The residual at (m, n) is
    ``|psi(m+1, n+1) - psi(m, n) - i f(m, n) (psi(m+1, n) - psi(m, n+1))|``,
    taken over all points whose stencil fits inside the window.
    """
    worst = 0.0
    for m in range(psi.i_range[0], psi.i_range[1]):
        for n in range(psi.j_range[0], psi.j_range[1]):
            fv = f(m, n) if callable(f) else f[(m, n)]
            lhs = psi[(m + 1, n + 1)] - psi[(m, n)]
            rhs = 1j * fv * (psi[(m + 1, n)] - psi[(m, n + 1)])
            worst = max(worst, abs(lhs - rhs))
    return worst
