"""Exact rational coefficients of the auxiliary gap fields.

The coefficients are stored as :class:`fractions.Fraction` so the identities
that define them can be checked without any floating point tolerance.  A
curvature given as a float is converted exactly (every binary float is a
rational number).
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from functools import lru_cache

Number = int | float | Fraction


def as_fraction(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


@dataclass(frozen=True)
class AuxCoefficients:
    n: int
    kappa: Fraction
    a1: Fraction
    a2: Fraction
    b1: Fraction
    b2: Fraction
    b3: Fraction
    b4: Fraction
    b5: Fraction
    b6: Fraction

    def as_floats(self) -> dict[str, float]:
        return {f.name: float(getattr(self, f.name)) for f in fields(self) if f.name not in ("n",)}

    def replace(self, **changes) -> "AuxCoefficients":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update({k: as_fraction(v) for k, v in changes.items()})
        return AuxCoefficients(**values)


@lru_cache(maxsize=256)
def _coefficients(n: int, kappa: Fraction) -> AuxCoefficients:
    if n < 2:
        raise ValueError("n must be at least 2")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return AuxCoefficients(
        n=n,
        kappa=kappa,
        a1=Fraction(6, n - 1),
        a2=Fraction(-2),
        b1=Fraction(-12, 2 * n - 1),
        b2=Fraction(3, 2 * (2 * n - 1)) / kappa,
        b3=Fraction(-5),
        b4=Fraction(4 * (n + 1), 2 * n - 1),
        b5=-12 * kappa,
        b6=Fraction(3, 2 * n - 1) / kappa,
    )


def coefficients(n: int, kappa: Number) -> AuxCoefficients:
    """Closed-form coefficient family for dimension ``n`` and curvature ``kappa``."""
    return _coefficients(int(n), as_fraction(kappa))


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over the rationals."""
    size = len(rhs)
    aug = [list(row) + [r] for row, r in zip(matrix, rhs)]
    for col in range(size):
        pivot = next(r for r in range(col, size) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        piv = aug[col][col]
        aug[col] = [v / piv for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][size] for r in range(size)]


def derive_coefficients(n: int, kappa: Number) -> AuxCoefficients:
    """Rebuild the coefficients from the conditions that define them.

    The rotation-mode coefficients solve a 6x6 linear system: four
    incompressibility conditions, ``b1 = -4 kappa b6`` and ``b2 = b6 / 2``.
    The vertical-translation pair follows from incompressibility of that mode,
    which forces ``(n - 1) a1 + a2 = 4`` and ``(n - 1) a1 + 3 a2 = 0``.
    """
    k = as_fraction(kappa)
    F = Fraction
    # unknown order: b1, b2, b3, b4, b5, b6
    matrix = [
        [F(n, 4), F(0), F(0), F(1, 4), F(0), F(0)],  # 1 + (n b1 + b4)/4 = 0
        [F(n), -8 * k, F(0), F(3), F(0), F(0)],  # n b1 + 3 b4 - 8 kappa b2 = 0
        [F(0), F(0), -k, F(0), F(3, 4), F(0)],  # 4 kappa + (3 b5 - 4 kappa b3)/4 = 0
        [F(0), F(0), -12 * k, F(0), F(5), F(0)],  # 5 b5 - 12 kappa b3 = 0
        [F(1), F(0), F(0), F(0), F(0), 4 * k],  # b1 + 4 kappa b6 = 0
        [F(0), F(2), F(0), F(0), F(0), F(-1)],  # 2 b2 - b6 = 0
    ]
    rhs = [F(-1), F(0), -4 * k, F(0), F(0), F(0)]
    b1, b2, b3, b4, b5, b6 = _solve_exact(matrix, rhs)
    a1, a2 = _solve_exact([[F(n - 1), F(1)], [F(n - 1), F(3)]], [F(4), F(0)])
    return AuxCoefficients(n=n, kappa=k, a1=a1, a2=a2, b1=b1, b2=b2, b3=b3, b4=b4, b5=b5, b6=b6)


def identity_defects(c: AuxCoefficients) -> dict[str, Fraction]:
    """Exact residual of every defining relation; all zero for a valid family."""
    n, k = c.n, c.kappa
    return {
        "a1": c.a1 - Fraction(6, n - 1),
        "a2": c.a2 + 2,
        "vertical_incompressibility": (n - 1) * c.a1 + c.a2 - 4,
        "vertical_incompressibility_z2": (n - 1) * c.a1 + 3 * c.a2,
        "b1": c.b1 + (6 + 4 * k * c.b2) / n,
        "b3": c.b3 + 5,
        "b4": c.b4 - (2 + 4 * k * c.b2),
        "b5": c.b5 + 12 * k,
        "b5_b3": 5 * c.b5 - 12 * k * c.b3,
        "b1_b6": c.b1 + 4 * k * c.b6,
        "b2_b6": 2 * c.b2 - c.b6,
        "b2": c.b2 - Fraction(3, 2 * (2 * n - 1)) / k,
        "b6": c.b6 - Fraction(3, 2 * n - 1) / k,
    }


def failing_identities(c: AuxCoefficients) -> list[str]:
    """Names of coefficients or relations that do not hold exactly."""
    return [name for name, value in identity_defects(c).items() if value != 0]
