"""Three-dimensional Lotka-Volterra systems at a resonant singular point.

    x' = x (lam + a x + b y + c z)
    y' = y (mu  + d x + e y + f z)
    z' = z (nu  + g x + h y + k z)
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .poly import PARAMS, XYZ, Poly, RingMismatch

PARAM_NAMES = PARAMS.names
# (x,y,z) -> (z,y,x) swaps parameters pairwise; e is fixed
DUAL_PARAMS = {"a": "k", "b": "h", "c": "g", "d": "f", "e": "e",
               "f": "d", "g": "c", "h": "b", "k": "a"}
DUAL_XYZ = {"x": "z", "y": "y", "z": "x"}


class InvalidResonance(ValueError):
    pass


def check_resonance(eigs) -> tuple[int, int, int]:
    try:
        lam, mu, nu = (int(v) for v in eigs)
    except (TypeError, ValueError):
        raise InvalidResonance(f"eigenvalues must be three integers, got {eigs!r}")
    if any(Fraction(v) != int(Fraction(v)) for v in eigs):
        raise InvalidResonance(f"eigenvalues must be integers, got {eigs!r}")
    if not (lam > 0 and nu > 0):
        raise InvalidResonance("lambda and nu must be positive")
    if not mu < 0:
        raise InvalidResonance("mu must be negative")
    if gcd(gcd(lam, -mu), nu) != 1:
        raise InvalidResonance("gcd(lambda, mu, nu) must be 1")
    return lam, mu, nu


class LVSystem:
    """Eigenvalue triple plus 3x3 coefficient matrix ``((a,b,c),(d,e,f),(g,h,k))``.

    Matrix entries are Fractions for concrete systems.  :meth:`symbolic` builds
    a system whose entries are the parameter generators, which the series
    recursions accept as a coefficient ring.
    """

    __slots__ = ("eigenvalues", "matrix")

    def __init__(self, eigenvalues, matrix=None, *, validate: bool = True):
        if validate:
            eigenvalues = check_resonance(eigenvalues)
        self.eigenvalues = tuple(int(v) for v in eigenvalues)
        if matrix is None:
            matrix = [[0] * 3 for _ in range(3)]
        rows = tuple(tuple(v if isinstance(v, Poly) else Fraction(v) for v in row)
                     for row in matrix)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("matrix must be 3x3")
        self.matrix = rows

    @classmethod
    def from_params(cls, eigenvalues, params, **kw) -> LVSystem:
        vals = [params.get(n, 0) for n in PARAM_NAMES]
        return cls(eigenvalues, [vals[0:3], vals[3:6], vals[6:9]], **kw)

    @classmethod
    def symbolic(cls, eigenvalues) -> LVSystem:
        g = PARAMS.gens()
        return cls(eigenvalues, [g[0:3], g[3:6], g[6:9]])

    @property
    def is_symbolic(self) -> bool:
        return any(isinstance(v, Poly) for row in self.matrix for v in row)

    def params(self) -> dict:
        flat = [v for row in self.matrix for v in row]
        return dict(zip(PARAM_NAMES, flat))

    def column(self, j: int) -> tuple:
        """Coefficients of the j-th coordinate in the three cofactors."""
        return tuple(self.matrix[i][j] for i in range(3))

    def coordinate_cofactors(self) -> tuple[Poly, Poly, Poly]:
        """L_x, L_y, L_z: cofactors of the invariant coordinate planes."""
        self._require_numeric()
        x, y, z = XYZ.gens()
        return tuple(lam + row[0] * x + row[1] * y + row[2] * z
                     for lam, row in zip(self.eigenvalues, self.matrix))

    def vector_field(self) -> tuple[Poly, Poly, Poly]:
        self._require_numeric()
        x, y, z = XYZ.gens()
        lx, ly, lz = self.coordinate_cofactors()
        return x * lx, y * ly, z * lz

    def dual(self) -> LVSystem:
        return dual_transform(self)

    def _require_numeric(self):
        if self.is_symbolic:
            raise TypeError("operation needs a numeric (rational) system")

    def __eq__(self, other) -> bool:
        return (isinstance(other, LVSystem) and self.eigenvalues == other.eigenvalues
                and self.matrix == other.matrix)

    def __hash__(self):
        return hash((self.eigenvalues, self.matrix))

    def __repr__(self) -> str:
        return f"LVSystem({self.eigenvalues}, {self.matrix})"


def dual_transform(sys: LVSystem) -> LVSystem:
    """Image of ``sys`` under (x,y,z) -> (z,y,x)."""
    lam, mu, nu = sys.eigenvalues
    m = sys.matrix
    rows = [[m[2 - i][2 - j] for j in range(3)] for i in range(3)]
    return LVSystem((nu, mu, lam), rows, validate=False)


def apply_vector_field(sys: LVSystem, F: Poly) -> Poly:
    """X(F) = P F_x + Q F_y + R F_z."""
    if F.ring != XYZ:
        raise RingMismatch(f"expected a polynomial in x,y,z, got {F.ring}")
    P, Q, R = sys.vector_field()
    return P * F.diff("x") + Q * F.diff("y") + R * F.diff("z")


def divergence(sys: LVSystem) -> Poly:
    P, Q, R = sys.vector_field()
    return P.diff("x") + Q.diff("y") + R.diff("z")
