"""Coordinate containers for the two-qubit gate parametrisation.

A two-qubit gate (up to global phase) is specified by fifteen real
numbers: four axis-angle triples for the single-qubit factors of the
outer local operations, and three canonical coordinates ``(c1, c2, c3)``
for the commuting core.  The flattened ordering used throughout the
package is::

    (alpha1, theta1, phi1, beta1, lambda1, xi1,
     alpha2, theta2, phi2, beta2, lambda2, xi2,
     c1, c2, c3)

Angle normalisation happens only here, at construction boundaries;
numerical kernels elsewhere accept raw floats and are global in their
arguments.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * np.pi
FOUR_PI = 4.0 * np.pi

#: Default tolerance for Weyl-chamber membership tests.  Boundary points
#: count as inside.
CHAMBER_TOL = 1e-9


@dataclass(frozen=True)
class Su2Params:
    """Axis-angle parameters of one single-qubit rotation.

    ``alpha`` is the rotation angle, ``(theta, phi)`` the spherical
    coordinates of the rotation axis.  Ranges: ``alpha in [0, 4*pi)``,
    ``theta in [0, pi]``, ``phi in [0, 2*pi)``.

    >>> Su2Params(0.0, 0.0, 0.0).axis()
    array([0., 0., 1.])
    """

    alpha: float
    theta: float
    phi: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.alpha, self.theta, self.phi])):
            raise ValidationError("su2 parameters must be finite")
        if not 0.0 <= self.alpha < FOUR_PI:
            raise ValidationError(f"alpha={self.alpha} outside [0, 4*pi)")
        if not 0.0 <= self.theta <= np.pi:
            raise ValidationError(f"theta={self.theta} outside [0, pi]")
        if not 0.0 <= self.phi < TWO_PI:
            raise ValidationError(f"phi={self.phi} outside [0, 2*pi)")

    @classmethod
    def wrapped(cls, alpha: float, theta: float, phi: float) -> "Su2Params":
        """Construct after reducing the angles into their fundamental ranges.

        ``theta`` outside ``[0, pi]`` is folded back (reflecting ``phi``),
        so the described rotation is preserved.
        """
        theta = float(theta) % TWO_PI
        if theta > np.pi:
            theta = TWO_PI - theta
            phi = phi + np.pi
        return cls(float(alpha) % FOUR_PI, theta, float(phi) % TWO_PI)

    def axis(self) -> np.ndarray:
        """Unit vector of the rotation axis."""
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.theta, self.phi)


#: The trivial rotation.
SU2_IDENTITY = Su2Params(0.0, 0.0, 0.0)


def in_weyl_chamber(c1, c2, c3, tol: float = CHAMBER_TOL):
    """Weyl-chamber membership test; accepts scalars or broadcastable arrays.

    The chamber is the tetrahedron with vertices (0,0,0), (pi,0,0),
    (pi/2,pi/2,0) and (pi/2,pi/2,pi/2); as half-spaces::

        c3 >= 0,  c3 <= c2,  c2 <= c1,  c1 + c2 <= pi

    Boundary points are inside (closed chamber, tolerance ``tol``).

    >>> bool(in_weyl_chamber(np.pi / 2, 0.0, 0.0))
    True
    >>> bool(in_weyl_chamber(0.2, 0.3, 0.0))
    False
    """
    c1 = np.asarray(c1)
    c2 = np.asarray(c2)
    c3 = np.asarray(c3)
    ok = (c3 >= -tol) & (c2 - c3 >= -tol) & (c1 - c2 >= -tol) & (np.pi - c1 - c2 >= -tol)
    if ok.ndim == 0:
        return bool(ok)
    return ok


@dataclass(frozen=True)
class CanonicalCoords:
    """A point in canonical-coordinate space.

    Not restricted to the Weyl chamber at construction; use
    :meth:`in_chamber` to test membership.
    """

    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.c1, self.c2, self.c3])):
            raise ValidationError("canonical coordinates must be finite")

    def in_chamber(self, tol: float = CHAMBER_TOL) -> bool:
        return in_weyl_chamber(self.c1, self.c2, self.c3, tol)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.c1, self.c2, self.c3)

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])


def coerce_triple(c) -> tuple[float, float, float]:
    """Accept a CanonicalCoords, sequence or array and return a plain triple."""
    if isinstance(c, CanonicalCoords):
        return c.as_tuple()
    arr = np.asarray(c, dtype=float)
    if arr.shape != (3,):
        raise ValidationError(f"expected a coordinate triple, got shape {arr.shape}")
    return (float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class FullCoords:
    """The full fifteen-coordinate parametrisation of a two-qubit gate.

    ``a1``/``b1`` parametrise the two single-qubit factors of the left
    local operation (first/second qubit), ``a2``/``b2`` those of the right
    one, and ``c`` the commuting core.
    """

    a1: Su2Params
    b1: Su2Params
    a2: Su2Params
    b2: Su2Params
    c: CanonicalCoords

    def as_array(self) -> np.ndarray:
        """Flatten to the canonical 15-vector ordering."""
        return np.array(
            self.a1.as_tuple()
            + self.b1.as_tuple()
            + self.a2.as_tuple()
            + self.b2.as_tuple()
            + self.c.as_tuple()
        )

    @classmethod
    def from_array(cls, x) -> "FullCoords":
        x = np.asarray(x, dtype=float)
        if x.shape != (15,):
            raise ValidationError(f"expected 15 coordinates, got shape {x.shape}")
        return cls(
            a1=Su2Params(*x[0:3]),
            b1=Su2Params(*x[3:6]),
            a2=Su2Params(*x[6:9]),
            b2=Su2Params(*x[9:12]),
            c=CanonicalCoords(*x[12:15]),
        )
