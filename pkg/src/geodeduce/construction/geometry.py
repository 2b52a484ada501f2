"""Coordinate formulas shared by the symbolic compiler and the float solver.

Every helper works on pairs of anything that supports ``+ - *`` (MultiPoly,
Fraction, float), so the two evaluators cannot drift apart.
"""

from __future__ import annotations

from fractions import Fraction

HALF = Fraction(1, 2)


def add(p, q):
    return (p[0] + q[0], p[1] + q[1])


def sub(p, q):
    return (p[0] - q[0], p[1] - q[1])


def scale(k, p):
    return (p[0] * k, p[1] * k)


def perp(u):
    return (-u[1], u[0])


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def sqdist(p, q):
    d = sub(p, q)
    return dot(d, d)


def det3(p, q, r):
    """Twice the signed area of triangle pqr; zero iff collinear."""
    return cross(sub(q, p), sub(r, p))


def midpoint(p, q):
    return scale(HALF, add(p, q))


def reflect_point(p, center):
    return sub(scale(2, center), p)


def dilate(p, factor, center):
    return add(center, scale(factor, sub(p, center)))


def square_vertices(a, b):
    """Counterclockwise square on ``a -> b``: returns the vertices after b and after that."""
    n = perp(sub(b, a))
    return add(b, n), add(a, n)


def perpendicular_bisector(p, q):
    m = midpoint(p, q)
    return m, add(m, perp(sub(q, p)))


def perpendicular_through(p, line):
    return p, add(p, perp(sub(line[1], line[0])))
