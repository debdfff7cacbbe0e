"""Exact rational arithmetic used by every solver path.

All fractional quantities in this package (LP values, residual bounds,
separation slacks) are arbitrary-precision rationals, never floats.
gmpy2.mpq is used when available (roughly 7x faster than Fraction at
this workload); the stdlib Fraction is a drop-in fallback.  Both store
values in lowest terms with a positive denominator.
"""

try:
    from gmpy2 import mpq as Rat

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rat

    HAVE_GMPY2 = False

ZERO = Rat(0)
ONE = Rat(1)
HALF = Rat(1, 2)


def rat(num, den=1):
    """Build a rational from integers or from another rational."""
    return Rat(num, den)


def parse_rat(s):
    """Parse canonical "p/q" (also accepts bare "p")."""
    s = s.strip()
    if "/" in s:
        p, q = s.split("/", 1)
        return Rat(int(p), int(q))
    return Rat(int(s))


def render_rat(r):
    """Canonical "p/q" rendering, lowest terms, q > 0, q always explicit."""
    return f"{r.numerator}/{r.denominator}"


def rat_floor(r):
    return r.numerator // r.denominator


def rat_ceil(r):
    return -((-r.numerator) // r.denominator)


def is_integral(r):
    return r.denominator == 1


def as_float(r):
    """Non-authoritative decimal approximation for report readability."""
    return int(r.numerator) / int(r.denominator)
