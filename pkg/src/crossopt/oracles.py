"""Table-based matroid, contra-polymatroid, and lattice oracles.

All oracles are explicit (every subset / member enumerated) so that the
axioms the algorithms rely on can be verified exhaustively at
construction time.  Construction fails loudly with the violated axiom
and a witness; nothing is ever assumed.

Submodularity and supermodularity are verified through the equivalent
local exchange conditions (for all S and e != f outside S, compare
r(S+e) + r(S+f) against r(S+e+f) + r(S)), which cover exactly the same
inequalities as the pairwise definition.
"""

from dataclasses import dataclass

from .errors import InstanceError
from .graphs import iter_bits

MAX_GROUND = 16


def _check_local_exchange(table, n, direction, name):
    """direction=+1 checks submodular, -1 checks supermodular."""
    for s in range(1 << n):
        free = [e for e in range(n) if not (s >> e) & 1]
        for a in range(len(free)):
            for b in range(a + 1, len(free)):
                e, f = free[a], free[b]
                lhs = table[s | (1 << e)] + table[s | (1 << f)]
                rhs = table[s | (1 << e) | (1 << f)] + table[s]
                if direction * (lhs - rhs) < 0:
                    raise InstanceError(
                        f"{name} violated at S={s:#x}, e={e}, f={f}"
                    )


def supermodular_violation(table, n):
    """Return a witness (S, e, f) if the table is not supermodular."""
    try:
        _check_local_exchange(table, n, -1, "supermodularity")
    except InstanceError:
        for s in range(1 << n):
            free = [e for e in range(n) if not (s >> e) & 1]
            for a in range(len(free)):
                for b in range(a + 1, len(free)):
                    e, f = free[a], free[b]
                    lhs = table[s | (1 << e)] + table[s | (1 << f)]
                    rhs = table[s | (1 << e) | (1 << f)] + table[s]
                    if lhs > rhs:
                        return (s, e, f)
    return None


@dataclass(frozen=True)
class MatroidOracle:
    """Explicit rank table over all subsets of a ground set of size n."""

    n: int
    rank: tuple

    def __post_init__(self):
        if self.n > MAX_GROUND:
            raise InstanceError(f"ground set {self.n} exceeds {MAX_GROUND}")
        if len(self.rank) != 1 << self.n:
            raise InstanceError("rank table must cover every subset")
        if self.rank[0] != 0:
            raise InstanceError("rank of empty set must be 0")
        for e in range(self.n):
            if not 0 <= self.rank[1 << e] <= 1:
                raise InstanceError(f"rank of single element {e} must be 0 or 1")
        for s in range(1 << self.n):
            for e in range(self.n):
                if not (s >> e) & 1:
                    if self.rank[s | (1 << e)] < self.rank[s]:
                        raise InstanceError(
                            f"monotonicity violated at S={s:#x} + element {e}"
                        )
        _check_local_exchange(self.rank, self.n, +1, "matroid submodularity")

    def rank_of(self, mask):
        return self.rank[mask]

    @property
    def full_rank(self):
        return self.rank[(1 << self.n) - 1]


@dataclass(frozen=True)
class ContraPolymatroidPair:
    """Two supermodular functions over the same ground set, given as
    full tables; covering constraints are x(S) >= max(r1(S), r2(S))."""

    n: int
    r1: tuple
    r2: tuple

    def __post_init__(self):
        if self.n > MAX_GROUND:
            raise InstanceError(f"ground set {self.n} exceeds {MAX_GROUND}")
        for name, table in (("r1", self.r1), ("r2", self.r2)):
            if len(table) != 1 << self.n:
                raise InstanceError(f"{name} table must cover every subset")
            if table[0] != 0:
                raise InstanceError(f"{name}(empty) must be 0")
            if any(v < 0 for v in table):
                raise InstanceError(f"{name} must be non-negative")
            _check_local_exchange(table, self.n, -1, f"{name} supermodularity")

    def requirement(self, mask):
        return max(self.r1[mask], self.r2[mask])


class LatticeOracle:
    """Finite lattice with explicit order, meet/join tables, a ground-set
    image map rho, and an integer rank per member."""

    def __init__(self, ground_n, rho, rank, leq, meet, join):
        self.ground_n = ground_n
        self.rho = tuple(rho)
        self.rank = tuple(rank)
        self.meet = meet
        self.join = join
        m = len(self.rho)
        self.size = m
        if len(self.rank) != m or len(leq) != m:
            raise InstanceError("lattice tables must agree on member count")
        # above[i] = bitmask over members j with i <= j; below[i] dual
        self.above = [0] * m
        self.below = [0] * m
        for i in range(m):
            for j in range(m):
                if leq[i][j]:
                    self.above[i] |= 1 << j
                    self.below[j] |= 1 << i
        self._validate()

    @classmethod
    def build(cls, ground_n, rho, rank, leq_fn, meet_fn, join_fn):
        m = len(rho)
        leq = [[leq_fn(i, j) for j in range(m)] for i in range(m)]
        meet = [[meet_fn(i, j) for j in range(m)] for i in range(m)]
        join = [[join_fn(i, j) for j in range(m)] for i in range(m)]
        return cls(ground_n, rho, rank, leq, meet, join)

    def leq(self, i, j):
        return bool((self.above[i] >> j) & 1)

    def lt(self, i, j):
        return i != j and self.leq(i, j)

    def comparable(self, i, j):
        return self.leq(i, j) or self.leq(j, i)

    def members_between(self, lo, hi):
        """Bitmask of members b with lo <= b <= hi."""
        return self.above[lo] & self.below[hi]

    def _validate(self):
        m = self.size
        if any(r < 0 for r in self.rank):
            raise InstanceError("lattice ranks must be non-negative integers")
        for i in range(m):
            if not (self.above[i] >> i) & 1:
                raise InstanceError(f"order not reflexive at member {i}")
            for j in range(m):
                if i != j and self.leq(i, j) and self.leq(j, i):
                    raise InstanceError(f"order not antisymmetric at ({i},{j})")
        for i in range(m):
            acc = self.above[i]
            for j in iter_bits(self.above[i]):
                if self.above[j] & ~acc:
                    raise InstanceError(f"order not transitive through ({i},{j})")
        has_elem = [0] * self.ground_n
        for i in range(m):
            for e in iter_bits(self.rho[i]):
                has_elem[e] |= 1 << i
        for a in range(m):
            for b in range(a, m):
                mt, jn = self.meet[a][b], self.join[a][b]
                if mt != self.meet[b][a] or jn != self.join[b][a]:
                    raise InstanceError(f"meet/join not commutative at ({a},{b})")
                if not (self.leq(mt, a) and self.leq(mt, b)):
                    raise InstanceError(f"meet not below both at ({a},{b})")
                if not (self.leq(a, jn) and self.leq(b, jn)):
                    raise InstanceError(f"join not above both at ({a},{b})")
                outside = (self.rho[mt] | self.rho[jn]) & ~(self.rho[a] | self.rho[b])
                if outside:
                    raise InstanceError(
                        f"image submodularity violated at ({a},{b})"
                    )
                if self.rank[a] + self.rank[b] > self.rank[mt] + self.rank[jn]:
                    raise InstanceError(
                        f"rank supermodularity violated at ({a},{b})"
                    )
        for a in range(m):
            for c in iter_bits(self.above[a]):
                common = self.rho[a] & self.rho[c]
                if not common:
                    continue
                between = self.members_between(a, c)
                for e in iter_bits(common):
                    bad = between & ~has_elem[e]
                    if bad:
                        b = (bad & -bad).bit_length() - 1
                        raise InstanceError(
                            f"consecutive property violated: {a}<={b}<={c}, element {e}"
                        )


def matroid_to_lattice(matroid):
    """Subset lattice of a matroid ground set: order by inclusion, meet
    and join are intersection and union, the image map is the identity,
    and the rank of S is rank(E) - rank(E without S)."""
    n = matroid.n
    if n > MAX_GROUND:
        raise InstanceError(f"ground set {n} exceeds {MAX_GROUND}")
    full = (1 << n) - 1
    members = list(range(1 << n))
    rank = [matroid.full_rank - matroid.rank_of(full & ~s) for s in members]
    return LatticeOracle.build(
        n,
        rho=members,
        rank=rank,
        leq_fn=lambda a, b: a & b == a,
        meet_fn=lambda a, b: a & b,
        join_fn=lambda a, b: a | b,
    )


@dataclass(frozen=True)
class CrossingConstraint:
    """a <= x(elements) <= b; lower may be absent (None)."""

    elems: int
    lower: object
    upper: object

    def __post_init__(self):
        if self.lower is not None and self.lower > self.upper:
            raise InstanceError("constraint lower bound exceeds upper bound")


def max_frequency(constraints, n):
    """Largest number of constraint sets any single element belongs to."""
    best = 0
    for e in range(n):
        freq = sum(1 for c in constraints if (c.elems >> e) & 1)
        best = max(best, freq)
    return best
