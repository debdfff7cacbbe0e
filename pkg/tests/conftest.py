import pytest

from crossopt.graphs import Graph
from crossopt.instances import IntersectionInstance, McstInstance
from crossopt.oracles import ContraPolymatroidPair, CrossingConstraint, MatroidOracle
from crossopt.rational import Rat


@pytest.fixture
def triangle():
    return Graph.from_pairs(3, [(0, 1), (1, 2), (0, 2)], [1, 1, 1])


@pytest.fixture
def four_cycle():
    return Graph.from_pairs(4, [(0, 1), (1, 2), (2, 3), (3, 0)], [1, 1, 1, 1])


def edge_cover_pair(n):
    """Two per-side covering functions of the 4n-cycle bipartition."""
    length = 4 * n
    incident = {v: ((v - 1) % length, v) for v in range(length)}

    def side(parity):
        out = []
        for s in range(1 << length):
            count = 0
            for v in range(parity, length, 2):
                a, b = incident[v]
                if (s >> a) & 1 and (s >> b) & 1:
                    count += 1
            out.append(count)
        return tuple(out)

    return ContraPolymatroidPair(length, side(0), side(1))


@pytest.fixture
def edge_cover_4cycle():
    pair = edge_cover_pair(1)
    cons = (
        CrossingConstraint(0b0101, None, Rat(1)),
        CrossingConstraint(0b1010, None, Rat(1)),
    )
    return IntersectionInstance(pair, (Rat(1),) * 4, cons)


def triangle_graphic_matroid():
    def rank(s):
        return min(s.bit_count(), 2)

    return MatroidOracle(3, tuple(rank(s) for s in range(8)))


def k4_graphic_matroid():
    ends = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]

    def rank(s):
        parent = list(range(4))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        r = 0
        for e in range(6):
            if (s >> e) & 1:
                u, v = ends[e]
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
                    r += 1
        return r

    return MatroidOracle(6, tuple(rank(s) for s in range(64)))


@pytest.fixture
def tree_instance():
    graph = Graph.from_pairs(4, [(0, 1), (1, 2), (2, 3)], [5, 2, 7])
    return McstInstance(graph, ((0b0011, Rat(2)), (0b0100, Rat(2))))
