import pytest

from crossopt.brute import (
    brute_general_mcst,
    enumerate_spanning_trees,
    kirchhoff_count,
    min_max_violation_over_trees,
)
from crossopt.errors import InstanceError, SizeGuardError
from crossopt.generators import (
    brute_discrepancy,
    gadget_graph,
    gen_edge_cover_tight,
    gen_mcst_gap,
    gen_planar_mincut_gap,
    hadamard_sets,
    reduce_uniform_crossing_to_mcst,
    tree_polytope_membership_certificate,
    tree_to_subset,
    yes_case_tree,
)
from crossopt.graphs import iter_bits
from crossopt.lpengine import separate_lattice
from crossopt.rational import Rat


# -- hadamard family ------------------------------------------------------------


def test_hadamard_sets_structure():
    sets = hadamard_sets(4)
    assert sets[0] == 0b1111  # all-plus row
    assert sorted(s.bit_count() for s in sets[1:]) == [2, 2, 2]
    with pytest.raises(InstanceError):
        hadamard_sets(6)


def test_discrepancy_brute_force_both_orders():
    sets = hadamard_sets(4)
    rho, witness = brute_discrepancy(sets, 4)
    rho_rev, _ = brute_discrepancy(sets, 4, reverse=True)
    assert rho == rho_rev
    worst = max(abs(2 * (witness & s).bit_count() - s.bit_count()) for s in sets)
    assert worst == rho


# -- spanning tree gap -----------------------------------------------------------


def test_mcst_gap_e4_certificates():
    inst, rep = gen_mcst_gap(4)
    assert rep.lp_feasible and rep.claim_ok
    assert rep.integral_min_violation >= Rat(rep.details["discrepancy"], 2) - 1
    # the fractional point is the exact average of all spanning trees
    point = {e.id: Rat(3, 4) for e in inst.graph.edges}
    assert tree_polytope_membership_certificate(inst.graph, point)
    # per-tree load identity |T & U_j| = |S_j| + |X & S_j|
    sets = hadamard_sets(4)
    for tree in enumerate_spanning_trees(inst.graph):
        x = tree_to_subset(4, tree)
        for j, s in enumerate(sets):
            u_mask, _ = inst.bounds[2 * j]
            assert (tree & u_mask).bit_count() == s.bit_count() + (x & s).bit_count()


def test_mcst_gap_e8_runs_and_certifies():
    inst, rep = gen_mcst_gap(8)
    assert rep.lp_feasible and rep.claim_ok
    assert rep.details["method"] == "tree-exhaustive"


def test_mcst_gap_rejects_other_sizes():
    with pytest.raises(SizeGuardError):
        gen_mcst_gap(5)


def test_gap_instance_has_no_feasible_tree():
    inst, rep = gen_mcst_gap(4)
    result = brute_general_mcst(inst)
    if rep.integral_min_violation > 0:
        assert result.optimum is None


# -- planar min-cut gap ------------------------------------------------------------


def test_planar_gap_k2_full_certificates():
    inst, rep = gen_planar_mincut_gap(2)
    assert rep.lp_feasible
    assert rep.integral_min_violation == 1 == rep.claimed_bound
    assert rep.claim_ok
    # the fractional point satisfies every member with equality
    point = {e: Rat(1, 4) for e in range(8)}
    assert separate_lattice(point, 0, inst.lat).feasible
    for j in range(inst.lat.size):
        load = sum(point[e] for e in iter_bits(inst.lat.rho[j]))
        assert load == Rat(inst.lat.rank[j])
    # the witness hitting set genuinely hits every path
    witness = rep.witness
    assert all(witness & inst.lat.rho[j] for j in range(inst.lat.size))


def test_planar_gap_k3_certifies():
    inst, rep = gen_planar_mincut_gap(3)
    assert rep.claim_ok and rep.integral_min_violation == 2
    assert rep.details["method"] == "subset-exhaustive"


def test_planar_gap_k4_layer_factored():
    inst, rep = gen_planar_mincut_gap(4)
    assert rep.claim_ok and rep.integral_min_violation == 3
    assert rep.details["method"] == "layer-factored-exhaustive"


def test_planar_gap_guard():
    with pytest.raises(SizeGuardError):
        gen_planar_mincut_gap(5)


# -- edge cover tight example ---------------------------------------------------------


def test_edge_cover_structure():
    inst = gen_edge_cover_tight(1)
    assert inst.delta == 1
    assert inst.constraints[0].elems | inst.constraints[1].elems == 0b1111
    assert inst.constraints[0].elems & inst.constraints[1].elems == 0
    with pytest.raises(SizeGuardError):
        gen_edge_cover_tight(4)


# -- reduction gadget -------------------------------------------------------------------


def test_gadget_tree_bijection_small():
    for e in (2, 3):
        graph = gadget_graph(e)
        trees = enumerate_spanning_trees(graph)
        assert len(trees) == 4**e == kirchhoff_count(graph)
        seen = {}
        for tree in trees:
            x = tree_to_subset(e, tree)
            seen.setdefault(x, 0)
            seen[x] += 1
        assert sorted(seen) == list(range(1 << e))
        assert all(count == 2**e for count in seen.values())


def test_reduction_yes_case_meets_special_bound_exactly():
    e, t = 3, 2
    basis = 0b101
    inst = reduce_uniform_crossing_to_mcst(e, t, [(0b011, 1)])
    tree = yes_case_tree(e, basis)
    assert inst.graph.is_spanning_tree(tree)
    special_mask, special_bound = inst.bounds[-1]
    assert (tree & special_mask).bit_count() == 2 * e - t == special_bound
    u_mask, u_bound = inst.bounds[0]
    assert Rat((tree & u_mask).bit_count()) <= u_bound


def test_reduction_dichotomy_e3_t2():
    e, t = 3, 2
    # bound |I & {0,1}| <= 1 on the base sets
    inst = reduce_uniform_crossing_to_mcst(e, t, [(0b011, 1)])
    trees = enumerate_spanning_trees(inst.graph)
    feasible = [
        tree
        for tree in trees
        if all(
            Rat((tree & emask).bit_count()) <= bound for emask, bound in inst.bounds
        )
    ]
    # feasible trees exist exactly for bases respecting the bound
    bases = {tree_to_subset(e, tree) for tree in feasible}
    expected = {
        x
        for x in range(1 << e)
        if x.bit_count() == t and (x & 0b011).bit_count() <= 1
    }
    assert bases == expected
    # every feasible tree meets the special bound with equality
    special_mask, special_bound = inst.bounds[-1]
    for tree in feasible:
        assert Rat((tree & special_mask).bit_count()) == special_bound


def test_reduction_no_case_violates():
    # bound 0 on every pair: no basis of size 2 fits, so every tree
    # violates either a pair bound or the special bound
    e, t = 3, 2
    pairs = [(0b011, 0), (0b101, 0), (0b110, 0)]
    inst = reduce_uniform_crossing_to_mcst(e, t, pairs)
    viol, witness = min_max_violation_over_trees(
        inst.graph, list(inst.bounds)
    )
    assert viol >= 1


def test_reduction_validates_inputs():
    with pytest.raises(InstanceError):
        reduce_uniform_crossing_to_mcst(2, 3, [])
    with pytest.raises(InstanceError):
        reduce_uniform_crossing_to_mcst(2, 1, [(0b100, 1)])
