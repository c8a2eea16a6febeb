import math
import random

import numpy as np
import pytest

from _sweep import decompositions, sweep
from lapsep.criteria import (
    RangeProjector,
    Verdict,
    degree_criterion,
    line_sum_symmetric_blocks,
    ppt_criterion,
    range_membership,
    realignment_criterion,
    theorem1_check,
    verdict,
)
from lapsep.errors import DimensionMismatch, ZeroVector
from lapsep.graph import build_graph, density_matrix, from_bitmask, vertex_pairs
from lapsep.harness import counterexample_graph, family
from lapsep.linalg import realign, singular_values

STAR = family("star", 2, 2)
K4 = family("complete", 2, 2)
ENTANGLED_EDGE = build_graph(2, 2, [((1, 1), (2, 2))])
# PPT, not flagged by realignment, cross blocks not line-sum symmetric
UNDECIDED = build_graph(3, 3, [((1, 1), (3, 3)), ((1, 3), (2, 1)), ((2, 3), (3, 1)), ((2, 3), (3, 3))])


def test_degree_criterion_examples():
    assert not degree_criterion(STAR)
    assert degree_criterion(K4)
    assert degree_criterion(counterexample_graph())


def test_ppt_examples():
    res = ppt_criterion(density_matrix(STAR), 2, 2)
    assert not res.holds
    assert abs(res.min_eigenvalue - (3 - math.sqrt(17)) / 12) < 1e-12
    cx = ppt_criterion(density_matrix(counterexample_graph()), 3, 3)
    assert cx.holds and cx.exact
    # a float input takes the spectral decision only
    assert ppt_criterion(density_matrix(K4).to_numpy(), 2, 2).holds
    with pytest.raises(DimensionMismatch):
        ppt_criterion(density_matrix(K4), 2, 3)


def test_ppt_holds_for_decomposer_output():
    dec = decompositions(2, 2)
    for row in sweep(2, 2):
        if row.degree:
            assert ppt_criterion(dec[row.mask][0].matrix().real, 2, 2).holds


def test_realignment_examples():
    x = np.array([1.0, 2.0]) / math.sqrt(5)
    y = np.array([1.0, -1.0, 1.0]) / math.sqrt(3)
    product = np.kron(np.outer(x, x), np.outer(y, y))
    res = realignment_criterion(product, 2, 3)
    assert abs(res.trace_norm - 1) < 1e-12 and not res.flags_entangled
    cx = realignment_criterion(density_matrix(counterexample_graph()), 3, 3)
    assert abs(cx.trace_norm - (4 * math.sqrt(2) + 2 * math.sqrt(3)) / 8) < 1e-12
    assert cx.flags_entangled
    edge = realignment_criterion(density_matrix(ENTANGLED_EDGE), 2, 2)
    oracle = np.linalg.svd(realign(density_matrix(ENTANGLED_EDGE), 2, 2), compute_uv=False).sum()
    assert edge.flags_entangled and abs(edge.trace_norm - oracle) < 1e-12


def test_line_sum_examples():
    star = line_sum_symmetric_blocks(density_matrix(STAR), 2, 2)
    assert not star.blocks_line_sum_symmetric
    assert star.in_s
    ok = line_sum_symmetric_blocks(density_matrix(K4), 2, 2)
    assert ok.certifies_separable
    # a float copy gives the same answer as the exact matrix
    assert line_sum_symmetric_blocks(density_matrix(STAR).to_numpy(), 2, 2) == star


@pytest.mark.parametrize("q", [2, 3])
def test_line_sum_equivalent_to_degree_on_two_rows(q):
    for row in sweep(2, q):
        res = line_sum_symmetric_blocks(row.rho, 2, q)
        assert res.blocks_line_sum_symmetric == row.degree
        assert res.in_s


def test_range_membership_examples():
    ones2, ones3 = np.ones(2), np.ones(3)
    with pytest.raises(ZeroVector):
        range_membership(density_matrix(K4), np.zeros(2), ones2)
    # all-ones is in the kernel of every rho_G, and of rho^Gamma under the degree test
    for row in sweep(2, 2):
        m = range_membership(row.rho, ones2, ones2)
        assert not m.in_range_of_rho
        if row.degree:
            assert not m.in_range_of_rho_pt
    for row in sweep(2, 3):
        if row.degree:
            m = range_membership(row.rho, ones2, ones3)
            assert not (m.in_range_of_rho or m.in_range_of_rho_pt)
    # with the degree test failing, rho^Gamma can have full rank
    assert range_membership(density_matrix(STAR), ones2, ones2).in_range_of_rho_pt


def test_range_membership_of_product_eigenvector():
    rho = density_matrix(build_graph(2, 2, [((1, 1), (1, 2))]))
    m = range_membership(rho, np.array([1, 0]), np.array([1, -1]))
    assert m.in_range_of_rho and m.in_range_of_rho_pt
    assert m.residual_rho < 1e-12
    assert not range_membership(rho, np.array([0, 1]), np.array([1, -1])).in_range_of_rho


def test_range_projector_complex():
    v = np.array([1, 1j, 0, 0]) / math.sqrt(2)
    proj = RangeProjector(np.outer(v, v.conj()))
    assert proj.contains(v)
    assert not proj.contains(np.array([1, -1j, 0, 0]))
    assert not proj.contains(np.array([0, 0, 1, 0]))


def test_degree_ppt_consistency_examples():
    star = theorem1_check(STAR)
    assert star.consistent and not star.degree and not star.ppt
    assert theorem1_check(K4).consistent and theorem1_check(K4).ppt
    assert all(theorem1_check(row.graph).consistent for row in sweep(2, 2))


def test_degree_ppt_consistency_on_random_graphs():
    rnd = random.Random(1234)
    checked = 0
    while checked < 10_000:
        p, q = rnd.randint(1, 4), rnd.randint(1, 4)
        if p * q < 2:
            continue
        g = from_bitmask(p, q, rnd.randrange(1, 1 << len(vertex_pairs(p * q))))
        assert theorem1_check(g).consistent, g
        checked += 1


def test_verdict_examples():
    assert verdict(STAR).verdict is Verdict.ENTANGLED_NPT
    rep = verdict(K4)
    assert rep.verdict is Verdict.SEPARABLE_CERTIFIED and rep.decomposition is not None
    assert verdict(counterexample_graph()).verdict is Verdict.ENTANGLED_PPT_REALIGNMENT
    three = verdict(family("complete", 3, 3))
    assert three.verdict is Verdict.SEPARABLE_CERTIFIED and three.line_sum.certifies_separable
    und = verdict(UNDECIDED)
    assert und.verdict is Verdict.UNDECIDED_PPT and und.decomposition is None
    assert und.ppt.holds and not und.realignment.flags_entangled and not und.line_sum_symmetric_blocks
    assert str(Verdict.UNDECIDED_PPT) == "UNDECIDED_PPT"


def test_single_row_or_column_always_separable():
    for p, q in [(1, 2), (1, 4), (4, 1), (1, 5)]:
        pairs = len(vertex_pairs(p * q))
        for mask in range(1, 1 << pairs, max(1, (1 << pairs) // 200)):
            assert verdict(from_bitmask(p, q, mask)).verdict is Verdict.SEPARABLE_CERTIFIED


@pytest.mark.parametrize("q", [2, 3])
def test_verdict_sound_on_two_row_sweeps(q):
    dec = decompositions(2, q)
    for row in sweep(2, q):
        if not row.degree:
            continue
        # the certified state really is separable: realignment cannot flag it
        tn = float(np.sum(singular_values(realign(dec[row.mask][0].matrix().real, 2, q))))
        assert tn <= 1 + 1e-9
