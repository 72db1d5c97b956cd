from dataclasses import replace
from fractions import Fraction
from itertools import product

import pytest

from torsod import (
    GenerationCertificate,
    block_labels,
    canned_example,
    class_group,
    exceptional_lattice,
    extend_block_label,
    fiber_transfer_vanishes,
    fully_faithful_check,
    generation_certificate,
    generator_count_identity,
    in_spanning_window,
    pushforward,
    semiorthogonality_check,
    solved_exceptional_exponent,
    spanning_classes,
    transfer_is_invertible,
    verify_certificate,
)
from torsod.errors import RequiresExtraction


def test_spanning_classes_a1_half(a1_half):
    spans = spanning_classes(a1_half.datum)
    assert sorted(s.w for s in spans) == [Fraction(-1, 2), Fraction(-1, 2), 0, 0]
    labels = {s.label for s in spans}
    assert len(labels) == 4
    # the trivial class is always in the window
    assert (0, 0, 0) in labels


def test_spanning_counts(a2_third, a1_half_line):
    assert len(spanning_classes(a2_third.datum)) == 9
    assert len(spanning_classes(a1_half_line.datum)) == 4


def test_class_group_a1_half(a1_half):
    group = class_group(a1_half.datum)
    assert group.free_rank == 1
    assert group.invariant_factors == (2,)


def test_blocks_a1_half(a1_half):
    blocks = block_labels(a1_half.datum)
    assert [(b.label, b.w) for b in blocks] == [
        ((0, 1), Fraction(1, 2)),
        ((1, 0), Fraction(1, 2)),
        ((0, 2), Fraction(1)),
        ((1, 1), Fraction(1)),
    ]
    assert all(b.witness == 0 for b in blocks)
    assert all(b.aliases == () for b in blocks)
    # block residues fill the complement of the spanning residues mod 4
    assert sorted((b.label[0] + b.label[1]) % 4 for b in blocks) == [1, 1, 2, 2]


def test_blocks_a2_third(a2_third):
    blocks = block_labels(a2_third.datum)
    assert len(blocks) == 18
    ws = sorted(set(b.w for b in blocks))
    assert ws == [Fraction(1, 3), Fraction(2, 3), Fraction(1),
                  Fraction(4, 3), Fraction(5, 3), Fraction(2)]
    for w in ws:
        assert sum(1 for b in blocks if b.w == w) == 3


def test_blocks_merge_on_twist(twist_datum):
    blocks = block_labels(twist_datum)
    assert len(blocks) == 4
    assert [b.label for b in blocks] == [(0, 1), (1, 0), (0, 2), (1, 1)]
    for b in blocks:
        assert b.witness == 0
        assert len(b.aliases) == 1
    lhs, rhs, parts = generator_count_identity(twist_datum)
    assert (lhs, rhs) == (16, 16)
    assert parts == {"spanning": 8, "blocks": 4, "fiber_order": 2}


def test_count_identities(a1_half, a2_third, a1_half_line):
    assert generator_count_identity(a1_half.datum)[:2] == (8, 8)
    assert generator_count_identity(a2_third.datum)[:2] == (27, 27)
    lhs, rhs, parts = generator_count_identity(a1_half_line.datum)
    assert (lhs, rhs) == (8, 8)
    assert parts == {"spanning": 4, "blocks": 4, "fiber_order": 1}


def test_requires_extraction():
    crepant = canned_example("a1-half-crepant").datum
    with pytest.raises(RequiresExtraction):
        spanning_classes(crepant)
    with pytest.raises(RequiresExtraction):
        block_labels(crepant)
    contraction = canned_example("smooth-blowup").datum
    with pytest.raises(RequiresExtraction):
        generation_certificate(contraction, [(0, 0)])


def test_pushforward_formula(a1_half):
    d = a1_half.datum
    f = pushforward(d, (3, 3, 0))
    assert f.w == 3
    assert f.higher_vanishing
    assert not f.sheaf_formula_applies
    g = pushforward(d, (0, -1, 0))
    assert g.w == Fraction(-1, 2)
    assert g.higher_vanishing and g.sheaf_formula_applies
    h = pushforward(d, (0, 0, 3))
    assert h.w == -6
    assert not h.higher_vanishing
    assert h.sheaf_formula_applies
    assert h.label == (0, 0)


def test_in_spanning_window(a1_half):
    d = a1_half.datum
    assert in_spanning_window(d, (0, 0, 0))
    assert in_spanning_window(d, (-1, 0, 0))
    assert not in_spanning_window(d, (1, 0, 0))    # w = 1/2 > 0
    assert not in_spanning_window(d, (-2, 0, 0))   # w = -1, on the boundary


def test_solved_exponent_and_divisibility(a1_half):
    d = a1_half.datum
    assert solved_exceptional_exponent(d, (1, 1)) == Fraction(1, 2)
    assert solved_exceptional_exponent(d, (2, 2)) == 1
    # certificate fires exactly when the solved exponent is not an integer
    assert fiber_transfer_vanishes(d, (0, 1))
    assert fiber_transfer_vanishes(d, (1, 2))
    assert not fiber_transfer_vanishes(d, (2, 2))
    assert not fiber_transfer_vanishes(d, (0, 0))
    # (1, 3) slips past the divisibility test but fails the exact one
    assert not fiber_transfer_vanishes(d, (1, 3))
    assert not transfer_is_invertible(d, (1, 3))
    assert transfer_is_invertible(d, (2, 2))
    assert transfer_is_invertible(d, (0, 4))


def test_transfer_vanishing_symmetric_under_negation(extraction_pairs):
    # the solved exceptional exponent negates with the label, so the
    # divisibility certificate cannot distinguish k from -k
    for pair in extraction_pairs:
        d = pair.datum
        for head in product(range(-3, 4), repeat=d.alpha):
            k = head + (0,) * (d.n - d.alpha)
            neg = tuple(-x for x in k)
            assert fiber_transfer_vanishes(d, k) == \
                fiber_transfer_vanishes(d, neg)


def test_exceptional_lattice_order(a1_half):
    tau = exceptional_lattice(a1_half.datum)
    assert tau.free_rank == 0
    assert tau.order() == 8
    assert tau.contains((2, 2))
    assert not tau.contains((1, 3))


def test_extend_block_label(a1_half_line):
    assert extend_block_label(a1_half_line.datum, (0, 1)) == (0, 1, 0)


def test_fully_faithful_check(extraction_pairs):
    for pair in extraction_pairs:
        report = fully_faithful_check(pair.datum)
        assert report.ok, pair.name
        assert report.head_ok
        n_span = len(spanning_classes(pair.datum))
        assert len(report.pairs) == n_span * n_span


def test_semiorthogonality_check(extraction_pairs):
    for pair in extraction_pairs:
        report = semiorthogonality_check(pair.datum)
        assert report.ok, pair.name
        kinds = {e.kind for e in report.entries}
        assert "span-block" in kinds


def test_semiorthogonality_uses_lattice_reason(twist_datum):
    report = semiorthogonality_check(twist_datum)
    assert report.ok
    lattice_entries = [e for e in report.entries if e.reason == "lattice"]
    assert lattice_entries
    assert all(e.kind == "equal-w" for e in lattice_entries)


# ---------------------------------------------------------------------------
# Generation certificates


def small_cert(a1_half):
    return generation_certificate(a1_half.datum, [(1, 1)])


def test_certificate_structure(a1_half):
    cert = small_cert(a1_half)
    verdict = verify_certificate(a1_half.datum, cert)
    assert verdict.ok
    by_kind = {}
    for node in cert.nodes:
        by_kind.setdefault(node.kind, []).append(node)
    assert len(by_kind["koszul"]) == 3
    assert len(by_kind["block"]) == 3
    assert len(by_kind["span"]) == 5
    root_key = cert.targets[0][1]
    assert root_key == "L|1,1|0"
    root = cert.node_map()[root_key]
    assert root.w == 1 and len(root.children) == 3


def test_certificate_nodes_shared_across_targets(a1_half):
    cert = generation_certificate(a1_half.datum, [(1, 1), (1, 1), (0, 1)])
    assert len(cert.targets) == 3
    keys = [node.key for node in cert.nodes]
    assert len(keys) == len(set(keys))


def tamper(cert, **kwargs):
    return GenerationCertificate(
        targets=kwargs.get("targets", cert.targets),
        nodes=kwargs.get("nodes", cert.nodes))


def swap_node(cert, key, **changes):
    nodes = tuple(replace(n, **changes) if n.key == key else n
                  for n in cert.nodes)
    return tamper(cert, nodes=nodes)


def codes_of(d, cert):
    return {v[0] for v in verify_certificate(d, cert).violations}


def test_verify_rejects_duplicate_key(a1_half):
    cert = small_cert(a1_half)
    doubled = tamper(cert, nodes=cert.nodes + (cert.nodes[0],))
    assert "DUPLICATE_KEY" in codes_of(a1_half.datum, doubled)


def test_verify_rejects_bad_label(a1_half):
    cert = small_cert(a1_half)
    bad = swap_node(cert, "L|0,0|0", label=(0, 0, 0))
    assert "BAD_LABEL" in codes_of(a1_half.datum, bad)


def test_verify_rejects_w_mismatch(a1_half):
    cert = small_cert(a1_half)
    bad = swap_node(cert, "L|0,0|0", w=Fraction(1, 7))
    assert "W_MISMATCH" in codes_of(a1_half.datum, bad)


def test_verify_rejects_leaf_window(a1_half):
    d = a1_half.datum
    cert = small_cert(a1_half)
    # push a spanning leaf far below the window, keeping w consistent
    bad = swap_node(cert, "L|0,0|0", witness=3, w=Fraction(-6))
    assert "LEAF_WINDOW" in codes_of(d, bad)


def test_verify_rejects_leaf_children(a1_half):
    cert = small_cert(a1_half)
    bad = swap_node(cert, "L|0,0|0", children=("L|-1,0|0",))
    assert "LEAF_CHILDREN" in codes_of(a1_half.datum, bad)


def test_verify_rejects_node_window(a1_half):
    cert = small_cert(a1_half)
    bad = swap_node(cert, "L|1,1|0", witness=-1, w=Fraction(3))
    assert "NODE_WINDOW" in codes_of(a1_half.datum, bad)


def test_verify_rejects_missing_node(a1_half):
    cert = small_cert(a1_half)
    pruned = tamper(cert, nodes=tuple(n for n in cert.nodes
                                      if n.key != "L|0,0|0"))
    assert "MISSING_NODE" in codes_of(a1_half.datum, pruned)


def test_verify_rejects_corner_set(a1_half):
    cert = small_cert(a1_half)
    root = cert.node_map()["L|1,1|0"]
    children = tuple("L|-1,0|0" if c == "L|0,0|0" else c
                     for c in root.children)
    bad = swap_node(cert, "L|1,1|0", children=children)
    assert "CORNER_SET" in codes_of(a1_half.datum, bad)


def test_verify_rejects_measure_and_cycle(a1_half):
    cert = small_cert(a1_half)
    root = cert.node_map()["L|1,1|0"]
    children = root.children[:-1] + ("L|1,1|0",)
    bad = swap_node(cert, "L|1,1|0", children=children)
    codes = codes_of(a1_half.datum, bad)
    assert "MEASURE" in codes
    assert "CYCLE" in codes


def test_verify_rejects_block_mismatch(a1_half):
    cert = small_cert(a1_half)
    bad = swap_node(cert, "L|1,1|0", block_key="B|0,1|0")
    assert "BLOCK_MISMATCH" in codes_of(a1_half.datum, bad)


def test_verify_rejects_bad_kind(a1_half):
    cert = small_cert(a1_half)
    bad = swap_node(cert, "L|0,0|0", kind="mystery")
    assert "BAD_KIND" in codes_of(a1_half.datum, bad)


def test_verify_rejects_target_missing(a1_half):
    cert = small_cert(a1_half)
    bad = tamper(cert, targets=(((1, 1), "L|9,9|0"),))
    assert "TARGET_MISSING" in codes_of(a1_half.datum, bad)


def test_verify_rejects_target_label(a1_half):
    cert = small_cert(a1_half)
    bad = tamper(cert, targets=(((2, 1), "L|1,1|0"),))
    assert "TARGET_LABEL" in codes_of(a1_half.datum, bad)


def test_verify_rejects_witness_window(a1_half):
    d = a1_half.datum
    cert = generation_certificate(d, [(0, 0)])
    # shift the root witness one stride: w leaves (-sigma_alpha, -sigma]
    bad = swap_node(cert, "L|0,0|0", witness=1, w=Fraction(-2))
    assert "WITNESS_WINDOW" in codes_of(d, bad)


def test_certificates_verify_on_catalog(extraction_pairs):
    from itertools import product
    for pair in extraction_pairs:
        d = pair.datum
        targets = list(product(range(-2, 3), repeat=d.n))
        cert = generation_certificate(d, targets)
        verdict = verify_certificate(d, cert)
        assert verdict.ok, (pair.name, verdict.violations[:3])
        # every node's w sits in the half-open fundamental window
        for node in cert.nodes:
            if node.kind == "span":
                assert node.w <= 0
            else:
                assert node.w > 0
