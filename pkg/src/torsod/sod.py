"""Semiorthogonal decomposition combinatorics for a divisorial extraction.

Everything in this module is exact integer/rational arithmetic on a validated
:class:`~torsod.extraction.ExtractionDatum`; no fans and no cohomology.  The
central quantity is the weighted exponent sum

    w(k) = sum(a_i * k_i / r_i),

which is constant on divisor classes up to a known stride and controls three
windows: spanning classes live where -sigma_alpha < w <= 0, block labels
where 0 < w <= -sigma, and the two windows tile one full period of the
exceptional exponent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import ceil, floor

from . import errors, lattice
from .extraction import (
    ExtractionDatum,
    MorphismKind,
    classify,
    sigma,
    sigma_alpha,
    validate,
    weighted_sum,
    weighted_sum_partial,
)


def _require_extraction(d: ExtractionDatum) -> None:
    cls = classify(d)
    if cls.kind is not MorphismKind.EXTRACTION:
        raise errors.RequiresExtraction(
            f"datum classifies as {cls.kind.value} (sigma = {cls.sigma}); "
            "decomposition enumeration needs sigma < 0")


def in_spanning_window(d: ExtractionDatum, k) -> bool:
    """Whether the full exponent vector k satisfies 0 <= -w(k) < sigma_alpha."""
    w = weighted_sum(d, k)
    return 0 <= -w < sigma_alpha(d)


@dataclass(frozen=True)
class PushforwardFormula:
    """Image exponents of a line bundle under the contraction, with caveats."""

    label: tuple[int, ...]          # exponents on the surviving n divisors
    w: Fraction
    higher_vanishing: bool          # derived pushforwards vanish in degree > 0
    sheaf_formula_applies: bool     # the pushforward is the expected sheaf


def pushforward(d: ExtractionDatum, k) -> PushforwardFormula:
    """Drop the exceptional exponent and report when that is the whole story.

    Higher derived images vanish exactly when w(k) > -sigma_alpha, and the
    zeroth image is the reflexive sheaf with the truncated exponents exactly
    when w(k) <= 0.  Inside the spanning window both conditions hold.
    """
    w = weighted_sum(d, k)
    return PushforwardFormula(
        label=tuple(k[: d.n]),
        w=w,
        higher_vanishing=w > -sigma_alpha(d),
        sheaf_formula_applies=w <= 0,
    )


def solved_exceptional_exponent(d: ExtractionDatum, k_local) -> Fraction:
    """The unique rational k_{n+1} making w(k_local, k_{n+1}) vanish."""
    if len(k_local) != d.n:
        raise ValueError(f"local exponent vector must have length {d.n}")
    a_last = d.coefficients[-1]
    r_last = d.orders[-1]
    return -Fraction(r_last, a_last) * weighted_sum_partial(d, k_local)


def fiber_transfer_vanishes(d: ExtractionDatum, k_local) -> bool:
    """Divisibility certificate that the transfer to the fiber side is zero.

    The transfer can only be nonzero when the solved exceptional exponent is
    an integer multiple of r_{n+1}.  True means certified vanishing; False
    means no certificate from this test (the sharper lattice membership test
    lives with the block machinery).
    """
    e = solved_exceptional_exponent(d, k_local)
    divisible = e.denominator == 1 and e.numerator % d.orders[-1] == 0
    return not divisible


def exceptional_lattice(d: ExtractionDatum) -> lattice.AbelianGroup:
    """Z^alpha modulo L_tau = {(r_i <m, v_i>)_{i <= alpha} : m in M}.

    Membership in L_tau is the exact criterion for the fiber transfer of a
    label supported on the first alpha rays to be invertible rather than
    zero, so the quotient indexes the genuinely distinct transfers.
    """
    alpha = d.alpha
    cols_matrix = [[d.orders[i] * d.rays[i][j] for j in range(d.n)]
                   for i in range(alpha)]
    return lattice.cokernel(cols_matrix)


@dataclass(frozen=True)
class SpanningClass:
    """A divisor class in the spanning window, by canonical representative."""

    label: tuple[int, ...]   # length n+1
    w: Fraction


def class_group(d: ExtractionDatum) -> lattice.AbelianGroup:
    """Divisor class group of the extraction side of the local model."""
    rows = [[d.orders[i] * d.rays[i][j] for j in range(d.n)]
            for i in range(d.n + 1)]
    return lattice.cokernel(rows)


def spanning_classes(d: ExtractionDatum) -> list[SpanningClass]:
    """All divisor classes with -sigma_alpha < w <= 0, canonically represented.

    w descends to the class group because it kills the relation lattice, is
    zero on torsion, and is nonzero on the rank-one free part; that makes the
    window a finite, explicitly enumerable set of classes.
    """
    validate(d)
    _require_extraction(d)
    group = class_group(d)
    if group.free_rank != 1:
        raise errors.DegenerateDatum(
            f"class group has free rank {group.free_rank}, expected 1")
    free = group.free_lifts()[0]
    w_free = weighted_sum(d, free)
    if w_free == 0:
        raise errors.DegenerateDatum("free generator has zero weighted sum")
    for lift, _ in group.torsion_lifts():
        if weighted_sum(d, lift) != 0:
            raise errors.DegenerateDatum("torsion lift has nonzero weighted sum")

    sa = sigma_alpha(d)
    # f * w_free must land in (-sigma_alpha, 0]
    if w_free > 0:
        f_lo, f_hi = floor(-sa / w_free) + 1, 0
    else:
        f_lo, f_hi = 0, ceil(sa / -w_free) - 1

    out = []
    torsion = group.torsion_lifts()
    for f in range(f_lo, f_hi + 1):
        for combo in product(*(range(order) for _, order in torsion)):
            vec = [f * x for x in free]
            for c, (lift, _) in zip(combo, torsion):
                for j in range(len(vec)):
                    vec[j] += c * lift[j]
            rep = group.reduce(vec)
            w = weighted_sum(d, rep)
            if w != f * w_free:
                raise AssertionError("weighted sum is not class-invariant")
            out.append(SpanningClass(label=rep, w=w))
    out.sort(key=lambda s: (-s.w, s.label))
    return out


@dataclass(frozen=True)
class BlockLabel:
    """A fiber-category block: label, its exceptional witness, and w.

    ``label`` has length alpha (exponents beyond alpha are zero by
    convention); ``witness`` is the unique integer exceptional exponent
    putting w into (0, -sigma]; ``aliases`` lists representatives of
    restricted classes merged into this block because their difference lies
    in the exact transfer lattice.
    """

    label: tuple[int, ...]
    witness: int
    w: Fraction
    aliases: tuple[tuple[int, ...], ...] = ()


def _restricted_class_lattice(d: ExtractionDatum) -> lattice.AbelianGroup:
    """Z^alpha modulo the restricted lattice L_res.

    L_res keeps only the monomial directions that are trivial on the
    zero-coefficient rays: m must pair to zero with v_j for alpha < j <= n.
    """
    n, alpha = d.n, d.alpha
    constraint_rows = [list(d.rays[j]) for j in range(alpha, n)]
    if constraint_rows:
        mkernel = lattice.integer_kernel(constraint_rows)
    else:
        mkernel = [tuple(row) for row in lattice.identity_matrix(n)]
    cols = [[d.orders[i] * sum(m[j] * d.rays[i][j] for j in range(n))
             for m in mkernel] for i in range(alpha)]
    group = lattice.cokernel(cols)
    if group.free_rank != 0:
        raise errors.DegenerateDatum("restricted class lattice is not finite")
    return group


def _block_witness(d: ExtractionDatum, w_alpha: Fraction):
    """Unique integer k_{n+1} with 0 < w_alpha + (a_{n+1}/r_{n+1}) k <= -sigma.

    Returns (witness, w) or None when the class misses the block window; the
    window is shorter than the exponent stride, so uniqueness is automatic.
    """
    a_last, r_last = d.coefficients[-1], d.orders[-1]
    s = sigma(d)
    lo = Fraction(r_last, -a_last) * (s + w_alpha)   # inclusive
    hi = Fraction(r_last, -a_last) * w_alpha         # exclusive
    k = ceil(lo)
    if k >= hi:
        return None
    w = w_alpha + Fraction(a_last * k, r_last)
    if not (0 < w <= -s):
        raise AssertionError("witness landed outside the block window")
    return k, w


def block_labels(d: ExtractionDatum) -> list[BlockLabel]:
    """Enumerate the fiber blocks of the decomposition.

    Restricted classes (Z^alpha mod L_res) that admit an integer witness are
    the block candidates; candidates with equal witnessed w whose difference
    lies in the exact transfer lattice L_tau describe the same block and get
    merged, the aliases retained on the surviving label.  Representatives
    prefer the lexicographically smallest all-nonnegative member with w
    already in the window (witness 0), which always lives in the finite box
    k_i <= -sigma * r_i / a_i when it exists at all.
    """
    validate(d)
    _require_extraction(d)
    n, alpha = d.n, d.alpha
    group = _restricted_class_lattice(d)
    tau = exceptional_lattice(d)
    s = sigma(d)

    # Preferred representatives: scan the bounded nonnegative box once.
    bounds = [floor(-s * d.orders[i] / d.coefficients[i]) for i in range(alpha)]
    preferred: dict[tuple[int, ...], tuple[int, ...]] = {}
    for cand in product(*(range(b + 1) for b in bounds)):
        w_a = weighted_sum_partial(d, cand)
        if not (0 < w_a <= -s):
            continue
        key = group.reduce(cand)
        if key not in preferred or cand < preferred[key]:
            preferred[key] = cand

    candidates = []
    for rep in group.classes():
        w_a = weighted_sum_partial(d, rep)
        hit = _block_witness(d, w_a)
        if hit is None:
            continue
        label = preferred.get(rep, rep)
        witness, w = _block_witness(d, weighted_sum_partial(d, label))
        candidates.append((w, label, witness))
    candidates.sort(key=lambda c: (c[0], c[1]))

    groups: list[list[tuple]] = []
    for w, label, witness in candidates:
        for g in groups:
            gw, glabel, _ = g[0]
            delta = tuple(x - y for x, y in zip(label, glabel))
            if gw == w and tau.contains(delta):
                g.append((w, label, witness))
                break
        else:
            groups.append([(w, label, witness)])

    def rep_quality(item):
        _, lab, _ = item
        nice = (all(x >= 0 for x in lab)
                and 0 < weighted_sum_partial(d, lab) <= -s)
        return (0 if nice else 1, lab)

    blocks: list[BlockLabel] = []
    for g in groups:
        g.sort(key=rep_quality)
        w, label, witness = g[0]
        blocks.append(BlockLabel(label=label, witness=witness, w=w,
                                 aliases=tuple(lab for _, lab, _ in g[1:])))
    blocks.sort(key=lambda b: (b.w, b.label))
    return blocks


def extend_block_label(d: ExtractionDatum, label) -> tuple[int, ...]:
    """Zero-extend a length-alpha block label to all n local exponents."""
    return tuple(label) + (0,) * (d.n - d.alpha)


def transfer_is_invertible(d: ExtractionDatum, k_local) -> bool:
    """Exact dichotomy: the fiber transfer of k_local is invertible or zero.

    Invertible exactly when the first-alpha part is congruent to a monomial
    twist, i.e. lies in L_tau; the exponents past alpha do not interfere with
    the criterion because their divisors miss the fiber locus.
    """
    if len(k_local) != d.n:
        raise ValueError(f"local exponent vector must have length {d.n}")
    alpha = d.alpha
    rows = [[d.orders[i] * d.rays[i][j] for j in range(d.n)]
            for i in range(alpha)]
    return lattice.solve_integer(rows, list(k_local[:alpha])) is not None


@dataclass(frozen=True)
class PairInequality:
    """One ordered pair of spanning classes and its faithfulness inequalities."""

    source: tuple[int, ...]
    target: tuple[int, ...]
    delta_w: Fraction
    within_bounds: bool       # -sigma_alpha < -delta_w < sigma_alpha
    higher_vanishing: bool    # pushforward of the difference has no R^{>0}


@dataclass(frozen=True)
class FaithfulnessReport:
    ok: bool
    head_ok: bool                              # a_{n+1}/r_{n+1} < -sigma_alpha
    pairs: tuple[PairInequality, ...]
    koszul: tuple[tuple[tuple[int, ...], Fraction, bool], ...]


def fully_faithful_check(d: ExtractionDatum) -> FaithfulnessReport:
    """Inequality certificates that comparison on spanning pairs is bijective.

    For every ordered pair of spanning classes the difference must sit
    strictly inside the symmetric window (|w| < sigma_alpha) and its
    pushforward must have vanishing higher derived images; on the Koszul side
    every nonempty corner sum must sit strictly between 0 and the exceptional
    stride |a_{n+1}| / r_{n+1}.
    """
    _require_extraction(d)
    sa = sigma_alpha(d)
    stride = Fraction(-d.coefficients[-1], d.orders[-1])
    head_ok = Fraction(d.coefficients[-1], d.orders[-1]) < -sa

    spans = spanning_classes(d)
    pairs = []
    for p in spans:
        for q in spans:
            delta = tuple(x - y for x, y in zip(p.label, q.label))
            dw = weighted_sum(d, delta)
            pairs.append(PairInequality(
                source=q.label,
                target=p.label,
                delta_w=dw,
                within_bounds=-sa < -dw < sa,
                higher_vanishing=pushforward(d, delta).higher_vanishing,
            ))

    koszul = []
    alpha = d.alpha
    for mask in range(1, 1 << alpha):
        subset = tuple(i for i in range(alpha) if mask >> i & 1)
        part = sum((Fraction(d.coefficients[i], d.orders[i]) for i in subset),
                   Fraction(0))
        koszul.append((subset, part, 0 < part < stride))

    ok = (head_ok
          and all(p.within_bounds and p.higher_vanishing for p in pairs)
          and all(entry[2] for entry in koszul))
    return FaithfulnessReport(ok=ok, head_ok=head_ok, pairs=tuple(pairs),
                              koszul=tuple(koszul))


@dataclass(frozen=True)
class OrthogonalityEntry:
    """A single vanishing claim between two generators of the decomposition."""

    kind: str                      # "span-block" | "block-block" | "equal-w"
    source: tuple[int, ...]
    target: tuple[int, ...]
    corner: tuple[int, ...]        # Koszul corner subset (empty for none)
    label: tuple[int, ...]         # length-n local label whose transfer must die
    certified: bool
    reason: str                    # "interval" | "lattice"


@dataclass(frozen=True)
class SemiorthogonalityReport:
    ok: bool
    entries: tuple[OrthogonalityEntry, ...]


def semiorthogonality_check(d: ExtractionDatum) -> SemiorthogonalityReport:
    """Certify every Hom-vanishing the decomposition asserts.

    Three families: spanning classes against blocks (all degrees), ordered
    block pairs with increasing w, and distinct blocks of equal w (both
    directions).  Interval certificates place the solved exceptional exponent
    strictly between consecutive integers; the remaining equal-w corner uses
    exact non-membership in the transfer lattice.
    """
    _require_extraction(d)
    n, alpha = d.n, d.alpha
    spans = spanning_classes(d)
    blocks = block_labels(d)
    entries: list[OrthogonalityEntry] = []

    def corners(include_empty):
        start = 0 if include_empty else 1
        for mask in range(start, 1 << alpha):
            yield tuple(i for i in range(alpha) if mask >> i & 1)

    def shifted(base, subset):
        out = list(base)
        for i in subset:
            out[i] -= 1
        return tuple(out)

    for l in spans:
        for b in blocks:
            base = tuple(x - y for x, y in
                         zip(l.label[:n], extend_block_label(d, b.label)))
            entries.append(OrthogonalityEntry(
                kind="span-block",
                source=l.label, target=b.label, corner=(),
                label=base,
                certified=fiber_transfer_vanishes(d, base),
                reason="interval"))

    for b in blocks:
        for c in blocks:
            if b is c:
                continue
            base = tuple(x - y for x, y in
                         zip(extend_block_label(d, b.label),
                             extend_block_label(d, c.label)))
            if c.w > b.w:
                for subset in corners(include_empty=True):
                    lab = shifted(base, subset)
                    entries.append(OrthogonalityEntry(
                        kind="block-block",
                        source=b.label, target=c.label, corner=subset,
                        label=lab,
                        certified=fiber_transfer_vanishes(d, lab),
                        reason="interval"))
            elif c.w == b.w:
                entries.append(OrthogonalityEntry(
                    kind="equal-w",
                    source=b.label, target=c.label, corner=(),
                    label=base,
                    certified=not transfer_is_invertible(d, base),
                    reason="lattice"))
                for subset in corners(include_empty=False):
                    lab = shifted(base, subset)
                    entries.append(OrthogonalityEntry(
                        kind="equal-w",
                        source=b.label, target=c.label, corner=subset,
                        label=lab,
                        certified=fiber_transfer_vanishes(d, lab),
                        reason="interval"))

    return SemiorthogonalityReport(
        ok=all(e.certified for e in entries), entries=tuple(entries))


def generator_count_identity(d: ExtractionDatum):
    """K-theoretic bookkeeping: |Cl_local| = #spanning + #blocks * |Cl_fiber|.

    The left side is the order of the local class group of the base cone,
    |det(r_i v_i)| over i <= n; each block contributes the order of the local
    fiber class group.  Returns (lhs, rhs, parts) for reporting.
    """
    from .extraction import induced_fibration  # local import, heavier check

    _require_extraction(d)
    n, alpha = d.n, d.alpha
    lhs = abs(lattice.determinant(
        [[d.orders[i] * d.rays[i][j] for j in range(n)] for i in range(n)]))
    fib = induced_fibration(d)
    if alpha == n:
        fiber_order = 1
    else:
        rows = [[d.orders[i] * fib.s[i - alpha] * fib.t[i] * fib.rays_f[i - alpha][j]
                 for j in range(n - alpha)] for i in range(alpha, n)]
        fiber_order = abs(lattice.determinant(rows))
    n_span = len(spanning_classes(d))
    n_blocks = len(block_labels(d))
    rhs = n_span + n_blocks * fiber_order
    return lhs, rhs, {"spanning": n_span, "blocks": n_blocks,
                      "fiber_order": fiber_order}


# ---------------------------------------------------------------------------
# Generation certificates


@dataclass(frozen=True)
class CertificateNode:
    key: str
    label: tuple[int, ...]        # length n
    witness: int                  # exceptional exponent shared along the DAG
    w: Fraction
    kind: str                     # "span" | "koszul" | "block"
    children: tuple[str, ...] = ()
    block_key: str | None = None


@dataclass(frozen=True)
class GenerationCertificate:
    """DAG witnessing that the enumerated generators reach every target label."""

    targets: tuple[tuple[tuple[int, ...], str], ...]   # (label, root key)
    nodes: tuple[CertificateNode, ...]

    def node_map(self) -> dict[str, CertificateNode]:
        return {node.key: node for node in self.nodes}


def _node_key(kind: str, label, witness: int) -> str:
    prefix = "B" if kind == "block" else "L"
    return f"{prefix}|{','.join(str(x) for x in label)}|{witness}"


def _window_witness(d: ExtractionDatum, label) -> int:
    """Unique integer exceptional exponent with w in (-sigma_alpha, -sigma].

    The window has length sigma_alpha - sigma = |a_{n+1}| / r_{n+1}, exactly
    one exponent stride, so the integer always exists and is unique.
    """
    a_last, r_last = d.coefficients[-1], d.orders[-1]
    w_n = weighted_sum_partial(d, label)
    lo = Fraction(r_last, -a_last) * (sigma(d) + w_n)
    hi = Fraction(r_last, -a_last) * (sigma_alpha(d) + w_n)
    k = ceil(lo)
    if not (k < hi):
        raise AssertionError("witness window miscomputed")
    return k


def generation_certificate(d: ExtractionDatum, targets,
                           max_depth: int = 64) -> GenerationCertificate:
    """Build the Koszul descent DAG proving the targets are generated.

    Each line-bundle node carries the witness exponent fixing its w inside
    (-sigma_alpha, -sigma]; nonpositive w is a spanning leaf, positive w
    expands through the 2^alpha - 1 Koszul corners (same witness) plus one
    block leaf.  The coordinate sum strictly decreases toward the corners, so
    the recursion terminates; nodes are shared across targets.
    """
    validate(d)
    _require_extraction(d)
    n, alpha = d.n, d.alpha
    a_last, r_last = d.coefficients[-1], d.orders[-1]
    sa, s = sigma_alpha(d), sigma(d)
    nodes: dict[str, CertificateNode] = {}

    def build(label, witness, depth):
        if depth > max_depth:
            raise errors.DepthExceeded(
                f"generation recursion exceeded depth {max_depth}")
        w = weighted_sum_partial(d, label) + Fraction(a_last * witness, r_last)
        if w <= 0:
            key = _node_key("span", label, witness)
            if key not in nodes:
                if not (-sa < w):
                    raise AssertionError("spanning leaf outside its window")
                nodes[key] = CertificateNode(
                    key=key, label=label, witness=witness, w=w, kind="span")
            return key
        key = _node_key("koszul", label, witness)
        if key in nodes:
            return key
        if not (w <= -s):
            raise AssertionError("koszul node outside its window")
        # Reserve the key before recursing; children never revisit the parent
        # because their coordinate sum is strictly smaller.
        children = []
        for mask in range(1, 1 << alpha):
            child = tuple(label[i] - (mask >> i & 1) for i in range(n))
            children.append(build(child, witness, depth + 1))
        bkey = _node_key("block", label, witness)
        if bkey not in nodes:
            nodes[bkey] = CertificateNode(
                key=bkey, label=label, witness=witness, w=w, kind="block")
        nodes[key] = CertificateNode(
            key=key, label=label, witness=witness, w=w, kind="koszul",
            children=tuple(children), block_key=bkey)
        return key

    roots = []
    for target in targets:
        label = tuple(int(x) for x in target)
        if len(label) != n:
            raise ValueError(f"target label must have length {n}")
        witness = _window_witness(d, label)
        roots.append((label, build(label, witness, 0)))
    ordered = tuple(sorted(nodes.values(), key=lambda nd: nd.key))
    return GenerationCertificate(targets=tuple(roots), nodes=ordered)


@dataclass(frozen=True)
class CertificateVerification:
    ok: bool
    violations: tuple[tuple[str, str, str], ...]   # (code, node key, detail)


def verify_certificate(d: ExtractionDatum,
                       cert: GenerationCertificate) -> CertificateVerification:
    """Replay every structural rule of a generation certificate.

    Checks node windows against recomputed w, witness windows at the roots,
    exact Koszul corner sets with inherited witnesses, block leaves matching
    their Koszul parents, the strictly decreasing coordinate-sum measure, and
    acyclicity.  Purely combinatorial; the Euler-characteristic replay against
    the cohomology oracle lives in the model layer.
    """
    validate(d)
    _require_extraction(d)
    n, alpha = d.n, d.alpha
    a_last, r_last = d.coefficients[-1], d.orders[-1]
    sa, s = sigma_alpha(d), sigma(d)
    violations: list[tuple[str, str, str]] = []
    node_map: dict[str, CertificateNode] = {}
    for node in cert.nodes:
        if node.key in node_map:
            violations.append(("DUPLICATE_KEY", node.key, "key appears twice"))
        node_map[node.key] = node

    def wval(node):
        return (weighted_sum_partial(d, node.label)
                + Fraction(a_last * node.witness, r_last))

    for node in cert.nodes:
        if len(node.label) != n:
            violations.append(("BAD_LABEL", node.key, "label length"))
            continue
        w = wval(node)
        if w != node.w:
            violations.append(("W_MISMATCH", node.key,
                               f"recomputed {w}, stored {node.w}"))
        if node.kind == "span":
            if not (-sa < w <= 0):
                violations.append(("LEAF_WINDOW", node.key, f"w = {w}"))
            if node.children or node.block_key:
                violations.append(("LEAF_CHILDREN", node.key,
                                   "spanning leaf has children"))
        elif node.kind == "block":
            if not (0 < w <= -s):
                violations.append(("LEAF_WINDOW", node.key, f"w = {w}"))
            if node.children or node.block_key:
                violations.append(("LEAF_CHILDREN", node.key,
                                   "block leaf has children"))
        elif node.kind == "koszul":
            if not (0 < w <= -s):
                violations.append(("NODE_WINDOW", node.key, f"w = {w}"))
            expected = []
            for mask in range(1, 1 << alpha):
                child = tuple(node.label[i] - (mask >> i & 1)
                              for i in range(n))
                expected.append((child, node.witness))
            got = []
            for ckey in node.children:
                child = node_map.get(ckey)
                if child is None:
                    violations.append(("MISSING_NODE", node.key,
                                       f"child {ckey} absent"))
                    continue
                got.append((child.label, child.witness))
                if sum(child.label) >= sum(node.label):
                    violations.append(("MEASURE", node.key,
                                       f"child {ckey} does not decrease"))
            if sorted(got) != sorted(expected):
                violations.append(("CORNER_SET", node.key,
                                   "children are not the Koszul corners"))
            block = node_map.get(node.block_key or "")
            if block is None:
                violations.append(("MISSING_NODE", node.key, "block leaf absent"))
            elif (block.kind != "block" or block.label != node.label
                  or block.witness != node.witness):
                violations.append(("BLOCK_MISMATCH", node.key,
                                   "block leaf disagrees with its parent"))
        else:
            violations.append(("BAD_KIND", node.key, node.kind))

    for label, root_key in cert.targets:
        root = node_map.get(root_key)
        if root is None:
            violations.append(("TARGET_MISSING", root_key, str(label)))
            continue
        if root.label != tuple(label):
            violations.append(("TARGET_LABEL", root_key,
                               f"root label {root.label} != target {label}"))
        w = wval(root)
        if not (-sa < w <= -s):
            violations.append(("WITNESS_WINDOW", root_key, f"w = {w}"))

    # Cycle detection over the child/block edges.
    WHITE, GREY, BLACK = 0, 1, 2
    color = {key: WHITE for key in node_map}

    def edges(node):
        yield from node.children
        if node.block_key:
            yield node.block_key

    for start in sorted(node_map):
        if color[start] != WHITE:
            continue
        stack = [(start, iter(edges(node_map[start])))]
        color[start] = GREY
        while stack:
            key, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in node_map:
                    continue
                if color[nxt] == GREY:
                    violations.append(("CYCLE", nxt, "reachable from itself"))
                elif color[nxt] == WHITE:
                    color[nxt] = GREY
                    stack.append((nxt, iter(edges(node_map[nxt]))))
                    advanced = True
                    break
            if not advanced:
                color[key] = BLACK
                stack.pop()

    return CertificateVerification(ok=not violations,
                                   violations=tuple(violations))
