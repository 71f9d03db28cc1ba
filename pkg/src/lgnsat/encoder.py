"""Lowering of hyperproperty constraints into CNF.

A fair/robust query conjoins: well-formedness of both input copies, two
disjoint network encodings, the confidence constraint on the first copy,
the different-class constraint on the winner flags, and the similarity
constraints (numeric proximity, categorical equality, sensitive-categorical
inequality). SAT means a counterexample pair exists; UNSAT means the
property holds at the queried threshold.

The attainability query keeps a single copy and asks for any well-formed
input that clears the threshold with at least one output bit set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cnf import FALSE_LIT, CnfBuilder, CnfFormula, Lit
from .errors import QueryBuildError
from .netlist import Netlist, check_valid
from .schema import FeatureSchema, NumericFeature

ATTAINABLE = "attainable"
_MODES = ("fair", "robust", ATTAINABLE)


@dataclass(frozen=True)
class PropertyQuery:
    """One verification query: mode, integer tolerance, exact threshold."""

    mode: str
    eps: int
    kappa: Fraction

    def __post_init__(self):
        if self.mode not in _MODES:
            raise QueryBuildError(f"unknown mode {self.mode!r}")
        if self.eps < 0:
            raise QueryBuildError(f"eps must be >= 0, got {self.eps}")
        if not 0 <= self.kappa <= 1:
            raise QueryBuildError(f"kappa must be in [0, 1], got {self.kappa}")


@dataclass(frozen=True)
class VarMap:
    """Semantic roles -> literal vectors, for decoding and debugging.

    Primed fields are None for single-copy (attainability) queries. Literals
    may be folded constants (+/-1) or aliases; the underlying variable sets
    of the two copies are disjoint apart from constants.
    """

    query: PropertyQuery
    in_lits: tuple[Lit, ...]
    out_lits: tuple[Lit, ...]
    sorted_blocks: tuple[tuple[Lit, ...], ...]
    total_sorted: tuple[Lit, ...]
    winners: tuple[Lit, ...] | None
    in_prime_lits: tuple[Lit, ...] | None
    out_prime_lits: tuple[Lit, ...] | None
    sorted_blocks_prime: tuple[tuple[Lit, ...], ...] | None
    winners_prime: tuple[Lit, ...] | None

    def sidecar(self) -> str:
        """Role -> literal list sidecar text, one line per role."""
        def fmt(name, lits):
            if lits is None:
                return None
            if lits and isinstance(lits[0], tuple):
                return "\n".join(
                    f"{name}.{i} " + " ".join(map(str, blk))
                    for i, blk in enumerate(lits)
                )
            return f"{name} " + " ".join(map(str, lits))

        lines = [
            f"mode {self.query.mode}",
            f"eps {self.query.eps}",
            f"kappa {self.query.kappa}",
        ]
        for name, lits in (
            ("v_in", self.in_lits),
            ("v_in_prime", self.in_prime_lits),
            ("v_out", self.out_lits),
            ("v_out_prime", self.out_prime_lits),
            ("sorted_block", self.sorted_blocks),
            ("sorted_block_prime", self.sorted_blocks_prime),
            ("total_sorted", self.total_sorted),
            ("winner", self.winners),
            ("winner_prime", self.winners_prime),
        ):
            line = fmt(name, lits)
            if line is not None:
                lines.append(line)
        return "\n".join(lines) + "\n"


def emit_well_formed(b: CnfBuilder, schema: FeatureSchema, in_lits) -> None:
    """Thermometer monotonicity per numeric feature; exactly-one per
    categorical feature."""
    assert len(in_lits) == schema.width
    for f, (start, end) in zip(schema.features, schema.bit_ranges()):
        block = in_lits[start:end]
        if isinstance(f, NumericFeature):
            for k in range(1, f.bits):
                b.add_clause((-block[k], block[k - 1]))
        else:
            b.add_clause(block)
            for i in range(f.arity):
                for j in range(i + 1, f.arity):
                    b.add_clause((-block[i], -block[j]))


def emit_prox(b: CnfBuilder, eps: int, t, t_prime) -> None:
    """Thermometer values within eps bit-flips (vacuous when eps >= width)."""
    assert len(t) == len(t_prime)
    for k in range(eps, len(t)):
        b.add_clause((-t[k], t_prime[k - eps]))
        b.add_clause((-t_prime[k], t[k - eps]))


def emit_same_cat(b: CnfBuilder, c, c_prime) -> None:
    for x, y in zip(c, c_prime):
        b.add_clause((-x, y))
        b.add_clause((x, -y))


def emit_diff_cat(b: CnfBuilder, c, c_prime) -> None:
    """Category inequality under one-hot: some position is set here and not
    there. Fresh selectors keep clause growth linear in arity."""
    selectors = [b.lit_and(x, -y) for x, y in zip(c, c_prime)]
    b.add_clause(selectors)


def emit_winning(b: CnfBuilder, sorted_blocks) -> list[Lit]:
    """Winner flags over descending-sorted class blocks.

    w_c implies a strictly higher score than every lower-indexed class and
    at least as high a score as every higher-indexed class, so the flags
    pin the minimum-index argmax — the same tie-break the concrete
    evaluator uses. An at-least-one clause completes the one-directional
    implications; at-most-one follows from the strictness asymmetry.
    """
    num_classes = len(sorted_blocks)
    width = len(sorted_blocks[0])
    winners = b.new_vars(num_classes)
    for c in range(num_classes):
        s_c = sorted_blocks[c]
        for d in range(num_classes):
            s_d = sorted_blocks[d]
            if d < c:
                above = [b.lit_and(s_c[k], -s_d[k]) for k in range(width)]
                b.add_clause([-winners[c]] + above)
            elif d > c:
                for k in range(width):
                    b.add_clause((-winners[c], -s_d[k], s_c[k]))
    b.add_clause(winners)
    return winners


def emit_diff_class(b: CnfBuilder, winners, winners_prime) -> None:
    for w, wp in zip(winners, winners_prime):
        b.add_clause((-w, -wp))


def emit_confidence_gt(
    b: CnfBuilder, kappa: Fraction, sorted_blocks, total_sorted
) -> None:
    """Threshold constraint: whenever the total popcount reaches i, some
    class block holds more than i*kappa ones.

    The block index floor(i*kappa) is exact integer arithmetic; indices
    beyond the block width become the FALSE constant, which makes over-tight
    demands unsatisfiable rather than silently dropped.
    """
    if not 0 <= kappa <= 1:
        raise QueryBuildError(f"kappa must be in [0, 1], got {kappa}")
    width = len(sorted_blocks[0])
    p, q = kappa.numerator, kappa.denominator
    for i in range(1, len(total_sorted) + 1):
        idx = (i * p) // q
        conclusion = [
            blk[idx] if idx < width else FALSE_LIT for blk in sorted_blocks
        ]
        b.add_clause([-total_sorted[i - 1]] + conclusion)


def _encode_copy(b: CnfBuilder, netlist: Netlist, schema: FeatureSchema):
    """Fresh input variables, well-formedness, network, per-block sorts."""
    in_lits = b.new_vars(schema.width)
    emit_well_formed(b, schema, in_lits)
    out_lits = b.encode_network(netlist, in_lits)
    L = netlist.block_size
    blocks = [out_lits[c * L:(c + 1) * L] for c in range(netlist.num_classes)]
    sorted_blocks = tuple(tuple(b.sort_block(blk)) for blk in blocks)
    return tuple(in_lits), tuple(out_lits), sorted_blocks


def build_query(
    netlist: Netlist, schema: FeatureSchema, query: PropertyQuery
) -> tuple[CnfFormula, VarMap]:
    """Lower one query to CNF over fresh variables.

    Fair/robust queries are SAT iff a counterexample pair exists. To keep
    exact agreement with the brute-force oracle's total-zero convention
    (confidence 1/C, class 0), the first copy gets a some-output-bit-set
    clause whenever kappa >= 1/C: the bare confidence constraint is
    vacuously true on an all-zero output, while the oracle's degenerate
    confidence only clears thresholds below 1/C.
    """
    check_valid(netlist, schema)
    if query.mode == "fair" and not schema.sensitive_features():
        raise QueryBuildError("fair mode requires at least one sensitive feature")

    b = CnfBuilder()
    in1, out1, sorted1 = _encode_copy(b, netlist, schema)
    total_sorted = tuple(b.sort_block(list(out1)))
    emit_confidence_gt(b, query.kappa, sorted1, total_sorted)

    if query.mode == ATTAINABLE:
        b.add_clause(out1)
        varmap = VarMap(
            query=query, in_lits=in1, out_lits=out1, sorted_blocks=sorted1,
            total_sorted=total_sorted, winners=None, in_prime_lits=None,
            out_prime_lits=None, sorted_blocks_prime=None, winners_prime=None,
        )
        return b.build(), varmap

    if query.kappa >= Fraction(1, netlist.num_classes):
        b.add_clause(out1)

    in2, out2, sorted2 = _encode_copy(b, netlist, schema)
    winners1 = emit_winning(b, sorted1)
    winners2 = emit_winning(b, sorted2)
    emit_diff_class(b, winners1, winners2)

    for f, (start, end) in zip(schema.features, schema.bit_ranges()):
        blk1, blk2 = in1[start:end], in2[start:end]
        if isinstance(f, NumericFeature):
            emit_prox(b, query.eps, blk1, blk2)
        elif query.mode == "fair" and f.sensitive:
            emit_diff_cat(b, blk1, blk2)
        else:
            emit_same_cat(b, blk1, blk2)

    varmap = VarMap(
        query=query, in_lits=in1, out_lits=out1, sorted_blocks=sorted1,
        total_sorted=total_sorted, winners=tuple(winners1), in_prime_lits=in2,
        out_prime_lits=out2, sorted_blocks_prime=sorted2,
        winners_prime=tuple(winners2),
    )
    return b.build(), varmap
