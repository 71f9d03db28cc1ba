"""Concrete network evaluation and brute-force verification oracles.

Confidence is the winner block's popcount over the total output popcount,
kept as an exact Fraction throughout: float comparison would corrupt
boundary cases such as 150/151 vs 0.99. When the total is zero the
confidence is defined as the degenerate minimum 1/C and the winner as
class 0; reports flag this convention.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DataError, InstanceTooLargeError
from .netlist import GATE, Netlist, gate_truth
from .schema import FeatureSchema, NumericFeature

HOLDS = "holds"
COUNTEREXAMPLE = "counterexample"
UNKNOWN = "unknown"

FAIR = "fair"
ROBUST = "robust"

# Pair-enumeration guard for the brute-force oracle.
MAX_PAIR_COUNT = 10**8


@dataclass(frozen=True)
class ScoreVector:
    """Per-class popcounts of the output blocks."""

    scores: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.scores)


@dataclass(frozen=True)
class Witness:
    """Decoded counterexample pair with its concrete evaluation."""

    x_bits: tuple[int, ...]
    x_values: tuple[int, ...]
    x_class: int
    x_confidence: Fraction
    x_prime_bits: tuple[int, ...]
    x_prime_values: tuple[int, ...]
    x_prime_class: int
    x_prime_confidence: Fraction


@dataclass(frozen=True)
class VerdictStats:
    wall_time: float = 0.0
    num_clauses: int = 0
    num_vars: int = 0


@dataclass(frozen=True)
class Verdict:
    status: str  # HOLDS / COUNTEREXAMPLE / UNKNOWN
    witness: Witness | None = None
    stats: VerdictStats = field(default_factory=VerdictStats)

    def __post_init__(self):
        assert (self.witness is not None) == (self.status == COUNTEREXAMPLE)


def forward(netlist: Netlist, input_bits) -> list[int]:
    """Evaluate every gate layer by layer; returns final-layer bits in block
    order."""
    if len(input_bits) != netlist.input_width:
        raise DataError(
            f"input width mismatch: got {len(input_bits)}, "
            f"expected {netlist.input_width}"
        )
    values: list[int] = []
    out: list[int] = []
    for layer in netlist.layers:
        out = []
        for gate in layer:
            a = values[gate.in_a.index] if gate.in_a.kind == GATE else input_bits[gate.in_a.index]
            b = values[gate.in_b.index] if gate.in_b.kind == GATE else input_bits[gate.in_b.index]
            out.append(gate_truth(gate.op, a, b))
        values.extend(out)
    return out


def winner_of(scores: ScoreVector) -> int:
    """Smallest class index attaining the maximal score (class 0 when all
    scores are zero)."""
    best = max(scores.scores)
    return scores.scores.index(best)


def confidence_of(scores: ScoreVector, num_classes: int) -> Fraction:
    if scores.total == 0:
        return Fraction(1, num_classes)
    return Fraction(scores.scores[winner_of(scores)], scores.total)


def predict(netlist: Netlist, input_bits) -> tuple[int, ScoreVector, Fraction]:
    """Predicted class, block scores, and exact confidence for one input."""
    out = forward(netlist, input_bits)
    L = netlist.block_size
    scores = ScoreVector(
        tuple(sum(out[c * L:(c + 1) * L]) for c in range(netlist.num_classes))
    )
    return winner_of(scores), scores, confidence_of(scores, netlist.num_classes)


def check_phi(x_bits, x_prime_bits, schema: FeatureSchema, eps: int, mode: str) -> bool:
    """Concrete similarity predicate over a decoded input pair.

    True iff every non-sensitive numeric feature is within eps thermometer
    bit-flips, every non-sensitive categorical feature is equal, and (in
    fair mode) every sensitive categorical feature differs. Robust mode
    treats the sensitive set as empty, so all categoricals must be equal.
    Ill-formed inputs are rejected (DataError).
    """
    if mode not in (FAIR, ROBUST):
        raise ValueError(f"mode must be {FAIR!r} or {ROBUST!r}, got {mode!r}")
    values = schema.decode_bits(x_bits)
    values_p = schema.decode_bits(x_prime_bits)
    return phi_on_values(values, values_p, schema, eps, mode)


def phi_on_values(values, values_p, schema: FeatureSchema, eps: int, mode: str) -> bool:
    for f, a, b in zip(schema.features, values, values_p):
        if isinstance(f, NumericFeature):
            if abs(a - b) > eps:
                return False
        elif mode == FAIR and f.sensitive:
            if a == b:
                return False
        elif a != b:
            return False
    return True


def enumerate_inputs(schema: FeatureSchema):
    """All well-formed inputs in lexicographic feature-value order."""
    domains = [
        range(f.bits + 1) if isinstance(f, NumericFeature) else range(f.arity)
        for f in schema.features
    ]
    return itertools.product(*domains)


def well_formed_count(schema: FeatureSchema) -> int:
    w = 1
    for f in schema.features:
        w *= f.bits + 1 if isinstance(f, NumericFeature) else f.arity
    return w


@dataclass(frozen=True)
class _InputRecord:
    values: tuple[int, ...]
    bits: tuple[int, ...]
    cls: int
    conf: Fraction


def _guard(schema: FeatureSchema) -> int:
    w = well_formed_count(schema)
    if w * w > MAX_PAIR_COUNT:
        raise InstanceTooLargeError(
            f"{w}^2 well-formed pairs exceed the {MAX_PAIR_COUNT} oracle guard"
        )
    return w


def _prediction_table(netlist: Netlist, schema: FeatureSchema) -> list[_InputRecord]:
    table = []
    for values in enumerate_inputs(schema):
        bits = schema.encode_values(values)
        cls, _, conf = predict(netlist, bits)
        table.append(_InputRecord(values, bits, cls, conf))
    return table


def _witness_from(x: _InputRecord, xp: _InputRecord) -> Witness:
    return Witness(
        x_bits=x.bits, x_values=x.values, x_class=x.cls, x_confidence=x.conf,
        x_prime_bits=xp.bits, x_prime_values=xp.values, x_prime_class=xp.cls,
        x_prime_confidence=xp.conf,
    )


def brute_force_verify(
    netlist: Netlist, schema: FeatureSchema, mode: str, eps: int, kappa: Fraction
) -> Verdict:
    """Enumerate all well-formed ordered pairs (x, x'); Counterexample with
    the lexicographically first pair satisfying Phi and conf(f(x)) > kappa
    and f(x) != f(x'), else Holds. Comparisons are exact rationals, strict
    on kappa.
    """
    _guard(schema)
    kappa = Fraction(kappa)
    started = time.monotonic()
    table = _prediction_table(netlist, schema)
    for x in table:
        if not x.conf > kappa:
            continue
        for xp in table:
            if xp.cls == x.cls:
                continue
            if phi_on_values(x.values, xp.values, schema, eps, mode):
                stats = VerdictStats(wall_time=time.monotonic() - started)
                return Verdict(COUNTEREXAMPLE, _witness_from(x, xp), stats)
    return Verdict(HOLDS, stats=VerdictStats(wall_time=time.monotonic() - started))


def brute_force_min_kappa(
    netlist: Netlist, schema: FeatureSchema, mode: str, eps: int
) -> Fraction:
    """Maximum conf(f(x)) over all bad pairs (Phi holds, classes differ); the
    property holds exactly for kappa >= this value. Degenerate minimum 1/C
    when no bad pair exists.
    """
    _guard(schema)
    table = _prediction_table(netlist, schema)
    # Scanning x by descending confidence lets the first hit decide.
    for x in sorted(table, key=lambda r: r.conf, reverse=True):
        for xp in table:
            if xp.cls != x.cls and phi_on_values(x.values, xp.values, schema, eps, mode):
                return x.conf
    return Fraction(1, netlist.num_classes)
