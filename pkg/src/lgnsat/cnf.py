"""CNF construction: variable pool, gate encoding, sorting networks, DIMACS.

Literals are nonzero signed ints (negative = negation). Variable 1 is
reserved as the constant TRUE, pinned by a unit clause emitted once, so
constant FALSE is -1 and constant folding can hand out +/-1 freely.

Every auxiliary variable is defined with full (both-polarity) equivalence
clauses. That discipline is what makes counterexample decoding sound: a
model restricted to the input variables extends uniquely, so output
variables always agree with the concrete forward pass.
"""

from __future__ import annotations

from dataclasses import dataclass

from .netlist import GATE, Netlist

Lit = int
Clause = tuple[Lit, ...]

TRUE_LIT: Lit = 1
FALSE_LIT: Lit = -1


@dataclass(frozen=True)
class CnfFormula:
    """Immutable finished formula; shareable across threads."""

    num_vars: int
    clauses: tuple[Clause, ...]


def to_dimacs(formula: CnfFormula) -> bytes:
    """Standard DIMACS CNF bytes; deterministic for a given formula."""
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    for clause in formula.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return ("\n".join(lines) + "\n").encode("ascii")


class CnfBuilder:
    """Single-writer clause accumulator with constant folding helpers."""

    def __init__(self):
        self.num_vars = 1
        self.clauses: list[Clause] = [(TRUE_LIT,)]

    def new_var(self) -> Lit:
        self.num_vars += 1
        return self.num_vars

    def new_vars(self, n: int) -> list[Lit]:
        return [self.new_var() for _ in range(n)]

    def add_clause(self, lits) -> None:
        """Add one clause, normalized: duplicate literals collapse,
        tautologies and clauses satisfied by the TRUE constant are elided,
        falsified constant literals are dropped."""
        seen: list[Lit] = []
        for lit in lits:
            if lit == TRUE_LIT:
                return
            if lit == FALSE_LIT:
                continue
            if -lit in seen:
                return
            if lit not in seen:
                seen.append(lit)
        # A clause of only falsified constants is an explicit falsum.
        self.clauses.append(tuple(seen) if seen else (FALSE_LIT,))

    def add_clauses(self, clause_list) -> None:
        for c in clause_list:
            self.add_clause(c)

    def build(self) -> CnfFormula:
        return CnfFormula(self.num_vars, tuple(self.clauses))

    # -- folded connectives -------------------------------------------------

    def lit_and(self, a: Lit, b: Lit) -> Lit:
        if a == FALSE_LIT or b == FALSE_LIT or a == -b:
            return FALSE_LIT
        if a == TRUE_LIT:
            return b
        if b == TRUE_LIT or a == b:
            return a
        o = self.new_var()
        self.add_clauses([(-o, a), (-o, b), (o, -a, -b)])
        return o

    def lit_or(self, a: Lit, b: Lit) -> Lit:
        if a == TRUE_LIT or b == TRUE_LIT or a == -b:
            return TRUE_LIT
        if a == FALSE_LIT:
            return b
        if b == FALSE_LIT or a == b:
            return a
        o = self.new_var()
        self.add_clauses([(o, -a), (o, -b), (-o, a, b)])
        return o

    def lit_xor(self, a: Lit, b: Lit) -> Lit:
        if a == TRUE_LIT:
            return -b
        if a == FALSE_LIT:
            return b
        if b == TRUE_LIT:
            return -a
        if b == FALSE_LIT:
            return a
        if a == b:
            return FALSE_LIT
        if a == -b:
            return TRUE_LIT
        o = self.new_var()
        self.add_clauses([(-o, a, b), (-o, -a, -b), (o, -a, b), (o, a, -b)])
        return o

    # -- gates and networks --------------------------------------------------

    def encode_gate(self, op: int, la: Lit, lb: Lit) -> Lit:
        """Literal fully equivalent to truth-table code ``op`` on (la, lb).

        Constant and single-input codes fold to +/-TRUE or +/-la/lb with no
        new variable; genuine 2-input codes cost at most 4 clauses.
        """
        if op == 0:
            return FALSE_LIT
        if op == 15:
            return TRUE_LIT
        if op == 12:
            return la
        if op == 3:
            return -la
        if op == 10:
            return lb
        if op == 5:
            return -lb
        rows = [i for i in range(4) if (op >> i) & 1]
        if len(rows) == 1:
            # True on one row: an AND of suitably negated inputs.
            (i,) = rows
            return self.lit_and(la if i & 2 else -la, lb if i & 1 else -lb)
        if len(rows) == 3:
            # False on one row: an OR of suitably negated inputs.
            (i,) = set(range(4)) - set(rows)
            return self.lit_or(-la if i & 2 else la, -lb if i & 1 else lb)
        x = self.lit_xor(la, lb)
        return x if op == 6 else -x

    def encode_network(self, netlist: Netlist, in_lits) -> list[Lit]:
        """One encode_gate per gate in layer order; returns the final layer's
        literals in block order."""
        assert len(in_lits) == netlist.input_width
        gate_lits: list[Lit] = []
        out: list[Lit] = []
        for layer in netlist.layers:
            out = []
            for gate in layer:
                la = gate_lits[gate.in_a.index] if gate.in_a.kind == GATE else in_lits[gate.in_a.index]
                lb = gate_lits[gate.in_b.index] if gate.in_b.kind == GATE else in_lits[gate.in_b.index]
                out.append(self.encode_gate(gate.op, la, lb))
            gate_lits.extend(out)
        return out

    # -- sorting network -----------------------------------------------------

    def comparator(self, a: Lit, b: Lit) -> tuple[Lit, Lit]:
        """2-input comparator: (hi, lo) = (a OR b, a AND b)."""
        return self.lit_or(a, b), self.lit_and(a, b)

    def sort_block(self, lits) -> list[Lit]:
        """Unary (descending) sort via Batcher's odd-even merge network.

        Output s[k] is true iff at least k+1 inputs are true. Inputs are
        padded with constant FALSE to the next power of two; the padding
        outputs fall off the discarded tail.
        """
        n = len(lits)
        if n == 1:
            return list(lits)
        size = 1 << (n - 1).bit_length()
        padded = list(lits) + [FALSE_LIT] * (size - n)
        ascending = self._oe_sort(padded)
        return ascending[::-1][:n]

    def _oe_sort(self, xs: list[Lit]) -> list[Lit]:
        if len(xs) == 1:
            return xs
        half = len(xs) // 2
        return self._oe_merge(self._oe_sort(xs[:half]), self._oe_sort(xs[half:]))

    def _oe_merge(self, a: list[Lit], b: list[Lit]) -> list[Lit]:
        # Inputs sorted ascending, equal power-of-two lengths.
        if len(a) == 1:
            hi, lo = self.comparator(a[0], b[0])
            return [lo, hi]
        even = self._oe_merge(a[0::2], b[0::2])
        odd = self._oe_merge(a[1::2], b[1::2])
        out = [even[0]]
        for i in range(1, len(a)):
            hi, lo = self.comparator(odd[i - 1], even[i])
            out.extend((lo, hi))
        out.append(odd[-1])
        return out
