"""External SAT solver protocol and counterexample decoding.

The backend stays solver-agnostic: any executable that reads a DIMACS file,
prints ``s SATISFIABLE``/``s UNSATISFIABLE`` with ``v`` model lines, and
exits 10/20 works. The preferred solver is kissat; the LGNSAT_SOLVER
environment variable overrides it, and a small fallback list of well-known
solvers is probed when kissat is absent.
"""

from __future__ import annotations

import hashlib
import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .cnf import CnfFormula, to_dimacs
from .errors import EncodingConsistencyError, SolverNotFoundError, SolverOutputError
from .evaluator import Witness, check_phi, predict
from .netlist import Netlist
from .schema import FeatureSchema

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

SOLVER_ENV_VAR = "LGNSAT_SOLVER"
DEFAULT_SOLVER = "kissat"
FALLBACK_SOLVERS = ("cadical", "cryptominisat5", "varisat", "picosat", "lingeling")


@dataclass(frozen=True)
class SolverConfig:
    """How to run the external solver.

    ``work_dir`` keeps DIMACS files around for post-mortem debugging; with
    the default None a temp file is used and removed afterwards.
    """

    executable: str = DEFAULT_SOLVER
    timeout: float = 300.0
    extra_args: tuple[str, ...] = ()
    work_dir: str | None = None

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError(f"timeout must be > 0, got {self.timeout}")


@dataclass(frozen=True)
class SolveOutcome:
    status: str  # SAT / UNSAT / UNKNOWN
    model: tuple[bool, ...] | None  # indexed by variable id; [0] unused
    wall_time: float
    exit_code: int | None
    stats_lines: tuple[str, ...]

    def __post_init__(self):
        assert (self.model is not None) == (self.status == SAT)


def find_solver(executable: str | None = None) -> str:
    """Resolve a solver executable path.

    An explicit name/path must resolve or we fail loudly. Otherwise the
    LGNSAT_SOLVER environment variable wins, then kissat, then the fallback
    list.
    """
    if executable:
        found = shutil.which(executable)
        if found is None:
            raise SolverNotFoundError(f"SAT solver {executable!r} not found on PATH")
        return found
    env = os.environ.get(SOLVER_ENV_VAR)
    if env:
        found = shutil.which(env)
        if found is None:
            raise SolverNotFoundError(
                f"{SOLVER_ENV_VAR}={env!r} does not resolve to an executable"
            )
        return found
    for name in (DEFAULT_SOLVER,) + FALLBACK_SOLVERS:
        found = shutil.which(name)
        if found:
            return found
    raise SolverNotFoundError(
        "no SAT solver found; install kissat (or any DIMACS solver) or set "
        f"{SOLVER_ENV_VAR}"
    )


def _parse_model(stdout: str, num_vars: int) -> tuple[bool, ...]:
    assignment: list[bool | None] = [None] * (num_vars + 1)
    assignment[0] = False
    saw_end = False
    for line in stdout.splitlines():
        if not line.startswith("v"):
            continue
        for tok in line[1:].split():
            lit = int(tok)
            if lit == 0:
                saw_end = True
                break
            var = abs(lit)
            if var <= num_vars:
                assignment[var] = lit > 0
    if not saw_end:
        raise SolverOutputError("model (v lines) missing terminating 0")
    missing = [v for v in range(1, num_vars + 1) if assignment[v] is None]
    if missing:
        raise SolverOutputError(
            f"model does not assign {len(missing)} variables (first: {missing[0]})"
        )
    return tuple(assignment)  # type: ignore[arg-type]


def solve(formula: CnfFormula, config: SolverConfig | None = None) -> SolveOutcome:
    """Write DIMACS, run the solver, interpret exit code 10/20.

    Timeouts and unexpected exit codes map to UNKNOWN (recorded, not
    raised); a missing solver or unreadable output raises.
    """
    config = config or SolverConfig()
    exe = find_solver(None if config.executable == DEFAULT_SOLVER else config.executable)
    dimacs = to_dimacs(formula)
    digest = hashlib.sha256(dimacs).hexdigest()[:16]
    if config.work_dir is not None:
        os.makedirs(config.work_dir, exist_ok=True)
        path = Path(config.work_dir) / f"query-{digest}.cnf"
        cleanup = False
    else:
        fd, name = tempfile.mkstemp(prefix=f"lgnsat-{digest}-", suffix=".cnf")
        os.close(fd)
        path = Path(name)
        cleanup = True
    path.write_bytes(dimacs)
    started = time.monotonic()
    try:
        proc = subprocess.run(
            [exe, *config.extra_args, str(path)],
            capture_output=True,
            text=True,
            timeout=config.timeout,
        )
    except subprocess.TimeoutExpired:
        return SolveOutcome(UNKNOWN, None, time.monotonic() - started, None, ())
    finally:
        if cleanup:
            path.unlink(missing_ok=True)
    wall = time.monotonic() - started
    stats = tuple(l for l in proc.stdout.splitlines() if l.startswith("c"))
    if proc.returncode == 10:
        if "s SATISFIABLE" not in proc.stdout:
            raise SolverOutputError("exit code 10 without 's SATISFIABLE' line")
        model = _parse_model(proc.stdout, formula.num_vars)
        return SolveOutcome(SAT, model, wall, 10, stats)
    if proc.returncode == 20:
        return SolveOutcome(UNSAT, None, wall, 20, stats)
    return SolveOutcome(UNKNOWN, None, wall, proc.returncode, stats)


def lit_value(model: tuple[bool, ...], lit: int) -> bool:
    value = model[abs(lit)]
    return value if lit > 0 else not value


def read_bits(model: tuple[bool, ...], lits) -> tuple[int, ...]:
    return tuple(int(lit_value(model, l)) for l in lits)


def decode_counterexample(
    model: tuple[bool, ...], varmap, schema: FeatureSchema, netlist: Netlist
) -> Witness:
    """Extract the (x, x') pair from a SAT model and recheck it concretely.

    The recheck (classes differ, the similarity predicate holds, confidence
    strictly clears the threshold) must pass: a failure means the encoding
    and the evaluator disagree, which is an internal bug, never something to
    report as a finding.
    """
    query = varmap.query
    x_bits = read_bits(model, varmap.in_lits)
    xp_bits = read_bits(model, varmap.in_prime_lits)
    try:
        x_values = schema.decode_bits(x_bits)
        xp_values = schema.decode_bits(xp_bits)
    except Exception as exc:
        raise EncodingConsistencyError(f"model bits are not well-formed: {exc}")
    x_cls, _, x_conf = predict(netlist, x_bits)
    xp_cls, _, xp_conf = predict(netlist, xp_bits)
    if x_cls == xp_cls:
        raise EncodingConsistencyError(
            f"decoded pair predicts the same class {x_cls}"
        )
    if not check_phi(x_bits, xp_bits, schema, query.eps, query.mode):
        raise EncodingConsistencyError("decoded pair violates the similarity predicate")
    if not x_conf > query.kappa:
        raise EncodingConsistencyError(
            f"decoded confidence {x_conf} does not exceed kappa {query.kappa}"
        )
    return Witness(
        x_bits=x_bits, x_values=x_values, x_class=x_cls, x_confidence=x_conf,
        x_prime_bits=xp_bits, x_prime_values=xp_values, x_prime_class=xp_cls,
        x_prime_confidence=xp_conf,
    )
