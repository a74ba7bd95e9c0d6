"""Command-line front end: parameter sweeps emitted as CSV or JSON tables.

Exit codes: 0 success, 1 usage error, 2 computation error (including any
error row in a sweep).
"""
import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import asymptotics, bath_work, qubit_work, qudit_work
from .errors import WorkExtractionError
from .numerics import default_max_compositions

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2

QUBIT_COLUMNS = [
    ("N", int), ("gamma", float), ("k", int), ("w", float), ("p_exact", float),
    ("p_bound_quadratic", float), ("vacuous_quadratic", bool),
    ("p_bound_relent", float), ("vacuous_relent", bool), ("error", str),
]
MIN_SPINS_COLUMNS = [
    ("fraction", float), ("N_exact", int), ("N_relent", int), ("N_quadratic", int), ("error", str),
]
QUDIT_COLUMNS = [
    ("N", int), ("gamma", float), ("mode", str), ("w", float), ("k", str), ("p_exact", float),
    ("p_protocol", float), ("p_bound", float), ("vacuous", bool), ("error", str),
]
BATH_COLUMNS = [
    ("N", int), ("gamma", float), ("w", float), ("p_exact", float), ("p_bound", float),
    ("vacuous", bool), ("error", str),
]
SCHEDULE_COLUMNS = [
    ("N", int), ("gamma_logN", float), ("in_range_logN", bool), ("bound_logN", float),
    ("work_fraction_logN", float), ("gamma_fixed", float), ("in_range_fixed", bool),
    ("min_copies_fixed", int), ("error", str),
]
LOCAL_COLUMNS = [("w", float), ("probability", float)]
LOCAL_SUMMARY_COLUMNS = [("N", int), ("p", float), ("nu", float), ("mean", float), ("std", float)]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- formatting ------------------------------------------------------------


def format_float(x: float) -> str:
    """12 significant digits; -0 printed as 0."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = format(x, ".12g")
    return "0" if s == "-0" else s


def _cell(value, kind) -> str:
    if value is None:
        return ""
    if kind is bool:
        return "true" if value else "false"
    if kind is float:
        return format_float(float(value))
    return str(value)


def _json_value(value, kind):
    if value is None:
        return None
    if kind is float:
        x = float(format_float(float(value)))
        return x if math.isfinite(x) else None
    if kind is int:
        return int(value)
    if kind is bool:
        return bool(value)
    return str(value)


def emit(rows: list[dict], columns, fmt: str = "csv") -> str:
    names = [name for name, _ in columns]
    if fmt == "json":
        out = [{name: _json_value(row.get(name), kind) for name, kind in columns} for row in rows]
        return json.dumps(out, indent=1) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in rows:
        writer.writerow([_cell(row.get(name), kind) for name, kind in columns])
    return buf.getvalue()


def _parse_cell(text: str, kind):
    if text == "":
        return None
    if kind is bool:
        return text == "true"
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    return text


def parse(text: str, columns, fmt: str = "csv") -> list[dict]:
    """Inverse of :func:`emit` (up to the fixed float precision)."""
    kinds = dict(columns)
    if fmt == "json":
        return [{name: row.get(name) for name in kinds} for row in json.loads(text)]
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return [{name: _parse_cell(cell, kinds[name]) for name, cell in zip(header, rec)} for rec in reader]


# --- input parsing ---------------------------------------------------------


def parse_list(text: str, kind=float) -> list:
    """Comma- or space-separated items; an item ``start:stop:count`` expands to an inclusive linear grid."""
    out = []
    try:
        for item in text.replace(",", " ").split():
            if ":" in item:
                a, b, n = item.split(":")
                out.extend(kind(round(float(x), 12)) for x in np.linspace(float(a), float(b), int(n)))
            else:
                out.append(kind(item))
    except ValueError as exc:
        raise UsageError(f"cannot parse list {text!r}: {exc}") from None
    if not out:
        raise UsageError("empty list")
    return out


@dataclass
class StateSpec:
    probs: list
    energies: list
    beta: float | None = None
    base_quantum: float | None = None

    def state(self) -> qudit_work.DiagonalState:
        return qudit_work.DiagonalState(self.probs, self.energies)


STATE_KEYS = {"probs", "energies", "beta", "base_quantum"}


def parse_state_text(text: str) -> StateSpec:
    """Flat ``key = value`` lines; lists are comma- or space-separated; ``#`` starts a comment."""
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":"
        if sep not in line:
            raise UsageError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split(sep, 1))
        if key not in STATE_KEYS:
            raise UsageError(f"line {lineno}: unknown key {key!r}")
        if key in fields:
            raise UsageError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = value
    for key in ("probs", "energies"):
        if key not in fields:
            raise UsageError(f"state file lacks {key!r}")
    spec = StateSpec(parse_list(fields["probs"]), parse_list(fields["energies"]))
    if "beta" in fields:
        spec.beta = parse_list(fields["beta"])[0]
    if "base_quantum" in fields:
        spec.base_quantum = parse_list(fields["base_quantum"])[0]
    if len(spec.probs) != len(spec.energies):
        raise UsageError("probs and energies differ in length")
    return spec


def load_state(path: str) -> StateSpec:
    try:
        with open(path) as fh:
            return parse_state_text(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read state file: {exc}") from None


# --- commands --------------------------------------------------------------


def _bound_cells(fn, *args):
    try:
        b = fn(*args)
    except WorkExtractionError:
        return None, True
    return b.value, b.vacuous


def qubit_sweep_rows(p: float, Ns, gammas=None, ks=None, nu: float = 1.0) -> list[dict]:
    rows = []
    for N in Ns:
        grid = [(g, qubit_work.k_from_gamma(N, p, g)) for g in gammas] if ks is None else \
            [(qubit_work.gamma_from_k(N, p, k) if p != 0.5 else None, k) for k in ks]
        for gamma, k in grid:
            row = {"N": N, "gamma": gamma, "k": k, "w": k * nu}
            try:
                row["p_exact"] = qubit_work.exact_success_qubits(N, p, k)
            except WorkExtractionError as exc:
                row["error"] = str(exc)
                rows.append(row)
                continue
            row["p_bound_quadratic"], row["vacuous_quadratic"] = _bound_cells(qubit_work.hoeffding_bound, N, p, k)
            row["p_bound_relent"], row["vacuous_relent"] = _bound_cells(qubit_work.relent_bound, N, p, k)
            rows.append(row)
    return rows


def min_spins_rows(p: float, P0: float, fractions, n_max: int = 10**6) -> list[dict]:
    rows = []
    for f in fractions:
        row = {"fraction": f}
        try:
            row["N_relent"] = qubit_work.min_spins_bound(p, f, P0, "relative-entropy")
            row["N_quadratic"] = qubit_work.min_spins_bound(p, f, P0, "quadratic")
            row["N_exact"] = qubit_work.min_spins_exact(p, f, P0, n_max)
        except WorkExtractionError as exc:
            row["error"] = str(exc)
        rows.append(row)
    return rows


def qudit_sweep_rows(rho, Ns, gammas=None, modes=("passive", "thermal"), all_lattice=False,
                     corrected=False, base_quantum=None, max_compositions=None) -> list[dict]:
    rows = []
    for N in Ns:
        opt = qudit_work.IsolatedOptimizer(rho, N, base_quantum, max_compositions)
        if all_lattice:
            w_glob = qudit_work.global_ergotropy_rate(rho)
            for w in opt.lattice():
                if w < 0:
                    continue
                gamma = 1.0 - w / (N * w_glob) if w_glob > 0 else None
                rows.append({"N": N, "gamma": gamma, "mode": "lattice", "w": float(w), "p_exact": opt.success(w)})
        for gamma in gammas or []:
            for mode in modes:
                row = {"N": N, "gamma": gamma, "mode": mode}
                try:
                    sv = qudit_work.shift_vector(rho, N, gamma, mode)
                    row["w"] = sv.work
                    row["k"] = ";".join(str(x) for x in sv.k)
                    row["p_exact"] = opt.success(sv.work)
                    row["p_protocol"] = qudit_work.protocol_success(rho, N, sv, max_compositions)
                    b = qudit_work.isolated_bound(rho, N, gamma, mode, corrected)
                    row["p_bound"], row["vacuous"] = b.value, b.vacuous
                except WorkExtractionError as exc:
                    row["error"] = str(exc)
                rows.append(row)
    return rows


def bath_sweep_rows(rho, beta: float, Ns, gammas, max_compositions=None) -> list[dict]:
    rows = []
    w_th = bath_work.extractable_work_bath(rho, beta)
    for N in Ns:
        for gamma in gammas:
            w = (1.0 - gamma) * N * w_th
            row = {"N": N, "gamma": gamma, "w": w}
            try:
                row["p_exact"] = bath_work.bath_exact_success(rho, beta, N, w, max_compositions)
            except WorkExtractionError as exc:
                row["error"] = str(exc)
                rows.append(row)
                continue
            row["p_bound"], row["vacuous"] = _bound_cells(bath_work.bath_bound, rho, beta, N, gamma)
            rows.append(row)
    return rows


def schedule_rows(c: float, d: int, Ns, epsilon: float | None = None) -> list[dict]:
    rows = []
    for N in Ns:
        row = {"N": N}
        try:
            s = asymptotics.gamma_logN_schedule(N, c)
            row["gamma_logN"], row["in_range_logN"] = s.gamma, s.in_range
            row["bound_logN"] = 1.0 - d * math.exp(-N * s.gamma**2 * c**2)
            row["work_fraction_logN"] = asymptotics.schedule_work_fraction(N, c)
            if epsilon is not None:
                f = asymptotics.gamma_fixed_error(epsilon, d, c, N)
                row["gamma_fixed"], row["in_range_fixed"] = f.gamma, f.in_range
                if f.in_range:
                    row["min_copies_fixed"] = asymptotics.min_copies(epsilon, d, c, f.gamma)
        except WorkExtractionError as exc:
            row["error"] = str(exc)
        rows.append(row)
    return rows


def local_dist_rows(N: int, p: float, nu: float) -> list[dict]:
    dist = qubit_work.local_protocol_distribution(N, p, nu)
    return [{"w": float(w), "probability": float(q)} for w, q in zip(dist.support, dist.probs)]


def _load(args):
    spec = load_state(args.state)
    try:
        return spec, spec.state()
    except ValueError as exc:
        raise UsageError(f"invalid state: {exc}") from None


def _run(args) -> tuple[list[dict], list]:
    cmd = args.command
    if cmd == "qubit-sweep":
        Ns = parse_list(args.N, int)
        if (args.gamma is None) == (args.k is None):
            raise UsageError("give exactly one of --gamma or --k")
        gammas = parse_list(args.gamma) if args.gamma is not None else None
        ks = parse_list(args.k, int) if args.k is not None else None
        return qubit_sweep_rows(args.p, Ns, gammas, ks, args.nu), QUBIT_COLUMNS
    if cmd == "min-spins":
        return min_spins_rows(args.p, args.P0, parse_list(args.fraction), args.n_max), MIN_SPINS_COLUMNS
    if cmd == "qudit-sweep":
        spec, rho = _load(args)
        if args.gamma is None and not args.all_lattice:
            raise UsageError("give --gamma and/or --all-lattice")
        modes = ("passive", "thermal") if args.mode == "both" else (args.mode,)
        gammas = parse_list(args.gamma) if args.gamma is not None else None
        rows = qudit_sweep_rows(rho, parse_list(args.N, int), gammas, modes, args.all_lattice,
                                args.corrected, spec.base_quantum, args.max_compositions)
        return rows, QUDIT_COLUMNS
    if cmd == "bath-sweep":
        spec, rho = _load(args)
        beta = args.beta if args.beta is not None else spec.beta
        if beta is None:
            raise UsageError("bath-sweep needs beta (state file or --beta)")
        rows = bath_sweep_rows(rho, beta, parse_list(args.N, int), parse_list(args.gamma), args.max_compositions)
        return rows, BATH_COLUMNS
    if cmd == "schedule":
        return schedule_rows(args.c, args.d, parse_list(args.N, int), args.epsilon), SCHEDULE_COLUMNS
    if cmd == "local-dist":
        if args.summary:
            dist = qubit_work.local_protocol_distribution(args.N, args.p, args.nu)
            row = {"N": args.N, "p": args.p, "nu": args.nu, "mean": dist.mean, "std": dist.std}
            return [row], LOCAL_SUMMARY_COLUMNS
        return local_dist_rows(args.N, args.p, args.nu), LOCAL_COLUMNS
    raise UsageError(f"unknown command {cmd!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", help="write the table here instead of stdout")
    common.add_argument("--max-compositions", type=int, default=None,
                        help="composition-count guard (default from $COLLECTIVE_WORK_MAX_COMPOSITIONS or 1e7)")

    parser = _Parser(prog="collective-work", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("qubit-sweep", parents=[common], help="exact and bounded success for N qubits")
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--nu", type=float, default=1.0)
    q.add_argument("--N", required=True, help="copy counts, e.g. 10,25,50,100")
    q.add_argument("--gamma", help="gamma grid (list or start:stop:count)")
    q.add_argument("--k", help="work-quanta grid instead of gamma")

    m = sub.add_parser("min-spins", parents=[common], help="minimal copies for a target success")
    m.add_argument("--p", type=float, required=True)
    m.add_argument("--P0", type=float, default=0.99)
    m.add_argument("--fraction", required=True, help="extracted work per copy in units of nu")
    m.add_argument("--n-max", type=int, default=10**6)

    for name, helptext in (("qudit-sweep", "isolated d-level sweep"), ("bath-sweep", "bath-assisted sweep")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--state", required=True, help="state file (probs, energies, beta, base_quantum)")
        s.add_argument("--N", required=True)
        s.add_argument("--gamma")
        if name == "qudit-sweep":
            s.add_argument("--mode", choices=["passive", "thermal", "both"], default="both")
            s.add_argument("--all-lattice", action="store_true", help="also emit the exact optimum at every lattice w >= 0")
            s.add_argument("--corrected", action="store_true", help="use the 1/N-corrected bound coefficient")
        else:
            s.add_argument("--beta", type=float)

    sc = sub.add_parser("schedule", parents=[common], help="gamma(N) schedules")
    sc.add_argument("--c", type=float, required=True)
    sc.add_argument("--d", type=int, required=True)
    sc.add_argument("--N", required=True)
    sc.add_argument("--epsilon", type=float)

    ld = sub.add_parser("local-dist", parents=[common], help="work distribution of the copy-by-copy protocol")
    ld.add_argument("--N", type=int, required=True)
    ld.add_argument("--p", type=float, required=True)
    ld.add_argument("--nu", type=float, default=1.0)
    ld.add_argument("--summary", action="store_true", help="emit mean and standard deviation only")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "max_compositions", None) is None:
        args.max_compositions = default_max_compositions()
    try:
        rows, columns = _run(args)
    except UsageError as exc:
        print(f"collective-work: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WorkExtractionError as exc:
        print(f"collective-work: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    text = emit(rows, columns, args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = [r for r in rows if r.get("error")]
    for r in failed:
        detail = ", ".join(f"{k}={v}" for k, v in r.items() if k != "error" and v is not None)
        print(f"error row ({detail}): {r['error']}", file=sys.stderr)
    return EXIT_COMPUTE if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
