"""Command-line interface.

Exit codes: 0 not in the null cone (or plain success), 3 in the null cone,
4 inconclusive, 1 usage error, 2 parse error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .duality import (
    capacity_estimate,
    deficiency_value,
    dual_witness,
    is_deficient,
)
from .errors import InconclusiveError, NullConeError, ResourceError
from .invariants import (
    AlgebraicVerdict,
    coefficient_bound,
    derksen_bound,
    invariant_degrees,
    nullcone_algebraic,
    random_sw_params,
    schur_weyl_eval,
)
from .io import (
    ParseError,
    dumps,
    load_json,
    matrix_to_json,
    support_from_json,
    support_to_json,
    tensor_from_json,
)
from .polynomial import tensor_action
from .scaling import (
    Verdict,
    capacity_lower_bound,
    instability_floor,
    scale,
    write_trace_csv,
)
from .slicerank import instability_from_slice_rank, nullcone_vs_slicerank_check, slice_rank_report
from .tensor import exact_parts, support

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_NULL_CONE = 3
EXIT_INCONCLUSIVE = 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    eps: float = 1e-3
    max_iters: int | None = None
    mode: str = "scaling"
    seed: int = 0
    trace_path: str | None = None
    precision_bits: int | None = None  # None: double precision
    degree_cap: int = 4
    samples: int = 16

    def __post_init__(self):
        if not self.eps > 0:
            raise UsageError("--eps must be positive")
        if self.mode not in ("scaling", "algebraic", "both"):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.max_iters is not None and self.max_iters < 0:
            raise UsageError("--max-iters must be nonnegative")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _precision(text: str) -> int | None:
    if text == "double":
        return None
    if text.startswith("truncated:"):
        try:
            bits = int(text.split(":", 1)[1])
        except ValueError:
            bits = 0
        if bits >= 1:
            return bits
    raise argparse.ArgumentTypeError("expected 'double' or 'truncated:BITS'")


def _dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None
    if len(dims) < 2 or any(n < 1 for n in dims):
        raise argparse.ArgumentTypeError("need at least two positive dimensions")
    return dims


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nullcone", description="Null-cone tests for tensors under SL(n1) x ... x SL(nd).")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scaling_flags(q):
        q.add_argument("--eps", type=float, default=1e-3, help="target ds (default 1e-3)")
        q.add_argument("--max-iters", type=int, default=None,
                       help="iteration cap (default: the full iteration bound)")
        q.add_argument("--precision", type=_precision, default=None, metavar="double|truncated:BITS",
                       help="floating mode for the scaling loop (default double)")
        q.add_argument("--csv-trace", "--trace", dest="trace", default=None, metavar="PATH",
                       help="write per-iteration iter,axis,ds,norm_sq rows to PATH")

    def algebraic_flags(q, degree_default):
        q.add_argument("--seed", type=int, default=0, help="seed for random invariants (default 0)")
        q.add_argument("--samples", type=int, default=16, help="random invariants per degree (default 16)")
        q.add_argument("--degree-cap", type=int, default=degree_default,
                       help=f"largest invariant degree tried (default {degree_default})")

    q = sub.add_parser("nullcone", help="decide null-cone membership")
    q.add_argument("file")
    q.add_argument("--mode", choices=["scaling", "algebraic", "both"], default="scaling")
    q.add_argument("--exhaustive", action="store_true",
                   help="also run the exhaustive Reynolds search in algebraic mode")
    scaling_flags(q)
    algebraic_flags(q, 4)

    q = sub.add_parser("scale", help="run the scaling loop and report the group element")
    q.add_argument("file")
    scaling_flags(q)

    q = sub.add_parser("capacity", help="estimate the capacity by alternating sweeps")
    q.add_argument("file")
    q.add_argument("--sweeps", type=int, default=20, help="number of cyclic sweeps (default 20)")

    q = sub.add_parser("deficiency", help="deficiency of a support (or of a tensor's support)")
    q.add_argument("file")

    q = sub.add_parser("invariants", help="evaluate random spanning invariants")
    q.add_argument("file")
    q.add_argument("--dims", type=_dims, default=None, help="expected tensor dims, e.g. 1,2,2")
    q.add_argument("--degree", type=int, default=None,
                   help="invariant degree (default: smallest admissible)")
    q.add_argument("--samples", type=int, default=8, help="number of random invariants (default 8)")
    q.add_argument("--seed", type=int, default=0, help="seed (default 0)")

    q = sub.add_parser("slicerank", help="slice-rank bounds and the null-cone bridge")
    q.add_argument("file")
    q.add_argument("--bridge", action="store_true",
                   help="also compare scaling verdicts on X and its tensor square")
    q.add_argument("--eps", type=float, default=1e-3, help="eps for the bridge check (default 1e-3)")
    return p


def _value_json(v) -> dict:
    if isinstance(v, (complex, float)):
        return {"re": repr(complex(v).real), "im": repr(complex(v).imag)}
    re, im = exact_parts(v)
    return {"re": str(re), "im": str(im)}


def _scaling_report(X, cfg: RunConfig) -> tuple[dict, int]:
    fh = open(cfg.trace_path, "w") if cfg.trace_path else None
    try:
        try:
            out = scale(X, cfg.eps, cfg.max_iters, truncation_bits=cfg.precision_bits)
        except InconclusiveError as exc:
            return {"verdict": "Inconclusive", "message": str(exc)}, EXIT_INCONCLUSIVE
        if fh is not None:
            write_trace_csv(out.trace, fh)
    finally:
        if fh is not None:
            fh.close()
    rep = {"iterations": out.iterations, "iteration_bound": out.bound, "ds": out.ds_value}
    if out.verdict is Verdict.SCALED:
        floor = instability_floor(X.dims)
        rep.update({
            "verdict": "NotInNullCone",
            "certified": Fraction(out.ds_value) < floor ** 2,
            "group": [matrix_to_json(A) for A in out.group.factors],
        })
        return rep, EXIT_OK
    rep.update({"verdict": "InNullCone", "reason": out.reason.value})
    if out.axis is not None:
        rep["axis"] = out.axis
    return rep, EXIT_NULL_CONE


def _algebraic_report(X, cfg: RunConfig, exhaustive: bool) -> tuple[dict, int]:
    out = nullcone_algebraic(X, cfg.degree_cap, cfg.samples, cfg.seed, exhaustive=exhaustive)
    rep = {"verdict": out.verdict.value, "certified": out.certified,
           "evaluations": out.evaluations, "notes": list(out.notes)}
    if out.witness is not None:
        rep["witness"] = out.witness
    code = {AlgebraicVerdict.NOT_IN_NULL_CONE: EXIT_OK,
            AlgebraicVerdict.IN_NULL_CONE: EXIT_NULL_CONE,
            AlgebraicVerdict.NO_WITNESS_FOUND: EXIT_INCONCLUSIVE}[out.verdict]
    return rep, code


def cmd_nullcone(args) -> tuple[dict, int]:
    X = tensor_from_json(load_json(args.file))
    cfg = RunConfig(eps=args.eps, max_iters=args.max_iters, mode=args.mode, seed=args.seed,
                    trace_path=args.trace, precision_bits=args.precision,
                    degree_cap=args.degree_cap, samples=args.samples)
    report = {"command": "nullcone", "dims": list(X.dims), "mode": cfg.mode}
    codes = []
    if cfg.mode in ("scaling", "both"):
        report["scaling"], c = _scaling_report(X, cfg)
        codes.append(c)
    if cfg.mode in ("algebraic", "both"):
        if X.exact is None:
            raise UsageError("algebraic mode needs integer or rational entries")
        report["algebraic"], c = _algebraic_report(X, cfg, args.exhaustive)
        codes.append(c)
    decided = {c for c in codes if c != EXIT_INCONCLUSIVE}
    if len(decided) == 1:
        code = decided.pop()
    elif not decided:
        code = EXIT_INCONCLUSIVE
    else:
        code = EXIT_INCONCLUSIVE
        report["conflict"] = True
    report["verdict"] = {EXIT_OK: "NotInNullCone", EXIT_NULL_CONE: "InNullCone",
                         EXIT_INCONCLUSIVE: "Inconclusive"}[code]
    return report, code


def cmd_scale(args) -> tuple[dict, int]:
    X = tensor_from_json(load_json(args.file))
    cfg = RunConfig(eps=args.eps, max_iters=args.max_iters, trace_path=args.trace,
                    precision_bits=args.precision)
    rep, code = _scaling_report(X, cfg)
    rep.update({"command": "scale", "dims": list(X.dims), "eps": cfg.eps})
    return rep, code


def cmd_capacity(args) -> tuple[dict, int]:
    X = tensor_from_json(load_json(args.file))
    if args.sweeps < 0:
        raise UsageError("--sweeps must be nonnegative")
    if X.is_zero():
        raise UsageError("capacity of the zero tensor is not defined")
    est = capacity_estimate(X, args.sweeps)
    rep = {"command": "capacity", "dims": list(X.dims), "value": est.value,
           "iterations": est.iterations, "history": list(est.history),
           "lower_bound_if_not_null": str(capacity_lower_bound(X.dims))}
    if est.note:
        rep["note"] = est.note
    # a singular marginal of the input itself decides membership exactly
    if est.iterations == 0 and est.value == 0.0:
        rep["verdict"] = "InNullCone"
        return rep, EXIT_NULL_CONE
    return rep, EXIT_OK


def cmd_deficiency(args) -> tuple[dict, int]:
    obj = load_json(args.file)
    from_tensor = isinstance(obj, dict) and "entries" in obj
    if from_tensor:
        S = support(tensor_from_json(obj))
    else:
        S = support_from_json(obj)
    deficient, cert = is_deficient(S)
    rep = {"command": "deficiency", "support": support_to_json(S), "deficient": deficient}
    if deficient:
        rep["certificate"] = cert.to_json()
        rep["value"] = deficiency_value(S) if len(S) else None
    else:
        rep["value"] = 0.0
        T = dual_witness(S)
        rep["witness"] = [[j + 1 for j in t] + [float(T[t])] for t in S.sorted() if T[t] > 0]
    if from_tensor and deficient:
        # a deficient support puts the tensor itself in the null cone
        rep["verdict"] = "InNullCone"
        return rep, EXIT_NULL_CONE
    return rep, EXIT_OK


def cmd_invariants(args) -> tuple[dict, int]:
    X = tensor_from_json(load_json(args.file))
    if args.dims is not None and tuple(args.dims) != X.dims:
        raise UsageError(f"--dims {list(args.dims)} does not match the tensor dims {list(X.dims)}")
    if args.samples < 0:
        raise UsageError("--samples must be nonnegative")
    degree = args.degree if args.degree is not None else invariant_degrees(X.dims, 10 ** 6)[0]
    if degree < 1 or any(degree % n for n in X.dims[1:]):
        raise UsageError(f"degree {degree} must be a positive multiple of every n_i")
    spec = tensor_action(X.dims) if X.size <= 64 else None
    evals = []
    nonzero = 0
    for s in range(args.samples):
        perms, idx = random_sw_params(X.dims, degree, args.seed, s)
        v = schur_weyl_eval(X, degree, perms, idx)
        nonzero += bool(v)
        evals.append({"sample": s, "perms": [[p + 1 for p in perm] for perm in perms],
                      "idx": [i + 1 for i in idx], "value": _value_json(v)})
    rep = {"command": "invariants", "dims": list(X.dims), "degree": degree,
           "seed": args.seed, "evaluations": evals, "nonzero": nonzero}
    if spec is not None:
        rep["derksen_bound"] = derksen_bound(spec)
        rep["coefficient_bound"] = str(coefficient_bound(spec, degree))
    return rep, (EXIT_OK if nonzero else EXIT_INCONCLUSIVE)


def cmd_slicerank(args) -> tuple[dict, int]:
    X = tensor_from_json(load_json(args.file))
    rep_sr = slice_rank_report(X)
    m, d = X.dims[1], X.d
    rep = {"command": "slicerank", "dims": list(X.dims),
           "upper": rep_sr.upper, "lower": rep_sr.lower, "exact": rep_sr.exact,
           "notes": list(rep_sr.notes)}
    best = rep_sr.exact if rep_sr.exact is not None else rep_sr.upper
    if args.bridge:
        rep["bridge"] = nullcone_vs_slicerank_check(X, args.eps).to_json()
    if best < m:
        rep["instability_lower_bound"] = instability_from_slice_rank(m, d)
        rep["verdict"] = "InNullCone"
        return rep, EXIT_NULL_CONE
    return rep, EXIT_OK


COMMANDS = {
    "nullcone": cmd_nullcone,
    "scale": cmd_scale,
    "capacity": cmd_capacity,
    "deficiency": cmd_deficiency,
    "invariants": cmd_invariants,
    "slicerank": cmd_slicerank,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except NullConeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    print(dumps(report))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
