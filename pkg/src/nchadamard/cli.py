"""Command line interface.

Every subcommand prints one JSON report on stdout and exits with 0 when the
check passes, 1 when a verification fails and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import sys

from . import jsonio
from .algebra import DEFAULT_TOL, make_shape
from .classify import SearchConfig, canonical_form_3x3, check_2x2, search_hadamard
from .errors import CapExceededError, HypothesisError, MatrixFileError, NCHadamardError, PreconditionError, VerificationError
from .hadamard import dephase, dita_deform, fourier, is_biunitary, is_classical, tensor, verify_hadamard
from .invariants import DEFAULT_CAP, DEFAULT_EIG_TOL, estimate_moments
from .magic import build_magic, verify_magic
from .wreath import wreath_check

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(jsonio.dumps({"error": {"code": "USAGE", "message": message}}))
        raise SystemExit(EXIT_USAGE)


def _shape(text: str):
    try:
        return make_shape(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _write(report: dict, code: int) -> int:
    print(jsonio.dumps(report))
    return code


def _verdict(passed: bool) -> int:
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_verify(args):
    rep = verify_hadamard(jsonio.load(args.H), args.tol)
    return {"command": "verify", **rep.to_dict()}, _verdict(rep.passed)


def cmd_biunitary(args):
    ok, res = is_biunitary(jsonio.load(args.H), args.tol)
    return {"command": "biunitary", "passed": ok, "tol": args.tol, "residual": res}, _verdict(ok)


def cmd_classical(args):
    ok, res = is_classical(jsonio.load(args.H), args.tol)
    return {"command": "classical", "passed": ok, "classical": ok, "tol": args.tol, "residual": res}, _verdict(ok)


def _saved(command, H, out, tol):
    jsonio.save(H, out)
    rep = verify_hadamard(H, tol)
    return {"command": command, "output": out, "rows": H.rows, "shape": list(H.shape),
            "verification": rep.to_dict(), "passed": rep.passed}, _verdict(rep.passed)


def cmd_fourier(args):
    if args.N < 1:
        raise PreconditionError("N must be >= 1", "N")
    return _saved("fourier", fourier(args.N, args.shape), args.output, args.tol)


def cmd_tensor(args):
    L = tensor(jsonio.load(args.H), jsonio.load(args.K), args.tol)
    return _saved("tensor", L, args.output, args.tol)


def cmd_dita(args):
    L = dita_deform(jsonio.load(args.H), jsonio.load(args.K), jsonio.load(args.Q), args.tol)
    return _saved("dita", L, args.output, args.tol)


def cmd_dephase(args):
    H = jsonio.load(args.H)
    rep = verify_hadamard(H, args.tol)
    if not rep.passed:
        raise VerificationError("input is not Hadamard", rep)
    return _saved("dephase", dephase(H), args.output, args.tol)


def cmd_magic(args):
    H = jsonio.load(args.H)
    P = build_magic(H, args.tol)
    rep = verify_magic(P, args.tol)
    out = {"command": "magic", "N": P.n, "shape": list(P.shape), **rep.to_dict()}
    if not args.check:
        # P_ij per fiber as an (N*K) x (N*K) array of [re, im] pairs
        out["entries"] = [[[_complex_rows(b[i, j]) for b in P.blocks] for j in range(P.n)] for i in range(P.n)]
    return out, _verdict(rep.passed)


def _complex_rows(rows):
    return [[[z.real, z.imag] for z in line] for line in rows]


def cmd_moments(args):
    H = jsonio.load(args.H)
    P = build_magic(H, args.tol)
    rep = estimate_moments(P, args.kmax, args.eig_tol, args.cap)
    return {"command": "moments", "passed": not rep.flagged, **rep.to_dict()}, _verdict(not rep.flagged)


def cmd_wreath(args):
    rep = wreath_check(jsonio.load(args.H), jsonio.load(args.K), jsonio.load(args.Q), args.tol)
    return {"command": "wreath-check", **rep.to_dict()}, _verdict(rep.passed)


def cmd_classify3(args):
    rep = canonical_form_3x3(jsonio.load(args.H), args.tol)
    return {"command": "classify3", **rep.to_dict()}, _verdict(rep.passed)


def cmd_classify2(args):
    rep = check_2x2(jsonio.load(args.H), args.tol)
    return {"command": "classify2", **rep.to_dict()}, _verdict(rep.passed)


def cmd_search(args):
    cfg = SearchConfig(
        n=args.n,
        shape=args.shape,
        self_adjoint=args.self_adjoint,
        restarts=args.restarts,
        max_iters=args.max_iters,
        seed=args.seed,
        target_residual=args.target,
        workers=args.workers,
    )
    res = search_hadamard(cfg)
    out = {"command": "search", "passed": res.reached_target, **res.to_dict()}
    if args.output:
        jsonio.save(res.best_matrix, args.output)
        out["output"] = args.output
    return out, _verdict(res.reached_target)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nchadamard", description="Hadamard matrices over finite-dimensional C*-algebras.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tol(sp):
        sp.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)

    s = sub.add_parser("verify", help="check the Hadamard axioms")
    s.add_argument("H")
    tol(s)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("biunitary", help="check H H^* = H^t H-bar = N")
    s.add_argument("H")
    tol(s)
    s.set_defaults(func=cmd_biunitary)

    s = sub.add_parser("classical", help="check that all entries commute")
    s.add_argument("H")
    tol(s)
    s.set_defaults(func=cmd_classical)

    s = sub.add_parser("fourier", help="write the Fourier matrix F_N")
    s.add_argument("N", type=int)
    s.add_argument("--shape", type=_shape, default=(1,))
    s.add_argument("-o", "--output", required=True)
    tol(s)
    s.set_defaults(func=cmd_fourier)

    s = sub.add_parser("tensor", help="write H (x) K")
    s.add_argument("H")
    s.add_argument("K")
    s.add_argument("-o", "--output", required=True)
    tol(s)
    s.set_defaults(func=cmd_tensor)

    s = sub.add_parser("dita", help="write the deformed tensor product H (x)_Q K")
    s.add_argument("H")
    s.add_argument("K")
    s.add_argument("Q")
    s.add_argument("-o", "--output", required=True)
    tol(s)
    s.set_defaults(func=cmd_dita)

    s = sub.add_parser("dephase", help="normalise first row and column (commutative algebras only)")
    s.add_argument("H")
    s.add_argument("-o", "--output", required=True)
    tol(s)
    s.set_defaults(func=cmd_dephase)

    s = sub.add_parser("magic", help="build and verify the magic unitary")
    s.add_argument("H")
    s.add_argument("--check", action="store_true", help="only report the verification")
    tol(s)
    s.set_defaults(func=cmd_magic)

    s = sub.add_parser("moments", help="estimate moments of the main character")
    s.add_argument("H")
    s.add_argument("--kmax", type=int, required=True)
    s.add_argument("--eig-tol", type=_positive_float, default=DEFAULT_EIG_TOL)
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    tol(s)
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("wreath-check", help="verify the product formula and wreath factorization")
    s.add_argument("H")
    s.add_argument("K")
    s.add_argument("Q")
    tol(s)
    s.set_defaults(func=cmd_wreath)

    s = sub.add_parser("classify3", help="canonical form of a 3x3 Hadamard matrix")
    s.add_argument("H")
    tol(s)
    s.set_defaults(func=cmd_classify3)

    s = sub.add_parser("classify2", help="structure check of a 2x2 Hadamard matrix")
    s.add_argument("H")
    tol(s)
    s.set_defaults(func=cmd_classify2)

    s = sub.add_parser("search", help="numerical search for Hadamard matrices")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--shape", type=_shape, required=True)
    s.add_argument("--self-adjoint", action="store_true")
    s.add_argument("--restarts", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--max-iters", type=int, default=2000)
    s.add_argument("--target", type=_positive_float, default=1e-8)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = args.func(args)
    except MatrixFileError as exc:
        return _write({"command": args.command, "error": {"code": exc.code, "message": str(exc)}}, EXIT_USAGE)
    except HypothesisError as exc:
        return _write(
            {
                "command": args.command,
                "passed": False,
                "error": {"code": "HYPOTHESIS", "hypothesis": exc.hypothesis, "residual": exc.residual,
                          "tol": exc.tol, "message": str(exc)},
            },
            EXIT_FAIL,
        )
    except VerificationError as exc:
        out = {"command": args.command, "passed": False, "error": {"code": "NOT_HADAMARD", "message": str(exc)}}
        if exc.report is not None:
            out["verification"] = exc.report.to_dict()
        return _write(out, EXIT_FAIL)
    except CapExceededError as exc:
        return _write({"command": args.command, "error": {"code": "CAP_EXCEEDED", "message": str(exc)}}, EXIT_USAGE)
    except (PreconditionError, NCHadamardError, ValueError) as exc:
        return _write({"command": args.command, "error": {"code": "INPUT", "message": str(exc)}}, EXIT_USAGE)
    return _write(report, code)


if __name__ == "__main__":
    sys.exit(main())
