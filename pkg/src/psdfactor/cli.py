"""Batch front-end: one subcommand per engine, JSON in, JSON report out.

    psdfactor <command> --in job.json [--tol 1e-8] [--seed N] [--trials K]
                        [--threads J] [--out report.json]

``--in -`` reads the job from stdin.  The environment variable
``PSDFACTOR_TOL`` overrides the default tolerance (a ``--tol`` flag wins).
Exit codes: 0 = completed (feasible and infeasible both count), 2 = a
hypothesis gate failed, 3 = malformed input.

Reports are deterministic: a fixed JobSpec yields a byte-identical report
apart from the ``wall_clock_s`` field, independent of ``--threads``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, factor, proptests
from .diagmodel import (
    DiagRel,
    diag_adjoint,
    diag_compose,
    diag_inverse,
    diag_order_leq,
    diag_reverse_solve,
    diag_seb_solve,
    diag_truncate,
)
from .errors import HypothesisError, ParseError, PsdFactorError
from .linrel import (
    LinRel,
    rel_adjoint,
    rel_classify,
    rel_compose,
    rel_from_matrix,
    rel_inverse,
    rel_moore_penrose,
    rel_order_leq,
    rel_parts,
    rel_restrict,
    rel_sqrt,
)
from .numkernel import span
from .serialize import (
    loads,
    matrix_from_json,
    payload_from_json,
    payload_to_json,
)

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_PARSE = 3


def _num(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _maybe(value):
    return None if value is None else payload_to_json(value)


def _as_rel(payload) -> LinRel:
    return payload if isinstance(payload, LinRel) else rel_from_matrix(payload)


def _want(job, key, where):
    if key not in job:
        raise ParseError(f"{where}: missing required input {key!r}")
    return payload_from_json(job[key], f"{where}.{key}")


def _run_seb(job, tol, seed, trials, threads):
    T = _want(job, "T", "seb")
    B = _want(job, "B", "seb")
    if isinstance(T, LinRel) or isinstance(B, LinRel):
        cert = factor.seb_relation_solve(_as_rel(T), _as_rel(B), tol=tol)
    else:
        cert = factor.seb_solve(T, B, tol=tol)
    return {
        "feasible": cert.feasible,
        "lambda_star": _num(cert.lambda_star),
        "X": _maybe(cert.X),
        "G0": _maybe(cert.G0),
        "residual_xb_t": {"value": _num(cert.residual_xb_t), "tol": tol},
        "norm_X": _num(cert.norm_X),
        "checks": {k: _num(v) for k, v in cert.checks.items()},
    }


def _run_reverse(job, tol, seed, trials, threads):
    T = _as_rel(_want(job, "T", "reverse"))
    B = _as_rel(_want(job, "B", "reverse"))
    cert = factor.reverse_solve(T, B, tol=tol)
    return {
        "feasible": cert.feasible,
        "eta_star": _num(cert.eta_star),
        "Y": _maybe(cert.Y),
        "residuals": {k: _num(v) for k, v in cert.residuals.items()},
        "tol": tol,
    }


def _run_wsimilar(job, tol, seed, trials, threads):
    T = _want(job, "T", "wsimilar")
    forms = factor.wsimilar_forms(T, tol=tol)
    out = {
        name: payload_to_json(getattr(forms, name))
        for name in ("X", "S", "X1", "B1", "X2", "B2", "W", "Z")
    }
    out["plusdot_ok"] = forms.plusdot_ok
    out["checks"] = {k: _num(v) for k, v in forms.checks.items()}
    return out


def _run_intertwine(job, tol, seed, trials, threads):
    op = job.get("op", "sylvester")
    T = _want(job, "T", "intertwine")
    S = _want(job, "S", "intertwine")
    if op == "sylvester":
        inter = factor.sylvester_intertwiners(T, S, seed=seed)
        return {
            "dimension": len(inter.basis),
            "rank": inter.rank,
            "max_rank_element": payload_to_json(inter.max_rank_element),
        }
    if op == "quasiaffine":
        qa = factor.quasiaffine_decide(T, S, tol=tol, seed=seed)
        return {"affine": qa.affine, "G": _maybe(qa.G), "space_dim": qa.space_dim}
    if op == "quasisimilar":
        qs = factor.quasisimilar_decide(T, S, tol=tol, seed=seed)
        return {
            "similar_pair": qs.similar_pair,
            "G1": _maybe(qs.G1),
            "G2": _maybe(qs.G2),
            "checks": {k: _num(v) for k, v in qs.checks.items()},
        }
    raise ParseError(f"intertwine: unknown op {op!r}")


def _run_factor(job, tol, seed, trials, threads):
    op = job.get("op")
    if op == "douglas":
        sol = factor.douglas_solve(_want(job, "T", op), _want(job, "B", op), tol=tol)
        return {"feasible": sol.feasible, "Y": _maybe(sol.Y), "c": _num(sol.c)}
    if op == "ldeux":
        hint = payload_from_json(job["Y_hint"], "ldeux.Y_hint") if "Y_hint" in job else None
        cert = factor.ldeux_certify(_want(job, "T", op), Y_hint=hint, tol=tol)
        return {
            "in_class": cert.in_class,
            "A": _maybe(cert.A),
            "B": _maybe(cert.B),
            "Y": _maybe(cert.Y),
            "residual": {"value": _num(cert.residual), "tol": tol},
        }
    if op == "psd_similarity":
        sim = factor.psd_similarity_decide(_want(job, "T", op), tol=tol)
        return {"accept": sim.accept, "G": _maybe(sim.G), "S": _maybe(sim.S)}
    if op == "presimilar":
        S, match = factor.presimilar_S(_want(job, "A", op), _want(job, "B", op))
        return {"S": payload_to_json(S), "spectra_match": match, "tol": 1e-7}
    if op == "spectra_swap":
        flag = factor.spectra_swap_check(_want(job, "A", op), _want(job, "B", op))
        return {"swap_ok": flag, "tol": 1e-7}
    if op == "power_chain":
        chain = factor.power_chain(
            _want(job, "A", op), _want(job, "B", op), n_max=int(job.get("n_max", 4)), tol=tol
        )
        return {
            "levels": len(chain.S_seq),
            "S_seq": [payload_to_json(S) for S in chain.S_seq],
            "residuals": [{"value": r, "tol": tol} for r in chain.residuals],
            "psd_margins": chain.psd_margins,
        }
    if op == "inclusionnfs":
        pkg = factor.inclusionnfs_package(
            _want(job, "T", op), _want(job, "G", op), _want(job, "S", op), tol=tol
        )
        return _package_json(pkg)
    if op == "tba":
        pkg = factor.tba_package(
            _want(job, "T", op), _want(job, "G", op), _want(job, "S", op), tol=tol
        )
        return _package_json(pkg)
    if op == "bounded_s":
        rep = factor.bounded_S_checks(
            _want(job, "T", op), _want(job, "G", op), _want(job, "S", op), tol=tol
        )
        return {
            "all_passed": rep.all_passed,
            "items": [
                {"name": it.name, "residual": it.residual, "tol": it.tol, "passed": it.passed}
                for it in rep.items
            ],
        }
    raise ParseError(f"factor: unknown op {op!r}")


def _package_json(pkg):
    diag = {}
    for k, v in pkg.diagnostics.items():
        diag[k] = payload_to_json(v) if isinstance(v, np.ndarray) else _num(v)
    return {
        "direction": pkg.direction,
        "A": payload_to_json(pkg.A),
        "B_F": _maybe(pkg.B_F),
        "A_F": _maybe(pkg.A_F),
        "diagnostics": diag,
    }


def _run_rel(job, tol, seed, trials, threads):
    op = job.get("op")
    if op in ("adjoint", "inverse", "sqrt", "moore_penrose", "parts", "classify"):
        T = _as_rel(_want(job, "T", f"rel.{op}"))
        if op == "adjoint":
            return {"result": payload_to_json(rel_adjoint(T))}
        if op == "inverse":
            return {"result": payload_to_json(rel_inverse(T))}
        if op == "sqrt":
            return {"result": payload_to_json(rel_sqrt(T))}
        if op == "moore_penrose":
            return {"result": payload_to_json(rel_moore_penrose(T))}
        if op == "classify":
            flags = rel_classify(T, tol=tol)
            return {
                "symmetric": flags.symmetric,
                "nonnegative": flags.nonnegative,
                "selfadjoint": flags.selfadjoint,
            }
        parts = rel_parts(T)
        return {
            "dom_dim": parts.dom.dim,
            "ran_dim": parts.ran.dim,
            "ker_dim": parts.ker.dim,
            "mul_dim": parts.mul.dim,
            "operator_part": payload_to_json(parts.operator_part_matrix),
        }
    if op == "compose":
        S = _as_rel(_want(job, "S", "rel.compose"))
        T = _as_rel(_want(job, "T", "rel.compose"))
        return {"result": payload_to_json(rel_compose(S, T))}
    if op == "restrict":
        B = _as_rel(_want(job, "B", "rel.restrict"))
        D = matrix_from_json(job["D"], "rel.restrict.D")
        return {"result": payload_to_json(rel_restrict(B, span(D, ambient_dim=B.dom_dim)))}
    if op == "order_leq":
        lo = _as_rel(_want(job, "Tlo", "rel.order_leq"))
        hi = _as_rel(_want(job, "Thi", "rel.order_leq"))
        return {"leq": rel_order_leq(lo, hi, tol=tol), "tol": tol}
    raise ParseError(f"rel: unknown op {op!r}")


def _run_diag(job, tol, seed, trials, threads):
    op = job.get("op")
    if op in ("seb", "reverse", "compose", "order_leq"):
        t = _want(job, "t", f"diag.{op}")
        b = _want(job, "b", f"diag.{op}")
        if not isinstance(t, DiagRel) or not isinstance(b, DiagRel):
            raise ParseError("diag: inputs must be symbols")
        if op == "seb":
            res = diag_seb_solve(t, b)
            return {
                "feasible": res.feasible,
                "lambda_star": _num(res.lambda_star),
                "X": _maybe(res.X),
                "checks": res.checks,
            }
        if op == "reverse":
            res = diag_reverse_solve(t, b)
            return {
                "feasible": res.feasible,
                "eta_star": _num(res.eta_star),
                "Y": _maybe(res.Y),
                "checks": res.checks,
            }
        if op == "compose":
            return {"result": payload_to_json(diag_compose(t, b))}
        return {"leq": diag_order_leq(t, b)}
    if op in ("adjoint", "inverse"):
        t = _want(job, "t", f"diag.{op}")
        out = diag_adjoint(t) if op == "adjoint" else diag_inverse(t)
        return {"result": payload_to_json(out)}
    if op == "truncate":
        t = _want(job, "t", "diag.truncate")
        N = int(job.get("N", 10))
        out = diag_truncate(t, N)
        return {"result": payload_to_json(out)}
    raise ParseError(f"diag: unknown op {op!r}")


def _run_proptest(job, tol, seed, trials, threads):
    suite = job.get("suite")
    if not suite:
        raise ParseError("proptest: missing 'suite'")
    try:
        return proptests.run_suite(suite, trials=trials, seed=seed, tol=tol, threads=threads)
    except KeyError as exc:
        raise ParseError(str(exc)) from exc


_COMMANDS = {
    "seb": _run_seb,
    "reverse": _run_reverse,
    "factor": _run_factor,
    "wsimilar": _run_wsimilar,
    "intertwine": _run_intertwine,
    "rel": _run_rel,
    "diag": _run_diag,
    "proptest": _run_proptest,
}


def build_parser():
    p = argparse.ArgumentParser(prog="psdfactor", description=__doc__)
    p.add_argument("command", choices=sorted(_COMMANDS))
    p.add_argument("--in", dest="infile", default=None, help="job JSON path, or - for stdin")
    p.add_argument("--out", dest="outfile", default=None, help="report path (default stdout)")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--version", action="version", version=__version__)
    return p


def run_job(command: str, job: dict, tol: float, seed: int, trials: int, threads: int) -> dict:
    t0 = time.monotonic()
    results = _COMMANDS[command](job, tol, seed, trials, threads)
    report = {
        "command": command,
        "tol": tol,
        "seed": seed,
        "trials": trials,
        "results": results,
        "wall_clock_s": time.monotonic() - t0,
    }
    return report


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.infile is None:
            job = {}
        elif args.infile == "-":
            job = loads(sys.stdin.read())
        else:
            with open(args.infile, "r", encoding="utf-8") as fh:
                job = loads(fh.read())
        if not isinstance(job, dict):
            raise ParseError("job file must hold a JSON object")
        tol = args.tol
        if tol is None:
            tol = float(job.get("tol", os.environ.get("PSDFACTOR_TOL", 1e-8)))
        seed = args.seed if args.seed is not None else int(job.get("seed", 0))
        trials = args.trials if args.trials is not None else int(job.get("trials", 100))
        report = run_job(args.command, job, tol, seed, trials, args.threads)
    except ParseError as exc:
        print(f"psdfactor: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except HypothesisError as exc:
        print(f"psdfactor: hypothesis failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except PsdFactorError as exc:
        print(f"psdfactor: error: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(report, sort_keys=True, separators=(",", ": "), indent=1)
    if args.outfile:
        with open(args.outfile, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
