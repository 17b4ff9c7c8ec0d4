"""Command-line front end.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 solver
non-convergence under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import fields, replace

import numpy as np

from . import analytic, channels as chn
from .cause import (
    SolverConfig,
    capacity_lower_bound,
    ce_max,
    ce_min,
    classical_ace,
    classical_ce_min,
    correctability_check,
    dp_min_search,
    duality_check,
)
from .specdoc import SpecError, load_channel, matrix_to_json
from .vqa import VqaConfig, run_vqa, run_vqa_best

log = logging.getLogger("cekit")

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_NOCONV = 0, 2, 3, 4

BENCH_PS_TOL = 2e-3
BENCH_VQA_BAND = {"partial_swap": 0.06, "superposed": 0.05}


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


# --- output -----------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = list(rows[0]) if rows else []
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return matrix_to_json(v) if v.ndim == 2 else [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def emit(args, rows: list[dict], extra: dict | None = None) -> None:
    if args.format == "json":
        doc = {"rows": rows}
        if extra:
            doc.update(extra)
        text = json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"
    else:
        text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- config -----------------------------------------------------------------------


def _coerce(val: str, current):
    if isinstance(current, bool):
        return val.lower() in ("1", "true", "yes")
    if isinstance(current, int):
        return int(val)
    if isinstance(current, float):
        return float(val)
    if current is None:
        return int(val) if val.lstrip("-").isdigit() else val
    return val


def _apply_overrides(obj, pairs: list[str], prefix: str):
    names = {f.name for f in fields(obj)}
    kw = {}
    for item in pairs:
        key, sep, val = item.partition("=")
        if not sep:
            raise CliError(EXIT_PARSE, f"--set expects key=value, got {item!r}")
        scope, dot, name = key.partition(".")
        if not dot:
            scope, name = prefix, key
        if scope != prefix:
            continue
        if name not in names:
            raise CliError(EXIT_PARSE, f"--set: unknown {prefix} option {name!r}")
        try:
            kw[name] = _coerce(val, getattr(obj, name))
        except ValueError as e:
            raise CliError(EXIT_PARSE, f"--set {key}: {e}") from None
    try:
        return replace(obj, **kw)
    except ValueError as e:
        raise CliError(EXIT_INVALID, str(e)) from None


def solver_config(args) -> SolverConfig:
    cfg = SolverConfig(seed=args.seed)
    if args.restarts is not None:
        cfg = cfg.with_(restarts=args.restarts)
    return _apply_overrides(cfg, args.set, "solver")


def vqa_config(args) -> VqaConfig:
    return _apply_overrides(VqaConfig(seed=args.seed), args.set, "vqa")


def load(args, want=None):
    if not args.spec:
        raise CliError(EXIT_PARSE, "--spec is required for this command")
    try:
        with open(args.spec, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(EXIT_PARSE, f"cannot read spec: {e}") from None
    try:
        ch = load_channel(text)
    except SpecError as e:
        raise CliError(EXIT_PARSE, f"spec error at {e}") from None
    except ValueError as e:
        raise CliError(EXIT_INVALID, f"invalid channel: {e}") from None
    if want == "classical":
        if not isinstance(ch, chn.StochasticChannel):
            raise CliError(EXIT_INVALID, "this command needs a 'classical' channel spec")
        return ch
    if isinstance(ch, chn.StochasticChannel):
        ch = chn.embed_classical(ch)
    return ch


def _strict(args, converged: bool, what: str):
    if args.strict and not converged:
        raise CliError(EXIT_NOCONV, f"{what} did not converge")


# --- commands ---------------------------------------------------------------------


def cmd_compute(args) -> None:
    ch = load(args)
    cfg = solver_config(args)
    t0 = time.perf_counter()
    mx = ce_max(ch, cfg)
    mn = ce_min(ch, cfg)
    dp = dp_min_search(ch, cfg, mn)
    wall = time.perf_counter() - t0
    log.info("compute finished in %.3f s", wall)
    _strict(args, mx.converged and mn.converged, "ce search")
    row = {
        "ce_max": mx.value,
        "ce_min": mn.value,
        "dp_min": dp.value,
        "dp_p": dp.p,
        "capacity_lower_bound": capacity_lower_bound(mx.value),
        "converged": mx.converged and mn.converged,
        "seed": cfg.seed,
        "restarts": cfg.restarts,
    }
    emit(args, [row], {
        "wall_clock": wall,
        "witness": {
            "ce_max": list(mx.witness_pair),
            "ce_min": list(mn.witness_pair),
            "dp_min": list(dp.witness_pair),
        },
        "certificate": {"ce_max": mx.certificate, "ce_min": mn.certificate},
    })


def _trace_path(out: str | None) -> str | None:
    if not out:
        return None
    stem = out.rsplit(".", 1)[0] if "." in out.rsplit("/", 1)[-1] else out
    return stem + ".trace.csv"


def cmd_vqa(args) -> None:
    ch = load(args)
    cfg = vqa_config(args)
    try:
        tr = run_vqa(ch, cfg)
    except ValueError as e:
        raise CliError(EXIT_INVALID, str(e)) from None
    _strict(args, tr.converged, "variational run")
    row = {"estimate": tr.estimate, "iterations": tr.iterations, "converged": tr.converged,
           "seed": cfg.seed, "layers_state": cfg.layers_state, "layers_meas": cfg.layers_meas,
           "optimizer": cfg.optimizer, "grad_mode": cfg.grad_mode}
    emit(args, [row], {"wall_clock": tr.wall_clock, "w1": tr.w1.angles, "w2": tr.w2.angles})
    trace_rows = [{"iteration": i, "objective": v} for i, v in enumerate(tr.objective)]
    path = _trace_path(args.out)
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(rows_to_csv(trace_rows))


def benchmark_cases():
    """(name, group, channel factory, formula value, true value, input dims)."""
    cases = []
    for p, tag in ((0.0, "p0"), (0.5, "p05"), (1.0, "p1")):
        par = analytic.PartialSwapParams(8, np.pi / 4, p)
        cases.append((f"partial_swap_{tag}", "partial_swap", par.channel,
                      analytic.partial_swap_ce_max(par).value))
    dep = chn.depolarizing(2, 0.0)
    s1 = chn.PathChannelSpec(dep, chn.uniform_gammas(4), chn.maximally_coherent(2))
    s2 = chn.PathChannelSpec(chn.tensor(dep, dep), chn.uniform_gammas(16), chn.maximally_coherent(2))
    for name, s in (("superposed_1q", s1), ("superposed_2q", s2)):
        cases.append((name, "superposed", (lambda s=s: chn.superposed_paths(s)),
                      analytic.superposition_ce_max_bound(s, 0.0)))
    return cases


def run_benchmark(only=None, seed=0, restarts=32, vqa=True, vqa_restarts=4) -> list[dict]:
    rows = []
    cfg = SolverConfig(seed=seed, restarts=restarts)
    vcfg = VqaConfig(seed=seed, optimizer="adam")
    for name, group, make, formula in benchmark_cases():
        if only and only not in (name, group):
            continue
        ch = make()
        exact = ce_max(ch, cfg).value
        est = run_vqa_best(ch, vcfg, vqa_restarts).estimate if vqa else float("nan")
        band = BENCH_VQA_BAND[group]
        rows.append({
            "case": name,
            "formula": formula,
            "exact_solver": exact,
            "vqa": est,
            "exact_vs_formula": abs(exact - formula) <= BENCH_PS_TOL,
            "vqa_in_band": bool(vqa and formula - band <= est <= formula + 1e-6),
        })
    return rows


def cmd_benchmark(args) -> None:
    rows = run_benchmark(args.only, args.seed, args.restarts or 32, not args.skip_vqa)
    if args.only and not rows:
        raise CliError(EXIT_PARSE, f"--only {args.only!r} matches no benchmark case")
    emit(args, rows)


def cmd_classical_ace(args) -> None:
    q = load(args, want="classical")
    ace = classical_ace(q)
    mn = classical_ce_min(q)
    emit(args, [{"ace": ace, "ce_min": mn.value, "capacity_lower_bound": capacity_lower_bound(ace)}],
         {"witness": {"ce_min": list(mn.pair)}})


def cmd_duality(args) -> None:
    ch = load(args)
    rec = duality_check(ch, solver_config(args))
    emit(args, [vars(rec)])


def cmd_recovery(args) -> None:
    ch = load(args)
    rec = correctability_check(ch, solver_config(args))
    emit(args, [vars(rec)])


COMMANDS = {
    "compute": cmd_compute,
    "vqa": cmd_vqa,
    "benchmark": cmd_benchmark,
    "classical-ace": cmd_classical_ace,
    "duality": cmd_duality,
    "recovery": cmd_recovery,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cekit", description="Causal effects of quantum and classical channels.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--spec", help="channel spec document (JSON, v1)")
    ap.add_argument("--out", help="output file (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int)
    ap.add_argument("--strict", action="store_true", help="exit 4 if a solver does not converge")
    ap.add_argument("--only", help="benchmark: run only this case or group")
    ap.add_argument("--skip-vqa", action="store_true", help="benchmark: skip the variational runs")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="config override, e.g. solver.max_iters=200 or vqa.optimizer=adam")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_PARSE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except CliError as e:
        print(f"cekit: error: {e}", file=sys.stderr)
        return e.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
