"""``companion-gsp`` command line front end.

Graphs are JSON/CSV files or built-in specs ``cycle:N``, ``ladder:K``
(2K vertices) and ``random:N`` (seeded by ``--seed``).  Exit codes: 0 ok,
2 bad input, 3 numerical assumption violated, 4 internal invariant failed.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys

import numpy as np

from . import fftpoly, modulation, sampling
from . import io as gio
from .companion import companion_graph_dot, to_representation
from .errors import GSPError, InputError, InvariantError
from .generators import cycle_graph, ladder_graph, random_digraph
from .graph_model import CONV_TOL, EIG_TOL, GraphSignal, Rep, decompose, load_graph
from .selfcheck import run_selfcheck


def _positive(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError("tolerances must be positive")
    return val


def _graph(spec: str, seed: int):
    kind, _, arg = spec.partition(":")
    if kind in ("cycle", "ladder", "random") and arg.isdigit():
        n = int(arg)
        if kind == "cycle":
            return cycle_graph(n)
        if kind == "ladder":
            return ladder_graph(n)
        return random_digraph(n, np.random.default_rng(seed))
    return load_graph(spec)


def _model(args):
    return decompose(_graph(args.graph, args.seed), eig_tol=args.eig_tol, order=args.order)


def _signal(model, path: str, rep: Rep = Rep.VERTEX, pad: bool = False) -> GraphSignal:
    values = gio.read_signal(path)
    if pad and values.size < model.n:
        values = np.concatenate((values, np.zeros(model.n - values.size)))
    if values.size != model.n:
        raise InputError(f"{path}: signal length {values.size} does not match graph size {model.n}")
    return GraphSignal(values, rep, model)


def _emit_signal(args, values: np.ndarray, extra: dict | None = None):
    if args.format == "csv":
        gio.write_text(gio.signal_csv(values), args.output)
        if extra:
            sys.stderr.write(gio.dumps(extra))
        return
    payload = {"values": values}
    if extra:
        payload.update(extra)
    gio.write_text(gio.dumps(payload), args.output)


def cmd_analyze(args) -> int:
    d = _model(args)
    m = d.companion
    if args.format == "dot":
        gio.write_text(companion_graph_dot(m), args.output)
        return 0
    report = {
        "n": d.n,
        "eigenvalues": d.lam,
        "char_poly": d.char_poly.coeffs,
        "char_poly_imag_residual": d.char_poly.imag_residual,
        "companion_matrix": m.c_comp,
        "cond_vand": m.cond_vand,
        "min_eigen_gap": d.min_gap,
        "strongly_connected": d.graph.strongly_connected,
        "zero_eigenvalue": d.has_zero_eigenvalue,
        "eig_residual": d.diagnostics["eig_residual"],
    }
    if args.dot:
        report["dot"] = companion_graph_dot(m)
    if args.export:
        report["companion_model"] = gio.companion_to_dict(m)
    gio.write_text(gio.dumps(report), args.output)
    return 0


def cmd_transform(args) -> int:
    d = _model(args)
    sig = _signal(d, args.signal, Rep.parse(args.source))
    out = to_representation(sig, args.to, method=args.method)
    back = to_representation(out, sig.rep, method=args.method)
    scale = max(1.0, float(np.linalg.norm(sig.values)))
    diags = {
        "from": sig.rep.value,
        "to": out.rep.value,
        "round_trip_error": float(np.linalg.norm(back.values - sig.values)) / scale,
    }
    if "mse" in out.diagnostics:
        diags["mse"] = out.diagnostics["mse"]
        sys.stderr.write(f"mse {out.diagnostics['mse']:.3e}\n")
    _emit_signal(args, out.values, diags)
    return 0


def cmd_convolve(args) -> int:
    d = _model(args)
    s = _signal(d, args.s)
    t = _signal(d, args.t)
    methods = fftpoly.CONV_METHODS if args.method == "all" else (args.method,)
    outs = {meth: fftpoly.convolve(None, s, t, meth).values for meth in methods}
    extra: dict = {"method": args.method}
    if len(outs) > 1:
        disc = max(float(np.linalg.norm(u - v)) for u, v in itertools.combinations(outs.values(), 2))
        bound = args.conv_tol * d.companion.cond_vand * max(
            1.0, float(np.linalg.norm(s.values)), float(np.linalg.norm(t.values))
        )
        extra.update({"max_discrepancy": disc, "bound": bound})
        sys.stderr.write(f"max discrepancy {disc:.3e} (bound {bound:.3e})\n")
        _emit_signal(args, outs["fft"], extra)
        if disc > bound:
            raise InvariantError(f"convolution paths disagree: {disc:.3e} > {bound:.3e}")
        return 0
    _emit_signal(args, outs[args.method], extra)
    return 0


def _plan(args, d) -> modulation.MultiplexPlan:
    desc = gio.parse_json_arg(args.plan, "plan")
    if not isinstance(desc, dict):
        raise InputError('plan must be a JSON object {"B": int, "K": int}')
    return modulation.MultiplexPlan.from_dict(desc, d)


def cmd_modulate(args) -> int:
    d = _model(args)
    rep = Rep.parse(args.rep)
    if rep not in (Rep.VERTEX, Rep.SPECTRAL_IMPULSE):
        raise InputError("--rep must be s or q")
    sigs = []
    for path in args.signals:
        sig = _signal(d, path, rep, pad=rep is Rep.SPECTRAL_IMPULSE)
        sigs.append(to_representation(sig, Rep.VERTEX))
    if args.plan is None:
        if args.power is None or len(sigs) != 1:
            raise InputError("give --plan for multiplexing, or --power with a single signal")
        out = modulation.modulate(sigs[0], args.power)
        _emit_signal(args, out.values, {"q": to_representation(out, Rep.SPECTRAL_IMPULSE).values})
        return 0
    plan = _plan(args, d)
    mux = modulation.multiplex(plan, sigs, band_tol=args.band_tol)
    q_d = to_representation(mux, Rep.SPECTRAL_IMPULSE).values
    _emit_signal(
        args,
        mux.values,
        {"B": plan.band, "K": plan.count, "q": q_d, "spectrum": modulation.spectral_view(mux).values,
         "leakage": mux.diagnostics["leakage"]},
    )
    return 0


def cmd_demodulate(args) -> int:
    d = _model(args)
    plan = _plan(args, d)
    mux = _signal(d, args.signal)
    out = modulation.demultiplex(plan, mux, args.index, method=args.method)
    q = to_representation(out, Rep.SPECTRAL_IMPULSE).values
    _emit_signal(args, out.values, {"index": args.index, "q_block": q[: plan.band]})
    return 0


def cmd_sample(args) -> int:
    d = _model(args)
    plan = sampling.DecimationPlan(gio.read_delta(args.delta), d)
    dec = sampling.decimate(d, plan)
    report = {
        "kept": plan.kept,
        "eigenvalues": dec.lam_d,
        "conj_closed": plan.conj_closed,
        "A_d": dec.a_d,
        "M_d": dec.m_d,
        "C_d": dec.c_d,
        "cospectral_residual": sampling.cospectral_residual(dec),
        "diagnostics": dec.diagnostics,
    }
    if args.signal:
        sig = _signal(d, args.signal)
        rec = sampling.reconstruct(d, plan, sig, basis=args.basis)
        report["reconstruction"] = {"values": rec.values, **rec.diagnostics}
    gio.write_text(gio.dumps(report), args.output)
    return 0


def cmd_selfcheck(args) -> int:
    if args.n_max < 2:
        raise InputError("--n-max must be at least 2")
    report = run_selfcheck(args.n_max, seed=args.seed)
    gio.write_text(json.dumps(report, indent=2) + "\n", args.output)
    return 0 if report["passed"] else 4


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eig-tol", type=_positive, default=EIG_TOL, help="eigen residual tolerance")
    common.add_argument("--conv-tol", type=_positive, default=CONV_TOL, help="conversion/agreement tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for random:N graphs and selfcheck")
    common.add_argument("--order", choices=("phase", "imag"), default="phase", help="eigenvalue ordering")
    common.add_argument("--format", choices=("json", "csv", "dot"), default="json")
    common.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    parser = argparse.ArgumentParser(prog="companion-gsp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="eigenvalues, char poly, companion matrix")
    p.add_argument("graph")
    p.add_argument("--dot", action="store_true", help="include the companion graph as DOT")
    p.add_argument("--export", action="store_true", help="include all companion-model matrices")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("transform", parents=[common], help="convert a signal between representations")
    p.add_argument("graph")
    p.add_argument("signal")
    p.add_argument("--to", required=True, choices=[r.value for r in Rep])
    p.add_argument("--from", dest="source", default="s", choices=[r.value for r in Rep])
    p.add_argument("--method", choices=("barycentric", "solve"), default="barycentric")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("convolve", parents=[common], help="graph circular convolution")
    p.add_argument("graph")
    p.add_argument("s")
    p.add_argument("t")
    p.add_argument("--method", choices=(*fftpoly.CONV_METHODS, "all"), default="fft")
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("modulate", parents=[common], help="modulate or multiplex signals")
    p.add_argument("graph")
    p.add_argument("signals", nargs="+")
    p.add_argument("--plan", help='multiplex plan, e.g. \'{"B": 5, "K": 3}\'')
    p.add_argument("--power", type=int, help="carrier power for a single signal")
    p.add_argument("--rep", default="s", help="input representation: s, or q (blocks zero-padded)")
    p.add_argument("--band-tol", type=_positive, default=modulation.BAND_TOL)
    p.set_defaults(func=cmd_modulate)

    p = sub.add_parser("demodulate", parents=[common], help="extract one slot of a multiplexed signal")
    p.add_argument("graph")
    p.add_argument("signal")
    p.add_argument("--plan", required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--method", choices=("relocate", "carrier"), default="relocate")
    p.set_defaults(func=cmd_demodulate)

    p = sub.add_parser("sample", parents=[common], help="companion-model decimation")
    p.add_argument("graph")
    p.add_argument("delta", help="0/1 JSON array (inline or file)")
    p.add_argument("--signal", help="vertex signal to sample and reconstruct")
    p.add_argument("--basis", choices=sampling.BASES, default="spectral")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("selfcheck", parents=[common], help="run the built-in invariant suites")
    p.add_argument("--n-max", type=int, default=12)
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GSPError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return InputError.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
