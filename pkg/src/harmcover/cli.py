"""Command-line frontend with stable JSON/CSV reports.

Exit codes: 0 success (a boundary-undecided verdict is still success),
2 usage or argument error, 3 violated precondition (the report names the
assumption), 4 grid/truncation resolution error.  All randomized sampling
is driven by --seed, so identical invocations produce byte-identical
reports.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bapu as bapu_mod
from . import bn_frames, covering, embedding, grid as grid_mod
from . import phi_transform, relations, wavelet_group, zoo
from .errors import ArgumentError, PreconditionError, ResolutionError
from .exponents import parse_exponent


@dataclass
class CommandResult:
    exit_code: int
    report: dict
    artifacts: list = field(default_factory=list)


def _parser():
    p = argparse.ArgumentParser(prog="harmcover", description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    cov = sub.add_parser("covering").add_subparsers(dest="action", required=True)
    build = cov.add_parser("build")
    build.add_argument("--family", required=True,
                       choices=["uniform", "dyadic", "alpha", "shearlet"])
    build.add_argument("--dim", type=int, default=1)
    build.add_argument("--alpha", type=float, default=0.5)
    build.add_argument("--c", type=float, default=0.5)
    build.add_argument("--delta", type=float, default=1.0)
    build.add_argument("--trunc", type=int, default=16)
    build.add_argument("--r", default="auto")
    build.add_argument("--out")
    check = cov.add_parser("check")
    check.add_argument("--covering", required=True)
    check.add_argument("--samples", type=int, default=4096)
    check.add_argument("--extent", type=float, default=None)
    check.add_argument("--margin", type=float, default=0.0)
    check.add_argument("--out")

    rel = sub.add_parser("relate")
    rel.add_argument("--fine", required=True)
    rel.add_argument("--coarse", required=True)
    rel.add_argument("--weight")
    rel.add_argument("--nmax", type=int, default=8)
    rel.add_argument("--out")

    emb = sub.add_parser("embed").add_subparsers(dest="action", required=True)
    alpha = emb.add_parser("alpha")
    for name in ["--alpha", "--beta", "--s1", "--s2"]:
        alpha.add_argument(name, type=float, required=True)
    for name in ["--p1", "--q1", "--p2", "--q2"]:
        alpha.add_argument(name, required=True)
    alpha.add_argument("--d", type=int, default=1)
    alpha.add_argument("--direction", choices=["forward", "reverse"],
                       default="forward")
    alpha.add_argument("--out")
    gen = emb.add_parser("general")
    gen.add_argument("--source", required=True, help="fine covering JSON")
    gen.add_argument("--target", required=True, help="coarse covering JSON")
    gen.add_argument("--wsource", required=True, help="fine weight JSON")
    gen.add_argument("--wtarget", required=True, help="coarse weight JSON")
    for name in ["--p1", "--q1", "--p2", "--q2"]:
        gen.add_argument(name, required=True)
    gen.add_argument("--direction", choices=["QIntoP", "PIntoQ"], default="QIntoP")
    gen.add_argument("--schedule", default="32,64,128,256,512")
    gen.add_argument("--trace-csv", dest="trace_csv")
    gen.add_argument("--out")
    shb = emb.add_parser("shearlet-besov")
    for name in ["--c", "--alpha", "--beta", "--gamma"]:
        shb.add_argument(name, type=float, required=True)
    for name in ["--p1", "--q1", "--p2", "--q2"]:
        shb.add_argument(name, required=True)
    shb.add_argument("--out")

    norm = sub.add_parser("norm")
    norm.add_argument("--covering", required=True)
    norm.add_argument("--weight", required=True)
    norm.add_argument("--p", required=True)
    norm.add_argument("--q", required=True)
    norm.add_argument("--signal", required=True)
    norm.add_argument("--grid", default="1024,32")
    norm.add_argument("--shrink", type=float, default=0.7)
    norm.add_argument("--out")

    phi = sub.add_parser("phitransform")
    phi.add_argument("action", choices=["analyze", "synthesize", "roundtrip", "norm"])
    phi.add_argument("--grid", default="4096,64")
    phi.add_argument("--dim", type=int, default=1)
    phi.add_argument("--numax", type=int, default=None)
    phi.add_argument("--kind", choices=["f", "b"], default="b")
    phi.add_argument("--s", type=float, default=0.0)
    phi.add_argument("--p", default="2")
    phi.add_argument("--q", default="2")
    phi.add_argument("--signal")
    phi.add_argument("--coeffs", help="coefficient JSON for synthesize")
    phi.add_argument("--out")

    fr = sub.add_parser("frame")
    fr.add_argument("action", choices=["check", "parseval", "reconstruct"])
    fr.add_argument("--covering", required=True)
    fr.add_argument("--grid", default="4096,64")
    fr.add_argument("--dim", type=int, default=1)
    fr.add_argument("--nmax", type=int, default=32)
    fr.add_argument("--signal")
    fr.add_argument("--out")

    wav = sub.add_parser("wavelet").add_subparsers(dest="action", required=True)
    tr = wav.add_parser("transform")
    tr.add_argument("--c", type=float, required=True)
    tr.add_argument("--delta", type=float, default=1.0)
    tr.add_argument("--jrange", default="-2,2")
    tr.add_argument("--krange", type=int, default=4)
    tr.add_argument("--signal", required=True)
    tr.add_argument("--grid", default="128,16")
    tr.add_argument("--mode", choices=["fourier", "direct"], default="fourier")
    tr.add_argument("--out")
    pr = wav.add_parser("probe")
    pr.add_argument("--c", type=float, required=True)
    pr.add_argument("--p", required=True)
    pr.add_argument("--q", required=True)
    pr.add_argument("--grid", default="128,16")
    pr.add_argument("--signals", type=int, default=10)
    pr.add_argument("--out")
    return p


def _load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _grid_from_arg(text, dim):
    n_str, l_str = text.split(",")
    return grid_mod.GridSpec(dim, float(l_str), int(n_str))


def _signal(path_or_spec, gspec):
    obj = _load_json(path_or_spec)
    return grid_mod.signal_from_spec(obj, gspec)


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def _cmd_covering_build(args):
    if args.family == "uniform":
        cov = zoo.make_uniform(args.dim, args.trunc)
    elif args.family == "dyadic":
        cov = zoo.make_dyadic(args.dim, args.trunc)
    elif args.family == "alpha":
        params = zoo.AlphaCoveringParams(args.alpha, args.dim,
                                         truncation_radius=args.trunc)
        if args.r == "auto":
            cov = zoo.make_alpha(params, r_mode="auto")
        else:
            params.r = float(args.r)
            cov = zoo.make_alpha(params, r_mode="fixed")
    else:
        jr = max(2, min(4, args.trunc))
        cov = zoo.make_shearlet_induced(args.c, args.delta, (-jr, jr), seed=args.seed)
    report = {"sets": len(cov), "constants": covering.covering_constants(cov).to_json()}
    return report, covering.covering_to_json(cov)


def _cmd_covering_check(args):
    cov = covering.covering_from_json(_load_json(args.covering))
    extent = args.extent
    if extent is None:
        los, his = cov.bounding_boxes()
        extent = 0.5 * float(np.max(np.abs([los.min(), his.max()])))
    pts = covering.annulus_samples(max(args.margin, extent * 1e-4), extent,
                                   args.samples, cov.dim, args.seed)
    pts = pts[cov.region.contains(pts)]
    rep = covering.verify_covering(cov, pts)
    out = covering.covering_constants(cov).to_json()
    out.update(rep.to_json())
    return out, None


def _cmd_relate(args):
    fine = covering.covering_from_json(_load_json(args.fine))
    coarse = covering.covering_from_json(_load_json(args.coarse))
    rel = relations.intersection_sets(fine, coarse)
    rel.subordination_order = relations.almost_subordinate(fine, coarse, args.nmax)
    if args.weight:
        w = zoo.make_weight(_load_json(args.weight), fine)
        mod = relations.moderate_constants(fine, w, coarse=coarse)
        rel.C_uQ = mod.C_uQ
        rel.rel_mod_constant = mod.rel_mod_constant
    return rel.to_json(), None


def _cmd_embed_alpha(args):
    verdict = embedding.decide_alpha_modulation(
        args.alpha, args.beta, parse_exponent(args.p1), parse_exponent(args.q1),
        args.s1, parse_exponent(args.p2), parse_exponent(args.q2), args.s2,
        args.d, args.direction)
    return verdict.to_json(), None


def _cmd_embed_general(args):
    fine = covering.covering_from_json(_load_json(args.source))
    coarse = covering.covering_from_json(_load_json(args.target))
    u = zoo.make_weight(_load_json(args.wsource), fine)
    v = zoo.make_weight(_load_json(args.wtarget), coarse)
    schedule = tuple(float(t) for t in args.schedule.split(","))
    query = embedding.EmbeddingQuery(
        fine, coarse, u, v, parse_exponent(args.p1), parse_exponent(args.q1),
        parse_exponent(args.p2), parse_exponent(args.q2), args.direction,
        truncation_schedule=schedule)
    verdict = embedding.decide_general(query)
    artifacts = []
    if args.trace_csv:
        _write_trace_csv(args.trace_csv, verdict)
        artifacts.append(args.trace_csv)
    return verdict.to_json(), None, artifacts


def _write_trace_csv(path, verdict):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["truncation", "C1_partial", "C2_partial"])
        trace = verdict.constants.get("sufficient") or {}
        for rad, c1, c2 in zip(trace.get("schedule", []),
                               trace.get("C1_partial", []),
                               trace.get("C2_partial", [])):
            writer.writerow([rad, c1, c2])


def _cmd_embed_shearlet(args):
    res = embedding.decide_shearlet_besov(
        args.c, args.alpha, args.beta, args.gamma,
        parse_exponent(args.p1), parse_exponent(args.q1),
        parse_exponent(args.p2), parse_exponent(args.q2))
    return {"sufficientVerdict": res["sufficientVerdict"].to_json(),
            "necessaryVerdict": res["necessaryVerdict"].to_json(),
            "characterizationComplete": res["characterizationComplete"]}, None


def _cmd_norm(args):
    cov = covering.covering_from_json(_load_json(args.covering))
    gspec = _grid_from_arg(args.grid, cov.dim)
    f = _signal(args.signal, gspec)
    w = zoo.make_weight(_load_json(args.weight), cov)
    fam = bapu_mod.build_bapu(cov, gspec, shrink=args.shrink)
    value = bapu_mod.decomposition_norm(f, cov, fam, parse_exponent(args.p),
                                        parse_exponent(args.q), w)
    return {"norm": value}, None


def _cmd_phitransform(args):
    gspec = _grid_from_arg(args.grid, args.dim)
    windows = phi_transform.WindowSystem(gspec, nu_max=args.numax)
    if args.action == "roundtrip":
        f = (_signal(args.signal, gspec) if args.signal else
             grid_mod.random_bandlimited(
                 gspec, 0.8 * phi_transform.signal_band_angular(windows.nu_max),
                 seed=0))
        return {"relativeError": phi_transform.roundtrip_error(f, windows),
                "nuMax": windows.nu_max}, None
    if args.action == "analyze":
        f = _signal(args.signal, gspec)
        coeffs = phi_transform.analyze(f, windows)
        records = [
            {"nu": cube.nu, "k": list(cube.k), "re": val.real, "im": val.imag}
            for cube, val in coeffs.iter_items() if abs(val) > 1e-12
        ]
        return {"nuMax": windows.nu_max, "coefficients": records}, None
    if args.action == "synthesize":
        coeffs = phi_transform.CubeCoefficients.zeros(gspec, windows.nu_max)
        for rec in _load_json(args.coeffs):
            cube = phi_transform.DyadicCube(rec["nu"], tuple(rec["k"]))
            off = coeffs.label_offset(cube.nu)
            idx = tuple(ki + off for ki in cube.k)
            coeffs.per_scale[cube.nu][idx] = rec["re"] + 1j * rec["im"]
        out = phi_transform.synthesize(coeffs, windows)
        return {"l2Norm": out.norm_l2()}, None
    f = _signal(args.signal, gspec)
    coeffs = phi_transform.analyze(f, windows)
    value = phi_transform.sequence_norm(coeffs, args.kind, args.s,
                                        parse_exponent(args.p),
                                        parse_exponent(args.q))
    return {"norm": value, "kind": args.kind}, None


def _cmd_frame(args):
    cov = covering.covering_from_json(_load_json(args.covering))
    gspec = _grid_from_arg(args.grid, cov.dim)
    frame = bn_frames.build_tight_frame(cov, gspec,
                                        bn_frames.FrameParams(n_max=args.nmax))
    if args.action == "check":
        sq = frame.partition.square_sum()
        region = cov.region.contains(gspec.freq_points()).reshape(gspec.shape)
        dev = float(np.max(np.abs(sq[region] - 1.0))) if region.any() else 0.0
        return {"partitionSquareDeviation": dev, "sets": len(cov)}, None
    f = (_signal(args.signal, gspec) if args.signal else
         grid_mod.gaussian_signal(gspec, width=1.0).to_frequency())
    rep = bn_frames.parseval_and_reconstruct(f, frame)
    return rep, None


def _cmd_wavelet_transform(args):
    j_lo, j_hi = (int(t) for t in args.jrange.split(","))
    gspec = _grid_from_arg(args.grid, 2)
    f = _signal(args.signal, gspec)
    labels, elements = wavelet_group.well_spread_family(
        args.c, args.delta, (j_lo, j_hi), args.krange, validate=False)
    psi = wavelet_group.ball_window((2.0, 0.0), 1.2)
    field = wavelet_group.wavelet_transform(f, psi, elements, mode="fourier")
    peaks = {",".join(map(str, lab)): float(np.abs(w).max())
             for lab, (_, w) in field.slices.items()}
    return {"slices": len(field.slices), "peakMagnitudes": peaks}, None


def _cmd_wavelet_probe(args):
    gspec = _grid_from_arg(args.grid, 2)
    rng = np.random.default_rng(args.seed)
    signals = []
    for _ in range(args.signals):
        center = (float(rng.uniform(1.0, 3.0)) * float(rng.choice([-1.0, 1.0])),
                  float(rng.uniform(-1.0, 1.0)))
        signals.append(grid_mod.bump_in_ball(gspec, center, 0.6))
    rep = wavelet_group.coorbit_decomposition_probe(
        signals, args.c, parse_exponent(args.p), parse_exponent(args.q),
        grid=gspec)
    return rep, None


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def run_command(argv):
    """Parse and execute one CLI invocation; never raises for expected errors."""
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return CommandResult(2 if exc.code else 0, {"error": "usage"})
    np.random.seed(args.seed % (2 ** 32))
    artifacts = []
    try:
        if args.command == "covering" and args.action == "build":
            report, payload = _cmd_covering_build(args)
            if args.out and payload is not None:
                with open(args.out, "w", encoding="utf-8") as fh:
                    json.dump(payload, fh, sort_keys=True)
                artifacts.append(args.out)
                report["artifact"] = args.out
            return _finish(args, report, artifacts, dump_report=not args.out)
        handler = {
            ("covering", "check"): _cmd_covering_check,
            ("relate", None): _cmd_relate,
            ("embed", "alpha"): _cmd_embed_alpha,
            ("embed", "general"): _cmd_embed_general,
            ("embed", "shearlet-besov"): _cmd_embed_shearlet,
            ("norm", None): _cmd_norm,
            ("phitransform", None): _cmd_phitransform,
            ("frame", None): _cmd_frame,
            ("wavelet", "transform"): _cmd_wavelet_transform,
            ("wavelet", "probe"): _cmd_wavelet_probe,
        }[(args.command, getattr(args, "action", None)
           if args.command in ("covering", "embed", "wavelet") else None)]
        out = handler(args)
        report = out[0]
        if len(out) > 2:
            artifacts.extend(out[2])
        return _finish(args, report, artifacts)
    except ArgumentError as exc:
        return CommandResult(2, {"error": "argument", "detail": str(exc)})
    except PreconditionError as exc:
        return CommandResult(3, {"error": "precondition", "detail": str(exc)})
    except ResolutionError as exc:
        return CommandResult(4, {"error": "resolution", "detail": str(exc)})


def _finish(args, report, artifacts, dump_report=True):
    text = json.dumps(report, sort_keys=True, indent=2, default=_json_default)
    out = getattr(args, "out", None)
    if out and dump_report:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        artifacts.append(out)
    else:
        sys.stdout.write(text + "\n")
    return CommandResult(0, json.loads(text), artifacts)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def main():
    result = run_command(sys.argv[1:])
    if result.exit_code != 0:
        sys.stderr.write(json.dumps(result.report) + "\n")
    raise SystemExit(result.exit_code)


if __name__ == "__main__":
    main()
