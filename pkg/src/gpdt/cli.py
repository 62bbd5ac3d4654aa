"""Command line entry point: ``gpdt <command> ...``.

Exit codes: 0 success, 1 domain failure (invalid groupoid, non-generating
set, insufficient gap, failed check), 2 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import AlgebraElement, check_negative_type, check_positive_type, i_norm
from .coarse import block_kazhdan_projection, expander_gap_profile, laplacian_decomposition
from .config import DEFAULT, Tolerances
from .groupoid import ActionError, build_hls_truncation, orbits, quotient_group, validate
from .groups import ClosureCapExceeded
from .io import (SpecError, element_to_dict, load_groupoid, load_kernel, parse_chain,
                 parse_graph, read_json, to_jsonable)
from .kazhdan import (InsufficientGap, InvalidFamily, canonical_family, cayley_gap_profile,
                      exactness_witness, expectation_law_check, generator_family,
                      kazhdan_constant, kazhdan_projection, laplacian)
from .representations import (InvariantMeasure, MeasureError, NotGeneratingError,
                              constant_vectors, gns_rep, induced_measure, invariance_violation,
                              invariant_measures, regular_reps, star_homomorphism_defect,
                              trivial_rep)
from .spectral import ConvergenceError, eigvalsh, operator_norm


class DomainFailure(Exception):
    pass


DOMAIN_ERRORS = (DomainFailure, InvalidFamily, InsufficientGap, NotGeneratingError, MeasureError,
                 ClosureCapExceeded, ActionError, ConvergenceError)


def num(x) -> str:
    """Locale-independent 9-significant-digit formatting."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".9g")


class Output:
    def __init__(self, fmt: str, stream=None, provenance=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout
        self.provenance = provenance

    def line(self, text: str = ""):
        self.stream.write(text + "\n")

    def json(self, obj):
        if self.provenance is not None and isinstance(obj, dict):
            obj = {**obj, "provenance": self.provenance}
        self.stream.write(json.dumps(to_jsonable(obj), indent=2, sort_keys=False) + "\n")

    def csv(self, header, rows):
        w = csv.writer(self.stream, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([num(v) if isinstance(v, float) else v for v in r])


def _dump(args, name: str, obj):
    target = getattr(args, "dump_matrix", None)
    if not target:
        return
    payload = to_jsonable(obj)
    if target == "-":
        sys.stderr.write(json.dumps({name: payload}) + "\n")
        return
    p = Path(target)
    data = {}
    if p.exists():
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError:
            data = {}
    data[name] = payload
    p.write_text(json.dumps(data))


def _matrix_json(M):
    M = np.asarray(M)
    if np.iscomplexobj(M) and np.any(M.imag):
        return {"re": M.real.tolist(), "im": M.imag.tolist()}
    return np.real(M).tolist()


def _tolerances(args) -> Tolerances:
    t = DEFAULT
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = int(args.seed)
    if getattr(args, "cap", None) is not None:
        changes["cap"] = int(args.cap)
    if getattr(args, "tol_zero", None) is not None:
        changes["tau_zero"] = float(args.tol_zero)
    try:
        return t.with_(**changes)
    except ValueError as e:
        raise SpecError(str(e)) from None


def _resolve_generators(G, text):
    if text is None:
        return list(G.generators.values())
    names = text if isinstance(text, list) else [s for s in text.split(";" if ";" in text else " ") if s]
    if isinstance(text, str) and ";" not in text and " " not in text:
        names = _split_labels(text)
    out = []
    for nm in names:
        if nm in G.generators:
            out.append(G.generators[nm])
        else:
            try:
                out.append(G.index(nm))
            except KeyError:
                raise SpecError(f"unknown generator or arrow {nm!r}") from None
    return out


def _split_labels(text: str) -> list[str]:
    # split on commas outside parentheses, so "(0,1),(1,0)" gives two labels
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur:
        out.append(cur)
    return [s.strip() for s in out if s.strip()]


def _family(G, args):
    gens = _resolve_generators(G, getattr(args, "generators", None))
    if getattr(args, "symmetrize", False):
        return canonical_family(G, gens)
    return generator_family(G, gens)


# ---------------------------------------------------------------------------
# commands


def cmd_build(args, out: Output, tol: Tolerances) -> int:
    loaded = load_groupoid(args.spec, tol.cap)
    G = loaded.groupoid
    diags = validate(G, seed=tol.seed)
    orb = orbits(G) if not diags else None
    n_orb = len(orb) if orb is not None else None
    if out.fmt == "json":
        out.json({"arrows": G.n_arrows, "units": G.n_units, "orbits": n_orb, "valid": not diags,
                  "diagnostics": [{"axiom": d.axiom, "arrows": [str(a) for a in d.arrows],
                                   "message": d.message} for d in diags]})
    else:
        out.line(f"arrows={G.n_arrows} units={G.n_units} orbits={n_orb if n_orb is not None else '?'}")
        for d in diags:
            out.line(f"diagnostic: {d}")
    return 1 if diags else 0


def _basepoint(G, rep) -> str:
    u = getattr(rep, "unit", None)
    return G.label_of(u) if u is not None else "-"


def _reps(G, which: str, tol):
    reps = []
    for kind in which.split(","):
        kind = kind.strip()
        if kind == "regular":
            reps.extend(regular_reps(G))
        elif kind == "trivial":
            reps.extend(trivial_rep(G, m) for m in invariant_measures(G))
        else:
            raise SpecError(f"unknown representation kind {kind!r}")
    return reps


def cmd_gap(args, out: Output, tol: Tolerances) -> int:
    G = load_groupoid(args.spec, tol.cap).groupoid
    fam = _family(G, args)
    reps = _reps(G, args.reps, tol)
    cert = kazhdan_constant(G, fam, reps, checks=args.checks, tol=tol)
    if args.dump_matrix:
        delta = laplacian(G, fam).element
        mats = [r.realize(delta) for r in reps if r.dim <= tol.dense_limit]
        _dump(args, "laplacian_regular", [_matrix_json(M) for M in mats])
        _dump(args, "laplacian_eigenvalues", [eigvalsh(M) for M in mats])
    rows = [(r.kind, _basepoint(G, r), g.dim, g.kernel_dim, g.gap, g.method)
            for r, g in zip(reps, cert.per_rep)]
    if out.fmt == "json":
        out.json({"lambda1": cert.gap, "n": cert.n, "c": cert.constant, "family": fam.names,
                  "rep_family": cert.rep_family, "verified": cert.verified,
                  "worst_margin": cert.worst_margin, "checks": cert.checks,
                  "representations": [{"kind": k, "basepoint": u, "dim": d, "kernel_dim": kd,
                                       "gap": gp, "method": m} for k, u, d, kd, gp, m in rows]})
    elif out.fmt == "csv":
        out.csv(["kind", "basepoint", "dim", "kernel_dim", "gap", "method"],
                [(k, u, d, kd, float(gp), m) for k, u, d, kd, gp, m in rows])
    else:
        out.line(f"lambda1={num(cert.gap)} n={cert.n} c={num(cert.constant)}")
        for k, u, d, kd, gp, m in rows:
            out.line(f"  {k} {u}: dim={d} kernel={kd} gap={num(gp)} ({m})")
        out.line(f"certificate checks={cert.checks} worst_margin={num(cert.worst_margin)}")
    if cert.checks and not cert.verified:
        return 1
    return 0


def cmd_projection(args, out: Output, tol: Tolerances) -> int:
    loaded = load_groupoid(args.spec, tol.cap)
    G = loaded.groupoid
    fam = _family(G, args)
    p = kazhdan_projection(G, fam, tol)
    rep = expectation_law_check(G, p)
    body = element_to_dict(p)
    body["coeffs"] = [[lab, re if abs(re) > 1e-15 else 0.0, im if abs(im) > 1e-15 else 0.0]
                      for lab, re, im in body["coeffs"]]
    if out.fmt == "csv":
        out.csv(["arrow", "re", "im"], [(lab, float(re), float(im)) for lab, re, im in body["coeffs"]])
    else:
        out.json({"groupoid": loaded.spec, "family": fam.names, **body, "expectation": rep.to_dict()})
    return 0 if rep.passed else 1


def cmd_constants(args, out: Output, tol: Tolerances) -> int:
    G = load_groupoid(args.spec, tol.cap).groupoid
    fam = _family(G, args)
    reps = _reps(G, args.reps, tol)
    rows, ok = [], True
    for r in reps:
        C = constant_vectors(r, fam.members, tol.tau_zero)
        worst = 0.0
        for j in range(C.shape[1]):
            w = induced_measure(r, C[:, j])
            worst = max(worst, float(np.max(np.abs(w[G.unit_pos[G.rng]] - w[G.unit_pos[G.src]]))))
        ok &= worst <= 1e-9
        rows.append((r.kind, _basepoint(G, r), r.dim, C.shape[1], worst))
    meas = invariant_measures(G)
    if out.fmt == "json":
        out.json({"orbits": len(orbits(G)), "extreme_measures": [m.weights for m in meas],
                  "representations": [{"kind": k, "basepoint": u, "dim": d, "constant_dim": c,
                                       "measure_violation": w} for k, u, d, c, w in rows]})
    elif out.fmt == "csv":
        out.csv(["kind", "basepoint", "dim", "constant_dim", "measure_violation"], rows)
    else:
        out.line(f"orbits={len(orbits(G))} extreme_measures={len(meas)}")
        for k, u, d, c, w in rows:
            out.line(f"  {k} {u}: dim={d} constants={c} measure_violation={num(w)}")
    return 0 if ok else 1


def cmd_hls(args, out: Output, tol: Tolerances) -> int:
    kernels = parse_chain(args.chain, args.depth)
    depth = args.depth if args.depth is not None else len(kernels)
    if args.unnested:
        groups = [quotient_group(args.parent, m, tol.cap) for m in kernels[:depth]]
        rows = [(m, r.size, r.gap) for m, r in zip(kernels, cayley_gap_profile(groups, tol))]
    else:
        hls = build_hls_truncation(args.parent, kernels, depth, cap=tol.cap)
        rows = [(fb.n, r.size, r.gap) for fb, r in zip(hls.fibers, cayley_gap_profile(
            [fb.group for fb in hls.fibers], tol))]
    if out.fmt == "json":
        out.json([{"fiber": f, "size": s, "gap": g} for f, s, g in rows])
    else:
        out.csv(["fiber", "size", "gap"], [(f, s, float(g)) for f, s, g in rows])
    return 0


def _graphs_from(path):
    data = read_json(path)
    items = data.get("graphs", data) if isinstance(data, dict) else data
    if isinstance(items, dict):
        items = [items]
    return [parse_graph(g) for g in items]


def cmd_expander(args, out: Output, tol: Tolerances) -> int:
    graphs = _graphs_from(args.graphs)
    rows = expander_gap_profile(graphs, tol)
    extra = []
    if args.decompose:
        for g in graphs:
            d = laplacian_decomposition(g)
            extra.append({"size": g.n, "matchings": d.n_terms, "residual": d.residual})
    blocks = block_kazhdan_projection(graphs, tol) if args.projections else []
    if out.fmt == "json":
        out.json({"profile": [{"index": r.index, "size": r.size, "gap": r.gap, "runningmin": r.running_min}
                              for r in rows],
                  "decomposition": extra,
                  "projections": [{"index": b.index, "size": b.size, "norm": b.norm,
                                   "entry_sup": b.entry_sup, "closed_form_error": b.closed_form_error}
                                  for b in blocks]})
    else:
        out.csv(["index", "size", "gap", "runningmin"],
                [(r.index, r.size, float(r.gap), float(r.running_min)) for r in rows])
        for e in extra:
            out.line(f"# decomposition size={e['size']} matchings={e['matchings']} residual={e['residual']}")
        for b in blocks:
            out.line(f"# projection index={b.index} size={b.size} norm={num(b.norm)} entry_sup={num(b.entry_sup)}")
    return 0


def cmd_witness(args, out: Output, tol: Tolerances) -> int:
    loaded = load_groupoid(args.spec, tol.cap)
    if loaded.hls is None:
        raise SpecError("witness needs an hls spec")
    N = loaded.hls.depth
    if not 0 <= args.m <= N:
        raise DomainFailure(f"cutoff m={args.m} out of range 0..{N}")
    value = exactness_witness(loaded.hls, args.m)
    if out.fmt == "json":
        out.json({"m": args.m, "depth": N, "witness": value})
    else:
        out.line(repr(float(value)))
    return 0


def cmd_check_kernels(args, out: Output, tol: Tolerances) -> int:
    phi, kind = load_kernel(args.kernel, cap=tol.cap)
    res = check_positive_type(phi, tol.tau_psd) if kind == "positive" else check_negative_type(phi, tol.tau_psd)
    if out.fmt == "json":
        out.json({"kind": res.kind, "ok": res.ok, "condition": res.condition, "unit": res.unit,
                  "arrow": res.arrow, "eigenvalue": res.extreme})
    else:
        out.line(res.summary())
    return 0 if res.ok else 1


def cmd_gns(args, out: Output, tol: Tolerances) -> int:
    phi, kind = load_kernel(args.kernel, cap=tol.cap)
    G = phi.groupoid
    if kind == "negative":
        from .algebra import schoenberg_transform
        res = check_negative_type(phi, tol.tau_psd)
        if not res:
            raise DomainFailure(res.summary())
        phi = schoenberg_transform(phi, args.t)
    res = check_positive_type(phi, tol.tau_psd)
    if not res:
        raise DomainFailure(res.summary())
    meas = invariant_measures(G)
    mu = InvariantMeasure.uniform(G) if args.orbit is None else meas[args.orbit]
    rep = gns_rep(G, phi, mu, tol.tau_psd)
    rng = np.random.default_rng(tol.seed)
    defects = star_homomorphism_defect(rep, rng, trials=args.trials)
    worst = -math.inf
    for _ in range(args.trials):
        f = AlgebraElement.random(G, rng)
        worst = max(worst, operator_norm(rep.realize(f)) - i_norm(f))
    fam = generator_family(G)
    consts = constant_vectors(rep, fam.members, tol.tau_zero).shape[1] if rep.dim else 0
    _dump(args, "gram", _matrix_json(rep.gram))
    ok = max(defects.values()) <= 1e-12 and worst <= 1e-9
    report = {"dim": rep.dim, "arrows": G.n_arrows, "defects": defects,
              "inorm_excess": worst, "constant_dim": consts, "ok": ok}
    if out.fmt == "json":
        out.json(report)
    else:
        out.line(f"dim={rep.dim} arrows={G.n_arrows} constants={consts}")
        out.line("defects " + " ".join(f"{k}={num(v)}" for k, v in defects.items()))
        out.line(f"max(||realize(f)|| - ||f||_I)={num(worst)}")
    return 0 if ok else 1


COMMANDS = {
    "build": cmd_build, "gap": cmd_gap, "projection": cmd_projection, "constants": cmd_constants,
    "hls": cmd_hls, "expander": cmd_expander, "witness": cmd_witness,
    "check-kernels": cmd_check_kernels, "gns": cmd_gns,
}


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="JSON run config; explicit flags win")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=S, help="RNG seed (default 0x5EED)")
    p.add_argument("--cap", type=int, default=S, help="group closure cap (default 20000)")
    p.add_argument("--tol-zero", dest="tol_zero", type=float, default=S, help="kernel threshold")
    p.add_argument("--format", choices=["text", "json", "csv"], default=S)
    p.add_argument("--dump-matrix", dest="dump_matrix", default=S,
                   help="write realized matrices as dense JSON to this path ('-' for stderr)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="gpdt", parents=[common],
                                 description="Finite groupoid algebras, Laplacians and Kazhdan projections")
    ap.add_argument("--version", action="version", version=f"gpdt {__version__}")
    sub = ap.add_subparsers(dest="command")

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    p = add("build", "build and validate a groupoid spec")
    p.add_argument("spec")
    for name, help_ in [("gap", "Laplacian gap and Kazhdan constant"),
                        ("projection", "Kazhdan projection as an algebra element"),
                        ("constants", "constant vectors and invariant measures")]:
        p = add(name, help_)
        p.add_argument("spec")
        p.add_argument("--generators", default=None,
                       help="comma separated generator names or arrow labels")
        p.add_argument("--symmetrize", action="store_true",
                       help="use generators, inverses and the unit indicator")
        if name != "projection":
            p.add_argument("--reps", default="regular", help="regular, trivial or both (comma separated)")
        if name == "gap":
            p.add_argument("--checks", type=int, default=50, help="random certificate probes per rep")
    p = add("hls", "per-fibre Cayley gap table of an HLS truncation")
    p.add_argument("parent", choices=["Z", "SL2Z"])
    p.add_argument("chain", help="comma separated levels or powN")
    p.add_argument("depth", type=int, nargs="?", default=None)
    p.add_argument("--unnested", action="store_true", help="allow a chain that is not nested")
    p = add("expander", "gap profile of a graph sequence")
    p.add_argument("graphs")
    p.add_argument("--decompose", action="store_true")
    p.add_argument("--projections", action="store_true")
    p = add("witness", "inexactness witness of an HLS truncation")
    p.add_argument("spec")
    p.add_argument("m", type=int)
    p = add("check-kernels", "positive/negative type check of a kernel file")
    p.add_argument("kernel")
    p = add("gns", "GNS representation of a kernel file")
    p.add_argument("kernel")
    p.add_argument("--t", type=float, default=1.0, help="Schoenberg parameter for negative-type input")
    p.add_argument("--orbit", type=int, default=None, help="use the extreme measure of this orbit")
    p.add_argument("--trials", type=int, default=20)
    return ap


def _apply_config(argv: list[str]) -> list[str]:
    """Prepend command and options from ``--config`` where the command line leaves them out."""
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
    if path is None:
        raise SpecError("--config needs a path")
    cfg = read_json(path)
    if not isinstance(cfg, dict):
        raise SpecError("config must be a JSON object")
    extra = []
    flags = {"seed": "--seed", "cap": "--cap", "tol_zero": "--tol-zero", "format": "--format",
             "dump_matrix": "--dump-matrix", "generators": "--generators", "reps": "--reps",
             "checks": "--checks", "t": "--t", "orbit": "--orbit", "trials": "--trials"}
    bools = {"symmetrize": "--symmetrize", "unnested": "--unnested", "decompose": "--decompose",
             "projections": "--projections"}
    for key, flag in flags.items():
        if key in cfg and not any(a == flag or a.startswith(flag + "=") for a in argv):
            extra += [flag, str(cfg[key])]
    for key, flag in bools.items():
        if cfg.get(key) and flag not in argv:
            extra.append(flag)
    command_given = any(a in COMMANDS for a in argv)
    if not command_given:
        if "command" not in cfg:
            raise SpecError("no command given on the command line or in the config")
        return argv + [cfg["command"]] + [str(a) for a in cfg.get("args", [])] + extra
    return argv + extra


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out_err = sys.stderr
    try:
        argv = _apply_config(argv)
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return 0 if e.code == 0 else 2
        if not args.command:
            parser.print_help(out_err)
            return 2
        tol = _tolerances(args)
        fmt = getattr(args, "format", None) or "text"
        if not hasattr(args, "dump_matrix"):
            args.dump_matrix = None
        prov = {"tool": f"gpdt {__version__}", "command": args.command,
                "inputs": [str(getattr(args, k)) for k in ("spec", "kernel", "graphs", "parent", "chain")
                           if getattr(args, k, None) is not None],
                "seed": tol.seed, "cap": tol.cap, "tau_zero": tol.tau_zero, "tau_psd": tol.tau_psd}
        return COMMANDS[args.command](args, Output(fmt, provenance=prov), tol)
    except (OSError, SpecError, json.JSONDecodeError) as e:
        out_err.write(f"error: {e}\n")
        return 2
    except DOMAIN_ERRORS as e:
        out_err.write(f"failure: {e}\n")
        return 1
    except (KeyError, ValueError) as e:
        out_err.write(f"failure: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
