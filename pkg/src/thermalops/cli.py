"""Command-line interface.

Exit status: 0 success, 1 usage error, 2 invalid input (error JSON on stderr),
3 dimension budget exceeded. Every JSON output carries the invocation that
produced it and no timestamps, so identical calls give identical files.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import channels as ch
from . import experiments as ex
from . import hamiltonians as hm
from . import qubit as qb
from . import thermal as th
from .errors import DimensionCapExceeded, ThermalOpsError
from .io import atomic_write, complex_to_json, csv_text, dumps, matrix_from_json, matrix_to_json
from .svg import scatter_svg


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- argument parsing helpers ---------------------------------------------------

def floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from err


def ints(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from err


def levels_arg(text: str) -> list:
    """``level:mult,level:mult,...`` (``:mult`` optional)."""
    pairs = []
    for item in text.split(","):
        if not item.strip():
            continue
        e, _, k = item.partition(":")
        try:
            pairs.append((float(e), int(k) if k else 1))
        except ValueError as err:
            raise argparse.ArgumentTypeError(f"bad level spec {item!r}") from err
    energies = [e for e, k in pairs for _ in range(k)]
    if not energies:
        raise argparse.ArgumentTypeError("no levels given")
    return energies


def complex_arg(text: str) -> complex:
    v = floats(text)
    if len(v) == 1:
        return complex(v[0])
    if len(v) == 2:
        return complex(v[0], v[1])
    raise argparse.ArgumentTypeError(f"expected re or re,im, got {text!r}")


def element_arg(text: str) -> qb.SemigroupElement:
    v = floats(text)
    if len(v) not in (2, 3):
        raise argparse.ArgumentTypeError(f"expected lam,re[,im], got {text!r}")
    return qb.SemigroupElement(v[0], complex(v[1], v[2] if len(v) == 3 else 0.0))


def _hamiltonian(args, energies_attr="energies", levels_attr="levels", required=True):
    energies = getattr(args, energies_attr, None)
    levels = getattr(args, levels_attr, None)
    if energies is None and levels is None:
        if required:
            raise ThermalOpsError(f"need --{energies_attr.replace('_', '-')} or --{levels_attr.replace('_', '-')}")
        return None
    return hm.DiagonalHamiltonian.from_energies(energies if energies is not None else levels, args.tol)


def _beta(args, gap: float = 1.0) -> float:
    if getattr(args, "beta", None) is not None:
        return args.beta
    if getattr(args, "q", None) is not None:
        return qb.beta_from_q(args.q, gap)
    raise ThermalOpsError("need --beta or --q")


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _invocation(args) -> dict:
    skip = {"func"}
    return {
        "command": args.command_path,
        "args": {k: _plain(v) for k, v in sorted(vars(args).items())
                 if k not in skip and k != "command_path"},
    }


def _plain(v):
    if isinstance(v, complex):
        return complex_to_json(v)
    if isinstance(v, qb.SemigroupElement):
        return v.to_json()
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _emit(args, payload: dict, path=None) -> None:
    payload = dict(payload)
    payload["invocation"] = _invocation(args)
    text = dumps(payload)
    path = path or getattr(args, "out", None) or getattr(args, "json", None)
    if path:
        atomic_write(path, text)
    else:
        sys.stdout.write(text)


def _element_json(e: qb.SemigroupElement) -> dict:
    return {"lambda": e.lam, "c": complex_to_json(e.c), "r": e.r, "phi": e.phi}


# -- ham ------------------------------------------------------------------------

def cmd_ham_bohr(args):
    H = _hamiltonian(args)
    b = hm.bohr_spectrum(H, args.tol)
    _emit(args, {"distinct": list(b.abs_values), "signed": list(b.values),
                 "multiplicities": list(b.multiplicities), "degenerate": b.degenerate})


def cmd_ham_resonance(args):
    H_S = _hamiltonian(args)
    H_B = hm.DiagonalHamiltonian.from_energies(args.bath, args.tol)
    g = hm.resonance_graph(H_B, H_S, args.tol)
    _emit(args, {"vertices": list(g.vertices), "edges": [list(e) for e in g.edges],
                 "components": [[g.vertices[v] for v in c] for c in g.components],
                 "resonant": g.is_resonant})


def cmd_ham_gibbs(args):
    H = _hamiltonian(args)
    beta = _beta(args)
    _emit(args, {"beta": beta, "weights": hm.gibbs_weights(H, beta).tolist()})


def cmd_ham_rational(args):
    H = _hamiltonian(args)
    r = hm.rational_bohr_constant(H, args.tol)
    out = {"constant": r}
    if args.gap is not None:
        out["spin_form"] = hm.is_spin_form(H, args.gap, args.tol)
    _emit(args, out)


# -- channel ----------------------------------------------------------------------

def _channel(path) -> ch.QuantumChannel:
    return ch.QuantumChannel.from_json(_read_json(path))


def cmd_channel_validate(args):
    S = _channel(args.inputs[0])
    rep = ch.check_cptp(S, args.tol)
    out = {"cp": rep.cp, "tp": rep.tp, "passed": rep.passed, "hermiticity": rep.hermiticity,
           "min_eigenvalue": rep.min_eigenvalue, "tp_residual": rep.tp_residual}
    if args.energies is not None or args.levels is not None:
        H = _hamiltonian(args)
        fix, cov = ch.stationarity_covariance(S, H, _beta(args))
        out.update({"gibbs_fixed_point_residual": fix, "covariance_residual": cov})
    _emit(args, out)


def cmd_channel_apply(args):
    S = _channel(args.inputs[0])
    rho = matrix_from_json(_read_json(args.rho))
    _emit(args, {"output": matrix_to_json(ch.apply(S, rho))})


def cmd_channel_compose(args):
    chans = [_channel(p) for p in args.inputs]
    if len(chans) < 2:
        raise ThermalOpsError("compose needs at least two channels")
    S = chans[0]
    for T in chans[1:]:
        S = ch.compose(S, T)
    _emit(args, S.to_json())


def cmd_channel_distance(args):
    if len(args.inputs) != 2:
        raise ThermalOpsError("distance needs exactly two channels")
    a, b = (_channel(p) for p in args.inputs)
    _emit(args, {"choi_distance": ch.choi_distance(a, b), "metric": "choi-trace-distance"})


# -- thermal --------------------------------------------------------------------

def _spec(path) -> th.ThermalOpSpec:
    return th.ThermalOpSpec.from_json(_read_json(path))


def cmd_thermal_realize(args):
    S = th.realize(_spec(args.inputs[0]))
    _emit(args, S.to_json())


def cmd_thermal_compose(args):
    specs = [_spec(p) for p in args.inputs]
    if len(specs) != 2:
        raise ThermalOpsError("compose needs exactly two specs")
    _emit(args, th.compose_specs(*specs, tol=args.tol).to_json())


def cmd_thermal_mix(args):
    specs = [_spec(p) for p in args.inputs]
    if len(specs) != 2:
        raise ThermalOpsError("mix needs exactly two specs")
    _emit(args, th.convex_combine_specs(*specs, args.k, args.d, tol=args.tol).to_json())


def cmd_thermal_decompose(args):
    parts = th.decompose_nonresonant(_spec(args.inputs[0]), args.tol)
    _emit(args, {"parts": [{"weight": w, "spec": s.to_json()} for w, s in parts]})


def cmd_thermal_embed(args):
    obj = _read_json(args.inputs[0])
    H_S = hm.DiagonalHamiltonian.from_json(obj["H_S"])
    H_B = hm.DiagonalHamiltonian.from_json(obj["H_B"])
    emb = th.spin_embed(H_S, H_B, matrix_from_json(obj["H_tot"]), args.alpha,
                        float(obj["beta"]), gap=args.gap, tol=args.tol)
    out = emb.spec.to_json()
    out["missing_levels"] = list(emb.missing_levels)
    _emit(args, out)


def cmd_thermal_blocks(args):
    obj = _read_json(args.inputs[0])
    blocks = th.SpinBlockSpec(
        float(obj["gap"]), tuple(obj["alphas"]), matrix_from_json(obj["U0"]),
        tuple(matrix_from_json(b) for b in obj["blocks"]), matrix_from_json(obj["Um"]),
    )
    lam, c, spec = th.spin_block_choi(blocks, _beta(args, blocks.gap))
    _emit(args, {"lambda": lam, "c": complex_to_json(c), "spec": spec.to_json()})


# -- qubit ----------------------------------------------------------------------

def cmd_qubit_psi(args):
    _emit(args, _element_json(qb.psi(_channel(args.inputs[0]))))


def cmd_qubit_psi_inv(args):
    p = qb.QubitParams(args.lam, args.r, args.phi, args.q)
    _emit(args, qb.psi_inv(p, args.tol).to_json())


def cmd_qubit_circ(args):
    _emit(args, _element_json(qb.circ(args.e1, args.e2, args.q)))


def cmd_qubit_inverse(args):
    inv = qb.inverse_element(args.e, args.q)
    _emit(args, {"invertible": inv is not None, "inverse": _element_json(inv) if inv else None})


def cmd_qubit_membership(args):
    p = qb.QubitParams(args.lam, args.r, args.phi, args.q)
    _emit(args, {"class": qb.membership(p, args.tol).value, "bound": p.bound})


def cmd_qubit_extreme(args):
    if args.family == "finite":
        res = qb.extreme_approx_finite(args.lam, args.mu, args.m, args.q, dim_cap=args.dim_cap)
        out = {"psi": _element_json(res.psi), "limit": _element_json(res.limit),
               "alphas": list(res.alphas), "total_dim": res.spec.n * res.spec.m}
    else:
        if args.family == "infinite":
            spec, cf = qb.extreme_approx_infinite(args.lam, args.phi, args.m)
        else:
            spec, cf = qb.interior_family(args.lam, args.phi, args.m, args.q)
        out = {"psi": _element_json(qb.psi(th.realize(spec))), "closed_form": _element_json(cf),
               "total_dim": spec.n * spec.m}
    _emit(args, out)


def cmd_qubit_dephase(args):
    if args.phases is not None:
        spec, c, r_m = qb.dephasing_from_phases(args.phases, args.q)
        out = {"c": complex_to_json(c), "r_m": r_m, "realized": _element_json(qb.psi(th.realize(spec)))}
    elif args.gamma is not None:
        spec = qb.dephasing_spec(args.gamma, args.q)
        out = {"realized": _element_json(qb.psi(th.realize(spec))), "spec": spec.to_json()}
    else:
        raise ThermalOpsError("need --phases or --gamma")
    _emit(args, out)


def cmd_qubit_cone(args):
    cone = qb.thermal_cone(args.bloch, args.q, tuple(args.grid))
    text = csv_text(("x", "y", "z"), cone.points.tolist())
    if args.csv:
        atomic_write(args.csv, text)
    if args.svg:
        # thin the cloud so the picture stays a few hundred kilobytes
        step = max(1, cone.points.shape[0] // 5000)
        xz = cone.points[::step, [0, 2]]
        svg = scatter_svg(xz, polylines=[cone.boundary[:, [0, 2]]],
                          markers=[cone.gibbs[[0, 2]], np.asarray(cone.bloch)[[0, 2]]])
        atomic_write(args.svg, svg)
    summary = {"points": int(cone.points.shape[0]), "gibbs": cone.gibbs.tolist(),
               "boundary": cone.boundary.tolist(),
               "max_norm": float(np.max(np.linalg.norm(cone.points, axis=1)))}
    if args.csv or args.out:
        _emit(args, summary)
    else:
        sys.stdout.write(text)


# -- experiments ----------------------------------------------------------------

def _report(args, rep: ex.ExperimentReport):
    out = rep.to_json()
    if getattr(args, "csv", None) and rep.header:
        atomic_write(args.csv, csv_text(rep.header, rep.rows))
    _emit(args, out)


def cmd_exp_disc_qubit(args):
    rep = ex.discontinuity_qubit(args.q)
    rep.values.pop("image_of_e1e1")
    _report(args, rep)


def cmd_exp_disc_qutrit(args):
    _report(args, ex.discontinuity_qutrit(args.q))


def cmd_exp_cmap(args):
    _report(args, ex.cmap_probe(args.beta, args.beta_prime, args.energies,
                                max_multiplicity=args.max_multiplicity))


def cmd_exp_hausdorff(args):
    A = [_channel(p) for p in args.set_a]
    B = [_channel(p) for p in args.set_b]
    _emit(args, {"hausdorff_surrogate": ex.hausdorff_surrogate(A, B),
                 "metric": "choi-trace-distance (surrogate)"})


def cmd_exp_thermo_maj(args):
    _emit(args, {"reachable": ex.thermo_majorization_check(args.x, args.y, args.d)})


def cmd_exp_converge(args):
    params = {k: v for k, v in [("lam", args.lam), ("phi", args.phi), ("mu", args.mu),
                                ("q", args.q), ("seed", args.seed)] if v is not None}
    _report(args, ex.convergence_study(args.kind, params, args.schedule))


# -- parser ---------------------------------------------------------------------

def _common(p, out=True):
    p.add_argument("--tol", type=float, default=1e-9)
    if out:
        p.add_argument("--out", help="write JSON here instead of stdout")


def _ham_source(p, required=False):
    p.add_argument("--energies", type=floats, help="comma-separated energies")
    p.add_argument("--levels", type=levels_arg, help="level:mult,... pairs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thermops", description="Thermal operations toolkit")
    top = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def add(group_parsers, group, name, func, **kw):
        p = group_parsers.add_parser(name, **kw)
        p.set_defaults(func=func, command_path=f"{group} {name}")
        return p

    # ham
    g = top.add_parser("ham", help="Hamiltonian spectra").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = add(g, "ham", "bohr", cmd_ham_bohr)
    _ham_source(p)
    _common(p)
    p = add(g, "ham", "resonance", cmd_ham_resonance)
    _ham_source(p)
    p.add_argument("--bath", type=floats, required=True, help="bath energies")
    _common(p)
    p = add(g, "ham", "gibbs", cmd_ham_gibbs)
    _ham_source(p)
    p.add_argument("--beta", type=float)
    p.add_argument("--q", type=float)
    _common(p)
    p = add(g, "ham", "rational", cmd_ham_rational)
    _ham_source(p)
    p.add_argument("--gap", type=float)
    _common(p)

    # channel
    g = top.add_parser("channel", help="channels as Choi matrices").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = add(g, "channel", "validate", cmd_channel_validate)
    p.add_argument("--in", dest="inputs", nargs=1, required=True)
    _ham_source(p)
    p.add_argument("--beta", type=float)
    p.add_argument("--q", type=float)
    _common(p)
    p = add(g, "channel", "apply", cmd_channel_apply)
    p.add_argument("--in", dest="inputs", nargs=1, required=True)
    p.add_argument("--rho", required=True, help="matrix JSON file")
    _common(p)
    for name, func in [("compose", cmd_channel_compose), ("distance", cmd_channel_distance)]:
        p = add(g, "channel", name, func)
        p.add_argument("--in", dest="inputs", nargs="+", required=True)
        _common(p)

    # thermal
    g = top.add_parser("thermal", help="thermal operation specs").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    for name, func, n in [("realize", cmd_thermal_realize, 1), ("compose", cmd_thermal_compose, 2),
                          ("decompose", cmd_thermal_decompose, 1)]:
        p = add(g, "thermal", name, func)
        p.add_argument("--in", dest="inputs", nargs=n, required=True)
        _common(p)
    p = add(g, "thermal", "mix", cmd_thermal_mix)
    p.add_argument("--in", dest="inputs", nargs=2, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    _common(p)
    p = add(g, "thermal", "embed", cmd_thermal_embed)
    p.add_argument("--in", dest="inputs", nargs=1, required=True,
                   help="JSON with H_S, H_B, H_tot (generator) and beta")
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--gap", type=float)
    _common(p)
    p = add(g, "thermal", "blocks", cmd_thermal_blocks)
    p.add_argument("--in", dest="inputs", nargs=1, required=True)
    p.add_argument("--beta", type=float)
    p.add_argument("--q", type=float)
    _common(p)

    # qubit
    g = top.add_parser("qubit", help="qubit theory").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = add(g, "qubit", "psi", cmd_qubit_psi)
    p.add_argument("--in", dest="inputs", nargs=1, required=True)
    _common(p)
    for name, func in [("psi-inv", cmd_qubit_psi_inv), ("membership", cmd_qubit_membership)]:
        p = add(g, "qubit", name, func)
        p.add_argument("--lam", type=float, required=True)
        p.add_argument("--r", type=float, required=True)
        p.add_argument("--phi", type=float, default=0.0)
        p.add_argument("--q", type=float, required=True)
        _common(p)
    p = add(g, "qubit", "circ", cmd_qubit_circ)
    p.add_argument("--e1", type=element_arg, required=True, help="lam,re[,im]")
    p.add_argument("--e2", type=element_arg, required=True, help="lam,re[,im]")
    p.add_argument("--q", type=float, required=True)
    _common(p)
    p = add(g, "qubit", "inverse", cmd_qubit_inverse)
    p.add_argument("--e", type=element_arg, required=True, help="lam,re[,im]")
    p.add_argument("--q", type=float, required=True)
    _common(p)
    p = add(g, "qubit", "extreme", cmd_qubit_extreme)
    p.add_argument("--family", choices=("finite", "infinite", "interior"), default="finite")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--mu", default="2", help="rational such as 2 or 49/10")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--dim-cap", type=int, default=qb.DEFAULT_DIM_CAP)
    _common(p)
    p = add(g, "qubit", "dephase", cmd_qubit_dephase)
    p.add_argument("--phases", type=floats)
    p.add_argument("--gamma", type=complex_arg, help="re[,im]")
    p.add_argument("--q", type=float, default=1.0)
    _common(p)
    p = add(g, "qubit", "cone", cmd_qubit_cone)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--bloch", type=floats, required=True, help="x,y,z")
    p.add_argument("--grid", type=ints, default=[40, 40, 60], help="n_lambda,n_r,n_phi")
    p.add_argument("--csv")
    p.add_argument("--svg")
    _common(p)

    # experiments
    g = top.add_parser("exp", help="numerical experiments").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)

    def exp_out(p):
        p.add_argument("--json", help="write the report here")
        p.add_argument("--csv", help="write the table here")
        p.add_argument("--tol", type=float, default=1e-9)

    p = add(g, "exp", "discontinuity-qubit", cmd_exp_disc_qubit)
    p.add_argument("--q", type=float, required=True)
    exp_out(p)
    p = add(g, "exp", "discontinuity-qutrit", cmd_exp_disc_qutrit)
    p.add_argument("--q", type=float, required=True)
    exp_out(p)
    p = add(g, "exp", "cmap", cmd_exp_cmap)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--beta-prime", type=float, required=True)
    p.add_argument("--energies", type=floats, default=[2.0, 4.0, 8.0, 16.0, 32.0])
    p.add_argument("--max-multiplicity", type=float, default=1e15)
    exp_out(p)
    p = add(g, "exp", "hausdorff", cmd_exp_hausdorff)
    p.add_argument("--set-a", nargs="+", required=True)
    p.add_argument("--set-b", nargs="+", required=True)
    exp_out(p)
    p = add(g, "exp", "thermo-maj", cmd_exp_thermo_maj)
    p.add_argument("--x", type=floats, required=True)
    p.add_argument("--y", type=floats, required=True)
    p.add_argument("--d", type=floats, required=True)
    exp_out(p)
    p = add(g, "exp", "converge", cmd_exp_converge)
    p.add_argument("--kind", choices=("finiteT_extreme", "infT_extreme", "spin_embed"), required=True)
    p.add_argument("--schedule", type=ints, required=True)
    p.add_argument("--lam", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--mu")
    p.add_argument("--q", type=float)
    p.add_argument("--seed", type=int)
    exp_out(p)
    return parser


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        sys.stderr.write(f"{err}\n")
        return 1
    try:
        args.func(args)
    except DimensionCapExceeded as err:
        return _fail(3, "DimensionCapExceeded", str(err))
    except (ThermalOpsError, ValueError, KeyError, OSError, json.JSONDecodeError) as err:
        return _fail(2, type(err).__name__, str(err))
    return 0


if __name__ == "__main__":
    sys.exit(main())
