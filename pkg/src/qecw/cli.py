"""Command-line front end: ``qecw <subcommand> [flags]``.

Curves are written as CSV (header row, 17 significant digits), reports as
JSON with a ``provenance`` block. Exit status is 0 on success, 2 for invalid
flags and 3 when a numerical guard (leakage, completeness) trips.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__, bosonic, classical, gkp, qubit_codes, toric, wigner
from .core import ChannelError, DimensionError, KrausChannel, from_json, ops_from_json


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _table(args, header, rows) -> str:
    """CSV text, or with ``--format json`` the same table as columns plus rows."""
    rows = list(rows)
    if args.format == "json":
        data = [[float(v) if not isinstance(v, (int, np.integer)) else int(v) for v in row] for row in rows]
        return _json({"columns": list(header), "rows": data, "provenance": _provenance(args)})
    return _csv(header, rows)


def _provenance(args, seed=None) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "command")}
    for k, v in params.items():
        if isinstance(v, float) and not np.isfinite(v):
            params[k] = str(v)
    out = {"tool": "qecw", "version": __version__, "parameters": params}
    if seed is not None:
        out["seed"] = seed
    return out


def _json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _resolve_seed(value):
    if value is not None:
        return value
    env = os.environ.get("QECW_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"QECW_SEED must be an integer, got {env!r}") from exc


def _grid(lo, hi, points):
    if points < 2 or hi <= lo:
        raise UsageError("need points >= 2 and max > min")
    return np.linspace(lo, hi, points)


# ----------------------------------------------------------------- commands


def cmd_repetition(args):
    if args.m < 1:
        raise UsageError("--m must be >= 1")
    eps = _grid(args.eps_min, args.eps_max, args.points)
    if eps.min() < 0 or eps.max() > 1:
        raise UsageError("eps must lie in [0, 1]")
    logical = classical.repetition_logical_error(args.m, eps)
    return _table(args, ["eps", "eps_logical"], zip(eps, logical))


def cmd_ftmem(args):
    if not 0 <= args.rm <= 1:
        raise UsageError("--rm must lie in [0, 1]")
    kt = _grid(0.0, args.kt_max, args.points)
    corrected = classical.tmr_memory_curve(args.rm, kt)
    single = classical.single_bit_reliability(kt)
    return _table(args, ["kappa_t0", "R_corrected", "R_single_bit"], zip(kt, corrected, single))


def cmd_ftmem_opt(args):
    if not 0 < args.eps_m < 0.5:
        raise UsageError("--eps-m must lie in (0, 0.5)")
    eps = _grid(args.eps_m / 10, min(0.2, 20 * args.eps_m), args.points)
    eps = np.union1d(eps, [args.eps_m])
    ratio = classical.kappa_eff_ratio(eps, args.eps_m)
    t0, e_opt, r_opt, gain = classical.tmr_memory_optimize(args.eps_m)
    if args.format == "json":
        return _json({
            "eps_opt": e_opt, "kappa_eff_ratio": r_opt, "gain": gain, "kappa_t0_opt": t0,
            "provenance": _provenance(args),
        })
    return _csv(["eps", "kappa_eff_over_kappa"], zip(eps, ratio))


def _kl_setup(args):
    code_name = args.code
    channel = args.channel
    if args.state_file:
        with open(args.state_file) as fh:
            data = json.load(fh)
        states = data["states"] if isinstance(data, dict) else data
        code = qubit_codes.CodeSpace(tuple(from_json(s) for s in states), name="file")
    elif code_name == "repetition3":
        code = qubit_codes.repetition3_code()
    elif code_name == "leung4":
        code = qubit_codes.leung4_code()
    elif code_name == "kitten":
        code = bosonic.kitten_code(args.dim).code_space()
    elif code_name.startswith("binomial:"):
        try:
            n, s = (int(v) for v in code_name.split(":", 1)[1].split(","))
        except ValueError as exc:
            raise UsageError("binomial code syntax is binomial:N,S") from exc
        code = bosonic.binomial_code(n, s, args.dim if args.dim else None).code_space()
    else:
        raise UsageError(f"unknown code {code_name!r}")

    if args.ops_file:
        with open(args.ops_file) as fh:
            ops, labels = ops_from_json(fh.read())
        return code, KrausChannel(ops, labels, check=False)
    nq = {8: 3, 16: 4}.get(code.host_dim)
    if channel == "bitflip":
        if code.host_dim != 8:
            raise UsageError("bitflip error set is defined for the 3-qubit code")
        return code, qubit_codes.repetition_bitflip_errors
    if channel == "ampdamp":
        if code_name == "leung4":
            return code, qubit_codes.leung4_errors
        if nq is None:
            raise UsageError("ampdamp needs a qubit register code")
        return code, lambda p: qubit_codes.amplitude_damping_register(p, nq)
    if channel == "damping":
        ellmax = args.ellmax
        fs = bosonic.FockSpace(code.host_dim)
        return code, lambda kt: bosonic.damped_kraus(fs, bosonic.DampingParams(1.0, kt, ellmax))
    raise UsageError(f"unknown channel {channel!r}")


def cmd_kl_check(args):
    code, errs = _kl_setup(args)
    report = qubit_codes.kl_check(code, errs, order_param=args.param if callable(errs) else None)
    payload = report.to_dict()
    payload["code"] = code.name
    payload["provenance"] = _provenance(args)
    return _json(payload)


def cmd_kitten(args):
    if not 0 < args.kappa_t < 0.5:
        raise UsageError("--kappa-t must lie in (0, 0.5)")
    if args.cycles < 1:
        raise UsageError("--cycles must be >= 1")
    res = bosonic.break_even_compare(1.0, args.kappa_t, args.cycles, dim=args.dim, ellmax=args.ellmax)
    if args.format == "json":
        return _json({
            "corrected_rate": res.corrected_rate, "trivial_rate": res.trivial_rate,
            "gain": res.gain, "provenance": _provenance(args),
        })
    rows = zip(range(args.cycles + 1), res.corrected, res.trivial)
    return _csv(["cycle_index", "corrected_F", "trivial_F"], rows)


def cmd_gkp(args):
    gp = gkp.GkpParams(lam=args.lam, S_comb=args.comb, r=args.squeeze, fock_dim=args.dim)
    s0 = gkp.make_gkp_state(gp, 0)
    s1 = gkp.make_gkp_state(gp, 1)
    exp0 = gkp.stabilizer_expectations(s0)
    states = (s0, s1)
    overlap = [[gkp.overlap_probability(a, b) for b in states] for a in states]
    payload = {
        "S_x": [exp0["S_x"].real, exp0["S_x"].imag],
        "S_p": [exp0["S_p"].real, exp0["S_p"].imag],
        "mean_n": [gkp.mean_photon_number(s) for s in states],
        "overlap": overlap,
        "finite_energy_residual": gkp.finite_energy_stabilizer_check(gp, 0),
        "provenance": _provenance(args),
    }
    if args.wigner_out:
        grid = wigner.wigner_grid(s0, (-args.extent, args.extent), (-args.extent, args.extent),
                                  args.grid, args.grid, leakage_tol=1e-6)
        with open(args.wigner_out, "w", newline="") as fh:
            fh.write(grid.to_csv())
        payload["wigner_csv"] = args.wigner_out
    return _json(payload)


def cmd_toric(args):
    if args.L < 2 or args.trials < 1 or not 0 <= args.p <= 1:
        raise UsageError("need --L >= 2, --trials >= 1 and 0 <= --p <= 1")
    seed = _resolve_seed(args.seed)
    res = toric.toric_monte_carlo(args.L, args.p, args.trials, seed)
    args.seed = seed
    return _json({
        "logical_x_rate": res.logical_x_rate,
        "logical_z_rate": res.logical_z_rate,
        "trials": res.trials,
        "seed": seed,
        "provenance": _provenance(args, seed),
    })


def parse_state(spec: str, dim: int) -> np.ndarray:
    """State from a short spec: vacuum, fock:k, coherent:re[,im], cat:alpha, kitten:0|1, file:path."""
    fs = bosonic.FockSpace(dim)
    kind, _, arg = spec.partition(":")
    try:
        if kind == "vacuum":
            return fs.fock(0)
        if kind == "fock":
            k = int(arg)
            if not 0 <= k < dim:
                raise UsageError("Fock index outside the truncation")
            return fs.fock(k)
        if kind == "coherent":
            parts = [float(v) for v in arg.split(",")]
            return fs.coherent(complex(parts[0], parts[1] if len(parts) > 1 else 0.0))
        if kind == "cat":
            return wigner.cat_state(fs, float(arg))
        if kind == "kitten":
            return bosonic.kitten_code(dim).codewords[int(arg)]
        if kind == "file":
            with open(arg) as fh:
                return from_json(fh.read())
    except (ValueError, IndexError) as exc:
        raise UsageError(f"bad state spec {spec!r}: {exc}") from exc
    raise UsageError(f"unknown state kind {kind!r}")


def cmd_wigner(args):
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    state = parse_state(args.state, args.dim)
    ext = args.extent
    grid = wigner.wigner_grid(state, (-ext, ext), (-ext, ext), args.grid, args.grid)
    if args.format == "json":
        rows = [(x, p, grid.values[i, j]) for i, x in enumerate(grid.x_values)
                for j, p in enumerate(grid.p_values)]
        return _table(args, ["x", "p", "w"], rows)
    return grid.to_csv()


# ------------------------------------------------------------------- parser


def _inf_float(text: str) -> float:
    return float("inf") if text.lower() in ("inf", "infinity") else float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qecw", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qecw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, formats=("csv", "json")):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=list(formats), default=formats[0])
        return p

    p = add("repetition", cmd_repetition, "logical error of the (2m+1)-bit repetition code")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--eps-min", type=float, default=0.0)
    p.add_argument("--eps-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=101)

    p = add("ftmem", cmd_ftmem, "TMR memory reliability versus kappa*t0")
    p.add_argument("--rm", type=float, default=0.925)
    p.add_argument("--kt-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=201)

    p = add("ftmem-opt", cmd_ftmem_opt, "effective flip rate versus eps for a given voter error")
    p.add_argument("--eps-m", type=float, default=0.01)
    p.add_argument("--points", type=int, default=200)

    p = add("kl-check", cmd_kl_check, "Knill-Laflamme report as JSON", formats=("json",))
    p.add_argument("--code", default="repetition3",
                   help="repetition3, leung4, kitten or binomial:N,S")
    p.add_argument("--channel", default="bitflip", help="bitflip, ampdamp or damping")
    p.add_argument("--param", type=float, default=0.01)
    p.add_argument("--dim", type=int, default=16, help="Fock dimension for bosonic codes")
    p.add_argument("--ellmax", type=int, default=1, help="highest loss count for damping")
    p.add_argument("--state-file", help="JSON with two codewords")
    p.add_argument("--ops-file", help="JSON Kraus operators (fixed error set)")

    p = add("kitten", cmd_kitten, "kitten code versus 0/1 encoding under repeated cycles")
    p.add_argument("--kappa-t", type=float, default=0.01)
    p.add_argument("--cycles", type=int, default=50)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--ellmax", type=int, default=4)

    p = add("gkp", cmd_gkp, "finite-energy GKP state report", formats=("json",))
    defaults = gkp.GkpParams()
    p.add_argument("--lambda", dest="lam", type=float, default=defaults.lam)
    p.add_argument("--squeeze", type=_inf_float, default=defaults.r, help="seed squeezing r, or inf")
    p.add_argument("--comb", type=int, default=defaults.S_comb)
    p.add_argument("--dim", type=int, default=defaults.fock_dim)
    p.add_argument("--grid", type=int, default=61)
    p.add_argument("--extent", type=float, default=6.0)
    p.add_argument("--wigner-out", help="write the Wigner grid of |0_L> to this CSV")

    p = add("toric", cmd_toric, "toric code Monte Carlo with the greedy decoder", formats=("json",))
    p.add_argument("--L", type=int, default=4)
    p.add_argument("--p", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)

    p = add("wigner", cmd_wigner, "Wigner grid CSV for a state")
    p.add_argument("--state", default="vacuum")
    p.add_argument("--grid", type=int, default=61)
    p.add_argument("--extent", type=float, default=5.0)
    p.add_argument("--dim", type=int, default=40)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except UsageError as exc:
        print(f"qecw: error: {exc}", file=sys.stderr)
        return 2
    except (bosonic.LeakageError, ChannelError) as exc:
        print(f"qecw: numeric guard: {exc}", file=sys.stderr)
        return 3
    except (ValueError, DimensionError) as exc:
        print(f"qecw: error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
