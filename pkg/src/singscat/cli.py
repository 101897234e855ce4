"""Command-line front end.

Subcommands
-----------
solve        extract the transfer matrix, amplitudes and S-matrix map for
             one JSON config; write a run report (JSON or flat CSV).
sweep        tabulate the reduced S-matrix along an axis (omega phase at
             fixed modulus, or k, or theta) as CSV.
reconstruct  compare Cauchy reconstruction from boundary samples against
             direct evaluation, as CSV.
verify       run the full invariant suite; exit 0 only if every check
             passes at the config tolerance.

Exit status: 0 success, 1 invariant/numerical failure, 2 usage or
configuration error.

Reports are deterministic: identical configs produce bit-identical
output except for the explicitly excluded ``timing`` block.  Numbers are
serialized with 17 significant digits; complex values as [re, im] pairs.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
import time

import numpy as np

from . import connect, disk
from .errors import (
    BadGrid,
    NonSingular,
    OutsideDisk,
    SingscatError,
    SubcriticalCoupling,
)
from .model import ProblemConfig, ValidatedConfig, normal_invariant, validate

_USAGE_ERRORS = (BadGrid, NonSingular, SubcriticalCoupling)
_RNG_SEED = 20240801


# ----------------------------------------------------------- serialization

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _jsonify(obj) -> str:
    """Deterministic JSON rendering with fixed float formatting."""
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return '"nan"'
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return _fmt(obj)
    if isinstance(obj, complex):
        return _jsonify(_pair(obj))
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(k)}:{_jsonify(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_jsonify(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)}")


def _pair(z: complex | None):
    if z is None:
        return None
    if math.isinf(abs(z)):
        return "infinity"
    return [z.real, z.imag]


def _flatten(prefix: str, obj, rows: list[tuple[str, str]]) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    elif isinstance(obj, float):
        rows.append((prefix, _fmt(obj)))
    elif obj is None:
        rows.append((prefix, ""))
    else:
        rows.append((prefix, str(obj)))


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_omega(s: str) -> complex:
    s = s.strip()
    if s.lower() in ("inf", "infinity"):
        return connect.OMEGA_INFINITY
    re, im = s.split(",")
    return complex(float(re), float(im))


def _wrap_angle(x: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    y = math.fmod(x, 2.0 * math.pi)
    if y <= -math.pi:
        y += 2.0 * math.pi
    elif y > math.pi:
        y -= 2.0 * math.pi
    return y


# ------------------------------------------------------------------ checks

def _check(name: str, measured: float, tolerance: float, skipped: bool = False) -> dict:
    status = "skipped" if skipped else ("pass" if measured <= tolerance else "fail")
    return {
        "name": name,
        "measured": measured,
        "tolerance": tolerance,
        "status": status,
    }


def _core_checks(
    config: ValidatedConfig,
    m: connect.TransferMatrix,
    coeffs: connect.ScatteringCoefficients,
    smap: connect.SMatrixMap,
) -> list[dict]:
    tol = config.tol
    res = m.residuals
    degenerate = smap.degenerate
    checks: list[dict] = []

    checks.append(_check("su11", res.su11_defect, 100.0 * tol, skipped=degenerate))
    checks.append(_check("su11_normalized", m.su11_defect_normalized, 100.0 * tol))
    checks.append(_check("structure", res.structure_defect, 100.0 * tol, skipped=degenerate))
    checks.append(_check("wronskian_drift", res.wronskian_drift, 10.0 * tol))
    stab = max(
        res.stabilization_diff if not math.isnan(res.stabilization_diff) else 0.0,
        res.basis_trunc,
    )
    checks.append(_check("stabilization", stab, tol))

    u_right = abs(abs(coeffs.R) ** 2 + abs(coeffs.T) ** 2 - 1.0)
    u_left = abs(abs(coeffs.Rp) ** 2 + abs(coeffs.Tp) ** 2 - 1.0)
    stokes = abs(coeffs.R.conjugate() * coeffs.Tp + coeffs.T.conjugate() * coeffs.Rp)
    tsym = abs(coeffs.T - coeffs.Tp)
    checks.append(_check("unitarity_right", u_right, 100.0 * tol))
    checks.append(_check("unitarity_left", u_left, 100.0 * tol))
    checks.append(_check("stokes_reciprocity", stokes, 100.0 * tol))
    checks.append(_check("transmission_symmetry", tsym, 100.0 * tol))

    circle = max(
        abs(abs(connect.s_matrix(m, cmath.exp(2j * math.pi * j / 64))) - 1.0)
        for j in range(64)
    )
    checks.append(_check("circle_mapping", circle, 100.0 * tol))

    sign_violation = 0.0
    for mod in (0.5, 2.0):
        for j in range(8):
            om = mod * cmath.exp(2j * math.pi * (j + 0.37) / 8)
            lhs = abs(connect.s_matrix(m, om)) ** 2 - 1.0
            rhs = abs(om) ** 2 - 1.0
            if abs(lhs) > tol and math.copysign(1.0, lhs) != math.copysign(1.0, rhs):
                sign_violation = max(sign_violation, abs(lhs))
    checks.append(_check("sign_correspondence", sign_violation, tol))

    delta = smap.delta
    checks.append(_check("phase_modulus", abs(abs(delta) - 1.0), 10.0 * tol))
    checks.append(
        _check("phase_transmission", abs(delta + coeffs.T / coeffs.T.conjugate()), 100.0 * tol)
    )
    checks.append(
        _check("phase_reflection", abs(delta - coeffs.Rp / coeffs.R.conjugate()), 100.0 * tol)
    )

    rng = np.random.default_rng(_RNG_SEED)
    mob = 0.0
    auto = 0.0
    for _ in range(100):
        om = complex(rng.uniform(-0.95, 0.95), rng.uniform(-0.95, 0.95))
        via_ab = connect.s_matrix(m, om)
        if not degenerate:
            via_blaschke = delta * (om - smap.zero) / (coeffs.R * om - 1.0)
            mob = max(mob, abs(via_ab - via_blaschke))
        if abs(om) < 0.95:
            back = connect.s_matrix_inverse(m, via_ab)
            auto = max(auto, abs(back - om))
    checks.append(_check("mobius_exactness", mob, 100.0 * tol, skipped=degenerate))
    checks.append(_check("disk_automorphism", auto, 100.0 * tol))

    if degenerate:
        spread = 0.0
        vals = []
        for j in range(16):
            om = 0.6 * (j + 1) / 16 * cmath.exp(2j * math.pi * j / 16)
            vals.append(connect.s_matrix(m, om))
        spread = max(abs(v - vals[0]) for v in vals)
        checks.append(_check("degenerate_spread", spread, max(1e-6, 100.0 * tol)))

    return checks


def _verify_checks(
    config: ValidatedConfig,
    m: connect.TransferMatrix,
    coeffs: connect.ScatteringCoefficients,
    smap: connect.SMatrixMap,
    nodes: int,
) -> list[dict]:
    tol = config.tol
    checks: list[dict] = []

    samples = disk.UnitaryFamilySample.uniform_grid(
        nodes, lambda om: connect.s_matrix(m, om)
    )
    worst = 0.0
    for om in (0.0 + 0j, 0.3 + 0j, 0.5 + 0.2j, 0.9 + 0j):
        rec = disk.cauchy_reconstruct(samples, om)
        worst = max(worst, abs(rec - connect.s_matrix(m, om)))
    checks.append(_check("cauchy_consistency", worst, 100.0 * tol))
    avg = disk.absorption_average(samples)
    checks.append(_check("uniform_average", abs(avg - coeffs.Rp), 10.0 * tol))

    if config.is_conformal and not smap.degenerate:
        m2 = connect.transfer_matrix(config.with_mu(2.0 * config.mu))
        c2 = connect.scattering_coefficients(m2)
        shift = _wrap_angle(
            cmath.phase(c2.R / coeffs.R) - 2.0 * config.theta * math.log(2.0)
        )
        mods = max(
            abs(abs(c2.R) - abs(coeffs.R)), abs(abs(c2.T) - abs(coeffs.T))
        )
        checks.append(_check("mu_covariance_phase", abs(shift), 100.0 * tol))
        checks.append(_check("mu_covariance_moduli", mods, 10.0 * tol))

    from . import bases as _b
    from .currents import current as _current
    from .integrate import StateVector as _SV

    far = _b.eval_asymptotic(config, m.residuals.r_max_used, raise_on_error=False)
    j1 = _current(_SV(far.first.r, far.first.u, far.first.du))
    j2 = _current(_SV(far.second.r, far.second.u, far.second.du))
    cur_tol = max(100.0 * tol, 10.0 * far.trunc_error)
    checks.append(_check("current_outgoing", abs(j1.real - 2.0), cur_tol))
    checks.append(_check("current_ingoing", abs(j2.real + 2.0), cur_tol))

    near = _b.eval_singularity(config, m.residuals.r_min_used, raise_on_error=False)
    jp = _current(_SV(near.first.r, near.first.u, near.first.du))
    near_tol = max(100.0 * tol, 10.0 * near.trunc_error)
    checks.append(_check("current_origin", abs(jp.real - 2.0), near_tol))

    base = config.base
    r1 = 1e-3 * m.residuals.r_min_used
    j_origin = abs(normal_invariant(config, r1) * r1 ** base.p / base.lam - 1.0)
    cf = abs(base.l_plus_nu ** 2 - 0.25) if not config.is_conformal else 0.0
    w1 = abs(base.extra_potential.value(r1)) if base.extra_potential else 0.0
    bound1 = 2.0 * (base.k ** 2 * r1 ** base.p + cf * r1 ** (base.p - 2.0) + w1 * r1 ** base.p) / base.lam + tol
    checks.append(_check("invariant_origin_limit", j_origin, bound1))

    r2 = max(1e6, 100.0 * m.residuals.r_max_used)
    j_far = abs(normal_invariant(config, r2) - base.k ** 2) / base.k ** 2
    w2 = abs(base.extra_potential.value(r2)) if base.extra_potential else 0.0
    bound2 = 2.0 * (base.lam * r2 ** (-base.p) + cf / r2 ** 2 + w2) / base.k ** 2 + tol
    checks.append(_check("invariant_far_limit", j_far, bound2))

    return checks


# ------------------------------------------------------------------- solve

def _solve_report(config: ValidatedConfig, *, stabilize: bool) -> tuple[dict, tuple]:
    t0 = time.perf_counter()
    m = connect.transfer_matrix(config, stabilize=stabilize)
    coeffs = connect.scattering_coefficients(m, tol=config.tol)
    smap = connect.blaschke_params(m, tol=config.tol)
    checks = _core_checks(config, m, coeffs, smap)
    elapsed = time.perf_counter() - t0

    res = m.residuals
    derived = {"theta": config.theta, "n_exponent": config.n_exponent}
    report = {
        "config": config.base.to_dict(),
        "derived": derived,
        "transfer_matrix": {
            "a": _pair(m.a),
            "b": _pair(m.b),
            "residuals": {
                "su11_defect": res.su11_defect,
                "structure_defect": res.structure_defect,
                "stabilization_diff": res.stabilization_diff,
                "wronskian_drift": res.wronskian_drift,
                "basis_trunc": res.basis_trunc,
                "r_min_used": res.r_min_used,
                "r_max_used": res.r_max_used,
                "richardson_rate": res.richardson_rate,
            },
        },
        "coefficients": {
            "R": _pair(coeffs.R),
            "T": _pair(coeffs.T),
            "Rp": _pair(coeffs.Rp),
            "Tp": _pair(coeffs.Tp),
            "abs_R": abs(coeffs.R),
            "abs_T_squared": abs(coeffs.T) ** 2,
        },
        "s_matrix_map": {
            "delta": _pair(smap.delta),
            "zero": _pair(smap.zero),
            "pole": _pair(smap.pole),
            "degenerate": smap.degenerate,
            "constant": _pair(smap.constant),
        },
        "checks": checks,
        "timing": {"seconds": elapsed},
    }
    return report, (m, coeffs, smap)


def cmd_solve(args) -> int:
    config = validate(ProblemConfig.from_json(args.config))
    report, _ = _solve_report(config, stabilize=not args.no_stabilize)
    if args.format == "json":
        _write_text(args.output, _jsonify(report) + "\n")
    else:
        rows: list[tuple[str, str]] = []
        _flatten("", report, rows)
        text = "key,value\n" + "".join(f"{k},{v}\n" for k, v in rows)
        _write_text(args.output, text)
    failing = [c["name"] for c in report["checks"] if c["status"] == "fail"]
    if failing:
        print(f"failing checks: {', '.join(failing)}", file=sys.stderr)
        return 1
    return 0


# ------------------------------------------------------------------- sweep

def _sweep_rows(config: ValidatedConfig, args) -> list[tuple]:
    start, stop, count = args.grid
    rows = []
    if args.axis == "omega":
        m = connect.transfer_matrix(config)
        for j in range(count):
            phase = start + (stop - start) * j / count
            om = args.modulus * cmath.exp(1j * phase)
            s = connect.s_matrix(m, om)
            rows.append((phase, om, s, config.tol))
    else:
        omega0 = args.omega[0] if args.omega else 0j
        values = np.linspace(start, stop, count)
        for v in values:
            if args.axis == "k":
                sub = validate(ProblemConfig.from_dict({**config.base.to_dict(), "k": float(v)}))
            else:
                if not config.is_conformal:
                    raise BadGrid("theta sweep requires a p=2 configuration")
                d = config.base.to_dict()
                d["lambda"] = float(v) ** 2 + 0.25
                sub = validate(ProblemConfig.from_dict(d))
            m = connect.transfer_matrix(sub)
            s = connect.s_matrix(m, omega0)
            rows.append((float(v), omega0, s, sub.tol))
    return rows


def cmd_sweep(args) -> int:
    config = validate(ProblemConfig.from_json(args.config))
    rows = _sweep_rows(config, args)
    lines = ["axis_value,re_s,im_s,abs_s,sign_ok"]
    for v, om, s, tol in rows:
        lhs = abs(s) ** 2 - 1.0
        rhs = (abs(om) ** 2 - 1.0) if not math.isinf(abs(om)) else 1.0
        if abs(lhs) <= tol or abs(rhs) <= tol:
            ok = abs(lhs) <= tol and abs(rhs) <= tol
        else:
            ok = math.copysign(1.0, lhs) == math.copysign(1.0, rhs)
        lines.append(f"{_fmt(v)},{_fmt(s.real)},{_fmt(s.imag)},{_fmt(abs(s))},{int(ok)}")
    _write_text(args.output, "\n".join(lines) + "\n")
    return 0


# ------------------------------------------------------------- reconstruct

def cmd_reconstruct(args) -> int:
    if args.nodes < 8:
        raise BadGrid(f"nodes must be >= 8, got {args.nodes}")
    config = validate(ProblemConfig.from_json(args.config))
    m = connect.transfer_matrix(config)
    samples = disk.UnitaryFamilySample.uniform_grid(
        args.nodes, lambda om: connect.s_matrix(m, om)
    )
    omegas = [0j] + [om for om in (args.omega or []) if om != 0]
    lines = ["re_omega,im_omega,re_rec,im_rec,re_direct,im_direct,abs_diff,status"]
    for om in omegas:
        direct = connect.s_matrix(m, om)
        try:
            rec = disk.cauchy_reconstruct(samples, om)
            diff = abs(rec - direct)
            lines.append(
                f"{_fmt(om.real)},{_fmt(om.imag)},{_fmt(rec.real)},{_fmt(rec.imag)},"
                f"{_fmt(direct.real)},{_fmt(direct.imag)},{_fmt(diff)},ok"
            )
        except OutsideDisk:
            lines.append(
                f"{_fmt(om.real)},{_fmt(om.imag)},,,"
                f"{_fmt(direct.real)},{_fmt(direct.imag)},,invalid"
            )
    _write_text(args.output, "\n".join(lines) + "\n")
    return 0


# ------------------------------------------------------------------ verify

def cmd_verify(args) -> int:
    config = validate(ProblemConfig.from_json(args.config))
    report, (m, coeffs, smap) = _solve_report(config, stabilize=not args.no_stabilize)
    checks = list(report["checks"])
    checks.extend(_verify_checks(config, m, coeffs, smap, args.nodes))
    width = max(len(c["name"]) for c in checks)
    for c in checks:
        print(
            f"{c['name']:<{width}}  {c['status']:>7}  "
            f"measured={c['measured']:.3e}  tol={c['tolerance']:.3e}"
        )
    failing = [c["name"] for c in checks if c["status"] == "fail"]
    if failing:
        print(f"FAILED: {', '.join(failing)}")
        return 1
    print("all invariants pass")
    return 0


# -------------------------------------------------------------------- main

def _grid_spec(s: str) -> tuple[float, float, int]:
    parts = s.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be START:STOP:COUNT")
    return float(parts[0]), float(parts[1]), int(parts[2])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="singscat",
        description="S-matrix of singular power-law potentials as a map on the unit disk",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="JSON problem configuration")
        p.add_argument("--output", default="-", help="output path (default stdout)")

    p_solve = sub.add_parser("solve", help="run one configuration, write a report")
    add_common(p_solve)
    p_solve.add_argument("--format", choices=("json", "csv"), default="json")
    p_solve.add_argument(
        "--no-stabilize",
        action="store_true",
        help="single extraction at exactly r_max (testing only)",
    )

    p_sweep = sub.add_parser("sweep", help="tabulate the S-matrix along an axis")
    add_common(p_sweep)
    p_sweep.add_argument("--axis", choices=("omega", "k", "theta"), required=True)
    p_sweep.add_argument(
        "--grid",
        type=_grid_spec,
        default=(0.0, 2.0 * math.pi, 64),
        help="START:STOP:COUNT (omega: phases, endpoint excluded)",
    )
    p_sweep.add_argument("--modulus", type=float, default=1.0, help="|Omega| for omega sweeps")
    p_sweep.add_argument(
        "--omega",
        action="append",
        type=_parse_omega,
        help="'re,im' evaluation point for k/theta sweeps (repeatable)",
    )

    p_rec = sub.add_parser("reconstruct", help="Cauchy reconstruction vs direct values")
    add_common(p_rec)
    p_rec.add_argument("--nodes", type=int, default=128)
    p_rec.add_argument("--omega", action="append", type=_parse_omega, help="'re,im' (repeatable)")

    p_ver = sub.add_parser("verify", help="run the full invariant suite")
    p_ver.add_argument("--config", required=True)
    p_ver.add_argument("--nodes", type=int, default=128)
    p_ver.add_argument("--no-stabilize", action="store_true")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "reconstruct":
            return cmd_reconstruct(args)
        return cmd_verify(args)
    except _USAGE_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except SingscatError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
