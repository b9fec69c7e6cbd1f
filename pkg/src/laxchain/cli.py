"""Command-line front end.

Subcommands:

* ``verify``    -- exact residual suites; JSON report; exit 0 iff all pass
* ``simulate``  -- RK4 trajectories of the lattice flows; CSV + drift summary
* ``commutant`` -- exact or windowed search for commuting operators; JSON
* ``elliptic``  -- bounded-branch Weierstrass integration; CSV
* ``darboux``   -- single-configuration transform dump and residual report

Values may come from a flat INI config file (sections mirror the flag
groups) with command-line flags taking precedence.  Exact fields parse as
rationals ("3/7", "0.25"); numeric step sizes parse as floats.  Reports
carry no timestamps: identical inputs give byte-identical output.
"""

import argparse
import configparser
import csv
import json
import sys

from .curves import SpectralCurve
from .darboux import (
    SolutionConstants,
    chain_residuals,
    commutator_x_check,
    commutator_y_check,
    darboux_data,
    factorization_check,
    rank2_solution,
    solve_tail_constants,
    transformed_operator,
)
from .elliptic import exact_wp_jet, wp_init_bounded, wp_trajectory
from .errors import ConfigError, LaxchainError
from .flows import (
    FLOWS,
    GammaChain,
    VWChain,
    prolong_gamma_jets,
    rk4_integrate,
    vn_from_gamma,
    wn_from_gamma,
)
from .scalars import format_scalar, rational
from .spectral import (
    CommutantAnsatz,
    OperatorFamilyParams,
    commutant_solve_exact,
    commutant_solve_windowed,
    exact_commutator_is_zero,
    flat_operator,
    sharp_operator,
)
from .verify import SUITES, replay_config, report_to_json, run_all, run_suite

__all__ = ["main"]


def _parse_rational(text, field):
    try:
        return rational(text)
    except (ValueError, ZeroDivisionError, TypeError) as err:
        raise ConfigError(f"{field}: not a rational: {text!r}") from err


def _parse_rational_list(text, field, expect=None):
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if expect is not None and len(parts) != expect:
        raise ConfigError(f"{field}: expected {expect} comma-separated values, got {len(parts)}")
    return tuple(_parse_rational(p, f"{field}[{i}]") for i, p in enumerate(parts))


def _parse_float(text, field):
    try:
        return float(text)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{field}: not a number: {text!r}") from err


def _parse_int(text, field):
    try:
        return int(text)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{field}: not an integer: {text!r}") from err


class Settings:
    """Merged view of config-file sections and command-line flags."""

    def __init__(self, args):
        self.args = args
        self.file = configparser.ConfigParser()
        path = getattr(args, "config", None)
        if path:
            try:
                with open(path) as fh:
                    self.file.read_file(fh)
            except OSError as err:
                raise ConfigError(f"config: cannot read {path}: {err}") from err
            except configparser.Error as err:
                raise ConfigError(f"config: {err}") from err

    def get(self, section, key, default=None):
        flag = getattr(self.args, key.replace("-", "_"), None)
        if flag is not None:
            return flag
        if self.file.has_option(section, key):
            return self.file.get(section, key)
        return default

    def curve(self, section="curve"):
        raw = self.get(section, "curve")
        if raw is not None:
            coeffs = _parse_rational_list(raw, "curve", expect=3)
        else:
            missing = [k for k in ("c2", "c1", "c0") if not self.file.has_option(section, k)]
            if missing:
                raise ConfigError(
                    f"curve: missing coefficients {', '.join(missing)} "
                    "(need exactly c2, c1, c0 for genus 1)"
                )
            coeffs = tuple(
                _parse_rational(self.file.get(section, k), f"curve.{k}")
                for k in ("c2", "c1", "c0")
            )
        return SpectralCurve.elliptic(*coeffs)

    def constants(self):
        raw = self.get("verify", "constants")
        if raw is None:
            return None
        vals = _parse_rational_list(raw, "constants", expect=6)
        return SolutionConstants(*vals)


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _cmd_verify(args):
    settings = Settings(args)
    if args.replay:
        try:
            with open(args.replay) as fh:
                dump = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"replay: {err}") from err
        report = replay_config(dump)
        _write_text(args.out, report_to_json(report))
        return 0 if report.passed else 1

    suite = settings.get("verify", "suite", "all")
    samples = _parse_int(settings.get("verify", "samples", 20), "samples")
    seed = _parse_int(settings.get("verify", "seed", 7), "seed")
    workers = _parse_int(settings.get("verify", "workers", 1), "workers")
    max_num = _parse_int(settings.get("verify", "max_num", 1000), "max_num")
    max_den = _parse_int(settings.get("verify", "max_den", 8), "max_den")
    constants = settings.constants()

    if suite == "all":
        reports = run_all(samples, seed, constants, max_num, max_den, workers)
    elif suite in SUITES:
        reports = run_suite(suite, samples, seed, constants, max_num, max_den, workers)
    else:
        raise ConfigError(f"suite: unknown suite {suite!r} (choose from {', '.join(SUITES)} or all)")
    _write_text(args.out, report_to_json(reports))
    passed = reports.passed if hasattr(reports, "passed") else all(r.passed for r in reports)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _invariant_rows(traj):
    """Drift statistics of the conserved quantities along the trajectory.

    The product of the couplings V_n is a first integral of the coupled
    system (the log-derivatives telescope over a period); for gamma flows
    the spectral value reconstructed from the chain is an exact identity,
    so its drift only measures rounding.
    """
    from .spectral import QPolynomial, q_conserved_value

    probes = sorted({0, traj.steps // 2, traj.steps})
    rows = {}

    if traj.kind != "gamma":
        prods = []
        for i in probes:
            prod = 1.0
            for v in traj.chain_at(i).v:
                prod *= float(v)
            prods.append(prod)
        rows["coupling_product"] = {
            "initial": prods[0],
            "max_drift": max(abs(p - prods[0]) for p in prods),
        }
        return rows

    curve = traj.curve
    z_probe = 2.0 + max(abs(float(v)) for v in traj.chain_at(0).values)
    expected = float(curve.eval(z_probe))

    def coupling_product(chain):
        prod = 1.0
        for n in range(chain.period):
            prod *= float(vn_from_gamma(chain, n))
        return prod

    def spectral_value(chain):
        q = [QPolynomial.from_gamma(float(g)) for g in chain.values]
        return float(
            q_conserved_value(
                q[-1 % chain.period],
                q[0],
                q[1 % chain.period],
                q[2 % chain.period],
                vn_from_gamma(chain, 0),
                vn_from_gamma(chain, 1),
                wn_from_gamma(chain, 0),
                z_probe,
            )
        )

    prods = [coupling_product(traj.chain_at(i)) for i in probes]
    specs = [spectral_value(traj.chain_at(i)) for i in probes]
    rows["coupling_product"] = {
        "initial": prods[0],
        "max_drift": max(abs(p - prods[0]) for p in prods),
    }
    rows["spectral_value"] = {
        "probe_z": z_probe,
        "expected": expected,
        "max_drift": max(abs(s - expected) for s in specs),
    }
    return rows


def _cmd_simulate(args):
    settings = Settings(args)
    flow = settings.get("simulate", "flow", "dkn")
    if flow not in FLOWS:
        raise ConfigError(f"flow: unknown flow {flow!r} (choose from {', '.join(FLOWS)})")
    h = _parse_float(settings.get("simulate", "h", "1e-3"), "h")
    steps = _parse_int(settings.get("simulate", "steps", 1000), "steps")

    if flow in ("dkn", "reduced_t2"):
        curve = settings.curve()
        gamma_raw = settings.get("chain", "gamma")
        if gamma_raw is None:
            raise ConfigError("chain.gamma: required for gamma flows")
        gamma = _parse_rational_list(gamma_raw, "chain.gamma")
        if len(gamma) < 3:
            raise ConfigError("chain.gamma: the lattice stencil needs period >= 3")
        state = GammaChain(gamma, curve)
    else:
        v_raw = settings.get("chain", "v")
        w_raw = settings.get("chain", "w")
        if v_raw is None or w_raw is None:
            raise ConfigError("chain.v / chain.w: required for coupled flows")
        state = VWChain(
            _parse_rational_list(v_raw, "chain.v"),
            _parse_rational_list(w_raw, "chain.w"),
        )

    traj = rk4_integrate(state, flow, h, steps)

    rows = []
    if traj.kind == "gamma":
        header = ["step", "x", "site", "gamma"]
        for i in range(traj.steps + 1):
            for site in range(traj.period):
                rows.append([i, i * traj.h, site, traj.states[i][site]])
    else:
        header = ["step", "x", "site", "V", "W"]
        for i in range(traj.steps + 1):
            for site in range(traj.period):
                rows.append(
                    [
                        i,
                        i * traj.h,
                        site,
                        traj.states[i][site],
                        traj.states[i][traj.period + site],
                    ]
                )
    out_csv = args.csv or "trajectory.csv"
    with open(out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)

    summary = {
        "flow": flow,
        "h": h,
        "steps": steps,
        "invariants": _invariant_rows(traj),
        "csv": out_csv,
    }
    _write_text(args.out, json.dumps(summary, sort_keys=True, indent=2))
    return 0


# ---------------------------------------------------------------------------
# commutant
# ---------------------------------------------------------------------------

def _cmd_commutant(args):
    settings = Settings(args)
    variant = settings.get("commutant", "variant", "sharp")
    band = _parse_int(settings.get("commutant", "band", 3), "band")
    degree = _parse_int(settings.get("commutant", "degree", 9), "degree")
    genus = _parse_int(settings.get("commutant", "genus", 1), "genus")

    payload = {"variant": variant, "band": band}
    if variant == "sharp":
        r = _parse_rational_list(settings.get("commutant", "r", "0,0,0,1"), "r", expect=4)
        op = sharp_operator(OperatorFamilyParams("sharp", r, genus))
        ansatz = CommutantAnsatz(band_m=band, degree=degree)
        result = commutant_solve_exact(op, ansatz)
        verified = all(exact_commutator_is_zero(op, x) for x in result.basis)
        from .operators import commutator, max_band_norm

        payload.update(
            {
                "degree": degree,
                "dimension": result.dimension,
                "verified_exact": verified,
                "basis": [
                    {
                        str(j): [format_scalar(c) for c in p]
                        for j, p in sol.bands.items()
                    }
                    for sol in result.basis
                ],
                "basis_windows": [
                    sol.window(0, 7).to_json_dict() for sol in result.basis
                ],
                "residual_norms": [
                    float(
                        max_band_norm(
                            commutator(op.operator, sol.operator), (0, 7)
                        )
                    )
                    for sol in result.basis
                ],
            }
        )
        ok = result.dimension > 0 and verified
    elif variant == "flat":
        r = _parse_rational_list(settings.get("commutant", "r", "0,1"), "r", expect=2)
        op = flat_operator(OperatorFamilyParams("flat", r, genus))
        window = settings.get("commutant", "window", "0,40")
        n0, n1 = (int(x) for x in _parse_rational_list(window, "window", expect=2))
        result = commutant_solve_windowed(op, band, n0, n1)
        payload.update(result.to_json_dict())
        ok = result.nullity > 0
    elif variant == "custom":
        bands_raw = settings.get("commutant", "bands")
        if bands_raw is None:
            raise ConfigError(
                "commutant.bands: required for variant=custom "
                '(JSON like {"1": ["1"], "-1": ["0","1"]})'
            )
        try:
            raw = json.loads(bands_raw)
            bands = {
                int(j): tuple(rational(c) for c in coeffs)
                for j, coeffs in raw.items()
            }
        except (ValueError, TypeError) as err:
            raise ConfigError(f"commutant.bands: {err}") from err
        ansatz = CommutantAnsatz(band_m=band, degree=degree)
        result = commutant_solve_exact(bands, ansatz)
        payload.update(
            {
                "degree": degree,
                "dimension": result.dimension,
                "basis": [
                    {
                        str(j): [format_scalar(c) for c in p]
                        for j, p in sol.bands.items()
                    }
                    for sol in result.basis
                ],
            }
        )
        ok = result.dimension > 0
    else:
        raise ConfigError(f"variant: unknown variant {variant!r} (sharp|flat|custom)")

    _write_text(args.out, json.dumps(payload, sort_keys=True, indent=2))
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# elliptic
# ---------------------------------------------------------------------------

def _cmd_elliptic(args):
    settings = Settings(args)
    curve = settings.curve()
    y_max = _parse_float(settings.get("elliptic", "y_max", 20.0), "y_max")
    h = _parse_float(settings.get("elliptic", "h", "1e-3"), "h")
    branch = wp_init_bounded(curve)
    ys, wps, wpps, drift = wp_trajectory(branch, y_max, h)
    out_csv = args.csv or "elliptic.csv"
    with open(out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y", "wp", "wp_prime", "energy_drift"])
        for row in zip(ys, wps, wpps, drift):
            writer.writerow(list(row))
    print(f"wrote {len(ys)} samples to {out_csv}; max |energy drift| = {max(abs(drift)):.3e}")
    return 0


# ---------------------------------------------------------------------------
# darboux
# ---------------------------------------------------------------------------

def _cmd_darboux(args):
    settings = Settings(args)
    curve = settings.curve()
    gamma_raw = settings.get("chain", "gamma")
    if gamma_raw is None:
        raise ConfigError("chain.gamma: required")
    gamma = _parse_rational_list(gamma_raw, "chain.gamma")
    z0 = _parse_rational(settings.get("darboux", "z0", "0"), "darboux.z0")

    chain = GammaChain(gamma, curve)
    jets = prolong_gamma_jets(chain, 3)
    wp = exact_wp_jet(curve, z0, order=3, sign=1)
    data = darboux_data(jets, wp)

    solved = solve_tail_constants(chain)
    sol = rank2_solution(data.truncated(1, 1), solved)
    residuals = [
        [format_scalar(r) for r in chain_residuals(sol, n)] for n in range(chain.period)
    ]
    transformed = transformed_operator(data.truncated(0, 0))
    payload = {
        "curve": {
            "c2": format_scalar(curve.coeffs[2]),
            "c1": format_scalar(curve.coeffs[1]),
            "c0": format_scalar(curve.coeffs[0]),
        },
        "gamma": [format_scalar(g) for g in gamma],
        "z0": format_scalar(z0),
        "solved_constants": {
            "s0": format_scalar(solved.s0),
            "k0": format_scalar(solved.k0),
            "p0": format_scalar(solved.p0),
        },
        "transformed_operator": transformed.operator.window(
            0, chain.period - 1
        ).to_json_dict(),
        "factorization_zero": factorization_check(data.truncated(0, 0)).is_zero(),
        "crosscheck_zero": transformed.crosscheck_window().is_zero(),
        "lax_x_zero": commutator_x_check(data).is_zero(),
        "lax_y_zero": commutator_y_check(data, solved).is_zero(),
        "chain_residuals": residuals,
    }
    _write_text(args.out, json.dumps(payload, sort_keys=True, indent=2))
    ok = (
        payload["factorization_zero"]
        and payload["crosscheck_zero"]
        and payload["lax_x_zero"]
        and payload["lax_y_zero"]
    )
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="laxchain",
        description="Integrable-chain verification, simulation, and operator search",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI config file; flags override its values")
        p.add_argument("--out", help="output path for the JSON report (default stdout)")

    p = sub.add_parser("verify", help="run exact residual suites")
    common(p)
    p.add_argument("--suite", help=f"one of {', '.join(SUITES)} or all")
    p.add_argument("--samples", help="number of random configurations")
    p.add_argument("--seed", help="64-bit seed of the counter-based generator")
    p.add_argument("--constants", help="s0,k0,p0,s1,k1,p1 for the oscillating tail")
    p.add_argument("--workers", help="process-pool width for sample evaluation")
    p.add_argument("--max-num", dest="max_num", help="numerator bound for draws")
    p.add_argument("--max-den", dest="max_den", help="denominator bound for draws")
    p.add_argument("--replay", help="re-run a single failure dump (JSON file)")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("simulate", help="integrate a lattice flow")
    common(p)
    p.add_argument("--flow", help=f"one of {', '.join(FLOWS)}")
    p.add_argument("--h", help="RK4 step size")
    p.add_argument("--steps", help="number of steps")
    p.add_argument("--curve", help="c2,c1,c0")
    p.add_argument("--gamma", help="comma-separated initial chain values")
    p.add_argument("--v", help="comma-separated V values (coupled flows)")
    p.add_argument("--w", help="comma-separated W values (coupled flows)")
    p.add_argument("--csv", help="trajectory CSV path (default trajectory.csv)")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("commutant", help="search for commuting operators")
    common(p)
    p.add_argument("--variant", help="sharp | flat | custom")
    p.add_argument("--band", help="half-bandwidth M of the ansatz")
    p.add_argument("--degree", help="polynomial degree bound per band (exact path)")
    p.add_argument("--genus", help="family genus parameter")
    p.add_argument("--r", help="family coefficients r0,r1[,r2,r3]")
    p.add_argument("--window", help="n0,n1 site window (windowed path)")
    p.add_argument("--bands", help="JSON band polynomials (variant=custom)")
    p.set_defaults(handler=_cmd_commutant)

    p = sub.add_parser("elliptic", help="integrate the bounded branch")
    common(p)
    p.add_argument("--curve", help="c2,c1,c0")
    p.add_argument("--y-max", dest="y_max", help="integration endpoint")
    p.add_argument("--h", help="RK4 step size")
    p.add_argument("--csv", help="output CSV path (default elliptic.csv)")
    p.set_defaults(handler=_cmd_elliptic)

    p = sub.add_parser("darboux", help="transform one exact configuration")
    common(p)
    p.add_argument("--curve", help="c2,c1,c0")
    p.add_argument("--gamma", help="comma-separated chain values")
    p.add_argument("--z0", help="curve point (rational)")
    p.set_defaults(handler=_cmd_darboux)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except LaxchainError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
