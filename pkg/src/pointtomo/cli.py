"""Command-line front end.

Subcommands: design, fisher, simulate, bootstrap, fit, report.
Exit codes: 0 success, 2 configuration error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .assets import format_matrix_text, load_matrix, seven_port_matrix
from .errors import InvalidInput, PointTomoError
from .estimator import MleConfig, bootstrap_infidelity, fit_power_law
from .fisher import (asymptotic_infidelity_coefficient, c_matrix, c_norm,
                     cfim_first_order, gm_inequality_lhs, qfim_pure)
from .io import (atomic_write_text, metadata_path_for, metadata_record,
                 read_sweep_table, sweep_table_text, write_metadata)
from .plotting import sweep_plot_svg
from .povm import (MbsDevice, PovmFamily, effects_from_family, enumerate_families,
                   haar_mean_c_norm, load_mbs, optimize_phases)
from .simulate import (NoiseConfig, SweepConfig, config_hash,
                       expected_infidelity_floor, prepared_state, run_sweep,
                       sample_counts, trial_rng)
from .states import born_probabilities, depolarize, equal_deviation_state


def _parse_ints(text: str) -> tuple:
    return tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)


def _parse_floats(text: str) -> tuple:
    return tuple(float(tok) for tok in text.replace(" ", "").split(",") if tok)


def _load_device(spec: str, reunitarize: bool) -> MbsDevice:
    matrix = seven_port_matrix() if spec == "u7" else load_matrix(spec)
    return load_mbs(matrix, reunitarize=reunitarize)


def _family_povm(args):
    device = _load_device(args.device, not args.raw_device)
    phases = np.zeros(len(args.subset)) if args.phases is None else np.asarray(args.phases)
    family = PovmFamily(subset=args.subset, phases=phases)
    return device, effects_from_family(device, family)


def _add_device_args(p, subset_default="4,5,6,7"):
    p.add_argument("--device", default="u7",
                   help="device matrix: 'u7' for the builtin asset or a text file path")
    p.add_argument("--raw-device", action="store_true",
                   help="keep the raw matrix instead of projecting to the nearest unitary")
    p.add_argument("--subset", type=_parse_ints, default=_parse_ints(subset_default),
                   help="connected input ports, comma separated (1-based)")
    p.add_argument("--phases", type=_parse_floats, default=None,
                   help="input phases in radians (first must be 0); default all zero")


def cmd_design(args) -> int:
    device = _load_device(args.device, not args.raw_device)
    dim = args.dim
    families = enumerate_families(device.n_ports, dim)
    rows = []
    for subset in families:
        zero = c_norm(effects_from_family(device, subset), args.norm)
        family, best = optimize_phases(device, subset, n_starts=args.starts,
                                       seed=args.seed, norm_kind=args.norm)
        rows.append((subset, zero, best, family.phases))
    rows.sort(key=lambda r: r[2])
    lines = ["subset,zero_phase_norm,optimized_norm,optimal_phases,winner"]
    for rank, (subset, zero, best, phases) in enumerate(rows):
        subset_s = "".join(str(s) for s in subset)
        phases_s = ";".join(f"{p:.6f}" for p in phases)
        lines.append(f"{subset_s},{zero:.6f},{best:.6f},{phases_s},{int(rank == 0)}")
    table = "\n".join(lines) + "\n"
    sys.stdout.write(table)
    winner = rows[0]
    sys.stdout.write(f"# winner: subset {winner[0]} with {args.norm} norm {winner[2]:.4f}\n")
    if args.out:
        atomic_write_text(args.out, table)
        write_metadata(metadata_record(config_hash(("design", args.device, dim, args.norm,
                                                    args.starts, args.seed)), args.seed),
                       metadata_path_for(args.out))
    return 0


def cmd_fisher(args) -> int:
    device, povm = _family_povm(args)
    if args.optimize_phases:
        family, _ = optimize_phases(device, args.subset, seed=args.seed, norm_kind=args.norm)
        povm = effects_from_family(device, family)
    c = c_matrix(povm)
    cfim = cfim_first_order(povm)
    qfim = qfim_pure(np.zeros(povm.dim - 1, dtype=complex))
    out = []
    out.append("C matrix:\n" + format_matrix_text(c))
    out.append(f"{args.norm} norm of C: {c_norm(povm, args.norm):.6f}")
    out.append(f"asymptotic infidelity coefficient: {asymptotic_infidelity_coefficient(povm):.6f}")
    out.append("CFIM diagonal block at the fiducial point:\n" + format_matrix_text(cfim.diag_block))
    out.append("CFIM off block at the fiducial point:\n" + format_matrix_text(cfim.off_block))
    out.append("QFIM diagonal block at the fiducial point:\n" + format_matrix_text(qfim.diag_block))
    out.append("QFIM off block at the fiducial point:\n" + format_matrix_text(qfim.off_block))
    out.append(f"tr(I J^-1): {gm_inequality_lhs(cfim, qfim):.12f} (bound {povm.dim - 1})")
    if args.haar_baseline:
        rng = np.random.default_rng(args.seed)
        mean, err = haar_mean_c_norm(povm.dim, povm.n_outcomes, args.haar_baseline, rng,
                                     kind=args.norm)
        out.append(f"Haar baseline <||C||> over {args.haar_baseline} samples: "
                   f"{mean:.4f} +/- {err:.4f}")
    text = "\n".join(out) + "\n"
    sys.stdout.write(text)
    if args.out:
        atomic_write_text(args.out, text)
        write_metadata(metadata_record(config_hash(("fisher", args.device, args.subset,
                                                    args.norm, args.haar_baseline)),
                                       args.seed), metadata_path_for(args.out))
    return 0


def _sweep_config(args) -> SweepConfig:
    return SweepConfig(
        theta_scalar=args.theta,
        n_grid=args.n_grid,
        repetitions=args.reps,
        noise=NoiseConfig(lam=args.lam, systematic_epsilon=args.epsilon, seed=args.seed),
        subset=args.subset,
        phases=args.phases,
        device=args.device,
        reunitarize=not args.raw_device,
        seed=args.seed,
        n_boot=args.boot,
        mle=MleConfig(starts=args.mle_starts),
    )


def cmd_simulate(args) -> int:
    cfg = _sweep_config(args)
    result = run_sweep(cfg, workers=args.workers)
    table = sweep_table_text(result)
    if args.out:
        atomic_write_text(args.out, table)
        write_metadata(metadata_record(result.config_hash, result.seed,
                                       extra={"rows": len(result.rows)}),
                       metadata_path_for(args.out))
    else:
        sys.stdout.write(table)
    if args.plot:
        _, povm = _family_povm(args)
        rho = prepared_state(cfg, povm.dim)
        floor = expected_infidelity_floor(rho, povm)
        coef = asymptotic_infidelity_coefficient(povm)
        svg = sweep_plot_svg(result.as_array(), gm_coefficient=povm.dim - 1,
                             model_floor=floor, model_coefficient=coef)
        atomic_write_text(args.plot, svg)
    return 0


def cmd_bootstrap(args) -> int:
    _, povm = _family_povm(args)
    rho = depolarize(equal_deviation_state(args.theta, povm.dim), args.lam)
    if args.counts is not None:
        counts = np.asarray(args.counts, dtype=float)
    else:
        counts = sample_counts(born_probabilities(povm, rho), args.n, trial_rng(args.seed, 0, 0))
    res = bootstrap_infidelity(counts, povm, rho, args.boot, trial_rng(args.seed, 0, 0, stream=1),
                               MleConfig(starts=args.mle_starts))
    lines = ["boot_low,boot_q25,boot_median,boot_q75,boot_high,degenerate",
             ",".join(repr(v) for v in res.as_row()) + f",{int(res.degenerate)}"]
    table = "\n".join(lines) + "\n"
    sys.stdout.write(table)
    if args.out:
        atomic_write_text(args.out, table)
        write_metadata(metadata_record(config_hash(("bootstrap", tuple(counts), args.boot)),
                                       args.seed,
                                       extra={"resampling": "empirical-frequencies"}),
                       metadata_path_for(args.out))
    return 0


def cmd_fit(args) -> int:
    table = read_sweep_table(args.infile)
    fit = fit_power_law(table[:, :3:2])
    record = {"coefficient": fit.coefficient, "exponent": fit.exponent,
              "residual": fit.residual, "source": os.path.basename(args.infile),
              "source_hash": config_hash(tuple(map(tuple, table.tolist())))}
    sys.stdout.write(json.dumps(record, indent=2, sort_keys=True) + "\n")
    if args.out:
        atomic_write_text(args.out, json.dumps(record, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_report(args) -> int:
    table = read_sweep_table(args.infile)
    dim = args.dim
    lines = [f"sweep report ({len(table)} trials)", ""]
    lines.append(f"{'N':>10}  {'mean infid':>12}  {'median':>12}  {'GM (d-1)/N':>12}")
    for n in np.unique(table[:, 0]):
        sel = table[table[:, 0] == n, 2]
        lines.append(f"{int(n):>10}  {sel.mean():>12.4e}  {np.median(sel):>12.4e}  "
                     f"{(dim - 1) / n:>12.4e}")
    fit = fit_power_law(table[:, :3:2])
    lines.append("")
    lines.append(f"power-law fit: infidelity ~ {fit.coefficient:.3f} * N^{fit.exponent:.3f} "
                 f"(log-residual RMS {fit.residual:.3f})")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        atomic_write_text(args.out, text)
    if args.plot:
        svg = sweep_plot_svg(table, gm_coefficient=dim - 1)
        atomic_write_text(args.plot, svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pointtomo",
        description="Design near-Fisher-symmetric measurements, simulate finite-ensemble "
                    "tomography around a target state, and analyze the precision scaling.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="rank all input families of a device by C norm")
    p.add_argument("--device", default="u7")
    p.add_argument("--raw-device", action="store_true")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--norm", choices=["spectral", "frobenius"], default="spectral")
    p.add_argument("--starts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("fisher", help="information matrices and C norm of one family")
    _add_device_args(p)
    p.add_argument("--norm", choices=["spectral", "frobenius"], default="spectral")
    p.add_argument("--optimize-phases", action="store_true")
    p.add_argument("--haar-baseline", type=int, default=0, metavar="SAMPLES")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fisher)

    def add_sim_args(p, seed_required=True):
        _add_device_args(p)
        p.add_argument("--theta", type=float, required=True,
                       help="deviation scalar of the prepared state")
        p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                       help="depolarizing weight of the preparation (1 = noiseless)")
        p.add_argument("--epsilon", type=float, default=0.0,
                       help="systematic misalignment strength (0 disables)")
        p.add_argument("--seed", type=int, required=seed_required)
        p.add_argument("--boot", type=int, default=0, help="bootstrap replicas per trial")
        p.add_argument("--mle-starts", type=int, default=8)

    p = sub.add_parser("simulate", help="run an infidelity-vs-N sweep")
    add_sim_args(p)
    p.add_argument("--n-grid", type=_parse_ints, required=True,
                   help="comma separated ensemble sizes, increasing")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="parallel trial workers (default: available cores)")
    p.add_argument("--out")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bootstrap", help="bootstrap the infidelity of one trial")
    add_sim_args(p)
    p.set_defaults(boot=100)
    p.add_argument("--n", type=int, default=1000, help="ensemble size of the simulated trial")
    p.add_argument("--counts", type=_parse_ints, default=None,
                   help="use these observed counts instead of simulating")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("fit", help="fit a power law to a sweep table")
    p.add_argument("infile")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="summarize a sweep table")
    p.add_argument("infile")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--out")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "boot", 0) and args.boot < 0:
        parser.error("--boot must be >= 0")
    try:
        return args.func(args)
    except (InvalidInput, FileNotFoundError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except PointTomoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - unexpected
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
