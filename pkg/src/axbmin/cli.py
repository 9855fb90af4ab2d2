"""Command-line interface: check, solve, shorted, examples, sampling-demo.

Instances are JSON files with named matrices A, B, C, W, a scalar p, and
optional tolerance overrides.  Every matrix is an object

    {"rows": m, "cols": n, "data": [[re, im], ...]}

with ``data`` row-major and one [real, imaginary] pair per entry; this is
lossless for finite doubles.  Reports are printed as human-readable text
followed by a machine-readable JSON block (or only the JSON with --json).

Exit codes: 0 success, 2 input error, 3 uncharacterized regime, 4 internal
assertion failure in the built-in example reproductions.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .axb_solver import (
    ProblemInstance,
    SolveStatus,
    brute_force_p2_oracle,
    critical_residual,
    descent_check_fp,
    normal_residual_full,
    normal_residual_p2,
    operator_order_min,
    random_rank_matrix,
    schatten_min,
    shorted_to_range_of_a,
)
from .core_linalg import (
    DEFAULT_TOL,
    NotPsdError,
    PsdWeight,
    TolerancePolicy,
    as_matrix,
    complex_gaussian,
    hermitian_part,
    range_basis,
)
from .schatten import weighted_seminorm
from .shorted import shorted_infimum_witness, shorted_kernel_range_check, shorted_operator
from .wls import check_conditions

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNCHARACTERIZED = 3
EXIT_ASSERTION = 4


class InputError(Exception):
    """Bad instance file, malformed matrix, or failed validation."""


# ---------------------------------------------------------------------------
# matrix / instance file codec


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.flatten(order="C")],
    }


def matrix_from_json(obj, what: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise InputError(f"{what}: expected an object with rows/cols/data")
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{what}: missing or invalid rows/cols/data ({exc})") from exc
    if rows < 0 or cols < 0:
        raise InputError(f"{what}: negative dimensions")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise InputError(f"{what}: data must hold rows*cols = {rows * cols} entries")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, entry in enumerate(data):
        if not (isinstance(entry, list) and len(entry) == 2):
            raise InputError(f"{what}: entry {i} is not a [re, im] pair")
        re, im = entry
        if not all(isinstance(v, (int, float)) for v in (re, im)):
            raise InputError(f"{what}: entry {i} has non-numeric parts")
        out[i] = complex(re, im)
    m = out.reshape((rows, cols), order="C")
    try:
        return as_matrix(m)
    except ValueError as exc:
        raise InputError(f"{what}: {exc}") from exc


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh, parse_constant=_reject_constant)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _reject_constant(name):
    raise InputError(f"non-finite JSON constant {name!r} is not allowed")


def tolerance_from_json(obj, base: TolerancePolicy) -> TolerancePolicy:
    if obj is None:
        return base
    if not isinstance(obj, dict):
        raise InputError("tolerances: expected an object")
    allowed = {"rank_rel", "residual_abs", "psd_tol"}
    unknown = set(obj) - allowed
    if unknown:
        raise InputError(f"tolerances: unknown keys {sorted(unknown)}")
    values = {
        "rank_rel": base.rank_rel,
        "residual_abs": base.residual_abs,
        "psd_tol": base.psd_tol,
    }
    values.update({k: float(v) for k, v in obj.items()})
    try:
        return TolerancePolicy(**values)
    except ValueError as exc:
        raise InputError(f"tolerances: {exc}") from exc


def load_matrix_file(path: str, what: str = "matrix") -> np.ndarray:
    return matrix_from_json(_load_json(path), what)


def load_instance(path: str, base_tol: TolerancePolicy, p_override=None):
    """Read an instance file and validate it into (ProblemInstance, TolerancePolicy)."""
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise InputError(f"{path}: expected a top-level object")
    tol = tolerance_from_json(obj.get("tolerances"), base_tol)
    mats = {}
    for key in ("A", "B", "C", "W"):
        if key not in obj:
            raise InputError(f"{path}: missing matrix {key!r}")
        mats[key] = matrix_from_json(obj[key], key)
    p = float(obj.get("p", 2.0)) if p_override is None else float(p_override)
    try:
        weight = PsdWeight.from_matrix(mats["W"], tol)
    except NotPsdError as exc:
        raise InputError(f"{path}: W failed PSD validation: {exc}") from exc
    try:
        inst = ProblemInstance(mats["A"], mats["B"], mats["C"], weight, p)
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    return inst, tol


def save_instance(path: str, inst: ProblemInstance, tol: TolerancePolicy | None = None) -> None:
    obj = {
        "A": matrix_to_json(inst.a),
        "B": matrix_to_json(inst.b),
        "C": matrix_to_json(inst.c),
        "W": matrix_to_json(inst.w.w),
        "p": float(inst.p),
    }
    if tol is not None:
        obj["tolerances"] = {
            "rank_rel": tol.rank_rel,
            "residual_abs": tol.residual_abs,
            "psd_tol": tol.psd_tol,
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# report rendering


def _fmt_matrix(m, indent="    ") -> str:
    text = np.array2string(
        np.asarray(m), precision=6, suppress_small=True, separator=", "
    )
    return indent + text.replace("\n", "\n" + indent)


def _conditions_dict(report) -> dict:
    return {
        "range_condition": report.range_condition,
        "kernel_condition": report.kernel_condition,
        "range_residual": report.range_residual,
        "kernel_residual": report.kernel_residual,
        "tolerance": report.tolerance,
    }


def _conditions_lines(report) -> list[str]:
    return [
        "conditions:",
        f"  range  R(C) in R(A)+R(A)^perp_W : {report.range_condition}"
        f"  (residual {report.range_residual:.3e})",
        f"  kernel N(B) in N(A*WC)          : {report.kernel_condition}"
        f"  (residual {report.kernel_residual:.3e})",
    ]


def _json_default(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit(lines: list[str], report: dict, json_only: bool) -> None:
    if json_only:
        print(json.dumps(report, indent=2, default=_json_default))
        return
    for line in lines:
        print(line)
    print()
    print("machine-readable report:")
    print(json.dumps(report, indent=2, default=_json_default))


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args) -> tuple[int, dict, list[str]]:
    inst, tol = load_instance(args.path, _base_tol(args))
    order = operator_order_min(inst, tol)
    report = {
        "command": "check",
        "instance": args.path,
        "p": inst.p,
        "conditions": _conditions_dict(order.conditions),
        "order_status": order.status.value,
    }
    lines = [f"instance {args.path}  (p = {inst.p})"]
    lines += _conditions_lines(order.conditions)
    lines.append(f"operator-order status: {order.status.value}")
    return EXIT_OK, report, lines


def _candidate_report(inst: ProblemInstance, x, tol: TolerancePolicy, seed: int) -> dict:
    out = {
        "fp_value": weighted_seminorm(inst.residual(x), inst.w, inst.p),
        "normal_full_norm": float(np.linalg.norm(normal_residual_full(inst, x))),
        "normal_p2_norm": float(np.linalg.norm(normal_residual_p2(inst, x))),
    }
    if inst.p > 1:
        out["critical_residual_norm"] = float(np.linalg.norm(critical_residual(inst, x, tol)))
        descent = descent_check_fp(inst, x, trials=50, rng_seed=seed, tol=tol)
        out["descent_min_derivative"] = descent.min_derivative
        out["descent_all_nonnegative"] = descent.all_nonnegative
    return out


def cmd_solve(args) -> tuple[int, dict, list[str]]:
    inst, tol = load_instance(args.path, _base_tol(args), p_override=args.p)
    candidate = None
    if args.candidate is not None:
        candidate = load_matrix_file(args.candidate, "candidate")
        if candidate.shape != inst.x_shape:
            raise InputError(
                f"candidate shape {candidate.shape} does not match unknown "
                f"shape {inst.x_shape}"
            )

    report: dict = {"command": "solve", "instance": args.path, "p": inst.p}
    lines = [f"instance {args.path}  (p = {inst.p})"]
    exit_code = EXIT_OK

    if args.order:
        result = operator_order_min(inst, tol)
        report["mode"] = "order"
        report["status"] = result.status.value
        report["conditions"] = _conditions_dict(result.conditions)
        lines += _conditions_lines(result.conditions)
        lines.append(f"operator-order status: {result.status.value}")
        if result.inf_value is not None:
            report["inf_value"] = matrix_to_json(result.inf_value)
            lines.append("infimum value C* W_/R(A) C:")
            lines.append(_fmt_matrix(result.inf_value))
        if result.manifold is not None:
            x0 = result.manifold.particular
            report["minimizer"] = matrix_to_json(x0)
            report["normal_full_norm"] = float(np.linalg.norm(normal_residual_full(inst, x0)))
            lines.append("canonical minimizer map(0):")
            lines.append(_fmt_matrix(x0))
            lines.append(f"normal-equation residual norm: {report['normal_full_norm']:.3e}")
            if args.emit_manifold:
                report["manifold"] = {
                    "particular": matrix_to_json(result.manifold.particular),
                    "left_factor": matrix_to_json(result.manifold.left_factor),
                    "right_factor": matrix_to_json(result.manifold.right_factor),
                }
    else:
        result = schatten_min(inst, tol)
        report["mode"] = "schatten"
        report["status"] = result.status.value
        report["conditions"] = _conditions_dict(result.conditions)
        lines += _conditions_lines(result.conditions)
        lines.append(f"schatten solve status: {result.status.value}")
        if result.status is SolveStatus.SOLVED:
            report["value"] = result.value
            report["formula_value"] = result.formula_value
            report["formula_agrees"] = result.formula_agrees
            x0 = result.minimizer
            report["minimizer"] = matrix_to_json(x0)
            report["normal_full_norm"] = float(np.linalg.norm(normal_residual_full(inst, x0)))
            report["normal_p2_norm"] = float(np.linalg.norm(normal_residual_p2(inst, x0)))
            lines.append(f"min value (direct evaluation) : {result.value:.12g}")
            lines.append(f"min value (shorted formula)   : {result.formula_value:.12g}")
            if not result.formula_agrees:
                lines.append(
                    "WARNING: direct and formula values disagree; the direct "
                    "evaluation is authoritative (kernel condition fails)"
                )
            lines.append("canonical minimizer map(0):")
            lines.append(_fmt_matrix(x0))
            lines.append(
                f"normal residual norms: full {report['normal_full_norm']:.3e}, "
                f"p2 {report['normal_p2_norm']:.3e}"
            )
            if args.emit_manifold:
                report["manifold"] = {
                    "particular": matrix_to_json(result.manifold.particular),
                    "left_factor": matrix_to_json(result.manifold.left_factor),
                    "right_factor": matrix_to_json(result.manifold.right_factor),
                }
        elif result.status is SolveStatus.NOT_CHARACTERIZED:
            lines.append(
                "no closed-form solver applies: the kernel condition fails "
                "and p != 2 (minimizers are not characterized by a normal "
                "equation in this regime)"
            )
            exit_code = EXIT_UNCHARACTERIZED

    if candidate is not None:
        cand = _candidate_report(inst, candidate, tol, _seed(args))
        report["candidate"] = cand
        lines.append("candidate point:")
        for key, val in cand.items():
            lines.append(f"  {key}: {val}")
    report["exit_code"] = exit_code
    return exit_code, report, lines


def cmd_shorted(args) -> tuple[int, dict, list[str]]:
    obj = _load_json(args.path)
    if not isinstance(obj, dict) or "W" not in obj:
        raise InputError(f"{args.path}: expected an object with a 'W' matrix")
    tol = tolerance_from_json(obj.get("tolerances"), _base_tol(args))
    try:
        weight = PsdWeight.from_matrix(matrix_from_json(obj["W"], "W"), tol)
    except NotPsdError as exc:
        raise InputError(f"{args.path}: W failed PSD validation: {exc}") from exc
    span = load_matrix_file(args.subspace, "subspace")
    if span.shape[0] != weight.dim:
        raise InputError(
            f"subspace lives in dimension {span.shape[0]}, weight in {weight.dim}"
        )
    s = range_basis(span, tol)
    pair = shorted_operator(weight, s, tol)
    props = shorted_kernel_range_check(weight, s, tol)
    witness = shorted_infimum_witness(
        weight, s, trials=args.trials, rng_seed=_seed(args), tol=tol
    )
    report = {
        "command": "shorted",
        "instance": args.path,
        "subspace_dim": s.dim,
        "shorted": matrix_to_json(pair.shorted),
        "compression": matrix_to_json(pair.compression),
        "properties": {
            "kernel_matches": props.kernel_matches,
            "range_in_complement": props.range_in_complement,
            "null_and_s_absorbed": props.null_and_s_absorbed,
            "kernel_mismatch_residual": props.kernel_mismatch_residual,
            "range_residual": props.range_residual,
            "null_absorb_residual": props.null_absorb_residual,
            "all_pass": props.all_pass,
        },
        "witness": {
            "trials": witness.trials,
            "min_margin": witness.min_margin,
            "all_bounded": witness.all_bounded,
        },
    }
    lines = [
        f"weight dimension {weight.dim}, subspace dimension {s.dim}",
        "shorted operator W_/S:",
        _fmt_matrix(pair.shorted),
        "compression W_S:",
        _fmt_matrix(pair.compression),
        f"kernel of compression matches W-orthogonal complement: {props.kernel_matches}",
        f"range of W_/S inside S-perp: {props.range_in_complement}"
        f"  (residual {props.range_residual:.3e})",
        f"N(W)+S annihilated by W_/S: {props.null_and_s_absorbed}",
        f"infimum witness over {witness.trials} oblique projections: "
        f"min margin {witness.min_margin:.3e} (bounded: {witness.all_bounded})",
        f"all property checks pass: {props.all_pass}",
    ]
    return EXIT_OK, report, lines


# --- built-in example reproductions ---


def example1_instance() -> ProblemInstance:
    """2x2 identity-weight counterexample: infimum exists, sufficient condition fails."""
    a = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=np.complex128)
    b = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
    return ProblemInstance(a, b, a.copy(), PsdWeight.identity(2), 2.0)


def example3_instance(a_param: float, p: float) -> tuple[ProblemInstance, np.ndarray]:
    """Rank-one frame counterexample: a global F_p minimum that fails the
    p = 2 normal equation for p != 2.  Returns the instance and the known
    minimizer."""
    if a_param <= 1 or p <= 1:
        raise InputError(f"example ex3 needs a > 1 and p > 1, got a={a_param}, p={p}")
    a = np.array([[1.0, 0.0], [-1.0, 0.0]], dtype=np.complex128)
    b = np.array(
        [[a_param**2, -1.0], [a_param**2, -1.0]], dtype=np.complex128
    )
    c = np.diag([1.0, a_param ** (2.0 / (p - 1.0))]).astype(np.complex128) @ np.diag(
        [-1.0, 1.0]
    ).astype(np.complex128)
    x0 = np.array([[1.0, -1.0], [0.0, 0.0]], dtype=np.complex128)
    return ProblemInstance(a, b, c, PsdWeight.identity(2), p), x0


def _run_checks(checks: list[tuple[str, bool, str]], lines: list[str]) -> bool:
    ok = True
    for name, passed, detail in checks:
        lines.append(f"  [{'ok' if passed else 'FAIL'}] {name}: {detail}")
        ok = ok and passed
    return ok


def cmd_examples(args) -> tuple[int, dict, list[str]]:
    tol = _base_tol(args)
    if args.which == "ex1":
        inst = example1_instance()
        order = operator_order_min(inst, tol)
        solved = schatten_min(inst, tol)
        inf_norm = float(
            np.linalg.norm(
                hermitian_part(inst.c.conj().T @ shorted_to_range_of_a(inst, tol) @ inst.c)
            )
        )
        x_entry = complex(solved.minimizer[0, 0])
        checks = [
            (
                "kernel condition fails",
                not order.conditions.kernel_condition,
                f"kernel residual {order.conditions.kernel_residual:.3e}",
            ),
            (
                "operator-order status is InfimumUnknown",
                order.status.value == "InfimumUnknown",
                order.status.value,
            ),
            (
                "p=2 minimum is 1",
                abs(solved.value - 1.0) <= 1e-8,
                f"direct value {solved.value:.12g}",
            ),
            (
                "p=2 minimizer has x = 0",
                abs(x_entry) <= 1e-10,
                f"x = {x_entry}",
            ),
            (
                "C* W_/R(A) C vanishes",
                inf_norm <= 1e-10,
                f"norm {inf_norm:.3e}",
            ),
            (
                "direct and formula values disagree and are flagged",
                (not solved.formula_agrees) and abs(solved.formula_value) <= 1e-8,
                f"direct {solved.value:.12g} vs formula {solved.formula_value:.12g}",
            ),
        ]
        lines = ["example ex1 (2x2, W = I):"]
        all_ok = _run_checks(checks, lines)
        report = {
            "command": "examples",
            "which": "ex1",
            "conditions": _conditions_dict(order.conditions),
            "order_status": order.status.value,
            "p2_min_value": solved.value,
            "p2_formula_value": solved.formula_value,
            "formula_agrees": solved.formula_agrees,
            "minimizer_x": [x_entry.real, x_entry.imag],
            "order_inf_norm": inf_norm,
            "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in checks],
            "all_ok": all_ok,
        }
    else:
        a_param, p = args.a, args.p if args.p is not None else 3.0
        inst, x0 = example3_instance(a_param, p)
        crit_norm = float(np.linalg.norm(critical_residual(inst, x0, tol)))
        p2_norm = float(np.linalg.norm(normal_residual_p2(inst, x0)))
        expected_p2 = abs(-(a_param**2) + a_param ** (2.0 / (p - 1.0))) * np.sqrt(2.0)
        fp_root = weighted_seminorm(inst.residual(x0), inst.w, p)
        expected_root = (1.0 + a_param ** (2.0 * p / (p - 1.0))) ** (1.0 / p)
        inst_p2, x0_p2 = example3_instance(a_param, 2.0)
        p2_at_two = float(np.linalg.norm(normal_residual_p2(inst_p2, x0_p2)))
        conditions = check_conditions(inst.a, inst.b, inst.c, inst.w, tol)
        checks = [
            (
                "kernel condition fails",
                not conditions.kernel_condition,
                f"kernel residual {conditions.kernel_residual:.3e}",
            ),
            (
                "critical residual vanishes at the known minimizer",
                crit_norm <= 1e-10,
                f"norm {crit_norm:.3e}",
            ),
            (
                "p2 normal residual matches |a^2 - a^(2/(p-1))| sqrt(2)",
                abs(p2_norm - expected_p2) <= 1e-8,
                f"norm {p2_norm:.12g}, expected {expected_p2:.12g}",
            ),
            (
                "p2 normal residual is nonzero iff p != 2",
                (p2_norm > 1e-6) if p != 2.0 else (p2_norm <= 1e-10),
                f"norm {p2_norm:.3e} at p = {p}",
            ),
            (
                "objective value at the minimizer matches (1 + a^(2p/(p-1)))^(1/p)",
                abs(fp_root - expected_root) <= 1e-8,
                f"value {fp_root:.12g}, expected {expected_root:.12g}",
            ),
            (
                "p2 normal residual vanishes at p = 2",
                p2_at_two <= 1e-10,
                f"norm {p2_at_two:.3e}",
            ),
        ]
        lines = [f"example ex3 (a = {a_param}, p = {p}):"]
        all_ok = _run_checks(checks, lines)
        report = {
            "command": "examples",
            "which": "ex3",
            "a": a_param,
            "p": p,
            "conditions": _conditions_dict(conditions),
            "critical_residual_norm": crit_norm,
            "normal_p2_norm": p2_norm,
            "normal_p2_expected": expected_p2,
            "fp_root": fp_root,
            "fp_root_expected": expected_root,
            "normal_p2_norm_at_p2": p2_at_two,
            "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in checks],
            "all_ok": all_ok,
        }
    exit_code = EXIT_OK if report["all_ok"] else EXIT_ASSERTION
    report["exit_code"] = exit_code
    lines.append("all checks pass" if report["all_ok"] else "SOME CHECKS FAILED")
    return exit_code, report, lines


def consistent_sampling_demo(
    dim: int,
    sampling_rank: int,
    recon_rank: int,
    rng: np.random.Generator,
    sampling_frame: np.ndarray | None = None,
    recon_frame: np.ndarray | None = None,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> dict:
    """Filter design for a sampling/reconstruction frame pair.

    Draws synthesis operators A (reconstruction, rank r) and B (sampling,
    rank k) with singular values in [0.5, 2], then solves

        min_X || A X B* - P_{R(A)} ||_2

    and reports the achieved objective, the brute-force cross-check, and the
    reconstruction error || f - A X B* f || for a signal inside R(A) and a
    generic one.
    """
    if not 0 <= sampling_rank <= dim or not 0 <= recon_rank <= dim:
        raise ValueError(
            f"ranks must lie in [0, dim]: dim={dim}, "
            f"sampling={sampling_rank}, reconstruction={recon_rank}"
        )
    a = recon_frame if recon_frame is not None else random_rank_matrix(rng, dim, recon_rank, recon_rank)
    frame_b = (
        sampling_frame
        if sampling_frame is not None
        else random_rank_matrix(rng, dim, sampling_rank, sampling_rank)
    )
    projector = range_basis(a, tol).projector
    inst = ProblemInstance(a, frame_b.conj().T, projector, PsdWeight.identity(dim), 2.0)
    result = schatten_min(inst, tol)
    x0 = result.minimizer
    filter_map = a @ x0 @ frame_b.conj().T
    oracle = brute_force_p2_oracle(inst, tol)
    f_in = (
        a @ complex_gaussian(rng, a.shape[1], 1)
        if a.shape[1]
        else np.zeros((dim, 1), dtype=np.complex128)
    )
    f_any = complex_gaussian(rng, dim, 1)
    return {
        "dim": dim,
        "sampling_rank": sampling_rank,
        "recon_rank": recon_rank,
        "objective_value": result.value,
        "oracle_value": oracle.value,
        "recon_error_in_range": float(np.linalg.norm(f_in - filter_map @ f_in)),
        "signal_norm_in_range": float(np.linalg.norm(f_in)),
        "recon_error_generic": float(np.linalg.norm(f_any - filter_map @ f_any)),
        "signal_norm_generic": float(np.linalg.norm(f_any)),
        "projector_distance": float(np.linalg.norm(filter_map - projector)),
    }


def cmd_sampling_demo(args) -> tuple[int, dict, list[str]]:
    tol = _base_tol(args)
    rng = np.random.default_rng(_seed(args))
    try:
        stats = consistent_sampling_demo(args.dim, args.sampling_rank, args.recon_rank, rng, tol=tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    report = {"command": "sampling-demo", **stats}
    lines = [
        f"dimension {args.dim}, sampling rank {args.sampling_rank}, "
        f"reconstruction rank {args.recon_rank}",
        f"filter objective ||A X B* - P||_2: {stats['objective_value']:.6g} "
        f"(oracle {stats['oracle_value']:.6g})",
        f"reconstruction error, signal in R(A): {stats['recon_error_in_range']:.3e} "
        f"(signal norm {stats['signal_norm_in_range']:.3g})",
        f"reconstruction error, generic signal: {stats['recon_error_generic']:.3e} "
        f"(signal norm {stats['signal_norm_generic']:.3g})",
    ]
    return EXIT_OK, report, lines


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def _base_tol(args) -> TolerancePolicy:
    return TolerancePolicy(
        rank_rel=getattr(args, "tol_rank", DEFAULT_TOL.rank_rel),
        residual_abs=getattr(args, "tol_residual", DEFAULT_TOL.residual_abs),
    )


def _seed(args) -> int:
    return getattr(args, "seed", 0)


def build_parser() -> argparse.ArgumentParser:
    # the shared flags use SUPPRESS defaults so they may appear either before
    # or after the subcommand without the subparser clobbering parsed values
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--tol-rank", type=float, default=argparse.SUPPRESS, help="relative rank cutoff"
    )
    common.add_argument(
        "--tol-residual",
        type=float,
        default=argparse.SUPPRESS,
        help="absolute residual tolerance",
    )
    common.add_argument(
        "--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized checks"
    )
    common.add_argument(
        "--json",
        action="store_true",
        default=argparse.SUPPRESS,
        help="print only the machine-readable JSON report",
    )

    parser = argparse.ArgumentParser(
        prog="axbmin",
        description="Weighted approximation of AXB by C: condition checks, "
        "operator-order and Schatten-norm solvers, shorted operators.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser(
        "check", parents=[common], help="evaluate existence conditions for an instance"
    )
    p_check.add_argument("path", help="instance JSON file")

    p_solve = sub.add_parser("solve", parents=[common], help="solve an instance")
    p_solve.add_argument("path", help="instance JSON file")
    p_solve.add_argument("--p", type=float, default=None, help="override the exponent p")
    mode = p_solve.add_mutually_exclusive_group()
    mode.add_argument("--order", action="store_true", help="operator-order minimization")
    mode.add_argument(
        "--schatten", action="store_true", help="Schatten-norm minimization (default)"
    )
    p_solve.add_argument(
        "--emit-manifold", action="store_true", help="include the solution manifold factors"
    )
    p_solve.add_argument(
        "--candidate",
        default=None,
        help="matrix JSON file with a candidate X to evaluate (residuals, descent check)",
    )

    p_short = sub.add_parser(
        "shorted", parents=[common], help="shorted operator of the instance weight"
    )
    p_short.add_argument("path", help="JSON file containing the weight W")
    p_short.add_argument(
        "--subspace", required=True, help="matrix JSON file whose columns span S"
    )
    p_short.add_argument("--trials", type=int, default=20, help="infimum witness trials")

    p_ex = sub.add_parser(
        "examples", parents=[common], help="reproduce the built-in counterexamples"
    )
    p_ex.add_argument("which", choices=["ex1", "ex3"])
    p_ex.add_argument("--a", type=float, default=2.0, help="parameter a > 1 for ex3")
    p_ex.add_argument("--p", type=float, default=None, help="exponent p > 1 for ex3")

    p_demo = sub.add_parser(
        "sampling-demo", parents=[common], help="consistent-sampling filter design demo"
    )
    p_demo.add_argument("--dim", type=int, required=True)
    p_demo.add_argument("--sampling-rank", type=int, required=True)
    p_demo.add_argument("--recon-rank", type=int, required=True)

    return parser


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "shorted": cmd_shorted,
    "examples": cmd_examples,
    "sampling-demo": cmd_sampling_demo,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        exit_code, report, lines = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    emit(lines, report, getattr(args, "json", False))
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
