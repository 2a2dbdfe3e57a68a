"""Command-line front end emitting JSON/CSV diagnostics and plot-ready data.

Every report embeds the full parameter set it ran with, output bytes are
deterministic for identical inputs, and all policy thresholds are surfaced
as flags. Exit codes: 0 success, 2 validation/schema error, 3 numeric
resolution error (aliasing, insufficient cutoff, quadrature degree).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from toepforms import __version__, closability, hankel, measures, toeplitz, weights
from toepforms.errors import (
    GridResolutionError,
    InsufficientCutoffError,
    InsufficientMomentsError,
    InvalidMeasureError,
    NotApplicableError,
    NumericalError,
    QuadratureDegreeError,
    ToepformsError,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOLUTION = 3

_RESOLUTION_ERRORS = (
    GridResolutionError,
    InsufficientCutoffError,
    InsufficientMomentsError,
    QuadratureDegreeError,
    NumericalError,
)


class CliError(Exception):
    """Validation failure raised by CLI plumbing itself."""


def _load_json_spec(spec, what):
    """Accept inline JSON (starts with '{' or '[') or a path to a JSON file."""
    text = spec.strip()
    if not text.startswith(("{", "[")):
        try:
            with open(spec, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise CliError(f"cannot read {what} file {spec!r}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON for {what}: {exc}") from exc


def _load_measure(spec):
    return measures.CircleMeasure.from_dict(_load_json_spec(spec, "measure"))


def _load_line_measure(spec):
    return hankel.LineMeasure.from_dict(_load_json_spec(spec, "line measure"))


def _parse_complex_list(data, what):
    if not isinstance(data, list):
        raise CliError(f"{what} must be a JSON array")
    out = []
    for item in data:
        if isinstance(item, (int, float)) and not isinstance(item, bool):
            out.append(complex(item))
        elif isinstance(item, list) and len(item) == 2:
            out.append(complex(float(item[0]), float(item[1])))
        else:
            raise CliError(f"{what} entries must be numbers or [re, im] pairs")
    return np.asarray(out, dtype=np.complex128)


def _load_vector(spec):
    return _parse_complex_list(_load_json_spec(spec, "vector"), "vector")


def _load_coeffs(args):
    """Coefficient input: either a measure (table to --n-max or the needed
    cutoff) or a raw one-sided list."""
    if getattr(args, "coeffs", None) and getattr(args, "measure", None):
        raise CliError("provide --measure or --coeffs, not both")
    if getattr(args, "coeffs", None):
        entries = _parse_complex_list(_load_json_spec(args.coeffs, "coeffs"), "coeffs")
        return measures.CoeffSequence(entries)
    if getattr(args, "measure", None):
        n_max = args.n_max if getattr(args, "n_max", None) is not None else None
        if n_max is None:
            raise CliError("--n-max is required when coefficients come from a measure")
        return measures.coefficient_table(_load_measure(args.measure), n_max,
                                          grid=args.grid)
    raise CliError("provide --measure or --coeffs")


def _probe_samples(spec, grid):
    """Probe function samples on the midpoint grid.

    Forms: 'const:VALUE', 'z:K' (e^{i K theta}), 'cos:K' (2 cos(K theta)),
    or a JSON array / file of samples.
    """
    thetas = measures.midpoint_nodes(grid)
    if spec.startswith("const:"):
        return np.full(grid, complex(spec[6:])), {"kind": spec}
    if spec.startswith("z:"):
        return np.exp(1j * int(spec[2:]) * thetas), {"kind": spec}
    if spec.startswith("cos:"):
        return 2.0 * np.cos(int(spec[4:]) * thetas).astype(np.complex128), {"kind": spec}
    samples = _parse_complex_list(_load_json_spec(spec, "samples"), "samples")
    return samples, {"kind": "samples", "count": int(samples.size)}


def _complex_pairs(values):
    return [[float(np.real(z)), float(np.imag(z))] for z in values]


def _pow2(value):
    number = int(value)
    if number < 8 or number & (number - 1):
        raise argparse.ArgumentTypeError(f"grid must be a power of two >= 8, got {value}")
    return number


def _emit(report, rows, args):
    if args.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        header, data = rows
        writer.writerow(header)
        writer.writerows(data)
        payload = buffer.getvalue()
    else:
        payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(payload)
    else:
        sys.stdout.write(payload)


def _kv_rows(result, prefix=""):
    rows = []
    if isinstance(result, dict):
        for key in sorted(result):
            rows.extend(_kv_rows(result[key], f"{prefix}{key}."))
    elif isinstance(result, list):
        for index, item in enumerate(result):
            rows.extend(_kv_rows(item, f"{prefix}{index}."))
    else:
        rows.append([prefix.rstrip("."), result])
    return rows


# ---------------------------------------------------------------------------
# command handlers: each returns (result_dict, (csv_header, csv_rows))


def _cmd_coeffs(args):
    measure = _load_measure(args.measure)
    table = measures.coefficient_table(measure, args.n_max, grid=args.grid)
    two_sided = table.two_sided()
    ns = list(range(-table.n_max, table.n_max + 1))
    result = {
        "n_max": table.n_max,
        "t": _complex_pairs(two_sided),
        "t0": table.t0,
    }
    rows = (["n", "re", "im"],
            [[n, float(z.real), float(z.imag)] for n, z in zip(ns, two_sided)])
    return result, rows


def _cmd_form(args):
    vector = _load_vector(args.vector)
    if args.coeffs is None and args.n_max is None:
        args.n_max = max(vector.size - 1, 0)
    coeffs = _load_coeffs(args)
    value = toeplitz.quadratic_form_direct(coeffs, vector)
    result = {"form": value, "norm_sq": float(np.real(np.vdot(vector, vector)))}
    return result, (["key", "value"], _kv_rows(result))


def _cmd_apply(args):
    vector = _load_vector(args.vector)
    if args.coeffs is None and args.n_max is None:
        args.n_max = max(vector.size - 1, args.out_len - 1)
    coeffs = _load_coeffs(args)
    image = toeplitz.toeplitz_apply(coeffs, vector, args.out_len,
                                    fft_size=args.fft_size)
    result = {"image": _complex_pairs(image)}
    rows = (["n", "re", "im"],
            [[n, float(z.real), float(z.imag)] for n, z in enumerate(image)])
    return result, rows


def _cmd_spectrum(args):
    orders = sorted({int(n) for n in args.sections.split(",")})
    if not orders or orders[0] < 1:
        raise CliError("--sections needs positive integers")
    if args.coeffs is None and args.n_max is None:
        args.n_max = orders[-1] - 1
    coeffs = _load_coeffs(args)
    sweep = [[order, toeplitz.section_min_eig(coeffs, order)] for order in orders]
    result = {"sweep": [{"order": n, "min_eig": v} for n, v in sweep]}
    return result, (["order", "min_eig"], sweep)


def _cmd_psd(args):
    if args.coeffs is None and args.n_max is None:
        args.n_max = args.order - 1
    coeffs = _load_coeffs(args)
    report = toeplitz.psd_check(coeffs, args.order, pivot_rtol=args.pivot_rtol)
    result = report.to_dict()
    return result, (["key", "value"], _kv_rows(result))


def _cmd_classify(args):
    measure = _load_measure(args.measure)
    verdict = closability.classify_measure(measure)
    result = verdict.to_dict()
    if args.echo_measure:
        result["measure"] = measure.to_dict()
    return result, (["key", "value"], _kv_rows(result))


def _cmd_decay(args):
    coeffs = _load_coeffs(args)
    tail_start = args.tail_start if args.tail_start is not None else max(
        1, coeffs.n_max // 4)
    verdict = closability.decay_diagnostics(
        coeffs, tail_start,
        nondecay_fraction=args.nondecay_fraction,
        l2_tail_ratio=args.l2_tail_ratio,
    )
    result = verdict.to_dict()
    return result, (["key", "value"], _kv_rows(result))


def _cmd_witness(args):
    measure = _load_measure(args.measure)
    report = closability.nonclosability_witness(measure, args.k, args.l,
                                                grid=args.grid)
    result = report.to_dict()
    return result, (["key", "value"], _kv_rows(result))


def _cmd_adjoint(args):
    measure = _load_measure(args.measure)
    samples, probe = _probe_samples(args.u, args.u_grid)
    report = closability.adjoint_coefficients(samples, measure, args.n_max,
                                              grid=args.grid,
                                              dstar_ratio=args.dstar_ratio)
    result = report.to_dict()
    result["u"] = probe
    rows = (["n", "re", "im"],
            [[n, float(z.real), float(z.imag)] for n, z in enumerate(report.entries)])
    return result, rows


def _require_density(measure, command):
    if not measure.is_singular_free:
        raise CliError(f"{command} works on the density part only; "
                       "remove atoms/cantor from the measure")
    if measure.ac is None:
        raise CliError(f"{command} needs a measure with a density part")
    return measure.ac


def _cmd_closure(args):
    density = _require_density(_load_measure(args.measure), "closure")
    vector = _load_vector(args.vector)
    ladder = weights.radial_ladder(density, vector, depth=args.depth,
                                   grid=args.grid)
    increments = [b[1] - a[1] for a, b in zip(ladder, ladder[1:])]
    result = {
        "ladder": [{"r": r, "value": v} for r, v in ladder],
        "value_at_1": ladder[-1][1],
        "final_increment": increments[-1] if increments else 0.0,
    }
    return result, (["r", "value"], [[r, v] for r, v in ladder])


def _cmd_laurent(args):
    density = _require_density(_load_measure(args.measure), "laurent")
    vector = _load_vector(args.vector)
    value = weights.laurent_form_eval(density, vector, offset=args.offset,
                                      grid=args.grid)
    result = {"form": value, "offset": args.offset}
    return result, (["key", "value"], _kv_rows(result))


def _cmd_muckenhoupt(args):
    density = _require_density(_load_measure(args.measure), "muckenhoupt")
    report = weights.muckenhoupt_estimate(
        density, args.levels, grid=args.grid,
        stabilize_rtol=args.stabilize_rtol,
        diverge_ratio=args.diverge_ratio,
        diverge_span=args.diverge_span,
    )
    result = report.to_dict()
    rows = (["level", "estimate"],
            [[lvl, est] for lvl, est in zip(report.levels, report.estimates)])
    return result, rows


def _cmd_project(args):
    grid = args.grid if args.grid is not None else measures.default_grid()
    samples, probe = _probe_samples(args.f, grid)
    projection = weights.riesz_project(samples)
    result = {
        "f": probe,
        "grid": int(samples.size),
        "ratio_unweighted": projection.weighted_ratio(np.ones(samples.size)),
        "projected": _complex_pairs(projection.values),
    }
    if args.measure:
        density = _require_density(_load_measure(args.measure), "project --measure")
        result["ratio_weighted"] = projection.weighted_ratio(
            weights.weight_samples(density, samples.size))
    thetas = measures.midpoint_nodes(samples.size)
    rows = (["theta", "re", "im"],
            [[float(t), float(z.real), float(z.imag)]
             for t, z in zip(thetas, projection.values)])
    return result, rows


def _cmd_hankel_moments(args):
    measure = _load_line_measure(args.line_measure)
    seq = hankel.power_moments(measure, args.n_max,
                               nodes_per_cell=args.nodes_per_cell)
    result = {"q": [float(v) for v in seq.values], "n_max": seq.n_max}
    rows = (["n", "q"], [[n, float(v)] for n, v in enumerate(seq.values)])
    return result, rows


def _cmd_hankel_form(args):
    vector = _load_vector(args.vector)
    if args.moments:
        raw = _load_json_spec(args.moments, "moments")
        seq = hankel.MomentSequence(np.asarray(raw, dtype=np.float64))
    else:
        if not args.line_measure:
            raise CliError("provide --line-measure or --moments")
        n_max = args.n_max if args.n_max is not None else 2 * max(vector.size - 1, 0)
        seq = hankel.power_moments(_load_line_measure(args.line_measure), n_max)
    value = hankel.hankel_form(seq, vector)
    result = {"form": value}
    return result, (["key", "value"], _kv_rows(result))


def _cmd_hankel_classify(args):
    measure = _load_line_measure(args.line_measure)
    verdict = hankel.hankel_classify(measure, args.n_max,
                                     endpoint_atol=args.endpoint_atol)
    result = verdict.to_dict()
    return result, (["key", "value"], _kv_rows(result))


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(parser, *, grid=True):
    parser.add_argument("--format", choices=("json", "csv"), default="json",
                        help="report format (default json)")
    parser.add_argument("--output", help="write the report here instead of stdout")
    if grid:
        parser.add_argument("--grid", type=_pow2, default=None,
                            help="quadrature grid size (power of two; default "
                                 f"$TOEPFORMS_GRID or {measures.DEFAULT_GRID})")


def _add_coeff_source(parser):
    parser.add_argument("--measure", help="measure JSON (inline or file path)")
    parser.add_argument("--coeffs",
                        help="raw one-sided coefficients t_0.. as JSON "
                             "(numbers or [re, im] pairs)")
    parser.add_argument("--n-max", type=int, default=None,
                        help="coefficient cutoff when --measure is used")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="toepforms",
        description="Toeplitz quadratic forms: moments, spectra, closability, "
                    "weighted closures, and the Hankel companion.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="Fourier coefficients of a measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--n-max", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_coeffs)

    p = sub.add_parser("form", help="quadratic form value t[g, g]")
    _add_coeff_source(p)
    p.add_argument("--vector", required=True, help="vector g as JSON")
    _add_common(p)
    p.set_defaults(handler=_cmd_form)

    p = sub.add_parser("apply", help="Toeplitz operator application (T g)")
    _add_coeff_source(p)
    p.add_argument("--vector", required=True)
    p.add_argument("--out-len", type=int, required=True)
    p.add_argument("--fft-size", type=int, default=None,
                   help="explicit circulant embedding size")
    _add_common(p)
    p.set_defaults(handler=_cmd_apply)

    p = sub.add_parser("spectrum", help="minimal-eigenvalue sweep over N")
    _add_coeff_source(p)
    p.add_argument("--sections", required=True,
                   help="comma-separated section orders, e.g. 16,64,256")
    _add_common(p)
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("psd", help="tolerant Cholesky positivity check")
    _add_coeff_source(p)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--pivot-rtol", type=float, default=toeplitz.PSD_PIVOT_RTOL,
                   help=f"pivot tolerance scale (default {toeplitz.PSD_PIVOT_RTOL})")
    _add_common(p)
    p.set_defaults(handler=_cmd_psd)

    p = sub.add_parser("classify", help="closability from the measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--echo-measure", action="store_true",
                   help="embed the canonical measure JSON in the report")
    _add_common(p, grid=False)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("decay", help="coefficient decay diagnostics")
    _add_coeff_source(p)
    p.add_argument("--tail-start", type=int, default=None,
                   help="first tail index (default cutoff // 4)")
    p.add_argument("--nondecay-fraction", type=float,
                   default=closability.NONDECAY_FRACTION)
    p.add_argument("--l2-tail-ratio", type=float,
                   default=closability.L2_TAIL_RATIO)
    _add_common(p)
    p.set_defaults(handler=_cmd_decay)

    p = sub.add_parser("witness", help="non-closability witness report")
    p.add_argument("--measure", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_witness)

    p = sub.add_parser("adjoint", help="adjoint-operator coefficients of u")
    p.add_argument("--measure", required=True)
    p.add_argument("--u", required=True,
                   help="probe: 'const:c', 'z:k', 'cos:k', or JSON samples")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--u-grid", type=_pow2, default=measures.DEFAULT_GRID,
                   help="sample count for built-in probes")
    p.add_argument("--dstar-ratio", type=float,
                   default=closability.DSTAR_TAIL_RATIO)
    _add_common(p)
    p.set_defaults(handler=_cmd_adjoint)

    p = sub.add_parser("closure", help="closed form along a radial ladder")
    p.add_argument("--measure", required=True,
                   help="measure with a density part only")
    p.add_argument("--vector", required=True)
    p.add_argument("--depth", type=int, default=8,
                   help="ladder depth: r_j = 1 - 2^-j, j = 1..depth")
    _add_common(p)
    p.set_defaults(handler=_cmd_closure)

    p = sub.add_parser("laurent", help="bilateral multiplication form")
    p.add_argument("--measure", required=True)
    p.add_argument("--vector", required=True)
    p.add_argument("--offset", type=int, default=0,
                   help="index of the first vector entry")
    _add_common(p)
    p.set_defaults(handler=_cmd_laurent)

    p = sub.add_parser("muckenhoupt", help="dyadic A2 estimates")
    p.add_argument("--measure", required=True)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--stabilize-rtol", type=float,
                   default=weights.A2_STABILIZE_RTOL)
    p.add_argument("--diverge-ratio", type=float,
                   default=weights.A2_DIVERGE_RATIO)
    p.add_argument("--diverge-span", type=int, default=weights.A2_DIVERGE_SPAN)
    _add_common(p)
    p.set_defaults(handler=_cmd_muckenhoupt)

    p = sub.add_parser("project", help="analytic (Riesz) projection of samples")
    p.add_argument("--f", required=True,
                   help="probe: 'const:c', 'z:k', 'cos:k', or JSON samples")
    p.add_argument("--measure", default=None,
                   help="optional weight measure (density part) for the ratio")
    _add_common(p)
    p.set_defaults(handler=_cmd_project)

    p = sub.add_parser("hankel-moments", help="power moments of a line measure")
    p.add_argument("--line-measure", required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--nodes-per-cell", type=int, default=None,
                   help="Gauss nodes per density cell (default: exactness)")
    _add_common(p, grid=False)
    p.set_defaults(handler=_cmd_hankel_moments)

    p = sub.add_parser("hankel-form", help="Hankel form value q[g, g]")
    p.add_argument("--line-measure", default=None)
    p.add_argument("--moments", default=None, help="raw moments as JSON")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--vector", required=True)
    _add_common(p, grid=False)
    p.set_defaults(handler=_cmd_hankel_form)

    p = sub.add_parser("hankel-classify", help="Hankel closability criterion")
    p.add_argument("--line-measure", required=True)
    p.add_argument("--n-max", type=int, default=hankel.CLASSIFY_N_MAX)
    p.add_argument("--endpoint-atol", type=float, default=hankel.ENDPOINT_ATOL)
    _add_common(p, grid=False)
    p.set_defaults(handler=_cmd_hankel_classify)

    return parser


def _params_dict(args):
    skip = {"handler", "command", "format", "output"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        out[key] = value
    out.setdefault("default_grid", measures.default_grid())
    return out


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result, rows = args.handler(args)
        report = {
            "command": args.command,
            "params": _params_dict(args),
            "result": result,
        }
        _emit(report, rows, args)
    except (CliError, InvalidMeasureError, NotApplicableError, ValueError,
            OSError) as exc:
        print(f"toepforms: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except _RESOLUTION_ERRORS as exc:
        print(f"toepforms: resolution error: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except ToepformsError as exc:
        print(f"toepforms: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
