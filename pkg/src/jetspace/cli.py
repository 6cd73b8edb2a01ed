"""Batch command-line front end.

One invocation maps to one library operation: load the input files, run
the computation, print a report.  The default report is a few
human-readable lines; --json switches to a machine-readable object with
sorted keys, so re-serializing a parsed report reproduces it byte for
byte.  All numbers are exact: rationals render as fraction strings,
minus infinity as "-inf", an empty locus as "empty".

Exit codes: 0 success, 2 bad input (files, flags, preconditions), 3
resource budget exhausted, 4 internal invariant violated.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from .contact import (
    AT_LEAST,
    EXACTLY,
    ContactSpec,
    change_of_variable_probe,
    constructible_dimension,
    contact_locus,
    cylinder_codim,
)
from .errors import (
    BudgetExceededError,
    InternalInvariantError,
    ValidationError,
)
from .groebner import (
    DEFAULT_PAIR_BUDGET,
    EMPTY,
    IdealPresentation,
    krull_dimension,
)
from .jets import jet_ideal
from .lifting import in_image, liftable, series_vector
from .mldjets import (
    PairSpec,
    SearchBounds,
    SmoothSpace,
    ioa_check,
    lc_check,
    mld_jet_estimate,
)
from .mldres import (
    DEFAULT_NU_MAX,
    NEG_INF,
    log_discrepancies,
    mld_from_divisors,
    mld_via_contact,
    resolution_from_json,
)
from .polynomials import (
    Polynomial,
    VariableUniverse,
    parse_polynomial,
    polynomial_to_string,
)
from .singular import EmbeddedVariety, jacobian_ideal


# -- file loading ----------------------------------------------------------------


def _read_json(path: str) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc


def _as_object(doc: Any, where: str) -> dict:
    if not isinstance(doc, dict):
        raise ValidationError(f"{where}: expected a JSON object")
    return doc


def _string_list(doc: dict, key: str, where: str) -> list[str]:
    value = doc.get(key)
    if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
        raise ValidationError(f"{where}: {key!r} must be a list of strings")
    return value


def _parse_gens(
    texts: Sequence[str], universe: VariableUniverse, where: str
) -> list[Polynomial]:
    gens = []
    for i, text in enumerate(texts):
        try:
            gens.append(parse_polynomial(text, universe))
        except ValidationError as exc:
            raise ValidationError(f"{where}: gens[{i}]: {exc}") from exc
    return gens


def _fraction(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValidationError(f"{where}: rationals must be integers or 'a/b' strings")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"{where}: bad rational {value!r}") from exc
    raise ValidationError(f"{where}: rationals must be integers or 'a/b' strings")


def _ideal_from_file(path: str) -> tuple[IdealPresentation, int | None]:
    doc = _as_object(_read_json(path), path)
    names = _string_list(doc, "vars", path)
    universe = VariableUniverse.of(*names)
    gens = _parse_gens(_string_list(doc, "gens", path), universe, path)
    expected = doc.get("expected_dim")
    if expected is not None and not isinstance(expected, int):
        raise ValidationError(f"{path}: expected_dim must be an integer")
    return IdealPresentation.of(universe, gens), expected


def _variety_from_file(path: str, max_pairs: int) -> EmbeddedVariety:
    presentation, expected = _ideal_from_file(path)
    if expected is None:
        dim = krull_dimension(presentation, max_pairs=max_pairs)
        if dim is EMPTY:
            raise ValidationError(f"{path}: the ideal cuts out the empty set")
        expected = dim
    return EmbeddedVariety(presentation, expected)


def _jet_from_file(path: str, universe: VariableUniverse):
    doc = _as_object(_read_json(path), path)
    rows = doc.get("jet")
    if not isinstance(rows, list) or not rows:
        raise ValidationError(f"{path}: 'jet' must be a nonempty list of rows")
    if len(rows) != len(universe):
        raise ValidationError(
            f"{path}: the jet has {len(rows)} coordinate rows for "
            f"{len(universe)} variables"
        )
    truncation = doc.get("truncation")
    if not isinstance(truncation, int) or truncation < 1:
        raise ValidationError(f"{path}: 'truncation' must be a positive integer")
    entries = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise ValidationError(f"{path}: jet[{i}] must be a list")
        if len(row) > truncation:
            raise ValidationError(
                f"{path}: jet[{i}] carries {len(row)} coefficients beyond "
                f"truncation order {truncation}"
            )
        entries.append([_fraction(c, f"{path}: jet[{i}]") for c in row])
    return series_vector(entries, truncation)


def _bounds_from_doc(doc: dict, where: str) -> SearchBounds:
    block = _as_object(doc.get("bounds"), f"{where}: bounds")
    w_max = block.get("w_max")
    if not isinstance(w_max, list) or not all(isinstance(c, int) for c in w_max):
        raise ValidationError(f"{where}: bounds.w_max must be a list of integers")
    m_max = block.get("m_max")
    if not isinstance(m_max, int):
        raise ValidationError(f"{where}: bounds.m_max must be an integer")
    e_max = block.get("e_max", 0)
    eprime_max = block.get("eprime_max", 0)
    if not isinstance(e_max, int) or not isinstance(eprime_max, int):
        raise ValidationError(f"{where}: bounds caps must be integers")
    return SearchBounds(tuple(w_max), m_max, e_max, eprime_max)


def _pair_from_file(path: str) -> tuple[PairSpec, SearchBounds]:
    doc = _as_object(_read_json(path), path)
    block = _as_object(doc.get("ambient"), f"{path}: ambient")
    names = _string_list(block, "vars", f"{path}: ambient")
    universe = VariableUniverse.of(*names)
    gens = _parse_gens(
        _string_list(block, "gens", f"{path}: ambient"), universe, f"{path}: ambient"
    )
    ambient: EmbeddedVariety | SmoothSpace
    if gens:
        expected = block.get("expected_dim")
        if not isinstance(expected, int):
            raise ValidationError(
                f"{path}: ambient.expected_dim is required for an embedded ambient"
            )
        ambient = EmbeddedVariety(IdealPresentation.of(universe, gens), expected)
    else:
        ambient = SmoothSpace(universe)
    components = doc.get("Y", [])
    if not isinstance(components, list):
        raise ValidationError(f"{path}: 'Y' must be a list")
    boundary = []
    for i, entry in enumerate(components):
        entry = _as_object(entry, f"{path}: Y[{i}]")
        sub_gens = _parse_gens(
            _string_list(entry, "gens", f"{path}: Y[{i}]"),
            universe,
            f"{path}: Y[{i}]",
        )
        weight = _fraction(entry.get("q"), f"{path}: Y[{i}].q")
        boundary.append((IdealPresentation.of(universe, sub_gens), weight))
    center_block = _as_object(doc.get("W"), f"{path}: W")
    center_gens = _parse_gens(
        _string_list(center_block, "gens", f"{path}: W"), universe, f"{path}: W"
    )
    non_lci = None
    if "jr" in doc:
        jr_block = _as_object(doc.get("jr"), f"{path}: jr")
        jr_gens = _parse_gens(
            _string_list(jr_block, "gens", f"{path}: jr"), universe, f"{path}: jr"
        )
        non_lci = IdealPresentation.of(universe, jr_gens)
    index_r = doc.get("r", 1)
    if not isinstance(index_r, int):
        raise ValidationError(f"{path}: 'r' must be an integer")
    pair = PairSpec(
        ambient,
        tuple(boundary),
        IdealPresentation.of(universe, center_gens),
        non_lci,
        index_r,
    )
    return pair, _bounds_from_doc(doc, path)


def _apply_overrides(
    pair: PairSpec, bounds: SearchBounds, args: argparse.Namespace
) -> tuple[PairSpec, SearchBounds]:
    if args.q:
        if len(args.q) != len(pair.boundary):
            raise ValidationError(
                f"--q given {len(args.q)} times for {len(pair.boundary)} "
                "boundary components"
            )
        reweighted = tuple(
            (sub, _fraction(q, "--q"))
            for (sub, _), q in zip(pair.boundary, args.q)
        )
        pair = dataclasses.replace(pair, boundary=reweighted)
    if args.w:
        if len(args.w) != len(pair.boundary):
            raise ValidationError(
                f"--w given {len(args.w)} times for {len(pair.boundary)} "
                "boundary components"
            )
        bounds = dataclasses.replace(bounds, w_max=tuple(args.w))
    if args.m is not None:
        bounds = dataclasses.replace(bounds, m_max=args.m)
    return pair, bounds


# -- report plumbing -------------------------------------------------------------


def _scalar(value: Any) -> Any:
    if value is NEG_INF:
        return "-inf"
    if value is EMPTY:
        return "empty"
    if isinstance(value, Fraction):
        return str(value)
    return value


def _cell(witness: tuple[tuple[int, ...], int, int, int]) -> dict:
    w, e, eprime, m = witness
    return {"w": list(w), "e": e, "eprime": eprime, "m": m}


def _estimate_report(est) -> dict:
    return {
        "value": _scalar(est.value),
        "witness": _cell(est.witness),
        "upper_bound_only": est.upper_bound_only,
        "cells_scanned": est.cells_scanned,
    }


# -- commands --------------------------------------------------------------------


def _cmd_jet_eqs(args) -> tuple[dict, list[str]]:
    presentation, _ = _ideal_from_file(args.ideal)
    jets = jet_ideal(presentation, args.m)
    texts = [polynomial_to_string(g) for g in jets.generators]
    report = {"command": "jet-eqs", "level": args.m, "generators": texts}
    return report, texts


def _cmd_jet_dim(args) -> tuple[dict, list[str]]:
    presentation, _ = _ideal_from_file(args.ideal)
    dim = krull_dimension(jet_ideal(presentation, args.m), max_pairs=args.max_pairs)
    report = {"command": "jet-dim", "level": args.m, "dimension": _scalar(dim)}
    return report, [f"dimension of the level-{args.m} jet scheme: {_scalar(dim)}"]


def _cmd_jacobian(args) -> tuple[dict, list[str]]:
    variety = _variety_from_file(args.ideal, args.max_pairs)
    jac = jacobian_ideal(variety)
    texts = [polynomial_to_string(g) for g in jac.generators]
    report = {
        "command": "jacobian",
        "expected_dim": variety.expected_dim,
        "generators": texts,
    }
    return report, texts


def _cmd_contact_dim(args) -> tuple[dict, list[str]]:
    presentation, _ = _ideal_from_file(args.ideal)
    mode = EXACTLY if args.exact else AT_LEAST
    spec = ContactSpec(presentation, args.order, mode, args.m)
    dim = constructible_dimension(contact_locus(spec), max_pairs=args.max_pairs)
    report = {
        "command": "contact-dim",
        "mode": mode,
        "order": args.order,
        "level": args.m,
        "dimension": _scalar(dim),
    }
    line = (
        f"contact order {mode} {args.order} at level {args.m}: "
        f"dimension {_scalar(dim)}"
    )
    return report, [line]


def _cmd_cylinder_codim(args) -> tuple[dict, list[str]]:
    variety = _variety_from_file(args.ideal, args.max_pairs)
    codim = cylinder_codim(
        variety, args.jac_order, args.m, max_pairs=args.max_pairs
    )
    report = {
        "command": "cylinder-codim",
        "jac_order": args.jac_order,
        "level": args.m,
        "codim": codim,
    }
    return report, [f"{codim}"]


def _cmd_lift(args) -> tuple[dict, list[str]]:
    presentation, _ = _ideal_from_file(args.ideal)
    if not presentation.generators:
        raise ValidationError(f"{args.ideal}: lifting needs at least one equation")
    jet = _jet_from_file(args.data, presentation.universe)
    ok = liftable(presentation.generators, jet, args.m, args.jac_order)
    report = {
        "command": "lift",
        "level": args.m,
        "jac_order": args.jac_order,
        "liftable": ok,
    }
    return report, ["liftable" if ok else "not liftable"]


def _cmd_in_image(args) -> tuple[dict, list[str]]:
    presentation, _ = _ideal_from_file(args.ideal)
    if not presentation.generators:
        raise ValidationError(f"{args.ideal}: at least one equation is required")
    jet = _jet_from_file(args.data, presentation.universe)
    ok = in_image(presentation.generators, jet, args.m, args.p, args.jac_order)
    report = {
        "command": "in-image",
        "level": args.m,
        "p": args.p,
        "jac_order": args.jac_order,
        "in_image": ok,
    }
    return report, ["in the image" if ok else "not in the image"]


def _mld_witness(data) -> str:
    table = log_discrepancies(data)
    values = dict(table)
    negatives = [
        d.name for d in data.divisors if d.meets_w and values[d.name] < 0
    ]
    if negatives:
        return negatives[0]
    candidates = [(values[d.name], d.name) for d in data.divisors if d.in_w]
    return min(candidates)[1]


def _cmd_mld_res(args) -> tuple[dict, list[str]]:
    try:
        text = Path(args.data).read_text()
    except OSError as exc:
        raise ValidationError(f"{args.data}: {exc.strerror or exc}") from exc
    try:
        data = resolution_from_json(text)
    except ValidationError as exc:
        raise ValidationError(f"{args.data}: {exc}") from exc
    if args.q:
        if len(args.q) != len(data.weights):
            raise ValidationError(
                f"--q given {len(args.q)} times for {len(data.weights)} weights"
            )
        data = dataclasses.replace(
            data, weights=tuple(_fraction(q, "--q") for q in args.q)
        )
    direct = mld_from_divisors(data)
    contact = mld_via_contact(data, nu_max=args.nu_max)
    witness = _mld_witness(data)
    report = {
        "command": "mld-res",
        "direct": _scalar(direct),
        "via_contact": _scalar(contact),
        "agree": direct == contact,
        "witness": witness,
        "log_discrepancies": {
            name: _scalar(a) for name, a in log_discrepancies(data)
        },
    }
    lines = [
        f"mld = {_scalar(direct)} (witness divisor {witness})",
        f"contact route: {_scalar(contact)}"
        + ("; both routes agree" if direct == contact else "; ROUTES DISAGREE"),
    ]
    return report, lines


def _cmd_mld_jets(args) -> tuple[dict, list[str]]:
    pair, bounds = _apply_overrides(*_pair_from_file(args.pair), args)
    est = mld_jet_estimate(pair, bounds, max_pairs=args.max_pairs)
    report = {"command": "mld-jets", **_estimate_report(est)}
    w, e, eprime, m = est.witness
    lines = [
        f"mld estimate: {_scalar(est.value)}",
        f"witness cell: w={list(w)} e={e} e'={eprime} m={m}",
    ]
    if est.upper_bound_only:
        lines.append("minimizer touches the search boundary: upper bound only")
    return report, lines


def _cmd_lc_check(args) -> tuple[dict, list[str]]:
    pair, bounds = _apply_overrides(*_pair_from_file(args.pair), args)
    result = lc_check(pair, bounds, max_pairs=args.max_pairs)
    certificate = None
    if result.certificate is not None:
        w, ell = result.certificate
        certificate = {"w": list(w), "ell": ell}
    report = {
        "command": "lc-check",
        "log_canonical": result.log_canonical,
        "certificate": certificate,
    }
    if result.log_canonical:
        lines = ["log canonical within the scanned bounds"]
    else:
        lines = [f"not log canonical: violated at {certificate}"]
    return report, lines


def _cmd_ioa_check(args) -> tuple[dict, list[str]]:
    pair, bounds = _pair_from_file(args.pair)
    if isinstance(pair.ambient, SmoothSpace):
        raise ValidationError(
            f"{args.pair}: the adjunction check needs an embedded ambient variety"
        )
    report_obj = ioa_check(
        len(pair.universe),
        pair.ambient,
        pair.boundary,
        pair.center,
        bounds,
        non_lci=pair.non_lci,
        max_pairs=args.max_pairs,
    )
    report = {
        "command": "ioa-check",
        "left": _estimate_report(report_obj.left),
        "right": _estimate_report(report_obj.right),
        "agree": report_obj.agree,
    }
    lines = [
        f"variety side:  {_scalar(report_obj.left.value)}",
        f"ambient side:  {_scalar(report_obj.right.value)}",
        "the two sides agree" if report_obj.agree else "THE SIDES DISAGREE",
    ]
    return report, lines


def _cmd_cov_probe(args) -> tuple[dict, list[str]]:
    doc = _as_object(_read_json(args.data), args.data)
    source = VariableUniverse.of(*_string_list(doc, "source_vars", args.data))
    target = VariableUniverse.of(*_string_list(doc, "target_vars", args.data))
    map_polys = _parse_gens(
        _string_list(doc, "map", args.data), source, f"{args.data}: map"
    )
    level = args.m if args.m is not None else doc.get("level")
    if not isinstance(level, int):
        raise ValidationError(f"{args.data}: 'level' must be an integer")
    e_max = args.jac_order if args.jac_order is not None else doc.get("e_max")
    if not isinstance(e_max, int):
        raise ValidationError(f"{args.data}: 'e_max' must be an integer")
    raw_conditions = doc.get("conditions")
    if not isinstance(raw_conditions, list) or not raw_conditions:
        raise ValidationError(f"{args.data}: 'conditions' must be a nonempty list")
    conditions = []
    for i, entry in enumerate(raw_conditions):
        entry = _as_object(entry, f"{args.data}: conditions[{i}]")
        gens = _parse_gens(
            _string_list(entry, "gens", f"{args.data}: conditions[{i}]"),
            target,
            f"{args.data}: conditions[{i}]",
        )
        order = entry.get("order")
        if not isinstance(order, int):
            raise ValidationError(
                f"{args.data}: conditions[{i}].order must be an integer"
            )
        mode = entry.get("mode", AT_LEAST)
        if mode not in (AT_LEAST, EXACTLY):
            raise ValidationError(
                f"{args.data}: conditions[{i}].mode must be "
                f"'{AT_LEAST}' or '{EXACTLY}'"
            )
        conditions.append(
            ContactSpec(IdealPresentation.of(target, gens), order, mode, level)
        )
    probe = change_of_variable_probe(
        map_polys, conditions, e_max, level, max_pairs=args.max_pairs
    )
    report = {
        "command": "cov-probe",
        "direct_codim": _scalar(probe.direct_codim),
        "transformed_codim": _scalar(probe.transformed_codim),
        "attained_at": probe.attained_at,
        "agree": probe.agree,
        "by_order": [[e, c] for e, c in probe.by_order],
    }
    lines = [
        f"direct codim:      {probe.direct_codim}",
        f"transformed codim: {probe.transformed_codim} "
        f"(attained at order {probe.attained_at})",
        "routes agree" if probe.agree else "ROUTES DISAGREE",
    ]
    return report, lines


# -- argument parsing and dispatch -----------------------------------------------


_HANDLERS: dict[str, Callable[[argparse.Namespace], tuple[dict, list[str]]]] = {
    "jet-eqs": _cmd_jet_eqs,
    "jet-dim": _cmd_jet_dim,
    "jacobian": _cmd_jacobian,
    "contact-dim": _cmd_contact_dim,
    "cylinder-codim": _cmd_cylinder_codim,
    "lift": _cmd_lift,
    "in-image": _cmd_in_image,
    "mld-res": _cmd_mld_res,
    "mld-jets": _cmd_mld_jets,
    "lc-check": _cmd_lc_check,
    "ioa-check": _cmd_ioa_check,
    "cov-probe": _cmd_cov_probe,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument(
        "--max-pairs",
        type=int,
        default=DEFAULT_PAIR_BUDGET,
        help="Gröbner S-pair budget (default %(default)s)",
    )
    common.add_argument(
        "--seed",
        type=int,
        default=0,
        help="seed for randomized subroutines (reserved; every current "
        "command is deterministic)",
    )

    parser = argparse.ArgumentParser(
        prog="jetspace",
        description="Exact computations on jet spaces, contact loci, and "
        "minimal log discrepancies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    p = command("jet-eqs", "print the defining equations of a jet scheme")
    p.add_argument("--ideal", required=True, help="ideal file (JSON)")
    p.add_argument("--m", type=int, required=True, help="jet level")

    p = command("jet-dim", "dimension of a jet scheme")
    p.add_argument("--ideal", required=True)
    p.add_argument("--m", type=int, required=True)

    p = command("jacobian", "generators of the Jacobian ideal")
    p.add_argument("--ideal", required=True)

    p = command("contact-dim", "dimension of a contact locus at one level")
    p.add_argument("--ideal", required=True)
    p.add_argument("--order", type=int, required=True, help="contact order")
    p.add_argument("--m", type=int, required=True, help="jet level")
    p.add_argument(
        "--exact",
        action="store_true",
        help="require order exactly rather than at least",
    )

    p = command("cylinder-codim", "stable codimension of a Jacobian stratum")
    p.add_argument("--ideal", required=True)
    p.add_argument("--jac-order", type=int, required=True)
    p.add_argument("--m", type=int, required=True, help="level hint")

    p = command("lift", "test whether a jet lifts to all higher levels")
    p.add_argument("--ideal", required=True)
    p.add_argument("--data", required=True, help="jet coefficients (JSON)")
    p.add_argument("--m", type=int, required=True, help="jet level")
    p.add_argument("--jac-order", type=int, required=True)

    p = command("in-image", "test whether a p-jet extends to level m")
    p.add_argument("--ideal", required=True)
    p.add_argument("--data", required=True, help="jet coefficients (JSON)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--jac-order", type=int, required=True)

    p = command("mld-res", "minimal log discrepancy from resolution data")
    p.add_argument("--data", required=True, help="resolution data file (JSON)")
    p.add_argument("--q", action="append", help="override weights (repeatable)")
    p.add_argument(
        "--nu-max",
        type=int,
        default=DEFAULT_NU_MAX,
        help="multiplicity-ball radius (default %(default)s)",
    )

    for name, help_text in (
        ("mld-jets", "jet-side minimal log discrepancy scan"),
        ("lc-check", "log-canonicity inequality scan"),
    ):
        p = command(name, help_text)
        p.add_argument("--pair", required=True, help="pair file (JSON)")
        p.add_argument("--q", action="append", help="override weights (repeatable)")
        p.add_argument(
            "--w", action="append", type=int, help="override w_max (repeatable)"
        )
        p.add_argument("--m", type=int, help="override m_max")

    p = command("ioa-check", "inversion-of-adjunction comparison")
    p.add_argument("--pair", required=True, help="pair file (JSON)")

    p = command("cov-probe", "change-of-variable codimension probe")
    p.add_argument("--data", required=True, help="probe file (JSON)")
    p.add_argument("--m", type=int, help="override the probe level")
    p.add_argument("--jac-order", type=int, help="override e_max")

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        report, lines = _HANDLERS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except InternalInvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 4
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)
    return 0


def main() -> None:
    sys.exit(run())
