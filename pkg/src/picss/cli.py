"""The ``picss`` command line tool.

Subcommands expose the computational layers bottom-up:

* ``trunclog verify``      -- randomized truncated exp/log identity suite
* ``cohomology``           -- cohomology of symmetric powers of cyclic reps
* ``reps af-check``        -- Jordan-type verification for symmetric powers
* ``cosimp first-unstable``-- additive vs unit tower comparison for the
                              two worked truncated-ring examples
* ``cosimp betap0``        -- brute-force power operation on a degree-k model
* ``hfpss``                -- additive or Picard spectral-sequence runs
* ``algpic``               -- the unit-group (weight-filtration) pipeline
* ``picard-order``         -- the assembled Picard group order
* ``chart``                -- reference charts, rendering and golden checks

Conventions shared by all subcommands:

* exit codes: 0 success, 2 usage, 3 failed verification, 4 golden
  mismatch, 5 missing file;
* every failure also writes one machine-parseable line to stderr:
  ``picss-error code=<N> kind=<kind> detail="..."``;
* JSON output is canonical (sorted keys, two-space indent) and
  byte-identical across repeated runs;
* the sampling seed defaults to 0, can be set by the ``PICSS_SEED``
  environment variable, and is overridden by an explicit ``--seed``;
* field elements on the command line are hex integers encoding the
  coefficient tuple in base p, little-endian: the element
  c0 + c1*x + c2*x^2 + ... is written as hex(c0 + c1*p + c2*p^2 + ...).
  ``--xi``/``--xiprime`` default to the multiplicative generator.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import random
import sys
from pathlib import Path
from typing import Optional

import numpy as np

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CHECK = 3
EXIT_GOLDEN = 4
EXIT_MISSING = 5


class CliError(Exception):
    def __init__(self, code: int, kind: str, detail: str):
        super().__init__(detail)
        self.code = code
        self.kind = kind
        self.detail = detail


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse API
        raise CliError(EXIT_USAGE, "usage", message)


@dataclasses.dataclass
class RunConfig:
    """Resolved run parameters shared by the spectral-sequence commands."""

    p: int = 3
    group: str = "cp"
    mode: str = "additive"
    emit: str = "txt"
    out: Optional[str] = None
    seed: int = 0
    window: Optional[tuple[int, int, int]] = None
    xi: Optional[str] = None
    xiprime: Optional[str] = None
    zeta: int = 1

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        cfg = cls()
        for f in dataclasses.fields(cls):
            if hasattr(args, f.name) and getattr(args, f.name) is not None:
                setattr(cfg, f.name, getattr(args, f.name))
        cfg.seed = _resolve_seed(getattr(args, "seed", None))
        return cfg


def _resolve_seed(flag_value: Optional[int]) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get("PICSS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(EXIT_USAGE, "usage", f"PICSS_SEED is not an integer: {env!r}")
    return 0


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_window(spec: Optional[str]):
    from .hfpss import Window

    if spec is None:
        return None
    parts = spec.split(",")
    if len(parts) != 3:
        raise CliError(EXIT_USAGE, "usage",
                       f"--window wants S_MAX,STEM_MIN,STEM_MAX, got {spec!r}")
    try:
        smax, lo, hi = (int(v) for v in parts)
    except ValueError:
        raise CliError(EXIT_USAGE, "usage", f"--window values must be integers: {spec!r}")
    return Window(smax, lo, hi)


def _field_from_hex(field, text: str):
    try:
        value = int(text, 16)
    except ValueError:
        raise CliError(EXIT_USAGE, "usage", f"not a hex integer: {text!r}")
    if not 0 <= value < field.order:
        raise CliError(
            EXIT_USAGE, "usage",
            f"field element {text} out of range for a field of order {field.order}",
        )
    digits = []
    for _ in range(field.n):
        digits.append(value % field.p)
        value //= field.p
    return field.element(tuple(digits))


def _hex_of_element(e) -> str:
    value = 0
    for c in reversed(e.coeffs):
        value = value * e.field.p + c
    return hex(value)


def _warn(kind: str, detail: str) -> None:
    sys.stderr.write(f'picss-warning kind={kind} detail="{detail}"\n')


# ---------------------------------------------------------------------------
# trunclog


def _cmd_trunclog(args) -> int:
    from .rings import CyclotomicTruncatedRing, MonomialTruncatedRing
    from .trunclog import (
        verify_alternating_identity,
        verify_exp_sum_identity,
        verify_inverse_identity,
    )

    p = args.p
    seed = _resolve_seed(args.seed)
    rng = random.Random(seed)
    rings = [
        MonomialTruncatedRing(p, ("x",), p + 1),
        MonomialTruncatedRing(p, ("x", "y"), p + 1),
        CyclotomicTruncatedRing(p, p + 1),
    ]
    checked = 0
    for trial in range(args.trials):
        ring = rings[trial % len(rings)]
        xs = [ring.random_ideal_element(rng) for _ in range(3)]
        ys = [ring.random_ideal_element(rng) for _ in range(2)]
        for name, residue in (
            ("exp-sum", verify_exp_sum_identity(ring, xs)),
            ("inverse", verify_inverse_identity(ring, ys[0])),
            ("alternating", verify_alternating_identity(ring, ys)),
        ):
            checked += 1
            if residue != ring.zero:
                raise CliError(
                    EXIT_CHECK, "assertion",
                    f"{name} identity residue nonzero on trial {trial} over {ring!r}",
                )
    print(f"trunclog identities hold: {checked} checks "
          f"({args.trials} trials, 3 rings, seed {seed})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# cohomology plumbing


def _cmd_cohomology(args) -> int:
    from .fields import GF
    from .reps import reduced_regular_rep, regular_rep, rep_cohomology, sym_power

    p = args.p
    base = reduced_regular_rep(p) if args.rep == "reduced" else regular_rep(p)
    rep = sym_power(base, args.sym)
    try:
        lo, hi = (int(v) for v in args.degrees.split(":"))
    except ValueError:
        raise CliError(EXIT_USAGE, "usage", f"--degrees wants LO:HI, got {args.degrees!r}")
    field = GF(p, args.field_degree) if args.field_degree else None
    groups = rep_cohomology(rep, degrees=range(lo, hi + 1), field=field,
                            mod_transfers=args.mod_transfers)
    if args.emit == "json":
        payload = {
            "p": p,
            "rep": args.rep,
            "sym": args.sym,
            "mod_transfers": bool(args.mod_transfers),
            "field_degree": args.field_degree,
            "groups": [
                {"degree": h.degree, "type": [int(f) for f in h.type.factors]}
                for h in groups
            ],
        }
        _emit(_json_text(payload), args.out)
    else:
        lines = [f"H^*(C_{p}, Sym^{args.sym} of the {args.rep} representation)"
                 + (" mod transfers" if args.mod_transfers else "")]
        for h in groups:
            lines.append(f"  H^{h.degree} = {list(int(f) for f in h.type.factors)}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# reps


def _cmd_reps_af_check(args) -> int:
    from .reps import af_check

    rows = af_check(args.p, args.max_i)
    lines = [f"{'i':>4}  {'computed':<28}{'expected':<28}ok"]
    bad = 0
    for row in rows:
        ok = "yes" if row["ok"] else "NO"
        bad += 0 if row["ok"] else 1
        lines.append(f"{row['i']:>4}  {row['computed']:<28}{row['expected']:<28}{ok}")
    if args.emit == "json":
        _emit(_json_text({"p": args.p, "max_i": args.max_i, "rows": rows}), args.out)
    else:
        _emit("\n".join(lines) + "\n", args.out)
    if bad:
        raise CliError(EXIT_CHECK, "assertion",
                       f"{bad} symmetric powers disagree with the expected Jordan type")
    return EXIT_OK


# ---------------------------------------------------------------------------
# cosimplicial


_EXAMPLES = ("monomial", "cyclotomic")


def _example_ring(example: str):
    from .rings import CyclotomicTruncatedRing, MonomialTruncatedRing

    if example == "monomial":
        return MonomialTruncatedRing(3, ("x",), 4)
    return CyclotomicTruncatedRing(3, 4)


def _cmd_cosimp_first_unstable(args) -> int:
    from .cosimplicial import classifying_cochains, verify_first_unstable

    ring = _example_ring(args.example)
    report = verify_first_unstable(classifying_cochains(3, ring, 5))
    if args.emit == "json":
        _emit(_json_text(report), args.out)
    else:
        lines = [
            f"ring: {ring!r}",
            f"page {report['page']} (nominal p-1 = {report['nominal_page']}), "
            f"degrees <= {report['max_degree']}",
            f"additive tower orders: {report['additive_orders']}",
            f"unit tower orders: {report['unit_orders']}",
        ]
        add_any = mult_any = False
        for c in report["classes"]:
            add_any = add_any or c["d_additive_nonzero"]
            mult_any = mult_any or c["d_multiplicative_nonzero"]
            lines.append(
                f"  class at degree {c['degree']}, filtration {c['filtration']}: "
                f"order {c['order']}, "
                f"d_additive {'nonzero' if c['d_additive_nonzero'] else 'zero'}, "
                f"d_unit {'nonzero' if c['d_multiplicative_nonzero'] else 'zero'}, "
                f"correction {'nonzero' if c['phi_class_nonzero'] else 'zero'}"
            )
        towers = {
            (False, True): "unit tower only",
            (True, False): "additive tower only",
            (True, True): "both towers",
            (False, False): "neither tower",
        }[(add_any, mult_any)]
        lines.append(f"first unstable differential: {towers}")
        lines.append(
            "exact cochain identity: "
            + ("holds on every class" if report["all_identities_exact"] else "FAILS")
        )
        lines.append(
            "classwise comparison (unit = additive + correction): "
            + ("holds" if report["all_class_identities"] else "FAILS")
        )
        _emit("\n".join(lines) + "\n", args.out)
    if not (report["all_identities_exact"] and report["all_class_identities"]):
        raise CliError(EXIT_CHECK, "assertion",
                       "differential comparison identities failed")
    return EXIT_OK


def _cmd_cosimp_betap0(args) -> int:
    from .cosimplicial import beta_p0, beta_p0_field, dold_kan, levelwise_sym, phi, phi_field
    from .fields import GF

    p, k = args.p, args.k
    P = dold_kan({k: [p]}, k + 3)
    lift = dold_kan({k: [p * p]}, k + 3)
    H = levelwise_sym(P, p).cohomology(k + 1)
    x = np.zeros(P.widths[k], dtype=np.int64)
    x[0] = 1
    beta_cls = [int(c) for c in H.decompose(np.asarray(beta_p0(P, k, x, lift)) % p)]
    phi_cls = [int(c) for c in H.decompose(np.asarray(phi(P, k, x)) % p)]
    field = GF(p, 2)
    base = phi_field(P, k, [field.one], field)
    semilinear = all(
        phi_field(P, k, [e], field) == [(e ** p) * c for c in base]
        for e in field.elements()
    )
    base_b = beta_p0_field(P, k, [field.one], field)
    semilinear_b = all(
        beta_p0_field(P, k, [e], field) == [(e ** p) * c for c in base_b]
        for e in field.elements()
    )
    payload = {
        "p": p,
        "degree": k,
        "cohomology_of_sym_p": [int(f) for f in H.type.factors],
        "beta_p0_class": beta_cls,
        "phi_class": phi_cls,
        "beta_p0_nonzero": any(beta_cls),
        "phi_nonzero": any(phi_cls),
        "frobenius_semilinear_phi": bool(semilinear),
        "frobenius_semilinear_beta_p0": bool(semilinear_b),
    }
    if args.emit == "json":
        _emit(_json_text(payload), args.out)
    else:
        lines = [
            f"degree-{k} model over F_{p}, lift Z/{p * p}",
            f"H^{k + 1}(Sym^{p}) invariant factors: {payload['cohomology_of_sym_p']}",
            f"[beta P^0 iota] = {beta_cls} ({'nonzero' if any(beta_cls) else 'zero'})",
            f"[correction(iota)] = {phi_cls} ({'nonzero' if any(phi_cls) else 'zero'})",
            f"semilinearity over F_{p ** 2}: e*iota maps to e^{p} times the base class: "
            + ("ok" if semilinear and semilinear_b else "FAILS"),
        ]
        _emit("\n".join(lines) + "\n", args.out)
    if not (any(beta_cls) and any(phi_cls) and semilinear and semilinear_b):
        raise CliError(EXIT_CHECK, "assertion", "power-operation checks failed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# hfpss


def _additive_pages_json(pages) -> list[dict]:
    from .hfpss import monomial_name

    p, group = pages[0].p, pages[0].group
    n = p - 1 if group == "cp" else 1
    out = []
    for page in pages:
        entries = []
        for (s, t), m in sorted(page.entries.items()):
            entry = {"i": s, "j": t, "type": [p] * n,
                     "gens": [monomial_name(m, group)]}
            if s == 0 and t in page.transfers:
                entry["transfer"] = True
            entries.append(entry)
        diffs = []
        for rec in page.differentials:
            matrix = [[rec.coeff % p if i == j else 0 for j in range(n)]
                      for i in range(n)]
            d = {"from": list(rec.source), "to": list(rec.target), "matrix": matrix}
            if not rec.source_in_window:
                d["offpage_source"] = True
            diffs.append(d)
        out.append({"page": page.r, "entries": entries, "differentials": diffs})
    return out


def _semilinear_matrix(field, xi, eta) -> list[list[int]]:
    """Matrix of a -> a*xi + a^p*eta on the power basis over the prime field."""
    p, n = field.p, field.n
    cols = []
    for j in range(n):
        basis = field.element(tuple(1 if i == j else 0 for i in range(n)))
        image = basis * xi + (basis ** p) * eta
        cols.append(image.coeffs)
    return [[int(cols[j][i]) for j in range(n)] for i in range(n)]


def _picard_pages_json(result, xi, eta) -> list[dict]:
    from .hfpss import coefficient_order

    p, group = result.p, result.group
    n = p - 1 if group == "cp" else 1
    q = coefficient_order(p, group)
    out = []
    for page in result.pages:
        entries = []
        for (s, t), cell in sorted(page.cells.items()):
            if cell.kind == "import" and cell.order == q:
                typ = [p] * n
            else:
                typ = [int(cell.order)] if cell.order and cell.order > 1 else []
            entries.append({"i": s, "j": t, "type": typ, "gens": [cell.kind]})
        diffs = []
        for arrow in page.arrows:
            if arrow.kernel_order is not None and xi is not None:
                matrix = _semilinear_matrix(xi.field, xi, eta)
            else:
                coeff = arrow.record.coeff if arrow.record else 1
                matrix = [[coeff % p if i == j else 0 for j in range(n)]
                          for i in range(n)]
            d = {"from": list(arrow.source), "to": list(arrow.target),
                 "matrix": matrix, "rule": arrow.rule}
            if arrow.kernel_order is not None:
                d["kernel"] = arrow.kernel_order
            diffs.append(d)
        unknowns = [
            {"from": list(u.source), "to": list(u.target), "page": u.page,
             "note": u.rule}
            for u in page.unknowns
        ]
        item = {"page": page.r, "entries": entries, "differentials": diffs}
        if unknowns:
            item["unknowns"] = unknowns
        out.append(item)
    return out


def _cmd_hfpss(args) -> int:
    from .charts import (
        ascii_needs_clip,
        chart_from_additive,
        chart_from_picard,
        render_ascii,
        render_svg,
    )
    from .fields import GF
    from .hfpss import build_e2, normalize_group, picardify, run_additive

    cfg = RunConfig.from_args(args)
    group = normalize_group(cfg.group)
    window = _parse_window(args.window)
    try:
        pages = run_additive(build_e2(cfg.p, group, window))
    except ValueError as exc:
        raise CliError(EXIT_USAGE, "usage", str(exc))

    if cfg.mode == "additive":
        if cfg.emit == "json":
            payload = {
                "p": cfg.p, "group": group, "mode": "additive",
                "window": list(pages[0].window),
                "pages": _additive_pages_json(pages),
            }
            _emit(_json_text(payload), cfg.out)
        else:
            doc = chart_from_additive(pages)
            if cfg.emit == "svg":
                _emit(render_svg(doc), cfg.out)
            else:
                if ascii_needs_clip(doc):
                    _warn("ascii-clip", "window too wide, clipping columns")
                _emit(render_ascii(doc), cfg.out)
        return EXIT_OK

    # picard mode
    field = GF(cfg.p, cfg.p - 1)
    if group == "cp":
        xi = (_field_from_hex(field, cfg.xi) if cfg.xi
              else field.multiplicative_generator())
        xiprime = (_field_from_hex(field, cfg.xiprime) if cfg.xiprime
                   else field.multiplicative_generator())
        if not xi:
            raise CliError(EXIT_USAGE, "usage", "--xi must be nonzero")
        result = picardify(pages, xi=xi, xiprime=xiprime, zeta=cfg.zeta)
        eta = xiprime * cfg.zeta
    else:
        xi = eta = None
        result = picardify(pages)
    ledger_vals = [e.get("order", e.get("bound")) for e in result.ledger]
    if cfg.emit == "json":
        payload = {
            "p": cfg.p, "group": group, "mode": "picard",
            "window": list(pages[0].window),
            "params": None if xi is None else {
                "xi": _hex_of_element(xi),
                "xiprime": _hex_of_element(xiprime),
                "zeta": cfg.zeta,
            },
            "zero_stem_ledger": ledger_vals,
            "kernel_order": result.kernel_order,
            "pages": _picard_pages_json(result, xi, eta),
        }
        _emit(_json_text(payload), cfg.out)
    else:
        doc = chart_from_picard(result)
        if cfg.emit == "svg":
            _emit(render_svg(doc), cfg.out)
        else:
            if ascii_needs_clip(doc):
                _warn("ascii-clip", "window too wide, clipping columns")
            text = render_ascii(doc)
            text += "\n0-stem ledger: " + ", ".join(str(v) for v in ledger_vals) + "\n"
            _emit(text, cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# algpic


def _cmd_algpic(args) -> int:
    from .fields import GF
    from .hfpss import algebraic_picard

    p = args.p
    field = GF(p, p - 1)
    single = args.xi is not None or args.xiprime is not None
    pairs = []
    if single:
        xi = (_field_from_hex(field, args.xi) if args.xi
              else field.multiplicative_generator())
        xiprime = (_field_from_hex(field, args.xiprime) if args.xiprime
                   else field.multiplicative_generator())
        todo = [(xi, xiprime)]
    else:
        if p != 3:
            raise CliError(EXIT_USAGE, "usage",
                           "the exhaustive pair sweep is supported for p=3 only")
        todo = [(xi, xp) for xi in field.nonzero_elements() for xp in field.elements()]
    grid = None
    try:
        for xi, xp in todo:
            result = algebraic_picard(p, xi, xp)
            grid = result.grid
            pairs.append({
                "xi": _hex_of_element(xi),
                "xiprime": _hex_of_element(xp),
                "kernel_order": result.kernel_order,
                "consistent": result.consistent,
            })
            if result.type != [p]:
                raise CliError(EXIT_CHECK, "assertion",
                               f"unexpected group type {result.type}")
    except (AssertionError, ValueError) as exc:
        raise CliError(EXIT_CHECK, "assertion", str(exc))
    histogram: dict[str, int] = {}
    for row in pairs:
        histogram[str(row["kernel_order"])] = histogram.get(str(row["kernel_order"]), 0) + 1
    if args.emit == "json":
        payload = {
            "p": p,
            "type": [p],
            "pairs": pairs,
            "kernel_histogram": histogram,
            "grid": {f"{i},{j}": factors for (i, j), factors in sorted(grid.items())},
        }
        _emit(_json_text(payload), args.out)
    else:
        lines = [f"Z/{p}"]
        if single:
            row = pairs[0]
            lines.append(
                f"pair (xi={row['xi']}, xiprime={row['xiprime']}): "
                f"kernel order {row['kernel_order']}, "
                f"consistent: {'yes' if row['consistent'] else 'no (certified anyway)'}"
            )
        else:
            lines.append(
                f"certified for all {len(pairs)} parameter pairs; "
                "kernel orders " + ", ".join(
                    f"{k} x{v}" for k, v in sorted(histogram.items()))
            )
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# picard-order


def _cmd_picard_order(args) -> int:
    from .hfpss import normalize_group, picard_order, picard_order_sweep

    cfg = RunConfig.from_args(args)
    group = normalize_group(cfg.group)
    try:
        result = picard_order(cfg.p, group)
        sweep = None
        if group == "cp" and not args.no_sweep:
            sweep = picard_order_sweep(cfg.p, group, min_samples=args.samples,
                                       seed=cfg.seed)
            if sweep["order"] != result.order:
                raise CliError(EXIT_CHECK, "assertion",
                               "sweep order disagrees with the assembled order")
    except (AssertionError, ValueError) as exc:
        raise CliError(EXIT_CHECK, "assertion", str(exc))
    ledger_vals = [e.get("order", e.get("bound")) for e in result.ledger]
    if args.emit == "json":
        payload = {
            "p": result.p,
            "group": result.group,
            "order": result.order,
            "cyclic": result.cyclic,
            "upper_bound": result.upper_bound,
            "lower_bound": result.lower_bound,
            "zero_stem_ledger": ledger_vals,
            "periodicity": result.periodicity,
            "sweep": sweep,
        }
        _emit(_json_text(payload), args.out)
        return EXIT_OK
    lines = [f"Z/{result.order} cyclic"]
    lines.append("0-stem ledger: " + ", ".join(str(v) for v in ledger_vals))
    if sweep is not None:
        how = "exhaustive" if sweep["exhaustive"] else f"seed {sweep['seed']}"
        lines.append(
            f"sweep: {sweep['runs']} parameter triples ({how}), constant order, "
            "kernel orders seen: "
            + ", ".join(str(k) for k in sweep["kernel_orders_seen"])
        )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# chart


def _cmd_chart(args) -> int:
    from .charts import (
        GOLDEN_FILENAMES,
        ascii_needs_clip,
        diff_golden_file,
        render_ascii,
        render_svg,
        standard_chart,
        to_json,
    )

    if args.p != 3:
        raise CliError(EXIT_USAGE, "usage", "reference charts are defined for p=3")
    doc = standard_chart(args.which)
    if args.golden is not None:
        golden = args.golden or str(Path("goldens") / GOLDEN_FILENAMES[args.which])
        try:
            diffs = diff_golden_file(doc, golden)
        except FileNotFoundError as exc:
            raise CliError(EXIT_MISSING, "missing-file", str(exc))
        if diffs:
            for line in diffs:
                print(line)
            raise CliError(EXIT_GOLDEN, "golden-mismatch",
                           f"{len(diffs)} differences from {golden}")
        print(f"golden match: {args.which} ({len(doc.cells)} cells, "
              f"{len(doc.arrows)} arrows, {len(doc.lines)} lines)")
        if not args.emit_given:
            return EXIT_OK
    if args.emit == "json":
        _emit(to_json(doc), args.out)
    elif args.emit == "svg":
        _emit(render_svg(doc), args.out)
    else:
        if ascii_needs_clip(doc):
            _warn("ascii-clip", "window too wide, clipping columns")
        _emit(render_ascii(doc), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser assembly


def build_parser() -> _Parser:
    parser = _Parser(prog="picss", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    tl = sub.add_parser("trunclog", help="truncated exp/log identity suite")
    tl_sub = tl.add_subparsers(dest="tl_command", required=True, parser_class=_Parser)
    tlv = tl_sub.add_parser("verify", help="randomized identity verification")
    tlv.add_argument("--p", type=int, default=3, choices=(3, 5))
    tlv.add_argument("--trials", type=int, default=100)
    tlv.add_argument("--seed", type=int, default=None)
    tlv.set_defaults(func=_cmd_trunclog)

    coh = sub.add_parser(
        "cohomology",
        help="cohomology of symmetric powers of the cyclic representations",
        description="Computes H^*(C_p, Sym^j) of the regular or reduced regular "
                    "representation over GF(p, field-degree), optionally modulo "
                    "transfers (the image of the norm in degree 0).",
    )
    coh.add_argument("--p", type=int, default=3)
    coh.add_argument("--rep", choices=("reduced", "regular"), default="reduced")
    coh.add_argument("--sym", type=int, default=1)
    coh.add_argument("--degrees", default="0:4", help="inclusive range LO:HI")
    coh.add_argument("--field-degree", type=int, default=0,
                     help="coefficient field degree over F_p (0: prime field)")
    coh.add_argument("--mod-transfers", action="store_true")
    coh.add_argument("--emit", choices=("txt", "json"), default="txt")
    coh.add_argument("--out")
    coh.set_defaults(func=_cmd_cohomology)

    reps = sub.add_parser("reps", help="symmetric-power representation checks")
    reps_sub = reps.add_subparsers(dest="reps_command", required=True,
                                   parser_class=_Parser)
    af = reps_sub.add_parser("af-check", help="Jordan types of Sym^i vs the "
                                              "expected block pattern")
    af.add_argument("--p", type=int, required=True)
    af.add_argument("--max-i", type=int, required=True)
    af.add_argument("--emit", choices=("txt", "json"), default="txt")
    af.add_argument("--out")
    af.set_defaults(func=_cmd_reps_af_check)

    cos = sub.add_parser("cosimp", help="cosimplicial tower comparisons")
    cos_sub = cos.add_subparsers(dest="cosimp_command", required=True,
                                 parser_class=_Parser)
    fu = cos_sub.add_parser("first-unstable",
                            help="compare additive and unit towers of a worked example")
    fu.add_argument("--example", choices=tuple(_EXAMPLE_RINGS), required=True)
    fu.add_argument("--emit", choices=("txt", "json"), default="txt")
    fu.add_argument("--out")
    fu.set_defaults(func=_cmd_cosimp_first_unstable)
    bp = cos_sub.add_parser("betap0", help="brute-force power operation on a "
                                           "degree-k model")
    bp.add_argument("--p", type=int, default=3, choices=(3,))
    bp.add_argument("--k", type=int, default=1)
    bp.add_argument("--emit", choices=("txt", "json"), default="txt")
    bp.add_argument("--out")
    bp.set_defaults(func=_cmd_cosimp_betap0)

    hf = sub.add_parser("hfpss", help="additive or Picard spectral-sequence run")
    hf.add_argument("--p", type=int, default=3, choices=(3, 5))
    hf.add_argument("--group", choices=("cp", "max"), default="cp")
    hf.add_argument("--mode", choices=("additive", "picard"), default="additive")
    hf.add_argument("--emit", choices=("txt", "svg", "json"), default="txt")
    hf.add_argument("--window", help="S_MAX,STEM_MIN,STEM_MAX")
    hf.add_argument("--xi", help="hex field element (default: generator)")
    hf.add_argument("--xiprime", help="hex field element (default: generator)")
    hf.add_argument("--zeta", type=int, default=1)
    hf.add_argument("--out")
    hf.add_argument("--seed", type=int, default=None)
    hf.set_defaults(func=_cmd_hfpss)

    ap = sub.add_parser("algpic", help="unit-group pipeline (weight filtration)")
    ap.add_argument("--p", type=int, default=3, choices=(3, 5))
    ap.add_argument("--xi", help="hex field element (single-pair mode)")
    ap.add_argument("--xiprime", help="hex field element (single-pair mode)")
    ap.add_argument("--emit", choices=("txt", "json"), default="txt")
    ap.add_argument("--out")
    ap.set_defaults(func=_cmd_algpic)

    po = sub.add_parser("picard-order", help="assembled Picard group order")
    po.add_argument("--p", type=int, required=True, choices=(3, 5))
    po.add_argument("--group", choices=("cp", "max"), default="cp")
    po.add_argument("--samples", type=int, default=500,
                    help="minimum sweep samples for p=5")
    po.add_argument("--seed", type=int, default=None)
    po.add_argument("--no-sweep", action="store_true")
    po.add_argument("--emit", choices=("txt", "json"), default="txt")
    po.add_argument("--out")
    po.set_defaults(func=_cmd_picard_order)

    ch = sub.add_parser("chart", help="reference charts and golden checks")
    ch.add_argument("--which", required=True,
                    choices=("additive-einf", "picard-cp", "algebraic-e1", "picard-max"))
    ch.add_argument("--p", type=int, default=3)
    ch.add_argument("--emit", choices=("txt", "svg", "json"), default=None)
    ch.add_argument("--golden", nargs="?", const="", default=None,
                    help="golden JSON to compare against (default path if bare)")
    ch.add_argument("--out")
    ch.set_defaults(func=_cmd_chart)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is _cmd_chart:
            args.emit_given = args.emit is not None
            if args.emit is None:
                args.emit = "txt"
        return args.func(args)
    except CliError as exc:
        detail = exc.detail.replace('"', "'").replace("\n", " ")
        sys.stderr.write(f'picss-error code={exc.code} kind={exc.kind} '
                         f'detail="{detail}"\n')
        return exc.code
    except AssertionError as exc:
        detail = str(exc).replace('"', "'").replace("\n", " ")
        sys.stderr.write(f'picss-error code={EXIT_CHECK} kind=assertion '
                         f'detail="{detail}"\n')
        return EXIT_CHECK
    except FileNotFoundError as exc:
        detail = str(exc).replace('"', "'").replace("\n", " ")
        sys.stderr.write(f'picss-error code={EXIT_MISSING} kind=missing-file '
                         f'detail="{detail}"\n')
        return EXIT_MISSING


if __name__ == "__main__":
    sys.exit(main())
