"""Chart documents: serialization, rendering and golden comparison.

A :class:`ChartDocument` is a renderer-independent description of one
spectral-sequence chart: a window, a set of cells (each a list of group
types drawn as glyphs), differential arrows, and multiplication lines.
Documents are produced by the builders in this module from the engine
results in :mod:`picss.hfpss`, serialized as canonical JSON, rendered
to SVG or ASCII art, and compared semantically against golden files.

Two gradings are supported.  In the Adams convention the x-axis is the
stem t - s and the y-axis the filtration s, so a page-r differential
moves by (-1, r).  In the weight convention the x-axis is the weight
and the y-axis the cohomological degree, so a page-r differential moves
by (r, 1).  :meth:`ChartDocument.validate` enforces that every arrow
has both endpoints among the cells and the slope dictated by its page.

Glyph vocabulary (shared by both renderers):

====== ============================= ==========================
type   meaning                       glyph (SVG / ASCII)
====== ============================= ==========================
W      lattice of invariants         filled square / ``#``
Z2     order-2 cyclic                cross / ``x``
F<q>   one copy of the field F_q     circled dot / ``o``
Z<2^k> cyclic 2-power (k >= 2)       open square / ``$``
Z<m>   other cyclic                  filled dot / ``*``
====== ============================= ==========================
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Iterable, Optional

from .hfpss import (
    AlgebraicPicardResult,
    BigradedPage,
    MonomialClass,
    PicardResult,
    Window,
    bidegree,
    coefficient_order,
    cyclic_primary_factors,
    monomial_name,
)

__all__ = [
    "ChartDocument",
    "ChartWindow",
    "chart_from_additive",
    "chart_from_picard",
    "chart_from_algebraic",
    "standard_chart",
    "STANDARD_CHARTS",
    "GOLDEN_FILENAMES",
    "render_svg",
    "render_ascii",
    "ascii_needs_clip",
    "to_json",
    "from_dict",
    "load_chart",
    "diff_golden",
    "diff_golden_file",
]


class ChartWindow(tuple):
    """Inclusive (x_min, x_max, y_min, y_max) viewport."""

    def __new__(cls, x_min: int, x_max: int, y_min: int, y_max: int):
        if x_min > x_max or y_min > y_max:
            raise ValueError("empty chart window")
        return super().__new__(cls, (x_min, x_max, y_min, y_max))

    x_min = property(lambda self: self[0])
    x_max = property(lambda self: self[1])
    y_min = property(lambda self: self[2])
    y_max = property(lambda self: self[3])

    def contains(self, x: int, y: int) -> bool:
        return self[0] <= x <= self[1] and self[2] <= y <= self[3]


@dataclass(frozen=True)
class ChartDocument:
    title: str
    axes: tuple[str, str]  # (x label, y label)
    grading: str  # "adams" (slope (-1, r)) or "weight" (slope (r, 1))
    window: ChartWindow
    cells: dict[tuple[int, int], tuple[str, ...]]
    arrows: tuple[dict, ...] = ()
    lines: tuple[dict, ...] = ()
    legend: tuple[str, ...] = ()

    def validate(self) -> None:
        if self.grading not in ("adams", "weight"):
            raise ValueError(f"unknown grading: {self.grading!r}")
        for (x, y), types in self.cells.items():
            if not self.window.contains(x, y):
                raise ValueError(f"cell {(x, y)} outside the window")
            if not types:
                raise ValueError(f"cell {(x, y)} has no types")
        for arrow in self.arrows:
            src = tuple(arrow["from"])
            tgt = tuple(arrow["to"])
            page = arrow["page"]
            for end in (src, tgt):
                if end not in self.cells:
                    raise ValueError(f"arrow endpoint {end} has no cell")
            slope = (tgt[0] - src[0], tgt[1] - src[1])
            want = (-1, page) if self.grading == "adams" else (page, 1)
            if slope != want:
                raise ValueError(
                    f"arrow {src} -> {tgt} has slope {slope}, page {page} wants {want}"
                )
        for line in self.lines:
            for end in (tuple(line["from"]), tuple(line["to"])):
                if end not in self.cells:
                    raise ValueError(f"line endpoint {end} has no cell")

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "axes": {"x": self.axes[0], "y": self.axes[1]},
            "grading": self.grading,
            "window": {
                "x": [self.window.x_min, self.window.x_max],
                "y": [self.window.y_min, self.window.y_max],
            },
            "cells": [
                {"x": x, "y": y, "types": list(types)}
                for (x, y), types in sorted(self.cells.items())
            ],
            "arrows": [dict(a) for a in self.arrows],
            "lines": [dict(l) for l in self.lines],
            "legend": list(self.legend),
        }


def to_json(doc: ChartDocument) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc.to_dict(), indent=2, sort_keys=True) + "\n"


def from_dict(data: dict, validate: bool = True) -> ChartDocument:
    window = ChartWindow(
        data["window"]["x"][0],
        data["window"]["x"][1],
        data["window"]["y"][0],
        data["window"]["y"][1],
    )
    cells = {
        (cell["x"], cell["y"]): tuple(cell["types"]) for cell in data["cells"]
    }
    doc = ChartDocument(
        title=data.get("title", ""),
        axes=(data.get("axes", {}).get("x", "x"), data.get("axes", {}).get("y", "y")),
        grading=data.get("grading", "adams"),
        window=window,
        cells=cells,
        arrows=tuple(dict(a) for a in data.get("arrows", ())),
        lines=tuple(dict(l) for l in data.get("lines", ())),
        legend=tuple(data.get("legend", ())),
    )
    if validate:
        doc.validate()
    return doc


def load_chart(path: str | Path) -> ChartDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# builders


def _legend_for(cells: dict, extra: Iterable[str] = ()) -> tuple[str, ...]:
    seen = sorted({t for types in cells.values() for t in types})
    described = []
    for t in seen:
        if t == "W":
            described.append("W: lattice of invariants (drawn whole)")
        elif t == "Z2":
            described.append("x: Z/2")
        elif t.startswith("F"):
            described.append(f"o: one copy of F_{t[1:]}")
        elif t.startswith("Z") and _is_two_power(int(t[1:])):
            described.append(f"$: Z/{t[1:]}")
        else:
            described.append(f"*: Z/{t[1:]}")
    return tuple(described) + tuple(extra)


def _is_two_power(m: int) -> bool:
    return m >= 4 and (m & (m - 1)) == 0


def chart_from_additive(
    pages: list[BigradedPage], window: Optional[ChartWindow] = None
) -> ChartDocument:
    """Final-page chart of an additive run, in Adams coordinates.

    Cells are one copy of the coefficient field each, except the origin
    which is drawn as the whole lattice of invariants.  Multiplication
    by the exterior degree-(1, 2n) generator is drawn as a dotted line
    whenever both ends are visible; transfer summands on the 0-row are
    omitted.  The final page supports no differentials, so there are no
    arrows.
    """
    final = pages[-1]
    p, group = final.p, final.group
    if window is None:
        window = ChartWindow(
            final.window.stem_min, final.window.stem_max, 0, final.window.s_max
        )
    q = coefficient_order(p, group)
    field_type = f"F{q}" if group == "cp" else f"Z{p}"
    cells: dict[tuple[int, int], tuple[str, ...]] = {}
    coords: dict[tuple[int, int], tuple[int, int]] = {}
    for (s, t), m in final.entries.items():
        x, y = t - s, s
        if not window.contains(x, y):
            continue
        cells[(x, y)] = ("W",) if (s, t) == (0, 0) else (field_type,)
        coords[(s, t)] = (x, y)
    lines = []
    n = p - 1
    for (s, t), m in sorted(final.entries.items()):
        if m.a:
            continue
        image = (s + 1, t + 2 * n)
        if (s, t) in coords and image in coords and image in final.entries:
            lines.append({"kind": "exterior-mult", "from": list(coords[(s, t)]),
                          "to": list(coords[image])})
    legend = _legend_for(
        cells,
        ("dotted: multiplication by the exterior generator",
         "transfer summands on the 0-row are omitted"),
    )
    doc = ChartDocument(
        title=f"additive fixed-point spectral sequence, p={p} ({group}): final page",
        axes=("stem", "filtration"),
        grading="adams",
        window=window,
        cells=cells,
        lines=tuple(lines),
        legend=legend,
    )
    doc.validate()
    return doc


def chart_from_picard(
    result: PicardResult, window: Optional[ChartWindow] = None
) -> ChartDocument:
    """Final-page chart of a Picard run, in Adams coordinates.

    Import cells keep the coefficient field of the additive page (drawn
    as circled dots for the extension field, plain dots for the prime
    field); the unit spot is drawn by the primary decomposition of its
    cyclic order, the origin as Z/2.  The corrected diagonal
    differential is drawn in red when its kernel and cokernel survive.
    """
    p, group = result.p, result.group
    final_cells = result.pages[-1].cells
    if window is None:
        xs = [c.t - c.s for c in final_cells.values()]
        ys = [c.s for c in final_cells.values()]
        window = ChartWindow(min(xs), max(xs), min(ys), max(ys))
    q = coefficient_order(p, group)
    cells: dict[tuple[int, int], tuple[str, ...]] = {}
    positions: dict[tuple[int, int], tuple[int, int]] = {}
    for (s, t), cell in final_cells.items():
        x, y = t - s, s
        if not window.contains(x, y):
            continue
        if cell.kind == "invertibility":
            types: tuple[str, ...] = ("Z2",)
        elif cell.kind == "units":
            types = tuple(f"Z{f}" for f in cyclic_primary_factors(cell.order))
        elif group == "cp" and cell.order == q:
            types = (f"F{q}",)
        else:
            types = (f"Z{cell.order}",)
        cells[(x, y)] = types
        positions[(s, t)] = (x, y)
    arrows = []
    for page in result.pages:
        for arrow in page.arrows:
            if arrow.kernel_order is None or arrow.kernel_order <= 1:
                continue
            if arrow.source in positions and arrow.target in positions:
                arrows.append(
                    {
                        "page": arrow.page,
                        "from": list(positions[arrow.source]),
                        "to": list(positions[arrow.target]),
                        "kernel": arrow.kernel_order,
                        "style": "red",
                    }
                )
    legend = _legend_for(cells, ("red arrow: corrected diagonal differential",)
                         if arrows else ())
    doc = ChartDocument(
        title=f"Picard-graded spectral sequence, p={p} ({group}): final page",
        axes=("stem", "filtration"),
        grading="adams",
        window=window,
        cells=cells,
        arrows=tuple(arrows),
        legend=legend,
    )
    doc.validate()
    return doc


def chart_from_algebraic(
    result: AlgebraicPicardResult,
    p: int,
    window: Optional[ChartWindow] = None,
) -> ChartDocument:
    """First page of the weight spectral sequence with its differentials.

    The x-axis is the weight, the y-axis the cohomological degree.  The
    honestly computed grid covers weights 0..p; beyond that the chart
    repeats it with period p (multiplication by the weight-p norm
    class).  The first differential maps each odd-degree class of a
    multiple-of-p weight one step right and up; the (p-1)-st maps each
    odd-degree class of weight 1 mod p by (p-1, 1).  Arrows are drawn
    when both endpoints are visible.
    """
    if window is None:
        window = ChartWindow(0, 2 * p, 0, 4)
    q = p ** (p - 1)
    cells: dict[tuple[int, int], tuple[str, ...]] = {}
    for x in range(window.x_min, window.x_max + 1):
        base = x % p if x >= p else x
        for y in range(window.y_min, window.y_max + 1):
            if result.grid.get((y, base)):
                cells[(x, y)] = (f"F{q}",)
    arrows = []
    for (x, y) in sorted(cells):
        if y % 2 == 1:
            if x % p == 0:
                tgt = (x + 1, y + 1)
                if tgt in cells:
                    arrows.append({"page": 1, "from": [x, y], "to": list(tgt)})
            elif x % p == 1:
                tgt = (x + p - 1, y + 1)
                if tgt in cells:
                    arrows.append({"page": p - 1, "from": [x, y], "to": list(tgt)})
    legend = _legend_for(cells, ("arrows: first and imported differentials",))
    doc = ChartDocument(
        title=f"weight spectral sequence for the coefficient cohomology, p={p}: first page",
        axes=("weight", "degree"),
        grading="weight",
        window=window,
        cells=cells,
        arrows=tuple(arrows),
        legend=legend,
    )
    doc.validate()
    return doc


# ---------------------------------------------------------------------------
# the four standard charts and their goldens


GOLDEN_FILENAMES = {
    "additive-einf": "additive_einf_p3.json",
    "picard-cp": "picard_cp_p3.json",
    "algebraic-e1": "algebraic_e1_p3.json",
    "picard-max": "picard_max_p3.json",
}

STANDARD_CHARTS = tuple(GOLDEN_FILENAMES)


def standard_chart(which: str) -> ChartDocument:
    """Build one of the four reference charts (all at p = 3).

    The Picard runs use the default twist parameters (xi = xi' = the
    field generator, zeta = 1), for which the corrected diagonal
    differential has kernel of order 3.
    """
    from .fields import GF
    from .hfpss import algebraic_picard, build_e2, picardify, run_additive

    if which == "additive-einf":
        pages = run_additive(build_e2(3, "cp"))
        return chart_from_additive(pages, ChartWindow(0, 18, 0, 12))
    if which == "picard-cp":
        pages = run_additive(build_e2(3, "cp"))
        g = GF(3, 2).multiplicative_generator()
        result = picardify(pages, xi=g, xiprime=g, zeta=1)
        return chart_from_picard(result, ChartWindow(-2, 19, 0, 15))
    if which == "algebraic-e1":
        g = GF(3, 2).multiplicative_generator()
        result = algebraic_picard(3, g, g)
        return chart_from_algebraic(result, 3, ChartWindow(0, 6, 0, 4))
    if which == "picard-max":
        pages = run_additive(build_e2(3, "max"))
        result = picardify(pages)
        return chart_from_picard(result, ChartWindow(0, 24, 0, 10))
    raise ValueError(f"unknown chart: {which!r} (expected one of {STANDARD_CHARTS})")


# ---------------------------------------------------------------------------
# golden comparison


def _arrow_key(arrow: dict) -> tuple:
    return (arrow["page"], tuple(arrow["from"]), tuple(arrow["to"]))


def _line_key(line: dict) -> tuple:
    return (line.get("kind", "line"), tuple(line["from"]), tuple(line["to"]))


def diff_golden(produced: ChartDocument, golden: ChartDocument) -> list[str]:
    """Semantic differences from the golden document, one line each.

    Compares the window, the cells (by position, with types as
    multisets), the arrows (by page and endpoints, then kernel and
    style) and the lines.  Title and legend are presentation detail and
    are not compared.  An empty list means the documents agree.
    """
    diffs: list[str] = []
    if tuple(produced.window) != tuple(golden.window):
        diffs.append(
            f"window: golden {tuple(golden.window)} vs produced {tuple(produced.window)}"
        )
    gcells = {pos: sorted(types) for pos, types in golden.cells.items()}
    pcells = {pos: sorted(types) for pos, types in produced.cells.items()}
    for pos in sorted(set(gcells) | set(pcells)):
        g, got = gcells.get(pos), pcells.get(pos)
        if g != got:
            diffs.append(
                f"cell {pos}: golden {g if g is not None else 'absent'}"
                f" vs produced {got if got is not None else 'absent'}"
            )
    garrows = {_arrow_key(a): a for a in golden.arrows}
    parrows = {_arrow_key(a): a for a in produced.arrows}
    for key in sorted(set(garrows) | set(parrows)):
        g, got = garrows.get(key), parrows.get(key)
        if g is None or got is None:
            diffs.append(
                f"arrow page {key[0]} {key[1]} -> {key[2]}: "
                f"{'missing from produced' if got is None else 'not in golden'}"
            )
            continue
        for attr in ("kernel", "style"):
            if g.get(attr) != got.get(attr):
                diffs.append(
                    f"arrow page {key[0]} {key[1]} -> {key[2]} {attr}: "
                    f"golden {g.get(attr)} vs produced {got.get(attr)}"
                )
    glines = set(map(_line_key, golden.lines))
    plines = set(map(_line_key, produced.lines))
    for key in sorted(glines - plines):
        diffs.append(f"line {key[0]} {key[1]} -> {key[2]}: missing from produced")
    for key in sorted(plines - glines):
        diffs.append(f"line {key[0]} {key[1]} -> {key[2]}: not in golden")
    return diffs


def diff_golden_file(produced: ChartDocument, path: str | Path) -> list[str]:
    """Diff against a golden file; a missing file is an error, not a diff."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"golden file not found: {path}")
    return diff_golden(produced, load_chart(path))


# ---------------------------------------------------------------------------
# renderers


_SVG_CELL = 30
_SVG_MARGIN = 56


def _svg_glyph(x: float, y: float, t: str, parts: list[str]) -> None:
    if t == "W":
        parts.append(
            f'<rect x="{x - 5:.1f}" y="{y - 5:.1f}" width="10" height="10" fill="#222"/>'
        )
    elif t == "Z2":
        parts.append(
            f'<path d="M {x - 4.5:.1f} {y - 4.5:.1f} L {x + 4.5:.1f} {y + 4.5:.1f} '
            f'M {x - 4.5:.1f} {y + 4.5:.1f} L {x + 4.5:.1f} {y - 4.5:.1f}" '
            f'stroke="#222" stroke-width="1.6" fill="none"/>'
        )
    elif t.startswith("F"):
        parts.append(
            f'<circle cx="{x:.1f}" cy="{y:.1f}" r="6" stroke="#222" '
            f'stroke-width="1.2" fill="none"/>'
            f'<circle cx="{x:.1f}" cy="{y:.1f}" r="2.2" fill="#222"/>'
        )
    elif t.startswith("Z") and _is_two_power(int(t[1:])):
        parts.append(
            f'<rect x="{x - 5:.1f}" y="{y - 5:.1f}" width="10" height="10" '
            f'stroke="#222" stroke-width="1.4" fill="none"/>'
        )
    else:
        parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3.2" fill="#222"/>')


def render_svg(doc: ChartDocument) -> str:
    """Self-contained SVG 1.1 rendering; deterministic for a given document."""
    w = doc.window
    nx = w.x_max - w.x_min + 1
    ny = w.y_max - w.y_min + 1
    legend_h = 16 * (len(doc.legend) + 1)
    width = nx * _SVG_CELL + 2 * _SVG_MARGIN
    height = ny * _SVG_CELL + 2 * _SVG_MARGIN + legend_h

    def px(x: int) -> float:
        return _SVG_MARGIN + (x - w.x_min + 0.5) * _SVG_CELL

    def py(y: int) -> float:
        return _SVG_MARGIN + (w.y_max - y + 0.5) * _SVG_CELL

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="11">',
        "<defs>"
        '<marker id="arrow" viewBox="0 0 8 8" refX="7" refY="4" markerWidth="7" '
        'markerHeight="7" orient="auto-start-reverse">'
        '<path d="M 0 0 L 8 4 L 0 8 z"/></marker>'
        '<marker id="arrow-red" viewBox="0 0 8 8" refX="7" refY="4" markerWidth="7" '
        'markerHeight="7" orient="auto-start-reverse">'
        '<path d="M 0 0 L 8 4 L 0 8 z" fill="#c22"/></marker>'
        "</defs>",
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle">{doc.title}</text>',
    ]
    # light grid and axis labels
    for x in range(w.x_min, w.x_max + 1):
        parts.append(
            f'<line x1="{px(x):.1f}" y1="{py(w.y_min) + 12:.1f}" x2="{px(x):.1f}" '
            f'y2="{py(w.y_max) - 12:.1f}" stroke="#eee" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px(x):.1f}" y="{py(w.y_min) + 26:.1f}" '
            f'text-anchor="middle" fill="#555">{x}</text>'
        )
    for y in range(w.y_min, w.y_max + 1):
        parts.append(
            f'<line x1="{px(w.x_min) - 12:.1f}" y1="{py(y):.1f}" '
            f'x2="{px(w.x_max) + 12:.1f}" y2="{py(y):.1f}" stroke="#eee" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px(w.x_min) - 20:.1f}" y="{py(y) + 4:.1f}" '
            f'text-anchor="end" fill="#555">{y}</text>'
        )
    parts.append(
        f'<text x="{width / 2:.1f}" y="{py(w.y_min) + 42:.1f}" '
        f'text-anchor="middle">{doc.axes[0]}</text>'
    )
    parts.append(
        f'<text x="14" y="{py((w.y_min + w.y_max) // 2):.1f}" '
        f'text-anchor="middle" transform="rotate(-90 14 '
        f'{py((w.y_min + w.y_max) // 2):.1f})">{doc.axes[1]}</text>'
    )
    # lines below glyphs
    for line in doc.lines:
        (x0, y0), (x1, y1) = tuple(line["from"]), tuple(line["to"])
        parts.append(
            f'<line x1="{px(x0):.1f}" y1="{py(y0):.1f}" x2="{px(x1):.1f}" '
            f'y2="{py(y1):.1f}" stroke="#666" stroke-width="1" stroke-dasharray="3 3"/>'
        )
    for arrow in doc.arrows:
        (x0, y0), (x1, y1) = tuple(arrow["from"]), tuple(arrow["to"])
        red = arrow.get("style") == "red"
        color = "#c22" if red else "#222"
        marker = "arrow-red" if red else "arrow"
        title = f"d{arrow['page']}"
        if arrow.get("kernel") is not None:
            title += f", kernel of order {arrow['kernel']}"
        parts.append(
            f'<line x1="{px(x0):.1f}" y1="{py(y0):.1f}" x2="{px(x1):.1f}" '
            f'y2="{py(y1):.1f}" stroke="{color}" stroke-width="1.4" '
            f'marker-end="url(#{marker})"><title>{title}</title></line>'
        )
    for (x, y), types in sorted(doc.cells.items()):
        offsets = [(i - (len(types) - 1) / 2) * 14 for i in range(len(types))]
        for t, off in zip(types, offsets):
            _svg_glyph(px(x) + off, py(y), t, parts)
    base = ny * _SVG_CELL + 2 * _SVG_MARGIN
    for i, text in enumerate(doc.legend):
        parts.append(f'<text x="{_SVG_MARGIN}" y="{base + 16 * (i + 1)}" fill="#333">{text}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


_ASCII_GLYPHS = {"W": "#", "Z2": "x"}


def _ascii_glyph(t: str) -> str:
    if t in _ASCII_GLYPHS:
        return _ASCII_GLYPHS[t]
    if t.startswith("F"):
        return "o"
    if t.startswith("Z") and _is_two_power(int(t[1:])):
        return "$"
    return "*"


def ascii_needs_clip(doc: ChartDocument, max_width: int = 160) -> bool:
    w = doc.window
    label_w = max(len(str(y)) for y in (w.y_min, w.y_max))
    col_w = _ascii_col_width(doc)
    return label_w + 3 + (w.x_max - w.x_min + 1) * col_w > max_width


def _ascii_col_width(doc: ChartDocument) -> int:
    cell_w = max((len(types) for types in doc.cells.values()), default=1)
    label_w = max(len(str(x)) for x in range(doc.window.x_min, doc.window.x_max + 1))
    return max(3, cell_w + 1, label_w + 1)


def render_ascii(doc: ChartDocument, max_width: int = 160) -> str:
    """Plain-text grid with arrows, lines and the legend listed below.

    Windows too wide for ``max_width`` columns are clipped on the right
    and a note appended; use :func:`ascii_needs_clip` to detect that in
    advance.
    """
    w = doc.window
    col_w = _ascii_col_width(doc)
    label_w = max(len(str(y)) for y in (w.y_min, w.y_max))
    xs = list(range(w.x_min, w.x_max + 1))
    clipped = False
    while label_w + 3 + len(xs) * col_w > max_width and len(xs) > 1:
        xs.pop()
        clipped = True
    out = [doc.title, ""]
    for y in range(w.y_max, w.y_min - 1, -1):
        row = [str(y).rjust(label_w), " |"]
        for x in xs:
            types = doc.cells.get((x, y))
            mark = "".join(_ascii_glyph(t) for t in types) if types else "."
            row.append(mark.ljust(col_w))
        out.append(" ".join((row[0] + row[1], "".join(row[2:]))).rstrip())
    out.append(" " * label_w + " +" + "-" * (len(xs) * col_w + 1))
    axis = [" " * (label_w + 3)]
    for x in xs:
        axis.append(str(x).ljust(col_w))
    out.append("".join(axis).rstrip())
    out.append(" " * (label_w + 3) + f"({doc.axes[0]} across, {doc.axes[1]} up)")
    if clipped:
        out.append(f"(view clipped to {len(xs)} of {w.x_max - w.x_min + 1} columns)")
    if doc.arrows:
        out.append("")
        out.append("arrows:")
        for arrow in doc.arrows:
            line = (
                f"  d{arrow['page']}: ({arrow['from'][0]},{arrow['from'][1]})"
                f" -> ({arrow['to'][0]},{arrow['to'][1]})"
            )
            notes = []
            if arrow.get("kernel") is not None:
                notes.append(f"kernel {arrow['kernel']}")
            if arrow.get("style"):
                notes.append(arrow["style"])
            if notes:
                line += " [" + ", ".join(notes) + "]"
            out.append(line)
    if doc.lines:
        out.append("")
        out.append("lines:")
        for ln in doc.lines:
            out.append(
                f"  {ln.get('kind', 'line')}: ({ln['from'][0]},{ln['from'][1]})"
                f" -> ({ln['to'][0]},{ln['to'][1]})"
            )
    if doc.legend:
        out.append("")
        out.append("legend:")
        for item in doc.legend:
            out.append(f"  {item}")
    return "\n".join(out) + "\n"
