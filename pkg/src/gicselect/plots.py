"""Minimal static SVG line charts: one polyline per labeled series."""

from __future__ import annotations

import xml.etree.ElementTree as ET

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 160, 40, 50

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _fmt(v):
    return format(float(v), ".6g")


def _scale(vals):
    lo, hi = min(vals), max(vals)
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def write_line_chart(path, series, *, title="", xlabel="", ylabel=""):
    """Write an SVG chart. ``series`` maps label -> (xs, ys)."""
    if not series:
        raise ValueError("at least one series is required")
    all_x = [x for xs, _ in series.values() for x in xs]
    all_y = [y for _, ys in series.values() for y in ys]
    x_lo, x_hi = _scale(all_x)
    y_lo, y_hi = _scale(all_y)
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(WIDTH),
        height=str(HEIGHT),
        viewBox=f"0 0 {WIDTH} {HEIGHT}",
    )
    ET.SubElement(
        svg, "rect", x="0", y="0", width=str(WIDTH), height=str(HEIGHT),
        fill="white",
    )
    # axes
    ET.SubElement(
        svg, "line",
        x1=str(MARGIN_L), y1=str(MARGIN_T + plot_h),
        x2=str(MARGIN_L + plot_w), y2=str(MARGIN_T + plot_h),
        stroke="black",
    )
    ET.SubElement(
        svg, "line",
        x1=str(MARGIN_L), y1=str(MARGIN_T),
        x2=str(MARGIN_L), y2=str(MARGIN_T + plot_h),
        stroke="black",
    )
    # tick labels at the extremes
    for x in (x_lo, x_hi):
        t = ET.SubElement(
            svg, "text", x=_fmt(px(x)), y=str(MARGIN_T + plot_h + 18),
        )
        t.set("text-anchor", "middle")
        t.set("font-size", "11")
        t.text = _fmt(x)
    for y in (y_lo, y_hi):
        t = ET.SubElement(svg, "text", x=str(MARGIN_L - 6), y=_fmt(py(y) + 4))
        t.set("text-anchor", "end")
        t.set("font-size", "11")
        t.text = _fmt(y)
    if title:
        t = ET.SubElement(svg, "text", x=str(WIDTH // 2), y="22")
        t.set("text-anchor", "middle")
        t.set("font-size", "14")
        t.text = title
    if xlabel:
        t = ET.SubElement(
            svg, "text", x=str(MARGIN_L + plot_w // 2), y=str(HEIGHT - 12)
        )
        t.set("text-anchor", "middle")
        t.set("font-size", "12")
        t.text = xlabel
    if ylabel:
        t = ET.SubElement(svg, "text", x="16", y=str(MARGIN_T + plot_h // 2))
        t.set("font-size", "12")
        t.set(
            "transform",
            f"rotate(-90 16 {MARGIN_T + plot_h // 2})",
        )
        t.set("text-anchor", "middle")
        t.text = ylabel

    for i, (label, (xs, ys)) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        ET.SubElement(
            svg, "polyline", points=pts, fill="none", stroke=color,
        ).set("stroke-width", "1.5")
        ly = MARGIN_T + 14 + 16 * i
        ET.SubElement(
            svg, "line",
            x1=str(MARGIN_L + plot_w + 10), y1=str(ly - 4),
            x2=str(MARGIN_L + plot_w + 30), y2=str(ly - 4),
            stroke=color,
        )
        t = ET.SubElement(
            svg, "text", x=str(MARGIN_L + plot_w + 34), y=str(ly)
        )
        t.set("font-size", "11")
        t.text = label

    ET.ElementTree(svg).write(path, encoding="unicode", xml_declaration=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write("\n")
