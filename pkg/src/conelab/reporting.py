"""Deterministic report, series and figure writers.

Identical inputs must produce byte-identical files, so everything is
written with sorted keys, repr-exact floats and no timestamps.  CSV is the
canonical data format; the SVG writer is a small self-contained polyline
emitter for quick looks, not a plotting layer.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "jsonable",
    "write_json",
    "write_csv",
    "Check",
    "Report",
    "write_svg_polylines",
    "resolve_outdir",
]


def jsonable(obj):
    """Recursively convert numpy scalars/arrays and dataclass-ish values."""
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    if isinstance(obj, float):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path: str, obj) -> None:
    text = json.dumps(jsonable(obj), sort_keys=True, indent=2)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))  # shortest round-trip decimal


def write_csv(path: str, header, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


@dataclass(frozen=True)
class Check:
    """One thresholded quantity.  ``kind`` is 'max' (value must stay at or
    below threshold) or 'min' (value must reach at least threshold, used by
    negative controls and convergence orders)."""

    name: str
    value: float
    threshold: float
    kind: str = "max"

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        if self.kind == "max":
            return self.value <= self.threshold
        return self.value >= self.threshold


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def add(self, name: str, value, threshold, kind: str = "max") -> Check:
        c = Check(name, float(value), float(threshold), kind)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "checks": {
                c.name: {
                    "value": c.value,
                    "threshold": c.threshold,
                    "kind": c.kind,
                    "passed": c.passed,
                }
                for c in self.checks
            },
            "passed": self.passed,
            **({"extra": self.extra} if self.extra else {}),
        }

    def write(self, path: str) -> None:
        write_json(path, self.to_dict())

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            op = "<=" if c.kind == "max" else ">="
            lines.append(
                f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.value:.6g} {op} {c.threshold:.6g}"
            )
        return lines


_PALETTE = ("#1b6ca8", "#c0392b", "#1e8449", "#b7950b", "#7d3c98", "#117a65")


def write_svg_polylines(
    path: str,
    curves,
    width: int = 640,
    height: int = 640,
    margin: int = 40,
    title: str = "",
) -> None:
    """Emit labeled polylines; each curve is (label, points) with points an
    (n, 2) array in data coordinates.  Equal-aspect mapping, y up."""
    pts_all = [np.asarray(p, dtype=float) for _, p in curves]
    if not pts_all:
        raise ValueError("no curves to draw")
    allp = np.vstack(pts_all)
    lo = allp.min(axis=0)
    hi = allp.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-30))
    cx, cy = 0.5 * (lo + hi)
    scale = (min(width, height) - 2 * margin) / span

    def sx(x):
        return 0.5 * width + (x - cx) * scale

    def sy(y):
        return 0.5 * height - (y - cy) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width // 2}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{title}</text>'
        )
    # axes cross through the data origin when it is in frame
    if lo[0] <= 0 <= hi[0]:
        parts.append(
            f'<line x1="{sx(0):.2f}" y1="0" x2="{sx(0):.2f}" y2="{height}" '
            'stroke="#cccccc" stroke-width="1"/>'
        )
    if lo[1] <= 0 <= hi[1]:
        parts.append(
            f'<line x1="0" y1="{sy(0):.2f}" x2="{width}" y2="{sy(0):.2f}" '
            'stroke="#cccccc" stroke-width="1"/>'
        )
    for i, (label, pts) in enumerate(curves):
        pts = np.asarray(pts, dtype=float)
        coords = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in pts)
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.2"/>'
        )
        parts.append(
            f'<text x="{width - margin + 4}" y="{margin + 14 * i}" font-family="sans-serif" '
            f'font-size="10" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def resolve_outdir(flag_value: str | None) -> str:
    """Output directory: the flag, else $CONELAB_OUT, else the cwd."""
    out = flag_value or os.environ.get("CONELAB_OUT") or "."
    os.makedirs(out, exist_ok=True)
    return out
