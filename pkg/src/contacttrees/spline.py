"""Polyline smoothing: arc-length resampling plus a C1 cubic chain.

A skeleton polyline is replaced by a chain of cubic curves that passes
exactly through n points sampled uniformly by arc length along it. Interior
tangents follow the neighbor chord (Catmull-Rom); the two end tangents are
clamped to the first and last chords so the chain starts and ends exactly
on, and along, the polyline.
"""

from __future__ import annotations

Pt = tuple[float, float]
CubicPiece = tuple[Pt, Pt, Pt, Pt]


class DegeneratePolyline(Exception):
    """Fewer than two distinct points: nothing to smooth."""


def _dedupe(points) -> list[Pt]:
    out: list[Pt] = []
    for p in points:
        q = (float(p[0]), float(p[1]))
        if not out or q != out[-1]:
            out.append(q)
    return out


def polyline_length(points) -> float:
    pts = _dedupe(points)
    return sum(
        ((b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2) ** 0.5
        for a, b in zip(pts, pts[1:])
    )


def sample_uniform(points, n: int) -> list[Pt]:
    """n points spaced uniformly by arc length, endpoints included."""
    if n < 2:
        raise ValueError("need at least 2 samples")
    pts = _dedupe(points)
    if len(pts) < 2:
        raise DegeneratePolyline(f"polyline has {len(pts)} distinct point(s)")

    seg_lengths = [
        ((b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2) ** 0.5
        for a, b in zip(pts, pts[1:])
    ]
    total = sum(seg_lengths)
    samples: list[Pt] = [pts[0]]
    seg = 0
    passed = 0.0
    for i in range(1, n - 1):
        target = total * i / (n - 1)
        while seg < len(seg_lengths) - 1 and passed + seg_lengths[seg] < target:
            passed += seg_lengths[seg]
            seg += 1
        t = (target - passed) / seg_lengths[seg]
        a, b = pts[seg], pts[seg + 1]
        samples.append((a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t))
    samples.append(pts[-1])
    return samples


def cubic_chain(samples: list[Pt]) -> tuple[CubicPiece, ...]:
    """C1 interpolating chain through the samples; one cubic per gap."""
    n = len(samples)
    if n < 2:
        raise DegeneratePolyline("need at least 2 samples")
    tangents: list[Pt] = []
    for i in range(n):
        if i == 0:
            t = (samples[1][0] - samples[0][0], samples[1][1] - samples[0][1])
        elif i == n - 1:
            t = (samples[-1][0] - samples[-2][0], samples[-1][1] - samples[-2][1])
        else:
            t = ((samples[i + 1][0] - samples[i - 1][0]) / 2.0,
                 (samples[i + 1][1] - samples[i - 1][1]) / 2.0)
        tangents.append(t)
    pieces = []
    for i in range(n - 1):
        p0, p1 = samples[i], samples[i + 1]
        t0, t1 = tangents[i], tangents[i + 1]
        pieces.append((
            p0,
            (p0[0] + t0[0] / 3.0, p0[1] + t0[1] / 3.0),
            (p1[0] - t1[0] / 3.0, p1[1] - t1[1] / 3.0),
            p1,
        ))
    return tuple(pieces)


def smooth_polyline(points, n_samples: int) -> tuple[CubicPiece, ...]:
    return cubic_chain(sample_uniform(points, n_samples))


def eval_cubic(piece: CubicPiece, t: float) -> Pt:
    (x0, y0), (x1, y1), (x2, y2), (x3, y3) = piece
    s = 1.0 - t
    a = s * s * s
    b = 3.0 * s * s * t
    c = 3.0 * s * t * t
    d = t * t * t
    return (a * x0 + b * x1 + c * x2 + d * x3, a * y0 + b * y1 + c * y2 + d * y3)
