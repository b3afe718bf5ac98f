"""Generate the coarse Bay of Bengal meshes shipped in data/bay/.

Outline is traced by hand at desk resolution (km). Open-sea segments carry
labels 1 (left), 2 (bottom), 3 (right); coast and islands carry 0. The mesh
is graded towards the initial hump so its 5 km core is resolved.

    python3 tools/gen_bay_mesh.py            # writes data/bay/bay.smf and bay_extended.smf
"""

import argparse
import pathlib

import numpy as np
import triangle

WIDTH = 1051.4
COAST = [
    (1051.4, 180.0), (1000.0, 300.0), (960.0, 420.0), (930.0, 520.0), (900.0, 620.0),
    (880.0, 700.0), (850.0, 780.0), (800.0, 830.0), (740.0, 860.0), (680.0, 880.0),
    (620.0, 889.59), (560.0, 870.0), (500.0, 850.0), (440.0, 800.0), (380.0, 730.0),
    (320.0, 640.0), (250.0, 540.0), (180.0, 450.0), (110.0, 360.0), (50.0, 290.0),
    (0.0, 240.0),
]
ISLANDS = [
    [(630.0, 790.0), (675.0, 778.0), (700.0, 812.0), (662.0, 835.0)],
    [(715.0, 783.0), (752.0, 770.0), (775.0, 800.0), (738.0, 820.0)],
    [(560.0, 815.0), (590.0, 805.0), (600.0, 830.0), (572.0, 840.0)],
]
HUMP = (559.56, 430.02)
OFFSET = 100.0  # southern extension of the open sea
MARK = {0: 10, 1: 11, 2: 12, 3: 13}


def cross(a, b):
    return a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]


def size(x, y, centre, h_min, h_max, core, growth):
    r = np.hypot(x - centre[0], y - centre[1])
    return np.minimum(h_max, h_min + growth * np.maximum(0.0, r - core))


def outline(shift):
    bottom = [(0.0, 0.0), (WIDTH, 0.0)]
    coast = [(x, y + shift) for x, y in COAST]
    pts = bottom + coast
    segs, marks = [], []
    n = len(pts)
    for i in range(n):
        segs.append((i, (i + 1) % n))
    # 0->1 bottom, 1->2 right, coast..., last->0 left
    marks = [MARK[2], MARK[3]] + [MARK[0]] * (n - 3) + [MARK[1]]
    holes = []
    for isl in ISLANDS:
        base = len(pts)
        pts += [(x, y + shift) for x, y in isl]
        for k in range(len(isl)):
            segs.append((base + k, base + (k + 1) % len(isl)))
            marks.append(MARK[0])
        holes.append(tuple(np.mean([(x, y + shift) for x, y in isl], axis=0)))
    return pts, segs, marks, holes


def densify(pts, segs, marks, h_of):
    """Split input segments so no piece is longer than the local size."""
    out_pts = [tuple(p) for p in pts]
    out_segs, out_marks = [], []
    for (a, b), m in zip(segs, marks):
        pa, pb = np.array(out_pts[a]), np.array(out_pts[b])
        length = np.linalg.norm(pb - pa)
        mid = 0.5 * (pa + pb)
        k = max(1, int(np.ceil(length / h_of(mid[0], mid[1]))))
        prev = a
        for j in range(1, k):
            q = pa + (pb - pa) * j / k
            out_pts.append((q[0], q[1]))
            out_segs.append((prev, len(out_pts) - 1))
            out_marks.append(m)
            prev = len(out_pts) - 1
        out_segs.append((prev, b))
        out_marks.append(m)
    return out_pts, out_segs, out_marks


def build(shift, h_min, h_max, core, growth):
    centre = (HUMP[0], HUMP[1] + shift)
    h_of = lambda x, y: float(size(x, y, centre, h_min, h_max, core, growth))
    pts, segs, marks, holes = outline(shift)
    pts, segs, marks = densify(pts, segs, marks, h_of)
    # seed the hump region so the first pass already sees the fine scale
    ring = []
    for r in np.arange(h_min, core + 6 * h_min, h_min):
        k = max(6, int(2 * np.pi * r / h_min))
        ring += [(centre[0] + r * np.cos(2 * np.pi * j / k), centre[1] + r * np.sin(2 * np.pi * j / k)) for j in range(k)]
    geom = {
        "vertices": np.array(pts + ring + [centre]),
        "segments": np.array(segs),
        "segment_markers": np.array(marks).reshape(-1, 1),
        "holes": np.array(holes),
    }
    mesh = triangle.triangulate(geom, "pq30a%f" % (0.433 * h_max * h_max))
    for _ in range(12):
        v, t = mesh["vertices"], mesh["triangles"]
        c = v[t].mean(axis=1)
        target = 0.433 * size(c[:, 0], c[:, 1], centre, h_min, h_max, core, growth) ** 2
        area = 0.5 * np.abs(cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]]))
        if np.all(area <= 1.5 * target):
            break
        mesh["triangle_max_area"] = target
        mesh = triangle.triangulate(mesh, "rpq30a")
    return mesh


def write_smf(mesh, path, header):
    v, t = mesh["vertices"], mesh["triangles"].copy()
    d = cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    flip = d < 0
    t[flip, 1], t[flip, 2] = t[flip, 2].copy(), t[flip, 1].copy()
    inv = {m: k for k, m in MARK.items()}
    edges = [(a, b, inv[int(m)]) for (a, b), m in zip(mesh["segments"], mesh["segment_markers"].ravel())]
    with open(path, "w") as f:
        f.write("smf 1\n# %s\n" % header)
        f.write("vertices %d\n" % len(v))
        for x, y in v:
            f.write("%.6f %.6f\n" % (x, y))
        f.write("triangles %d\n" % len(t))
        for a, b, c in t:
            f.write("%d %d %d\n" % (a, b, c))
        f.write("boundary_edges %d\n" % len(edges))
        for a, b, lab in edges:
            f.write("%d %d %d\n" % (a, b, lab))
    return len(v), len(t)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "bay"))
    ap.add_argument("--h-min", type=float, default=4.0)
    ap.add_argument("--h-max", type=float, default=20.0)
    ap.add_argument("--core", type=float, default=15.0)
    ap.add_argument("--growth", type=float, default=0.1)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, shift in (("bay.smf", 0.0), ("bay_extended.smf", OFFSET)):
        mesh = build(shift, args.h_min, args.h_max, args.core, args.growth)
        nv, nt = write_smf(mesh, out / name, "bay of bengal outline, southern extension %g km" % shift)
        print("%s: %d vertices, %d triangles" % (name, nv, nt))


if __name__ == "__main__":
    main()
