#![allow(dead_code)]

pub mod oracles;

use lgswe::mesh::{gen_square_mesh, Point, SideLabels, TriMesh};

/// Gauss-Legendre nodes and weights on [0, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

/// Collapsed-square rule on the reference triangle: barycentric points and
/// weights summing to 1. Exact for polynomials of degree `2n - 2`.
pub fn duffy_rule(n: usize) -> Vec<([f64; 3], f64)> {
    let gl = gauss_legendre(n);
    let mut out = Vec::new();
    for &(s, ws) in &gl {
        for &(r, wr) in &gl {
            let l1 = s;
            let l2 = (1.0 - s) * r;
            out.push(([1.0 - l1 - l2, l1, l2], 2.0 * ws * wr * (1.0 - s)));
        }
    }
    out
}

/// `∫_K f` using the collapsed rule on triangle `t`.
pub fn integrate(mesh: &TriMesh, t: usize, n: usize, f: impl Fn([f64; 3], Point) -> f64) -> f64 {
    let area = mesh.geometry(t).area;
    duffy_rule(n)
        .into_iter()
        .map(|(l, w)| w * area * f(l, mesh.map_point(t, l)))
        .sum()
}

pub fn square(n: usize, jitter: f64, seed: u64) -> TriMesh {
    gen_square_mesh(1.0, n, jitter, seed, SideLabels::uniform(0)).unwrap()
}

pub fn mixed_square(n: usize, jitter: f64, seed: u64) -> TriMesh {
    gen_square_mesh(1.0, n, jitter, seed, SideLabels { bottom: 1, right: 2, top: 0, left: 3 }).unwrap()
}

pub fn bay_mesh() -> TriMesh {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/bay/bay.smf");
    lgswe::mesh::load_mesh(path).unwrap()
}

/// Brute-force point-in-triangle scan with orientation tests, lowest index wins.
pub fn brute_force_locate(mesh: &TriMesh, x: Point, tol: f64) -> Option<usize> {
    let v = mesh.vertices();
    mesh.triangles().iter().position(|t| {
        let orient = |a: Point, b: Point| (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
        let twice_area = orient(v[t[0]], v[t[1]]) + orient(v[t[1]], v[t[2]]) + orient(v[t[2]], v[t[0]]);
        let scale = twice_area.abs();
        [orient(v[t[0]], v[t[1]]), orient(v[t[1]], v[t[2]]), orient(v[t[2]], v[t[0]])]
            .iter()
            .all(|&o| o / scale >= -tol)
    })
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
