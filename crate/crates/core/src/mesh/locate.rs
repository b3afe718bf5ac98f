use super::{cross, sub, Point, TriMesh};

/// Barycentric tolerance: a point is inside a triangle when every weight is
/// at least `-LOCATE_TOL`.
pub const LOCATE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaryCoord {
    pub element: usize,
    pub lambda: [f64; 3],
}

impl BaryCoord {
    pub fn is_valid(&self) -> bool {
        let s: f64 = self.lambda.iter().sum();
        (s - 1.0).abs() <= 1e-12 && self.lambda.iter().all(|&l| l >= -LOCATE_TOL)
    }
}

fn inside(lambda: &[f64; 3]) -> bool {
    lambda.iter().all(|&l| l >= -LOCATE_TOL)
}

impl TriMesh {
    /// Finds the triangle containing `x`, walking from `hint` across the edge
    /// with the most negative barycentric weight. Falls back to an exhaustive
    /// scan when the walk leaves the mesh or exceeds its step budget.
    ///
    /// Points on shared edges or vertices resolve to the lowest-indexed
    /// containing triangle. Returns `None` for points outside the closed domain.
    pub fn locate_point(&self, x: Point, hint: Option<usize>) -> Option<BaryCoord> {
        let mut t = hint.filter(|&t| t < self.num_triangles()).unwrap_or(0);
        let budget = 4 * (self.num_triangles() as f64).sqrt() as usize + 16;
        for _ in 0..budget {
            let lambda = self.barycentric(t, x);
            if inside(&lambda) {
                return Some(self.lowest_containing(t, lambda, x));
            }
            let k = (0..3)
                .min_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))
                .unwrap();
            match self.neighbors(t)[k] {
                Some(n) => t = n,
                None => break,
            }
        }
        self.locate_exhaustive(x)
    }

    /// Lowest-index triangle containing `x` by scanning every element.
    pub fn locate_exhaustive(&self, x: Point) -> Option<BaryCoord> {
        (0..self.num_triangles()).find_map(|t| {
            let lambda = self.barycentric(t, x);
            inside(&lambda).then_some(BaryCoord { element: t, lambda })
        })
    }

    fn lowest_containing(&self, t: usize, lambda: [f64; 3], x: Point) -> BaryCoord {
        if lambda.iter().all(|&l| l > LOCATE_TOL) {
            return BaryCoord { element: t, lambda };
        }
        // On (or within tolerance of) an edge or vertex: every other candidate
        // shares a vertex with t.
        let mut best = BaryCoord { element: t, lambda };
        for &v in &self.triangles()[t] {
            for &s in self.vertex_star(v) {
                if s >= best.element {
                    continue;
                }
                let l = self.barycentric(s, x);
                if inside(&l) {
                    best = BaryCoord { element: s, lambda: l };
                }
            }
        }
        best
    }

    /// Returns `x_to` when it lies in the closed domain; otherwise the first
    /// crossing of the segment `[x_from, x_to]` with the boundary, pulled back
    /// towards `x_from` by `1e-12 * h`.
    pub fn clip_to_boundary(&self, x_from: Point, x_to: Point) -> Point {
        if self.locate_point(x_to, None).is_some() {
            return x_to;
        }
        self.clip_outside(x_from, x_to, None).0
    }

    /// Clipping for a target already known to be outside; also returns the
    /// location of the clipped point.
    pub(crate) fn clip_outside(
        &self,
        x_from: Point,
        x_to: Point,
        hint: Option<usize>,
    ) -> (Point, Option<BaryCoord>) {
        let d = sub(x_to, x_from);
        let len = d[0].hypot(d[1]);
        if len == 0.0 {
            return (x_from, self.locate_point(x_from, hint));
        }
        let verts = self.vertices();
        let mut t_hit = f64::INFINITY;
        for e in self.boundary_edges() {
            let a = verts[e.a];
            let ev = sub(verts[e.b], a);
            let denom = cross(d, ev);
            if denom == 0.0 {
                continue;
            }
            let w = sub(a, x_from);
            let t = cross(w, ev) / denom;
            let s = cross(w, d) / denom;
            let eps = 1e-12;
            if (-eps..=1.0 + eps).contains(&s) && (0.0..=1.0 + eps).contains(&t) && t < t_hit {
                t_hit = t;
            }
        }
        if !t_hit.is_finite() {
            // x_to is outside only by rounding; no crossing to clip against.
            t_hit = 1.0;
        }
        let at = |t: f64| [x_from[0] + t * d[0], x_from[1] + t * d[1]];
        let t_nudged = (t_hit.min(1.0) - 1e-12 * self.h() / len).max(0.0);
        let p = at(t_nudged);
        if let Some(bc) = self.locate_point(p, hint) {
            return (p, Some(bc));
        }
        // Rounding left the nudged point outside: bisect towards x_from.
        let (mut lo, mut hi) = (0.0, t_nudged);
        let mut found = self.locate_point(x_from, hint);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            match self.locate_point(at(mid), hint) {
                Some(bc) => {
                    lo = mid;
                    found = Some(bc);
                }
                None => hi = mid,
            }
        }
        (at(lo), found)
    }
}
