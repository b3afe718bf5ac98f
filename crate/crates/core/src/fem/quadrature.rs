use std::sync::OnceLock;

/// Symmetric quadrature rule on a triangle: barycentric points and weights
/// summing to one (multiply by the element area).
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    fn centroid() -> Self {
        Self {
            degree: 1,
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
        }
    }

    fn three_point() -> Self {
        let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
        Self {
            degree: 2,
            points: vec![[a, b, b], [b, a, b], [b, b, a]],
            weights: vec![1.0 / 3.0; 3],
        }
    }

    fn six_point() -> Self {
        let (a1, w1) = (0.445_948_490_915_964_886_32, 0.223_381_589_678_011_465_70);
        let (a2, w2) = (0.091_576_213_509_770_743_46, 0.109_951_743_655_321_867_64);
        let mut rule = Self { degree: 4, points: Vec::new(), weights: Vec::new() };
        rule.push_orbit(a1, w1);
        rule.push_orbit(a2, w2);
        rule
    }

    fn seven_point() -> Self {
        let r = 15f64.sqrt();
        let mut rule = Self {
            degree: 5,
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![9.0 / 40.0],
        };
        rule.push_orbit((6.0 - r) / 21.0, (155.0 - r) / 1200.0);
        rule.push_orbit((6.0 + r) / 21.0, (155.0 + r) / 1200.0);
        rule
    }

    /// Adds the three permutations of `(a, a, 1 - 2a)`.
    fn push_orbit(&mut self, a: f64, w: f64) {
        let b = 1.0 - 2.0 * a;
        self.points.extend([[b, a, a], [a, b, a], [a, a, b]]);
        self.weights.extend([w; 3]);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest error of the rule against exact monomial integrals
    /// `x^p y^q`, `p + q <= degree`, on the reference triangle.
    pub fn exactness_error(&self) -> f64 {
        let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        let mut worst = 0.0_f64;
        for p in 0..=self.degree {
            for q in 0..=self.degree - p {
                let exact = fact(p) * fact(q) / fact(p + q + 2);
                let approx: f64 = self
                    .points
                    .iter()
                    .zip(&self.weights)
                    .map(|(l, w)| 0.5 * w * l[1].powi(p as i32) * l[2].powi(q as i32))
                    .sum();
                worst = worst.max((approx - exact).abs());
            }
        }
        worst
    }
}

/// Cheapest built-in rule exact for polynomials of total degree `degree`
/// (at most 5).
///
/// Every rule is checked against monomial integrals the first time the table
/// is built.
pub fn rule(degree: usize) -> &'static QuadratureRule {
    static RULES: OnceLock<[QuadratureRule; 4]> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        let rules = [
            QuadratureRule::centroid(),
            QuadratureRule::three_point(),
            QuadratureRule::six_point(),
            QuadratureRule::seven_point(),
        ];
        for r in &rules {
            assert!(r.weights.iter().all(|&w| w > 0.0));
            let err = r.exactness_error();
            assert!(err < 1e-15, "degree-{} rule off by {err:e}", r.degree);
        }
        rules
    });
    rules
        .iter()
        .find(|r| r.degree >= degree)
        .unwrap_or_else(|| panic!("no quadrature rule of degree {degree}"))
}
