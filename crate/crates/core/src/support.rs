//! Estimation of the angular support `[a, b]`.
//!
//! The fitted interval minimizes
//!
//! ```text
//! g(a, b) = (b - a) + lambda * sqrt(k) * |D*(a, b) - H|
//! ```
//!
//! over the triangle `0 <= a <= b <= 1`. The width term prefers narrow
//! intervals; the penalty forces the interval to cover the angles of the
//! largest observations. `g` is only piecewise smooth, so the search is an
//! exhaustive grid over the triangle followed by a Nelder-Mead polish whose
//! vertices are projected back onto the triangle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{d_star, AngularCone, BivariatePoint};
use crate::order::RadialOrder;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportFitOptions {
    /// Multiplier on the `sqrt(k)` penalty.
    pub lambda: f64,
    /// Points per axis of the coarse grid.
    pub grid_size: usize,
    /// Nelder-Mead iteration budget.
    pub refine_iters: usize,
    /// Simplex diameter at which the polish stops.
    pub tol: f64,
}

impl Default for SupportFitOptions {
    fn default() -> Self {
        Self { lambda: 1.0, grid_size: 101, refine_iters: 400, tol: 1e-7 }
    }
}

impl SupportFitOptions {
    pub fn with_lambda(lambda: f64) -> Self {
        Self { lambda, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda {} must be positive", self.lambda)));
        }
        if self.grid_size < 11 {
            return Err(Error::InvalidParameter(format!(
                "grid_size {} must be at least 11",
                self.grid_size
            )));
        }
        if self.refine_iters == 0 {
            return Err(Error::InvalidParameter("refine_iters must be positive".to_string()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!("tol {} must be positive", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportEstimate {
    pub a_hat: f64,
    pub b_hat: f64,
    pub objective_value: f64,
    /// Evaluations of the refinement stage, starting from the best grid point.
    pub trace: Vec<(f64, f64, f64)>,
}

impl SupportEstimate {
    pub fn cone(&self) -> AngularCone {
        AngularCone::new(self.a_hat, self.b_hat).expect("estimate is feasible")
    }
}

/// The top-`k` pairs normalized by `R_(k)` together with their log-spacings,
/// so that `D* - H` for any cone costs one pass over `k` entries.
struct ConeExcess {
    scaled: Vec<(BivariatePoint, f64)>,
    k: usize,
}

impl ConeExcess {
    fn new(ord: &RadialOrder, k: usize) -> Result<Self> {
        let rk = ord.threshold(k)?;
        let scaled = ord.sorted_r()[..k]
            .iter()
            .zip(&ord.concomitant_pairs()[..k])
            .filter_map(|(r, p)| {
                let log_ratio = (r / rk).ln();
                (log_ratio > 0.0).then(|| {
                    let q = BivariatePoint::new(p.x() / rk, p.y() / rk).expect("scaled point is valid");
                    (q, log_ratio)
                })
            })
            .collect();
        Ok(Self { scaled, k })
    }

    /// `D* - H = (1/k) sum (d*_i / R_(k)) log(R_(i) / R_(k))`.
    fn excess(&self, cone: &AngularCone) -> f64 {
        self.scaled.iter().map(|(q, l)| d_star(q, cone) * l).sum::<f64>() / self.k as f64
    }

    fn objective(&self, a: f64, b: f64, penalty: f64) -> f64 {
        let cone = AngularCone::new(a, b).expect("feasible point");
        (b - a) + penalty * self.excess(&cone).abs()
    }
}

/// `g(a, b) = (b - a) + lambda sqrt(k) |D*(a, b) - H|`.
pub fn objective(ord: &RadialOrder, k: usize, a: f64, b: f64, lambda: f64) -> Result<f64> {
    AngularCone::new(a, b)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda {lambda} must be positive")));
    }
    let ex = ConeExcess::new(ord, k)?;
    Ok(ex.objective(a, b, lambda * (k as f64).sqrt()))
}

/// Project onto the triangle `0 <= a <= b <= 1`.
fn project(a: f64, b: f64) -> (f64, f64) {
    let (a, b) = if a > b {
        let m = 0.5 * (a + b);
        (m, m)
    } else {
        (a, b)
    };
    let a = a.clamp(0.0, 1.0);
    let b = b.clamp(0.0, 1.0);
    (a.min(b), b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    a: f64,
    b: f64,
    value: f64,
}

impl Candidate {
    /// Lower objective first, then the narrower interval, then smaller `a`.
    fn rank(&self, other: &Candidate) -> std::cmp::Ordering {
        self.value
            .total_cmp(&other.value)
            .then((self.b - self.a).total_cmp(&(other.b - other.a)))
            .then(self.a.total_cmp(&other.a))
    }

    fn better_than(&self, other: &Candidate) -> bool {
        self.rank(other).is_lt()
    }
}

/// Minimize the support objective over the feasible triangle.
pub fn estimate_support(
    ord: &RadialOrder,
    k: usize,
    opts: &SupportFitOptions,
) -> Result<SupportEstimate> {
    opts.validate()?;
    let ex = ConeExcess::new(ord, k)?;
    let penalty = opts.lambda * (k as f64).sqrt();
    let g = |a: f64, b: f64| ex.objective(a, b, penalty);

    let steps = opts.grid_size - 1;
    let grid_best = (0..=steps)
        .into_par_iter()
        .flat_map_iter(|i| (i..=steps).map(move |j| (i, j)))
        .map(|(i, j)| {
            let a = i as f64 / steps as f64;
            let b = j as f64 / steps as f64;
            Candidate { a, b, value: g(a, b) }
        })
        .reduce_with(|x, y| if y.better_than(&x) { y } else { x })
        .expect("grid is nonempty");

    let h = 1.0 / steps as f64;
    let mut trace = Vec::new();
    let polished = nelder_mead(&g, grid_best, h, opts, &mut trace);
    let best = if polished.better_than(&grid_best) { polished } else { grid_best };
    Ok(SupportEstimate { a_hat: best.a, b_hat: best.b, objective_value: best.value, trace })
}

fn nelder_mead(
    g: &impl Fn(f64, f64) -> f64,
    start: Candidate,
    step: f64,
    opts: &SupportFitOptions,
    trace: &mut Vec<(f64, f64, f64)>,
) -> Candidate {
    trace.push((start.a, start.b, start.value));
    let mut eval = |a: f64, b: f64| {
        let (a, b) = project(a, b);
        let value = g(a, b);
        trace.push((a, b, value));
        Candidate { a, b, value }
    };
    let mut best = start;
    let mut simplex = [start, eval(start.a + step, start.b), eval(start.a, start.b + step)];
    // keep the simplex nondegenerate after projection near the corners
    if simplex[1] == simplex[0] {
        simplex[1] = eval(start.a - step, start.b);
    }
    if simplex[2] == simplex[0] || simplex[2] == simplex[1] {
        simplex[2] = eval(start.a, start.b - step);
    }

    for _ in 0..opts.refine_iters {
        simplex.sort_by(Candidate::rank);
        if simplex[0].better_than(&best) {
            best = simplex[0];
        }
        let diameter = simplex
            .iter()
            .flat_map(|p| simplex.iter().map(move |q| (p.a - q.a).hypot(p.b - q.b)))
            .fold(0.0, f64::max);
        if diameter < opts.tol {
            break;
        }
        let [lo, mid, hi] = simplex;
        let (ca, cb) = (0.5 * (lo.a + mid.a), 0.5 * (lo.b + mid.b));
        let point = |t: f64| (ca + t * (hi.a - ca), cb + t * (hi.b - cb));

        let (ra, rb) = point(-1.0);
        let refl = eval(ra, rb);
        if refl.better_than(&lo) {
            let (ea, eb) = point(-2.0);
            let exp = eval(ea, eb);
            simplex[2] = if exp.better_than(&refl) { exp } else { refl };
            continue;
        }
        if refl.better_than(&mid) {
            simplex[2] = refl;
            continue;
        }
        let outside = refl.better_than(&hi);
        let (ka, kb) = if outside { point(-0.5) } else { point(0.5) };
        let contr = eval(ka, kb);
        let accept = if outside { !refl.better_than(&contr) } else { contr.better_than(&hi) };
        if accept {
            simplex[2] = contr;
            continue;
        }
        // shrink toward the best vertex
        for v in simplex.iter_mut().skip(1) {
            *v = eval(lo.a + 0.5 * (v.a - lo.a), lo.b + 0.5 * (v.b - lo.b));
        }
    }
    for c in simplex {
        if c.better_than(&best) {
            best = c;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate, pareto, MixtureSpec};
    use crate::estimators::{d_star_statistic, hill};
    use crate::geometry::BivariateSample;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn order_of(sample: &BivariateSample) -> RadialOrder {
        RadialOrder::new(sample).unwrap()
    }

    #[test]
    fn full_interval_objective_is_width() {
        let s = generate(&MixtureSpec::example1(), 2000, 1).unwrap();
        let ord = order_of(&s);
        assert_eq!(objective(&ord, 100, 0.0, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn objective_matches_statistics() {
        let s = generate(&MixtureSpec::example2(), 3000, 2).unwrap();
        let ord = order_of(&s);
        let k = 80;
        let h = hill(&ord, k).unwrap().value;
        for (a, b) in [(0.1, 0.9), (0.25, 0.75), (0.3, 0.5), (0.4, 0.4), (0.0, 0.3)] {
            let d = d_star_statistic(&ord, k, &AngularCone::new(a, b).unwrap()).unwrap().value;
            let want = (b - a) + 2.0 * (k as f64).sqrt() * (d - h).abs();
            assert_relative_eq!(
                objective(&ord, k, a, b, 2.0).unwrap(),
                want,
                max_relative = 1e-12,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn objective_rejects_bad_input() {
        let s = generate(&MixtureSpec::example1(), 500, 1).unwrap();
        let ord = order_of(&s);
        assert!(objective(&ord, 50, 0.6, 0.5, 1.0).is_err());
        assert!(objective(&ord, 50, 0.2, 0.5, 0.0).is_err());
        assert!(objective(&ord, 500, 0.2, 0.5, 1.0).is_err());
    }

    #[test]
    fn projection_lands_in_triangle() {
        for (a, b) in [(-0.2, 0.5), (0.7, 0.3), (0.5, 1.4), (1.3, 1.2), (-1.0, -2.0)] {
            let (pa, pb) = project(a, b);
            assert!(0.0 <= pa && pa <= pb && pb <= 1.0, "({a},{b}) -> ({pa},{pb})");
        }
        assert_eq!(project(0.2, 0.6), (0.2, 0.6));
    }

    #[test]
    fn options_validation() {
        assert!(SupportFitOptions::default().validate().is_ok());
        assert!(SupportFitOptions { grid_size: 10, ..Default::default() }.validate().is_err());
        assert!(SupportFitOptions { lambda: -1.0, ..Default::default() }.validate().is_err());
        assert!(SupportFitOptions { tol: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn narrow_true_support_wins() {
        let mut wins = 0;
        for seed in 0..10 {
            let s = generate(&MixtureSpec::example1(), 30_000, seed).unwrap();
            let ord = order_of(&s);
            let inner = objective(&ord, 100, 0.25, 0.75, 1.0).unwrap();
            let outer = objective(&ord, 100, 0.05, 0.95, 1.0).unwrap();
            if inner < outer {
                wins += 1;
            }
        }
        assert!(wins >= 6, "{wins}/10");
    }

    #[test]
    fn ray_data_collapses_interval() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let sample = BivariateSample::from_pairs((0..5000).map(|_| {
            let r = pareto(2.0, &mut rng);
            (0.5 * r, 0.5 * r)
        }))
        .unwrap();
        let ord = order_of(&sample);
        let est = estimate_support(&ord, 100, &SupportFitOptions::default()).unwrap();
        assert!((est.a_hat - 0.5).abs() <= 0.02 && (est.b_hat - 0.5).abs() <= 0.02, "{est:?}");
        // ray point beats any interval of visible width
        let at_ray = objective(&ord, 100, 0.5, 0.5, 1.0).unwrap();
        assert!(at_ray < objective(&ord, 100, 0.45, 0.55, 1.0).unwrap());
    }

    #[test]
    fn estimate_is_feasible_deterministic_and_beats_grid() {
        let s = generate(&MixtureSpec::example2(), 10_000, 5).unwrap();
        let ord = order_of(&s);
        let opts = SupportFitOptions { grid_size: 21, ..Default::default() };
        let e1 = estimate_support(&ord, 100, &opts).unwrap();
        let e2 = estimate_support(&ord, 100, &opts).unwrap();
        assert_eq!(e1, e2);
        assert!(0.0 <= e1.a_hat && e1.a_hat <= e1.b_hat && e1.b_hat <= 1.0);
        for &(a, b, _) in &e1.trace {
            assert!(0.0 <= a && a <= b && b <= 1.0);
        }
        for i in 0..21 {
            for j in i..21 {
                let v = objective(&ord, 100, i as f64 / 20.0, j as f64 / 20.0, 1.0).unwrap();
                assert!(e1.objective_value <= v);
            }
        }
        assert_relative_eq!(
            e1.objective_value,
            objective(&ord, 100, e1.a_hat, e1.b_hat, 1.0).unwrap()
        );
    }

    #[test]
    fn degenerate_all_equal_angles() {
        let sample = BivariateSample::from_pairs((1..200).map(|i| (0.3 * i as f64, 0.7 * i as f64))).unwrap();
        let ord = order_of(&sample);
        let est = estimate_support(&ord, 50, &SupportFitOptions::default()).unwrap();
        assert!((est.a_hat - 0.3).abs() < 0.01 && (est.b_hat - 0.3).abs() < 0.01, "{est:?}");
    }
}
