//! Scalar and low-degree polynomial root finding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for scalar solves.
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Below this the derivative is treated as zero and the step bisects.
const FLAT_DERIVATIVE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootMethod {
    Newton,
    /// At least one step fell back to bisection.
    BisectionFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub root: f64,
    /// `|f(root)|`
    pub residual: f64,
    pub iterations: usize,
    pub method: RootMethod,
}

/// Newton's method kept inside a sign-change bracket.
///
/// A step bisects instead when the Newton iterate leaves the bracket, when
/// `|f'| < 1e-14`, or when the Newton correction is more than half the
/// previous step (slower than bisection). Stops as soon as `|f(x)| <= tol`.
pub fn newton_safeguarded<F, D>(f: F, df: D, bracket: (f64, f64), tol: f64, max_iter: usize) -> Result<RootResult>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let out = refine(&f, &df, bracket, tol, max_iter)?;
    if out.residual <= tol {
        Ok(out)
    } else {
        Err(Error::Convergence { iterations: out.iterations, residual: out.residual })
    }
}

/// Bracketed Newton/bisection that runs until `|f| <= ftol`, `f == 0`, or the
/// iterate stops moving at machine resolution. Returns the best point seen.
pub(crate) fn refine<F, D>(f: &F, df: &D, (a, b): (f64, f64), ftol: f64, max_iter: usize) -> Result<RootResult>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("bracket [{lo}, {hi}] is not finite")));
    }
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo.is_nan() || f_hi.is_nan() || f_lo * f_hi > 0.0 {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    if f_lo.abs() <= ftol || f_lo == 0.0 {
        return Ok(RootResult { root: lo, residual: f_lo.abs(), iterations: 0, method: RootMethod::Newton });
    }
    if f_hi.abs() <= ftol || f_hi == 0.0 {
        return Ok(RootResult { root: hi, residual: f_hi.abs(), iterations: 0, method: RootMethod::Newton });
    }
    // Orient so that f(lo) < 0 < f(hi).
    let flip = f_lo > 0.0;
    let sign = |v: f64| if flip { -v } else { v };

    let mut method = RootMethod::Newton;
    let mut x = 0.5 * (lo + hi);
    let mut dx = hi - lo;
    let mut best = (x, f64::INFINITY);

    for it in 1..=max_iter {
        let fx = f(x);
        let dfx = df(x);
        if fx.is_nan() {
            return Err(Error::Domain(format!("f({x}) is NaN")));
        }
        if fx.abs() < best.1 {
            best = (x, fx.abs());
        }
        if fx == 0.0 || fx.abs() <= ftol {
            return Ok(RootResult { root: x, residual: fx.abs(), iterations: it, method });
        }
        if sign(fx) < 0.0 {
            lo = x;
        } else {
            hi = x;
        }

        let newton = x - fx / dfx;
        let use_newton = dfx.abs() >= FLAT_DERIVATIVE
            && newton > lo
            && newton < hi
            && (2.0 * fx).abs() <= (dx * dfx).abs();
        let next = if use_newton {
            newton
        } else {
            method = RootMethod::BisectionFallback;
            0.5 * (lo + hi)
        };
        dx = next - x;

        let resolution = 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE);
        if dx.abs() <= resolution || hi - lo <= resolution {
            let fn_ = f(next);
            if fn_.abs() < best.1 {
                best = (next, fn_.abs());
            }
            return Ok(RootResult { root: best.0, residual: best.1, iterations: it, method });
        }
        x = next;
    }
    if best.1 <= ftol {
        return Ok(RootResult { root: best.0, residual: best.1, iterations: max_iter, method });
    }
    Err(Error::Convergence { iterations: max_iter, residual: best.1 })
}

/// Radius `r > 0` at which a vessel of length `length` encloses `volume`:
/// the unique positive root of `pi r^2 L + 4/3 pi r^3 = K`.
pub fn solve_vessel_radius(length: f64, volume: f64) -> Result<f64> {
    use std::f64::consts::PI;
    if !(length > 0.0 && length.is_finite() && volume > 0.0 && volume.is_finite()) {
        return Err(Error::Domain(format!("need L > 0 and K > 0, got L = {length}, K = {volume}")));
    }
    let f = |r: f64| PI * r * r * length + 4.0 * PI / 3.0 * r * r * r - volume;
    let df = |r: f64| 2.0 * PI * r * length + 4.0 * PI * r * r;
    let upper = (volume / (PI * length)).sqrt() + (3.0 * volume / (4.0 * PI)).cbrt();
    // Polish to machine resolution, then hold the result to a volume-relative residual.
    let out = refine(&f, &df, (0.0, upper), 0.0, DEFAULT_MAX_ITER)?;
    let tol = DEFAULT_TOL * volume;
    if out.residual > tol {
        return Err(Error::Convergence { iterations: out.iterations, residual: out.residual });
    }
    Ok(out.root)
}

/// A distinct real polynomial root and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// Polynomial with coefficients in ascending order of power.
#[derive(Debug, Clone, PartialEq)]
struct Poly(Vec<f64>);

impl Poly {
    fn trimmed(mut c: Vec<f64>) -> Self {
        while c.len() > 1 && *c.last().unwrap() == 0.0 {
            c.pop();
        }
        Poly(c)
    }

    fn degree(&self) -> usize {
        self.0.len() - 1
    }

    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Sum of `|c_i| |x|^i`: the scale of rounding error in `eval(x)`.
    fn magnitude(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x.abs() + c.abs())
    }

    fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect())
    }

    /// Distinct real roots with multiplicities, ascending.
    ///
    /// Real roots of `p` are isolated by the real roots of `p'`: between two
    /// consecutive critical points `p` is monotone and has at most one root,
    /// and a critical point where `p` vanishes is a multiple root.
    fn real_roots(&self) -> Vec<RealRoot> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![RealRoot { value: -self.0[0] / self.0[1], multiplicity: 1 }];
        }
        let lead = self.0[n];
        let cauchy = 1.0 + self.0[..n].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
        let deriv = self.derivative();
        let critical = deriv.real_roots();

        let vanishes = |x: f64| self.eval(x).abs() <= 64.0 * f64::EPSILON * self.magnitude(x);

        let mut nodes = vec![(-cauchy, self.eval(-cauchy))];
        for c in &critical {
            let v = if vanishes(c.value) { 0.0 } else { self.eval(c.value) };
            nodes.push((c.value, v));
        }
        nodes.push((cauchy, self.eval(cauchy)));

        let mut roots = Vec::new();
        for (k, &(x, v)) in nodes.iter().enumerate() {
            if v == 0.0 && k > 0 && k < nodes.len() - 1 {
                roots.push(x);
            }
            if let Some(&(x2, v2)) = nodes.get(k + 1) {
                if v * v2 < 0.0 {
                    let f = |t: f64| self.eval(t);
                    let df = |t: f64| deriv.eval(t);
                    if let Ok(r) = refine(&f, &df, (x, x2), 0.0, DEFAULT_MAX_ITER) {
                        roots.push(r.root);
                    }
                }
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        roots.into_iter().map(|x| RealRoot { value: x, multiplicity: self.multiplicity_at(x) }).collect()
    }

    fn multiplicity_at(&self, x: f64) -> usize {
        let mut m = 1;
        let mut d = self.derivative();
        while m < self.degree() && d.eval(x).abs() <= 1e-7 * d.magnitude(x).max(1.0) {
            m += 1;
            d = d.derivative();
        }
        m
    }
}

/// Real roots of `c4 x^4 + c3 x^3 + c2 x^2 + c1 x + c0`, ascending and
/// distinct, each tagged with its multiplicity. Vanishing leading
/// coefficients lower the degree.
pub fn quartic_real_roots(c4: f64, c3: f64, c2: f64, c1: f64, c0: f64) -> Result<Vec<RealRoot>> {
    let coeffs = [c0, c1, c2, c3, c4];
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("non-finite polynomial coefficient".into()));
    }
    if coeffs.iter().all(|&c| c == 0.0) {
        return Err(Error::Domain("all polynomial coefficients are zero".into()));
    }
    Ok(Poly::trimmed(coeffs.to_vec()).real_roots())
}

/// Horner evaluation of `c4 x^4 + ... + c0`.
pub fn eval_quartic([c4, c3, c2, c1, c0]: [f64; 5], x: f64) -> f64 {
    (((c4 * x + c3) * x + c2) * x + c1) * x + c0
}

/// Residual bound every reported root satisfies: `1e-6 * max(1, max |c_i|)`.
pub fn quartic_residual_bound(coeffs: [f64; 5]) -> f64 {
    1e-6 * coeffs.iter().map(|c| c.abs()).fold(1.0, f64::max)
}

/// Multiplier `lambda > 0` of the cantilever stationarity condition
/// `3 lambda / k = sum (3 lambda a_i / k)^(1/4)`.
///
/// With `t = 3 lambda / k` the condition reads `t = t^(1/4) * sum a_i^(1/4)`,
/// so `t = (sum a_i^(1/4))^(4/3)` in closed form. The fixed-point iteration
/// `t <- (sum a_i^(1/4))^(4/3)` is trivial in `t`, so the cross-check instead
/// iterates Newton on the original equation in `lambda` and requires agreement.
pub fn solve_cantilever_lambda(loads: &[f64], k: f64, tol: f64) -> Result<f64> {
    let closed = cantilever_lambda_closed_form(loads, k)?;
    let iterated = cantilever_lambda_iterative(loads, k, tol)?;
    let gap = (closed - iterated).abs();
    if gap > tol.max(8.0 * f64::EPSILON * closed) {
        return Err(Error::Convergence { iterations: DEFAULT_MAX_ITER, residual: gap });
    }
    Ok(closed)
}

fn check_loads(loads: &[f64], k: f64) -> Result<()> {
    if loads.is_empty() || loads.iter().any(|a| !(*a > 0.0 && a.is_finite())) || !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("loads and k must be positive, got {loads:?}, k = {k}")));
    }
    Ok(())
}

pub fn cantilever_lambda_closed_form(loads: &[f64], k: f64) -> Result<f64> {
    check_loads(loads, k)?;
    let s: f64 = loads.iter().map(|a| a.powf(0.25)).sum();
    Ok(k * s.powf(4.0 / 3.0) / 3.0)
}

/// Solves `h(lambda) = 3 lambda / k - sum (3 lambda a_i / k)^(1/4) = 0` by
/// bracketed Newton, without using the closed form.
pub fn cantilever_lambda_iterative(loads: &[f64], k: f64, tol: f64) -> Result<f64> {
    check_loads(loads, k)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let h = |lam: f64| {
        let t = 3.0 * lam / k;
        t - loads.iter().map(|a| (t * a).powf(0.25)).sum::<f64>()
    };
    let dh = |lam: f64| {
        let t = 3.0 * lam / k;
        let s: f64 = loads.iter().map(|a| 0.25 * a.powf(0.25) * t.powf(-0.75)).sum();
        3.0 / k * (1.0 - s)
    };
    // h < 0 for small lambda (the fourth-root term dominates); grow until h > 0.
    let mut hi = k;
    while h(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Bracket { lo: 0.0, hi, f_lo: f64::NAN, f_hi: f64::NAN });
        }
    }
    let lo = hi * 1e-12;
    let out = refine(&h, &dh, (lo, hi), 0.0, DEFAULT_MAX_ITER)?;
    let scale = loads.iter().map(|a| a.powf(0.25)).sum::<f64>();
    if out.residual > tol * scale.max(1.0) {
        return Err(Error::Convergence { iterations: out.iterations, residual: out.residual });
    }
    Ok(out.root)
}

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`, to interval width `tol`.
/// Returns `(argmin, min)`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn newton_on_quadratic() {
        let r = newton_safeguarded(|x| x * x - 4.0, |x| 2.0 * x, (0.0, 3.0), 1e-12, 100).unwrap();
        assert!((r.root - 2.0).abs() < 1e-12);
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn newton_on_triple_root_falls_back_to_bisection() {
        let r = newton_safeguarded(|x| x * x * x, |x| 3.0 * x * x, (-1.0, 2.0), 1e-12, 200).unwrap();
        assert!(r.residual <= 1e-12);
        assert!(r.root.abs() < 1e-4);
        assert_eq!(r.method, RootMethod::BisectionFallback);
    }

    #[test]
    fn newton_errors() {
        let e = newton_safeguarded(|x| x * x + 1.0, |x| 2.0 * x, (-1.0, 1.0), 1e-12, 100);
        assert!(matches!(e, Err(Error::Bracket { .. })));
        let e = newton_safeguarded(|x| x - 0.3, |_| 1.0, (0.0, 1.0), 0.0, 100);
        assert!(matches!(e, Err(Error::Domain(_))));
        // Step function: no root, bracket collapses without meeting tol.
        let e = newton_safeguarded(|x| if x < 0.1 { -1.0 } else { 1.0 }, |_| 0.0, (0.0, 1.0), 1e-12, 500);
        assert!(matches!(e, Err(Error::Convergence { .. })));
        let e = newton_safeguarded(|x: f64| x.powi(3) - 2.0, |x| 3.0 * x * x, (0.0, 10.0), 1e-300, 3);
        assert!(matches!(e, Err(Error::Convergence { .. })));
    }

    #[test]
    fn radius_solve_reference_points() {
        let k = 1_296_000.0;
        assert!((solve_vessel_radius(200.0, k).unwrap() - 40.31961872409872).abs() < 1e-10);
        assert!((solve_vessel_radius(10.0, k).unwrap() - 65.22523261350128).abs() < 1e-10);
        assert!((solve_vessel_radius(176.6365958424394, k).unwrap() - 42.0984455958549).abs() < 1e-9);
        assert!(solve_vessel_radius(0.0, k).is_err());
        assert!(solve_vessel_radius(10.0, -1.0).is_err());
    }

    #[test]
    fn radius_decreases_with_length() {
        let rs: Vec<f64> = (0..=190).map(|i| solve_vessel_radius(10.0 + i as f64, 1_296_000.0).unwrap()).collect();
        assert!(rs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn quartic_examples() {
        let r = quartic_real_roots(1.0, 0.0, -5.0, 0.0, 4.0).unwrap();
        let v: Vec<f64> = r.iter().map(|r| r.value).collect();
        assert_eq!(v.len(), 4);
        for (got, want) in v.iter().zip([-2.0, -1.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12, "{v:?}");
        }
        assert!(r.iter().all(|r| r.multiplicity == 1));

        let r = quartic_real_roots(1.0, -4.0, 6.0, -4.0, 1.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].value - 1.0).abs() < 1e-9);
        assert_eq!(r[0].multiplicity, 4);
    }

    #[test]
    fn quartic_degenerate_cases() {
        assert!(quartic_real_roots(0.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(quartic_real_roots(0.0, 0.0, 0.0, 0.0, 3.0).unwrap().is_empty());
        let r = quartic_real_roots(0.0, 0.0, 0.0, 2.0, -1.0).unwrap();
        assert_eq!(r, vec![RealRoot { value: 0.5, multiplicity: 1 }]);
        let r = quartic_real_roots(0.0, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(r.is_empty());
        let r = quartic_real_roots(0.0, 1.0, -3.0, 3.0, -1.0).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 3);
        // (x^2 + 1)(x - 3)^2: a double root with no sign change.
        let r = quartic_real_roots(1.0, -6.0, 10.0, -6.0, 9.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].value - 3.0).abs() < 1e-7);
        assert_eq!(r[0].multiplicity, 2);
    }

    #[test]
    fn cantilever_lambda_reference() {
        let loads = [61.0, 37.0, 19.0, 7.0, 1.0];
        let lam = solve_cantilever_lambda(&loads, 0.0624, 1e-12).unwrap();
        assert!((lam - 0.4466521202).abs() < 1e-8, "{lam}");
        let it = cantilever_lambda_iterative(&loads, 0.0624, 1e-12).unwrap();
        assert!((it - lam).abs() < 1e-12);
    }

    #[test]
    fn cantilever_lambda_symmetric_weights() {
        for k in [0.01, 0.0624, 1.0, 7.5] {
            let lam = solve_cantilever_lambda(&[1.0; 5], k, 1e-12).unwrap();
            let want = k * 5f64.powf(4.0 / 3.0) / 3.0;
            assert!((lam - want).abs() <= 1e-12 * want.max(1.0), "k = {k}");
        }
    }

    #[test]
    fn cantilever_lambda_rejects_bad_input() {
        assert!(solve_cantilever_lambda(&[1.0, 0.0], 1.0, 1e-12).is_err());
        assert!(solve_cantilever_lambda(&[1.0, 2.0], -1.0, 1e-12).is_err());
        assert!(solve_cantilever_lambda(&[], 1.0, 1e-12).is_err());
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 1.3) * (x - 1.3) + 2.0, -4.0, 5.0, 1e-10);
        // Comparing function values resolves the argmin only to ~sqrt(eps).
        assert!((x - 1.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-15);
    }

    fn expand(lead: f64, roots: &[f64]) -> [f64; 5] {
        // Ascending coefficients of lead * prod (x - r).
        let mut c = vec![lead];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= r * ci;
            }
            c = next;
        }
        c.resize(5, 0.0);
        [c[4], c[3], c[2], c[1], c[0]]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn constructed_polynomials_meet_residual_contract(
            lead in prop_oneof![-3.0f64..-0.25, 0.25f64..3.0],
            roots in proptest::collection::vec(-10.0f64..10.0, 1..=4),
        ) {
            let coeffs = expand(lead, &roots);
            let found = quartic_real_roots(coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]).unwrap();
            let bound = quartic_residual_bound(coeffs);
            for r in &found {
                prop_assert!(eval_quartic(coeffs, r.value).abs() <= bound, "{r:?} {coeffs:?}");
            }
            // Every constructed root is reported (closely clustered roots may merge).
            for &want in &roots {
                let nearest = found.iter().map(|r| (r.value - want).abs()).fold(f64::INFINITY, f64::min);
                prop_assert!(nearest < 1e-2, "missing {want}: {found:?}");
            }
            let mut sorted = roots.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).all(|w| w[1] - w[0] > 0.1) {
                prop_assert_eq!(found.len(), roots.len());
            }
        }

        #[test]
        fn newton_stays_in_bracket(c in -5.0f64..5.0, lo in -10.0f64..-5.0, hi in 5.0f64..10.0) {
            let r = newton_safeguarded(|x: f64| x.powi(3) - c, |x| 3.0 * x * x, (lo, hi), 1e-10, 500).unwrap();
            prop_assert!(r.root >= lo && r.root <= hi);
            prop_assert!(r.residual <= 1e-10);
        }
    }
}
