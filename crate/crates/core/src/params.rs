//! Admissibility conditions: `λ` thresholds, the `α` bound, the `b` window, Strichartz pairs and
//! the polynomial inequalities that cut out the allowed range of `λ`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numeric::bisect;
use crate::scalar::Real;

fn check_dim(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::BadDimension(n))
    }
}

/// The named polynomials in `λ` with the sign each must have.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Poly {
    /// `18λ³ − 39λ² + 29λ − 4 < 0`, from `b > 1/2 + λ` when `n = 3`.
    P1,
    /// `2λ² − 13λ + 3 > 0`, `n = 1`.
    P2,
    /// `2λ² − 7λ + 1 > 0`, `n = 2`.
    P3,
    /// `36λ³ − 78λ² + 47λ − 1 < 0`, `n = 3`.
    P4,
    /// `18λ³ − 51λ² + 47λ − 10 < 0`, integrability of the `𝓔` bound when `n = 3`.
    P5,
}

impl Poly {
    pub const ALL: [Poly; 5] = [Poly::P1, Poly::P2, Poly::P3, Poly::P4, Poly::P5];

    pub fn name(self) -> &'static str {
        match self {
            Poly::P1 => "p1_18l3_39l2_29l_4",
            Poly::P2 => "p2_2l2_13l_3",
            Poly::P3 => "p3_2l2_7l_1",
            Poly::P4 => "p4_36l3_78l2_47l_1",
            Poly::P5 => "p5_18l3_51l2_47l_10",
        }
    }

    fn coeffs(self) -> [f64; 4] {
        match self {
            Poly::P1 => [18.0, -39.0, 29.0, -4.0],
            Poly::P2 => [0.0, 2.0, -13.0, 3.0],
            Poly::P3 => [0.0, 2.0, -7.0, 1.0],
            Poly::P4 => [36.0, -78.0, 47.0, -1.0],
            Poly::P5 => [18.0, -51.0, 47.0, -10.0],
        }
    }

    pub fn eval<T: Real>(self, l: T) -> T {
        self.coeffs().iter().fold(T::zero(), |acc, &c| acc * l + T::lit(c))
    }

    /// `true` if the inequality asks for a negative value.
    pub fn wants_negative(self) -> bool {
        matches!(self, Poly::P1 | Poly::P4 | Poly::P5)
    }

    pub fn holds<T: Real>(self, l: T) -> bool {
        let v = self.eval(l);
        if self.wants_negative() {
            v < T::zero()
        } else {
            v > T::zero()
        }
    }

    /// Dimensions whose argument uses this inequality.
    pub fn relevant_to(self, n: usize) -> bool {
        match self {
            Poly::P2 => n == 1,
            Poly::P3 => n == 2,
            Poly::P1 | Poly::P4 | Poly::P5 => n == 3,
        }
    }
}

/// Upper bound `λ(n)` on the deceleration exponent.
pub fn lambda_threshold<T: Real>(n: usize) -> Result<T> {
    check_dim(n)?;
    let four = T::lit(4.0);
    Ok(match n {
        1 => (T::lit(13.0) - T::lit(145.0).sqrt()) / four,
        2 => (T::lit(7.0) - T::lit(41.0).sqrt()) / four,
        _ => bisect(|l| Poly::P4.eval(l), T::zero(), T::lit(0.5), T::lit(1e-12))?,
    })
}

fn check_lambda<T: Real>(n: usize, lambda: T) -> Result<T> {
    let thr = lambda_threshold::<T>(n)?;
    if !(lambda >= T::zero() && lambda < thr) {
        return Err(Error::LambdaOutOfRange { n, lambda: lambda.to_f64_lossy(), threshold: thr.to_f64_lossy() });
    }
    Ok(thr)
}

/// Supremum of admissible `α`.
pub fn alpha_max<T: Real>(n: usize, lambda: T) -> Result<T> {
    check_lambda(n, lambda)?;
    Ok(if n < 3 {
        T::one()
    } else {
        T::lit(0.5) + T::one() / (T::lit(3.0) * (T::one() - lambda)) - T::lit(0.75) * lambda
    })
}

/// An open interval `(lo, hi)`; empty when `lo ≥ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Window<T> {
    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn contains(&self, b: T) -> bool {
        b > self.lo && b < self.hi
    }

    pub fn midpoint(&self) -> T {
        (self.lo + self.hi) / T::lit(2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BWindow<T> {
    /// `((n(−2λ²+λ+1) + 8λ)/4, λ + α(1−2λ))`.
    pub nominal: Window<T>,
    /// Lower end raised to `1/2 + λ`.
    pub strict: Window<T>,
    /// The strict lower end exceeds the other one.
    pub discrepancy: bool,
}

/// Windows for the decay exponent `b`. Empty windows are reported, not raised.
pub fn b_window<T: Real>(n: usize, lambda: T, alpha: T) -> Result<BWindow<T>> {
    let amax = alpha_max(n, lambda)?;
    if !(alpha > T::zero() && alpha < amax) {
        return Err(Error::OutOfRange { what: "alpha", value: alpha.to_f64_lossy(), range: "(0, alpha_max)" });
    }
    let nn = T::from_usize_lossy(n);
    let lo_nominal = (nn * (-T::lit(2.0) * lambda * lambda + lambda + T::one()) + T::lit(8.0) * lambda) / T::lit(4.0);
    let hi = lambda + alpha * (T::one() - T::lit(2.0) * lambda);
    let half_plus = T::lit(0.5) + lambda;
    Ok(BWindow {
        nominal: Window { lo: lo_nominal, hi },
        strict: Window { lo: lo_nominal.max(half_plus), hi },
        discrepancy: half_plus > lo_nominal,
    })
}

/// Verdicts on one choice of Strichartz exponent `α_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairReport<T> {
    pub alpha_n: T,
    pub beta_n: T,
    pub k1: T,
    pub verdicts: Vec<(&'static str, bool)>,
}

impl<T> PairReport<T> {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|(_, ok)| *ok)
    }
}

/// `β_n` from `2/β_n = n(1/2 − 1/α_n)` and the conditions on `k₁ = n(1/2 − 1/α_n)`.
///
/// `alpha_n` may be `+∞`.
pub fn admissible_pair<T: Real>(n: usize, lambda: T, alpha_n: T, alpha: T) -> Result<PairReport<T>> {
    check_dim(n)?;
    if !(alpha_n > T::lit(2.0)) {
        return Err(Error::OutOfRange { what: "alpha_n", value: alpha_n.to_f64_lossy(), range: "(2, inf]" });
    }
    let nn = T::from_usize_lossy(n);
    let inv = T::one() / alpha_n;
    let k1 = nn * (T::lit(0.5) - inv);
    let beta_n = T::lit(2.0) / k1;
    let one_minus = T::one() - lambda;
    let verdicts = vec![
        ("alpha_n_gt_2_over_1_minus_lambda", alpha_n > T::lit(2.0) / one_minus),
        ("inv_alpha_n_lt_half_1_minus_lambda", inv < one_minus / T::lit(2.0)),
        ("k1_gt_n_lambda_half", k1 > nn * lambda / T::lit(2.0)),
        ("k1_plus_2alpha_lt_1_plus_rho_l", k1 + T::lit(2.0) * alpha < T::one() + T::lit(2.0) / (nn * one_minus)),
        ("sobolev_2k1_lt_n", T::lit(2.0) * k1 < nn),
    ];
    Ok(PairReport { alpha_n, beta_n, k1, verdicts })
}

/// Default `α_n`: midpoint in `1/α_n` of the interval allowed by every pair condition, or
/// `None` when that interval is empty.
pub fn default_alpha_n<T: Real>(n: usize, lambda: T, alpha: T) -> Option<T> {
    let nn = T::from_usize_lossy(n);
    let one_minus = T::one() - lambda;
    let upper = one_minus / T::lit(2.0);
    let inv_floor = (nn / T::lit(2.0) - T::one() - T::lit(2.0) / (nn * one_minus) + T::lit(2.0) * alpha) / nn;
    let lower = inv_floor.max(T::zero());
    (lower < upper).then(|| T::lit(2.0) / (lower + upper))
}

/// Value and verdict of every polynomial at `λ`, with its relevance to `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicEntry<T> {
    pub poly: Poly,
    pub value: T,
    pub satisfied: bool,
    pub relevant: bool,
}

pub fn cubic_ledger<T: Real>(n: usize, lambda: T) -> Result<Vec<CubicEntry<T>>> {
    check_dim(n)?;
    if !(lambda >= T::zero() && lambda < T::lit(0.5)) {
        return Err(Error::OutOfRange { what: "lambda", value: lambda.to_f64_lossy(), range: "[0, 1/2)" });
    }
    Ok(Poly::ALL
        .iter()
        .map(|&p| CubicEntry { poly: p, value: p.eval(lambda), satisfied: p.holds(lambda), relevant: p.relevant_to(n) })
        .collect())
}

/// Optional overrides for the free exponents.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParameterChoice<T> {
    pub alpha: Option<T>,
    pub b: Option<T>,
    pub alpha_n: Option<T>,
}

/// Every admissibility quantity for one `(n, λ)` and one choice of `(α, b, α_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterReport<T> {
    pub n: usize,
    pub lambda: T,
    pub lambda_threshold: T,
    pub rho_l: T,
    pub alpha_max: T,
    pub alpha: T,
    pub b: T,
    pub windows: BWindow<T>,
    pub pair: PairReport<T>,
    /// Supremum of the regularity index `k`: `1 + 2/(n(1−λ))`.
    pub k_max: T,
    pub cubic: Vec<CubicEntry<T>>,
}

impl<T: Real> ParameterReport<T> {
    /// Fails with [`Error::LambdaOutOfRange`] when `λ ≥ λ(n)`.
    ///
    /// Defaults: `α = 0.95·α_max`, `b` the midpoint of the strict window, `α_n` from
    /// [`default_alpha_n`] (or `4` if its interval is empty).
    pub fn new(n: usize, lambda: T, choice: ParameterChoice<T>) -> Result<Self> {
        let thr = check_lambda(n, lambda)?;
        let amax = alpha_max(n, lambda)?;
        let alpha = choice.alpha.unwrap_or(T::lit(0.95) * amax);
        let windows = b_window(n, lambda, alpha)?;
        let b = choice.b.unwrap_or_else(|| windows.strict.midpoint());
        let alpha_n = choice.alpha_n.or_else(|| default_alpha_n(n, lambda, alpha)).unwrap_or(T::lit(4.0));
        let pair = admissible_pair(n, lambda, alpha_n, alpha)?;
        Ok(ParameterReport {
            n,
            lambda,
            lambda_threshold: thr,
            rho_l: T::lit(2.0) / (T::from_usize_lossy(n) * (T::one() - lambda)),
            alpha_max: amax,
            alpha,
            b,
            windows,
            pair,
            k_max: T::one() + T::lit(2.0) / (T::from_usize_lossy(n) * (T::one() - lambda)),
            cubic: cubic_ledger(n, lambda)?,
        })
    }

    /// Named verdicts; the report is admissible iff all hold.
    pub fn verdicts(&self) -> Vec<(String, bool)> {
        let mut v = vec![
            ("lambda_below_threshold".to_string(), self.lambda < self.lambda_threshold),
            ("alpha_below_max".to_string(), self.alpha < self.alpha_max),
            ("strict_window_nonempty".to_string(), !self.windows.strict.is_empty()),
            ("b_in_strict_window".to_string(), self.windows.strict.contains(self.b)),
        ];
        v.extend(self.pair.verdicts.iter().map(|(k, ok)| (k.to_string(), *ok)));
        v.extend(self.cubic.iter().filter(|c| c.relevant).map(|c| (c.poly.name().to_string(), c.satisfied)));
        v
    }

    pub fn admissible(&self) -> bool {
        self.verdicts().iter().all(|(_, ok)| *ok)
    }

    /// Flat `(key, value)` list shared by the text and CSV forms.
    pub fn entries(&self) -> Vec<(String, String)> {
        let f = |x: T| fmt_num(x.to_f64_lossy());
        let mut e: Vec<(String, String)> = vec![
            ("n".into(), self.n.to_string()),
            ("lambda".into(), f(self.lambda)),
            ("lambda_threshold".into(), f(self.lambda_threshold)),
            ("rho_l".into(), f(self.rho_l)),
            ("alpha_max".into(), f(self.alpha_max)),
            ("alpha".into(), f(self.alpha)),
            ("b".into(), f(self.b)),
            ("b_lo_nominal".into(), f(self.windows.nominal.lo)),
            ("b_lo_strict".into(), f(self.windows.strict.lo)),
            ("b_hi".into(), f(self.windows.strict.hi)),
            ("b_window_discrepancy".into(), self.windows.discrepancy.to_string()),
            ("alpha_n".into(), f(self.pair.alpha_n)),
            ("beta_n".into(), f(self.pair.beta_n)),
            ("k1".into(), f(self.pair.k1)),
            ("k_max".into(), f(self.k_max)),
        ];
        for c in &self.cubic {
            e.push((format!("{}.value", c.poly.name()), f(c.value)));
            e.push((format!("{}.satisfied", c.poly.name()), c.satisfied.to_string()));
        }
        for (k, ok) in self.verdicts() {
            e.push((format!("verdict.{k}"), ok.to_string()));
        }
        e.push(("admissible".into(), self.admissible().to_string()));
        e
    }

    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// Header row plus one data row.
    pub fn to_csv(&self) -> String {
        let e = self.entries();
        let head: Vec<&str> = e.iter().map(|(k, _)| k.as_str()).collect();
        let row: Vec<&str> = e.iter().map(|(_, v)| v.as_str()).collect();
        format!("{}\n{}\n", head.join(","), row.join(","))
    }
}

/// Shortest round-trip decimal, with `inf`/`-inf`/`nan` spelled out.
pub(crate) fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_are_roots() {
        let l1: f64 = lambda_threshold(1).unwrap();
        let l2: f64 = lambda_threshold(2).unwrap();
        let l3: f64 = lambda_threshold(3).unwrap();
        assert!((l1 - 0.2396).abs() < 1e-4 && (l2 - 0.1492).abs() < 1e-4 && (l3 - 0.0221).abs() < 1e-4);
        assert!(Poly::P2.eval(l1).abs() < 1e-7);
        assert!(Poly::P3.eval(l2).abs() < 1e-7);
        assert!(Poly::P4.eval(l3).abs() < 1e-7);
        assert!(matches!(lambda_threshold::<f64>(4), Err(Error::BadDimension(4))));
    }

    #[test]
    fn alpha_bounds() {
        assert_eq!(alpha_max(1, 0.0).unwrap(), 1.0);
        assert!((alpha_max(3, 0.0f64).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(alpha_max(2, 0.1).unwrap(), 1.0);
        assert!(matches!(alpha_max(1, 0.3), Err(Error::LambdaOutOfRange { .. })));
        assert!(matches!(alpha_max(1, -0.1), Err(Error::LambdaOutOfRange { .. })));
    }

    #[test]
    fn window_examples() {
        let w = b_window(2, 0.0f64, 0.999_999).unwrap();
        assert!((w.nominal.lo - 0.5).abs() < 1e-15 && (w.strict.lo - 0.5).abs() < 1e-15 && !w.discrepancy);
        let w = b_window(1, 0.0f64, 0.999_999).unwrap();
        assert!((w.nominal.lo - 0.25).abs() < 1e-15 && (w.strict.lo - 0.5).abs() < 1e-15 && w.discrepancy);
        let w = b_window(1, 0.1f64, 0.95).unwrap();
        assert!((w.nominal.lo - 0.47).abs() < 1e-12);
        assert!((w.strict.lo - 0.6).abs() < 1e-12);
        assert!((w.strict.hi - 0.86).abs() < 1e-12);
        assert!(b_window(1, 0.1, 1.0).is_err());
    }

    #[test]
    fn pair_examples() {
        let p = admissible_pair(1, 0.0f64, 4.0, 0.5).unwrap();
        assert!((p.beta_n - 8.0).abs() < 1e-14 && (p.k1 - 0.25).abs() < 1e-15);
        let p = admissible_pair(2, 0.0, f64::INFINITY, 0.5).unwrap();
        assert_eq!(p.k1, 1.0);
        assert!(!p.verdicts.iter().find(|(k, _)| *k == "sobolev_2k1_lt_n").unwrap().1);
        let p = admissible_pair(1, 0.1, 4.0, 0.5).unwrap();
        assert!(p.verdicts[0].1 && p.verdicts[2].1);
        assert!(admissible_pair(1, 0.1, 2.0, 0.5).is_err());
    }

    #[test]
    fn ledger_examples() {
        let c = cubic_ledger(3, 0.0).unwrap();
        assert_eq!(c[4].value, -10.0);
        assert!(c[4].satisfied);
        let l1: f64 = lambda_threshold(1).unwrap();
        assert!(Poly::P2.eval(l1).abs() < 1e-12);
        let c = cubic_ledger(1, 0.3).unwrap();
        assert!((c[1].value + 0.72f64).abs() < 1e-12 && !c[1].satisfied);
    }

    #[test]
    fn default_alpha_n_satisfies_pair_conditions() {
        for n in 1..=3 {
            let thr: f64 = lambda_threshold(n).unwrap();
            for k in 0..10 {
                let l = thr * k as f64 / 10.0;
                let r = ParameterReport::new(n, l, ParameterChoice::default()).unwrap();
                assert!(r.pair.all_hold(), "n={n} λ={l}: {:?}", r.pair);
            }
        }
    }

    #[test]
    fn report_serialisations_agree() {
        let r = ParameterReport::new(1, 0.1, ParameterChoice::default()).unwrap();
        let kv = r.to_key_value();
        let csv = r.to_csv();
        let mut lines = csv.lines();
        let head: Vec<&str> = lines.next().unwrap().split(',').collect();
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        let pairs: Vec<String> = head.iter().zip(&row).map(|(k, v)| format!("{k}={v}")).collect();
        assert_eq!(kv.lines().collect::<Vec<_>>(), pairs);
        assert!(kv.contains("b_window_discrepancy=true"));
        assert!(r.admissible());
    }
}
