use std::fmt::Write as _;

use super::rates::{fit_decay_rate, DecayFit};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Error history of one run with its power-law fit.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport<T> {
    pub times: Vec<T>,
    pub l2_error: Vec<T>,
    pub weighted_sup_part: Vec<T>,
    pub weighted_int_part: Vec<T>,
    pub fitted_slope: T,
    pub fitted_constant: T,
    pub r_squared: T,
    /// First index of the samples entering the fit.
    pub fit_start: usize,
}

impl<T: Real> NormReport<T> {
    /// Fits the samples with `t ≥ fit_from`; the weighted parts are filled with NaN when absent.
    pub fn new(
        times: Vec<T>,
        l2_error: Vec<T>,
        weighted_sup_part: Option<Vec<T>>,
        weighted_int_part: Option<Vec<T>>,
        fit_from: T,
    ) -> Result<Self> {
        let m = times.len();
        if l2_error.len() != m {
            return Err(Error::InsufficientSamples("times and errors differ in length".into()));
        }
        let nan = || vec![T::nan(); m];
        let weighted_sup_part = weighted_sup_part.unwrap_or_else(nan);
        let weighted_int_part = weighted_int_part.unwrap_or_else(nan);
        if weighted_sup_part.len() != m || weighted_int_part.len() != m {
            return Err(Error::InsufficientSamples("weighted parts differ in length".into()));
        }
        let fit_start = times.iter().position(|&t| t >= fit_from).unwrap_or(m);
        let fit = fit_decay_rate(&times[fit_start..], &l2_error[fit_start..])?;
        Ok(NormReport {
            times,
            l2_error,
            weighted_sup_part,
            weighted_int_part,
            fitted_slope: -fit.b_est,
            fitted_constant: fit.c,
            r_squared: fit.r_squared,
            fit_start,
        })
    }

    pub fn fit(&self) -> DecayFit<T> {
        DecayFit { c: self.fitted_constant, b_est: -self.fitted_slope, r_squared: self.r_squared }
    }

    /// `t,l2_error,weighted_sup_part,weighted_int_part,fit_line`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,l2_error,weighted_sup_part,weighted_int_part,fit_line\n");
        let fit = self.fit();
        for k in 0..self.times.len() {
            let t = self.times[k];
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                num(t),
                num(self.l2_error[k]),
                num(self.weighted_sup_part[k]),
                num(self.weighted_int_part[k]),
                num(fit.eval(t))
            );
        }
        s
    }

    /// Log-log plot of the error with the fitted line over the fit range.
    pub fn to_svg(&self, title: &str) -> String {
        let fit = self.fit();
        let ts = &self.times[self.fit_start..];
        let line: Vec<(f64, f64)> = ts.iter().map(|&t| (t.to_f64_lossy(), fit.eval(t).to_f64_lossy())).collect();
        let data: Vec<(f64, f64)> =
            self.times.iter().zip(&self.l2_error).map(|(t, e)| (t.to_f64_lossy(), e.to_f64_lossy())).collect();
        let label = format!("slope {:.4}, r² {:.6}", self.fitted_slope.to_f64_lossy(), self.r_squared.to_f64_lossy());
        loglog_svg(title, &[Series { points: data, color: "#1f4e9c", label: "l2 error".into(), markers: true },
            Series { points: line, color: "#c0392b", label, markers: false }])
    }
}

fn num<T: Real>(v: T) -> String {
    let v = v.to_f64_lossy();
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:e}")
    }
}

pub struct Series {
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub label: String,
    pub markers: bool,
}

/// Minimal self-contained SVG line plot on logarithmic axes. Non-positive points are skipped.
pub fn loglog_svg(title: &str, series: &[Series]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 440.0;
    const L: f64 = 70.0;
    const R: f64 = 20.0;
    const T: f64 = 40.0;
    const B: f64 = 50.0;
    let pts = || series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts() {
        x0 = x0.min(x.log10());
        x1 = x1.max(x.log10());
        y0 = y0.min(y.log10());
        y1 = y1.max(y.log10());
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| L + (x.log10() - x0) / (x1 - x0) * (W - L - R);
    let py = |y: f64| H - B - (y.log10() - y0) / (y1 - y0) * (H - T - B);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{L}" y="{T}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - L - R, H - T - B);
    for d in x0.floor() as i32..=x1.ceil() as i32 {
        let v = 10f64.powi(d);
        let x = px(v);
        if (L - 0.5..=W - R + 0.5).contains(&x) {
            let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{T}" x2="{x:.2}" y2="{}" stroke="#ddd"/>"##, H - B);
            let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">1e{d}</text>"#, H - B + 16.0);
        }
    }
    for d in y0.floor() as i32..=y1.ceil() as i32 {
        let v = 10f64.powi(d);
        let y = py(v);
        if (T - 0.5..=H - B + 0.5).contains(&y) {
            let _ = writeln!(s, r##"<line x1="{L}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, W - R);
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">1e{d}</text>"#, L - 6.0, y + 4.0);
        }
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">t</text>"#, (L + W - R) / 2.0, H - 12.0);
    for (k, ser) in series.iter().enumerate() {
        let good: Vec<(f64, f64)> = ser.points.iter().copied().filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite()).collect();
        if good.len() > 1 {
            let path: Vec<String> = good.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#, ser.color, path.join(" "));
        }
        if ser.markers {
            for &(x, y) in &good {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#, px(x), py(y), ser.color);
            }
        }
        let ly = T + 18.0 + 16.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"/>"#, W - R - 210.0, W - R - 190.0, ser.color);
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#, W - R - 184.0, ly + 4.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::geomspace;

    #[test]
    fn report_reproduces_regression() {
        let ts = geomspace(1.0, 100.0, 21);
        let es: Vec<f64> = ts.iter().map(|t: &f64| 2.0 * t.powf(-0.6) * (1.0 + 0.01 * t.ln().sin())).collect();
        let rep = NormReport::new(ts.clone(), es.clone(), None, None, 10.0).unwrap();
        assert_eq!(rep.fit_start, 10);
        let f = fit_decay_rate(&ts[10..], &es[10..]).unwrap();
        assert_eq!(rep.fitted_slope, -f.b_est);
        assert_eq!(rep.fitted_constant, f.c);
        assert!((0.0..=1.0).contains(&rep.r_squared));
        let csv = rep.to_csv();
        assert!(csv.starts_with("t,l2_error,weighted_sup_part,weighted_int_part,fit_line\n"));
        assert_eq!(csv.lines().count(), 22);
        let svg = rep.to_svg("err <demo>");
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("&lt;demo&gt;"));
        assert_eq!(svg.matches("<circle").count(), 21);
    }
}
