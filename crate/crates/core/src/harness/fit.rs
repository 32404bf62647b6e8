use std::fmt;

use crate::{Error, Result};

/// Growth forms used to fit measured complexities against `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Form {
    LogSquared,
    Log,
    DeltaLog,
    /// `delta^e`.
    Power(f64),
    Linear,
}

impl Form {
    pub fn eval(&self, delta: f64) -> f64 {
        match *self {
            Form::LogSquared => delta.log2().powi(2),
            Form::Log => delta.log2(),
            Form::DeltaLog => delta * delta.log2(),
            Form::Power(e) => delta.powf(e),
            Form::Linear => delta,
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::LogSquared => f.write_str("log^2 D"),
            Form::Log => f.write_str("log D"),
            Form::DeltaLog => f.write_str("D log D"),
            Form::Power(e) => write!(f, "D^{e}"),
            Form::Linear => f.write_str("D"),
        }
    }
}

/// Least-squares fit of `y = a * form(delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub form: Form,
    pub coefficient: f64,
    /// `y - a * form(delta)` per point.
    pub residuals: Vec<f64>,
    /// Root mean square of the residuals relative to the measured values.
    pub relative_rms: f64,
}

fn need_points(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::Invalid(format!(
            "fitting needs at least 3 points, got {}",
            points.len()
        )));
    }
    Ok(())
}

pub fn fit_leading(points: &[(f64, f64)], form: Form) -> Result<Fit> {
    need_points(points)?;
    let (mut yf, mut ff) = (0.0, 0.0);
    for &(x, y) in points {
        let f = form.eval(x);
        yf += y * f;
        ff += f * f;
    }
    if ff == 0.0 {
        return Err(Error::Invalid(format!("{form} vanishes on every point")));
    }
    let a = yf / ff;
    let residuals: Vec<f64> = points.iter().map(|&(x, y)| y - a * form.eval(x)).collect();
    let rel: f64 = points
        .iter()
        .zip(&residuals)
        .map(|(&(_, y), r)| if y == 0.0 { 0.0 } else { (r / y).powi(2) })
        .sum::<f64>()
        / points.len() as f64;
    Ok(Fit {
        form,
        coefficient: a,
        residuals,
        relative_rms: rel.sqrt(),
    })
}

/// Slope of the least-squares line through `(ln delta, ln y)`.
pub fn loglog_exponent(points: &[(f64, f64)]) -> Result<f64> {
    need_points(points)?;
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| (x.ln(), y.max(f64::MIN_POSITIVE).ln()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("all points share one delta".into()));
    }
    Ok(sxy / sxx)
}

/// Local leading coefficients `(y[i+1] - y[i]) / (f[i+1] - f[i])` between
/// consecutive points, so additive constants cancel.
pub fn local_coefficients(points: &[(f64, f64)], form: Form) -> Vec<f64> {
    points
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (form.eval(w[1].0) - form.eval(w[0].0)))
        .collect()
}

/// Ratios of consecutive local coefficients; all near 1 when `form` is the
/// true growth.
pub fn coefficient_ratios(points: &[(f64, f64)], form: Form) -> Vec<f64> {
    local_coefficients(points, form)
        .windows(2)
        .map(|w| w[1] / w[0])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit_of_log_squared() {
        let points: Vec<_> = [4.0, 8.0, 16.0, 32.0, 64.0]
            .iter()
            .map(|&d: &f64| (d, 3.0 * d.log2().powi(2)))
            .collect();
        let fit = fit_leading(&points, Form::LogSquared).unwrap();
        assert!((fit.coefficient - 3.0).abs() < 1e-9);
        assert!(fit.relative_rms < 1e-12);
        assert!(coefficient_ratios(&points, Form::LogSquared)
            .iter()
            .all(|r| (r - 1.0).abs() < 1e-9));
    }

    #[test]
    fn exponent_of_a_power_law() {
        let points: Vec<_> = [4.0, 8.0, 16.0, 32.0]
            .iter()
            .map(|&d: &f64| (d, 7.0 * d.powf(1.5)))
            .collect();
        assert!((loglog_exponent(&points).unwrap() - 1.5).abs() < 1e-9);
        let fit = fit_leading(&points, Form::Power(1.5)).unwrap();
        assert!((fit.coefficient - 7.0).abs() < 1e-9);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_leading(&[(4.0, 1.0), (8.0, 2.0)], Form::Linear).is_err());
        assert!(loglog_exponent(&[(4.0, 1.0)]).is_err());
    }
}
