//! Curvature-based error certificates.
//!
//! With k = √|H| and x = σk, the negative-curvature term
//! (2/k)·asinh(ε sinh(x)/(2σ)) is evaluated as ε·sinhc(x)·asinhc(y) with
//! y = (εk/2)·sinhc(x), which stays accurate as H → 0⁻ and switches to
//! log-domain arithmetic once sinh(x) would overflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SERIES_CUTOFF: f64 = 1e-6;
/// sinh(x) overflows shortly after 710.
const LOG_DOMAIN_CUTOFF: f64 = 700.0;

/// sinh(x)/x.
pub fn sinhc(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0))
    } else {
        x.sinh() / x
    }
}

/// asinh(y)/y.
pub fn asinhc(y: f64) -> f64 {
    let y = y.abs();
    if y < SERIES_CUTOFF {
        let y2 = y * y;
        1.0 - y2 / 6.0 + 3.0 * y2 * y2 / 40.0 - 5.0 * y2 * y2 * y2 / 112.0
    } else {
        y.asinh() / y
    }
}

/// Extra retraction terms: ζ bounds d(r_p(v), exp_p(v)), η bounds
/// ‖r_p⁻¹(q) − log_p(q)‖, and Λ is the max-norm of the linear scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetractionTerms {
    pub zeta: f64,
    pub eta: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Max tangent-space error ε.
    pub epsilon: f64,
    /// Chart radius σ.
    pub sigma: f64,
    /// Curvature lower bound H.
    pub curvature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retraction: Option<RetractionTerms>,
}

impl BoundInputs {
    pub fn new(epsilon: f64, sigma: f64, curvature: f64) -> Self {
        Self {
            epsilon,
            sigma,
            curvature,
            retraction: None,
        }
    }

    pub fn with_retraction(mut self, zeta: f64, eta: f64, lambda: f64) -> Self {
        self.retraction = Some(RetractionTerms { zeta, eta, lambda });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (e, s, h) = (self.epsilon, self.sigma, self.curvature);
        if !e.is_finite() || !s.is_finite() || !h.is_finite() {
            return Err(Error::invalid("bound inputs must be finite"));
        }
        if e < 0.0 || s < 0.0 {
            return Err(Error::invalid(format!("ε and σ must be ≥ 0 (ε = {e}, σ = {s})")));
        }
        if s == 0.0 && e > 0.0 {
            return Err(Error::invalid("σ = 0 with ε > 0: the chart cannot contain both functions"));
        }
        if e > 2.0 * s * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "ε = {e} exceeds 2σ = {}: two chart points cannot be that far apart",
                2.0 * s
            )));
        }
        if let Some(r) = self.retraction {
            if !(r.zeta >= 0.0 && r.eta >= 0.0 && r.lambda >= 1.0)
                || !(r.zeta.is_finite() && r.eta.is_finite() && r.lambda.is_finite())
            {
                return Err(Error::invalid("retraction terms need ζ ≥ 0, η ≥ 0 and Λ ≥ 1"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundForm {
    Exact,
    Simplified,
}

/// (2/√|H|)·asinh(ε sinh(σ√|H|)/(2σ)) for H < 0.
fn asinh_term(eps: f64, sigma: f64, h: f64) -> f64 {
    if eps == 0.0 {
        return 0.0;
    }
    let k = (-h).sqrt();
    let x = sigma * k;
    if x <= LOG_DOMAIN_CUTOFF {
        let y = 0.5 * eps * k * sinhc(x);
        return eps * sinhc(x) * asinhc(y);
    }
    // ln y with sinh(x) = eˣ(1 − e^{−2x})/2
    let ln_y = (eps / (4.0 * sigma)).ln() + x;
    let asinh_y = if ln_y > 20.0 {
        ln_y + std::f64::consts::LN_2
    } else {
        ln_y.exp().asinh()
    };
    2.0 / k * asinh_y
}

/// (2/√|H|)·ln(ε e^{σ√|H|}/(2σ) + 1) for H < 0.
fn log_term(eps: f64, sigma: f64, h: f64) -> f64 {
    if eps == 0.0 {
        return 0.0;
    }
    let k = (-h).sqrt();
    let ln_z = (eps / (2.0 * sigma)).ln() + sigma * k;
    let ln1p_z = if ln_z > 30.0 {
        ln_z + (-ln_z).exp()
    } else {
        ln_z.exp().ln_1p()
    };
    2.0 / k * ln1p_z
}

/// Bound on d_M(f, f̂) given ‖g − ĝ‖ ≤ ε on a chart of radius σ with
/// curvature ≥ H. H ≥ 0 (including H = 0) gives ε.
pub fn forward_error_bound(inputs: &BoundInputs, form: BoundForm) -> Result<f64> {
    inputs.validate()?;
    let BoundInputs {
        epsilon: e,
        sigma: s,
        curvature: h,
        ..
    } = *inputs;
    if h >= 0.0 {
        return Ok(e);
    }
    Ok(e + match form {
        BoundForm::Exact => asinh_term(e, s, h),
        BoundForm::Simplified => log_term(e, s, h),
    })
}

/// Bound when exp/log are replaced by a retraction and its inverse.
pub fn retraction_error_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let r = inputs
        .retraction
        .ok_or_else(|| Error::invalid("retraction bound needs ζ, η and Λ"))?;
    let shifted = inputs.epsilon + r.lambda * r.eta;
    let base = shifted + r.zeta;
    if inputs.curvature >= 0.0 {
        return Ok(base);
    }
    if inputs.sigma == 0.0 {
        return Err(Error::invalid("σ = 0 with a nonzero retraction error"));
    }
    Ok(base + asinh_term(shifted, inputs.sigma, inputs.curvature))
}

/// Exact distance on a constant-curvature H < 0 model when ‖g‖ = ‖ĝ‖ = σ
/// and ‖g − ĝ‖ = ε.
pub fn tight_distance(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    if inputs.curvature >= 0.0 {
        return Err(Error::invalid("the tight distance needs H < 0"));
    }
    Ok(asinh_term(inputs.epsilon, inputs.sigma, inputs.curvature))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionBounds {
    pub lower: f64,
    pub upper: f64,
    /// Lower bound valid on constant-curvature models.
    pub model_lower: f64,
}

/// Bounds on the condition number of g ↦ exp_p ∘ g.
pub fn condition_number_bounds(sigma: f64, curvature: f64) -> Result<ConditionBounds> {
    if !(sigma > 0.0) || !sigma.is_finite() || !curvature.is_finite() {
        return Err(Error::invalid("condition bounds need σ > 0 and finite H"));
    }
    if curvature >= 0.0 {
        return Ok(ConditionBounds {
            lower: 1.0,
            upper: 1.0,
            model_lower: 1.0,
        });
    }
    let s = sinhc(sigma * (-curvature).sqrt());
    Ok(ConditionBounds {
        lower: 1.0,
        upper: 1.0 + s,
        model_lower: s,
    })
}

/// Side C opposite the angle `c` in a triangle with sides A, B on the
/// simply connected model of constant curvature H, via the haversine form
/// of the law of cosines.
pub fn model_triangle_side(a: f64, b: f64, c: f64, h: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) || !a.is_finite() || !b.is_finite() || !c.is_finite() || !h.is_finite() {
        return Err(Error::invalid("triangle sides must be finite and ≥ 0"));
    }
    let half_c = (0.5 * c).sin();
    if h > 0.0 {
        let k = h.sqrt();
        let limit = std::f64::consts::PI / k;
        if a > limit || b > limit {
            return Err(Error::Domain(format!(
                "sides must not exceed π/√H = {limit} on the sphere"
            )));
        }
        let d = (0.5 * k * (a - b)).sin();
        let hav = d * d + (k * a).sin() * (k * b).sin() * half_c * half_c;
        Ok(2.0 / k * hav.clamp(0.0, 1.0).sqrt().asin())
    } else if h < 0.0 {
        let k = (-h).sqrt();
        let d = (0.5 * k * (a - b)).sinh();
        let hav = d * d + (k * a).sinh() * (k * b).sinh() * half_c * half_c;
        Ok(2.0 / k * hav.max(0.0).sqrt().asinh())
    } else {
        Ok(((a - b).powi(2) + 4.0 * a * b * half_c * half_c).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn exact(e: f64, s: f64, h: f64) -> f64 {
        forward_error_bound(&BoundInputs::new(e, s, h), BoundForm::Exact).unwrap()
    }

    fn simplified(e: f64, s: f64, h: f64) -> f64 {
        forward_error_bound(&BoundInputs::new(e, s, h), BoundForm::Simplified).unwrap()
    }

    /// Direct transcription of the formulas, used away from their
    /// degenerate regimes.
    fn naive_exact(e: f64, s: f64, h: f64) -> f64 {
        let k = (-h).sqrt();
        e + 2.0 / k * (e * (s * k).sinh() / (2.0 * s)).asinh()
    }

    fn naive_simplified(e: f64, s: f64, h: f64) -> f64 {
        let k = (-h).sqrt();
        e + 2.0 / k * (e * (s * k).exp() / (2.0 * s) + 1.0).ln()
    }

    #[test]
    fn forward_examples() {
        assert_eq!(exact(0.1, 1.0, 0.0), 0.1);
        assert_eq!(exact(0.1, 1.0, 2.5), 0.1);
                assert!((exact(0.1, 1.0, -1.0) - 0.217_452_596_398_134_5).abs() < 1e-13);
        assert!((exact(0.1, 1.0, -1e-12) - 0.2).abs() < 1e-6);
        assert!(forward_error_bound(&BoundInputs::new(0.1, 0.0, -1.0), BoundForm::Exact).is_err());
        assert!(forward_error_bound(&BoundInputs::new(3.0, 1.0, -1.0), BoundForm::Exact).is_err());
        assert_eq!(exact(0.0, 0.0, -1.0), 0.0);
    }

    #[test]
    fn stable_forms_match_naive_in_the_bulk() {
        for &(e, s, h) in &[(0.1, 1.0, -1.0), (1e-3, 2.0, -0.3), (0.5, 0.7, -4.0)] {
            let a = exact(e, s, h);
            let b = naive_exact(e, s, h);
            assert!((a - b).abs() <= 1e-13 * b, "{a} {b}");
            let a = simplified(e, s, h);
            let b = naive_simplified(e, s, h);
            assert!((a - b).abs() <= 1e-12 * b, "{a} {b}");
        }
    }

    #[test]
    fn tiny_epsilon_keeps_relative_accuracy() {
        // 40-digit reference values
        let a = exact(1e-9, 3.0, -2.0);
        assert!((a - 9.199_729_131_645_302e-9).abs() < 1e-14 * a);
        let b = simplified(1e-9, 3.0, -2.0);
        assert!((b - 1.740_284_511_444_537_4e-8).abs() < 1e-14 * b);
    }

    #[test]
    fn large_curvature_does_not_overflow() {
        let b = exact(1e-3, 10.0, -1e4);
        assert!(b.is_finite());
        // asinh(y) ≈ ln(2y) regime: ε + (2/k)(ln(ε/(2σ)) + σk)
        let k = 100.0;
        let want = 1e-3 + 2.0 / k * ((1e-3f64 / 20.0).ln() + 10.0 * k);
        assert!((b - want).abs() < 1e-12 * want);
        assert!(simplified(1e-3, 10.0, -1e4).is_finite());
        assert!(simplified(1e-3, 10.0, -1e4) >= b);
    }

    #[test]
    fn retraction_examples() {
        let base = BoundInputs::new(0.1, 1.0, -1.0);
        let r = retraction_error_bound(&base.with_retraction(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(r, exact(0.1, 1.0, -1.0));
        let r = retraction_error_bound(&BoundInputs::new(0.0, 1.0, 0.0).with_retraction(1e-3, 1e-4, 2.0)).unwrap();
        assert!((r - 1.2e-3).abs() < 1e-18);
        let r = retraction_error_bound(&base.with_retraction(0.01, 0.01, 1.5)).unwrap();
        let want = 0.125 + 2.0 * (0.115 * 1f64.sinh() / 2.0).asinh();
        assert!((r - want).abs() < 1e-14);
        assert!(retraction_error_bound(&base).is_err());
    }

    #[test]
    fn tight_distance_examples() {
        assert_eq!(tight_distance(&BoundInputs::new(0.0, 1.0, -1.0)).unwrap(), 0.0);
        let t = tight_distance(&BoundInputs::new(0.1, 1.0, -1.0)).unwrap();
        assert!((t - 0.117_452_596_398_134_5).abs() < 1e-13);
        let (s, h) = (1.3f64, -2.0f64);
        let x: f64 = s * (-h).sqrt();
        let ratio = tight_distance(&BoundInputs::new(1e-8, s, h)).unwrap() / 1e-8;
        assert!((ratio - x.sinh() / x).abs() < 1e-7);
        assert!(tight_distance(&BoundInputs::new(0.1, 1.0, 0.0)).is_err());
    }

    #[test]
    fn condition_examples() {
        let c = condition_number_bounds(1.0, 0.0).unwrap();
        assert_eq!((c.lower, c.upper, c.model_lower), (1.0, 1.0, 1.0));
        let c = condition_number_bounds(10.0, -10.0).unwrap();
        assert!(c.upper >= 8.5e11 && c.upper <= 9.5e11, "{}", c.upper);
        let c = condition_number_bounds(1e-8, -1.0).unwrap();
        assert!((c.upper - 2.0).abs() < 1e-15);
        assert!(condition_number_bounds(0.0, -1.0).is_err());
    }

    #[test]
    fn triangle_examples() {
        for h in [-2.0, 0.0, 1.0] {
            assert!((model_triangle_side(0.7, 0.2, 0.0, h).unwrap() - 0.5).abs() < 1e-15);
        }
        assert!((model_triangle_side(3.0, 4.0, FRAC_PI_2, 0.0).unwrap() - 5.0).abs() < 1e-15);
        let c = model_triangle_side(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, 1.0).unwrap();
        assert!((c - FRAC_PI_2).abs() < 1e-15);
        assert!(model_triangle_side(4.0, 1.0, 1.0, 1.0).is_err());
        // antipodal hinge on the unit sphere
        assert!((model_triangle_side(FRAC_PI_2, FRAC_PI_2, PI, 1.0).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn continuity_at_zero_curvature() {
        for (e, s) in [(0.1, 1.0), (0.3, 0.2), (1e-4, 5.0)] {
            assert!((exact(e, s, -1e-12) - 2.0 * e).abs() < 1e-6);
        }
        for (a, b, c) in [(0.3, 0.8, 1.1), (2.0, 1.0, 0.4), (1.0, 1.0, 3.0)] {
            let flat = model_triangle_side(a, b, c, 0.0).unwrap();
            for h in [1e-12, -1e-12] {
                assert!((model_triangle_side(a, b, c, h).unwrap() - flat).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn series_branches_are_continuous() {
        for x in [9.9e-7, 1e-6, 1.01e-6] {
            assert!((sinhc(x) - 1.0).abs() < 1e-12);
            assert!((asinhc(x) - 1.0).abs() < 1e-12);
        }
        let below = asinh_term(0.1, 699.9 / 30.0, -900.0);
        let above = asinh_term(0.1, 700.1 / 30.0, -900.0);
        let direct = |s: f64| naive_exact(0.1, s, -900.0) - 0.1;
        assert!((below - direct(699.9 / 30.0)).abs() < 1e-12 * below);
        assert!((above - below).abs() < 0.1);
    }

    proptest! {
        #[test]
        fn ordering_and_monotonicity(
            s in 0.01f64..5.0,
            frac in 0.0f64..1.0,
            h in -20.0f64..-1e-9,
            bump in 1.0f64..2.0,
        ) {
            let e = 2.0 * s * frac;
            let t = tight_distance(&BoundInputs::new(e, s, h)).unwrap();
            let b = exact(e, s, h);
            let b2 = simplified(e, s, h);
            prop_assert!(t <= b * (1.0 + 1e-14));
            prop_assert!(b <= b2 * (1.0 + 1e-14));
            // nondecreasing in ε, |H| and σ
            let e2 = (e * bump).min(2.0 * s);
            prop_assert!(exact(e2, s, h) >= b * (1.0 - 1e-14));
            prop_assert!(exact(e, s, h * bump) >= b * (1.0 - 1e-14));
            prop_assert!(exact(e, s * bump, h) >= b * (1.0 - 1e-14));
        }
    }
}
