//! Twist-number contributions of local surfaces and boundary slopes.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::normal::SurfaceKind;

/// Exact rational slope value.
pub type Rational = Ratio<i64>;

/// Local contribution of one twist region to the twist number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistContribution {
    pub region: usize,
    pub kind: SurfaceKind,
    pub n: i64,
    pub k: i64,
    pub r: i64,
    /// Signed weight of the region.
    pub w: i64,
    pub value: Rational,
}

/// Table value of the twist contribution.
///
/// Negative regions: Type I gives `-2(1 - k/n)`, Type II gives
/// `2(w - r + 1 - k/n)`, Type III gives 0. Positive regions negate the same
/// expression. `w` is the signed weight of the region.
pub fn twist_contribution(kind: SurfaceKind, n: i64, k: i64, r: i64, w: i64) -> Result<Rational> {
    if n < 1 || k < 0 || k > n || w == 0 || r < 0 || r > w.abs() {
        return Err(Error::Parameter(format!("twist contribution with n={n} k={k} r={r} w={w}")));
    }
    if kind == SurfaceKind::I && k == n {
        return Err(Error::Parameter("Type I needs k < n".into()));
    }
    let q = Ratio::new(k, n);
    let one = Ratio::from_integer(1);
    let negative = match kind {
        SurfaceKind::I => Ratio::from_integer(-2) * (one - q),
        SurfaceKind::II => Ratio::from_integer(2) * (Ratio::from_integer(w - r + 1) - q),
        SurfaceKind::III => Ratio::from_integer(0),
    };
    Ok(if w < 0 { negative } else { -negative })
}

/// Sum of the local contributions; each region must appear exactly once.
pub fn total_twist(contributions: &[TwistContribution], regions: usize) -> Result<Rational> {
    let mut seen = vec![false; regions];
    for c in contributions {
        if c.region >= regions || seen[c.region] {
            return Err(Error::Parameter(format!("region {} listed twice or out of range", c.region)));
        }
        seen[c.region] = true;
    }
    if let Some(r) = seen.iter().position(|s| !s) {
        return Err(Error::Parameter(format!("missing contribution for region {r}")));
    }
    Ok(contributions.iter().map(|c| c.value).sum())
}

/// Twist number and slope of a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlopeResult {
    pub tau: Rational,
    pub tau_seifert: Rational,
    pub slope: Rational,
}

/// `s(N) = τ(N) - τ(Σ₀)`.
pub fn boundary_slope(tau: Rational, tau_seifert: Rational) -> SlopeResult {
    SlopeResult { tau, tau_seifert, slope: tau - tau_seifert }
}

/// Text form `p` or `p/q`.
pub fn format_rational(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
