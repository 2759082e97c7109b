use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::acoustics::{wedge_coefficients, BottomProfile};
use crate::fem1d::{Family, FeSpace, C64};
use crate::schrodinger::{init_neumann, BoundaryMode, CnStepContext, RunOptions, TimeGrid};

use super::HarnessError;

/// Catalogue of bottom profiles on `0 ≤ t ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GrowthProfile {
    /// `e^t`
    A,
    /// `e^{−t}`
    B,
    /// `1 + (t − 1/2)²`
    C,
    /// `1 − |t − 1/2|³`
    D,
    /// `1 − (t − 1/2)³`
    E,
    /// `2 − |2t − 1|`, kink at `1/2`
    F,
    /// `1 + (t − 1/2)³`
    G,
    /// `1 + t³`
    H,
}

impl GrowthProfile {
    pub const ALL: [GrowthProfile; 8] = [
        GrowthProfile::A,
        GrowthProfile::B,
        GrowthProfile::C,
        GrowthProfile::D,
        GrowthProfile::E,
        GrowthProfile::F,
        GrowthProfile::G,
        GrowthProfile::H,
    ];

    pub fn label(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn profile(self) -> BottomProfile {
        let name = self.label().to_string();
        match self {
            GrowthProfile::A => BottomProfile::new(name, f64::exp, f64::exp, f64::exp),
            GrowthProfile::B => {
                BottomProfile::new(name, |t| (-t).exp(), |t| -(-t).exp(), |t| (-t).exp())
            }
            GrowthProfile::C => BottomProfile::new(
                name,
                |t| 1.0 + (t - 0.5).powi(2),
                |t| 2.0 * (t - 0.5),
                |_| 2.0,
            ),
            GrowthProfile::D => BottomProfile::new(
                name,
                |t| 1.0 - (t - 0.5).abs().powi(3),
                |t| -3.0 * (t - 0.5).abs() * (t - 0.5),
                |t| -6.0 * (t - 0.5).abs(),
            ),
            GrowthProfile::E => BottomProfile::new(
                name,
                |t| 1.0 - (t - 0.5).powi(3),
                |t| -3.0 * (t - 0.5).powi(2),
                |t| -6.0 * (t - 0.5),
            ),
            GrowthProfile::F => BottomProfile::new(
                name,
                |t| 2.0 - (2.0 * t - 1.0).abs(),
                |t| if t < 0.5 { 2.0 } else { -2.0 },
                |_| 0.0,
            )
            .with_kinks(vec![0.5]),
            GrowthProfile::G => BottomProfile::new(
                name,
                |t| 1.0 + (t - 0.5).powi(3),
                |t| 3.0 * (t - 0.5).powi(2),
                |t| 6.0 * (t - 0.5),
            ),
            GrowthProfile::H => {
                BottomProfile::new(name, |t| 1.0 + t.powi(3), |t| 3.0 * t * t, |t| 6.0 * t)
            }
        }
    }
}

impl fmt::Display for GrowthProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for GrowthProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c @ 'a'..='h'), None) => Ok(GrowthProfile::ALL[(c as u8 - b'a') as usize]),
            _ => Err(format!("unknown profile '{s}' (expected a letter a to h)")),
        }
    }
}

/// Multiple of the initial norm that marks the onset of growth.
pub const ONSET_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub profile: GrowthProfile,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
}

impl GrowthReport {
    pub fn initial_norm(&self) -> f64 {
        self.norms[0]
    }

    pub fn final_norm(&self) -> f64 {
        *self.norms.last().unwrap()
    }

    pub fn peak(&self) -> f64 {
        self.norms.iter().copied().fold(0.0, f64::max)
    }

    /// First time the norm exceeds [`ONSET_FACTOR`] times its initial value.
    pub fn onset(&self) -> Option<f64> {
        let limit = ONSET_FACTOR * self.initial_norm();
        self.times
            .iter()
            .zip(&self.norms)
            .find(|(_, &n)| n > limit)
            .map(|(&t, _)| t)
    }
}

/// Dynamical-Neumann run with `β = f = g = 0`, `u0 = −x(x−1)³`, `h = k = 1/n`, `T = 1`.
/// Kinks of the profile become time levels.
pub fn growth_study(profile: GrowthProfile, n: usize) -> Result<GrowthReport, HarnessError> {
    let bottom = profile.profile();
    let mut grid = TimeGrid::uniform(1.0, n)?;
    for &kink in bottom.kinks() {
        grid = TimeGrid::uniform_with_node(1.0, n, kink)?;
    }
    let coeffs = wedge_coefficients(&bottom, None, Arc::new(|_| C64::new(0.0, 0.0)))
        .with_beta(|_, _| C64::new(0.0, 0.0));
    let space = FeSpace::uniform(Family::LagrangeLinear, n)?;
    let u0 = init_neumann(&space, |x| {
        C64::new(-(x - 1.0).powi(3) - 3.0 * x * (x - 1.0).powi(2), 0.0)
    })?;
    let ctx = CnStepContext::new(space, coeffs, grid, BoundaryMode::NeumannDynamical)?;
    let h = ctx.run(u0, RunOptions::default())?;
    Ok(GrowthReport {
        profile,
        times: h.times,
        norms: h.l2_norms,
    })
}
