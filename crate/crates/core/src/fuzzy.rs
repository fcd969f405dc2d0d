//! Membership functions of the clean-signal fuzzy set.
//!
//! A detector score is first mapped into the band coordinate
//! `t = clamp((score + s) / 2s, 0, 1)`, where `s` is the detector's
//! [`ScoreBand`] scale. `t = 0.5` sits exactly on the crisp one-class
//! boundary. The membership shapes then map `t` to `r ∈ [0, 1]`.
//!
//! The placement of the band in score units is a calibration rule of this
//! crate, not something the fuzzy model itself prescribes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::occ::ScoreBand;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipKind {
    /// Step at the crisp boundary.
    Cr,
    /// Constant 1: contamination is ignored.
    Cr0,
    /// Linear.
    Nt,
    /// Linear then parabolic, C¹ at the joint.
    Lp,
    /// Smoothstep.
    Sm,
    /// Generalised logistic rescaled to the band.
    Ss,
}

impl MembershipKind {
    pub const ALL: [MembershipKind; 6] = [
        MembershipKind::Cr,
        MembershipKind::Cr0,
        MembershipKind::Nt,
        MembershipKind::Lp,
        MembershipKind::Sm,
        MembershipKind::Ss,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            MembershipKind::Cr => "cr",
            MembershipKind::Cr0 => "cr0",
            MembershipKind::Nt => "nt",
            MembershipKind::Lp => "lp",
            MembershipKind::Sm => "sm",
            MembershipKind::Ss => "ss",
        }
    }
}

impl fmt::Display for MembershipKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MembershipKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MembershipKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown membership kind {s:?} (expected cr|cr0|nt|lp|sm|ss)")))
    }
}

pub const DEFAULT_STEEPNESS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipSpec {
    pub kind: MembershipKind,
    /// Steepness of the `ss` logistic.
    pub steepness: f64,
}

impl MembershipSpec {
    pub fn new(kind: MembershipKind) -> Self {
        Self {
            kind,
            steepness: DEFAULT_STEEPNESS,
        }
    }

    pub fn with_steepness(kind: MembershipKind, steepness: f64) -> Result<Self> {
        if !(steepness > 0.0) || !steepness.is_finite() {
            return Err(Error::Config(format!("steepness must be positive, got {steepness}")));
        }
        Ok(Self { kind, steepness })
    }

    /// Membership for a detector score under `band`.
    pub fn of_score(&self, score: f64, band: &ScoreBand) -> f64 {
        membership(self, normalize_score(score, band))
    }
}

/// Band coordinate: 0 at `-s`, 0.5 at the boundary, 1 at `+s`.
pub fn normalize_score(score: f64, band: &ScoreBand) -> f64 {
    ((score + band.scale) / (2.0 * band.scale)).clamp(0.0, 1.0)
}

fn logistic(beta: f64, t: f64) -> f64 {
    1.0 / (1.0 + (-beta * (t - 0.5)).exp())
}

/// Membership value for band coordinate `t`.
///
/// Panics if `t` lies outside `[0, 1]`; clamp with [`normalize_score`] first.
pub fn membership(spec: &MembershipSpec, t: f64) -> f64 {
    assert!((0.0..=1.0).contains(&t), "band coordinate {t} outside [0, 1]");
    match spec.kind {
        MembershipKind::Cr => {
            if t >= 0.5 {
                1.0
            } else {
                0.0
            }
        }
        MembershipKind::Cr0 => 1.0,
        MembershipKind::Nt => t,
        MembershipKind::Lp => {
            if t <= 0.5 {
                4.0 / 3.0 * t
            } else {
                1.0 - 4.0 / 3.0 * (1.0 - t) * (1.0 - t)
            }
        }
        MembershipKind::Sm => t * t * (3.0 - 2.0 * t),
        MembershipKind::Ss => {
            let b = spec.steepness;
            // σ(1) − σ(t) and σ(t) − σ(0) are written as differences of
            // symmetric terms so that r(t) + r(1 − t) = 1 holds to rounding.
            let lo = logistic(b, 0.0);
            let hi = logistic(b, 1.0);
            let r = (logistic(b, t) - lo) / (hi - lo);
            r.clamp(0.0, 1.0)
        }
    }
}
