//! Inflection points, local minima and convexity classes of polynomial arcs.

use crate::poly::{isolate_real_roots, Interval, PolyError, Polynomial};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("derivative changes sign inside the arc at {at}")]
    MixedSigns { at: f64 },
    #[error("invalid arc [{0}, {1}]")]
    InvalidArc(f64, f64),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Points where the graph changes character inside a window.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CriticalProfile {
    /// Zeros of `f''` across which `f''` changes sign.
    pub inflections: Vec<f64>,
    /// Zeros of `f'` where `f'` goes from negative to positive.
    pub local_minima: Vec<f64>,
    /// All zeros of `f'`.
    pub derivative_zeros: Vec<f64>,
}

impl CriticalProfile {
    /// Inflections and minima merged, sorted and deduplicated.
    pub fn split_points(&self, tol: f64) -> Vec<f64> {
        let mut v: Vec<f64> = self.inflections.iter().chain(&self.local_minima).copied().collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= tol);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArcClass {
    ConvexDown,
    ConvexUpIncreasing,
    ConvexUpDecreasing,
    Linear,
}

/// Roots of `g` near `window`, each with a flag telling whether `g` changes sign there.
fn sign_changes(g: &Polynomial, window: Interval, tol: f64) -> Result<Vec<(f64, i8)>, FeatureError> {
    if g.is_zero() {
        return Ok(Vec::new());
    }
    let pad = 1.0 + window.len();
    let roots = isolate_real_roots(g, Interval::new(window.lo - pad, window.hi + pad), tol)?;
    let xs: Vec<f64> = roots.iter().map(|r| r.x).collect();
    let mut out = Vec::new();
    for (i, &r) in xs.iter().enumerate() {
        if !window.contains(r, 0.0) {
            continue;
        }
        let mut gap = f64::INFINITY;
        if i > 0 {
            gap = gap.min(r - xs[i - 1]);
        }
        if i + 1 < xs.len() {
            gap = gap.min(xs[i + 1] - r);
        }
        if !gap.is_finite() {
            gap = 1.0;
        }
        let d = tol.max(gap / 4.0);
        let (l, h) = (g.eval(r - d), g.eval(r + d));
        let dir = if l < 0.0 && h > 0.0 {
            1
        } else if l > 0.0 && h < 0.0 {
            -1
        } else {
            0
        };
        out.push((r, dir));
    }
    Ok(out)
}

pub fn critical_profile(f: &Polynomial, window: Interval, tol: f64) -> Result<CriticalProfile, FeatureError> {
    if !(window.lo <= window.hi) {
        return Err(FeatureError::InvalidArc(window.lo, window.hi));
    }
    let d1 = f.derivative();
    let d2 = d1.derivative();
    let first = sign_changes(&d1, window, tol)?;
    let second = sign_changes(&d2, window, tol)?;
    Ok(CriticalProfile {
        inflections: second.iter().filter(|(_, s)| *s != 0).map(|(x, _)| *x).collect(),
        local_minima: first.iter().filter(|(_, s)| *s == 1).map(|(x, _)| *x).collect(),
        derivative_zeros: first.iter().map(|(x, _)| *x).collect(),
    })
}

/// Sign of `g` on the arc, read at the interior sample where `|g|` is largest.
fn dominant_sign(g: &Polynomial, arc: Interval) -> f64 {
    let mut best = 0.0f64;
    for k in 0..=8 {
        let x = arc.lo + arc.len() * k as f64 / 8.0;
        let v = g.eval(x);
        if v.abs() > best.abs() {
            best = v;
        }
    }
    best.signum()
}

pub fn classify_arc(f: &Polynomial, arc: Interval, tol: f64) -> Result<ArcClass, FeatureError> {
    if !(arc.lo <= arc.hi) || !arc.lo.is_finite() || !arc.hi.is_finite() {
        return Err(FeatureError::InvalidArc(arc.lo, arc.hi));
    }
    let d1 = f.derivative();
    let d2 = d1.derivative();
    if d2.is_zero() {
        return Ok(ArcClass::Linear);
    }
    let inside = |x: f64| x > arc.lo + tol && x < arc.hi - tol;
    if let Some((x, _)) = sign_changes(&d2, arc, tol)?.into_iter().find(|(x, s)| *s != 0 && inside(*x)) {
        return Err(FeatureError::MixedSigns { at: x });
    }
    if dominant_sign(&d2, arc) < 0.0 {
        return Ok(ArcClass::ConvexDown);
    }
    if let Some((x, _)) = sign_changes(&d1, arc, tol)?.into_iter().find(|(x, s)| *s != 0 && inside(*x)) {
        return Err(FeatureError::MixedSigns { at: x });
    }
    Ok(if dominant_sign(&d1, arc) >= 0.0 { ArcClass::ConvexUpIncreasing } else { ArcClass::ConvexUpDecreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn cubic_profile() {
        let c = critical_profile(&p(&[0.0, -3.0, 0.0, 1.0]), Interval::new(-3.0, 3.0), 1e-9).unwrap();
        assert!(close(&c.inflections, &[0.0]));
        assert!(close(&c.local_minima, &[1.0]));
        assert!(close(&c.derivative_zeros, &[-1.0, 1.0]));
        let c = critical_profile(&p(&[0.0, 0.0, 0.0, 1.0]), Interval::new(-1.0, 1.0), 1e-9).unwrap();
        assert!(close(&c.inflections, &[0.0]) && c.local_minima.is_empty());
        let c = critical_profile(&p(&[0.0, 0.0, 1.0]), Interval::new(-2.0, 2.0), 1e-9).unwrap();
        assert!(close(&c.local_minima, &[0.0]) && c.inflections.is_empty());
    }

    #[test]
    fn low_degree_profiles_are_empty() {
        let c = critical_profile(&p(&[1.0, 2.0]), Interval::new(-2.0, 2.0), 1e-9).unwrap();
        assert_eq!(c, CriticalProfile::default());
        // x^4 has f'' >= 0 with a zero that is not an inflection
        let c = critical_profile(&p(&[0.0, 0.0, 0.0, 0.0, 1.0]), Interval::new(-2.0, 2.0), 1e-9).unwrap();
        assert!(c.inflections.is_empty() && close(&c.local_minima, &[0.0]));
    }

    #[test]
    fn arc_classes() {
        let sq = p(&[0.0, 0.0, 1.0]);
        assert_eq!(classify_arc(&sq, Interval::new(0.0, 1.0), 1e-9), Ok(ArcClass::ConvexUpIncreasing));
        assert_eq!(classify_arc(&sq, Interval::new(-1.0, 0.0), 1e-9), Ok(ArcClass::ConvexUpDecreasing));
        assert_eq!(classify_arc(&sq.scale(-1.0), Interval::new(-1.0, 1.0), 1e-9), Ok(ArcClass::ConvexDown));
        assert_eq!(classify_arc(&p(&[1.0, -2.0]), Interval::new(-1.0, 1.0), 1e-9), Ok(ArcClass::Linear));
        assert!(matches!(classify_arc(&sq, Interval::new(-1.0, 1.0), 1e-9), Err(FeatureError::MixedSigns { .. })));
        assert!(matches!(
            classify_arc(&p(&[0.0, 0.0, 0.0, 1.0]), Interval::new(-1.0, 1.0), 1e-9),
            Err(FeatureError::MixedSigns { .. })
        ));
    }

    proptest! {
        #[test]
        fn split_arcs_never_mix(c in prop::collection::vec(-2.0f64..2.0, 1..7)) {
            let f = Polynomial::new(c);
            let w = Interval::new(-2.0, 2.0);
            let prof = critical_profile(&f, w, 1e-9).unwrap();
            let mut cuts = vec![w.lo];
            cuts.extend(prof.split_points(1e-9).into_iter().filter(|x| *x > w.lo && *x < w.hi));
            cuts.push(w.hi);
            for pair in cuts.windows(2) {
                if pair[1] - pair[0] > 1e-6 {
                    prop_assert!(classify_arc(&f, Interval::new(pair[0], pair[1]), 1e-9).is_ok());
                }
            }
        }

        #[test]
        fn reflection_mirrors_profile(c in prop::collection::vec(-2.0f64..2.0, 1..7)) {
            let f = Polynomial::new(c);
            let w = Interval::new(-2.0, 2.0);
            let a = critical_profile(&f, w, 1e-9).unwrap();
            let b = critical_profile(&f.reflect(), w, 1e-9).unwrap();
            let mirror = |v: &[f64]| { let mut m: Vec<f64> = v.iter().map(|x| -x).collect(); m.sort_by(f64::total_cmp); m };
            let near = |x: &[f64], y: &[f64]| x.len() == y.len() && x.iter().zip(y).all(|(p, q)| (p - q).abs() < 1e-6);
            prop_assert!(near(&mirror(&a.inflections), &b.inflections));
            prop_assert!(near(&mirror(&a.derivative_zeros), &b.derivative_zeros));
        }
    }
}
