use serde::{Deserialize, Serialize};

use super::theorem2::{delta_exponent, theorem2_check, ScalingScenario};
use crate::error::{Error, Result};

/// Why the doubling sequence stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceStop {
    KMax,
    /// `t_k` within `1e-15` of `T`.
    ReachedT,
    /// `Omega` never reaches `r Omega(t_k)` before `T`.
    Bounded,
    /// No representable time beyond `t_k` improves on it.
    Resolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceModel {
    pub r: f64,
    /// `e^{2 C0}` when built from a scenario.
    #[serde(rename = "R")]
    pub big_r: Option<f64>,
    pub delta: Option<f64>,
    pub t1: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    /// `t_1, t_2, ...`
    pub tks: Vec<f64>,
    pub omegas: Vec<f64>,
    pub stop: SequenceStop,
    /// Steps where the floating-point resolution of `t` kept
    /// `|Omega(t_{k+1}) - r Omega(t_k)|` above `1e-12 Omega(t_k)`.
    pub resolution_limited: usize,
}

const PROBES: usize = 256;

/// Times with `Omega(t_{k+1}) = r Omega(t_k)`, each found by bisection to
/// `|Omega(t_{k+1}) - r Omega(t_k)| <= 1e-12 Omega(t_k)` where the
/// resolution of `t` allows it.
pub fn build_doubling_sequence(
    omega: &dyn Fn(f64) -> f64,
    r: f64,
    t1: f64,
    t_final: f64,
    k_max: usize,
) -> Result<SequenceModel> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::Domain(format!("r = {r} must exceed 1")));
    }
    if !(t_final > t1) {
        return Err(Error::Domain(format!("T = {t_final} must exceed t1 = {t1}")));
    }
    if k_max == 0 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    // probe on a grid that refines geometrically toward T
    let gap = t_final - t1;
    let mut prev = omega(t1);
    if !prev.is_finite() {
        return Err(Error::NotMonotone(format!("Omega(t1) = {prev}")));
    }
    for j in 1..PROBES {
        let half = PROBES / 2;
        let frac = if j <= half {
            0.5 * j as f64 / half as f64
        } else {
            1.0 - 0.5 * 0.5f64.powf((j - half) as f64 / 4.0)
        };
        let t = t1 + gap * frac;
        let w = omega(t);
        if !(w >= prev) {
            return Err(Error::NotMonotone(format!("Omega({t}) = {w} < {prev}")));
        }
        prev = w;
    }

    let mut tks = vec![t1];
    let mut omegas = vec![omega(t1)];
    let mut stop = SequenceStop::KMax;
    let mut resolution_limited = 0;
    while tks.len() < k_max {
        let tk = *tks.last().expect("non-empty");
        let wk = *omegas.last().expect("non-empty");
        if t_final - tk <= 1e-15 {
            stop = SequenceStop::ReachedT;
            break;
        }
        let target = r * wk;
        // bracket: march toward T halving the remaining gap
        let mut lo = tk;
        let mut hi = None;
        for _ in 0..1100 {
            let cand = lo + 0.5 * (t_final - lo);
            if cand <= lo || cand >= t_final {
                break;
            }
            if omega(cand) >= target {
                hi = Some(cand);
                break;
            }
            lo = cand;
        }
        let Some(mut hi) = hi else {
            stop = SequenceStop::Bounded;
            break;
        };
        let tol = 1e-12 * wk;
        let mut found = None;
        loop {
            let mid = lo + 0.5 * (hi - lo);
            let w = omega(mid);
            if (w - target).abs() <= tol {
                found = Some((mid, w));
                break;
            }
            if mid <= lo || mid >= hi {
                break;
            }
            if w < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (t, w) = match found {
            Some(tw) => tw,
            None => {
                // the time resolution cannot meet the tolerance: keep the
                // closer bracket end
                let (wl, wh) = (omega(lo), omega(hi));
                resolution_limited += 1;
                if (wl - target).abs() < (wh - target).abs() { (lo, wl) } else { (hi, wh) }
            }
        };
        if !(t > tk) {
            stop = SequenceStop::Resolution;
            break;
        }
        tks.push(t);
        omegas.push(w);
    }
    Ok(SequenceModel { r, big_r: None, delta: None, t1, t_final, tks, omegas, stop, resolution_limited })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesVerdict {
    pub converges: bool,
    /// `r x`
    pub ratio: f64,
    /// `sum_{k=0}^{K} (r x)^k` for `K = 0..=64`.
    pub partial_sums: Vec<f64>,
}

pub const SERIES_TERMS: usize = 64;

/// Geometric series `sum (r x)^k`: converges iff `r x < 1`.
pub fn series_verdict(r: f64, x: f64) -> Result<SeriesVerdict> {
    if !(r > 0.0) || !(x >= 0.0) {
        return Err(Error::Domain(format!("need r > 0 and x >= 0, got r = {r}, x = {x}")));
    }
    let q = r * x;
    let mut sums = Vec::with_capacity(SERIES_TERMS + 1);
    let mut term = 1.0;
    let mut acc = 0.0;
    for _ in 0..=SERIES_TERMS {
        acc += term;
        sums.push(acc);
        term *= q;
    }
    Ok(SeriesVerdict { converges: q < 1.0, ratio: q, partial_sums: sums })
}

/// `T - t_{k+1}` of the model against `(T - t1)^{1 + k delta}`, `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapBound {
    pub k: usize,
    pub gap: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub scenario: ScalingScenario,
    pub sequence: SequenceModel,
    /// `(T - t1)^delta`
    pub x: f64,
    pub series: SeriesVerdict,
    pub gap_bounds: Vec<GapBound>,
    /// Partial sums of `sum r^k (T - t_{k+1})` on the model sequence.
    pub model_sums: Vec<f64>,
    /// Terms of the model sum do not decay: `int Omega dt` diverges.
    pub model_diverges: bool,
    /// `r (T - t1)^delta < 1`
    pub t1_close_enough: bool,
    /// First sequence index `k` (1-based) with `r (T - t_k)^delta < 1`.
    pub refutation_k: Option<usize>,
    /// Bound series converges while the model sum diverges.
    pub contradiction: bool,
    pub notes: String,
}

/// Replays the doubling argument on a concrete `Omega` model.
pub fn contradiction_replay(
    s: &ScalingScenario,
    omega: &dyn Fn(f64) -> f64,
    t1: f64,
    t_final: f64,
    k_max: usize,
) -> Result<ReplayReport> {
    let v = theorem2_check(s);
    if !v.passed() {
        return Err(Error::ProofInapplicable(format!(
            "scenario {:?} fails {}",
            s.name,
            v.failed_conditions.join(", ")
        )));
    }
    let big_r = (2.0 * s.c0_upper).exp();
    let r = big_r / s.c0 + 1.0;
    let delta = delta_exponent(s.alpha, s.beta)?;
    let mut sequence = build_doubling_sequence(omega, r, t1, t_final, k_max)?;
    sequence.big_r = Some(big_r);
    sequence.delta = Some(delta);

    let gap1 = t_final - t1;
    let x = gap1.powf(delta);
    let series = series_verdict(r, x)?;

    let gaps: Vec<f64> = sequence.tks.iter().map(|t| t_final - t).collect();
    let gap_bounds: Vec<GapBound> = gaps
        .iter()
        .skip(1)
        .enumerate()
        .map(|(k, &gap)| {
            let k = k + 1;
            let bound = gap1.powf(1.0 + k as f64 * delta);
            GapBound { k, gap, bound, holds: gap <= bound }
        })
        .collect();

    let mut model_sums = Vec::new();
    let mut terms = Vec::new();
    let mut acc = 0.0;
    for (k, gap) in gaps.iter().skip(1).enumerate() {
        let term = r.powi(k as i32) * gap;
        acc += term;
        terms.push(term);
        model_sums.push(acc);
    }
    // geometric-mean term ratio over terms whose gap still carries at
    // least ten significant digits
    let floor = 1e-10 * t_final.abs().max(1.0);
    let resolved: Vec<f64> = terms.iter().zip(gaps.iter().skip(1)).filter(|(_, g)| **g > floor).map(|(t, _)| *t).collect();
    let model_diverges = match resolved.as_slice() {
        [first, .., last] => (last / first).powf(1.0 / (resolved.len() - 1) as f64) >= 1.0 - 1e-6,
        _ => false,
    };
    let t1_close_enough = series.converges;
    let refutation_k = gaps.iter().position(|g| r * g.powf(delta) < 1.0).map(|i| i + 1);
    let contradiction = series.converges && model_diverges;

    let mut notes = Vec::new();
    if !t1_close_enough {
        notes.push(format!("t1 not close enough to T: r (T - t1)^delta = {:.6e} >= 1", series.ratio));
        if let Some(k) = refutation_k {
            notes.push(format!("restarting the argument from t_{k} gives a convergent bound series"));
        }
    }
    if contradiction {
        notes.push("bound series converges while the model sum diverges: the model cannot meet the hypotheses".into());
    } else if !model_diverges {
        notes.push("model sum does not diverge: int Omega dt stays finite on this model".into());
    }
    if gap_bounds.iter().any(|g| !g.holds) {
        notes.push("the model violates the gap bound the hypotheses imply".into());
    }
    Ok(ReplayReport {
        scenario: s.clone(),
        sequence,
        x,
        series,
        gap_bounds,
        model_sums,
        model_diverges,
        t1_close_enough,
        refutation_k,
        contradiction,
        notes: notes.join("; "),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_sequences() {
        let m = build_doubling_sequence(&|t: f64| 1.0 / (1.0 - t), 2.0, 0.0, 1.0, 30).unwrap();
        for (k, t) in m.tks.iter().enumerate() {
            assert!((1.0 - t - 0.5f64.powi(k as i32)).abs() <= 1e-10, "k={k}");
        }
        let m = build_doubling_sequence(&|t: f64| (1.0 - t).powi(-2), 4.0, 0.0, 1.0, 30).unwrap();
        for (k, t) in m.tks.iter().enumerate() {
            assert!((1.0 - t - 0.5f64.powi(k as i32)).abs() <= 1e-10, "k={k}");
        }
    }

    #[test]
    fn bounded_model_stops_early() {
        let m = build_doubling_sequence(&|t: f64| 1.0 + t, 3.0, 0.0, 1.0, 30).unwrap();
        assert_eq!(m.stop, SequenceStop::Bounded);
        assert!(m.tks.len() < 30);
        assert_eq!(m.tks.len(), 1);
    }

    #[test]
    fn non_monotone_rejected() {
        let err = build_doubling_sequence(&|t: f64| (10.0 * t).sin() + 2.0, 2.0, 0.0, 1.0, 10).unwrap_err();
        assert!(matches!(err, Error::NotMonotone(_)));
    }

    #[test]
    fn series_examples() {
        let a = series_verdict(2.0, 0.4).unwrap();
        assert!(a.converges && (a.ratio - 0.8).abs() < 1e-15);
        assert_eq!(a.partial_sums.len(), 65);
        assert!(!series_verdict(2.0, 0.6).unwrap().converges);
        assert!(!series_verdict(2.0, 0.5).unwrap().converges);
    }
}
