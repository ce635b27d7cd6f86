use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{boundary, FolnerSchedule, Window};
use crate::potential::Potential;
use crate::pressure::ExponentVector;
use crate::symbolic::{Subshift, SystemChain};

use super::entropy::level_entropy_interval;
use super::{marginal, partition_entropy, MeasureSpec};

/// `Σ w_i h_{μ_i} + w_1 ∫ f dμ`, bracketed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveInterval {
    pub lower: f64,
    pub upper: f64,
    /// `∫ f dμ`, exact.
    pub integral: f64,
    pub weights: Vec<f64>,
    /// Entropy bracket per level; `None` where the weight is zero and the
    /// level was skipped.
    pub levels: Vec<Option<(f64, f64)>>,
}

impl ObjectiveInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// `∫ f dμ` from the marginal on `D_f`.
pub fn integral(m: &MeasureSpec, s: &Subshift, f: &Potential, budget: usize) -> Result<f64> {
    let t = marginal(m, s, f.window(), budget)?;
    let mut total = 0.0;
    for (w, p) in t.iter() {
        let v = f.eval(w).ok_or_else(|| Error::Invalid(format!("potential has no row for {w:?}")))?;
        total += p * v;
    }
    Ok(total)
}

pub fn weighted_objective(
    chain: &SystemChain,
    m: &MeasureSpec,
    f: &Potential,
    a: &ExponentVector,
    schedule: &FolnerSchedule,
    budget: usize,
) -> Result<ObjectiveInterval> {
    if a.levels() != chain.levels() {
        return Err(Error::Invalid(format!("{} exponents for a chain of {} systems", a.len(), chain.levels())));
    }
    let s0 = chain.system(0);
    m.validate(s0)?;
    f.validate_for(s0)?;
    let weights = a.weights().as_slice().to_vec();
    let integral = integral(m, s0, f, budget)?;
    let mut levels = Vec::with_capacity(weights.len());
    let (mut lower, mut upper) = (weights[0] * integral, weights[0] * integral);
    for (level, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            levels.push(None);
            continue;
        }
        let (lo, hi) = level_entropy_interval(chain, m, level, schedule, budget)?;
        lower += w * lo;
        upper += w * hi;
        levels.push(Some((lo, hi)));
    }
    Ok(ObjectiveInterval { lower, upper, integral, weights, levels })
}

/// Slack in `H(α_F) <= Σ_{g∈F} H(α_{A+g}) / |A| + |B(F,-A)| log|α|`, where
/// `α` is the partition by the symbol at the origin.
pub fn entropy_subadditivity_check(
    m: &MeasureSpec,
    s: &Subshift,
    f: &Window,
    a: &Window,
    budget: usize,
) -> Result<f64> {
    let h_f = partition_entropy(&marginal(m, s, f, budget)?);
    let mut sum = 0.0;
    for &g in f.points() {
        sum += partition_entropy(&marginal(m, s, &a.translate(g), budget)?);
    }
    let collar = boundary(f, &a.negate())?.len() as f64;
    Ok(sum / a.len() as f64 + collar * (s.size() as f64).ln() - h_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{BoxKind, Dim};
    use crate::symbolic::DEFAULT_BUDGET;

    fn sched(n: usize) -> FolnerSchedule {
        FolnerSchedule::new(BoxKind::Origin, Dim::One, 1, n).unwrap()
    }

    #[test]
    fn uniform_on_collapse_chain() {
        let chain = SystemChain::full_collapse(&[0, 0, 1, 1], Dim::One).unwrap();
        let f = Potential::zero(4, Dim::One).unwrap();
        let a = ExponentVector::new(vec![0.5]).unwrap();
        let v = weighted_objective(&chain, &MeasureSpec::uniform(4), &f, &a, &sched(4), DEFAULT_BUDGET).unwrap();
        assert!((v.lower - 1.5 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(v.width(), 0.0);
    }

    #[test]
    fn point_mass_dynamics_score_zero() {
        let chain = SystemChain::full_collapse(&[0, 0, 1, 1], Dim::One).unwrap();
        let f = Potential::zero(4, Dim::One).unwrap();
        let a = ExponentVector::new(vec![0.3]).unwrap();
        let m = MeasureSpec::bernoulli(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let v = weighted_objective(&chain, &m, &f, &a, &sched(3), DEFAULT_BUDGET).unwrap();
        assert_eq!((v.lower, v.upper), (0.0, 0.0));
    }

    #[test]
    fn point_level_contributes_nothing() {
        let chain = SystemChain::to_point(Subshift::full(2, Dim::One).unwrap()).unwrap();
        let f = Potential::single_site("x0", &[0.0, 1.0], Dim::One).unwrap();
        let a = ExponentVector::new(vec![0.4]).unwrap();
        let m = MeasureSpec::markov(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let v = weighted_objective(&chain, &m, &f, &a, &sched(3), DEFAULT_BUDGET).unwrap();
        assert_eq!(v.levels[1], Some((0.0, 0.0)));
        let MeasureSpec::Markov { stationary, transition } = &m else { unreachable!() };
        let expected = 0.4 * (super::super::markov_entropy_rate(stationary, transition) + stationary[1]);
        assert!((v.lower - expected).abs() < 1e-12);
    }

    #[test]
    fn subadditivity_examples() {
        let full = Subshift::full(2, Dim::One).unwrap();
        let f = Window::interval(0, 5).unwrap();
        let m = MeasureSpec::bernoulli(vec![0.3, 0.7]).unwrap();
        let slack = entropy_subadditivity_check(&m, &full, &f, &Window::origin(Dim::One), DEFAULT_BUDGET).unwrap();
        assert!(slack.abs() < 1e-12);

        let golden = Subshift::golden_mean();
        let parry = MeasureSpec::parry(&golden).unwrap();
        let slack = entropy_subadditivity_check(
            &parry,
            &golden,
            &Window::interval(0, 6).unwrap(),
            &Window::interval(0, 2).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(slack >= 0.0);
        let same = entropy_subadditivity_check(&parry, &golden, &f, &f, DEFAULT_BUDGET).unwrap();
        assert!(same >= 0.0);
    }
}
