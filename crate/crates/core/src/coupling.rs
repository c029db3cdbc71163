//! Sparse transport plans on the product of supports.

use std::collections::BTreeMap;

use crate::error::{MmotError, Result};
use crate::model::CostModel;
use crate::scalar::Scalar;

/// Sparse m-way plan: atom-index tuples mapped to positive masses.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTensor<S> {
    dims: Vec<usize>,
    entries: BTreeMap<Vec<usize>, S>,
}

impl<S: Scalar> CouplingTensor<S> {
    /// Builds a plan, summing repeated tuples and dropping zero masses.
    pub fn new(dims: Vec<usize>, entries: impl IntoIterator<Item = (Vec<usize>, S)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<usize>, S> = BTreeMap::new();
        for (t, w) in entries {
            if t.len() != dims.len() || t.iter().zip(&dims).any(|(&a, &n)| a >= n) {
                return Err(MmotError::input(format!("tuple {t:?} does not fit shape {dims:?}")));
            }
            if w.is_negative() {
                return Err(MmotError::input(format!("negative mass at {t:?}")));
            }
            *map.entry(t).or_insert_with(S::zero) += w;
        }
        map.retain(|_, w| !w.is_zero());
        Ok(CouplingTensor { dims, entries: map })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, S> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mass(&self, t: &[usize]) -> S {
        self.entries.get(t).cloned().unwrap_or_else(S::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.entries.keys()
    }

    pub fn total_mass(&self) -> S {
        self.entries.values().fold(S::zero(), |acc, w| acc + w.clone())
    }

    /// Axis-`i` marginal (0-based) as a weight vector.
    pub fn axis_marginal(&self, i: usize) -> Vec<S> {
        let mut out = vec![S::zero(); self.dims[i]];
        for (t, w) in &self.entries {
            out[t[i]] += w.clone();
        }
        out
    }

    /// `Σ γ(t) b(t)` over the support.
    pub fn objective(&self, cm: &CostModel<S>) -> S {
        self.entries
            .iter()
            .fold(S::zero(), |acc, (t, w)| acc + w.clone() * cm.cost_unchecked(t))
    }

    /// Largest deviation of any axis marginal from the model's weights.
    pub fn marginal_error(&self, cm: &CostModel<S>) -> S {
        let mut worst = S::zero();
        for i in 0..self.dims.len() {
            for (got, want) in self.axis_marginal(i).iter().zip(cm.marginal(i).weights()) {
                worst = S::max_of(worst, (got.clone() - want.clone()).abs());
            }
        }
        worst
    }

    /// Marginal constraints hold exactly (rational) or within `tol` (float).
    pub fn is_feasible(&self, cm: &CostModel<S>, tol: f64) -> bool {
        if self.dims != cm.shape().dims() {
            return false;
        }
        let err = self.marginal_error(cm);
        if S::EXACT {
            err.is_zero()
        } else {
            err.to_f64() <= tol
        }
    }

    /// Largest mass difference between two plans on the union of supports.
    pub fn distance(&self, other: &Self) -> S {
        let mut worst = S::zero();
        for (t, w) in &self.entries {
            worst = S::max_of(worst, (w.clone() - other.mass(t)).abs());
        }
        for (t, w) in &other.entries {
            if !self.entries.contains_key(t) {
                worst = S::max_of(worst, w.abs());
            }
        }
        worst
    }

    pub fn convert<T: Scalar>(&self) -> CouplingTensor<T> {
        CouplingTensor {
            dims: self.dims.clone(),
            entries: self
                .entries
                .iter()
                .map(|(t, w)| (t.clone(), T::from_rational(&w.to_rational())))
                .filter(|(_, w)| !w.is_zero())
                .collect(),
        }
    }

    /// One line per entry: `mass i1 .. im` with 0-based atom indices.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (t, w) in &self.entries {
            s.push_str(&crate::scalar::format_scalar(w));
            for a in t {
                s.push_str(&format!(" {a}"));
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn marginals_and_distance() {
        let diag = CouplingTensor::new(vec![2, 2], [(vec![0, 0], r(1, 2)), (vec![1, 1], r(1, 2))]).unwrap();
        let prod = CouplingTensor::new(
            vec![2, 2],
            [(vec![0, 0], r(1, 4)), (vec![0, 1], r(1, 4)), (vec![1, 0], r(1, 4)), (vec![1, 1], r(1, 4))],
        )
        .unwrap();
        assert_eq!(diag.axis_marginal(0), prod.axis_marginal(0));
        assert_eq!(diag.axis_marginal(1), vec![r(1, 2), r(1, 2)]);
        assert_eq!(diag.distance(&prod), r(1, 4));
        assert_eq!(diag.total_mass(), r(1, 1));
        assert!(CouplingTensor::new(vec![2], [(vec![2], r(1, 1))]).is_err());
        assert!(CouplingTensor::new(vec![2], [(vec![1], r(-1, 1))]).is_err());
        let z = CouplingTensor::new(vec![2], [(vec![1], r(0, 1))]).unwrap();
        assert!(z.is_empty());
    }
}
