use std::collections::BTreeMap;

use crate::coupling::CouplingTensor;
use crate::model::CostModel;
use crate::scalar::Scalar;

/// Default tolerance on the conditional mass outside the dominant tuple.
pub const MONGE_TOL: f64 = 1e-6;

/// A first-marginal atom whose mass is spread over several tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct Split<S> {
    pub atom: usize,
    /// Partner tuples (indices of marginals `2..=m`) with their masses, heaviest first.
    pub masses: Vec<(Vec<usize>, S)>,
    /// Share of the atom's mass carried by the heaviest tuple.
    pub dominant_share: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MongeVerdict<S> {
    pub is_monge: bool,
    /// First-marginal atom to the partner indices of marginals `2..=m`; present iff Monge.
    pub map: Option<BTreeMap<usize, Vec<usize>>>,
    /// The atom with the smallest dominant share; present iff not Monge.
    pub worst_split: Option<Split<S>>,
}

/// Monge iff for every first-marginal atom one tuple carries at least `1 - mass_tol` of its
/// conditional mass (all of it in rational mode).
pub fn check_monge<S: Scalar>(coupling: &CouplingTensor<S>, mass_tol: f64) -> MongeVerdict<S> {
    let mut by_atom: BTreeMap<usize, Vec<(Vec<usize>, S)>> = BTreeMap::new();
    for (t, w) in coupling.entries() {
        by_atom.entry(t[0]).or_default().push((t[1..].to_vec(), w.clone()));
    }
    let mut map = BTreeMap::new();
    let mut worst: Option<Split<S>> = None;
    for (atom, mut masses) in by_atom {
        masses.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
        let total = masses.iter().fold(S::zero(), |acc, (_, w)| acc + w.clone());
        let top = masses[0].1.clone();
        let concentrated = if S::EXACT {
            masses.len() == 1
        } else {
            top.to_f64() >= (1.0 - mass_tol) * total.to_f64()
        };
        if concentrated {
            map.insert(atom, masses[0].0.clone());
            continue;
        }
        let share = (top / total).to_f64();
        if worst.as_ref().is_none_or(|w| share < w.dominant_share) {
            worst = Some(Split {
                atom,
                masses,
                dominant_share: share,
            });
        }
    }
    match worst {
        None => MongeVerdict {
            is_monge: true,
            map: Some(map),
            worst_split: None,
        },
        Some(w) => MongeVerdict {
            is_monge: false,
            map: None,
            worst_split: Some(w),
        },
    }
}

/// Checks `(T_i)_# μ_1 = μ_i` for every `i ≥ 2`, exactly in rational mode and within `tol`
/// otherwise. Atoms of `μ_1` missing from the map make the check fail.
pub fn pushforward_holds<S: Scalar>(map: &BTreeMap<usize, Vec<usize>>, cm: &CostModel<S>, tol: f64) -> bool {
    let mu1 = cm.marginal(0).weights();
    if map.len() != mu1.len() {
        return false;
    }
    let tol = S::tol(tol);
    (1..cm.m()).all(|i| {
        let mut pushed = vec![S::zero(); cm.marginal(i).n()];
        for (&a, partners) in map {
            pushed[partners[i - 1]] += mu1[a].clone();
        }
        pushed
            .iter()
            .zip(cm.marginal(i).weights())
            .all(|(p, w)| (p.clone() - w.clone()).abs() <= tol)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn diagonal_is_monge() {
        let c = CouplingTensor::new(vec![2, 2], [(vec![0, 0], r(1, 2)), (vec![1, 1], r(1, 2))]).unwrap();
        let v = check_monge(&c, MONGE_TOL);
        assert!(v.is_monge);
        let map = v.map.unwrap();
        assert_eq!(map[&0], vec![0]);
        assert_eq!(map[&1], vec![1]);
    }

    #[test]
    fn product_is_split_in_half() {
        let c = CouplingTensor::new(
            vec![2, 2],
            (0..2).flat_map(|a| (0..2).map(move |b| (vec![a, b], r(1, 4)))),
        )
        .unwrap();
        let v = check_monge(&c, MONGE_TOL);
        assert!(!v.is_monge);
        let split = v.worst_split.unwrap();
        assert_eq!(split.masses.len(), 2);
        assert!(split.masses.iter().all(|(_, w)| *w == r(1, 4)));
        assert_eq!(split.dominant_share, 0.5);
    }

    #[test]
    fn float_tolerance_absorbs_dust() {
        let c = CouplingTensor::new(vec![1, 2], [(vec![0, 0], 1.0 - 1e-9), (vec![0, 1], 1e-9)]).unwrap();
        assert!(check_monge(&c, MONGE_TOL).is_monge);
        assert!(!check_monge(&c.convert::<Rational>(), MONGE_TOL).is_monge);
    }
}
