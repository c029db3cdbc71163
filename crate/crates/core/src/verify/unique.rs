use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coupling::CouplingTensor;
use crate::error::{MmotError, Result};
use crate::exec::Exec;
use crate::lp::{Columns, Simplex};
use crate::model::CostModel;
use crate::scalar::Scalar;
use crate::solve::{plan_of, tight_columns, SolveResult, TIGHT_TOL};

/// Default number of probes.
pub const PROBES: usize = 8;
/// Float-mode feasibility tolerance for certificates.
pub const FEAS_TOL: f64 = 1e-9;
/// Relative optimality tolerance: `|gap| ≤ 1e-8 · (1 + |value|)`.
pub const GAP_TOL: f64 = 1e-8;
/// Float-mode mass distance above which two plans count as different.
pub const DIFF_TOL: f64 = 1e-7;
const PROBE_RANGE: i64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessVerdict<S> {
    /// No second optimal plan was found; evidence, not proof.
    pub unique: bool,
    pub second_plan: Option<CouplingTensor<S>>,
    pub probes_used: usize,
}

pub(crate) fn within_gap<S: Scalar>(a: &S, b: &S) -> bool {
    let diff = (a.clone() - b.clone()).abs();
    if S::EXACT {
        diff.is_zero()
    } else {
        diff.to_f64() <= GAP_TOL * (1.0 + b.to_f64().abs())
    }
}

/// Checks the primal-dual certificate carried by `base`.
fn check_optimal<S: Scalar>(cm: &CostModel<S>, base: &SolveResult<S>, exec: Exec) -> Result<()> {
    if !base.coupling.is_feasible(cm, FEAS_TOL) {
        return Err(MmotError::input("base plan is not feasible for this cost model"));
    }
    let value = base.coupling.objective(cm);
    for duals in [&base.duals, &base.basis.basic_duals] {
        if !duals.is_feasible(cm, FEAS_TOL, exec)? || !within_gap(&duals.objective(cm), &value) {
            return Err(MmotError::input("base plan is not optimal for this cost model"));
        }
    }
    Ok(())
}

fn differs<S: Scalar>(a: &CouplingTensor<S>, b: &CouplingTensor<S>) -> bool {
    let d = a.distance(b);
    if S::EXACT {
        !d.is_zero()
    } else {
        d.to_f64() > DIFF_TOL
    }
}

pub fn probe_uniqueness<S: Scalar>(
    cm: &CostModel<S>,
    base: &SolveResult<S>,
    k: usize,
    seed: u64,
) -> Result<UniquenessVerdict<S>> {
    probe_uniqueness_with(cm, base, k, seed, Exec::default())
}

/// Maximizes seeded random integer functionals over the optimal face.
///
/// Every optimal plan is supported where the basic duals are tight, so the face is the
/// transportation polytope restricted to those columns. Probes come in `+r`/`-r` pairs and
/// restart from the base basis. `k = 0` reports unique without looking.
pub fn probe_uniqueness_with<S: Scalar>(
    cm: &CostModel<S>,
    base: &SolveResult<S>,
    k: usize,
    seed: u64,
    exec: Exec,
) -> Result<UniquenessVerdict<S>> {
    check_optimal(cm, base, exec)?;
    let mut verdict = UniquenessVerdict {
        unique: true,
        second_plan: None,
        probes_used: 0,
    };
    if k == 0 {
        return Ok(verdict);
    }
    let mut face = tight_columns(cm, &base.basis.basic_duals, TIGHT_TOL, exec);
    for &lin in &base.basis.lin {
        if let Err(pos) = face.binary_search(&lin) {
            face.insert(pos, lin);
        }
    }
    let start = Simplex::from_basis(cm, base.basis.lin.clone())
        .map_err(|e| MmotError::input(format!("base basis does not fit this cost model: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<i64> = Vec::new();
    for probe in 0..k {
        if probe % 2 == 0 {
            weights = (0..face.len()).map(|_| rng.gen_range(-PROBE_RANGE..=PROBE_RANGE)).collect();
        }
        let sign = if probe % 2 == 0 { 1 } else { -1 };
        let obj = |lin: usize, _: &[usize]| match face.binary_search(&lin) {
            Ok(j) => S::from_ratio(sign * weights[j], 1),
            Err(_) => S::zero(),
        };
        let mut sx = start.clone();
        sx.optimize(&obj, Columns::Subset(&face), exec)?;
        verdict.probes_used += 1;
        let plan = plan_of(cm, &sx)?;
        if differs(&plan, &base.coupling)
            && plan.is_feasible(cm, FEAS_TOL)
            && within_gap(&plan.objective(cm), &base.value)
        {
            verdict.unique = false;
            verdict.second_plan = Some(plan);
            return Ok(verdict);
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, InteractionGraph};
    use crate::marginal::DiscreteMarginal;
    use crate::scalar::Rational;
    use crate::solve::solve_kp;

    fn r(n: i64) -> Rational {
        Rational::from_ratio(n, 1)
    }

    fn two_point(a: i64, b: i64) -> DiscreteMarginal<Rational> {
        DiscreteMarginal::uniform(1, vec![vec![r(a)], vec![r(b)]]).unwrap()
    }

    #[test]
    fn monotone_pair_is_unique() {
        let cm = CostModel::new(complete(2), vec![two_point(0, 1), two_point(2, 5)]).unwrap();
        let base = solve_kp(&cm).unwrap();
        let v = probe_uniqueness(&cm, &base, PROBES, 3).unwrap();
        assert!(v.unique);
        assert_eq!(v.probes_used, PROBES);
    }

    #[test]
    fn disconnected_pair_is_not_unique() {
        let g = InteractionGraph::new(4, [(1, 2), (3, 4)]).unwrap();
        let cm = CostModel::new(g, vec![two_point(0, 1), two_point(0, 1), two_point(0, 2), two_point(0, 3)]).unwrap();
        let base = solve_kp(&cm).unwrap();
        let v = probe_uniqueness(&cm, &base, PROBES, 11).unwrap();
        assert!(!v.unique);
        assert!(v.probes_used <= 2);
        let second = v.second_plan.unwrap();
        assert!(second.is_feasible(&cm, 0.0));
        assert_eq!(second.objective(&cm), base.value);
    }

    #[test]
    fn zero_probes_is_vacuous() {
        let g = InteractionGraph::new(2, []).unwrap();
        let cm = CostModel::new(g, vec![two_point(0, 1), two_point(0, 1)]).unwrap();
        let base = solve_kp(&cm).unwrap();
        let v = probe_uniqueness(&cm, &base, 0, 0).unwrap();
        assert!(v.unique);
        assert_eq!(v.probes_used, 0);
    }

    #[test]
    fn non_optimal_base_is_rejected() {
        let cm = CostModel::new(complete(2), vec![two_point(0, 1), two_point(0, 1)]).unwrap();
        let mut base = solve_kp(&cm).unwrap();
        base.coupling = CouplingTensor::new(
            vec![2, 2],
            [(vec![0, 1], Rational::from_ratio(1, 2)), (vec![1, 0], Rational::from_ratio(1, 2))],
        )
        .unwrap();
        let err = probe_uniqueness(&cm, &base, PROBES, 0).unwrap_err();
        assert!(matches!(err, MmotError::Input(_)));
    }
}
