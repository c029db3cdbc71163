//! Exact or floating-point solution of the discrete Kantorovich problem.

use serde::Serialize;

use crate::coupling::CouplingTensor;
use crate::duality::DualPotentials;
use crate::error::Result;
use crate::exec::Exec;
use crate::lp::{Columns, Simplex};
use crate::model::{var_cap, CostModel};
use crate::scalar::Scalar;

/// Tight-set tolerance for the refinement in float mode.
pub const TIGHT_TOL: f64 = 1e-9;
/// Float-mode threshold below which basic values count as zero.
pub const MASS_FLOOR: f64 = 1e-13;
/// Total mass added to each marginal while searching for a float-mode optimal basis.
const PERTURBATION: f64 = 1e-10;
/// Largest negative basic value accepted (and zeroed) after removing the perturbation.
const RESTORE_TOL: f64 = 1e-9;

/// Counters from one solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub pivots: usize,
    pub degenerate: usize,
    /// Auxiliary face LPs run by the dual refinement.
    pub face_lps: usize,
}

/// Final simplex basis and its (vertex) dual solution.
#[derive(Debug, Clone)]
pub struct BasisInfo<S> {
    /// Linear indices of the basic columns.
    pub lin: Vec<usize>,
    /// Basic columns as atom-index tuples.
    pub tuples: Vec<Vec<usize>>,
    /// Duals read off the basis; generally tight on more tuples than any optimal plan uses.
    pub basic_duals: DualPotentials<S>,
}

#[derive(Debug, Clone)]
pub struct SolveResult<S> {
    pub coupling: CouplingTensor<S>,
    pub value: S,
    /// Optimal duals whose tight set is exactly the union of supports of optimal plans.
    pub duals: DualPotentials<S>,
    pub basis: BasisInfo<S>,
    pub stats: SolveStats,
}

pub fn solve_kp<S: Scalar>(cm: &CostModel<S>) -> Result<SolveResult<S>> {
    solve_kp_with(cm, Exec::default())
}

pub fn solve_kp_with<S: Scalar>(cm: &CostModel<S>, exec: Exec) -> Result<SolveResult<S>> {
    cm.shape().check_cap(var_cap())?;
    let (sx, lp) = optimal_basis(cm, exec)?;
    let coupling = plan_of(cm, &sx)?;
    let value = coupling.objective(cm);
    let y = sx.duals(cm);
    let basic = DualPotentials::new(sx.layout().potentials(&y));
    let (duals, face_lps) = refine(cm, &sx, &basic, &coupling, exec)?;
    let mut idx = vec![0; cm.m()];
    let tuples = sx
        .basis()
        .iter()
        .map(|&lin| {
            cm.shape().decode(lin, &mut idx);
            idx.clone()
        })
        .collect();
    Ok(SolveResult {
        coupling,
        value,
        duals,
        basis: BasisInfo {
            lin: sx.basis().to_vec(),
            tuples,
            basic_duals: basic,
        },
        stats: SolveStats {
            pivots: lp.pivots,
            degenerate: lp.degenerate,
            face_lps,
        },
    })
}

/// Optimal basis for `cm`. Float mode runs on perturbed marginals first and falls back to
/// the plain start if the result is not feasible for the true ones.
fn optimal_basis<S: Scalar>(cm: &CostModel<S>, exec: Exec) -> Result<(Simplex<S>, crate::lp::LpStats)> {
    if !S::EXACT {
        let mut sx = Simplex::north_west_perturbed(cm, PERTURBATION)?;
        let mut stats = sx.optimize(cm, Columns::All, exec)?;
        if sx.restore_rhs(cm, RESTORE_TOL)? {
            let more = sx.optimize(cm, Columns::All, exec)?;
            stats.pivots += more.pivots;
            stats.degenerate += more.degenerate;
            return Ok((sx, stats));
        }
    }
    let mut sx = Simplex::north_west(cm)?;
    let stats = sx.optimize(cm, Columns::All, exec)?;
    Ok((sx, stats))
}

pub(crate) fn plan_of<S: Scalar>(cm: &CostModel<S>, sx: &Simplex<S>) -> Result<CouplingTensor<S>> {
    let mut idx = vec![0; cm.m()];
    let entries: Vec<(Vec<usize>, S)> = sx
        .basic_entries()
        .into_iter()
        .filter(|(_, v)| if S::EXACT { v.is_positive() } else { v.to_f64() > MASS_FLOOR })
        .map(|(lin, v)| {
            cm.shape().decode(lin, &mut idx);
            (idx.clone(), v)
        })
        .collect();
    CouplingTensor::new(cm.shape().dims().to_vec(), entries)
}

/// Linear indices with `|slack| ≤ tol`, sorted.
pub(crate) fn tight_columns<S: Scalar>(cm: &CostModel<S>, pot: &DualPotentials<S>, tol: f64, exec: Exec) -> Vec<usize> {
    let total = cm.shape().total() as usize;
    let tol = S::tol(tol);
    exec.map_chunks(total, 4096, |range| {
        let mut idx = vec![0; cm.m()];
        cm.shape().decode(range.start, &mut idx);
        let mut out = Vec::new();
        for lin in range {
            if pot.slack(cm, &idx).abs() <= tol {
                out.push(lin);
            }
            cm.shape().increment(&mut idx);
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

fn potential_sum<S: Scalar>(pot: &[Vec<S>], idx: &[usize]) -> S {
    pot.iter().zip(idx).fold(S::zero(), |acc, (u, &a)| acc + u[a].clone())
}

/// Moves the basic duals into the relative interior of the optimal dual face.
///
/// For each tight column `t` that no optimal plan can use, the face LP `max x_t` has value
/// zero and its duals `y^t` satisfy `y^t·a_s ≥ [s = t]` on the tight set with `y^t·w = 0`.
/// Adding a small multiple of `Σ y^t` keeps optimality and slackens exactly those columns.
fn refine<S: Scalar>(
    cm: &CostModel<S>,
    sx: &Simplex<S>,
    basic: &DualPotentials<S>,
    plan: &CouplingTensor<S>,
    exec: Exec,
) -> Result<(DualPotentials<S>, usize)> {
    let mut tight = tight_columns(cm, basic, TIGHT_TOL, exec);
    for &lin in sx.basis() {
        if let Err(pos) = tight.binary_search(&lin) {
            tight.insert(pos, lin);
        }
    }
    let pos_of = |lin: usize| tight.binary_search(&lin).ok();
    let mut in_face = vec![false; tight.len()];
    let mut resolved = vec![false; tight.len()];
    for t in plan.support() {
        if let Some(k) = pos_of(cm.shape().encode(t)) {
            in_face[k] = true;
        }
    }
    let mass_tol = S::tol(MASS_FLOOR);
    let slack_mark = S::tol(1e-6);
    let dims = cm.shape().dims();
    let mut dir: Vec<Vec<S>> = dims.iter().map(|&n| vec![S::zero(); n]).collect();
    let mut face_lps = 0;
    let mut idx = vec![0; cm.m()];
    for k in 0..tight.len() {
        if in_face[k] || resolved[k] {
            continue;
        }
        let target = tight[k];
        let indicator = move |lin: usize, _: &[usize]| if lin == target { S::one() } else { S::zero() };
        let mut aux = sx.clone();
        aux.optimize(&indicator, Columns::Subset(&tight), exec)?;
        face_lps += 1;
        let reach = aux
            .basic_entries()
            .into_iter()
            .find(|(lin, _)| *lin == target)
            .map_or_else(S::zero, |(_, v)| v);
        if reach > mass_tol {
            for (lin, v) in aux.basic_entries() {
                if v > mass_tol {
                    if let Some(j) = pos_of(lin) {
                        in_face[j] = true;
                    }
                }
            }
            continue;
        }
        let yt = aux.layout().potentials(&aux.duals(&indicator));
        resolved[k] = true;
        for (j, &lin) in tight.iter().enumerate() {
            if j != k && !in_face[j] && !resolved[j] {
                cm.shape().decode(lin, &mut idx);
                if potential_sum(&yt, &idx) > slack_mark {
                    resolved[j] = true;
                }
            }
        }
        for (d, u) in dir.iter_mut().zip(&yt) {
            for (dv, uv) in d.iter_mut().zip(u) {
                *dv += uv.clone();
            }
        }
    }
    if face_lps == 0 || dir.iter().flatten().all(|v| v.is_zero()) {
        return Ok((basic.clone(), face_lps));
    }
    let total = cm.shape().total() as usize;
    let half = S::from_ratio(1, 2);
    let ratios = exec.map_chunks(total, 4096, |range| {
        let mut idx = vec![0; cm.m()];
        cm.shape().decode(range.start, &mut idx);
        let mut best: Option<S> = None;
        for lin in range {
            if tight.binary_search(&lin).is_err() {
                let slope = potential_sum(&dir, &idx);
                if slope.is_negative() {
                    let r = basic.slack(cm, &idx) / (-slope);
                    if best.as_ref().is_none_or(|b| r < *b) {
                        best = Some(r);
                    }
                }
            }
            cm.shape().increment(&mut idx);
        }
        best
    });
    let mut eps = S::one();
    for r in ratios.into_iter().flatten() {
        let r = r * half.clone();
        if r < eps {
            eps = r;
        }
    }
    let values = basic
        .values
        .iter()
        .zip(&dir)
        .map(|(u, d)| u.iter().zip(d).map(|(a, b)| a.clone() + eps.clone() * b.clone()).collect())
        .collect();
    Ok((DualPotentials::new(values), face_lps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::extract_splitting_set;
    use crate::graph::{complete, cycle, edgeless};
    use crate::marginal::DiscreteMarginal;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn two_point() -> DiscreteMarginal<Rational> {
        DiscreteMarginal::uniform(1, vec![vec![r(0, 1)], vec![r(1, 1)]]).unwrap()
    }

    #[test]
    fn monotone_pair() {
        let cm = CostModel::new(complete(2), vec![two_point(), two_point()]).unwrap();
        let sol = solve_kp(&cm).unwrap();
        assert_eq!(sol.value, r(1, 2));
        assert_eq!(sol.coupling.mass(&[0, 0]), r(1, 2));
        assert_eq!(sol.coupling.mass(&[1, 1]), r(1, 2));
        assert_eq!(sol.duals.objective(&cm), sol.value);
        let w = extract_splitting_set(&sol.duals, &cm, 0.0, Exec::Sequential).unwrap();
        assert_eq!(w.len(), 2);
        assert!(!w.contains(&[0, 1]) && !w.contains(&[1, 0]));
    }

    #[test]
    fn edgeless_face_is_everything() {
        let cm = CostModel::new(edgeless(2), vec![two_point(), two_point()]).unwrap();
        let sol = solve_kp(&cm).unwrap();
        assert_eq!(sol.value, r(0, 1));
        let w = extract_splitting_set(&sol.duals, &cm, 0.0, Exec::Sequential).unwrap();
        assert_eq!(w.len(), 4);
    }

    #[test]
    fn float_and_rational_agree() {
        let mu = |seed| crate::marginal::discretize::<Rational>(crate::marginal::Density::Uniform, 3, 2, seed);
        let cm = CostModel::new(cycle(4), (0..4).map(|i| mu(10 + i)).collect()).unwrap();
        let exact = solve_kp(&cm).unwrap();
        let float = solve_kp(&cm.convert::<f64>()).unwrap();
        assert!((exact.value.to_f64() - float.value).abs() < 1e-9);
        assert!(exact.coupling.is_feasible(&cm, 0.0));
        assert!(exact.duals.is_feasible(&cm, 0.0, Exec::Sequential).unwrap());
        assert_eq!(exact.duals.objective(&cm), exact.value);
        assert_eq!(exact.basis.basic_duals.objective(&cm), exact.value);
        let seq = solve_kp_with(&cm, Exec::Sequential).unwrap();
        assert_eq!(seq.coupling, exact.coupling);
        assert_eq!(seq.duals, exact.duals);
    }
}
