//! Dual potentials, b-conjugation, splitting sets and the splitting-set lemma oracle.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{MmotError, Result};
use crate::exec::Exec;
use crate::graph::VertexSet;
use crate::model::{var_cap, CostModel};
use crate::scalar::{format_scalar, Scalar};

/// Splitting-set tolerance in float mode.
pub const SPLIT_TOL: f64 = 1e-7;
/// Stop b-conjugate sweeps when the objective drops by less than this.
pub const SWEEP_TOL: f64 = 1e-10;
pub const MAX_SWEEPS: usize = 100;

const SCAN_CHUNK: usize = 4096;

/// Per-marginal potentials `u_i` over each marginal's atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPotentials<S> {
    pub values: Vec<Vec<S>>,
}

impl<S: Scalar> DualPotentials<S> {
    pub fn new(values: Vec<Vec<S>>) -> Self {
        DualPotentials { values }
    }

    fn check_shape(&self, cm: &CostModel<S>) -> Result<()> {
        let ok = self.values.len() == cm.m()
            && self.values.iter().zip(cm.shape().dims()).all(|(u, &n)| u.len() == n);
        if ok {
            Ok(())
        } else {
            Err(MmotError::input("potentials do not match the marginal sizes"))
        }
    }

    /// `Σ_i Σ_a w_i(a) u_i(a)`.
    pub fn objective(&self, cm: &CostModel<S>) -> S {
        self.values
            .iter()
            .zip(cm.marginals())
            .fold(S::zero(), |acc, (u, mu)| {
                u.iter()
                    .zip(mu.weights())
                    .fold(acc, |a, (x, w)| a + x.clone() * w.clone())
            })
    }

    /// `Σ u_i(t_i) - b(t)`.
    pub fn slack(&self, cm: &CostModel<S>, idx: &[usize]) -> S {
        let mut s = -cm.cost_unchecked(idx);
        for (u, &a) in self.values.iter().zip(idx) {
            s += u[a].clone();
        }
        s
    }

    /// Smallest slack over the whole product grid and a tuple attaining it.
    pub fn min_slack(&self, cm: &CostModel<S>, exec: Exec) -> Result<(S, Vec<usize>)> {
        self.check_shape(cm)?;
        let total = cm.shape().check_cap(var_cap())?;
        let shape = cm.shape();
        let parts = exec.map_chunks(total, SCAN_CHUNK, |range| {
            let mut idx = vec![0; cm.m()];
            shape.decode(range.start, &mut idx);
            let mut best: Option<(S, Vec<usize>)> = None;
            for _ in range {
                let s = self.slack(cm, &idx);
                if best.as_ref().is_none_or(|(b, _)| s < *b) {
                    best = Some((s, idx.clone()));
                }
                shape.increment(&mut idx);
            }
            best
        });
        let mut best: Option<(S, Vec<usize>)> = None;
        for cand in parts.into_iter().flatten() {
            if best.as_ref().is_none_or(|(b, _)| cand.0 < *b) {
                best = Some(cand);
            }
        }
        best.ok_or_else(|| MmotError::input("empty product grid"))
    }

    /// `Σ u_i ≥ b` on every tuple, exactly or up to `tol`.
    pub fn is_feasible(&self, cm: &CostModel<S>, tol: f64, exec: Exec) -> Result<bool> {
        let (s, _) = self.min_slack(cm, exec)?;
        Ok(s >= -S::tol(tol))
    }

    /// Adds `c` to `u_i` and subtracts it from `u_j` (0-based).
    pub fn shifted(&self, i: usize, j: usize, c: S) -> Self {
        let mut out = self.clone();
        for v in out.values[i].iter_mut() {
            *v += c.clone();
        }
        for v in out.values[j].iter_mut() {
            *v -= c.clone();
        }
        out
    }

    pub fn convert<T: Scalar>(&self) -> DualPotentials<T> {
        DualPotentials {
            values: self
                .values
                .iter()
                .map(|u| u.iter().map(|v| T::from_rational(&v.to_rational())).collect())
                .collect(),
        }
    }

    /// One value per line, for `duals_<i>.txt`.
    pub fn marginal_text(&self, i: usize) -> String {
        self.values[i].iter().map(|v| format_scalar(v) + "\n").collect()
    }
}

/// Replaces `u_i` (0-based) by `max_{t : t_i = a} (b(t) - Σ_{j≠i} u_j(t_j))`.
pub fn b_conjugate<S: Scalar>(pot: &DualPotentials<S>, cm: &CostModel<S>, i: usize, exec: Exec) -> Result<DualPotentials<S>> {
    pot.check_shape(cm)?;
    if i >= cm.m() {
        return Err(MmotError::input(format!("marginal index {} out of range", i + 1)));
    }
    let total = cm.shape().check_cap(var_cap())?;
    let shape = cm.shape();
    let n_i = shape.dims()[i];
    let parts = exec.map_chunks(total, SCAN_CHUNK, |range| {
        let mut best: Vec<Option<S>> = vec![None; n_i];
        let mut idx = vec![0; cm.m()];
        shape.decode(range.start, &mut idx);
        for _ in range {
            let mut v = cm.cost_unchecked(&idx);
            for (j, u) in pot.values.iter().enumerate() {
                if j != i {
                    v -= u[idx[j]].clone();
                }
            }
            let slot = &mut best[idx[i]];
            if slot.as_ref().is_none_or(|b| v > *b) {
                *slot = Some(v);
            }
            shape.increment(&mut idx);
        }
        best
    });
    let mut best: Vec<Option<S>> = vec![None; n_i];
    for part in parts {
        for (slot, cand) in best.iter_mut().zip(part) {
            if let Some(c) = cand {
                if slot.as_ref().is_none_or(|b| c > *b) {
                    *slot = Some(c);
                }
            }
        }
    }
    let mut out = pot.clone();
    out.values[i] = best.into_iter().map(|v| v.expect("every atom appears in the grid")).collect();
    Ok(out)
}

/// Cycles conjugation over `i = 1..m` until the objective stalls; returns the sweeps used.
pub fn conjugate_sweeps<S: Scalar>(
    pot: &DualPotentials<S>,
    cm: &CostModel<S>,
    exec: Exec,
) -> Result<(DualPotentials<S>, usize)> {
    let mut cur = pot.clone();
    let mut obj = cur.objective(cm);
    for sweep in 1..=MAX_SWEEPS {
        for i in 0..cm.m() {
            cur = b_conjugate(&cur, cm, i, exec)?;
        }
        let next = cur.objective(cm);
        let drop = obj.clone() - next.clone();
        obj = next;
        let stalled = if S::EXACT { drop.is_zero() } else { drop.to_f64() < SWEEP_TOL };
        if stalled {
            return Ok((cur, sweep));
        }
    }
    Ok((cur, MAX_SWEEPS))
}

/// Tuples where the dual inequality is tight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplittingSet {
    tuples: BTreeSet<Vec<usize>>,
}

impl SplittingSet {
    pub fn from_tuples(tuples: impl IntoIterator<Item = Vec<usize>>) -> Self {
        SplittingSet {
            tuples: tuples.into_iter().collect(),
        }
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.contains(t)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.tuples.iter()
    }

    /// Members whose first coordinate is `a`.
    pub fn slice(&self, a: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.tuples
            .range(vec![a]..)
            .take_while(move |t| t[0] == a)
    }

    /// Distinct first coordinates present.
    pub fn first_coordinates(&self) -> BTreeSet<usize> {
        self.tuples.iter().map(|t| t[0]).collect()
    }
}

/// All tuples with `|Σ u_i - b| ≤ tol` (exact equality in rational mode).
pub fn extract_splitting_set<S: Scalar>(
    pot: &DualPotentials<S>,
    cm: &CostModel<S>,
    tol: f64,
    exec: Exec,
) -> Result<SplittingSet> {
    pot.check_shape(cm)?;
    let total = cm.shape().check_cap(var_cap())?;
    let shape = cm.shape();
    let tol = S::tol(tol);
    let parts = exec.map_chunks(total, SCAN_CHUNK, |range| {
        let mut idx = vec![0; cm.m()];
        shape.decode(range.start, &mut idx);
        let mut out = Vec::new();
        for _ in range {
            if pot.slack(cm, &idx).abs() <= tol {
                out.push(idx.clone());
            }
            shape.increment(&mut idx);
        }
        out
    });
    Ok(SplittingSet::from_tuples(parts.into_iter().flatten()))
}

/// Outcome of one twist probe on a splitting-set slice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwistReport {
    pub x1_index: usize,
    pub slice_size: usize,
    pub distinct_gradients: usize,
    pub injective: bool,
    /// Two slice members sharing a gradient, when not injective.
    pub collision: Option<(Vec<usize>, Vec<usize>)>,
}

fn vec_eq<S: Scalar>(a: &[S], b: &[S]) -> bool {
    let tol = S::tol(1e-12);
    a.iter().zip(b).all(|(x, y)| (x.clone() - y.clone()).abs() <= tol)
}

/// Groups the slice `{t ∈ W : t_1 = x1_index}` by `D_{x_1} b = Σ_{s ∈ N(1)} x_s`.
pub fn twist_probe<S: Scalar>(w: &SplittingSet, cm: &CostModel<S>, x1_index: usize) -> TwistReport {
    let mut groups: Vec<(Vec<S>, Vec<usize>)> = Vec::new();
    let mut collision = None;
    let mut slice_size = 0;
    for t in w.slice(x1_index) {
        slice_size += 1;
        let grad = cm.neighbor_sum(1, t);
        match groups.iter().find(|(g, _)| vec_eq(g, &grad)) {
            Some((_, first)) => {
                if collision.is_none() {
                    collision = Some((first.clone(), t.clone()));
                }
            }
            None => groups.push((grad, t.clone())),
        }
    }
    TwistReport {
        x1_index,
        slice_size,
        distinct_gradients: groups.len(),
        injective: collision.is_none(),
        collision,
    }
}

/// Twist probe on every slice; true when all slices are injective.
pub fn twist_all<S: Scalar>(w: &SplittingSet, cm: &CostModel<S>) -> bool {
    w.first_coordinates()
        .into_iter()
        .all(|a| twist_probe(w, cm, a).injective)
}

/// Witness data for one part of the splitting-set lemma; vertex indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Lemma21Witness {
    /// Every `s ∈ v1` has `N(s) = v2`; swapping the `v1` block must stay in `W`.
    Part1 { v1: VertexSet, v2: VertexSet },
    /// Monotonicity inequality at vertex `t`.
    Part2 { t: usize },
    /// Closed-neighborhood sums agree at `t` forces `x_t` to agree.
    Part3 { t: usize },
    /// Shared `x_p` with the differentiability proxy, `N̄(p) = N̄(t)`.
    Part4a { p: usize, t: usize },
    /// Propagation through `F1` given `F1, F2 ⊆ N(p)` and `N(s) = F2 ∪ F3` on `F1`.
    Part4b {
        p: usize,
        f1: VertexSet,
        f2: VertexSet,
        f3: VertexSet,
    },
}

/// Result of a lemma check on one tuple pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma21Outcome {
    /// Hypotheses of the part were met, so the conclusion was tested.
    pub applicable: bool,
    pub holds: bool,
    pub detail: Option<String>,
}

impl Lemma21Outcome {
    fn vacuous() -> Self {
        Lemma21Outcome {
            applicable: false,
            holds: true,
            detail: None,
        }
    }

    fn verdict(ok: bool, detail: impl FnOnce() -> String) -> Self {
        Lemma21Outcome {
            applicable: true,
            holds: ok,
            detail: if ok { None } else { Some(detail()) },
        }
    }
}

fn block_sum<S: Scalar>(cm: &CostModel<S>, set: &VertexSet, t: &[usize]) -> Vec<S> {
    let mut out = vec![S::zero(); cm.marginal(0).d()];
    for &s in set {
        for (o, x) in out.iter_mut().zip(cm.marginal(s - 1).atom(t[s - 1])) {
            *o += x.clone();
        }
    }
    out
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

/// Discrete stand-in for "`Du_p` exists at atom `a`": every member of `W` with `x_p = a`
/// has the same `Σ_{s ∈ N(p)} x_s`.
pub fn differentiable_at<S: Scalar>(w: &SplittingSet, cm: &CostModel<S>, p: usize, a: usize) -> bool {
    let mut first: Option<Vec<S>> = None;
    for t in w.iter().filter(|t| t[p - 1] == a) {
        let g = cm.neighbor_sum(p, t);
        match &first {
            None => first = Some(g),
            Some(f) if !vec_eq(f, &g) => return false,
            _ => {}
        }
    }
    true
}

/// Checks one part of the lemma on the pair `(x1, x2)`, which must lie in `w` and share
/// their first coordinate.
pub fn lemma21_check<S: Scalar>(
    w: &SplittingSet,
    cm: &CostModel<S>,
    x1: &[usize],
    x2: &[usize],
    witness: &Lemma21Witness,
) -> Result<Lemma21Outcome> {
    let g = cm.graph();
    let m = cm.m();
    if !w.contains(x1) || !w.contains(x2) {
        return Err(MmotError::input("both tuples must belong to the splitting set"));
    }
    if x1[0] != x2[0] {
        return Err(MmotError::input("tuples must share their first coordinate"));
    }
    let in_range = |v: usize| (1..=m).contains(&v);
    let eq_on = |set: &VertexSet| set.iter().all(|&s| x1[s - 1] == x2[s - 1]);
    let tol = S::tol(1e-12);
    let close = |a: &[S], b: &[S]| a.iter().zip(b).all(|(x, y)| (x.clone() - y.clone()).abs() <= tol);
    match witness {
        Lemma21Witness::Part1 { v1, v2 } => {
            if v1.is_empty() || !v1.iter().chain(v2).all(|&v| in_range(v)) {
                return Err(MmotError::input("part 1 needs a nonempty V1 inside 1..m"));
            }
            if v1.iter().any(|&s| g.nbrs(s) != v2) {
                return Err(MmotError::input("part 1 needs N(s) = V2 for every s in V1"));
            }
            if !close(&block_sum(cm, v2, x1), &block_sum(cm, v2, x2)) {
                return Ok(Lemma21Outcome::vacuous());
            }
            let y: Vec<usize> = (0..m)
                .map(|s| if v1.contains(&(s + 1)) { x2[s] } else { x1[s] })
                .collect();
            Ok(Lemma21Outcome::verdict(w.contains(&y), || {
                format!("swapped tuple {y:?} from {x1:?} and {x2:?} is not in W")
            }))
        }
        Lemma21Witness::Part2 { t } => {
            if !in_range(*t) {
                return Err(MmotError::input(format!("vertex {t} outside 1..{m}")));
            }
            let n = g.nbrs(*t);
            let dt = sub(cm.marginal(t - 1).atom(x2[t - 1]), cm.marginal(t - 1).atom(x1[t - 1]));
            let dn = sub(&block_sum(cm, n, x1), &block_sum(cm, n, x2));
            let lhs = dot(&dt, &dn);
            Ok(Lemma21Outcome::verdict(lhs <= S::tol(SPLIT_TOL), || {
                format!("t={t}: (x_t^2 - x_t^1)·Σ_N(t)(x^1 - x^2) = {lhs} > 0 for {x1:?}, {x2:?}")
            }))
        }
        Lemma21Witness::Part3 { t } => {
            if !in_range(*t) {
                return Err(MmotError::input(format!("vertex {t} outside 1..{m}")));
            }
            let mut closed = g.nbrs(*t).clone();
            closed.insert(*t);
            if !close(&block_sum(cm, &closed, x1), &block_sum(cm, &closed, x2)) {
                return Ok(Lemma21Outcome::vacuous());
            }
            Ok(Lemma21Outcome::verdict(x1[t - 1] == x2[t - 1], || {
                format!("closed sums agree at t={t} but x_t differs in {x1:?}, {x2:?}")
            }))
        }
        Lemma21Witness::Part4a { p, t } => {
            if !in_range(*p) || !in_range(*t) || *t == 1 || t == p {
                return Err(MmotError::input("part 4a needs distinct p, t with t >= 2"));
            }
            let mut np = g.nbrs(*p).clone();
            np.insert(*p);
            let mut nt = g.nbrs(*t).clone();
            nt.insert(*t);
            if np != nt {
                return Err(MmotError::input("part 4a needs equal closed neighborhoods of p and t"));
            }
            if x1[p - 1] != x2[p - 1] || !differentiable_at(w, cm, *p, x1[p - 1]) {
                return Ok(Lemma21Outcome::vacuous());
            }
            Ok(Lemma21Outcome::verdict(x1[t - 1] == x2[t - 1], || {
                format!("x_p shared at p={p} but x_t differs at t={t} in {x1:?}, {x2:?}")
            }))
        }
        Lemma21Witness::Part4b { p, f1, f2, f3 } => {
            if !in_range(*p) || !f1.iter().chain(f2).chain(f3).all(|&v| in_range(v)) || f1.is_empty() {
                return Err(MmotError::input("part 4b sets must lie in 1..m and F1 must be nonempty"));
            }
            let np = g.nbrs(*p);
            if !f1.is_subset(np) || !f2.is_subset(np) {
                return Err(MmotError::input("part 4b needs F1, F2 inside N(p)"));
            }
            let f23: VertexSet = f2.union(f3).copied().collect();
            if f1.iter().any(|&s| *g.nbrs(s) != f23) {
                return Err(MmotError::input("part 4b needs N(s) = F2 ∪ F3 for every s in F1"));
            }
            let rest: VertexSet = np
                .iter()
                .filter(|v| !f1.contains(v) && !f2.contains(v))
                .chain(f3.iter())
                .copied()
                .collect();
            if x1[p - 1] != x2[p - 1] || !differentiable_at(w, cm, *p, x1[p - 1]) || !eq_on(&rest) {
                return Ok(Lemma21Outcome::vacuous());
            }
            Ok(Lemma21Outcome::verdict(eq_on(f1), || {
                format!("propagation through F1={f1:?} fails for {x1:?}, {x2:?}")
            }))
        }
    }
}

/// Counts from an exhaustive lemma scan.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PartTally {
    pub checked: usize,
    pub applicable: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Lemma21Summary {
    pub pairs: usize,
    pub parts: BTreeMap<String, PartTally>,
    pub first_violation: Option<String>,
}

impl Lemma21Summary {
    pub fn violations(&self, part: &str) -> usize {
        self.parts.get(part).map_or(0, |t| t.violations)
    }

    pub fn total_violations(&self) -> usize {
        self.parts.values().map(|t| t.violations).sum()
    }
}

fn subsets(set: &VertexSet, max_bits: usize) -> Vec<VertexSet> {
    let items: Vec<usize> = set.iter().copied().collect();
    let k = items.len().min(max_bits);
    (1u32..(1 << k))
        .map(|mask| (0..k).filter(|b| mask >> b & 1 == 1).map(|b| items[b]).collect())
        .collect()
}

/// All lemma witnesses whose neighborhood hypotheses hold for the model's graph.
pub fn lemma21_witnesses<S: Scalar>(cm: &CostModel<S>) -> Vec<Lemma21Witness> {
    let g = cm.graph();
    let m = cm.m();
    let mut out = Vec::new();
    let mut twin_classes: BTreeMap<VertexSet, VertexSet> = BTreeMap::new();
    for v in 1..=m {
        twin_classes.entry(g.nbrs(v).clone()).or_default().insert(v);
    }
    for (nbrs, class) in &twin_classes {
        for v1 in subsets(class, 6) {
            out.push(Lemma21Witness::Part1 { v1, v2: nbrs.clone() });
        }
    }
    for t in 1..=m {
        out.push(Lemma21Witness::Part2 { t });
        out.push(Lemma21Witness::Part3 { t });
    }
    for p in 1..=m {
        let np = g.nbrs(p);
        let mut cp = np.clone();
        cp.insert(p);
        for t in 2..=m {
            if t != p && g.closed_neighborhood(t).ok().as_ref() == Some(&cp) {
                out.push(Lemma21Witness::Part4a { p, t });
            }
        }
        for (nbrs, class) in &twin_classes {
            let inside: VertexSet = class.intersection(np).copied().collect();
            if inside.is_empty() {
                continue;
            }
            let shared: VertexSet = nbrs.intersection(np).copied().collect();
            for f1 in subsets(&inside, 4) {
                let mut f2_options = vec![VertexSet::new()];
                f2_options.extend(subsets(&shared, 4));
                for f2 in f2_options {
                    if !f1.is_disjoint(&f2) {
                        continue;
                    }
                    let f3: VertexSet = nbrs.difference(&f2).copied().collect();
                    out.push(Lemma21Witness::Part4b {
                        p,
                        f1: f1.clone(),
                        f2,
                        f3,
                    });
                }
            }
        }
    }
    out
}

fn part_name(w: &Lemma21Witness) -> &'static str {
    match w {
        Lemma21Witness::Part1 { .. } => "1",
        Lemma21Witness::Part2 { .. } => "2",
        Lemma21Witness::Part3 { .. } => "3",
        Lemma21Witness::Part4a { .. } => "4a",
        Lemma21Witness::Part4b { .. } => "4b",
    }
}

/// Runs every applicable witness on every ordered pair of members sharing `x_1`.
pub fn lemma21_scan<S: Scalar>(w: &SplittingSet, cm: &CostModel<S>) -> Result<Lemma21Summary> {
    let witnesses = lemma21_witnesses(cm);
    let mut summary = Lemma21Summary::default();
    for name in ["1", "2", "3", "4a", "4b"] {
        summary.parts.insert(name.to_string(), PartTally::default());
    }
    for a in w.first_coordinates() {
        let slice: Vec<&Vec<usize>> = w.slice(a).collect();
        for x1 in &slice {
            for x2 in &slice {
                summary.pairs += 1;
                for wit in &witnesses {
                    let out = lemma21_check(w, cm, x1, x2, wit)?;
                    let tally = summary.parts.get_mut(part_name(wit)).expect("known part");
                    tally.checked += 1;
                    if out.applicable {
                        tally.applicable += 1;
                    }
                    if !out.holds {
                        tally.violations += 1;
                        if summary.first_violation.is_none() {
                            summary.first_violation = out.detail;
                        }
                    }
                }
            }
        }
    }
    Ok(summary)
}
