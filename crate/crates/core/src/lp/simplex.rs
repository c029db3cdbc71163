use super::Layout;
use crate::error::{MmotError, Result};
use crate::exec::Exec;
use crate::model::{CostModel, Shape};
use crate::scalar::Scalar;

/// Reduced-cost threshold for entering columns in float mode.
const PRICE_TOL: f64 = 1e-9;
/// Smallest admissible pivot element in float mode.
const PIVOT_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;
/// Float-mode refactorization period.
const REFACTOR_EVERY: usize = 64;
const MAX_PIVOTS: usize = 2_000_000;
const PRICE_CHUNK: usize = 2048;
/// Columns examined per partial-pricing window.
const PRICE_WINDOW: usize = 8192;

/// Column objective evaluated on demand.
pub(crate) trait Objective<S>: Sync {
    fn cost(&self, lin: usize, idx: &[usize]) -> S;
}

impl<S: Scalar> Objective<S> for CostModel<S> {
    fn cost(&self, _lin: usize, idx: &[usize]) -> S {
        self.cost_unchecked(idx)
    }
}

impl<S, F> Objective<S> for F
where
    F: Fn(usize, &[usize]) -> S + Sync,
{
    fn cost(&self, lin: usize, idx: &[usize]) -> S {
        self(lin, idx)
    }
}

/// Candidate columns for pricing.
#[derive(Clone, Copy)]
pub(crate) enum Columns<'a> {
    All,
    /// Sorted linear indices.
    Subset(&'a [usize]),
}

impl Columns<'_> {
    fn len(&self, shape: &Shape) -> usize {
        match self {
            Columns::All => shape.total() as usize,
            Columns::Subset(list) => list.len(),
        }
    }

    fn lin(&self, pos: usize) -> usize {
        match self {
            Columns::All => pos,
            Columns::Subset(list) => list[pos],
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct SolveStats {
    pub pivots: usize,
    pub degenerate: usize,
}

/// Basis state: basic columns by position, dense inverse and basic values.
#[derive(Debug, Clone)]
pub(crate) struct Simplex<S> {
    layout: Layout,
    shape: Shape,
    rhs: Vec<S>,
    basis: Vec<usize>,
    binv: Vec<S>,
    x: Vec<S>,
}

fn argmax_abs<S: Scalar>(vals: impl Iterator<Item = (usize, S)>) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for (k, v) in vals {
        let a = v.abs();
        if a.is_zero() {
            continue;
        }
        if S::EXACT {
            return Some(k);
        }
        if best.as_ref().is_none_or(|(_, b)| a > *b) {
            best = Some((k, a));
        }
    }
    best.map(|(k, _)| k)
}

/// Basic columns of the north-west staircase for the given marginal weights.
fn staircase<S: Scalar>(weights: &[Vec<S>]) -> Vec<usize> {
    let dims: Vec<usize> = weights.iter().map(Vec::len).collect();
    let shape = Shape::new(dims.clone());
    let m = dims.len();
    let mut ptr = vec![0usize; m];
    let mut rem: Vec<S> = weights.iter().map(|w| w[0].clone()).collect();
    let mut basis = Vec::new();
    loop {
        basis.push(shape.encode(&ptr));
        let theta = rem
            .iter()
            .cloned()
            .reduce(|a, b| if b < a { b } else { a })
            .expect("m >= 1");
        for r in rem.iter_mut() {
            *r -= theta.clone();
        }
        let next = (0..m)
            .filter(|&i| ptr[i] + 1 < dims[i])
            .reduce(|a, b| if rem[b] < rem[a] { b } else { a });
        let Some(i) = next else { break };
        ptr[i] += 1;
        rem[i] = rem[i].clone() + weights[i][ptr[i]].clone();
    }
    basis
}

impl<S: Scalar> Simplex<S> {
    /// Staircase north-west-corner start: one pointer advances per step, giving exactly
    /// `rows` basic columns that form a triangular, hence nonsingular, basis.
    pub fn north_west(cm: &CostModel<S>) -> Result<Self> {
        let weights: Vec<Vec<S>> = cm.marginals().iter().map(|mu| mu.weights().to_vec()).collect();
        Self::from_basis(cm, staircase(&weights))
    }

    /// North-west start for marginals shifted by small positive generic masses of total
    /// `eps` each. The shifted problem is nondegenerate with high probability, which keeps
    /// the simplex from stalling; call [`Simplex::restore_rhs`] once it is optimal. In exact
    /// mode the shift is zero.
    pub fn north_west_perturbed(cm: &CostModel<S>, eps: f64) -> Result<Self> {
        let mut state = 0x2545_F491_4F6C_DD1Du64;
        let weights: Vec<Vec<S>> = cm
            .marginals()
            .iter()
            .map(|mu| {
                let r: Vec<f64> = mu
                    .weights()
                    .iter()
                    .map(|_| {
                        state ^= state << 13;
                        state ^= state >> 7;
                        state ^= state << 17;
                        1.0 + (state >> 11) as f64 / (1u64 << 53) as f64
                    })
                    .collect();
                let sum: f64 = r.iter().sum();
                mu.weights()
                    .iter()
                    .zip(&r)
                    .map(|(w, x)| w.clone() + S::tol(eps * x / sum))
                    .collect()
            })
            .collect();
        let basis = staircase(&weights);
        let layout = Layout::new(cm.shape().dims());
        let mut s = Simplex {
            rhs: layout.rhs_of(&weights),
            shape: cm.shape().clone(),
            binv: Vec::new(),
            x: Vec::new(),
            basis,
            layout,
        };
        s.refactor()?;
        Ok(s)
    }

    /// Switches back to the true marginals. Returns `false` if the current basis is not
    /// primal feasible for them beyond `tol`; otherwise clamps the small negatives to zero.
    pub fn restore_rhs(&mut self, cm: &CostModel<S>, tol: f64) -> Result<bool> {
        self.rhs = self.layout.rhs(cm);
        self.refactor()?;
        let tol = S::tol(tol);
        if self.x.iter().any(|v| -v.clone() > tol) {
            return Ok(false);
        }
        for v in &mut self.x {
            if v.is_negative() {
                *v = S::zero();
            }
        }
        Ok(true)
    }

    /// Factorizes the given basis; fails if it is singular.
    pub fn from_basis(cm: &CostModel<S>, basis: Vec<usize>) -> Result<Self> {
        let layout = Layout::new(cm.shape().dims());
        if basis.len() != layout.rows() {
            return Err(MmotError::Solver(format!(
                "basis has {} columns, expected {}",
                basis.len(),
                layout.rows()
            )));
        }
        let mut s = Simplex {
            rhs: layout.rhs(cm),
            shape: cm.shape().clone(),
            binv: Vec::new(),
            x: Vec::new(),
            basis,
            layout,
        };
        s.refactor()?;
        Ok(s)
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    fn column_rows(&self, lin: usize, idx: &mut [usize]) -> Vec<usize> {
        self.shape.decode(lin, idx);
        idx.iter()
            .enumerate()
            .filter_map(|(i, &a)| self.layout.row(i, a))
            .collect()
    }

    /// Recomputes the inverse and the basic values from scratch (Gauss–Jordan).
    fn refactor(&mut self) -> Result<()> {
        let r = self.layout.rows();
        let m = self.layout.m();
        let mut a = vec![S::zero(); r * r];
        let mut idx = vec![0usize; m];
        for (k, &lin) in self.basis.iter().enumerate() {
            for row in self.column_rows(lin, &mut idx) {
                a[row * r + k] = S::one();
            }
        }
        let mut inv = vec![S::zero(); r * r];
        for i in 0..r {
            inv[i * r + i] = S::one();
        }
        for col in 0..r {
            let piv = argmax_abs((col..r).map(|row| (row, a[row * r + col].clone())))
                .ok_or_else(|| MmotError::Solver("singular basis".into()))?;
            if piv != col {
                for j in 0..r {
                    a.swap(piv * r + j, col * r + j);
                    inv.swap(piv * r + j, col * r + j);
                }
            }
            let p = a[col * r + col].clone();
            for j in 0..r {
                a[col * r + j] /= p.clone();
                inv[col * r + j] /= p.clone();
            }
            for row in 0..r {
                if row == col {
                    continue;
                }
                let f = a[row * r + col].clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..r {
                    let (av, iv) = (a[col * r + j].clone(), inv[col * r + j].clone());
                    a[row * r + j] -= f.clone() * av;
                    inv[row * r + j] -= f.clone() * iv;
                }
            }
        }
        self.binv = inv;
        self.x = (0..r)
            .map(|k| {
                let mut v = S::zero();
                for j in 0..r {
                    if !self.rhs[j].is_zero() {
                        v += self.binv[k * r + j].clone() * self.rhs[j].clone();
                    }
                }
                if !S::EXACT && v.to_f64().abs() < 1e-13 {
                    v = S::zero();
                }
                v
            })
            .collect();
        Ok(())
    }

    /// Simplex multipliers `y = c_B^T B^{-1}`.
    pub fn duals<O: Objective<S>>(&self, obj: &O) -> Vec<S> {
        let r = self.layout.rows();
        let mut idx = vec![0usize; self.layout.m()];
        let cb: Vec<S> = self
            .basis
            .iter()
            .map(|&lin| {
                self.shape.decode(lin, &mut idx);
                obj.cost(lin, &idx)
            })
            .collect();
        let mut y = vec![S::zero(); r];
        for (k, c) in cb.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for j in 0..r {
                y[j] += c.clone() * self.binv[k * r + j].clone();
            }
        }
        y
    }

    /// Objective values at every candidate position.
    fn column_costs<O: Objective<S>>(&self, obj: &O, cols: Columns<'_>, exec: Exec) -> Vec<S> {
        let m = self.layout.m();
        let total = cols.len(&self.shape);
        exec.map_chunks(total, PRICE_CHUNK, |range| {
            let mut idx = vec![0usize; m];
            range
                .map(|p| {
                    let lin = cols.lin(p);
                    self.shape.decode(lin, &mut idx);
                    obj.cost(lin, &idx)
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect()
    }

    /// Entering candidate as `(position, reduced cost)`.
    ///
    /// Positions are scanned in windows starting from `start`, wrapping around; the first
    /// window holding an improving column wins. Within it the choice is the largest reduced
    /// cost (Dantzig) or the lowest position (Bland, with `start = 0`).
    fn price(
        &self,
        costs: &[S],
        u: &[Vec<S>],
        cols: Columns<'_>,
        bland: bool,
        start: usize,
        exec: Exec,
    ) -> Option<(usize, S)> {
        let m = self.layout.m();
        let tol = S::tol(PRICE_TOL);
        let mut sorted_basis = self.basis.clone();
        sorted_basis.sort_unstable();
        let better = |cand: &(usize, S), best: &Option<(usize, S)>| -> bool {
            match best {
                None => true,
                Some((bp, bd)) => {
                    if bland {
                        cand.0 < *bp
                    } else {
                        cand.1 > *bd || (cand.1 == *bd && cand.0 < *bp)
                    }
                }
            }
        };
        let total = costs.len();
        let windows = total.div_ceil(PRICE_WINDOW);
        let first = if bland || windows == 0 { 0 } else { (start / PRICE_WINDOW) % windows };
        for w in (0..windows).map(|k| (first + k) % windows) {
            let lo = w * PRICE_WINDOW;
            let hi = (lo + PRICE_WINDOW).min(total);
            let chunks = exec.map_chunks(hi - lo, PRICE_CHUNK, |range| {
                let mut best: Option<(usize, S)> = None;
                let mut idx = vec![0usize; m];
                let range = range.start + lo..range.end + lo;
                if let Columns::All = cols {
                    self.shape.decode(range.start, &mut idx);
                }
                for p in range {
                    let lin = cols.lin(p);
                    match cols {
                        Columns::All => {}
                        Columns::Subset(_) => self.shape.decode(lin, &mut idx),
                    }
                    if sorted_basis.binary_search(&lin).is_err() {
                        let mut d = costs[p].clone();
                        for (i, &a) in idx.iter().enumerate() {
                            d -= u[i][a].clone();
                        }
                        if d > tol {
                            let cand = (p, d);
                            if better(&cand, &best) {
                                best = Some(cand);
                                if bland {
                                    break;
                                }
                            }
                        }
                    }
                    if let Columns::All = cols {
                        self.shape.increment(&mut idx);
                    }
                }
                best
            });
            let mut best: Option<(usize, S)> = None;
            for cand in chunks.into_iter().flatten() {
                if better(&cand, &best) {
                    best = Some(cand);
                }
            }
            if best.is_some() {
                return best;
            }
        }
        None
    }

    /// Runs primal simplex iterations to optimality for `obj` over `cols`.
    pub fn optimize<O: Objective<S>>(&mut self, obj: &O, cols: Columns<'_>, exec: Exec) -> Result<SolveStats> {
        let r = self.layout.rows();
        let m = self.layout.m();
        let piv_tol = S::tol(PIVOT_TOL);
        let mut stats = SolveStats::default();
        let mut degenerate_run = 0usize;
        let mut since_refactor = 0usize;
        let mut idx = vec![0usize; m];
        let costs = self.column_costs(obj, cols, exec);
        let mut cursor = 0usize;
        loop {
            let y = self.duals(obj);
            let u = self.layout.potentials(&y);
            let bland = degenerate_run >= DEGENERATE_LIMIT;
            let Some((pos, _)) = self.price(&costs, &u, cols, bland, cursor, exec) else {
                return Ok(stats);
            };
            cursor = pos + PRICE_WINDOW;
            let enter = cols.lin(pos);
            if stats.pivots >= MAX_PIVOTS {
                return Err(MmotError::Solver(format!("no convergence after {MAX_PIVOTS} pivots")));
            }
            let rows = self.column_rows(enter, &mut idx);
            let alpha: Vec<S> = (0..r)
                .map(|k| {
                    rows.iter()
                        .fold(S::zero(), |acc, &row| acc + self.binv[k * r + row].clone())
                })
                .collect();
            let mut leave: Option<(usize, S)> = None;
            for k in 0..r {
                if alpha[k] > piv_tol {
                    let ratio = self.x[k].clone() / alpha[k].clone();
                    let take = match &leave {
                        None => true,
                        Some((lk, lr)) => ratio < *lr || (ratio == *lr && self.basis[k] < self.basis[*lk]),
                    };
                    if take {
                        leave = Some((k, ratio));
                    }
                }
            }
            let (p, theta) = leave.ok_or_else(|| MmotError::Solver("unbounded direction".into()))?;
            let theta = if theta.is_negative() { S::zero() } else { theta };
            if theta.is_zero() || (!S::EXACT && theta.to_f64() < 1e-13) {
                degenerate_run += 1;
                stats.degenerate += 1;
            } else {
                degenerate_run = 0;
            }
            for k in 0..r {
                if k != p && !alpha[k].is_zero() {
                    self.x[k] -= theta.clone() * alpha[k].clone();
                    if !S::EXACT && self.x[k].is_negative() && self.x[k].to_f64() > -1e-12 {
                        self.x[k] = S::zero();
                    }
                }
            }
            self.x[p] = theta;
            let ap = alpha[p].clone();
            for j in 0..r {
                self.binv[p * r + j] /= ap.clone();
            }
            for k in 0..r {
                if k == p || alpha[k].is_zero() {
                    continue;
                }
                let f = alpha[k].clone();
                for j in 0..r {
                    let v = self.binv[p * r + j].clone();
                    if !v.is_zero() {
                        self.binv[k * r + j] -= f.clone() * v;
                    }
                }
            }
            self.basis[p] = enter;
            stats.pivots += 1;
            since_refactor += 1;
            if !S::EXACT && since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
        }
    }

    /// Basic columns with their values, including degenerate zeros.
    pub fn basic_entries(&self) -> Vec<(usize, S)> {
        self.basis.iter().copied().zip(self.x.iter().cloned()).collect()
    }
}
