//! Discrete marginals: weighted atoms in `R^d`.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{MmotError, Result};
use crate::scalar::{format_scalar, Scalar};

/// Weight-sum tolerance in float mode.
pub const WEIGHT_TOL: f64 = 1e-9;

/// Grid used by [`discretize`]; atoms are multiples of `1 / GRID`.
const GRID: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMarginal<S> {
    d: usize,
    atoms: Vec<Vec<S>>,
    weights: Vec<S>,
}

impl<S: Scalar> DiscreteMarginal<S> {
    pub fn new(d: usize, atoms: Vec<Vec<S>>, weights: Vec<S>) -> Result<Self> {
        if d == 0 {
            return Err(MmotError::input("dimension must be positive"));
        }
        if atoms.is_empty() {
            return Err(MmotError::input("a marginal needs at least one atom"));
        }
        if atoms.len() != weights.len() {
            return Err(MmotError::input(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if let Some(a) = atoms.iter().find(|a| a.len() != d) {
            return Err(MmotError::input(format!(
                "atom has {} coordinates, expected {d}",
                a.len()
            )));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(MmotError::input("weights must be nonnegative"));
        }
        let total = weights.iter().fold(S::zero(), |acc, w| acc + w.clone());
        let ok = if S::EXACT {
            total == S::one()
        } else {
            (total.to_f64() - 1.0).abs() <= WEIGHT_TOL
        };
        if !ok {
            return Err(MmotError::input(format!("weights sum to {total}, not 1")));
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i] == atoms[j] {
                    return Err(MmotError::input(format!("atoms {} and {} coincide", i + 1, j + 1)));
                }
            }
        }
        Ok(DiscreteMarginal { d, atoms, weights })
    }

    /// Single atom of mass one.
    pub fn dirac(point: Vec<S>) -> Self {
        let d = point.len();
        DiscreteMarginal {
            d,
            atoms: vec![point],
            weights: vec![S::one()],
        }
    }

    /// Atoms with uniform weights `1/n`.
    pub fn uniform(d: usize, atoms: Vec<Vec<S>>) -> Result<Self> {
        let n = atoms.len().max(1);
        let weights = vec![S::one() / S::from_usize(n); atoms.len()];
        Self::new(d, atoms, weights)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Vec<S>] {
        &self.atoms
    }

    pub fn atom(&self, a: usize) -> &[S] {
        &self.atoms[a]
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn is_dirac(&self) -> bool {
        self.atoms.len() == 1
    }

    /// Translates every atom by `shift`.
    pub fn translated(&self, shift: &[S]) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| a.iter().zip(shift).map(|(x, s)| x.clone() + s.clone()).collect())
            .collect();
        DiscreteMarginal {
            d: self.d,
            atoms,
            weights: self.weights.clone(),
        }
    }

    /// Converts to another arithmetic mode.
    pub fn convert<T: Scalar>(&self) -> DiscreteMarginal<T> {
        let conv = |v: &S| T::from_rational(&v.to_rational());
        DiscreteMarginal {
            d: self.d,
            atoms: self.atoms.iter().map(|a| a.iter().map(conv).collect()).collect(),
            weights: self.weights.iter().map(conv).collect(),
        }
    }

    /// Distinct atoms, no shared coordinate values, distinct coordinate sums.
    pub fn general_position(&self) -> bool {
        let sums: Vec<S> = self
            .atoms
            .iter()
            .map(|a| a.iter().fold(S::zero(), |acc, x| acc + x.clone()))
            .collect();
        for i in 0..self.atoms.len() {
            for j in i + 1..self.atoms.len() {
                if sums[i] == sums[j] {
                    return false;
                }
                if self.atoms[i].iter().zip(&self.atoms[j]).any(|(x, y)| x == y) {
                    return false;
                }
            }
        }
        true
    }

    /// Parses the marginal file format: `d=<int>` then `w x1 .. xd` per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut d: Option<usize> = None;
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        let mut first_atom_line = 1;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let col = |tok: &str| tok.as_ptr() as usize - raw.as_ptr() as usize + 1;
            let Some(dim) = d else {
                let body = line.trim();
                let value = body
                    .strip_prefix("d=")
                    .ok_or_else(|| MmotError::parse(line_no, col(body), "expected `d=<int>`"))?;
                let dim: usize = value
                    .trim()
                    .parse()
                    .ok()
                    .filter(|&v| v > 0)
                    .ok_or_else(|| MmotError::parse(line_no, col(body) + 2, "dimension must be a positive integer"))?;
                d = Some(dim);
                first_atom_line = line_no + 1;
                continue;
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != dim + 1 {
                return Err(MmotError::parse(
                    line_no,
                    col(tokens[0]),
                    format!("expected a weight and {dim} coordinates, found {} fields", tokens.len()),
                ));
            }
            let mut values = Vec::with_capacity(dim + 1);
            for tok in &tokens {
                let v = S::parse_literal(tok)
                    .ok_or_else(|| MmotError::parse(line_no, col(tok), format!("`{tok}` is not a number")))?;
                values.push(v);
            }
            weights.push(values.remove(0));
            atoms.push(values);
        }
        let d = d.ok_or_else(|| MmotError::parse(1, 1, "missing `d=<int>` header"))?;
        Self::new(d, atoms, weights).map_err(|e| match e {
            MmotError::Input(msg) => MmotError::parse(first_atom_line, 1, msg),
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("d={}\n", self.d);
        for (a, w) in self.atoms.iter().zip(&self.weights) {
            s.push_str(&format_scalar(w));
            for x in a {
                s.push(' ');
                s.push_str(&format_scalar(x));
            }
            s.push('\n');
        }
        s
    }
}

/// Named atom generators standing in for absolutely continuous marginals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Density {
    /// Uniform on `[0,1)^d`.
    Uniform,
    /// Normal with mean 1/2 and standard deviation 1/6 per coordinate.
    Gaussian,
}

impl FromStr for Density {
    type Err = MmotError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Density::Uniform),
            "gaussian" => Ok(Density::Gaussian),
            other => Err(MmotError::input(format!("unknown density `{other}`"))),
        }
    }
}

fn draw_coordinate(density: Density, rng: &mut ChaCha8Rng) -> i64 {
    match density {
        Density::Uniform => rng.gen_range(0..GRID),
        Density::Gaussian => {
            let normal = Normal::new(0.5, 1.0 / 6.0).expect("valid normal");
            (normal.sample(rng) * GRID as f64).round() as i64
        }
    }
}

/// Draws `n` atoms in general position on a `1e-6` grid with uniform weights.
///
/// The same seed yields the same marginal in both arithmetic modes.
pub fn discretize<S: Scalar>(density: Density, n: usize, d: usize, seed: u64) -> DiscreteMarginal<S> {
    assert!(n >= 1 && d >= 1, "discretize needs n >= 1 and d >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw: Vec<Vec<i64>> = Vec::with_capacity(n);
    while raw.len() < n {
        let cand: Vec<i64> = (0..d).map(|_| draw_coordinate(density, &mut rng)).collect();
        let sum: i64 = cand.iter().sum();
        let clash = raw.iter().any(|a| {
            a.iter().sum::<i64>() == sum || a.iter().zip(&cand).any(|(x, y)| x == y)
        });
        if !clash {
            raw.push(cand);
        }
    }
    let atoms = raw
        .into_iter()
        .map(|a| a.into_iter().map(|k| S::from_ratio(k, GRID)).collect())
        .collect();
    let weights = vec![S::from_ratio(1, n as i64); n];
    DiscreteMarginal { d, atoms, weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn discretize_contract() {
        let dirac: DiscreteMarginal<f64> = discretize(Density::Uniform, 1, 2, 3);
        assert!(dirac.is_dirac());
        assert_eq!(dirac.weights(), &[1.0]);
        let a: DiscreteMarginal<Rational> = discretize(Density::Uniform, 4, 2, 7);
        let b: DiscreteMarginal<Rational> = discretize(Density::Uniform, 4, 2, 7);
        assert_eq!(a, b);
        assert_eq!(a.n(), 4);
        assert!(a.weights().iter().all(|w| *w == Rational::from_ratio(1, 4)));
        assert!(a.general_position());
        let f: DiscreteMarginal<f64> = discretize(Density::Uniform, 4, 2, 7);
        assert_eq!(f, a.convert::<f64>());
        let g: DiscreteMarginal<f64> = discretize(Density::Gaussian, 5, 3, 1);
        assert!(g.general_position());
    }

    #[test]
    fn validation() {
        let one = || Rational::from_ratio(1, 1);
        let half = || Rational::from_ratio(1, 2);
        assert!(DiscreteMarginal::new(1, vec![vec![one()], vec![one()]], vec![half(), half()]).is_err());
        assert!(DiscreteMarginal::new(1, vec![vec![one()]], vec![half()]).is_err());
        assert!(DiscreteMarginal::new(2, vec![vec![one()]], vec![one()]).is_err());
        assert!(DiscreteMarginal::<Rational>::new(1, vec![], vec![]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let m: DiscreteMarginal<Rational> = DiscreteMarginal::parse("d=2\n1/3 0 1\n2/3 1/2 -0.25\n").unwrap();
        assert_eq!(m.atom(1), &[Rational::from_ratio(1, 2), Rational::from_ratio(-1, 4)]);
        assert_eq!(DiscreteMarginal::parse(&m.to_text()).unwrap(), m);
        let f: DiscreteMarginal<f64> = discretize(Density::Gaussian, 3, 2, 11);
        assert_eq!(DiscreteMarginal::<f64>::parse(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn parse_errors_report_location() {
        match DiscreteMarginal::<Rational>::parse("d=1\n1/2 0\n1/2 x\n") {
            Err(MmotError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 5)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(DiscreteMarginal::<Rational>::parse("d=1\n1/2 0\n").is_err());
        assert!(DiscreteMarginal::<Rational>::parse("1 0\n").is_err());
    }
}
