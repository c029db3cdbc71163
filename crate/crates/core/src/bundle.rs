//! Problem bundles: a directory holding a graph, its marginals and optional duals and gluing hint.

use std::fs;
use std::path::Path;

use crate::duality::DualPotentials;
use crate::error::{MmotError, Result};
use crate::graph::{parse_gluing_hint, parse_graph, InteractionGraph, VertexSet};
use crate::marginal::DiscreteMarginal;
use crate::model::CostModel;
use crate::scalar::{format_scalar, Scalar};

pub const GRAPH_FILE: &str = "graph.txt";
pub const GLUING_FILE: &str = "gluing_hint.txt";
pub const COUPLING_FILE: &str = "coupling.txt";
pub const VALUE_FILE: &str = "value.txt";

pub fn marginal_file(i: usize) -> String {
    format!("marginal_{i}.txt")
}

pub fn duals_file(i: usize) -> String {
    format!("duals_{i}.txt")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemBundle<S> {
    pub graph: InteractionGraph,
    pub marginals: Vec<DiscreteMarginal<S>>,
    pub duals: Option<DualPotentials<S>>,
    pub gluing_hint: Option<Vec<VertexSet>>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| MmotError::io(path.display().to_string(), e))
}

/// Prefixes parse errors with the file they came from.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        MmotError::Parse { line, column, message } => MmotError::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        MmotError::Input(msg) => MmotError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn parse_duals<S: Scalar>(path: &Path, text: &str, n: usize) -> Result<Vec<S>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v = S::parse_literal(line).ok_or_else(|| {
            MmotError::parse(idx + 1, 1, format!("{}: `{line}` is not a number", path.display()))
        })?;
        out.push(v);
    }
    if out.len() != n {
        return Err(MmotError::input(format!(
            "{}: expected {n} dual values, found {}",
            path.display(),
            out.len()
        )));
    }
    Ok(out)
}

impl<S: Scalar> ProblemBundle<S> {
    pub fn new(graph: InteractionGraph, marginals: Vec<DiscreteMarginal<S>>) -> Self {
        ProblemBundle {
            graph,
            marginals,
            duals: None,
            gluing_hint: None,
        }
    }

    pub fn from_model(cm: &CostModel<S>) -> Self {
        Self::new(cm.graph().clone(), cm.marginals().to_vec())
    }

    pub fn model(&self) -> Result<CostModel<S>> {
        CostModel::new(self.graph.clone(), self.marginals.clone())
    }

    /// Reads and validates a bundle directory. Duals are read only when every `duals_<i>.txt` exists.
    pub fn read(dir: &Path) -> Result<Self> {
        if !dir.is_dir() {
            return Err(MmotError::input(format!("bundle {} is not a directory", dir.display())));
        }
        let gpath = dir.join(GRAPH_FILE);
        let graph = in_file(&gpath, parse_graph(&read_text(&gpath)?))?;
        let mut marginals = Vec::with_capacity(graph.m());
        for i in 1..=graph.m() {
            let p = dir.join(marginal_file(i));
            if !p.exists() {
                return Err(MmotError::input(format!("missing marginal file {}", p.display())));
            }
            marginals.push(in_file(&p, DiscreteMarginal::parse(&read_text(&p)?))?);
        }
        if dir.join(marginal_file(graph.m() + 1)).exists() {
            return Err(MmotError::input(format!(
                "bundle has more marginal files than the graph's {} vertices",
                graph.m()
            )));
        }
        if let Some(d) = marginals.first().map(DiscreteMarginal::d) {
            if let Some((i, mu)) = marginals.iter().enumerate().find(|(_, mu)| mu.d() != d) {
                return Err(MmotError::input(format!(
                    "marginal {} has dimension {}, expected {d}",
                    i + 1,
                    mu.d()
                )));
            }
        }
        let dual_paths: Vec<_> = (1..=graph.m()).map(|i| dir.join(duals_file(i))).collect();
        let duals = if dual_paths.iter().all(|p| p.exists()) {
            let values = dual_paths
                .iter()
                .zip(&marginals)
                .map(|(p, mu)| parse_duals::<S>(p, &read_text(p)?, mu.n()))
                .collect::<Result<Vec<_>>>()?;
            Some(DualPotentials::new(values))
        } else {
            None
        };
        let hpath = dir.join(GLUING_FILE);
        let gluing_hint = if hpath.exists() {
            Some(in_file(&hpath, parse_gluing_hint(&read_text(&hpath)?))?)
        } else {
            None
        };
        Ok(ProblemBundle {
            graph,
            marginals,
            duals,
            gluing_hint,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| MmotError::io(dir.display().to_string(), e))?;
        write_file(&dir.join(GRAPH_FILE), &self.graph.to_text())?;
        for (i, mu) in self.marginals.iter().enumerate() {
            write_file(&dir.join(marginal_file(i + 1)), &mu.to_text())?;
        }
        if let Some(duals) = &self.duals {
            for i in 0..duals.values.len() {
                write_file(&dir.join(duals_file(i + 1)), &duals.marginal_text(i))?;
            }
        }
        if let Some(hint) = &self.gluing_hint {
            let text: String = hint
                .iter()
                .map(|p| p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ") + "\n")
                .collect();
            write_file(&dir.join(GLUING_FILE), &text)?;
        }
        Ok(())
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| MmotError::io(path.display().to_string(), e))
}

/// Writes `value.txt` with a single scalar.
pub fn write_value<S: Scalar>(dir: &Path, value: &S) -> Result<()> {
    write_file(&dir.join(VALUE_FILE), &(format_scalar(value) + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycle;
    use crate::marginal::{discretize, Density};
    use crate::scalar::Rational;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let marginals: Vec<DiscreteMarginal<Rational>> =
            (0..4).map(|i| discretize(Density::Gaussian, 3, 2, 40 + i)).collect();
        let mut b = ProblemBundle::new(cycle(4), marginals);
        b.duals = Some(DualPotentials::new(vec![
            vec![Rational::from_ratio(1, 3), Rational::from_ratio(-2, 7), Rational::from_ratio(0, 1)];
            4
        ]));
        b.gluing_hint = Some(vec![[1, 2].into(), [2, 3, 4].into()]);
        b.write(dir.path()).unwrap();
        let back = ProblemBundle::<Rational>::read(dir.path()).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn missing_marginal_is_an_input_error() {
        let dir = tempfile::tempdir().unwrap();
        write_file(&dir.path().join(GRAPH_FILE), "m=2\n1 2\n").unwrap();
        write_file(&dir.path().join(marginal_file(1)), "d=1\n1 0\n").unwrap();
        let err = ProblemBundle::<f64>::read(dir.path()).unwrap_err();
        assert!(matches!(err, MmotError::Input(_)));
    }

    #[test]
    fn bad_marginal_line_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        write_file(&dir.path().join(GRAPH_FILE), "m=1\n").unwrap();
        write_file(&dir.path().join(marginal_file(1)), "d=1\n1 zz\n").unwrap();
        let err = ProblemBundle::<Rational>::read(dir.path()).unwrap_err();
        assert!(matches!(err, MmotError::Parse { line: 2, column: 3, .. }), "{err}");
    }
}
