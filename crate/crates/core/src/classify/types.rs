use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MmotError, Result};
use crate::graph::{GluingDecomposition, VertexSet};

/// Which marginals are declared absolutely continuous or Dirac.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityProfile {
    pub ac: BTreeSet<usize>,
    pub dirac: BTreeSet<usize>,
}

impl RegularityProfile {
    pub fn new(m: usize, ac: impl IntoIterator<Item = usize>, dirac: impl IntoIterator<Item = usize>) -> Result<Self> {
        let ac: BTreeSet<usize> = ac.into_iter().collect();
        let dirac: BTreeSet<usize> = dirac.into_iter().collect();
        if let Some(v) = ac.iter().chain(&dirac).find(|&&v| v == 0 || v > m) {
            return Err(MmotError::input(format!("profile index {v} outside 1..{m}")));
        }
        if let Some(v) = ac.intersection(&dirac).next() {
            return Err(MmotError::input(format!("marginal {v} cannot be both AC and Dirac")));
        }
        Ok(RegularityProfile { ac, dirac })
    }

    pub fn ac(m: usize, ac: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(m, ac, [])
    }

    pub fn is_ac(&self, v: usize) -> bool {
        self.ac.contains(&v)
    }

    pub fn is_dirac(&self, v: usize) -> bool {
        self.dirac.contains(&v)
    }

    pub fn covers(&self, required: &BTreeSet<usize>) -> bool {
        required.is_subset(&self.ac)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    MongeUnique,
    Negative,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::MongeUnique => "MongeUnique",
            Verdict::Negative => "Negative",
            Verdict::Unknown => "Unknown",
        })
    }
}

/// Named results; positive rules are listed in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "Thm3.1-i")]
    Thm31I,
    #[serde(rename = "Cor3.2")]
    Cor32,
    #[serde(rename = "Thm4.1")]
    Thm41,
    #[serde(rename = "Thm3.1-ii")]
    Thm31Ii,
    #[serde(rename = "Prop4.2")]
    Prop42,
    #[serde(rename = "Prop4.3")]
    Prop43,
    #[serde(rename = "Prop2.1-1")]
    Prop211,
    #[serde(rename = "Prop2.1-2")]
    Prop212,
    #[serde(rename = "Prop6.1")]
    Prop61,
    #[serde(rename = "Lemma6.2")]
    Lemma62,
    #[serde(rename = "Cycle-m≥5-cited")]
    CycleCited,
}

impl Rule {
    pub const ALL: [Rule; 11] = [
        Rule::Thm31I,
        Rule::Cor32,
        Rule::Thm41,
        Rule::Thm31Ii,
        Rule::Prop42,
        Rule::Prop43,
        Rule::Prop211,
        Rule::Prop212,
        Rule::Prop61,
        Rule::Lemma62,
        Rule::CycleCited,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Thm31I => "Thm3.1-i",
            Rule::Cor32 => "Cor3.2",
            Rule::Thm41 => "Thm4.1",
            Rule::Thm31Ii => "Thm3.1-ii",
            Rule::Prop42 => "Prop4.2",
            Rule::Prop43 => "Prop4.3",
            Rule::Prop211 => "Prop2.1-1",
            Rule::Prop212 => "Prop2.1-2",
            Rule::Prop61 => "Prop6.1",
            Rule::Lemma62 => "Lemma6.2",
            Rule::CycleCited => "Cycle-m≥5-cited",
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(
            self,
            Rule::Thm31I | Rule::Cor32 | Rule::Thm41 | Rule::Thm31Ii | Rule::Prop42 | Rule::Prop43
        )
    }

    /// Thm 3.1 family, Thm 4.1 family or the gluing family.
    pub fn class(self) -> &'static str {
        match self {
            Rule::Thm31I | Rule::Thm31Ii | Rule::Cor32 => "extraction",
            Rule::Thm41 => "hub",
            Rule::Prop42 | Rule::Prop43 => "gluing",
            Rule::Prop211 | Rule::Prop212 | Rule::CycleCited => "negative",
            Rule::Prop61 | Rule::Lemma62 => "open",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = MmotError;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s || (s == "Cycle-m>=5-cited" && *r == Rule::CycleCited))
            .ok_or_else(|| MmotError::input(format!("unknown rule `{s}`")))
    }
}

/// Structure justifying a rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `g = C_m \ S`; `s_vertices` are the non-isolated vertices of `S`, `hub` its inner hub.
    Extraction {
        removed_edges: Vec<(usize, usize)>,
        s_vertices: VertexSet,
        hub: VertexSet,
        s_complete: bool,
        p: Option<usize>,
    },
    /// Every vertex misses at most one edge.
    OneMissingEdge {
        missing_edges: Vec<(usize, usize)>,
        i: Option<usize>,
    },
    InnerHub {
        hub: VertexSet,
        cliques: Vec<VertexSet>,
        p: usize,
    },
    Gluing {
        decomposition: GluingDecomposition,
        root: usize,
        /// One regular index per part, in part order.
        p: Vec<usize>,
    },
    Disconnected {
        component_of_1: VertexSet,
        vertex: usize,
    },
    MissingEdge {
        i: usize,
    },
    Fan {
        k: usize,
        n: usize,
        edgeless: VertexSet,
        path: Vec<usize>,
    },
    JoinPattern {
        edgeless: VertexSet,
        rest: VertexSet,
    },
    Cycle {
        order: Vec<usize>,
    },
    None,
}

/// A hypothesis that failed, with what would fix it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub rule: Option<Rule>,
    pub missing_ac: Vec<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationOutcome {
    pub verdict: Verdict,
    pub rule: Option<Rule>,
    pub required_ac: Vec<usize>,
    pub witness: Witness,
    pub diagnostics: Vec<Diagnostic>,
    /// Every positive rule whose hypotheses the profile satisfies, in tie-break order.
    pub matched_rules: Vec<Rule>,
}

/// A structural match together with the regularity it demands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub rule: Rule,
    pub witness: Witness,
    pub required_ac: BTreeSet<usize>,
}

impl Candidate {
    pub(crate) fn new(rule: Rule, witness: Witness, required: impl IntoIterator<Item = usize>) -> Self {
        Candidate {
            rule,
            witness,
            required_ac: required.into_iter().collect(),
        }
    }

    /// Fewest demands first, then rule order.
    pub(crate) fn rank(&self) -> (usize, Rule, Vec<usize>) {
        (self.required_ac.len(), self.rule, self.required_ac.iter().copied().collect())
    }
}
