use serde::Serialize;

use crate::tree::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Statement {
    #[serde(rename = "Linf.Bounded")]
    LinfBounded,
    #[serde(rename = "Linf.Compact")]
    LinfCompact,
    #[serde(rename = "Linf.Isometry")]
    LinfIsometry,
    #[serde(rename = "Linf.BoundedBelow")]
    LinfBoundedBelow,
    #[serde(rename = "Lip.Bounded")]
    LipBounded,
    #[serde(rename = "Lip.Compact")]
    LipCompact,
    #[serde(rename = "Lip.NoIsometry")]
    LipNoIsometry,
    #[serde(rename = "Lip.BoundedBelow")]
    LipBoundedBelow,
    #[serde(rename = "CompOp.FiniteRangeEquivalences")]
    FiniteRangeEquivalences,
}

impl Statement {
    /// The criterion the verdict is based on.
    pub fn theorem_ref(self) -> &'static str {
        match self {
            Statement::LinfBounded => "ψC_φ is bounded on L∞ iff ψ ∈ L∞, and then ‖ψC_φ‖ = ‖ψ‖∞",
            Statement::LinfCompact => {
                "bounded ψC_φ is compact on L∞ iff φ(T) is finite or ψ(v) → 0 as |φ(v)| → ∞; \
                 ‖ψC_φ‖_e = limsup_{|φ(v)|→∞} |ψ(v)|"
            }
            Statement::LinfIsometry => {
                "ψC_φ is an isometry on L∞ iff φ is surjective and sup_{φ(v)=w} |ψ(v)| = 1 for every w"
            }
            Statement::LinfBoundedBelow => {
                "ψC_φ is bounded below on L∞ iff φ is surjective and inf_w sup_{φ(v)=w} |ψ(v)| > 0; \
                 j(ψC_φ) equals that inf-sup"
            }
            Statement::LipBounded => {
                "ψC_φ: ℒ → L∞ is bounded iff ψ ∈ L∞ and sup |ψ(v)||φ(v)| < ∞; \
                 max{‖ψ‖∞, ‖ψ|φ|‖∞} ≤ ‖ψC_φ‖ ≤ ‖ψ(1+|φ|)‖∞"
            }
            Statement::LipCompact => {
                "bounded ψC_φ: ℒ → L∞ is compact iff |ψ(v)||φ(v)| → 0 as |φ(v)| → ∞; \
                 ‖ψC_φ‖_e = limsup_{|φ(v)|→∞} |ψ(v)||φ(v)|"
            }
            Statement::LipNoIsometry => "no weighted composition operator from ℒ or ℒ₀ to L∞ is an isometry",
            Statement::LipBoundedBelow => {
                "bounded ψC_φ: ℒ → L∞ is bounded below iff φ is surjective and M = inf_w sup_{φ(v)=w} |ψ(v)| > 0; \
                 M/3 ≤ j(ψC_φ) ≤ M"
            }
            Statement::FiniteRangeEquivalences => {
                "for C_φ: bounded ℒ→L∞, bounded ℒ₀→L∞, compact on L∞, compact ℒ→L∞, compact ℒ₀→L∞, \
                 compact ℒ→ℒ and finite range of φ are equivalent"
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    /// Decided on the truncation.
    Holds,
    /// Refuted on the truncation, with a concrete witness.
    Fails,
    /// Finite-data trend agrees with the asymptotic criterion.
    TrendConsistent,
    /// Finite-data trend contradicts the asymptotic criterion.
    TrendInconsistent,
}

impl Verdict {
    pub fn is_positive(self) -> bool {
        matches!(self, Verdict::Holds | Verdict::TrendConsistent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Vertex {
        role: String,
        vertex: VertexId,
        #[serde(skip_serializing_if = "Option::is_none")]
        value: Option<f64>,
    },
    Pair {
        role: String,
        first: VertexId,
        second: VertexId,
        value: f64,
    },
    Value {
        name: String,
        value: f64,
    },
    Bracket {
        name: String,
        lower: f64,
        upper: f64,
    },
    Item {
        name: String,
        verdict: Verdict,
    },
    Sequence {
        name: String,
        points: Vec<(usize, f64)>,
    },
    Note {
        text: String,
    },
}

impl Witness {
    pub fn vertex(role: &str, vertex: VertexId, value: Option<f64>) -> Self {
        Witness::Vertex {
            role: role.into(),
            vertex,
            value,
        }
    }

    pub fn value(name: &str, value: f64) -> Self {
        Witness::Value {
            name: name.into(),
            value,
        }
    }

    pub fn note(text: impl Into<String>) -> Self {
        Witness::Note { text: text.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub statement: Statement,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    /// Per-depth values of the quantity the verdict is based on.
    pub depth_profile: Vec<(usize, f64)>,
    pub theorem_ref: String,
    /// What the verdict was computed on, e.g. the truncation depth.
    pub scope: String,
}

impl Certificate {
    pub fn new(statement: Statement, verdict: Verdict, scope: impl Into<String>) -> Self {
        Certificate {
            statement,
            verdict,
            witnesses: Vec::new(),
            depth_profile: Vec::new(),
            theorem_ref: statement.theorem_ref().to_string(),
            scope: scope.into(),
        }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witnesses.push(w);
        self
    }

    pub fn with_profile(mut self, profile: Vec<(usize, f64)>) -> Self {
        self.depth_profile = profile;
        self
    }
}
