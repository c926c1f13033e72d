use serde::{Deserialize, Serialize};

use crate::sweep::{CollisionEvent, DihedralQuery, Feasibility};

pub const TRANSCRIPT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryRecord {
    pub edge_index: usize,
    pub angle: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<CollisionEvent>,
    pub pair_tests: u64,
}

impl QueryRecord {
    pub fn new(q: &DihedralQuery, f: &Feasibility) -> Self {
        QueryRecord {
            edge_index: q.edge.0,
            angle: q.phi,
            verdict: if f.is_feasible() {
                Verdict::Feasible
            } else {
                Verdict::Infeasible
            },
            witness: f.event,
            pair_tests: f.pair_tests,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Phase {
    pub name: String,
    pub rotations: usize,
    pub pair_tests: u64,
    pub queries: Vec<QueryRecord>,
}

impl Phase {
    pub fn new(name: &str) -> Self {
        Phase {
            name: name.to_string(),
            rotations: 0,
            pair_tests: 0,
            queries: Vec::new(),
        }
    }

    pub fn push(&mut self, r: QueryRecord) {
        self.rotations += 1;
        self.pair_tests += r.pair_tests;
        self.queries.push(r);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Counters {
    pub encoding_rotations: usize,
    pub probe_rotations: usize,
    pub pair_tests: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub triple: Option<[i64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Static,
    Dynamic,
}

/// Header facts about the construction that was run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Header {
    /// Size of each padded set.
    pub n: usize,
    pub m: i64,
    pub segments: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hinges: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReductionTranscript {
    pub version: u32,
    pub mode: Mode,
    pub header: Header,
    pub phases: Vec<Phase>,
    pub counters: Counters,
    pub answer: Answer,
}

impl ReductionTranscript {
    pub fn triple(&self) -> Option<(i64, i64, i64)> {
        self.answer.triple.map(|[a, b, c]| (a, b, c))
    }

    pub fn phase(&self, name: &str) -> Option<&Phase> {
        self.phases.iter().find(|p| p.name == name)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }
}
