use dihedral::{dyn_rotate_opts, Chain, ChainFile, DihedralQuery};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Failure, RunConfig, EXIT_NEGATIVE, OUTPUT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepVerdict {
    pub step: usize,
    pub edge: usize,
    pub angle: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationReport {
    pub version: u32,
    pub seed: u64,
    pub steps: usize,
    pub max_angle: f64,
    pub accepted: usize,
    pub acceptance_ratio: f64,
    pub verdicts: Vec<StepVerdict>,
    #[serde(skip)]
    pub final_chain: Chain,
    #[serde(rename = "finalChain")]
    final_file: ChainFile,
}

/// Uniform random edge, uniform angle in `[-max_angle, max_angle]`, applied
/// only when the rotation is feasible.
pub fn simulate(chain: &Chain, steps: usize, max_angle: f64, cfg: &RunConfig) -> Result<SimulationReport, Failure> {
    if !max_angle.is_finite() || max_angle < 0.0 {
        return Err(Failure::input(format!("--max-angle must be finite and non-negative, got {max_angle}")));
    }
    if let Some((i, j)) = chain.first_violation() {
        return Err(Failure {
            code: EXIT_NEGATIVE,
            message: format!("input chain is not simple: segments {i} and {j} touch"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cur = chain.clone();
    let mut verdicts = Vec::with_capacity(steps);
    let mut accepted = 0;
    for step in 0..steps {
        let edge = rng.gen_range(0..cur.segment_count());
        let angle = if max_angle > 0.0 {
            rng.gen_range(-max_angle..=max_angle)
        } else {
            0.0
        };
        let out = dyn_rotate_opts(&cur, &DihedralQuery::new(edge, angle), &cfg.sweep())?;
        if out.applied {
            accepted += 1;
            cur = out.chain;
        }
        verdicts.push(StepVerdict {
            step,
            edge,
            angle,
            feasible: out.applied,
        });
    }
    Ok(SimulationReport {
        version: OUTPUT_VERSION,
        seed: cfg.seed,
        steps,
        max_angle,
        accepted,
        acceptance_ratio: if steps == 0 { 1.0 } else { accepted as f64 / steps as f64 },
        verdicts,
        final_file: cur.to_file(),
        final_chain: cur,
    })
}
