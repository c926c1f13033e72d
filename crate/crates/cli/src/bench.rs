use std::f64::consts::PI;
use std::time::Instant;

use dihedral::{dihedral_feasible_opts, Chain, DihedralQuery, EdgeRef, MotionTree, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Failure, RunConfig, Structure, OUTPUT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub max: u64,
}

impl Stat {
    fn of(xs: &[u64]) -> Stat {
        Stat {
            mean: if xs.is_empty() {
                0.0
            } else {
                xs.iter().sum::<u64>() as f64 / xs.len() as f64
            },
            max: xs.iter().copied().max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchRecord {
    /// Edges in the chain.
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_touches_per_rotation: Option<Stat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_reads_per_rotation: Option<Stat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree_height: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_tests_per_query: Option<Stat>,
    /// `ceil((n-1)/2) * floor((n-1)/2)` for the middle edge.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_pair_tests: Option<u64>,
    /// Informational only.
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub version: u32,
    pub structure: Structure,
    pub seed: u64,
    pub records: Vec<BenchRecord>,
}

/// Random walk with `edges` unit steps.
pub fn random_walk(edges: usize, rng: &mut ChaCha8Rng) -> Chain {
    let mut p = Vec3::ZERO;
    let mut verts = vec![p];
    for _ in 0..edges {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let t: f64 = rng.gen_range(0.0..2.0 * PI);
        let r = (1.0 - z * z).sqrt();
        p += Vec3::new(r * t.cos(), r * t.sin(), z);
        verts.push(p);
    }
    Chain::new(verts).expect("unit steps never coincide")
}

pub fn middle_edge(n: usize) -> usize {
    (n - 1) / 2
}

pub fn expected_pair_tests(n: usize) -> u64 {
    let h = (n - 1) as u64;
    h.div_ceil(2) * (h / 2)
}

fn tree_record(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<BenchRecord, Failure> {
    let chain = random_walk(n, rng);
    let start = Instant::now();
    let mut tree = MotionTree::build(&chain);
    let mut touches = Vec::with_capacity(k);
    let mut reads = Vec::with_capacity(k);
    for _ in 0..k {
        let e = rng.gen_range(0..n);
        let phi = rng.gen_range(-PI..PI);
        let before = tree.counters().path_reads;
        tree.rotate_lazy(EdgeRef(e), phi)?;
        touches.push(tree.counters().last_rotation_touches as u64);
        reads.push((tree.counters().path_reads - before) as u64);
    }
    tree.flush();
    Ok(BenchRecord {
        n,
        k,
        node_touches_per_rotation: Some(Stat::of(&touches)),
        path_reads_per_rotation: Some(Stat::of(&reads)),
        tree_height: Some(tree.height()),
        pair_tests_per_query: None,
        expected_pair_tests: None,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn brute_record(n: usize, k: usize, rng: &mut ChaCha8Rng, cfg: &RunConfig) -> Result<BenchRecord, Failure> {
    let chain = random_walk(n, rng);
    let e = middle_edge(n);
    let start = Instant::now();
    let mut tests = Vec::with_capacity(k);
    for _ in 0..k {
        let phi = rng.gen_range(-PI..PI);
        let f = dihedral_feasible_opts(&chain, &DihedralQuery::new(e, phi), &cfg.sweep())?;
        tests.push(f.pair_tests);
    }
    Ok(BenchRecord {
        n,
        k,
        node_touches_per_rotation: None,
        path_reads_per_rotation: None,
        tree_height: None,
        pair_tests_per_query: Some(Stat::of(&tests)),
        expected_pair_tests: Some(expected_pair_tests(n)),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn bench(structure: Structure, sizes: &[usize], k: usize, cfg: &RunConfig) -> Result<BenchReport, Failure> {
    if let Some(&bad) = sizes.iter().find(|&&n| n < 2) {
        return Err(Failure::input(format!("--n values must be at least 2, got {bad}")));
    }
    let mut records = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
        records.push(match structure {
            Structure::Tree => tree_record(n, k, &mut rng)?,
            Structure::Brute => brute_record(n, k, &mut rng, cfg)?,
        });
    }
    Ok(BenchReport {
        version: OUTPUT_VERSION,
        structure,
        seed: cfg.seed,
        records,
    })
}
