//! Planar chain of two combs joined by a staircase. A full turn at the
//! staircase vertical for `b` is blocked exactly when some `a + b + c = 0`.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::TAU;

use super::scaling::{pad_and_scale, to_f64, ScaledSets};
use super::threesum::ThreeSumInstance;
use super::transcript::{
    Answer, Counters, Header, Mode, Phase, QueryRecord, ReductionTranscript, TRANSCRIPT_VERSION,
};
use crate::chain::{segment_distance, Chain, EdgeRef};
use crate::error::{Error, Result};
use crate::geom3::Vec3;
use crate::sweep::{dihedral_feasible_jobs, DihedralQuery};

/// Tooth half-width.
pub const TOOTH_HALF_WIDTH: f64 = 0.25;
pub const LEFT_SPINE: f64 = 0.0;
pub const LEFT_TIP: f64 = 1.0;
pub const RIGHT_SPINE: f64 = 1.5;
pub const RIGHT_TIP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comb {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToothRef {
    pub comb: Comb,
    pub value: i64,
}

#[derive(Debug, Clone)]
pub struct StaticConstruction {
    pub chain: Chain,
    pub sets: ScaledSets,
    /// `(b, vertical edge)` in chain order.
    pub feature_map: Vec<(i64, EdgeRef)>,
    /// Segment index of every tooth edge.
    pub tooth_map: BTreeMap<usize, ToothRef>,
    pub step_height: f64,
    pub min_clearance: f64,
}

pub fn build_static_chain(s: &ScaledSets) -> Result<StaticConstruction> {
    let w = TOOTH_HALF_WIDTH;
    let p = |x: f64, y: f64| Vec3::new(x, y, 0.0);
    let mut verts = Vec::new();
    let mut tooth_map = BTreeMap::new();

    let mut tooth = |verts: &mut Vec<Vec3>, x: f64, spine: f64, tip: f64, r: ToothRef| {
        verts.push(p(x - w, spine));
        let first = verts.len() - 1;
        verts.push(p(x - w, tip));
        verts.push(p(x + w, tip));
        verts.push(p(x + w, spine));
        for k in 0..3 {
            tooth_map.insert(first + k, r);
        }
    };

    let a_x: Vec<f64> = s.a.iter().map(|&a| s.static_a(a) as f64).collect();
    verts.push(p(a_x[0] - 1.0, LEFT_SPINE));
    for (&a, &x) in s.a.iter().zip(&a_x) {
        tooth(&mut verts, x, LEFT_SPINE, LEFT_TIP, ToothRef { comb: Comb::Left, value: a });
    }

    // Verticals ascend in x, so b descends.
    let stair: Vec<(i64, f64)> = s.b.iter().rev().map(|&b| (b, to_f64(s.static_stair(b)))).collect();
    let step = (RIGHT_SPINE - LEFT_SPINE) / stair.len() as f64;
    let mut feature_map = Vec::with_capacity(stair.len());
    verts.push(p(stair[0].1, LEFT_SPINE));
    for (j, &(b, x)) in stair.iter().enumerate() {
        let top = if j + 1 == stair.len() {
            RIGHT_SPINE
        } else {
            LEFT_SPINE + (j + 1) as f64 * step
        };
        verts.push(p(x, top));
        feature_map.push((b, EdgeRef(verts.len() - 2)));
        if let Some(&(_, next)) = stair.get(j + 1) {
            verts.push(p(next, top));
        }
    }

    let mut c_max = f64::NEG_INFINITY;
    for &c in &s.c {
        let x = s.static_c(c) as f64;
        tooth(&mut verts, x, RIGHT_SPINE, RIGHT_TIP, ToothRef { comb: Comb::Right, value: c });
        c_max = x;
    }
    verts.push(p(c_max + 1.0, RIGHT_SPINE));

    let chain = Chain::new(verts)?;
    let min_clearance = certify(&chain, s, &stair, &a_x, step)?;
    Ok(StaticConstruction {
        chain,
        sets: s.clone(),
        feature_map,
        tooth_map,
        step_height: step,
        min_clearance,
    })
}

fn certify(chain: &Chain, s: &ScaledSets, stair: &[(i64, f64)], a_x: &[f64], step: f64) -> Result<f64> {
    if let Some((i, j)) = chain.first_violation() {
        return Err(Error::NotSimple(i, j));
    }
    let m = s.m as f64;
    let w = TOOTH_HALF_WIDTH;
    let xs: Vec<f64> = stair.iter().map(|&(_, x)| x).collect();
    let spread = xs.last().unwrap() - xs[0];
    if spread > m {
        return Err(Error::Certificate(format!("staircase spread {spread} exceeds m = {m}")));
    }
    let teeth = a_x.iter().copied().chain(s.c.iter().map(|&c| s.static_c(c) as f64));
    let need = 1.5 * m - w;
    for t in teeth {
        for &x in &xs {
            let d = (x - t).abs() - w;
            if d < need {
                return Err(Error::Certificate(format!(
                    "staircase vertical at {x} is {d} from a tooth edge (needs {need})"
                )));
            }
        }
    }
    let n = chain.segment_count();
    let mut clearance = f64::INFINITY;
    for i in 0..n {
        for j in i + 2..n {
            clearance = clearance.min(segment_distance(&chain.segment(i), &chain.segment(j)));
        }
    }
    let floor = w.min(step) - chain.tolerance();
    if clearance < floor {
        return Err(Error::Certificate(format!(
            "non-adjacent clearance {clearance} below {floor}"
        )));
    }
    Ok(clearance)
}

pub fn run_static_reduction(inst: &ThreeSumInstance) -> Result<ReductionTranscript> {
    run_static_reduction_jobs(inst, 1)
}

pub fn run_static_reduction_jobs(inst: &ThreeSumInstance, jobs: usize) -> Result<ReductionTranscript> {
    let sets = pad_and_scale(inst, None)?;
    let built = build_static_chain(&sets)?;
    let a_set: HashSet<i64> = sets.a.iter().copied().collect();

    let mut probe = Phase::new("probe");
    let mut triple = None;
    for &(b, edge) in &built.feature_map {
        let q = DihedralQuery { edge, phi: TAU };
        let f = dihedral_feasible_jobs(&built.chain, &q, jobs)?;
        if let (None, Some(ev)) = (triple, f.event) {
            let moving = built.tooth_map.get(&ev.moving_segment);
            let fixed = built.tooth_map.get(&ev.static_segment);
            match (moving, fixed) {
                (Some(c), Some(a))
                    if c.comb == Comb::Right
                        && a.comb == Comb::Left
                        && a.value == -b - c.value
                        && a_set.contains(&a.value) =>
                {
                    triple = Some([a.value, b, c.value]);
                }
                _ => return Err(Error::UnmappedWitness(ev.moving_segment, ev.static_segment)),
            }
        }
        probe.push(QueryRecord::new(&q, &f));
    }

    let counters = Counters {
        encoding_rotations: 0,
        probe_rotations: probe.rotations,
        pair_tests: probe.pair_tests,
    };
    Ok(ReductionTranscript {
        version: TRANSCRIPT_VERSION,
        mode: Mode::Static,
        header: Header {
            n: sets.n,
            m: sets.m,
            segments: built.chain.segment_count(),
            hinges: None,
        },
        phases: vec![probe],
        counters,
        answer: Answer { triple },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::threesum::solve_threesum_oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(a: &[i64], b: &[i64], c: &[i64]) -> ThreeSumInstance {
        ThreeSumInstance::new(a.to_vec(), b.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn unit_example_layout() {
        let s = pad_and_scale(&inst(&[-1], &[0], &[1]), None).unwrap();
        assert_eq!(s.m, 1);
        let built = build_static_chain(&s).unwrap();
        let v = built.chain.vertices();
        let left: Vec<_> = built.tooth_map.iter().filter(|(_, t)| t.comb == Comb::Left).collect();
        assert_eq!(left.len(), 3);
        let up = built.chain.segment(*left[0].0);
        assert!(((up.a.x + up.b.x) / 2.0 - (-4.0 + -0.25)).abs() < 1e-12);
        let (b, e) = built.feature_map[0];
        assert_eq!(b, 0);
        assert_eq!(v[e.0].x, 0.0);
        let right = built.tooth_map.iter().find(|(_, t)| t.comb == Comb::Right).unwrap();
        assert_eq!(built.chain.segment(*right.0).a.x, 4.0 - 0.25);
    }

    #[test]
    fn teeth_per_element() {
        let s = pad_and_scale(&inst(&[-7, 3, 9, 12], &[1], &[2]), None).unwrap();
        let built = build_static_chain(&s).unwrap();
        let left = built.tooth_map.values().filter(|t| t.comb == Comb::Left).count();
        assert_eq!(left, 3 * 4);
        assert!(built.chain.allowed_overlaps().is_empty());
    }

    #[test]
    fn unit_examples_solve() {
        let t = run_static_reduction(&inst(&[-1], &[0], &[1])).unwrap();
        assert_eq!(t.triple(), Some((-1, 0, 1)));
        assert_eq!(t.counters.probe_rotations, 1);
        let t = run_static_reduction(&inst(&[-1], &[0], &[2])).unwrap();
        assert_eq!(t.triple(), None);
        let t = run_static_reduction(&inst(&[1], &[4], &[7])).unwrap();
        assert_eq!(t.triple(), None);
    }

    #[test]
    fn random_instances_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let mut set = |k: usize| (0..k).map(|_| rng.gen_range(-30..=30)).collect::<Vec<_>>();
            let (ka, kb, kc) = (3, 4, 5);
            let i = inst(&set(ka), &set(kb), &set(kc));
            let t = run_static_reduction(&i).unwrap();
            assert_eq!(t.triple().is_some(), solve_threesum_oracle(&i).is_some());
            if let Some((a, b, c)) = t.triple() {
                assert_eq!(a + b + c, 0);
                assert!(i.a().contains(&a) && i.b().contains(&b) && i.c().contains(&c));
            }
            assert_eq!(t.counters.probe_rotations, t.header.n);
        }
    }
}
