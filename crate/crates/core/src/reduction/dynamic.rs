use std::collections::HashSet;
use std::f64::consts::TAU;

use super::canonical::{build_canonical_chain, encode_targets, CanonicalChain, Feature};
use super::scaling::{pad_and_scale, to_f64, ScaledSets};
use super::static_chain::Comb;
use super::threesum::ThreeSumInstance;
use super::transcript::{
    Answer, Counters, Header, Mode, Phase, QueryRecord, ReductionTranscript, TRANSCRIPT_VERSION,
};
use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::sweep::{dihedral_feasible_jobs, DihedralQuery};

/// Feature abscissa for every hinge of `c`.
pub fn hinge_targets(c: &CanonicalChain, s: &ScaledSets) -> Vec<f64> {
    c.hinges
        .iter()
        .map(|h| match h.target {
            Feature::A(k) => to_f64(s.dyn_a(s.a[k])),
            Feature::B(k) => to_f64(s.dyn_b(s.b[b_order(s, k)])),
            Feature::C(k) => to_f64(s.dyn_c(s.c[k])),
        })
        .collect()
}

/// Risers run left to right, so they take `B′ = -b / 2m` ascending, i.e. `B`
/// descending.
fn b_order(s: &ScaledSets, k: usize) -> usize {
    s.n - 1 - k
}

/// Places the padded sets on the canonical chain. Returns the encoded chain
/// and the fold queries in execution order.
pub fn encode_sets(c: &CanonicalChain, s: &ScaledSets, jobs: usize) -> Result<(Chain, Vec<QueryRecord>)> {
    if c.n != s.n {
        return Err(Error::SizeTooSmall {
            requested: c.n,
            largest: s.n,
        });
    }
    encode_targets(c, &hinge_targets(c, s), jobs)
}

/// Largest riser-side radius and smallest needle radius about each probe
/// axis; the first must stay below the second.
fn certify_radii(c: &CanonicalChain, chain: &Chain) -> Result<()> {
    let v = chain.vertices();
    let first_right = c.hinges.iter().find(|h| matches!(h.target, Feature::C(0))).unwrap();
    let stair_lo = c.risers[0].0;
    let stair_hi = first_right.alpha1;
    let teeth: Vec<usize> = c.left_teeth.iter().chain(&c.right_teeth).copied().collect();
    for r in &c.risers[..c.n] {
        let axis = chain.edge_axis(*r)?;
        let stair = (stair_lo..=stair_hi).map(|i| axis.distance_to(v[i])).fold(0.0, f64::max);
        let comb = teeth.iter().map(|&e| axis.distance_to(v[e])).fold(f64::INFINITY, f64::min);
        if stair >= comb || comb < 3.5 - c.chain.tolerance() {
            return Err(Error::Certificate(format!(
                "probe at edge {}: staircase radius {stair} vs comb radius {comb}",
                r.0
            )));
        }
    }
    Ok(())
}

pub fn run_dynamic_reduction(inst: &ThreeSumInstance, n: Option<usize>) -> Result<ReductionTranscript> {
    run_dynamic_reduction_jobs(inst, n, 1)
}

pub fn run_dynamic_reduction_jobs(
    inst: &ThreeSumInstance,
    n: Option<usize>,
    jobs: usize,
) -> Result<ReductionTranscript> {
    let sets = pad_and_scale(inst, n)?;

    // Phase 1 sees only n.
    let canon = build_canonical_chain(sets.n)?;
    let build = Phase::new("build");

    let mut encode = Phase::new("encode");
    let (chain, records) = encode_sets(&canon, &sets, jobs)?;
    for r in records {
        encode.push(r);
    }
    certify_radii(&canon, &chain)?;

    let a_set: HashSet<i64> = sets.a.iter().copied().collect();
    let mut probe = Phase::new("probe");
    let mut triple = None;
    for (j, r) in canon.risers[..sets.n].iter().enumerate() {
        let b = sets.b[b_order(&sets, j)];
        let q = DihedralQuery { edge: *r, phi: TAU };
        let f = dihedral_feasible_jobs(&chain, &q, jobs)?;
        if let (None, Some(ev)) = (triple, f.event) {
            let unmapped = Error::UnmappedWitness(ev.moving_segment, ev.static_segment);
            let c = match canon.tooth_map.get(&ev.moving_segment) {
                Some(&(Comb::Right, k)) => sets.c[k],
                _ => return Err(unmapped),
            };
            let a = -b - c;
            let static_ok = match canon.tooth_map.get(&ev.static_segment) {
                Some(&(Comb::Left, k)) => sets.a[k] == a,
                _ => false,
            };
            if !a_set.contains(&a) || !static_ok {
                return Err(unmapped);
            }
            triple = Some([a, b, c]);
        }
        probe.push(QueryRecord::new(&q, &f));
    }

    let counters = Counters {
        encoding_rotations: encode.rotations,
        probe_rotations: probe.rotations,
        pair_tests: encode.pair_tests + probe.pair_tests,
    };
    Ok(ReductionTranscript {
        version: TRANSCRIPT_VERSION,
        mode: Mode::Dynamic,
        header: Header {
            n: sets.n,
            m: sets.m,
            segments: chain.segment_count(),
            hinges: Some(canon.hinges.len()),
        },
        phases: vec![build, encode, probe],
        counters,
        answer: Answer { triple },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::threesum::solve_threesum_oracle;
    use crate::reduction::transcript::Verdict;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(a: &[i64], b: &[i64], c: &[i64]) -> ThreeSumInstance {
        ThreeSumInstance::new(a.to_vec(), b.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn unit_yes_instance() {
        let t = run_dynamic_reduction(&inst(&[-1], &[0], &[1]), None).unwrap();
        assert_eq!(t.triple(), Some((-1, 0, 1)));
        assert_eq!(t.counters.encoding_rotations, 9);
        assert_eq!(t.counters.probe_rotations, 1);
        let probe = t.phase("probe").unwrap();
        assert_eq!(probe.queries[0].verdict, Verdict::Infeasible);
        let encode = t.phase("encode").unwrap();
        assert!(encode.queries.iter().all(|q| q.verdict == Verdict::Feasible));
    }

    #[test]
    fn unit_no_instance() {
        let t = run_dynamic_reduction(&inst(&[-1], &[0], &[2]), None).unwrap();
        assert_eq!(t.triple(), None);
    }

    #[test]
    fn encoded_positions_match_targets() {
        let s = pad_and_scale(&inst(&[-1], &[0], &[1]), Some(3)).unwrap();
        let c = build_canonical_chain(3).unwrap();
        let (chain, recs) = encode_sets(&c, &s, 1).unwrap();
        assert_eq!(recs.len(), 27);
        let v = chain.vertices();
        for (k, &e) in c.left_teeth.iter().enumerate() {
            assert!((v[e].x - to_f64(s.dyn_a(s.a[k]))).abs() < 1e-9);
        }
        for (k, &e) in c.right_teeth.iter().enumerate() {
            assert!((v[e].x - to_f64(s.dyn_c(s.c[k]))).abs() < 1e-9);
        }
        for (j, r) in c.risers[..3].iter().enumerate() {
            assert!((v[r.0].x - to_f64(s.dyn_b(s.b[2 - j]))).abs() < 1e-9);
        }
    }

    #[test]
    fn random_instances_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..6 {
            let mut set = |k: usize| (0..k).map(|_| rng.gen_range(-20..=20)).collect::<Vec<_>>();
            let i = inst(&set(3), &set(3), &set(4));
            let t = run_dynamic_reduction(&i, Some(4)).unwrap();
            assert_eq!(t.triple().is_some(), solve_threesum_oracle(&i).is_some());
            if let Some((a, b, c)) = t.triple() {
                assert_eq!(a + b + c, 0);
            }
            assert_eq!(t.counters.probe_rotations, 4);
            assert_eq!(t.counters.encoding_rotations, 36);
        }
    }
}
