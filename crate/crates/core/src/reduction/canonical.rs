//! Set-independent planar chain and the hinge folds that move its features.
//!
//! Every horizontal run that must change length is a five-segment hinge
//! `α₁, arm1, uv, arm2, α₂` with vertical `α₁, uv, α₂` and equal arms. The
//! program `(α₁, θ), (uv, -2θ), (α₂, θ)` with `cos θ = d / L` shortens the
//! span from `L` to `d` and only translates the rest of the chain.
//!
//! Layout from left to right, `s = 3 / (2(n + 1))`:
//! lead-in hinge from `(-8, 0)`, `n` needle teeth of height 1 spaced 2 apart,
//! a gap hinge of length 7, `n + 1` risers of height `s` joined by treads of
//! width 1 (all hinged except the last), a second gap hinge of length 7 and
//! `n` needles hanging from height 3/2 down to 1/2. The chain ends at the
//! tip of the last hanging needle.
//!
//! Bumps of left-side hinges dip below height 0, right-side ones rise above
//! 3/2 and tread bumps stay within `δ/2` of their tread. Consecutive comb
//! hinges alternate bump depths `δ` and `δ/2`, so the `α₂` of one hinge and
//! the `α₁` of the next lie on the same segment below (above) a needle; those
//! coincident pieces are listed as allowed overlaps.

use std::collections::BTreeMap;

use super::static_chain::Comb;
use super::transcript::QueryRecord;
use crate::chain::{Chain, EdgeRef};
use crate::error::{Error, Result};
use crate::geom3::Vec3;
use crate::sweep::{dyn_rotate_jobs, DihedralQuery};

pub const LEAD_IN_START: f64 = -8.0;
pub const LEAD_IN_ARMS: f64 = 4.0;
pub const TOOTH_SPACING: f64 = 2.0;
pub const GAP: f64 = 7.0;
pub const TREAD: f64 = 1.0;
pub const RIGHT_SPINE: f64 = 1.5;
pub const RIGHT_TIP: f64 = 0.5;
pub const LEFT_TIP: f64 = 1.0;

/// Absolute tolerance for fold and placement measurements.
pub const PLACEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    LeadIn,
    LeftComb,
    LeftGap,
    Stair,
    RightGap,
    RightComb,
}

/// Feature whose abscissa a hinge sets: index into the sorted padded set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feature {
    A(usize),
    B(usize),
    C(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hinge {
    pub id: usize,
    pub region: Region,
    /// Edge index of `α₁`; the hinge occupies edges `alpha1..alpha1 + 5`.
    pub alpha1: usize,
    /// Sum of the two arm lengths, i.e. the unfolded span.
    pub arms: f64,
    pub target: Feature,
}

impl Hinge {
    pub fn uv(&self) -> usize {
        self.alpha1 + 2
    }

    pub fn alpha2(&self) -> usize {
        self.alpha1 + 4
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalChain {
    pub n: usize,
    pub delta: f64,
    pub step: f64,
    pub chain: Chain,
    pub hinges: Vec<Hinge>,
    /// Upward edge of each left needle.
    pub left_teeth: Vec<usize>,
    /// Downward edge of each right needle.
    pub right_teeth: Vec<usize>,
    /// Vertical risers `R_0..=R_n`.
    pub risers: Vec<EdgeRef>,
    /// Needle edges by comb and element index.
    pub tooth_map: BTreeMap<usize, (Comb, usize)>,
}

struct Builder {
    verts: Vec<Vec3>,
    hinges: Vec<Hinge>,
    overlaps: Vec<(usize, usize)>,
}

impl Builder {
    fn cur(&self) -> Vec3 {
        *self.verts.last().unwrap()
    }

    /// Appends a vertex; returns the index of the new segment.
    fn to(&mut self, x: f64, y: f64) -> usize {
        self.verts.push(Vec3::new(x, y, 0.0));
        self.verts.len() - 2
    }

    /// Five-segment hinge along +x with bump offsets `e1` (arm1) and `e2`
    /// (arm2) relative to the current height.
    fn hinge(&mut self, region: Region, arms: f64, e1: f64, e2: f64, target: Feature) {
        let Vec3 { x, y, .. } = self.cur();
        let alpha1 = self.to(x, y + e1);
        self.to(x + arms / 2.0, y + e1);
        self.to(x + arms / 2.0, y + e2);
        self.to(x + arms, y + e2);
        self.to(x + arms, y);
        self.hinges.push(Hinge {
            id: self.hinges.len(),
            region,
            alpha1,
            arms,
            target,
        });
    }

    /// Needle from the current point to height `tip` and back. Returns the
    /// outward edge.
    fn needle(&mut self, tip: f64) -> usize {
        let Vec3 { x, y, .. } = self.cur();
        let out = self.to(x, tip);
        self.to(x, y);
        out
    }

    /// All pairs among the pieces meeting at the needle whose outward edge
    /// is `out`: `arm2, α₂` before it and `α₁, arm1` after it.
    fn junction(&mut self, out: usize) {
        let ids: Vec<usize> = (out - 2..=out + 3).collect();
        for (k, &i) in ids.iter().enumerate() {
            for &j in &ids[k + 1..] {
                self.overlaps.push((i, j));
            }
        }
    }
}

/// Bump depths of the `k`-th hinge in an alternating sequence.
fn depths(k: usize, delta: f64) -> (f64, f64) {
    if k.is_multiple_of(2) {
        (delta, delta / 2.0)
    } else {
        (delta / 2.0, delta)
    }
}

pub fn build_canonical_chain(n: usize) -> Result<CanonicalChain> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    let delta = (0.1f64).min(3.0 / (4.0 * (n as f64 + 1.0)));
    let step = RIGHT_SPINE / (n as f64 + 1.0);
    let mut b = Builder {
        verts: vec![Vec3::new(LEAD_IN_START, 0.0, 0.0)],
        hinges: Vec::new(),
        overlaps: Vec::new(),
    };
    let mut tooth_map = BTreeMap::new();

    // Lead-in and left comb; hinge k in this run is followed by needle k.
    let mut left_teeth = Vec::with_capacity(n);
    for k in 0..=n {
        let (d1, d2) = depths(k, delta);
        let (region, arms, target) = match k {
            0 => (Region::LeadIn, LEAD_IN_ARMS, Feature::A(0)),
            k if k == n => (Region::LeftGap, GAP, Feature::B(0)),
            k => (Region::LeftComb, TOOTH_SPACING, Feature::A(k)),
        };
        if k > 0 {
            let out = b.needle(LEFT_TIP);
            tooth_map.insert(out, (Comb::Left, k - 1));
            tooth_map.insert(out + 1, (Comb::Left, k - 1));
            b.junction(out);
            left_teeth.push(out);
        }
        b.hinge(region, arms, -d1, -d2, target);
    }

    // Staircase.
    let mut risers = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let x = b.cur().x;
        risers.push(EdgeRef(b.to(x, (j + 1) as f64 * step)));
        if j + 1 < n {
            b.hinge(Region::Stair, TREAD, delta / 2.0, -delta / 2.0, Feature::B(j + 1));
        } else if j + 1 == n {
            let p = b.cur();
            b.to(p.x + TREAD, p.y);
        }
    }

    // Right comb; hinge k is followed by needle k.
    let mut right_teeth = Vec::with_capacity(n);
    for k in 0..n {
        let (d1, d2) = depths(k, delta);
        let (region, arms) = if k == 0 {
            (Region::RightGap, GAP)
        } else {
            (Region::RightComb, TOOTH_SPACING)
        };
        b.hinge(region, arms, d1, d2, Feature::C(k));
        let x = b.cur().x;
        let down = b.to(x, RIGHT_TIP);
        tooth_map.insert(down, (Comb::Right, k));
        right_teeth.push(down);
        if k + 1 < n {
            b.to(x, RIGHT_SPINE);
            tooth_map.insert(down + 1, (Comb::Right, k));
        }
    }
    // Junctions need the following hinge, so they are added afterwards.
    for &d in &right_teeth[..n - 1] {
        b.junction(d);
    }

    let chain = Chain::with_overlaps(b.verts, b.overlaps)?;
    if let Some((i, j)) = chain.first_violation() {
        return Err(Error::NotSimple(i, j));
    }
    let built = CanonicalChain {
        n,
        delta,
        step,
        chain,
        hinges: b.hinges,
        left_teeth,
        right_teeth,
        risers,
        tooth_map,
    };
    built.certify_bands()?;
    Ok(built)
}

impl CanonicalChain {
    /// Height bands: left bumps, right bumps and the tooth overlap band are
    /// pairwise disjoint; tread bumps stay within half a step of their tread.
    fn certify_bands(&self) -> Result<()> {
        let v = self.chain.vertices();
        let tol = self.chain.tolerance();
        for h in &self.hinges {
            let base = v[h.alpha1].y;
            let ys = (h.alpha1..=h.alpha2() + 1).map(|i| v[i].y);
            let (lo, hi) = match h.region {
                Region::LeadIn | Region::LeftComb | Region::LeftGap => (-self.delta, 0.0),
                Region::RightGap | Region::RightComb => (RIGHT_SPINE, RIGHT_SPINE + self.delta),
                Region::Stair => (base - self.step / 2.0, base + self.step / 2.0),
            };
            for y in ys {
                if y < lo - tol || y > hi + tol {
                    return Err(Error::Certificate(format!("hinge {} leaves its band at height {y}", h.id)));
                }
            }
        }
        let bands = [(-self.delta, 0.0), (RIGHT_SPINE, RIGHT_SPINE + self.delta), (RIGHT_TIP, LEFT_TIP)];
        for (i, a) in bands.iter().enumerate() {
            for b in &bands[i + 1..] {
                if a.0 < b.1 && b.0 < a.1 {
                    return Err(Error::Certificate(format!("bands {a:?} and {b:?} overlap")));
                }
            }
        }
        Ok(())
    }

    /// Abscissa of every feature, in hinge order, for the unfolded chain.
    pub fn canonical_targets(&self) -> Vec<f64> {
        let v = self.chain.vertices();
        self.hinges.iter().map(|h| v[h.alpha2() + 1].x).collect()
    }
}

/// Rotation program of one hinge.
#[derive(Debug, Clone, PartialEq)]
pub struct HingeFoldPlan {
    pub hinge: usize,
    pub span: f64,
    pub theta: f64,
    /// `(edge, angle)` in execution order, angles already oriented.
    pub program: [(usize, f64); 3],
}

pub fn plan_fold(chain: &Chain, hinge: &Hinge, span: f64) -> Result<HingeFoldPlan> {
    let arms = hinge.arms;
    if !(span > 0.0 && span <= arms + PLACEMENT_TOL) {
        return Err(Error::SpanOutOfRange { span, arms });
    }
    let theta = (span / arms).min(1.0).acos();
    let v = chain.vertices();
    let dir = |e: usize| (v[e + 1] - v[e]).normalized();
    let reference = dir(hinge.alpha1);
    let oriented = |e: usize, a: f64| {
        let s = if dir(e).dot(reference) >= 0.0 { 1.0 } else { -1.0 };
        (e, s * a)
    };
    Ok(HingeFoldPlan {
        hinge: hinge.id,
        span,
        theta,
        program: [
            oriented(hinge.alpha1, theta),
            oriented(hinge.uv(), -2.0 * theta),
            oriented(hinge.alpha2(), theta),
        ],
    })
}

fn check_coplanar(chain: &Chain, hinge: &Hinge) -> Result<()> {
    let v = chain.vertices();
    let p0 = v[hinge.alpha1];
    let axis = v[hinge.alpha1 + 1] - p0;
    let arm = v[hinge.alpha1 + 2] - v[hinge.alpha1 + 1];
    let normal = axis.cross(arm).normalized();
    if v[hinge.alpha1..].iter().any(|p| (*p - p0).dot(normal).abs() > PLACEMENT_TOL) {
        return Err(Error::NotCoplanar(hinge.id));
    }
    Ok(())
}

/// Runs the three checked rotations of `plan`. Any blocked step is an error.
pub fn fold_hinge(
    chain: &Chain,
    hinge: &Hinge,
    plan: &HingeFoldPlan,
    jobs: usize,
) -> Result<(Chain, Vec<QueryRecord>)> {
    check_coplanar(chain, hinge)?;
    let mut cur = chain.clone();
    let mut records = Vec::with_capacity(3);
    for (step, &(edge, phi)) in plan.program.iter().enumerate() {
        let q = DihedralQuery::new(edge, phi);
        let out = dyn_rotate_jobs(&cur, &q, jobs)?;
        records.push(QueryRecord::new(&q, &out.feasibility));
        if let Some(ev) = out.feasibility.event {
            return Err(Error::FoldCollision {
                hinge: hinge.id,
                step,
                moving: ev.moving_segment,
                fixed: ev.static_segment,
            });
        }
        cur = out.chain;
    }
    let v = cur.vertices();
    let got = v[hinge.alpha1].dist(v[hinge.alpha2() + 1]);
    if (got - plan.span).abs() > PLACEMENT_TOL {
        return Err(Error::Certificate(format!(
            "hinge {} span {got} after folding, wanted {}",
            hinge.id, plan.span
        )));
    }
    Ok((cur, records))
}

/// Folds every hinge, left to right, so that the feature it controls lands
/// on `targets[hinge.id]`.
pub fn encode_targets(c: &CanonicalChain, targets: &[f64], jobs: usize) -> Result<(Chain, Vec<QueryRecord>)> {
    let mut chain = c.chain.clone();
    let mut records = Vec::with_capacity(3 * c.hinges.len());
    for h in &c.hinges {
        let start = chain.vertices()[h.alpha1].x;
        let span = targets[h.id] - start;
        if !(span > 0.0 && span <= h.arms + PLACEMENT_TOL) {
            return Err(Error::Unreachable {
                hinge: h.id,
                span,
                arms: h.arms,
            });
        }
        let plan = plan_fold(&chain, h, span)?;
        let (next, recs) = fold_hinge(&chain, h, &plan, jobs)?;
        chain = next;
        records.extend(recs);
    }
    for h in &c.hinges {
        let x = chain.vertices()[h.alpha2() + 1].x;
        if (x - targets[h.id]).abs() > PLACEMENT_TOL {
            return Err(Error::Certificate(format!(
                "feature of hinge {} at {x}, wanted {}",
                h.id, targets[h.id]
            )));
        }
    }
    Ok((chain, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::dihedral_feasible;
    use std::f64::consts::{FRAC_PI_3, TAU};

    #[test]
    fn parameters_for_small_n() {
        let c = build_canonical_chain(5).unwrap();
        assert_eq!(c.risers.len(), 6);
        assert_eq!(c.hinges.len(), 15);
        assert_eq!(c.left_teeth.len(), 5);
        assert_eq!(c.right_teeth.len(), 5);
        assert!((c.step - 0.25).abs() < 1e-15);
        assert!((c.delta - 0.1).abs() < 1e-15);

        let one = build_canonical_chain(1).unwrap();
        assert_eq!(one.left_teeth.len() + one.right_teeth.len(), 2);
        assert_eq!(one.risers.len(), 2);
        assert_eq!(one.hinges.len(), 3);
        assert!(matches!(build_canonical_chain(0), Err(Error::ZeroSize)));
    }

    #[test]
    fn canonical_positions() {
        let c = build_canonical_chain(3).unwrap();
        let v = c.chain.vertices();
        let xs: Vec<f64> = c.left_teeth.iter().map(|&e| v[e].x).collect();
        assert_eq!(xs, vec![-4.0, -2.0, 0.0]);
        let r0 = v[c.risers[0].0].x;
        assert_eq!(r0, 7.0);
        assert_eq!(v[c.risers[3].0].x, 10.0);
        assert_eq!(v[c.right_teeth[0]].x, 17.0);
        assert_eq!(v.last().unwrap().y, RIGHT_TIP);
        assert!(c.chain.is_simple());
        assert!(!c.chain.allowed_overlaps().is_empty());
    }

    #[test]
    fn structure_depends_only_on_n() {
        let a = build_canonical_chain(4).unwrap();
        let b = build_canonical_chain(4).unwrap();
        assert_eq!(a.chain, b.chain);
        assert_eq!(a.hinges, b.hinges);
    }

    #[test]
    fn identity_targets_fold_nothing() {
        let c = build_canonical_chain(3).unwrap();
        let t = c.canonical_targets();
        let (chain, recs) = encode_targets(&c, &t, 1).unwrap();
        assert_eq!(recs.len(), 27);
        assert!(recs.iter().all(|r| r.angle == 0.0));
        for (p, q) in chain.vertices().iter().zip(c.chain.vertices()) {
            assert!(p.max_abs_diff(*q) < 1e-12);
        }
    }

    #[test]
    fn fold_half_span() {
        let c = build_canonical_chain(2).unwrap();
        // First tread hinge has arms 1.
        let h = c.hinges.iter().find(|h| h.region == Region::Stair).unwrap();
        let plan = plan_fold(&c.chain, h, 0.5).unwrap();
        assert!((plan.theta - FRAC_PI_3).abs() < 1e-12);
        let before = c.chain.vertices().to_vec();
        let (after, recs) = fold_hinge(&c.chain, h, &plan, 1).unwrap();
        assert_eq!(recs.len(), 3);
        let tail = h.alpha2() + 1;
        for (a, b) in after.vertices()[tail..].iter().zip(&before[tail..]) {
            let d = *a - *b;
            assert!((d.x + 0.5).abs() < 1e-9 && d.y.abs() < 1e-9 && d.z.abs() < 1e-9);
        }
        assert!(matches!(plan_fold(&c.chain, h, 1.5), Err(Error::SpanOutOfRange { .. })));
        assert!(matches!(plan_fold(&c.chain, h, 0.0), Err(Error::SpanOutOfRange { .. })));
    }

    #[test]
    fn random_folds_are_exact() {
        let c = build_canonical_chain(2).unwrap();
        for (k, d) in [0.01, 0.3, 0.77, 0.999, 1.0].iter().enumerate() {
            let h = &c.hinges[k % c.hinges.len()];
            let span = d * h.arms;
            let plan = plan_fold(&c.chain, h, span).unwrap();
            let (after, _) = fold_hinge(&c.chain, h, &plan, 1).unwrap();
            let v = after.vertices();
            assert!((v[h.alpha1].dist(v[h.alpha2() + 1]) - span).abs() < 1e-9);
            let last = *v.last().unwrap();
            let orig = *c.chain.vertices().last().unwrap();
            assert!((last.y - orig.y).abs() < 1e-9 && last.z.abs() < 1e-9);
        }
    }

    #[test]
    fn unfolded_probes_are_free() {
        // Canonical tooth radii about a canonical riser never coincide.
        let c = build_canonical_chain(3).unwrap();
        for r in &c.risers[..3] {
            let f = dihedral_feasible(&c.chain, &DihedralQuery { edge: *r, phi: TAU }).unwrap();
            assert!(f.is_feasible(), "{r:?}: {:?}", f.event);
        }
    }
}
