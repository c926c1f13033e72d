//! Continuous collision detection for dihedral rotations.
//!
//! A rotation about a fixed axis preserves the height and the radius of every
//! moving point, so a moving point can only ever meet static points with the
//! same height and radius. For a pair of segments those candidates are the
//! solutions of one affine height equation and one quadratic radius
//! equation; each candidate then contributes the angle the moving point has
//! to travel before it reaches the static one. The smallest such angle, if
//! it is within the sweep, is the first contact.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::chain::{closest_pair, Chain, EdgeRef, Segment};
use crate::error::{Error, Result};
use crate::geom3::{tolerance_for, wrap_angle, AxisLine, Point3};

/// Contacts whose sweep fractions differ by less than this are ties.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DihedralQuery {
    pub edge: EdgeRef,
    pub phi: f64,
}

impl DihedralQuery {
    pub fn new(edge: usize, phi: f64) -> Self {
        DihedralQuery {
            edge: EdgeRef(edge),
            phi,
        }
    }
}

/// First contact between a rotating and a static segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepContact {
    /// Fraction of the requested sweep completed at first contact.
    pub t_fraction: f64,
    /// Rotation angle (magnitude) at first contact.
    pub angle_at_contact: f64,
    /// Contact point on the static segment.
    pub contact: Point3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CollisionEvent {
    pub t_fraction: f64,
    pub angle_at_contact: f64,
    pub moving_segment: usize,
    pub static_segment: usize,
    pub contact: Point3,
}

/// Verdict of a feasibility query plus the work it did.
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub event: Option<CollisionEvent>,
    pub pair_tests: u64,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        self.event.is_none()
    }
}

/// A segment expressed in the cylindrical frame of an axis: in-plane
/// coordinates `(x, y)` and height `h`, all affine in the segment parameter.
#[derive(Debug, Clone, Copy)]
struct LocalSeg {
    p0: [f64; 2],
    d: [f64; 2],
    h0: f64,
    dh: f64,
    rmin: f64,
    rmax: f64,
    hmin: f64,
    hmax: f64,
}

impl LocalSeg {
    fn new(axis: &AxisLine, s: &Segment) -> Self {
        let (x0, y0, h0) = axis.local(s.a);
        let (x1, y1, h1) = axis.local(s.b);
        let d = [x1 - x0, y1 - y0];
        let len2 = d[0] * d[0] + d[1] * d[1];
        let t = if len2 > 0.0 {
            (-(x0 * d[0] + y0 * d[1]) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let rmin = (x0 + t * d[0]).hypot(y0 + t * d[1]);
        let rmax = x0.hypot(y0).max(x1.hypot(y1));
        LocalSeg {
            p0: [x0, y0],
            d,
            h0,
            dh: h1 - h0,
            rmin,
            rmax,
            hmin: h0.min(h1),
            hmax: h0.max(h1),
        }
    }

    fn xy(&self, t: f64) -> [f64; 2] {
        [self.p0[0] + t * self.d[0], self.p0[1] + t * self.d[1]]
    }

    fn height(&self, t: f64) -> f64 {
        self.h0 + t * self.dh
    }

    fn radius(&self, t: f64) -> f64 {
        let [x, y] = self.xy(t);
        x.hypot(y)
    }

    /// Coefficients of `r²(t)`.
    fn r2_coeffs(&self) -> (f64, f64, f64) {
        let [x, y] = self.p0;
        let [dx, dy] = self.d;
        (dx * dx + dy * dy, 2.0 * (x * dx + y * dy), x * x + y * y)
    }
}

/// Real roots of `a t² + b t + c` inside `[lo, hi]`.
fn quadratic_roots(a: f64, b: f64, c: f64, lo: f64, hi: f64, out: &mut Vec<f64>) {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return;
    }
    let tiny = 1e-14 * scale;
    let mut push = |t: f64| {
        if t.is_finite() && t >= lo && t <= hi {
            out.push(t);
        }
    };
    if a.abs() <= tiny {
        if b.abs() > tiny {
            push(-c / b);
        }
        return;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    push(q / a);
    if q != 0.0 {
        push(c / q);
    }
}

/// Vertex of the parabola `a t² + b t + c`, if inside `[lo, hi]`.
fn vertex(a: f64, b: f64, lo: f64, hi: f64) -> Option<f64> {
    if a.abs() > 0.0 {
        let t = -b / (2.0 * a);
        (t > lo && t < hi).then_some(t)
    } else {
        None
    }
}

/// Parameter pairs `(t_param, t_dep)` along the height-matching line where the
/// dependent segment's height is affine in the parameter segment's.
fn line_candidates(param: &LocalSeg, dep: &LocalSeg, eps: f64, out: &mut Vec<(f64, f64)>) {
    // dep.h0 + dep.dh * v = param.h0 + param.dh * u  =>  v = alpha + beta * u
    let alpha = (param.h0 - dep.h0) / dep.dh;
    let beta = param.dh / dep.dh;
    let slack = eps / dep.dh.abs();
    let (vlo, vhi) = (-slack, 1.0 + slack);
    let (ulo, uhi) = if beta.abs() <= f64::EPSILON {
        if alpha < vlo || alpha > vhi {
            return;
        }
        (0.0, 1.0)
    } else {
        let a = (vlo - alpha) / beta;
        let b = (vhi - alpha) / beta;
        (a.min(b).max(0.0), a.max(b).min(1.0))
    };
    if ulo > uhi {
        return;
    }
    // Both in-plane points are affine in u along this line.
    let dep0 = dep.xy(alpha);
    let dep1 = [dep.d[0] * beta, dep.d[1] * beta];
    let (pa, pb, pc) = param.r2_coeffs();
    let qa = dep1[0] * dep1[0] + dep1[1] * dep1[1];
    let qb = 2.0 * (dep0[0] * dep1[0] + dep0[1] * dep1[1]);
    let qc = dep0[0] * dep0[0] + dep0[1] * dep0[1];
    let (a, b, c) = (pa - qa, pb - qb, pc - qc);

    let mut ts = vec![ulo, uhi];
    quadratic_roots(a, b, c, ulo, uhi, &mut ts);
    ts.extend(vertex(a, b, ulo, uhi));
    for u in ts {
        out.push((u, (alpha + beta * u).clamp(0.0, 1.0)));
    }
}

/// Parameters on `seg` where its radius equals `r`, plus the endpoints and
/// the point of closest radius.
fn radius_candidates(seg: &LocalSeg, r: f64, out: &mut Vec<f64>) {
    let (a, b, c) = seg.r2_coeffs();
    out.push(0.0);
    out.push(1.0);
    quadratic_roots(a, b, c - r * r, 0.0, 1.0, out);
    out.extend(vertex(a, b, 0.0, 1.0));
}

fn candidate_pairs(m: &LocalSeg, s: &LocalSeg, eps: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if s.dh.abs() > eps {
        line_candidates(m, s, eps, &mut out);
    } else if m.dh.abs() > eps {
        let mut swapped = Vec::new();
        line_candidates(s, m, eps, &mut swapped);
        out.extend(swapped.into_iter().map(|(v, u)| (u, v)));
    } else {
        // Both segments lie in one plane normal to the axis. A first contact
        // between two planar segments always involves an endpoint of one.
        let mut ts = Vec::new();
        for u in [0.0, 1.0] {
            ts.clear();
            radius_candidates(s, m.radius(u), &mut ts);
            out.extend(ts.iter().map(|&v| (u, v)));
        }
        for v in [0.0, 1.0] {
            ts.clear();
            radius_candidates(m, s.radius(v), &mut ts);
            out.extend(ts.iter().map(|&u| (u, v)));
        }
    }
    out
}

struct PairInput<'a> {
    axis: &'a AxisLine,
    phi: f64,
    eps: f64,
    exempt_shared_axis_vertex: bool,
}

/// Whether `p` is a common endpoint of both segments lying on the axis.
fn is_shared_axis_vertex(ctx: &PairInput<'_>, p: Point3, moving: &Segment, fixed: &Segment) -> bool {
    let eps = ctx.eps;
    [moving.a, moving.b].into_iter().any(|em| {
        em.dist(p) <= 2.0 * eps
            && ctx.axis.distance_to(em) <= eps
            && (fixed.a.dist(em) <= eps || fixed.b.dist(em) <= eps)
    })
}

fn sweep_pair(
    ctx: &PairInput<'_>,
    moving: &Segment,
    fixed: &Segment,
    lm: &LocalSeg,
    ls: &LocalSeg,
) -> Option<SweepContact> {
    let eps = ctx.eps;
    if lm.hmin > ls.hmax + eps || ls.hmin > lm.hmax + eps {
        return None;
    }
    if lm.rmin > ls.rmax + eps || ls.rmin > lm.rmax + eps {
        return None;
    }
    let sweep = ctx.phi.abs();
    let full = sweep >= TAU;
    let sign = if ctx.phi < 0.0 { -1.0 } else { 1.0 };

    // (gap, static parameter)
    let mut best: Option<(f64, f64)> = None;
    let mut consider = |gap: f64, v: f64| {
        if best.is_none_or(|(g, _)| gap < g) {
            best = Some((gap, v));
        }
    };

    let initial = closest_pair(moving, fixed);
    if initial.distance <= eps {
        let p = moving.at(initial.s);
        if !(ctx.exempt_shared_axis_vertex && is_shared_axis_vertex(ctx, p, moving, fixed)) {
            consider(0.0, initial.t);
        }
    }

    for (u, v) in candidate_pairs(lm, ls, eps) {
        if (lm.height(u) - ls.height(v)).abs() > eps {
            continue;
        }
        let rm = lm.radius(u);
        let rs = ls.radius(v);
        if (rm - rs).abs() > eps {
            continue;
        }
        let gap = if rm <= eps || rs <= eps {
            // On the axis: stationary, touches only what is already there.
            if moving.at(u).dist(fixed.at(v)) > eps {
                continue;
            }
            0.0
        } else {
            let [xm, ym] = lm.xy(u);
            let [xs, ys] = ls.xy(v);
            let g = wrap_angle(sign * (ys.atan2(xs) - ym.atan2(xm)));
            if TAU - g <= eps / rm {
                0.0
            } else {
                g
            }
        };
        if gap == 0.0
            && ctx.exempt_shared_axis_vertex
            && is_shared_axis_vertex(ctx, moving.at(u), moving, fixed)
        {
            continue;
        }
        let ang_tol = eps / rm.max(eps);
        if full || gap <= sweep + ang_tol {
            consider(gap, v);
        }
    }

    best.map(|(gap, v)| {
        let angle = if full { gap } else { gap.min(sweep) };
        let t_fraction = if sweep > 0.0 { (gap / sweep).min(1.0) } else { 0.0 };
        SweepContact {
            t_fraction,
            angle_at_contact: angle,
            contact: fixed.at(v),
        }
    })
}

/// Earliest contact of `moving`, rotated about `axis` by total angle `phi`,
/// with `fixed`. The tolerance is derived from the inputs.
pub fn sweep_collision(
    axis: &AxisLine,
    phi: f64,
    moving: &Segment,
    fixed: &Segment,
) -> Result<Option<SweepContact>> {
    let eps = tolerance_for([axis.origin(), moving.a, moving.b, fixed.a, fixed.b]);
    sweep_collision_with_tol(axis, phi, moving, fixed, eps)
}

pub fn sweep_collision_with_tol(
    axis: &AxisLine,
    phi: f64,
    moving: &Segment,
    fixed: &Segment,
    eps: f64,
) -> Result<Option<SweepContact>> {
    if !phi.is_finite() || ![moving.a, moving.b, fixed.a, fixed.b].iter().all(|p| p.is_finite()) {
        return Err(Error::NonFinite("sweep input"));
    }
    let ctx = PairInput {
        axis,
        phi,
        eps,
        exempt_shared_axis_vertex: false,
    };
    let lm = LocalSeg::new(axis, moving);
    let ls = LocalSeg::new(axis, fixed);
    Ok(sweep_pair(&ctx, moving, fixed, &lm, &ls))
}

/// Decides whether rotating the part of `chain` after `q.edge` by `q.phi`
/// stays free of self-contact. Every moving segment is tested against every
/// static segment.
pub fn dihedral_feasible(chain: &Chain, q: &DihedralQuery) -> Result<Feasibility> {
    dihedral_feasible_jobs(chain, q, 1)
}

/// Knobs for a feasibility check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Worker threads for the pair loop; the result does not depend on it.
    pub jobs: usize,
    /// Replaces the chain-derived contact tolerance.
    pub tolerance: Option<f64>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            jobs: 1,
            tolerance: None,
        }
    }
}

/// [`dihedral_feasible`] with the pair loop split over `jobs` threads. The
/// result does not depend on `jobs`.
pub fn dihedral_feasible_jobs(chain: &Chain, q: &DihedralQuery, jobs: usize) -> Result<Feasibility> {
    dihedral_feasible_opts(chain, q, &SweepOptions { jobs, tolerance: None })
}

pub fn dihedral_feasible_opts(chain: &Chain, q: &DihedralQuery, opts: &SweepOptions) -> Result<Feasibility> {
    if !q.phi.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    let axis = chain.edge_axis(q.edge)?;
    let eps = match opts.tolerance {
        Some(t) if t.is_finite() && t >= 0.0 => t,
        Some(_) => return Err(Error::NonFinite("tolerance")),
        None => chain.tolerance(),
    };
    let jobs = opts.jobs;
    let e = q.edge.0;
    let segs: Vec<Segment> = (0..chain.segment_count()).map(|i| chain.segment(i)).collect();
    let local: Vec<LocalSeg> = segs.iter().map(|s| LocalSeg::new(&axis, s)).collect();
    let ctx = PairInput {
        axis: &axis,
        phi: q.phi,
        eps,
        exempt_shared_axis_vertex: true,
    };

    let moving: Vec<usize> = (e + 1..segs.len()).collect();
    let run = |ids: &[usize]| -> Vec<CollisionEvent> {
        let mut hits = Vec::new();
        for &j in ids {
            for i in 0..e {
                if let Some(c) = sweep_pair(&ctx, &segs[j], &segs[i], &local[j], &local[i]) {
                    hits.push(CollisionEvent {
                        t_fraction: c.t_fraction,
                        angle_at_contact: c.angle_at_contact,
                        moving_segment: j,
                        static_segment: i,
                        contact: c.contact,
                    });
                }
            }
        }
        hits
    };

    let jobs = jobs.max(1);
    let hits: Vec<CollisionEvent> = if jobs == 1 || moving.len() < 2 * jobs {
        run(&moving)
    } else {
        let chunk = moving.len().div_ceil(jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = moving.chunks(chunk).map(|ids| scope.spawn(move || run(ids))).collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("pair worker panicked"))
                .collect()
        })
    };

    Ok(Feasibility {
        event: earliest(&hits),
        pair_tests: (moving.len() * e) as u64,
    })
}

/// Smallest sweep fraction, ties broken by `(moving, static)` index pair.
fn earliest(hits: &[CollisionEvent]) -> Option<CollisionEvent> {
    let tmin = hits.iter().map(|h| h.t_fraction).fold(f64::INFINITY, f64::min);
    hits.iter()
        .filter(|h| h.t_fraction <= tmin + TIE_TOL)
        .min_by_key(|h| (h.moving_segment, h.static_segment))
        .copied()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynOutcome {
    pub chain: Chain,
    pub applied: bool,
    pub feasibility: Feasibility,
}

/// Checks `q` and performs it when feasible; otherwise the chain is returned
/// unchanged.
pub fn dyn_rotate(chain: &Chain, q: &DihedralQuery) -> Result<DynOutcome> {
    dyn_rotate_jobs(chain, q, 1)
}

pub fn dyn_rotate_jobs(chain: &Chain, q: &DihedralQuery, jobs: usize) -> Result<DynOutcome> {
    dyn_rotate_opts(chain, q, &SweepOptions { jobs, tolerance: None })
}

pub fn dyn_rotate_opts(chain: &Chain, q: &DihedralQuery, opts: &SweepOptions) -> Result<DynOutcome> {
    let feasibility = dihedral_feasible_opts(chain, q, opts)?;
    if feasibility.is_feasible() {
        Ok(DynOutcome {
            chain: chain.apply_dihedral(q.edge, q.phi)?,
            applied: true,
            feasibility,
        })
    } else {
        Ok(DynOutcome {
            chain: chain.clone(),
            applied: false,
            feasibility,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom3::Vec3;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    fn seg(a: Vec3, b: Vec3) -> Segment {
        Segment::new(a, b)
    }

    #[test]
    fn parallel_segments_meet_at_half_turn() {
        let z = AxisLine::z_axis();
        let m = seg(v(1., 0., 0.2), v(1., 0., 0.8));
        let s = seg(v(-1., 0., 0.3), v(-1., 0., 0.7));
        let hit = sweep_collision(&z, PI, &m, &s).unwrap().expect("contact");
        assert!((hit.angle_at_contact - PI).abs() < 1e-12);
        assert!((hit.t_fraction - 1.0).abs() < 1e-12);
        assert!(sweep_collision(&z, FRAC_PI_2, &m, &s).unwrap().is_none());
        // Clockwise reaches the same point after the same angle.
        assert!(sweep_collision(&z, -PI, &m, &s).unwrap().is_some());
    }

    #[test]
    fn vertical_meets_horizontal_at_three_quarters() {
        let z = AxisLine::z_axis();
        let m = seg(v(2., 0., 0.), v(2., 0., 1.));
        let s = seg(v(0., -3., 0.5), v(0., -1., 0.5));
        let hit = sweep_collision(&z, 2.0 * PI, &m, &s).unwrap().expect("contact");
        assert!((hit.angle_at_contact - 1.5 * PI).abs() < 1e-12);
        assert!(hit.contact.max_abs_diff(v(0., -2., 0.5)) < 1e-12);
        // Clockwise gets there after a quarter turn.
        let cw = sweep_collision(&z, -2.0 * PI, &m, &s).unwrap().unwrap();
        assert!((cw.angle_at_contact - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn coplanar_segments() {
        let z = AxisLine::z_axis();
        // Moving radial spoke on the x axis, static chord crossing the y axis.
        let m = seg(v(0.5, 0., 0.), v(2., 0., 0.));
        let s = seg(v(-0.5, 1., 0.), v(0.5, 1., 0.));
        let hit = sweep_collision(&z, PI, &m, &s).unwrap().expect("contact");
        // Tip at radius 2 never reaches the chord, the spoke crosses y=1 at
        // the chord's end first: angle where (0.5, 1) sits is atan2(1, .5).
        let first = 1f64.atan2(0.5);
        assert!((hit.angle_at_contact - first).abs() < 1e-12, "{}", hit.angle_at_contact);
        assert!(sweep_collision(&z, 1.0, &m, &s).unwrap().is_none());
    }

    #[test]
    fn separated_heights_never_touch() {
        let z = AxisLine::z_axis();
        let m = seg(v(1., 0., 1.), v(2., 0., 1.));
        let s = seg(v(-1., 0., 0.), v(-2., 0., 0.));
        assert!(sweep_collision(&z, 10.0, &m, &s).unwrap().is_none());
    }

    #[test]
    fn nan_rejected() {
        let z = AxisLine::z_axis();
        let m = seg(v(1., 0., 1.), v(2., 0., 1.));
        assert!(sweep_collision(&z, f64::NAN, &m, &m).is_err());
    }

    #[test]
    fn zigzag_half_turn_is_feasible() {
        let c = Chain::new(vec![v(0., 0., 0.), v(1., 0., 0.), v(1., 1., 0.), v(2., 1., 0.)]).unwrap();
        let f = dihedral_feasible(&c, &DihedralQuery::new(1, PI)).unwrap();
        assert!(f.is_feasible());
        assert_eq!(f.pair_tests, 1);
    }

    /// Arms on opposite sides of the vertical middle edge; they share the
    /// radius 0.8 at height 0.8, half a turn apart.
    fn hook() -> Chain {
        Chain::new(vec![v(1., 1., 0.), v(0., 0., 0.), v(0., 2., 0.), v(-1., 0.5, 0.)]).unwrap()
    }

    #[test]
    fn hook_hits_its_own_tail() {
        let c = hook();
        let f = dihedral_feasible(&c, &DihedralQuery::new(1, PI)).unwrap();
        let ev = f.event.expect("collision");
        assert_eq!((ev.moving_segment, ev.static_segment), (2, 0));
        assert!((ev.t_fraction - 1.0).abs() < 1e-12);
        assert!(ev.contact.max_abs_diff(v(0.8, 0.8, 0.)) < 1e-12);
        let small = dihedral_feasible(&c, &DihedralQuery::new(1, 0.5)).unwrap();
        assert!(small.is_feasible());
    }

    #[test]
    fn dyn_rotate_semantics() {
        let c = hook();
        let blocked = dyn_rotate(&c, &DihedralQuery::new(1, PI)).unwrap();
        assert!(!blocked.applied);
        assert_eq!(blocked.chain, c);

        let q = DihedralQuery::new(1, 0.5);
        let ok = dyn_rotate(&c, &q).unwrap();
        assert!(ok.applied);
        assert_eq!(ok.chain, c.apply_dihedral(q.edge, q.phi).unwrap());
        let back = dyn_rotate(&ok.chain, &DihedralQuery::new(1, -0.5)).unwrap();
        for (a, b) in back.chain.vertices().iter().zip(c.vertices()) {
            assert!(a.max_abs_diff(*b) <= 1e-9);
        }
    }

    #[test]
    fn jobs_do_not_change_result() {
        let vs: Vec<Vec3> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.7;
                v(t.cos() * (1.0 + 0.1 * i as f64), t.sin() * (1.0 + 0.1 * i as f64), 0.05 * i as f64)
            })
            .collect();
        let c = Chain::new(vs).unwrap();
        for e in [3, 17, 30] {
            let q = DihedralQuery::new(e, 2.5);
            assert_eq!(dihedral_feasible_jobs(&c, &q, 1).unwrap(), dihedral_feasible_jobs(&c, &q, 4).unwrap());
        }
    }

    #[test]
    fn first_contact_angle_independent_of_sweep_length() {
        let c = hook();
        let a = dihedral_feasible(&c, &DihedralQuery::new(1, PI)).unwrap().event.unwrap();
        let b = dihedral_feasible(&c, &DihedralQuery::new(1, 3.0 * PI)).unwrap().event.unwrap();
        assert!((a.t_fraction * PI - b.t_fraction * 3.0 * PI).abs() < 1e-12);
    }
}
