//! Unchecked dihedral rotations in `O(log n)` each.
//!
//! A static balanced binary tree sits over the chain's vertices. Leaves keep
//! stored coordinates, every node keeps a rigid motion, and the position of a
//! vertex is its stored point pushed through the motions on its leaf-to-root
//! path, leaf first:
//!
//! ```text
//! eff(root) = M(root)
//! eff(v)    = eff(parent(v)) ∘ M(v)
//! position(ℓ) = eff(ℓ)(stored(ℓ))
//! ```
//!
//! A rotation `R` of the suffix after an edge touches the `O(log n)` maximal
//! subtrees covering that suffix. For such a subtree root `v` with parent `u`
//! the update is `M(v) ← (eff(u)⁻¹ ∘ R ∘ eff(u)) ∘ M(v)`, which turns
//! `eff(w)` into `R ∘ eff(w)` for every `w` below `v`.

use crate::chain::{Chain, EdgeRef};
use crate::error::{Error, Result};
use crate::geom3::{compose, rotate_about_axis, AxisLine, Point3, RigidMotion};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Node {
    lo: usize,
    hi: usize,
    left: usize,
    right: usize,
    motion: RigidMotion,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeCounters {
    /// Node motions rewritten by the most recent rotation.
    pub last_rotation_touches: usize,
    pub max_rotation_touches: usize,
    pub total_rotation_touches: usize,
    pub rotations: usize,
    /// Nodes visited by `position` lookups (including those inside rotations).
    pub path_reads: usize,
    /// Leaf motion applications performed by the most recent flush.
    pub last_flush_applications: usize,
}

#[derive(Debug, Clone)]
pub struct MotionTree {
    nodes: Vec<Node>,
    stored: Vec<Point3>,
    root: usize,
    template: Chain,
    eps: f64,
    counters: TreeCounters,
}

impl MotionTree {
    pub fn build(chain: &Chain) -> MotionTree {
        let n = chain.vertex_count();
        let mut tree = MotionTree {
            nodes: Vec::with_capacity(2 * n),
            stored: chain.vertices().to_vec(),
            root: NONE,
            template: chain.clone(),
            eps: chain.tolerance(),
            counters: TreeCounters::default(),
        };
        tree.root = tree.build_range(0, n);
        tree
    }

    fn build_range(&mut self, lo: usize, hi: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            lo,
            hi,
            left: NONE,
            right: NONE,
            motion: RigidMotion::IDENTITY,
        });
        if hi - lo > 1 {
            let mid = lo + (hi - lo).div_ceil(2);
            let l = self.build_range(lo, mid);
            let r = self.build_range(mid, hi);
            self.nodes[id].left = l;
            self.nodes[id].right = r;
        }
        id
    }

    pub fn leaf_count(&self) -> usize {
        self.stored.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        fn depth(t: &MotionTree, v: usize) -> usize {
            let n = &t.nodes[v];
            if n.left == NONE {
                1
            } else {
                1 + depth(t, n.left).max(depth(t, n.right))
            }
        }
        depth(self, self.root)
    }

    pub fn counters(&self) -> &TreeCounters {
        &self.counters
    }

    /// Root-to-leaf path of node ids for vertex `i`.
    fn path(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut v = self.root;
        loop {
            out.push(v);
            let n = &self.nodes[v];
            if n.left == NONE {
                return out;
            }
            v = if i < self.nodes[n.left].hi { n.left } else { n.right };
        }
    }

    pub fn position(&mut self, i: usize) -> Result<Point3> {
        let p = self.peek(i)?;
        self.counters.path_reads += self.path(i).len();
        Ok(p)
    }

    /// `position` without touching the counters; usable through `&self`.
    pub fn peek(&self, i: usize) -> Result<Point3> {
        if i >= self.stored.len() {
            return Err(Error::VertexOutOfRange {
                index: i,
                vertices: self.stored.len(),
            });
        }
        Ok(self
            .path(i)
            .iter()
            .rev()
            .fold(self.stored[i], |p, &v| self.nodes[v].motion.apply(p)))
    }

    /// Rotates every vertex after `e` by `phi` about the current line through
    /// `e`. No collision checking.
    pub fn rotate_lazy(&mut self, e: EdgeRef, phi: f64) -> Result<()> {
        if e.0 + 1 >= self.stored.len() {
            return Err(Error::EdgeOutOfRange {
                index: e.0,
                vertices: self.stored.len(),
            });
        }
        if !phi.is_finite() {
            return Err(Error::NonFinite("angle"));
        }
        let u = self.position(e.0)?;
        let v = self.position(e.0 + 1)?;
        if u.dist(v) <= self.eps {
            return Err(Error::DegenerateEdge(e.0));
        }
        let rot = rotate_about_axis(&AxisLine::through(u, v)?, phi);
        let start = e.0 + 1;

        let mut touches = 0;
        let mut above = RigidMotion::IDENTITY;
        let mut v = self.root;
        loop {
            let (lo, left, right) = {
                let n = &self.nodes[v];
                (n.lo, n.left, n.right)
            };
            if lo >= start {
                self.premultiply(v, &above, &rot);
                touches += 1;
                break;
            }
            let here = compose(&above, &self.nodes[v].motion);
            if self.nodes[right].lo >= start {
                if self.nodes[left].hi > start {
                    self.premultiply(right, &here, &rot);
                    touches += 1;
                    v = left;
                } else {
                    v = right;
                }
            } else {
                v = right;
            }
            above = here;
        }

        let c = &mut self.counters;
        c.last_rotation_touches = touches;
        c.max_rotation_touches = c.max_rotation_touches.max(touches);
        c.total_rotation_touches += touches;
        c.rotations += 1;
        Ok(())
    }

    /// `M(v) ← (above⁻¹ ∘ rot ∘ above) ∘ M(v)`.
    fn premultiply(&mut self, v: usize, above: &RigidMotion, rot: &RigidMotion) {
        let local = if above.is_identity() {
            *rot
        } else {
            compose(&above.inverse(), &compose(rot, above))
        };
        let m = &mut self.nodes[v].motion;
        *m = compose(&local, m);
    }

    /// Writes the effective motions into the stored coordinates with one
    /// traversal, resets every motion to the identity and returns the chain.
    pub fn flush(&mut self) -> Chain {
        let mut applications = 0;
        let mut stack = vec![(self.root, RigidMotion::IDENTITY)];
        while let Some((v, above)) = stack.pop() {
            let eff = compose(&above, &self.nodes[v].motion);
            self.nodes[v].motion = RigidMotion::IDENTITY;
            let (lo, left, right) = {
                let n = &self.nodes[v];
                (n.lo, n.left, n.right)
            };
            if left == NONE {
                self.stored[lo] = eff.apply(self.stored[lo]);
                applications += 1;
            } else {
                stack.push((right, eff));
                stack.push((left, eff));
            }
        }
        self.counters.last_flush_applications = applications;
        self.template.with_vertices(self.stored.clone())
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::geom3::Vec3;
    use proptest::prelude::*;

    fn zigzag(n: usize) -> Chain {
        Chain::new(
            (0..n)
                .map(|i| Vec3::new(i as f64, (i % 2) as f64 * 0.7, (i % 3) as f64 * 0.4))
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn lazy_matches_eager(
            n in 3usize..40,
            ops in prop::collection::vec((0usize..1000, -6.3f64..6.3), 1..40),
        ) {
            let mut eager = zigzag(n);
            let mut tree = MotionTree::build(&eager);
            let bound = (n as f64).log2().ceil() as usize;
            for (k, (e, phi)) in ops.iter().enumerate() {
                let e = e % (n - 1);
                eager = eager.apply_dihedral(EdgeRef(e), *phi).unwrap();
                tree.rotate_lazy(EdgeRef(e), *phi).unwrap();
                prop_assert!(tree.counters().last_rotation_touches <= bound.max(1));
                if k % 7 == 3 {
                    tree.flush();
                }
            }
            for i in 0..n {
                prop_assert!(tree.peek(i).unwrap().max_abs_diff(eager.vertices()[i]) <= 1e-8);
            }
        }
    }
}
