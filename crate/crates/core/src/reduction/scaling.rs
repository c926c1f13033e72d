use num_rational::Ratio;

use super::threesum::{ThreeSumInstance, Triple};
use crate::error::{Error, Result};

pub type Q = Ratio<i64>;

/// Padded, sorted sets of equal size plus their geometric targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledSets {
    pub n: usize,
    /// Largest magnitude before padding (1 if everything is zero).
    pub m0: i64,
    /// Largest magnitude after padding.
    pub m: i64,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
    /// How many trailing entries of each set are sentinels.
    pub padding: [usize; 3],
}

fn pad(set: &[i64], n: usize, m0: i64) -> (Vec<i64>, usize) {
    let mut out = set.to_vec();
    let extra = n - set.len();
    out.extend((1..=extra as i64).map(|i| 7 * m0 + i));
    out.sort_unstable();
    (out, extra)
}

/// Pads every set to `n` elements with `7·m0 + 1, 7·m0 + 2, …`. A sentinel
/// can never be part of a zero sum since the other two terms are at least
/// `-2·m0`.
pub fn pad_and_scale(inst: &ThreeSumInstance, n: Option<usize>) -> Result<ScaledSets> {
    if inst.is_empty() {
        return Err(Error::EmptySet);
    }
    let largest = inst.largest_set();
    let n = n.unwrap_or(largest);
    if n < largest {
        return Err(Error::SizeTooSmall { requested: n, largest });
    }
    let m0 = inst.max_abs().max(1);
    let (a, pa) = pad(inst.a(), n, m0);
    let (b, pb) = pad(inst.b(), n, m0);
    let (c, pc) = pad(inst.c(), n, m0);
    let m = a.iter().chain(&b).chain(&c).map(|v| v.abs()).max().unwrap_or(1).max(1);
    Ok(ScaledSets {
        n,
        m0,
        m,
        a,
        b,
        c,
        padding: [pa, pb, pc],
    })
}

impl ScaledSets {
    pub fn static_a(&self, a: i64) -> i64 {
        a - 3 * self.m
    }

    pub fn static_c(&self, c: i64) -> i64 {
        c + 3 * self.m
    }

    /// Abscissa of the staircase vertical for `b`.
    pub fn static_stair(&self, b: i64) -> Q {
        Q::new(-b, 2)
    }

    pub fn dyn_a(&self, a: i64) -> Q {
        Q::new(a, self.m) - 5
    }

    pub fn dyn_b(&self, b: i64) -> Q {
        Q::new(-b, 2 * self.m)
    }

    pub fn dyn_c(&self, c: i64) -> Q {
        Q::new(c, self.m) + 5
    }

    pub fn is_sentinel(&self, v: i64) -> bool {
        v > 7 * self.m0
    }

    /// The three equivalent zero tests for one triple of padded elements.
    pub fn identity_holds(&self, (a, b, c): Triple) -> bool {
        let plain = a + b + c == 0;
        let dynamic = self.dyn_a(a) + self.dyn_c(c) == self.dyn_b(b) * 2;
        let stat = Q::from(self.static_a(a)) + Q::from(b) + Q::from(self.static_c(c)) == Q::from(0);
        plain == dynamic && dynamic == stat
    }
}

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::threesum::solve_threesum_oracle;
    use proptest::prelude::*;

    #[test]
    fn padding_example() {
        let i = ThreeSumInstance::new(vec![1, 2], vec![3], vec![-3]).unwrap();
        let s = pad_and_scale(&i, None).unwrap();
        assert_eq!(s.m0, 3);
        assert_eq!(s.b, vec![3, 22]);
        assert_eq!(s.c, vec![-3, 22]);
        assert_eq!(s.m, 22);
        assert_eq!(s.padding, [0, 1, 1]);
    }

    #[test]
    fn all_zero() {
        let i = ThreeSumInstance::new(vec![0], vec![0], vec![0]).unwrap();
        let s = pad_and_scale(&i, Some(3)).unwrap();
        assert_eq!(s.m0, 1);
        assert_eq!(s.a, vec![0, 8, 9]);
        assert_eq!(s.m, 9);
        assert!(s.identity_holds((0, 0, 0)));
    }

    #[test]
    fn errors() {
        let i = ThreeSumInstance::new(vec![1, 2], vec![3], vec![]).unwrap();
        assert_eq!(pad_and_scale(&i, None), Err(Error::EmptySet));
        let i = ThreeSumInstance::new(vec![1, 2], vec![3], vec![4]).unwrap();
        assert!(matches!(pad_and_scale(&i, Some(1)), Err(Error::SizeTooSmall { .. })));
    }

    #[test]
    fn dynamic_targets_in_bands() {
        let i = ThreeSumInstance::new(vec![-40, 3], vec![17, -9, 0], vec![25]).unwrap();
        let s = pad_and_scale(&i, Some(5)).unwrap();
        for &a in &s.a {
            let x = to_f64(s.dyn_a(a));
            assert!((-6.0..=-4.0).contains(&x));
        }
        for &b in &s.b {
            assert!(to_f64(s.dyn_b(b)).abs() <= 0.5);
        }
        for &c in &s.c {
            assert!((4.0..=6.0).contains(&to_f64(s.dyn_c(c))));
        }
    }

    proptest! {
        #[test]
        fn padding_keeps_answer(
            a in prop::collection::vec(-50i64..=50, 1..8),
            b in prop::collection::vec(-50i64..=50, 1..8),
            c in prop::collection::vec(-50i64..=50, 1..8),
            extra in 0usize..4,
        ) {
            let i = ThreeSumInstance::new(a, b, c).unwrap();
            let s = pad_and_scale(&i, Some(i.largest_set() + extra)).unwrap();
            prop_assert_eq!(s.a.len(), s.n);
            prop_assert_eq!(s.b.len(), s.n);
            prop_assert_eq!(s.c.len(), s.n);
            let padded = ThreeSumInstance::new(s.a.clone(), s.b.clone(), s.c.clone()).unwrap();
            prop_assert_eq!(solve_threesum_oracle(&padded), solve_threesum_oracle(&i));
        }

        #[test]
        fn scaling_identity(
            a in prop::collection::vec(-100_000i64..=100_000, 1..6),
            b in prop::collection::vec(-100_000i64..=100_000, 1..6),
            pick in 0usize..36,
        ) {
            // Force a zero triple half of the time.
            let c = vec![-a[0] - b[0], a[a.len() - 1]];
            let Ok(i) = ThreeSumInstance::new(a, b, c) else { return Ok(()); };
            let s = pad_and_scale(&i, None).unwrap();
            let t = (s.a[pick % s.n], s.b[(pick / 6) % s.n], s.c[pick % s.c.len()]);
            prop_assert!(s.identity_holds(t));
        }
    }
}
