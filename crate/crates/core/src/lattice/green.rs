use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{LatticeFunction, Rect, Site};
use crate::par::{self, Exec};
use crate::scalar::Rational;

fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `G_n = (−1)^{n₁+n₂} C(n₁+n₂, n₁)` on the closed positive quadrant, `0`
/// elsewhere. Satisfies `Q⁺G = δ`.
pub fn green(n: Site) -> BigInt {
    if n.x < 0 || n.y < 0 {
        return BigInt::zero();
    }
    let s = (n.x + n.y) as u64;
    let b = binomial(s, n.x as u64);
    if s % 2 == 0 {
        b
    } else {
        -b
    }
}

/// Rational-valued [`green`], for use as a Cauchy kernel.
pub fn green_function(n: Site) -> Rational {
    Rational::from_integer(green(n))
}

/// `G` on a window, filled row by row from `G_n = −G_{n−e₁} − G_{n−e₂}`.
pub fn build_green(window: Rect) -> LatticeFunction {
    build_green_with(Exec::default(), window)
}

pub fn build_green_with(exec: Exec, window: Rect) -> LatticeFunction {
    if window.is_empty() {
        return LatticeFunction::windowed();
    }
    let hi = Site::new(window.x1.max(0), window.y1.max(0));
    // Pascal rows over the quadrant part of the window; rows are independent
    // once their first entry is known, which is the cheap closed form.
    let rows: Vec<Vec<BigInt>> = par::map_range(exec, (hi.y + 1) as usize, |y| {
        let y = y as i64;
        let mut row = Vec::with_capacity((hi.x + 1) as usize);
        row.push(green(Site::new(0, y)));
        for x in 1..=hi.x {
            // G(x, y) = −G(x−1, y)·(x+y)/x
            let prev: &BigInt = row.last().expect("nonempty");
            row.push(-(prev * BigInt::from(x + y)) / BigInt::from(x));
        }
        row
    });
    let mut out = LatticeFunction::windowed();
    for s in window.sites() {
        let v = if s.x >= 0 && s.y >= 0 { rows[s.y as usize][s.x as usize].clone() } else { BigInt::zero() };
        out.insert(s, Rational::from_integer(v));
    }
    out
}

/// `G` as a partial sum of `Σ_k (−t₁⁻¹ − t₂⁻¹)^k δ`, truncated at the
/// largest order that reaches the window.
pub fn build_green_by_expansion(window: Rect) -> LatticeFunction {
    use std::collections::BTreeMap;
    let order = (window.x1.max(0) + window.y1.max(0)) as usize;
    let mut term: BTreeMap<Site, BigInt> = BTreeMap::from([(Site::ORIGIN, BigInt::one())]);
    let mut sum: BTreeMap<Site, BigInt> = term.clone();
    for _ in 0..order {
        let mut next: BTreeMap<Site, BigInt> = BTreeMap::new();
        for (s, v) in &term {
            for d in [Site::E1, Site::E2] {
                *next.entry(*s + d).or_insert_with(BigInt::zero) -= v;
            }
        }
        for (s, v) in &next {
            *sum.entry(*s).or_insert_with(BigInt::zero) += v;
        }
        term = next;
    }
    LatticeFunction::from_fn(window.sites(), |s| {
        Rational::from_integer(sum.get(&s).cloned().unwrap_or_else(BigInt::zero))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::apply_qplus_on;

    #[test]
    fn table_values() {
        let g = |x, y| green(Site::new(x, y));
        assert_eq!(g(0, 0), BigInt::from(1));
        assert_eq!(g(1, 0), BigInt::from(-1));
        assert_eq!(g(1, 1), BigInt::from(2));
        assert_eq!(g(2, 1), BigInt::from(-3));
        assert_eq!(g(-1, 3), BigInt::zero());
    }

    #[test]
    fn fundamental_solution() {
        let w = Rect::square(-6, 12);
        let g = build_green(w);
        let mut inner = w;
        inner.x0 += 1;
        inner.y0 += 1;
        let f = apply_qplus_on(&g, inner.sites()).unwrap();
        for (s, v) in f.iter() {
            let want = if *s == Site::ORIGIN { Rational::one() } else { Rational::zero() };
            assert_eq!(*v, want, "at {s}");
        }
    }

    #[test]
    fn routes_agree() {
        let w = Rect::new(-3, 9, -2, 7);
        let a = build_green(w);
        assert_eq!(a, build_green_by_expansion(w));
        assert_eq!(a, build_green_with(Exec::Sequential, w));
        assert!(w.sites().all(|s| a.get(s).unwrap() == green_function(s)));
    }
}
