//! Root datum of type D_n and its untwisted affinization.
//!
//! Weights are kept in the epsilon basis with every coordinate doubled, so
//! that the spin weights `(±1/2, ..., ±1/2)` stay integral.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// Smallest rank for which the Dynkin diagram is genuinely of type D.
pub const MIN_RANK: usize = 4;

/// Checks that `n` is a usable rank.
pub fn check_rank(n: usize) -> Result<()> {
    if n < MIN_RANK {
        return Err(Error::InvalidRank(n));
    }
    Ok(())
}

/// Checks that `i` names a node of the classical diagram `{1, ..., n}`.
pub fn check_classical_index(n: usize, i: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::InvalidIndex { index: i, n });
    }
    Ok(())
}

/// Classical Cartan matrix entry `A_{ab}` (1-based nodes).
pub fn cartan(n: usize, a: usize, b: usize) -> i64 {
    if a == b {
        2
    } else if adjacent(n, a, b) {
        -1
    } else {
        0
    }
}

/// Whether nodes `a` and `b` of the classical diagram are joined by an edge.
pub fn adjacent(n: usize, a: usize, b: usize) -> bool {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if hi <= n - 2 {
        return hi == lo + 1;
    }
    // hi is n-1 or n: both hang off n-2, and they are not joined to each other.
    lo == n - 2
}

/// Neighbours of a classical node.
pub fn neighbours(n: usize, a: usize) -> Vec<usize> {
    (1..=n).filter(|&b| b != a && adjacent(n, a, b)).collect()
}

/// The diagram automorphism induced by `-w_0`: the identity when `n` is even,
/// the swap `n-1 <-> n` when `n` is odd.
pub fn tau(n: usize, i: usize) -> usize {
    if n % 2 == 1 && i + 1 >= n {
        if i == n {
            n - 1
        } else {
            n
        }
    } else {
        i
    }
}

/// The affine diagram automorphism `i -> n - i`.
pub fn flip(n: usize, i: usize) -> usize {
    n - i
}

/// A weight in the epsilon basis, coordinates doubled.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<i32>);

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight(vec![0; n])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// `epsilon_i` (1-based).
    pub fn epsilon(n: usize, i: usize) -> Self {
        let mut w = Weight::zero(n);
        w.0[i - 1] = 2;
        w
    }

    /// Fundamental weight `varpi_a`.
    pub fn fundamental(n: usize, a: usize) -> Self {
        let mut w = Weight::zero(n);
        if a <= n - 2 {
            for x in w.0.iter_mut().take(a) {
                *x = 2;
            }
        } else {
            for x in w.0.iter_mut() {
                *x = 1;
            }
            if a == n - 1 {
                w.0[n - 1] = -1;
            }
        }
        w
    }

    /// Simple root `alpha_a`.
    pub fn simple_root(n: usize, a: usize) -> Self {
        let mut w = Weight::zero(n);
        if a < n {
            w.0[a - 1] = 2;
            w.0[a] = -2;
        } else {
            w.0[n - 2] = 2;
            w.0[n - 1] = 2;
        }
        w
    }

    pub fn scale(&self, k: i32) -> Self {
        Weight(self.0.iter().map(|x| x * k).collect())
    }

    /// `<h_i, self>` for a classical node `i`.
    pub fn pairing(&self, i: usize) -> i32 {
        let n = self.rank();
        let v = &self.0;
        if i < n {
            (v[i - 1] - v[i]) / 2
        } else {
            (v[n - 2] + v[n - 1]) / 2
        }
    }

    pub fn is_dominant(&self) -> bool {
        (1..=self.rank()).all(|i| self.pairing(i) >= 0)
    }

    /// Coordinates in the basis of fundamental weights.
    pub fn to_fundamental(&self) -> Vec<i32> {
        (1..=self.rank()).map(|i| self.pairing(i)).collect()
    }

    pub fn from_fundamental(coeffs: &[i32]) -> Self {
        let n = coeffs.len();
        let mut w = Weight::zero(n);
        for (a, &c) in coeffs.iter().enumerate() {
            w = w + Weight::fundamental(n, a + 1).scale(c);
        }
        w
    }

    /// Coefficients in the basis of simple roots, if they are integers.
    pub fn to_root_coords(&self) -> Option<Vec<i64>> {
        let n = self.rank();
        let v: Vec<i64> = self.0.iter().map(|&x| x as i64).collect();
        let mut c = vec![0i64; n];
        let mut partial = 0i64;
        for a in 0..n - 2 {
            partial += v[a];
            c[a] = partial;
        }
        // c_{n-1} + c_n = w_{n-1} + c_{n-2}, c_n - c_{n-1} = w_n (all doubled).
        let sum = v[n - 2] + partial;
        let diff = v[n - 1];
        if (sum + diff) % 2 != 0 {
            return None;
        }
        c[n - 1] = (sum + diff) / 2;
        c[n - 2] = (sum - diff) / 2;
        // undo the doubling
        let mut out = Vec::with_capacity(n);
        for x in c {
            if x % 2 != 0 {
                return None;
            }
            out.push(x / 2);
        }
        Some(out)
    }

    /// Sum of the (undoubled) epsilon coordinates, times two.
    pub fn doubled_size(&self) -> i32 {
        self.0.iter().sum()
    }

    /// `-w_0^{A_{n-1}}` applied to the weight: reverse and negate.
    pub fn reversed_negated(&self) -> Self {
        Weight(self.0.iter().rev().map(|x| -x).collect())
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, rhs: Weight) -> Weight {
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|x| -x).collect())
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Weight {
    /// Prints the weight in fundamental-weight coordinates.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.to_fundamental();
        let mut first = true;
        for (a, &k) in c.iter().enumerate() {
            if k == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}w{}", k, a + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Dominant weights reachable as classical components of the given total
/// weight, i.e. dominant `lambda <= top` with `top - lambda` in the positive
/// root cone. Used to enumerate the weights worth checking.
pub fn dominant_weights_below(top: &Weight) -> Vec<Weight> {
    let n = top.rank();
    // every dominant weight of the coset dominates its minuscule (or zero) representative
    let minimal = [
        Weight::zero(n),
        Weight::fundamental(n, 1),
        Weight::fundamental(n, n - 1),
        Weight::fundamental(n, n),
    ];
    let coords = match minimal
        .iter()
        .find_map(|m| (top.clone() - m.clone()).to_root_coords())
    {
        Some(c) if c.iter().all(|&x| x >= 0) => c,
        _ => return Vec::new(),
    };
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    fn rec(
        a: usize,
        n: usize,
        coords: &[i64],
        cur: &mut Vec<i64>,
        top: &Weight,
        out: &mut Vec<Weight>,
    ) {
        if a == n {
            let mut w = top.clone();
            for (b, &k) in cur.iter().enumerate() {
                w = w - Weight::simple_root(n, b + 1).scale(k as i32);
            }
            if w.is_dominant() {
                out.push(w);
            }
            return;
        }
        for k in 0..=coords[a] {
            cur[a] = k;
            rec(a + 1, n, coords, cur, top, out);
        }
        cur[a] = 0;
    }
    rec(0, n, &coords, &mut cur, top, &mut out);
    out.sort();
    out.dedup();
    out
}
