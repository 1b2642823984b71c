//! Classical crystal machinery for type D_n: letters, spin columns, words and
//! the tensor product rule.
//!
//! Tensor products use the anti-Kashiwara convention: for `b2 ⊗ b1`,
//! `e_i` acts on `b2` when `eps_i(b2) > phi_i(b1)` and on `b1` otherwise,
//! while `f_i` acts on `b2` when `eps_i(b2) >= phi_i(b1)`. On a word read
//! left to right this is the usual signature rule with every atom emitting
//! `+^phi -^eps` and `-+` pairs cancelling.

use std::fmt;

use crate::root_data::{tau, Weight};

/// A letter of the vector representation: `k > 0` is `k`, `k < 0` is `\bar{|k|}`.
pub type Letter = i32;

/// One tensor atom: a letter of `B(varpi_1)` or a spin column.
///
/// Spin columns are bit masks; bit `k` set means a `-` in position `k + 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    L(Letter),
    S(u32),
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Atom::L(x) if x < 0 => write!(f, "-{}", -x),
            Atom::L(x) => write!(f, "{}", x),
            Atom::S(m) => {
                write!(f, "s[")?;
                for k in 0..32 {
                    if m >> k == 0 {
                        break;
                    }
                    if m >> k & 1 == 1 {
                        write!(f, "{}", k + 1)?;
                    }
                }
                write!(f, "]")
            }
        }
    }
}

pub fn letter_f(n: usize, i: usize, x: Letter) -> Option<Letter> {
    let (ni, i32n) = (i as i32, n as i32);
    if i < n {
        if x == ni {
            Some(ni + 1)
        } else if x == -(ni + 1) {
            Some(-ni)
        } else {
            None
        }
    } else if x == i32n - 1 {
        Some(-i32n)
    } else if x == i32n {
        Some(-(i32n - 1))
    } else {
        None
    }
}

pub fn letter_e(n: usize, i: usize, x: Letter) -> Option<Letter> {
    let (ni, i32n) = (i as i32, n as i32);
    if i < n {
        if x == ni + 1 {
            Some(ni)
        } else if x == -ni {
            Some(-(ni + 1))
        } else {
            None
        }
    } else if x == -i32n {
        Some(i32n - 1)
    } else if x == -(i32n - 1) {
        Some(i32n)
    } else {
        None
    }
}

fn minus_at(m: u32, pos: usize) -> bool {
    m >> (pos - 1) & 1 == 1
}

pub fn spin_f(n: usize, i: usize, m: u32) -> Option<u32> {
    if i < n {
        if !minus_at(m, i) && minus_at(m, i + 1) {
            return Some(m ^ (1 << (i - 1)) ^ (1 << i));
        }
    } else if !minus_at(m, n - 1) && !minus_at(m, n) {
        return Some(m | (1 << (n - 2)) | (1 << (n - 1)));
    }
    None
}

pub fn spin_e(n: usize, i: usize, m: u32) -> Option<u32> {
    if i < n {
        if minus_at(m, i) && !minus_at(m, i + 1) {
            return Some(m ^ (1 << (i - 1)) ^ (1 << i));
        }
    } else if minus_at(m, n - 1) && minus_at(m, n) {
        return Some(m & !((1 << (n - 2)) | (1 << (n - 1))));
    }
    None
}

/// Signs of a spin column, top to bottom.
pub fn spin_signs(n: usize, m: u32) -> Vec<i32> {
    (1..=n).map(|k| if minus_at(m, k) { -1 } else { 1 }).collect()
}

pub fn spin_from_signs(signs: &[i32]) -> u32 {
    signs
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < 0)
        .fold(0, |m, (k, _)| m | 1 << k)
}

/// Spin column with `-` exactly at the listed positions.
pub fn spin_minus_at(positions: &[usize]) -> u32 {
    positions.iter().fold(0, |m, &p| m | 1 << (p - 1))
}

impl Atom {
    pub fn e(self, n: usize, i: usize) -> Option<Atom> {
        match self {
            Atom::L(x) => letter_e(n, i, x).map(Atom::L),
            Atom::S(m) => spin_e(n, i, m).map(Atom::S),
        }
    }

    pub fn f(self, n: usize, i: usize) -> Option<Atom> {
        match self {
            Atom::L(x) => letter_f(n, i, x).map(Atom::L),
            Atom::S(m) => spin_f(n, i, m).map(Atom::S),
        }
    }

    pub fn eps(self, n: usize, i: usize) -> usize {
        self.e(n, i).is_some() as usize
    }

    pub fn phi(self, n: usize, i: usize) -> usize {
        self.f(n, i).is_some() as usize
    }

    pub fn weight(self, n: usize) -> Weight {
        match self {
            Atom::L(x) => {
                let w = Weight::epsilon(n, x.unsigned_abs() as usize);
                if x < 0 {
                    -w
                } else {
                    w
                }
            }
            Atom::S(m) => Weight(spin_signs(n, m)),
        }
    }

    pub fn letter(self) -> Option<Letter> {
        match self {
            Atom::L(x) => Some(x),
            Atom::S(_) => None,
        }
    }
}

/// Outcome of the signature rule on a sequence of `(eps, phi)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub eps: usize,
    pub phi: usize,
    /// Item on which `e` acts (leftmost uncancelled `-`).
    pub e_at: Option<usize>,
    /// Item on which `f` acts (rightmost uncancelled `+`).
    pub f_at: Option<usize>,
}

/// Applies the signature rule to items read left to right, each emitting
/// `+^phi -^eps`.
pub fn signature<I: IntoIterator<Item = (usize, usize)>>(items: I) -> Signature {
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let mut phi = 0;
    let mut f_at = None;
    for (idx, (eps, p)) in items.into_iter().enumerate() {
        let mut plus = p;
        while plus > 0 {
            match stack.last_mut() {
                Some(top) => {
                    let k = top.1.min(plus);
                    top.1 -= k;
                    plus -= k;
                    if top.1 == 0 {
                        stack.pop();
                    }
                }
                None => break,
            }
        }
        if plus > 0 {
            phi += plus;
            f_at = Some(idx);
        }
        if eps > 0 {
            stack.push((idx, eps));
        }
    }
    let eps = stack.iter().map(|x| x.1).sum();
    Signature {
        eps,
        phi,
        e_at: stack.first().map(|x| x.0),
        f_at,
    }
}

fn word_signature(n: usize, i: usize, w: &[Atom]) -> Signature {
    signature(w.iter().map(|a| (a.eps(n, i), a.phi(n, i))))
}

pub fn word_eps(n: usize, i: usize, w: &[Atom]) -> usize {
    word_signature(n, i, w).eps
}

pub fn word_phi(n: usize, i: usize, w: &[Atom]) -> usize {
    word_signature(n, i, w).phi
}

/// `e_i` in place; returns `false` (leaving the word untouched) when it is zero.
pub fn word_e(n: usize, i: usize, w: &mut [Atom]) -> bool {
    match word_signature(n, i, w).e_at {
        Some(k) => {
            w[k] = w[k].e(n, i).expect("signature picked an atom with eps > 0");
            true
        }
        None => false,
    }
}

pub fn word_f(n: usize, i: usize, w: &mut [Atom]) -> bool {
    match word_signature(n, i, w).f_at {
        Some(k) => {
            w[k] = w[k].f(n, i).expect("signature picked an atom with phi > 0");
            true
        }
        None => false,
    }
}

pub fn word_weight(n: usize, w: &[Atom]) -> Weight {
    w.iter().fold(Weight::zero(n), |acc, a| acc + a.weight(n))
}

/// Raises a word to its highest weight using the indices in `nodes`.
/// Returns the sequence of raising indices, in the order they were applied.
pub fn raise_with(n: usize, w: &mut [Atom], nodes: &[usize]) -> Vec<usize> {
    let mut path = Vec::new();
    'outer: loop {
        for &i in nodes {
            if word_e(n, i, w) {
                path.push(i);
                continue 'outer;
            }
        }
        return path;
    }
}

/// Highest weight element of the classical component and the raising path.
pub fn high(n: usize, w: &[Atom]) -> (Vec<Atom>, Vec<usize>) {
    let mut v = w.to_vec();
    let nodes: Vec<usize> = (1..=n).collect();
    let path = raise_with(n, &mut v, &nodes);
    (v, path)
}

pub fn is_highest(n: usize, w: &[Atom]) -> bool {
    (1..=n).all(|i| word_eps(n, i, w) == 0)
}

pub fn lowest(n: usize, w: &[Atom]) -> Vec<Atom> {
    let mut v = w.to_vec();
    'outer: loop {
        for i in 1..=n {
            if word_f(n, i, &mut v) {
                continue 'outer;
            }
        }
        return v;
    }
}

/// Undoes a raising path: applies `f` in the reverse order.
pub fn lower_along(n: usize, w: &mut [Atom], path: &[usize]) -> bool {
    path.iter().rev().all(|&i| word_f(n, i, w))
}

/// Lusztig involution on the classical component of a word, computed by
/// transporting the lowering path from the lowest weight element.
pub fn word_star(n: usize, w: &[Atom]) -> Vec<Atom> {
    let (hw, path) = high(n, w);
    let mut v = lowest(n, &hw);
    for &i in path.iter().rev() {
        let ok = word_e(n, tau(n, i), &mut v);
        debug_assert!(ok, "star transport fell off the crystal");
    }
    v
}
