//! Combinatorial R-matrix, local and intrinsic energy, and the involution
//! exchanging nodes `i <-> n - i`.
//!
//! The R-matrix is always `Phi^{-1} ∘ Phi` for the reordered product; the
//! local energy is built by a breadth-first search over the affine crystal
//! graph of a two-fold product, one classical component at a time.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use crate::bijection::{phi, phi_inverse_direct};
use crate::crystal_core::{Atom, Letter};
use crate::error::{Error, Result};
use crate::kr_crystal::{KrElement, TensorElement};

type Pair = (KrElement, KrElement);

fn r_cache() -> &'static Mutex<HashMap<Pair, Pair>> {
    static C: OnceLock<Mutex<HashMap<Pair, Pair>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `R(b2 ⊗ b1) = b1' ⊗ b2'`.
pub fn r_pair(b2: &KrElement, b1: &KrElement) -> Result<Pair> {
    let t = TensorElement(vec![b2.clone(), b1.clone()]);
    let (hw, path) = t.high();
    let key = (hw.0[0].clone(), hw.0[1].clone());
    let cached = r_cache().lock().unwrap().get(&key).cloned();
    let top = match cached {
        Some(p) => p,
        None => {
            let rc = phi(&hw)?;
            let out = phi_inverse_direct(&[(b1.r, b1.s), (b2.r, b2.s)], &rc)?;
            let p = (out.0[0].clone(), out.0[1].clone());
            r_cache().lock().unwrap().insert(key, p.clone());
            p
        }
    };
    let low = TensorElement(vec![top.0, top.1])
        .lower_along(&path)
        .ok_or_else(|| Error::InvalidElement("R-matrix transport failed".into()))?;
    let mut it = low.0.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

/// `R_i`: swaps the factors in positions `i` and `i + 1`, counted from the
/// right starting at 1.
pub fn r_at(b: &TensorElement, i: usize) -> Result<TensorElement> {
    let k = b.0.len();
    if i == 0 || i >= k {
        return Err(Error::Unsupported(format!("R_{} on {} factors", i, k)));
    }
    let (left, right) = (k - 1 - i, k - i);
    let (x, y) = r_pair(&b.0[left], &b.0[right])?;
    let mut out = b.clone();
    out.0[left] = x;
    out.0[right] = y;
    Ok(out)
}

/// Reorders the factors through the rigged configuration: `order[j]` is the
/// index (leftmost first) of the factor placed at position `j`.
pub fn reorder(b: &TensorElement, order: &[usize]) -> Result<TensorElement> {
    let factors = b.factors();
    let mut seen = vec![false; factors.len()];
    if order.len() != factors.len() || order.iter().any(|&j| j >= factors.len() || std::mem::replace(&mut seen[j], true)) {
        return Err(Error::Parse(format!("{:?} is not a permutation of the factors", order)));
    }
    let target: Vec<(usize, usize)> = order.iter().map(|&j| factors[j]).collect();
    crate::bijection::phi_inverse(&target, &phi(b)?)
}

/// Intrinsic energy of a single factor: `(rs - |lambda|)/2`, and 0 on
/// spin factors.
pub fn single_energy(b: &KrElement) -> i64 {
    if b.is_spin() {
        return 0;
    }
    let (hw, _) = b.high();
    let size = hw.weight().doubled_size() as i64; // 2|lambda|
    let twice = 2 * (b.r * b.s) as i64 - size;
    debug_assert!(twice % 4 == 0);
    twice / 4
}

/// Twice `|B^{r,s}|`.
pub fn doubled_size(n: usize, r: usize, s: usize) -> i64 {
    let s = s as i64;
    if r + 2 <= n {
        2 * r as i64 * s
    } else if r == n - 1 {
        (n as i64 - 2) * s
    } else {
        n as i64 * s
    }
}

/// Local energy values on the classical components of `B^{r2,s2} ⊗ B^{r1,s1}`,
/// keyed by the highest weight element.
#[derive(Debug)]
pub struct EnergyTable {
    pub factors: [(usize, usize); 2],
    pub values: HashMap<TensorElement, i64>,
    /// Number of affine edges checked against the defining rule.
    pub edges_checked: usize,
}

fn component(top: &TensorElement) -> Vec<TensorElement> {
    let n = top.n();
    let mut seen = std::collections::HashSet::new();
    seen.insert(top.clone());
    let mut queue = vec![top.clone()];
    let mut out = Vec::new();
    while let Some(x) = queue.pop() {
        for i in 1..=n {
            if let Some(y) = x.f(i) {
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        out.push(x);
    }
    out
}

/// The change of the local energy along `x -> e_0 x`.
fn e0_step(x: &TensorElement) -> Result<i64> {
    let (b2, b1) = (&x.0[0], &x.0[1]);
    let (c1, c2) = r_pair(b2, b1)?;
    let left = b2.eps(0) > b1.phi(0);
    let left_r = c1.eps(0) > c2.phi(0);
    Ok(match (left, left_r) {
        (true, true) => 1,
        (false, false) => -1,
        _ => 0,
    })
}

fn build_table(n: usize, b2: (usize, usize), b1: (usize, usize)) -> Result<EnergyTable> {
    let start = TensorElement(vec![KrElement::maximal(n, b2.0, b2.1), KrElement::maximal(n, b1.0, b1.1)]);
    let mut values: HashMap<TensorElement, i64> = HashMap::new();
    values.insert(start.clone(), 0);
    let mut queue = VecDeque::from([start]);
    let mut edges = 0;
    let assign = |y: &TensorElement, v: i64, values: &mut HashMap<TensorElement, i64>, queue: &mut VecDeque<TensorElement>| -> Result<()> {
        let top = y.high().0;
        match values.get(&top) {
            Some(&old) if old != v => Err(Error::Unsupported(format!(
                "local energy inconsistent at {:?}: {} vs {}",
                top, old, v
            ))),
            Some(_) => Ok(()),
            None => {
                values.insert(top.clone(), v);
                queue.push_back(top);
                Ok(())
            }
        }
    };
    while let Some(top) = queue.pop_front() {
        let h = values[&top];
        for x in component(&top) {
            if let Some(y) = x.e(0) {
                edges += 1;
                assign(&y, h + e0_step(&x)?, &mut values, &mut queue)?;
            }
            if let Some(y) = x.f(0) {
                edges += 1;
                assign(&y, h - e0_step(&y)?, &mut values, &mut queue)?;
            }
        }
    }
    Ok(EnergyTable {
        factors: [b2, b1],
        values,
        edges_checked: edges,
    })
}

type TableKey = (usize, (usize, usize), (usize, usize));

/// Cached local energy table for `B^{r2,s2} ⊗ B^{r1,s1}`.
pub fn energy_table(n: usize, b2: (usize, usize), b1: (usize, usize)) -> Result<Arc<EnergyTable>> {
    static C: OnceLock<Mutex<HashMap<TableKey, Arc<EnergyTable>>>> = OnceLock::new();
    let cache = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(n, b2, b1)) {
        return Ok(t.clone());
    }
    let t = Arc::new(build_table(n, b2, b1)?);
    cache.lock().unwrap().insert((n, b2, b1), t.clone());
    Ok(t)
}

/// Local energy `H(b2 ⊗ b1)`, normalised to 0 on `u ⊗ u`.
pub fn local_energy(b2: &KrElement, b1: &KrElement) -> Result<i64> {
    let t = energy_table(b2.n, (b2.r, b2.s), (b1.r, b1.s))?;
    let top = TensorElement(vec![b2.clone(), b1.clone()]).high().0;
    t.values
        .get(&top)
        .copied()
        .ok_or_else(|| Error::Unsupported(format!("{:?} unreachable from u ⊗ u", top)))
}

/// Intrinsic energy of an element of `B_k ⊗ ... ⊗ B_1`.
pub fn intrinsic_energy(b: &TensorElement) -> Result<i64> {
    let k = b.0.len();
    // position p (from the right, 1-based) lives at index k - p
    let at = |t: &TensorElement, p: usize| t.0[k - p].clone();
    let mut total = 0;
    for j in 1..=k {
        // move factor j to position 1, recording the local energies on the way
        let mut t = b.clone();
        for i in (1..j).rev() {
            total += local_energy(&at(&t, i + 1), &at(&t, i))?;
            t = r_at(&t, i)?;
        }
        total += single_energy(&at(&t, 1));
    }
    Ok(total)
}

/// The involution `i <-> n-i` on the classical highest weight element of a
/// component. Spin factors map to `B^{n-1+eta,s}` / `B^{n-eta,s}`.
pub fn varsigma_highest(u: &KrElement) -> KrElement {
    let n = u.n;
    let (r, s) = (u.r, u.s);
    if u.is_spin() {
        let col = match u.word[0] {
            Atom::S(m) => m,
            Atom::L(_) => unreachable!(),
        };
        // reverse and negate the signs
        let mut image = 0u32;
        for i in 0..n {
            if col >> (n - 1 - i) & 1 == 0 {
                image |= 1 << i;
            }
        }
        let r2 = if n % 2 == 1 { if r == n { n - 1 } else { n } } else { r };
        let cols: Vec<Vec<i32>> = vec![
            (0..n).map(|i| if image >> i & 1 == 1 { -1 } else { 1 }).collect();
            s
        ];
        return KrElement::from_spin_columns(n, r2, s, &cols).expect("spin image");
    }
    let ni = n as Letter;
    let mut transpose = vec![0usize; s];
    for (j, &h) in u.heights.iter().enumerate() {
        transpose[j] = h;
    }
    let mut mu: Vec<usize> = transpose.iter().rev().copied().collect();
    mu.extend(std::iter::repeat(r).take(s));
    let cols: Vec<Vec<Letter>> = (0..s)
        .map(|k| {
            let (a, b) = (mu[2 * k], mu[2 * k + 1]);
            let mut c: Vec<Letter> = (0..a).map(|t| -(ni - a as Letter + 1 + t as Letter)).collect();
            c.extend((0..b - a).map(|t| if t % 2 == 0 { ni } else { -ni }));
            c.extend((0..r - b).map(|t| ni - b as Letter - t as Letter));
            c
        })
        .collect();
    KrElement::from_columns(n, r, s, &cols).expect("column formula gives a KR element")
}

/// `varsigma` on any element, by transport with `f_i -> f_{n-i}`.
pub fn varsigma(b: &KrElement) -> Result<KrElement> {
    let n = b.n;
    let (hw, path) = b.high();
    let mut x = varsigma_highest(&hw);
    for &i in path.iter().rev() {
        x = x
            .f(n - i)
            .ok_or_else(|| Error::InvalidElement(format!("varsigma transport failed on {:?}", b)))?;
    }
    Ok(x)
}

pub fn varsigma_tensor(b: &TensorElement) -> Result<TensorElement> {
    Ok(TensorElement(b.0.iter().map(varsigma).collect::<Result<_>>()?))
}

/// Right split `B^{r,s} -> B^{r,s-1} ⊗ B^{r,1}`, conjugate of the left split
/// by the Lusztig involution.
pub fn right_split(b: &KrElement) -> (KrElement, KrElement) {
    let (c, rest) = b.star().left_split_element();
    (rest.star(), c.star())
}

/// Applies the right split to the rightmost factor.
pub fn rs_tensor(b: &TensorElement) -> TensorElement {
    let mut v = b.0.clone();
    let last = v.pop().expect("non-empty tensor");
    let (x, y) = right_split(&last);
    v.push(x);
    v.push(y);
    TensorElement(v)
}
