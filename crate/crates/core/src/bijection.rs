//! The bijection between paths and rigged configurations.
//!
//! `phi_inverse` peels the leftmost tensor factor of `B` one letter at a
//! time with the box-removal map `delta`, after splitting columns off with
//! `gamma` and boxes off with `beta`. Spin columns are handled by doubling
//! the configuration and running the non-spin algorithm on it.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::crystal_core::{Atom, Letter};
use crate::error::{Error, Result};
use crate::kr_crystal::{is_spin_node, KrElement, TensorElement};
use crate::rigged_config::RiggedConfig;
use crate::root_data::Weight;

/// A string selected by `delta` / `delta_inverse`: index into `nu^{(a)}`, or
/// `None` for the implicit empty string.
type Pick = Option<usize>;

/// Whether a string is selectable: singular (rigging = vacancy) or, for the
/// dual operators, cosingular (rigging = 0).
fn selectable(rc: &RiggedConfig, a: usize, (l, j): (usize, i64), co: bool) -> bool {
    if co {
        j == 0
    } else {
        j == rc.vacancy(a, l)
    }
}

fn singular_at_least(
    rc: &RiggedConfig,
    a: usize,
    min_len: usize,
    exclude: Option<usize>,
    co: bool,
) -> Option<usize> {
    rc.nu[a - 1]
        .iter()
        .enumerate()
        .filter(|&(k, &s)| Some(k) != exclude && s.0 >= min_len && selectable(rc, a, s, co))
        .min_by_key(|&(_, &(l, _))| l)
        .map(|(k, _)| k)
}

fn singular_at_most(
    rc: &RiggedConfig,
    a: usize,
    max_len: usize,
    exclude: Option<usize>,
) -> Pick {
    rc.nu[a - 1]
        .iter()
        .enumerate()
        .filter(|&(k, &s)| Some(k) != exclude && s.0 <= max_len && selectable(rc, a, s, false))
        .max_by_key(|&(_, &(l, _))| l)
        .map(|(k, _)| k)
}

/// Changes the lengths of the picked strings by one. Picked strings become
/// singular (cosingular if `co`); the others keep their riggings
/// (coriggings if `co`).
fn resize_picked(
    rc: &RiggedConfig,
    picks: &[(usize, Pick)],
    grow: bool,
    co: bool,
    fix_mu: impl FnOnce(&mut RiggedConfig),
) -> RiggedConfig {
    let mut out = rc.clone();
    let old_cor = rc.coriggings();
    fix_mu(&mut out);
    let mut changed: Vec<Vec<bool>> = out.nu.iter().map(|v| vec![false; v.len()]).collect();
    let mut cor: Vec<Vec<i64>> = old_cor;
    for &(a, p) in picks {
        match p {
            Some(k) => {
                let s = &mut out.nu[a - 1][k];
                if grow {
                    s.0 += 1;
                } else {
                    s.0 -= 1;
                }
                changed[a - 1][k] = true;
            }
            None => {
                debug_assert!(grow);
                out.nu[a - 1].push((1, 0));
                changed[a - 1].push(true);
                cor[a - 1].push(0);
            }
        }
    }
    // drop emptied rows
    for a in 1..=out.n {
        let keep: Vec<bool> = out.nu[a - 1].iter().map(|s| s.0 > 0).collect();
        let filt = |v: &mut Vec<_>| {
            let mut it = keep.iter();
            v.retain(|_| *it.next().unwrap());
        };
        filt(&mut out.nu[a - 1]);
        let mut it = keep.iter();
        changed[a - 1].retain(|_| *it.next().unwrap());
        let mut it = keep.iter();
        cor[a - 1].retain(|_| *it.next().unwrap());
    }
    for a in 1..=out.n {
        for k in 0..out.nu[a - 1].len() {
            let l = out.nu[a - 1][k].0;
            let p = out.vacancy(a, l);
            out.nu[a - 1][k].1 = match (changed[a - 1][k], co) {
                (true, false) => p,
                (true, true) => 0,
                (false, false) => out.nu[a - 1][k].1,
                (false, true) => p - cor[a - 1][k],
            };
        }
    }
    out.normalize();
    out
}

fn delta_impl(rc: &RiggedConfig, co: bool) -> Result<(RiggedConfig, Letter)> {
    let n = rc.n;
    if !rc.mu[0].contains(&1) {
        return Err(Error::InvalidRiggedConfig("delta needs a factor B^{1,1}".into()));
    }
    let mut forward: Vec<Option<usize>> = vec![None; n + 1];
    let mut picks: Vec<(usize, Pick)> = Vec::new();
    let mut ell = 1;
    let mut letter: Option<Letter> = None;
    for a in 1..=n - 2 {
        match singular_at_least(rc, a, ell, None, co) {
            Some(k) => {
                forward[a] = Some(k);
                picks.push((a, Some(k)));
                ell = rc.nu[a - 1][k].0;
            }
            None => {
                letter = Some(a as Letter);
                break;
            }
        }
    }
    if letter.is_none() {
        let p1 = singular_at_least(rc, n - 1, ell, None, co);
        let p2 = singular_at_least(rc, n, ell, None, co);
        let ni = n as Letter;
        match (p1, p2) {
            (None, None) => letter = Some(ni - 1),
            (Some(k), None) => {
                picks.push((n - 1, Some(k)));
                letter = Some(ni);
            }
            (None, Some(k)) => {
                picks.push((n, Some(k)));
                letter = Some(-ni);
            }
            (Some(k1), Some(k2)) => {
                picks.push((n - 1, Some(k1)));
                picks.push((n, Some(k2)));
                ell = rc.nu[n - 2][k1].0.max(rc.nu[n - 1][k2].0);
                for a in (1..=n - 2).rev() {
                    match singular_at_least(rc, a, ell, forward[a], co) {
                        Some(k) => {
                            picks.push((a, Some(k)));
                            ell = rc.nu[a - 1][k].0;
                        }
                        None => {
                            letter = Some(-(a as Letter + 1));
                            break;
                        }
                    }
                }
                if letter.is_none() {
                    letter = Some(-1);
                }
            }
        }
    }
    let out = resize_picked(rc, &picks, false, co, |x| {
        let k = x.mu[0].iter().position(|&s| s == 1).unwrap();
        x.mu[0].remove(k);
    });
    Ok((out, letter.unwrap()))
}

/// Removes the leftmost `B^{1,1}`, returning the letter it carried.
pub fn delta(rc: &RiggedConfig) -> Result<(RiggedConfig, Letter)> {
    delta_impl(rc, false)
}

/// The dual of [`delta`]: the same passes with cosingular strings, keeping
/// coriggings of the untouched strings.
pub fn tilde_delta(rc: &RiggedConfig) -> Result<(RiggedConfig, Letter)> {
    delta_impl(rc, true)
}

/// Inverse of [`delta`]: adds a `B^{1,1}` carrying `letter` on the left.
pub fn delta_inverse(rc: &RiggedConfig, letter: Letter) -> Result<RiggedConfig> {
    let n = rc.n;
    let ni = n as Letter;
    if letter == 0 || letter.abs() > ni {
        return Err(Error::InvalidElement(format!("letter {} out of range", letter)));
    }
    // nodes in the order delta visited them, as (node, is_return_pass)
    let mut order: Vec<(usize, bool)> = Vec::new();
    let forward_top = if letter > 0 && letter < ni - 1 {
        letter as usize - 1
    } else {
        n - 2
    };
    for a in 1..=forward_top {
        order.push((a, false));
    }
    let mut spin_nodes: Vec<usize> = Vec::new();
    if letter == ni {
        spin_nodes.push(n - 1);
    } else if letter == -ni {
        spin_nodes.push(n);
    } else if letter < 0 {
        spin_nodes.extend([n - 1, n]);
    }
    let back_bottom = if letter < 0 && letter > -ni {
        (-letter) as usize
    } else {
        n - 1
    };
    // walk backwards: return pass (increasing), spin nodes, forward pass (decreasing)
    let mut picks: Vec<(usize, Pick)> = Vec::new();
    let mut back_pick: Vec<Option<usize>> = vec![None; n + 1];
    let mut bound = usize::MAX;
    for a in back_bottom..=n - 2 {
        let p = singular_at_most(rc, a, bound, None);
        bound = p.map_or(0, |k| rc.nu[a - 1][k].0);
        back_pick[a] = p;
        picks.push((a, p));
    }
    if !spin_nodes.is_empty() {
        let mut lens = Vec::new();
        for &a in &spin_nodes {
            let p = singular_at_most(rc, a, bound, None);
            lens.push(p.map_or(0, |k| rc.nu[a - 1][k].0));
            picks.push((a, p));
        }
        bound = *lens.iter().min().unwrap();
    }
    for &(a, _) in order.iter().rev() {
        let p = singular_at_most(rc, a, bound, back_pick[a]);
        bound = p.map_or(0, |k| rc.nu[a - 1][k].0);
        picks.push((a, p));
    }
    Ok(resize_picked(rc, &picks, true, false, |x| x.add_mu(1, 1)))
}

/// Adds one-box strings with rigging equal to their vacancy number.
fn add_singular_ones(rc: &mut RiggedConfig, nodes: &[usize]) {
    for &a in nodes {
        rc.nu[a - 1].push((1, i64::MIN));
    }
    for &a in nodes {
        let p = rc.vacancy(a, 1);
        for s in rc.nu[a - 1].iter_mut() {
            if s.1 == i64::MIN {
                s.1 = p;
            }
        }
    }
    rc.normalize();
}

fn remove_singular_ones(rc: &mut RiggedConfig, nodes: &[usize]) -> Result<()> {
    let vac: Vec<i64> = nodes.iter().map(|&a| rc.vacancy(a, 1)).collect();
    for (&a, &p) in nodes.iter().zip(&vac) {
        match rc.nu[a - 1].iter().position(|&s| s == (1, p)) {
            Some(k) => {
                rc.nu[a - 1].remove(k);
            }
            None => {
                return Err(Error::MissingSingular {
                    node: a,
                    context: "removing a one-box string",
                })
            }
        }
    }
    Ok(())
}

/// `B^{r,1} -> B^{1,1} ⊗ B^{r-1,1}` on the leftmost factor, `2 <= r <= n-2`.
pub fn beta(rc: &RiggedConfig, r: usize) -> Result<RiggedConfig> {
    let mut out = rc.clone();
    out.remove_mu(r, 1)?;
    out.add_mu(1, 1);
    out.add_mu(r - 1, 1);
    let nodes: Vec<usize> = (1..r).collect();
    add_singular_ones(&mut out, &nodes);
    Ok(out)
}

pub fn beta_inverse(rc: &RiggedConfig, r: usize) -> Result<RiggedConfig> {
    let mut out = rc.clone();
    let nodes: Vec<usize> = (1..r).collect();
    remove_singular_ones(&mut out, &nodes)?;
    out.remove_mu(1, 1)?;
    out.remove_mu(r - 1, 1)?;
    out.add_mu(r, 1);
    Ok(out)
}

/// `B^{r,s} -> B^{r,1} ⊗ B^{r,s-1}` on the leftmost factor; riggings unchanged.
pub fn gamma(rc: &RiggedConfig, r: usize, s: usize) -> Result<RiggedConfig> {
    let mut out = rc.clone();
    out.remove_mu(r, s)?;
    out.add_mu(r, 1);
    out.add_mu(r, s - 1);
    Ok(out)
}

pub fn gamma_inverse(rc: &RiggedConfig, r: usize, s: usize) -> Result<RiggedConfig> {
    let mut out = rc.clone();
    out.remove_mu(r, 1)?;
    out.remove_mu(r, s - 1)?;
    out.add_mu(r, s);
    Ok(out)
}

/// Doubles every row of `mu` and `nu` and every rigging.
pub fn embed(rc: &RiggedConfig) -> RiggedConfig {
    let mut out = rc.clone();
    for v in out.mu.iter_mut() {
        for s in v.iter_mut() {
            *s *= 2;
        }
    }
    for v in out.nu.iter_mut() {
        for s in v.iter_mut() {
            *s = (s.0 * 2, s.1 * 2);
        }
    }
    out
}

pub fn unembed(rc: &RiggedConfig) -> Result<RiggedConfig> {
    let mut out = rc.clone();
    let odd = || Error::InvalidRiggedConfig(format!("{:?} is not in the doubled image", rc));
    for v in out.mu.iter_mut() {
        for s in v.iter_mut() {
            if *s % 2 != 0 {
                return Err(odd());
            }
            *s /= 2;
        }
    }
    for v in out.nu.iter_mut() {
        for s in v.iter_mut() {
            if s.0 % 2 != 0 || s.1 % 2 != 0 {
                return Err(odd());
            }
            *s = (s.0 / 2, s.1 / 2);
        }
    }
    Ok(out)
}

fn other_spin(n: usize, r: usize) -> usize {
    if r == n {
        n - 1
    } else {
        n
    }
}

/// Removes the leftmost spin column `B^{r,1}`, `r in {n-1, n}`. Returns the
/// column as a bit mask (see [`Atom::S`]).
pub fn delta_spin(rc: &RiggedConfig, r: usize) -> Result<(RiggedConfig, u32)> {
    let n = rc.n;
    if !rc.mu[r - 1].contains(&1) {
        return Err(Error::InvalidRiggedConfig(format!("no spin factor B^{{{},1}}", r)));
    }
    let mut x = embed(rc);
    let mut letters = Vec::with_capacity(n);
    // B^{r,2} -> B^{1,1} ⊗ B^{r',1} ⊗ B^{r,1}
    x.remove_mu(r, 2)?;
    x.add_mu(r, 1);
    x.add_mu(1, 1);
    x.add_mu(other_spin(n, r), 1);
    let nodes: Vec<usize> = (1..=n).filter(|&a| a != r).collect();
    add_singular_ones(&mut x, &nodes);
    let (y, k) = delta(&x)?;
    letters.push(k);
    // B^{n-1,1} ⊗ B^{n,1} -> B^{1,1} ⊗ B^{n-2,1}
    x = y;
    x.remove_mu(n - 1, 1)?;
    x.remove_mu(n, 1)?;
    x.add_mu(1, 1);
    x.add_mu(n - 2, 1);
    let nodes: Vec<usize> = (1..=n - 2).collect();
    add_singular_ones(&mut x, &nodes);
    let (y, k) = delta(&x)?;
    letters.push(k);
    x = y;
    for t in (1..=n - 2).rev() {
        if t >= 2 {
            x = beta(&x, t)?;
        }
        let (y, k) = delta(&x)?;
        letters.push(k);
        x = y;
    }
    let w = letters
        .iter()
        .fold(Weight::zero(n), |acc, &k| acc + Atom::L(k).weight(n));
    let mut mask = 0u32;
    for (i, &c) in w.0.iter().enumerate() {
        match c {
            2 => {}
            -2 => mask |= 1 << i,
            _ => {
                return Err(Error::InvalidRiggedConfig(format!(
                    "spin removal produced letters {:?}",
                    letters
                )))
            }
        }
    }
    if spin_column_letters(n, mask) != letters {
        return Err(Error::InvalidRiggedConfig(format!(
            "spin removal produced letters {:?} out of column order",
            letters
        )));
    }
    Ok((unembed(&x)?, mask))
}

/// Letters of a spin column in the order the removal emits them: the
/// column `1..n` with `i` barred where the sign is `-`, sorted in column
/// order and read from the bottom.
pub fn spin_column_letters(n: usize, mask: u32) -> Vec<Letter> {
    let mut unbarred: Vec<Letter> = Vec::new();
    let mut barred: Vec<Letter> = Vec::new();
    for i in 1..=n {
        if mask >> (i - 1) & 1 == 1 {
            barred.push(-(i as Letter));
        } else {
            unbarred.push(i as Letter);
        }
    }
    // column top to bottom: unbarred increasing, then barred with decreasing index
    let mut col = unbarred;
    col.extend(barred.into_iter().rev());
    col.reverse();
    col
}

pub fn delta_spin_inverse(rc: &RiggedConfig, r: usize, mask: u32) -> Result<RiggedConfig> {
    let n = rc.n;
    let letters = spin_column_letters(n, mask);
    let mut x = embed(rc);
    for t in 1..=n - 2 {
        x = delta_inverse(&x, letters[n - t])?;
        if t >= 2 {
            x = beta_inverse(&x, t)?;
        }
    }
    x = delta_inverse(&x, letters[1])?;
    let nodes: Vec<usize> = (1..=n - 2).collect();
    remove_singular_ones(&mut x, &nodes)?;
    x.remove_mu(1, 1)?;
    x.remove_mu(n - 2, 1)?;
    x.add_mu(n - 1, 1);
    x.add_mu(n, 1);
    x = delta_inverse(&x, letters[0])?;
    let nodes: Vec<usize> = (1..=n).filter(|&a| a != r).collect();
    remove_singular_ones(&mut x, &nodes)?;
    x.remove_mu(1, 1)?;
    x.remove_mu(other_spin(n, r), 1)?;
    x.remove_mu(r, 1)?;
    x.add_mu(r, 2);
    unembed(&x)
}

/// One step of the inverse bijection, recorded for tracing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Gamma { r: usize, s: usize },
    Beta { r: usize },
    Delta { letter: Letter },
    DeltaSpin { r: usize, column: u32 },
}

/// The inverse bijection run directly on a (possibly unrestricted) rigged
/// configuration. Every intermediate configuration is passed to `trace`.
pub fn phi_inverse_direct_traced(
    factors: &[(usize, usize)],
    rc: &RiggedConfig,
    mut trace: impl FnMut(&Step, &RiggedConfig),
) -> Result<TensorElement> {
    let n = rc.n;
    check_factors_match(factors, rc)?;
    let mut x = rc.clone();
    let mut out = Vec::with_capacity(factors.len());
    for &(r, s) in factors {
        let mut cols: Vec<Vec<Atom>> = Vec::with_capacity(s);
        for j in 0..s {
            let width = s - j;
            if width >= 2 {
                x = gamma(&x, r, width)?;
                trace(&Step::Gamma { r, s: width }, &x);
            }
            if is_spin_node(n, r) {
                let (y, m) = delta_spin(&x, r)?;
                x = y;
                trace(&Step::DeltaSpin { r, column: m }, &x);
                cols.push(vec![Atom::S(m)]);
            } else {
                let mut col = Vec::with_capacity(r);
                for t in (1..=r).rev() {
                    if t >= 2 {
                        x = beta(&x, t)?;
                        trace(&Step::Beta { r: t }, &x);
                    }
                    let (y, k) = delta(&x)?;
                    x = y;
                    trace(&Step::Delta { letter: k }, &x);
                    col.push(Atom::L(k));
                }
                cols.push(col);
            }
        }
        out.push(KrElement::from_filling(n, r, &cols)?);
    }
    Ok(TensorElement(out))
}

pub fn phi_inverse_direct(factors: &[(usize, usize)], rc: &RiggedConfig) -> Result<TensorElement> {
    phi_inverse_direct_traced(factors, rc, |_, _| {})
}

fn check_factors_match(factors: &[(usize, usize)], rc: &RiggedConfig) -> Result<()> {
    let mut want = RiggedConfig::for_factors(rc.n, factors).mu;
    for v in want.iter_mut() {
        v.sort_by(|a, b| b.cmp(a));
    }
    if want != rc.mu {
        return Err(Error::InvalidRiggedConfig(format!(
            "L of the configuration does not match B = {:?}",
            factors
        )));
    }
    Ok(())
}

/// The bijection on a path (classical highest weight element).
pub fn phi_path(b: &TensorElement) -> Result<RiggedConfig> {
    let n = b.n();
    let mut x = RiggedConfig::empty(n);
    for factor in b.0.iter().rev() {
        let (r, s) = (factor.r, factor.s);
        let cols = factor.fill();
        for (j, col) in cols.iter().enumerate().rev() {
            if is_spin_node(n, r) {
                let m = match col[0] {
                    Atom::S(m) => m,
                    Atom::L(_) => unreachable!(),
                };
                x = delta_spin_inverse(&x, r, m)?;
            } else {
                for t in 1..=r {
                    let k = col[r - t].letter().expect("letter");
                    x = delta_inverse(&x, k)?;
                    if t >= 2 {
                        x = beta_inverse(&x, t)?;
                    }
                }
            }
            if j + 1 < s {
                x = gamma_inverse(&x, r, s - j)?;
            }
        }
    }
    Ok(x)
}

type PhiCache = Mutex<HashMap<TensorElement, RiggedConfig>>;

fn phi_cache() -> &'static PhiCache {
    static C: OnceLock<PhiCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The bijection on any element: paths go through [`phi_path`], other
/// elements are transported along their raising path.
pub fn phi(b: &TensorElement) -> Result<RiggedConfig> {
    let (hw, path) = b.high();
    let cached = phi_cache().lock().unwrap().get(&hw).cloned();
    let top = match cached {
        Some(x) => x,
        None => {
            let x = phi_path(&hw)?;
            phi_cache().lock().unwrap().insert(hw, x.clone());
            x
        }
    };
    top.lower_along(&path).ok_or_else(|| {
        Error::InvalidRiggedConfig(format!("transport of {:?} fell off the rc crystal", b))
    })
}

/// Inverse bijection by transport: raise the configuration to a highest
/// weight one, run the algorithm there and lower the resulting path.
pub fn phi_inverse(factors: &[(usize, usize)], rc: &RiggedConfig) -> Result<TensorElement> {
    let (top, path) = rc.high();
    let b = phi_inverse_direct(factors, &top)?;
    b.lower_along(&path)
        .ok_or_else(|| Error::InvalidElement("transport fell off the tensor product".into()))
}

/// The complement `J -> P - J`, extended from highest weight
/// configurations to their whole classical component so that it commutes
/// with every `f_a`.
pub fn theta(rc: &RiggedConfig) -> Result<RiggedConfig> {
    let (top, path) = rc.high();
    top.complement().lower_along(&path).ok_or_else(|| {
        Error::InvalidRiggedConfig(format!("complement transport failed for {:?}", rc))
    })
}

/// `theta ∘ op ∘ theta` for an operator returning a configuration plus data.
pub fn tilde<T>(
    rc: &RiggedConfig,
    op: impl FnOnce(&RiggedConfig) -> Result<(RiggedConfig, T)>,
) -> Result<(RiggedConfig, T)> {
    let (x, t) = op(&theta(rc)?)?;
    Ok((theta(&x)?, t))
}

/// Dual of [`beta`]: the added one-box strings are cosingular.
pub fn tilde_beta(rc: &RiggedConfig, r: usize) -> Result<RiggedConfig> {
    let mut out = rc.clone();
    out.remove_mu(r, 1)?;
    out.add_mu(1, 1);
    out.add_mu(r - 1, 1);
    for a in 1..r {
        out.nu[a - 1].push((1, 0));
    }
    out.normalize();
    Ok(out)
}

/// Dual of [`gamma`]: strings of `nu^{(r)}` shorter than `s` gain one in
/// rigging, so that coriggings are preserved.
pub fn tilde_gamma(rc: &RiggedConfig, r: usize, s: usize) -> Result<RiggedConfig> {
    let mut out = gamma(rc, r, s)?;
    for st in out.nu[r - 1].iter_mut() {
        if st.0 < s {
            st.1 += 1;
        }
    }
    out.normalize();
    Ok(out)
}
