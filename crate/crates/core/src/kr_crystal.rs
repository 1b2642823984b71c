//! Kirillov–Reshetikhin crystals `B^{r,s}` of type D_n^(1).
//!
//! For `r <= n-2` elements are Kashiwara–Nakashima tableaux whose shape is
//! an `r x s` rectangle with some vertical dominoes removed; for the spin
//! nodes they are `s` spin columns. The affine operators are obtained by
//! conjugating `e_1`/`f_1` with the Dynkin automorphism `sigma` exchanging
//! nodes 0 and 1.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::crystal_core::{
    high, lower_along, raise_with, spin_minus_at, word_e, word_f, word_star, word_weight, Atom,
    Letter,
};
use crate::error::{Error, Result};
use crate::root_data::Weight;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KrElement {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    /// Column heights left to right (empty columns omitted). Spin factors
    /// use one atom per column.
    pub heights: Vec<usize>,
    /// Reading word: columns left to right, each read bottom to top.
    pub word: Vec<Atom>,
}

pub fn is_spin_node(n: usize, r: usize) -> bool {
    r + 1 >= n
}

pub fn check_factor(n: usize, r: usize, s: usize) -> Result<()> {
    crate::root_data::check_rank(n)?;
    if r == 0 || r > n || s == 0 || n > 30 {
        return Err(Error::InvalidFactor { r, s, n });
    }
    Ok(())
}

/// Column heights of the classical components of `B^{r,s}`, `r <= n-2`:
/// the `r x s` rectangle with vertical dominoes removed.
pub fn component_shapes(r: usize, s: usize) -> Vec<Vec<usize>> {
    let heights: Vec<usize> = (0..=r / 2).map(|k| r - 2 * k).collect();
    let mut out = Vec::new();
    fn rec(hs: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if hs.is_empty() {
            if left == 0 {
                out.push(cur.iter().copied().filter(|&h| h > 0).collect());
            }
            return;
        }
        for k in (0..=left).rev() {
            let len = cur.len();
            cur.extend(std::iter::repeat(hs[0]).take(k));
            rec(&hs[1..], left - k, cur, out);
            cur.truncate(len);
        }
    }
    rec(&heights, s, &mut Vec::new(), &mut out);
    out
}

fn column_word(h: usize) -> impl Iterator<Item = Atom> {
    (1..=h as Letter).rev().map(Atom::L)
}

/// Highest weight word of `B^{r,1}` in the component `varpi_h`, written as
/// a length-`r` column: `1..m` on top of `\bar m .. \overline{h+1}`, with
/// `m = (r+h)/2`. Read bottom to top.
pub fn kr_column_highest(r: usize, h: usize) -> Vec<Atom> {
    let m = (r + h) / 2;
    let mut w: Vec<Atom> = ((h + 1)..=m).map(|k| Atom::L(-(k as Letter))).collect();
    w.extend(column_word(m));
    w
}

/// `c` and the remaining shape in the left split of `u_lambda`.
fn left_split_highest(r: usize, s: usize, heights: &[usize]) -> (Vec<Atom>, Vec<usize>) {
    let mut hs = heights.to_vec();
    hs.resize(s, 0);
    let p = hs[0];
    let bar = |from: usize| ((from + 1)..=r).map(|k| Atom::L(-(k as Letter)));
    let (c, rest): (Vec<Atom>, Vec<usize>) = if p == r {
        (column_word(r).collect(), hs[1..].to_vec())
    } else if hs[1] == p {
        let mut c: Vec<Atom> = bar(p).collect();
        c.extend(column_word(p));
        let mut rest = vec![r];
        rest.extend_from_slice(&hs[2..]);
        (c, rest)
    } else {
        let q = hs[1];
        let mut c: Vec<Atom> = bar(p).collect();
        c.extend(((r - p + q + 1)..=r).rev().map(|k| Atom::L(k as Letter)));
        c.extend(column_word(q));
        let mut rest = vec![r - p + q];
        rest.extend_from_slice(&hs[2..]);
        (c, rest)
    };
    (c, rest.into_iter().filter(|&h| h > 0).collect())
}

fn transpose(rows: &[usize]) -> Vec<usize> {
    let cols = rows.first().copied().unwrap_or(0);
    (1..=cols).map(|c| rows.iter().filter(|&&x| x >= c).count()).collect()
}

/// Classical shape (column heights) of a dominant weight with non-negative
/// integral coordinates.
fn shape_of_weight(w: &Weight) -> Option<Vec<usize>> {
    let mut rows = Vec::new();
    for &x in &w.0 {
        if x < 0 || x % 2 != 0 {
            return None;
        }
        if x > 0 {
            rows.push((x / 2) as usize);
        }
    }
    Some(transpose(&rows))
}

impl KrElement {
    pub fn is_spin(&self) -> bool {
        is_spin_node(self.n, self.r)
    }

    /// The classical highest weight element `u_lambda` for a shape given by
    /// column heights (`r <= n-2`).
    pub fn highest(n: usize, r: usize, s: usize, heights: &[usize]) -> Self {
        let heights: Vec<usize> = heights.iter().copied().filter(|&h| h > 0).collect();
        let word = heights.iter().flat_map(|&h| column_word(h)).collect();
        KrElement {
            n,
            r,
            s,
            heights,
            word,
        }
    }

    /// Classical highest weight element of a spin factor.
    pub fn spin_highest(n: usize, r: usize, s: usize) -> Self {
        let col = if r == n { 0 } else { spin_minus_at(&[n]) };
        KrElement {
            n,
            r,
            s,
            heights: vec![1; s],
            word: vec![Atom::S(col); s],
        }
    }

    /// `u_{s varpi_r}`, the classical highest weight element of the
    /// component of largest weight.
    pub fn maximal(n: usize, r: usize, s: usize) -> Self {
        if is_spin_node(n, r) {
            Self::spin_highest(n, r, s)
        } else {
            Self::highest(n, r, s, &vec![r; s])
        }
    }

    pub fn from_columns(n: usize, r: usize, s: usize, columns: &[Vec<Letter>]) -> Result<Self> {
        check_factor(n, r, s)?;
        if is_spin_node(n, r) {
            return Err(Error::InvalidElement(
                "spin factors take sign vectors, not letters".into(),
            ));
        }
        let heights: Vec<usize> = columns.iter().map(|c| c.len()).collect();
        let word: Vec<Atom> = columns.iter().flatten().map(|&x| Atom::L(x)).collect();
        if word
            .iter()
            .any(|a| matches!(a, Atom::L(x) if *x == 0 || x.unsigned_abs() as usize > n))
        {
            return Err(Error::InvalidElement(format!("letter out of range in {:?}", columns)));
        }
        let b = KrElement {
            n,
            r,
            s,
            heights,
            word,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn from_spin_columns(n: usize, r: usize, s: usize, columns: &[Vec<i32>]) -> Result<Self> {
        check_factor(n, r, s)?;
        if !is_spin_node(n, r) || columns.len() != s {
            return Err(Error::InvalidElement(format!(
                "expected {} spin columns for B^{{{},{}}}",
                s, r, s
            )));
        }
        let mut word = Vec::new();
        for c in columns {
            if c.len() != n || c.iter().any(|&x| x != 1 && x != -1) {
                return Err(Error::InvalidElement(format!("bad spin column {:?}", c)));
            }
            word.push(Atom::S(crate::crystal_core::spin_from_signs(c)));
        }
        let b = KrElement {
            n,
            r,
            s,
            heights: vec![1; s],
            word,
        };
        b.validate()?;
        Ok(b)
    }

    /// Checks membership by raising to the highest weight and comparing with
    /// the highest element of an allowed shape.
    pub fn validate(&self) -> Result<()> {
        let bad = || Error::InvalidElement(format!("{} is not in B^{{{},{}}}", self, self.r, self.s));
        let (hw, _) = high(self.n, &self.word);
        if self.is_spin() {
            if self.heights != vec![1; self.s] || hw != Self::spin_highest(self.n, self.r, self.s).word {
                return Err(bad());
            }
            return Ok(());
        }
        let ok_shape = self.heights.len() <= self.s
            && self.heights.windows(2).all(|w| w[0] >= w[1])
            && self
                .heights
                .iter()
                .all(|&h| h > 0 && h <= self.r && (self.r - h) % 2 == 0);
        if !ok_shape {
            return Err(bad());
        }
        let u = Self::highest(self.n, self.r, self.s, &self.heights);
        if hw != u.word {
            return Err(bad());
        }
        Ok(())
    }

    pub fn columns(&self) -> Vec<Vec<Letter>> {
        if self.is_spin() {
            return self
                .word
                .iter()
                .map(|a| match a {
                    Atom::S(m) => crate::crystal_core::spin_signs(self.n, *m),
                    Atom::L(_) => unreachable!(),
                })
                .collect();
        }
        let mut out = Vec::new();
        let mut k = 0;
        for &h in &self.heights {
            out.push(
                self.word[k..k + h]
                    .iter()
                    .map(|a| a.letter().expect("tableau atom"))
                    .collect(),
            );
            k += h;
        }
        out
    }

    pub fn weight(&self) -> Weight {
        word_weight(self.n, &self.word)
    }

    fn with_word(&self, word: Vec<Atom>) -> Self {
        KrElement {
            word,
            ..self.clone()
        }
    }

    /// Classical operators `e_i`, `i in 1..=n`, and the affine `e_0`.
    pub fn e(&self, i: usize) -> Option<Self> {
        if i == 0 {
            return self.sigma().e(1).map(|b| b.sigma());
        }
        let mut w = self.word.clone();
        word_e(self.n, i, &mut w).then(|| self.with_word(w))
    }

    pub fn f(&self, i: usize) -> Option<Self> {
        if i == 0 {
            return self.sigma().f(1).map(|b| b.sigma());
        }
        let mut w = self.word.clone();
        word_f(self.n, i, &mut w).then(|| self.with_word(w))
    }

    pub fn eps(&self, i: usize) -> usize {
        if i == 0 {
            return self.sigma().eps(1);
        }
        crate::crystal_core::word_eps(self.n, i, &self.word)
    }

    pub fn phi(&self, i: usize) -> usize {
        if i == 0 {
            return self.sigma().phi(1);
        }
        crate::crystal_core::word_phi(self.n, i, &self.word)
    }

    /// Classical highest weight element of the component and the raising path.
    pub fn high(&self) -> (Self, Vec<usize>) {
        let (w, path) = high(self.n, &self.word);
        (self.with_word(w), path)
    }

    pub fn is_highest(&self) -> bool {
        crate::crystal_core::is_highest(self.n, &self.word)
    }

    /// Lusztig involution on the classical component.
    pub fn star(&self) -> Self {
        self.with_word(word_star(self.n, &self.word))
    }

    /// The Dynkin automorphism exchanging nodes 0 and 1. For spin factors it
    /// maps `B^{n,s}` to `B^{n-1,s}` and back.
    pub fn sigma(&self) -> Self {
        let n = self.n;
        let nodes: Vec<usize> = (2..=n).collect();
        let mut w = self.word.clone();
        let path = raise_with(n, &mut w, &nodes);
        let top = self.with_word(w);
        let mut image = if self.is_spin() {
            spin_sigma_highest(&top)
        } else {
            let table = kappa_table(n, self.r, self.s);
            let d = table
                .inverse
                .get(&(top.heights.clone(), top.word.clone()))
                .unwrap_or_else(|| panic!("{} has no pm-diagram", top));
            table.kappa[&d.flipped()].clone()
        };
        let ok = lower_along(n, &mut image.word, &path);
        assert!(ok, "sigma transport failed");
        image
    }

    /// KR column of a `B^{r,1}` element (length exactly `r`), read bottom to top.
    pub fn kr_column(&self) -> Vec<Atom> {
        debug_assert_eq!(self.s, 1);
        let (hw, path) = high(self.n, &self.word);
        let h = hw.len();
        let mut w = kr_column_highest(self.r, h);
        let ok = lower_along(self.n, &mut w, &path);
        assert!(ok, "kr column transport failed");
        w
    }

    /// Inverse of [`KrElement::kr_column`].
    pub fn from_kr_column(n: usize, r: usize, word: &[Atom]) -> Result<Self> {
        let (hw, path) = high(n, word);
        let bad = || Error::InvalidElement(format!("{:?} is not a KR column of height {}", word, r));
        let shape = shape_of_weight(&word_weight(n, &hw)).ok_or_else(bad)?;
        let h = match shape.as_slice() {
            [] => 0,
            [h] => *h,
            _ => return Err(bad()),
        };
        if h > r || (r - h) % 2 != 0 || hw != kr_column_highest(r, h) {
            return Err(bad());
        }
        let mut u = Self::highest(n, r, 1, &[h]);
        if !lower_along(n, &mut u.word, &path) {
            return Err(bad());
        }
        Ok(u)
    }

    /// Left split `B^{r,s} -> B^{r,1} ⊗ B^{r,s-1}`; the first factor is
    /// returned as its KR column word. Spin factors split off a column.
    pub fn left_split(&self) -> (Vec<Atom>, Self) {
        assert!(self.s >= 2, "left split needs s >= 2");
        let n = self.n;
        if self.is_spin() {
            let rest = KrElement {
                s: self.s - 1,
                heights: vec![1; self.s - 1],
                word: self.word[1..].to_vec(),
                ..self.clone()
            };
            return (vec![self.word[0]], rest);
        }
        let (hw, path) = high(n, &self.word);
        debug_assert_eq!(hw, Self::highest(n, self.r, self.s, &self.heights).word);
        let (c, rest_shape) = left_split_highest(self.r, self.s, &self.heights);
        let mut w = c;
        w.extend(rest_shape.iter().flat_map(|&h| column_word(h)));
        let ok = lower_along(n, &mut w, &path);
        assert!(ok, "left split transport failed");
        let rest = KrElement {
            n,
            r: self.r,
            s: self.s - 1,
            heights: rest_shape,
            word: w[self.r..].to_vec(),
        };
        (w[..self.r].to_vec(), rest)
    }

    /// Left split with the first factor as a `B^{r,1}` element.
    pub fn left_split_element(&self) -> (Self, Self) {
        let (c, rest) = self.left_split();
        let first = if self.is_spin() {
            KrElement {
                s: 1,
                heights: vec![1],
                word: c,
                ..self.clone()
            }
        } else {
            Self::from_kr_column(self.n, self.r, &c).expect("left split column")
        };
        (first, rest)
    }

    /// Inverse of the left split.
    pub fn left_merge(c: &[Atom], rest: &Self) -> Result<Self> {
        let n = rest.n;
        if rest.is_spin() {
            let mut word = c.to_vec();
            word.extend_from_slice(&rest.word);
            let b = KrElement {
                s: rest.s + 1,
                heights: vec![1; rest.s + 1],
                word,
                ..rest.clone()
            };
            b.validate()?;
            return Ok(b);
        }
        let (r, s) = (rest.r, rest.s + 1);
        let mut w = c.to_vec();
        w.extend_from_slice(&rest.word);
        let (hw, path) = high(n, &w);
        let bad = || Error::InvalidElement(format!("{:?} ⊗ {} is not a left split", c, rest));
        let shape = shape_of_weight(&word_weight(n, &hw)).ok_or_else(bad)?;
        if shape.len() > s || shape.iter().any(|&h| h > r || (r - h) % 2 != 0) {
            return Err(bad());
        }
        let (c0, rest_shape) = left_split_highest(r, s, &shape);
        let mut expect = c0;
        expect.extend(rest_shape.iter().flat_map(|&h| column_word(h)));
        if expect != hw {
            return Err(bad());
        }
        let mut u = Self::highest(n, r, s, &shape);
        if !lower_along(n, &mut u.word, &path) {
            return Err(bad());
        }
        Ok(u)
    }

    /// Filling map: the `r x s` rectangle of KR columns (each read bottom to
    /// top, left to right). Spin factors return their columns as-is.
    pub fn fill(&self) -> Vec<Vec<Atom>> {
        let mut out = Vec::with_capacity(self.s);
        let mut cur = self.clone();
        while cur.s > 1 {
            let (c, rest) = cur.left_split();
            out.push(c);
            cur = rest;
        }
        if cur.is_spin() {
            out.push(cur.word.clone());
        } else {
            out.push(cur.kr_column());
        }
        out
    }

    /// Inverse of [`KrElement::fill`].
    pub fn from_filling(n: usize, r: usize, cols: &[Vec<Atom>]) -> Result<Self> {
        let s = cols.len();
        check_factor(n, r, s)?;
        let last = cols.last().expect("non-empty filling");
        let mut cur = if is_spin_node(n, r) {
            let b = KrElement {
                n,
                r,
                s: 1,
                heights: vec![1],
                word: last.clone(),
            };
            b.validate()?;
            b
        } else {
            Self::from_kr_column(n, r, last)?
        };
        for c in cols[..s - 1].iter().rev() {
            cur = Self::left_merge(c, &cur)?;
        }
        Ok(cur)
    }

    /// Rows of a tableau, top to bottom (for display).
    pub fn rows(&self) -> Vec<Vec<Letter>> {
        let cols = self.columns();
        let depth = cols.iter().map(|c| c.len()).max().unwrap_or(0);
        (0..depth)
            .map(|row| {
                cols.iter()
                    .filter(|c| c.len() > row)
                    .map(|c| c[c.len() - 1 - row])
                    .collect()
            })
            .collect()
    }
}

fn fmt_letter(x: Letter) -> String {
    if x < 0 {
        format!("-{}", -x)
    } else {
        x.to_string()
    }
}

impl fmt::Display for KrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_spin() {
            let cols: Vec<String> = self
                .columns()
                .iter()
                .map(|c| c.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect())
                .collect();
            return write!(f, "[{}]", cols.join(" "));
        }
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|&x| fmt_letter(x)).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join(" / "))
    }
}

impl fmt::Debug for KrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{},{}{}", self.r, self.s, self)
    }
}

/// Spin version of the 0/1 automorphism on `{2..n}`-highest elements:
/// `c()^a c(1,n)^{s-a}` in `B^{n,s}` corresponds to `c(n)^{s-a} c(1)^a` in `B^{n-1,s}`.
fn spin_sigma_highest(top: &KrElement) -> KrElement {
    let n = top.n;
    let s = top.s;
    let (empty, c1n, cn, c1) = (
        Atom::S(0),
        Atom::S(spin_minus_at(&[1, n])),
        Atom::S(spin_minus_at(&[n])),
        Atom::S(spin_minus_at(&[1])),
    );
    let (r, word) = if top.r == n {
        let a = top.word.iter().filter(|&&x| x == empty).count();
        debug_assert!(top.word[..a].iter().all(|&x| x == empty));
        debug_assert!(top.word[a..].iter().all(|&x| x == c1n), "{:?}", top);
        let mut w = vec![cn; s - a];
        w.extend(std::iter::repeat(c1).take(a));
        (n - 1, w)
    } else {
        let a = top.word.iter().filter(|&&x| x == c1).count();
        debug_assert!(top.word[..s - a].iter().all(|&x| x == cn), "{:?}", top);
        let mut w = vec![empty; a];
        w.extend(std::iter::repeat(c1n).take(s - a));
        (n, w)
    };
    KrElement {
        n,
        r,
        s,
        heights: vec![1; s],
        word,
    }
}

/// A pm-diagram: for each height `h` (outer column height), the number of
/// columns carrying no sign, a `+`, a `-`, and `-+` stacked.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PmDiagram {
    pub r: usize,
    /// `counts[h] = [none, plus, minus, plusminus]`
    pub counts: Vec<[usize; 4]>,
}

const NONE: usize = 0;
const PLUS: usize = 1;
const MINUS: usize = 2;
const BOTH: usize = 3;

impl PmDiagram {
    /// All diagrams with `s` columns whose outer heights have the parity of `r`.
    pub fn all(r: usize, s: usize) -> Vec<PmDiagram> {
        let hs: Vec<usize> = (0..=r / 2).map(|k| r - 2 * k).collect();
        let mut slots = Vec::new();
        for &h in &hs {
            slots.push((h, NONE));
            if h >= 1 {
                slots.push((h, PLUS));
                slots.push((h, MINUS));
            }
            if h >= 2 {
                slots.push((h, BOTH));
            }
        }
        let mut out = Vec::new();
        fn rec(
            slots: &[(usize, usize)],
            left: usize,
            d: &mut PmDiagram,
            out: &mut Vec<PmDiagram>,
        ) {
            match slots.split_first() {
                None => {
                    if left == 0 {
                        out.push(d.clone());
                    }
                }
                Some((&(h, t), rest)) => {
                    for k in 0..=left {
                        d.counts[h][t] = k;
                        rec(rest, left - k, d, out);
                    }
                    d.counts[h][t] = 0;
                }
            }
        }
        let mut d = PmDiagram {
            r,
            counts: vec![[0; 4]; r + 1],
        };
        rec(&slots, s, &mut d, &mut out);
        out
    }

    /// Columns left to right as `(outer height, sign type)`.
    pub fn columns(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for h in (0..=self.r).rev() {
            for t in [NONE, PLUS, MINUS, BOTH] {
                out.extend(std::iter::repeat((h, t)).take(self.counts[h][t]));
            }
        }
        out
    }

    /// The involution exchanging `+` and `-` columns, and `-+` columns of
    /// height `h` with unsigned columns of height `h-2`.
    pub fn flipped(&self) -> PmDiagram {
        let mut c = vec![[0; 4]; self.r + 1];
        for h in 0..=self.r {
            c[h][PLUS] = self.counts[h][MINUS];
            c[h][MINUS] = self.counts[h][PLUS];
            if h >= 2 {
                c[h][BOTH] = self.counts[h - 2][NONE];
                c[h - 2][NONE] = self.counts[h][BOTH];
            }
        }
        c[self.r][NONE] = self.counts[self.r][NONE];
        PmDiagram {
            r: self.r,
            counts: c,
        }
    }

    /// The `{2..n}`-highest weight element attached to the diagram.
    pub fn kappa(&self, n: usize, s: usize) -> KrElement {
        let cols = self.columns();
        // tableau columns top to bottom
        let mut tab: Vec<Vec<Letter>> = cols
            .iter()
            .map(|&(h, t)| {
                let mut c: Vec<Letter> = Vec::with_capacity(h);
                let minus = t == MINUS || t == BOTH;
                let top_len = if minus { h - 1 } else { h };
                c.extend((2..2 + top_len as Letter).map(|x| x));
                if minus {
                    c.push(-1);
                }
                c
            })
            .collect();
        // + signs, bottom row first, left to right
        let mut pluses: Vec<(usize, usize)> = Vec::new();
        for (j, &(h, t)) in cols.iter().enumerate() {
            match t {
                PLUS => pluses.push((h, j)),
                BOTH => pluses.push((h - 1, j)),
                _ => {}
            }
        }
        pluses.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        // the cursor walks the tableau in reading order: columns left to
        // right, each bottom to top
        let mut cells: Vec<(usize, usize)> = Vec::new();
        for (j, c) in tab.iter().enumerate() {
            for row in (0..c.len()).rev() {
                cells.push((row, j));
            }
        }
        let mut cursor = 0;
        for (h, _) in pluses {
            loop {
                let (row, j) = cells[cursor];
                cursor += 1;
                let x = tab[j][row];
                if x == -1 {
                    tab[j][row] = -(h as Letter + 1);
                    break;
                }
                if x == 2 && row == 0 {
                    let k = tab[j].iter().take_while(|&&y| y > 0).count() as Letter + 1;
                    let mut top: Vec<Letter> = (1..=h as Letter).collect();
                    top.extend((h as Letter + 2)..=k);
                    for (idx, y) in top.into_iter().enumerate() {
                        tab[j][idx] = y;
                    }
                    break;
                }
            }
        }
        let heights: Vec<usize> = cols.iter().map(|c| c.0).filter(|&h| h > 0).collect();
        let word = tab
            .iter()
            .filter(|c| !c.is_empty())
            .flat_map(|c| c.iter().rev().map(|&x| Atom::L(x)))
            .collect();
        KrElement {
            n,
            r: self.r,
            s,
            heights,
            word,
        }
    }
}

pub struct KappaTable {
    pub kappa: HashMap<PmDiagram, KrElement>,
    pub inverse: HashMap<(Vec<usize>, Vec<Atom>), PmDiagram>,
}

type Cache<K, V> = OnceLock<Mutex<HashMap<K, Arc<V>>>>;

fn cached<K: std::hash::Hash + Eq + Clone, V>(
    cache: &'static Cache<K, V>,
    key: K,
    make: impl FnOnce() -> V,
) -> Arc<V> {
    let m = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = m.lock().unwrap().get(&key) {
        return v.clone();
    }
    let v = Arc::new(make());
    m.lock().unwrap().entry(key).or_insert(v).clone()
}

pub fn kappa_table(n: usize, r: usize, s: usize) -> Arc<KappaTable> {
    static CACHE: Cache<(usize, usize, usize), KappaTable> = OnceLock::new();
    cached(&CACHE, (n, r, s), || {
        let mut kappa = HashMap::new();
        let mut inverse = HashMap::new();
        for d in PmDiagram::all(r, s) {
            let b = d.kappa(n, s);
            inverse.insert((b.heights.clone(), b.word.clone()), d.clone());
            kappa.insert(d, b);
        }
        KappaTable { kappa, inverse }
    })
}

/// All elements of `B^{r,s}`, grouped by classical component.
pub fn kr_crystal(n: usize, r: usize, s: usize) -> Arc<Vec<KrElement>> {
    static CACHE: Cache<(usize, usize, usize), Vec<KrElement>> = OnceLock::new();
    cached(&CACHE, (n, r, s), || {
        let tops: Vec<KrElement> = if is_spin_node(n, r) {
            vec![KrElement::spin_highest(n, r, s)]
        } else {
            component_shapes(r, s)
                .iter()
                .map(|sh| KrElement::highest(n, r, s, sh))
                .collect()
        };
        let mut out = Vec::new();
        for u in tops {
            out.extend(classical_component(&u));
        }
        out
    })
}

/// Breadth-first enumeration of the classical component of `b`.
pub fn classical_component(b: &KrElement) -> Vec<KrElement> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    seen.insert(b.clone());
    queue.push_back(b.clone());
    while let Some(x) = queue.pop_front() {
        for i in 1..=b.n {
            for y in [x.f(i), x.e(i)].into_iter().flatten() {
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        out.push(x);
    }
    out
}

/// An element of a tensor product of KR crystals, leftmost factor first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorElement(pub Vec<KrElement>);

impl TensorElement {
    pub fn n(&self) -> usize {
        self.0.first().map(|b| b.n).unwrap_or(0)
    }

    pub fn factors(&self) -> Vec<(usize, usize)> {
        self.0.iter().map(|b| (b.r, b.s)).collect()
    }

    pub fn word(&self) -> Vec<Atom> {
        self.0.iter().flat_map(|b| b.word.iter().copied()).collect()
    }

    fn with_word(&self, word: &[Atom]) -> Self {
        let mut k = 0;
        let mut out = self.0.clone();
        for b in &mut out {
            let len = b.word.len();
            b.word = word[k..k + len].to_vec();
            k += len;
        }
        TensorElement(out)
    }

    pub fn weight(&self) -> Weight {
        word_weight(self.n(), &self.word())
    }

    fn affine_signature(&self) -> crate::crystal_core::Signature {
        crate::crystal_core::signature(self.0.iter().map(|b| (b.eps(0), b.phi(0))))
    }

    pub fn e(&self, i: usize) -> Option<Self> {
        if i == 0 {
            let k = self.affine_signature().e_at?;
            let mut out = self.clone();
            out.0[k] = out.0[k].e(0)?;
            return Some(out);
        }
        let mut w = self.word();
        word_e(self.n(), i, &mut w).then(|| self.with_word(&w))
    }

    pub fn f(&self, i: usize) -> Option<Self> {
        if i == 0 {
            let k = self.affine_signature().f_at?;
            let mut out = self.clone();
            out.0[k] = out.0[k].f(0)?;
            return Some(out);
        }
        let mut w = self.word();
        word_f(self.n(), i, &mut w).then(|| self.with_word(&w))
    }

    pub fn eps(&self, i: usize) -> usize {
        if i == 0 {
            return self.affine_signature().eps;
        }
        crate::crystal_core::word_eps(self.n(), i, &self.word())
    }

    pub fn phi(&self, i: usize) -> usize {
        if i == 0 {
            return self.affine_signature().phi;
        }
        crate::crystal_core::word_phi(self.n(), i, &self.word())
    }

    pub fn high(&self) -> (Self, Vec<usize>) {
        let (w, path) = high(self.n(), &self.word());
        (self.with_word(&w), path)
    }

    pub fn is_highest(&self) -> bool {
        crate::crystal_core::is_highest(self.n(), &self.word())
    }

    pub fn lower_along(&self, path: &[usize]) -> Option<Self> {
        let mut w = self.word();
        lower_along(self.n(), &mut w, path).then(|| self.with_word(&w))
    }

    /// `b_k ⊗ ... ⊗ b_1 -> b_1^* ⊗ ... ⊗ b_k^*`.
    pub fn star_factors(&self) -> Self {
        TensorElement(self.0.iter().rev().map(|b| b.star()).collect())
    }

    /// The map on highest weight paths `b -> high(b_1^* ⊗ ... ⊗ b_k^*)`.
    pub fn diamond(&self) -> Self {
        self.star_factors().high().0
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| format!("{:?}", b)).collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}

/// Every element of the tensor product.
pub fn tensor_elements(n: usize, factors: &[(usize, usize)]) -> Vec<TensorElement> {
    let crystals: Vec<Arc<Vec<KrElement>>> =
        factors.iter().map(|&(r, s)| kr_crystal(n, r, s)).collect();
    let mut out = vec![Vec::new()];
    for c in &crystals {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for b in c.iter() {
                let mut v: Vec<KrElement> = prefix.clone();
                v.push(b.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter().map(TensorElement).collect()
}

/// Classical highest weight elements (paths), optionally of a fixed weight.
/// Built from the right, since the right part of a path is again a path.
pub fn paths(n: usize, factors: &[(usize, usize)], weight: Option<&Weight>) -> Vec<TensorElement> {
    let mut suffixes: Vec<Vec<KrElement>> = vec![Vec::new()];
    for &(r, s) in factors.iter().rev() {
        let c = kr_crystal(n, r, s);
        let mut next = Vec::new();
        for suf in &suffixes {
            for b in c.iter() {
                let mut w: Vec<Atom> = b.word.clone();
                w.extend(suf.iter().flat_map(|x| x.word.iter().copied()));
                if crate::crystal_core::is_highest(n, &w) {
                    let mut v = vec![b.clone()];
                    v.extend(suf.iter().cloned());
                    next.push(v);
                }
            }
        }
        suffixes = next;
    }
    let mut out: Vec<TensorElement> = suffixes
        .into_iter()
        .map(TensorElement)
        .filter(|t| weight.map_or(true, |w| &t.weight() == w))
        .collect();
    out.sort();
    out
}
