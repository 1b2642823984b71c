//! Rigged configurations of type D_n^(1) and their classical crystal
//! structure.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::root_data::{cartan, check_classical_index, check_rank, neighbours, Weight};

/// A rigged configuration together with the multiplicity data `L`.
///
/// `mu[a-1]` lists the widths `s` of the tensor factors `B^{a,s}`;
/// `nu[a-1]` lists the strings `(length, rigging)` of `nu^{(a)}`, sorted by
/// length and then rigging, both decreasing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RiggedConfig {
    pub n: usize,
    pub mu: Vec<Vec<usize>>,
    pub nu: Vec<Vec<(usize, i64)>>,
}

/// `Q_i(lambda) = sum_j min(i, lambda_j)`.
pub fn q_of(rows: impl IntoIterator<Item = usize>, i: usize) -> i64 {
    rows.into_iter().map(|x| x.min(i) as i64).sum()
}

fn sort_strings(v: &mut [(usize, i64)]) {
    v.sort_by(|a, b| b.cmp(a));
}

impl RiggedConfig {
    pub fn empty(n: usize) -> Self {
        RiggedConfig {
            n,
            mu: vec![Vec::new(); n],
            nu: vec![Vec::new(); n],
        }
    }

    /// The empty configuration for the tensor product `factors` (left first).
    pub fn for_factors(n: usize, factors: &[(usize, usize)]) -> Self {
        let mut rc = Self::empty(n);
        for &(r, s) in factors {
            rc.add_mu(r, s);
        }
        rc
    }

    pub fn add_mu(&mut self, r: usize, s: usize) {
        let v = &mut self.mu[r - 1];
        v.push(s);
        v.sort_by(|a, b| b.cmp(a));
    }

    /// Removes one row of width `s` from `mu^{(r)}`.
    pub fn remove_mu(&mut self, r: usize, s: usize) -> Result<()> {
        let v = &mut self.mu[r - 1];
        match v.iter().position(|&x| x == s) {
            Some(k) => {
                v.remove(k);
                Ok(())
            }
            None => Err(Error::InvalidRiggedConfig(format!(
                "no factor B^{{{},{}}} in L",
                r, s
            ))),
        }
    }

    pub fn normalize(&mut self) {
        for v in &mut self.nu {
            sort_strings(v);
        }
        for v in &mut self.mu {
            v.sort_by(|a, b| b.cmp(a));
        }
    }

    /// Vacancy number `P_i^{(a)}`.
    pub fn vacancy(&self, a: usize, i: usize) -> i64 {
        let mut p = q_of(self.mu[a - 1].iter().copied(), i);
        p -= 2 * q_of(self.nu[a - 1].iter().map(|x| x.0), i);
        for b in neighbours(self.n, a) {
            p += q_of(self.nu[b - 1].iter().map(|x| x.0), i);
        }
        p
    }

    /// Vacancy numbers aligned with the strings of `nu^{(a)}`.
    pub fn vacancies(&self, a: usize) -> Vec<i64> {
        self.nu[a - 1].iter().map(|&(l, _)| self.vacancy(a, l)).collect()
    }

    pub fn coriggings(&self) -> Vec<Vec<i64>> {
        (1..=self.n)
            .map(|a| {
                self.nu[a - 1]
                    .iter()
                    .map(|&(l, j)| self.vacancy(a, l) - j)
                    .collect()
            })
            .collect()
    }

    /// Every string satisfies `0 <= rigging <= vacancy`.
    pub fn is_restricted(&self) -> bool {
        (1..=self.n).all(|a| {
            self.nu[a - 1]
                .iter()
                .all(|&(l, j)| j >= 0 && j <= self.vacancy(a, l))
        })
    }

    /// Every string satisfies `rigging <= vacancy`.
    pub fn is_unrestricted_valid(&self) -> bool {
        (1..=self.n).all(|a| self.nu[a - 1].iter().all(|&(l, j)| j <= self.vacancy(a, l)))
    }

    pub fn weight(&self) -> Weight {
        let n = self.n;
        let mut w = Weight::zero(n);
        for a in 1..=n {
            let m: usize = self.mu[a - 1].iter().sum();
            let v: usize = self.nu[a - 1].iter().map(|x| x.0).sum();
            w = w + Weight::fundamental(n, a).scale(m as i32)
                - Weight::simple_root(n, a).scale(v as i32);
        }
        w
    }

    /// The factor list `B^{a,s}` as a multiset, ordered by node and width.
    pub fn factors(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 1..=self.n {
            for &s in &self.mu[a - 1] {
                out.push((a, s));
            }
        }
        out
    }

    /// Rebuilds riggings from coriggings after the partitions changed; the
    /// string at `(node, index)` in `skip` is left as is.
    fn restore_coriggings(&mut self, old: &[Vec<(usize, i64)>], skip: (usize, usize)) {
        for a in 1..=self.n {
            let mut out = Vec::with_capacity(self.nu[a - 1].len());
            for (k, &(l, c)) in old[a - 1].iter().enumerate() {
                if (a, k) == skip {
                    continue;
                }
                out.push((l, self.vacancy(a, l) - c));
            }
            if a == skip.0 {
                if let Some(&(l, j)) = self.nu[a - 1].get(skip.1) {
                    if l > 0 {
                        out.push((l, j));
                    }
                }
            }
            self.nu[a - 1] = out;
        }
        self.normalize();
    }

    fn lengths_and_coriggings(&self) -> Vec<Vec<(usize, i64)>> {
        (1..=self.n)
            .map(|a| {
                self.nu[a - 1]
                    .iter()
                    .map(|&(l, j)| (l, self.vacancy(a, l) - j))
                    .collect()
            })
            .collect()
    }

    /// Smallest rigging of `nu^{(a)}`, counting an empty string of rigging 0.
    fn min_rigging(&self, a: usize) -> i64 {
        self.nu[a - 1].iter().map(|x| x.1).min().unwrap_or(0).min(0)
    }

    pub fn eps(&self, a: usize) -> usize {
        (-self.min_rigging(a)) as usize
    }

    pub fn phi(&self, a: usize) -> usize {
        let p = self.eps(a) as i64 + self.weight().pairing(a) as i64;
        p.max(0) as usize
    }

    /// Crystal operator `e_a`.
    pub fn e(&self, a: usize) -> Option<Self> {
        let x = self.min_rigging(a);
        if x >= 0 {
            return None;
        }
        let old = self.lengths_and_coriggings();
        let (k, &(l, _)) = self.nu[a - 1]
            .iter()
            .enumerate()
            .filter(|(_, s)| s.1 == x)
            .min_by_key(|(_, s)| s.0)?;
        let mut rc = self.clone();
        rc.nu[a - 1][k] = (l - 1, x + 1);
        rc.restore_coriggings(&old, (a, k));
        Some(rc)
    }

    /// Crystal operator `f_a`; `None` when the new rigging exceeds the new
    /// vacancy number.
    pub fn f(&self, a: usize) -> Option<Self> {
        let x = self.min_rigging(a);
        let old = self.lengths_and_coriggings();
        let pick = self.nu[a - 1]
            .iter()
            .enumerate()
            .filter(|(_, s)| s.1 == x)
            .max_by(|(i, s), (j, t)| s.0.cmp(&t.0).then(j.cmp(i)))
            .map(|(k, s)| (k, s.0));
        let mut rc = self.clone();
        let mut old = old;
        let k = match pick {
            Some((k, l)) => {
                rc.nu[a - 1][k] = (l + 1, x - 1);
                k
            }
            None => {
                // the implicit empty string
                rc.nu[a - 1].push((1, -1));
                old[a - 1].push((0, 0));
                rc.nu[a - 1].len() - 1
            }
        };
        let (len, rig) = rc.nu[a - 1][k];
        rc.restore_coriggings(&old, (a, k));
        if rig > rc.vacancy(a, len) {
            return None;
        }
        Some(rc)
    }

    /// Raises to a highest weight element, returning the raising path.
    pub fn high(&self) -> (Self, Vec<usize>) {
        let mut rc = self.clone();
        let mut path = Vec::new();
        'outer: loop {
            for a in 1..=self.n {
                if let Some(x) = rc.e(a) {
                    rc = x;
                    path.push(a);
                    continue 'outer;
                }
            }
            return (rc, path);
        }
    }

    /// Applies `f` along the reverse of a raising path.
    pub fn lower_along(&self, path: &[usize]) -> Option<Self> {
        let mut rc = self.clone();
        for &a in path.iter().rev() {
            rc = rc.f(a)?;
        }
        Some(rc)
    }

    /// Complements every rigging: `J -> P - J`.
    pub fn complement(&self) -> Self {
        let mut rc = self.clone();
        for a in 1..=self.n {
            let p = self.vacancies(a);
            for (s, pv) in rc.nu[a - 1].iter_mut().zip(p) {
                s.1 = pv - s.1;
            }
        }
        rc.normalize();
        rc
    }

    /// `cc(nu) = 1/2 sum_{a,b} A_{ab} sum_{j,k} min(j,k) m_j^{(a)} m_k^{(b)}`.
    pub fn cocharge_of_partitions(&self) -> i64 {
        let n = self.n;
        let mut total = 0i64;
        for a in 1..=n {
            for b in 1..=n {
                let c = cartan(n, a, b);
                if c == 0 {
                    continue;
                }
                let mut s = 0i64;
                for &(x, _) in &self.nu[a - 1] {
                    s += q_of(self.nu[b - 1].iter().map(|y| y.0), x);
                }
                total += c * s;
            }
        }
        total / 2
    }

    /// Cocharge: partition part plus the sum of all riggings.
    pub fn cocharge(&self) -> i64 {
        self.cocharge_of_partitions() + self.nu.iter().flatten().map(|x| x.1).sum::<i64>()
    }

    pub fn to_json(&self) -> RcJson {
        let mut l: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for a in 1..=self.n {
            for &s in &self.mu[a - 1] {
                *l.entry((a, s)).or_default() += 1;
            }
        }
        RcJson {
            n: self.n,
            l: l.into_iter().map(|((a, i), c)| [a, i, c]).collect(),
            nu: self
                .nu
                .iter()
                .map(|v| v.iter().map(|x| x.0).collect())
                .collect(),
            j: self
                .nu
                .iter()
                .map(|v| v.iter().map(|x| x.1).collect())
                .collect(),
        }
    }

    pub fn from_json(js: &RcJson) -> Result<Self> {
        let n = js.n;
        check_rank(n)?;
        let mut rc = Self::empty(n);
        for &[a, i, c] in &js.l {
            check_classical_index(n, a)?;
            for _ in 0..c {
                rc.add_mu(a, i);
            }
        }
        if js.nu.len() != n || js.j.len() != n {
            return Err(Error::Parse(format!("expected {} partitions", n)));
        }
        for a in 0..n {
            if js.nu[a].len() != js.j[a].len() {
                return Err(Error::Parse(format!(
                    "node {}: {} rows but {} riggings",
                    a + 1,
                    js.nu[a].len(),
                    js.j[a].len()
                )));
            }
            if js.nu[a].iter().any(|&x| x == 0) {
                return Err(Error::Parse("zero-length row".into()));
            }
            rc.nu[a] = js.nu[a].iter().copied().zip(js.j[a].iter().copied()).collect();
        }
        rc.normalize();
        Ok(rc)
    }

    /// Shorthand constructor from `(node, [(length, rigging)])` lists.
    pub fn from_strings(
        n: usize,
        factors: &[(usize, usize)],
        strings: &[&[(usize, i64)]],
    ) -> Self {
        let mut rc = Self::for_factors(n, factors);
        for (a, v) in strings.iter().enumerate() {
            rc.nu[a] = v.to_vec();
        }
        rc.normalize();
        rc
    }
}

/// JSON shape of a rigged configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RcJson {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: Vec<[usize; 3]>,
    pub nu: Vec<Vec<usize>>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<i64>>,
}

impl fmt::Display for RiggedConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in 1..=self.n {
            write!(f, "({}) ", a)?;
            if self.nu[a - 1].is_empty() {
                write!(f, "-")?;
            }
            let p = self.vacancies(a);
            let parts: Vec<String> = self.nu[a - 1]
                .iter()
                .zip(p)
                .map(|(&(l, j), v)| format!("{}[{}]{}", v, l, j))
                .collect();
            write!(f, "{}", parts.join(" "))?;
            if a < self.n {
                write!(f, " | ")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RiggedConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RC{:?} {}", self.factors(), self)
    }
}

/// Partitions of `m` as weakly decreasing row lists.
pub fn partitions(m: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=m.min(max)).rev() {
            cur.push(k);
            rec(m - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

/// Configurations `nu` (riggings zero) for factors `L` and target weight
/// `lambda` with every vacancy number of a row non-negative.
pub fn admissible_configurations(
    n: usize,
    factors: &[(usize, usize)],
    lambda: &Weight,
) -> Vec<RiggedConfig> {
    let base = RiggedConfig::for_factors(n, factors);
    let mut top = Weight::zero(n);
    for &(r, s) in factors {
        top = top + Weight::fundamental(n, r).scale(s as i32);
    }
    let sizes = match (top - lambda.clone()).to_root_coords() {
        Some(c) if c.iter().all(|&x| x >= 0) => c,
        _ => return Vec::new(),
    };
    let choices: Vec<Vec<Vec<usize>>> = sizes.iter().map(|&m| partitions(m as usize)).collect();
    let mut out = Vec::new();
    let mut rc = base;
    fn rec(
        a: usize,
        choices: &[Vec<Vec<usize>>],
        rc: &mut RiggedConfig,
        out: &mut Vec<RiggedConfig>,
    ) {
        let n = rc.n;
        if a > n {
            out.push(rc.clone());
            return;
        }
        for p in &choices[a - 1] {
            rc.nu[a - 1] = p.iter().map(|&l| (l, 0)).collect();
            // once every neighbour of some node b <= a is fixed, prune on b
            let ok = (1..=a).all(|b| {
                let fixed = neighbours(n, b).iter().all(|&c| c <= a);
                !fixed || rc.nu[b - 1].iter().all(|&(l, _)| rc.vacancy(b, l) >= 0)
            });
            if ok {
                rec(a + 1, choices, rc, out);
            }
        }
        rc.nu[a - 1].clear();
    }
    rec(1, &choices, &mut rc, &mut out);
    out
}

/// Multisets of size `m` from `0..=p`, as non-increasing lists.
fn rigging_choices(m: usize, p: i64) -> Vec<Vec<i64>> {
    fn rec(m: usize, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if m == 0 {
            out.push(cur.clone());
            return;
        }
        for x in (0..=max).rev() {
            cur.push(x);
            rec(m - 1, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p >= 0 || m == 0 {
        rec(m, p, &mut Vec::new(), &mut out);
    }
    out
}

/// All restricted rigged configurations of the given factors and weight.
pub fn enumerate_rc(n: usize, factors: &[(usize, usize)], lambda: &Weight) -> Vec<RiggedConfig> {
    let mut out = Vec::new();
    for cfg in admissible_configurations(n, factors, lambda) {
        // blocks of equal-length strings per node
        let mut blocks: Vec<(usize, usize, usize, i64)> = Vec::new(); // (node, length, mult, P)
        for a in 1..=n {
            let mut lens: Vec<usize> = cfg.nu[a - 1].iter().map(|x| x.0).collect();
            lens.dedup();
            for l in lens {
                let m = cfg.nu[a - 1].iter().filter(|x| x.0 == l).count();
                blocks.push((a, l, m, cfg.vacancy(a, l)));
            }
        }
        let options: Vec<Vec<Vec<i64>>> = blocks
            .iter()
            .map(|&(_, _, m, p)| rigging_choices(m, p))
            .collect();
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; blocks.len()];
        'odometer: loop {
            let mut rc = cfg.clone();
            for v in rc.nu.iter_mut() {
                v.clear();
            }
            for (k, &(a, l, _, _)) in blocks.iter().enumerate() {
                for &j in &options[k][idx[k]] {
                    rc.nu[a - 1].push((l, j));
                }
            }
            rc.normalize();
            out.push(rc);
            let mut k = 0;
            loop {
                if k == blocks.len() {
                    break 'odometer;
                }
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
    out.sort();
    out
}
