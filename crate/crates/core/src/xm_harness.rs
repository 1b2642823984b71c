//! One-dimensional sums `X`, fermionic formulas `M`, and the checks the CLI
//! exposes on top of them. Also holds the JSON element format and the tensor
//! spec parser.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::bijection::phi;
use crate::error::{Error, Result};
use crate::kr_crystal::{check_factor, is_spin_node, paths, KrElement, TensorElement};
use crate::rigged_config::{admissible_configurations, enumerate_rc};
use crate::rmatrix_energy::{intrinsic_energy, r_at};
use crate::root_data::{check_rank, dominant_weights_below, Weight};

/// Polynomial in `q` with integer coefficients; zero terms are never stored.
#[derive(Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QPoly(pub BTreeMap<i64, i64>);

impl QPoly {
    pub fn zero() -> Self {
        QPoly::default()
    }

    pub fn monomial(exp: i64) -> Self {
        let mut m = BTreeMap::new();
        m.insert(exp, 1);
        QPoly(m)
    }

    pub fn add_term(&mut self, exp: i64, c: i64) {
        let e = self.0.entry(exp).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Value at `q = 1`.
    pub fn at_one(&self) -> i64 {
        self.0.values().sum()
    }
}

impl Add for QPoly {
    type Output = QPoly;
    fn add(mut self, rhs: QPoly) -> QPoly {
        for (e, c) in rhs.0 {
            self.add_term(e, c);
        }
        self
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        let mut out = QPoly::zero();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &rhs.0 {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .map(|(&e, &c)| match (e, c) {
                (0, c) => c.to_string(),
                (1, 1) => "q".into(),
                (1, c) => format!("{}q", c),
                (e, 1) => format!("q^{}", e),
                (e, c) => format!("{}q^{}", c, e),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Gaussian binomial `[m + p choose m]_q`; zero when `p < 0` and `m > 0`.
pub fn qbinom(m: usize, p: i64) -> QPoly {
    if m == 0 {
        return QPoly::monomial(0);
    }
    if p < 0 {
        return QPoly::zero();
    }
    let p = p as usize;
    // row-by-row q-Pascal: [k, j] = [k-1, j-1] + q^j [k-1, j]
    let total = m + p;
    let mut row: Vec<QPoly> = vec![QPoly::monomial(0)];
    for k in 1..=total {
        let mut next = Vec::with_capacity(k + 1);
        for j in 0..=k {
            let mut v = QPoly::zero();
            if j >= 1 {
                v = v + row[j - 1].clone();
            }
            if j < k {
                v = v + &row[j] * &QPoly::monomial(j as i64);
            }
            next.push(v);
        }
        row = next;
    }
    row[m].clone()
}

/// Highest weight of the whole product, the largest weight that can occur.
pub fn top_weight(n: usize, factors: &[(usize, usize)]) -> Weight {
    factors.iter().fold(Weight::zero(n), |acc, &(r, s)| {
        acc + Weight::fundamental(n, r).scale(s as i32)
    })
}

/// `X(B, lambda) = sum_b q^{D(b)}` over paths of weight `lambda`.
pub fn x_polynomial(n: usize, factors: &[(usize, usize)], lambda: &Weight) -> Result<QPoly> {
    let mut x = QPoly::zero();
    for b in paths(n, factors, Some(lambda)) {
        x.add_term(intrinsic_energy(&b)?, 1);
    }
    Ok(x)
}

/// Fermionic formula: sum over admissible `nu` of
/// `q^{cc(nu)} prod [P + m choose m]`.
pub fn m_polynomial(n: usize, factors: &[(usize, usize)], lambda: &Weight) -> QPoly {
    let mut total = QPoly::zero();
    for cfg in admissible_configurations(n, factors, lambda) {
        let mut term = QPoly::monomial(cfg.cocharge_of_partitions());
        for a in 1..=n {
            let mut lens: Vec<usize> = cfg.nu[a - 1].iter().map(|x| x.0).collect();
            lens.dedup();
            for l in lens {
                let m = cfg.nu[a - 1].iter().filter(|x| x.0 == l).count();
                term = &term * &qbinom(m, cfg.vacancy(a, l));
            }
        }
        total = total + term;
    }
    total
}

/// `sum q^{cc}` over restricted rigged configurations, i.e. `M` without
/// the product formula.
pub fn rc_generating_function(n: usize, factors: &[(usize, usize)], lambda: &Weight) -> QPoly {
    let mut out = QPoly::zero();
    for rc in enumerate_rc(n, factors, lambda) {
        out.add_term(rc.cocharge(), 1);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct XmRow {
    pub weight: Vec<i32>,
    pub x: String,
    pub m: String,
    pub ok: bool,
}

/// Compares `X` and `M` for every dominant weight of the product. Weights are
/// reported in fundamental-weight coordinates.
pub fn verify_xm(n: usize, factors: &[(usize, usize)]) -> Result<Vec<XmRow>> {
    let mut rows = Vec::new();
    for lambda in dominant_weights_below(&top_weight(n, factors)) {
        let x = x_polynomial(n, factors, &lambda)?;
        let m = m_polynomial(n, factors, &lambda);
        if x.is_zero() && m.is_zero() {
            continue;
        }
        rows.push(XmRow {
            weight: lambda.to_fundamental(),
            ok: x == m,
            x: x.to_string(),
            m: m.to_string(),
        });
    }
    Ok(rows)
}

/// A path `b` and adjacent swap `i` with `Phi(b) != Phi(R_i b)`.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub element: ElementJson,
    pub detail: String,
}

/// Checks `Phi(R_i b) = Phi(b)` for every path and every adjacent `i`.
pub fn verify_rinv(n: usize, factors: &[(usize, usize)]) -> Result<Option<Counterexample>> {
    for b in paths(n, factors, None) {
        let lhs = phi(&b)?;
        for i in 1..factors.len() {
            let rb = r_at(&b, i)?;
            let rhs = phi(&rb)?;
            if lhs != rhs {
                return Ok(Some(Counterexample {
                    element: ElementJson::from_tensor(&b),
                    detail: format!("R_{}: {} vs {}", i, lhs, rhs),
                }));
            }
        }
    }
    Ok(None)
}

/// Checks `D(b) = cc(theta(Phi(b)))` on every path.
pub fn verify_stats(n: usize, factors: &[(usize, usize)]) -> Result<Option<Counterexample>> {
    for b in paths(n, factors, None) {
        let d = intrinsic_energy(&b)?;
        let cc = phi(&b)?.complement().cocharge();
        if d != cc {
            return Ok(Some(Counterexample {
                element: ElementJson::from_tensor(&b),
                detail: format!("energy {} but cocharge {}", d, cc),
            }));
        }
    }
    Ok(None)
}

/// Parses `"r,s;r,s;..."`, leftmost factor first.
pub fn parse_tensor(n: usize, spec: &str) -> Result<Vec<(usize, usize)>> {
    check_rank(n)?;
    let mut out = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (r, s) = part
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("factor `{}` is not `r,s`", part)))?;
        let r: usize = r.trim().parse().map_err(|_| Error::Parse(format!("bad r in `{}`", part)))?;
        let s: usize = s.trim().parse().map_err(|_| Error::Parse(format!("bad s in `{}`", part)))?;
        check_factor(n, r, s)?;
        out.push((r, s));
    }
    if out.is_empty() {
        return Err(Error::Parse("empty tensor spec".into()));
    }
    Ok(out)
}

/// JSON form of one KR factor. Columns are listed left to right, each read
/// bottom to top; spin columns are `±1` sign vectors.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FactorJson {
    pub r: usize,
    pub s: usize,
    pub columns: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ElementJson {
    pub n: usize,
    pub factors: Vec<FactorJson>,
}

impl ElementJson {
    pub fn from_tensor(b: &TensorElement) -> Self {
        ElementJson {
            n: b.n(),
            factors: b
                .0
                .iter()
                .map(|x| FactorJson {
                    r: x.r,
                    s: x.s,
                    columns: x.columns(),
                })
                .collect(),
        }
    }

    pub fn to_tensor(&self) -> Result<TensorElement> {
        check_rank(self.n)?;
        let n = self.n;
        let v = self
            .factors
            .iter()
            .map(|f| {
                if is_spin_node(n, f.r) {
                    KrElement::from_spin_columns(n, f.r, f.s, &f.columns)
                } else {
                    KrElement::from_columns(n, f.r, f.s, &f.columns)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if v.is_empty() {
            return Err(Error::InvalidElement("no factors".into()));
        }
        Ok(TensorElement(v))
    }
}
