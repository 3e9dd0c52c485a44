//! Vertex-operator evaluation of the limit series: interlacing operators
//! `Gamma_+-`, diagonal weights `Q_i` and `K_+-`, the blocks `A_+-`, and the
//! exchange relations between them.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{CPoly, CRational, ExponentVector, LaurentPoly, T_VARS};
use crate::partitions::{ColorVector, Partition2D};
use crate::qseries::QSeries;

/// Total degree in the graded variables (every variable after the t's).
fn degree(m: &ExponentVector) -> i64 {
    m.doubled()[T_VARS.min(m.arity())..].iter().map(|&e| e as i64).sum::<i64>() / 2
}

fn min_degree(p: &LaurentPoly) -> Option<i64> {
    p.terms().map(|(m, _)| degree(m)).min()
}

/// Variable layout `t1, t2, t3, q0..q_{r-1}, extra...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub r: usize,
    pub extra: usize,
}

impl Layout {
    pub fn arity(&self) -> usize {
        T_VARS + self.r + self.extra
    }

    fn unit(&self, pos: usize, doubled: i32) -> ExponentVector {
        let mut v = vec![0; self.arity()];
        v[pos] = doubled;
        ExponentVector::from_doubled(v)
    }

    pub fn one(&self) -> ExponentVector {
        ExponentVector::trivial(self.arity())
    }

    pub fn q(&self, i: usize) -> ExponentVector {
        self.unit(T_VARS + i, 2)
    }

    /// `q_[i,j]`; trivial when `i > j`.
    pub fn q_interval(&self, i: usize, j: usize) -> ExponentVector {
        (i..=j).fold(self.one(), |acc, k| acc.mul(&self.q(k)))
    }

    /// `c = kappa^(1/2)`.
    pub fn c(&self) -> ExponentVector {
        let mut v = vec![0; self.arity()];
        v[..T_VARS].iter_mut().for_each(|e| *e = 1);
        ExponentVector::from_doubled(v)
    }

    /// The `k`-th extra variable.
    pub fn extra(&self, k: usize) -> ExponentVector {
        assert!(k < self.extra, "layout has {} extra variables", self.extra);
        self.unit(T_VARS + self.r + k, 2)
    }
}

/// One letter of an operator word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    GammaPlus(ExponentVector),
    GammaMinus(ExponentVector),
    Q(usize),
    KPlus,
    KMinus,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::GammaPlus(x) => write!(f, "G+({x})"),
            Op::GammaMinus(x) => write!(f, "G-({x})"),
            Op::Q(i) => write!(f, "Q{i}"),
            Op::KPlus => f.write_str("K+"),
            Op::KMinus => f.write_str("K-"),
        }
    }
}

/// A word written left to right and applied right to left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSpec {
    layout: Layout,
    ops: Vec<Op>,
}

impl OperatorSpec {
    pub fn new(layout: Layout, ops: Vec<Op>) -> Result<Self> {
        for (i, op) in ops.iter().enumerate() {
            match op {
                Op::GammaPlus(x) | Op::GammaMinus(x) if x.arity() != layout.arity() => {
                    return Err(Error::ArityMismatch(x.arity(), layout.arity()));
                }
                Op::Q(j) if *j >= layout.r => {
                    return Err(Error::Usage(format!("Q{j} with r = {}", layout.r)));
                }
                Op::KPlus | Op::KMinus if ops.get(i + 1) != Some(&Op::Q(0)) => {
                    return Err(Error::Usage(format!("{op} must stand directly left of Q0")));
                }
                _ => {}
            }
        }
        Ok(OperatorSpec { layout, ops })
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Concatenation `self * other`.
    pub fn then(mut self, other: &OperatorSpec) -> Result<Self> {
        if self.layout != other.layout {
            return Err(Error::Usage("operator words over different layouts".into()));
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(self)
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        let mut v = v.clone();
        for op in self.ops.iter().rev() {
            v = v.apply(op, &self.layout);
        }
        v
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.ops.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

/// Sparse vector in the partition basis with polynomial coefficients.
///
/// Terms of graded degree above `order` are dropped.  With `lookahead`, the
/// size of the basis partition counts towards the degree, which is exact
/// whenever every state is weighted by some `Q_i` before it changes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateVector {
    order: usize,
    lookahead: bool,
    map: BTreeMap<Partition2D, LaurentPoly>,
}

impl StateVector {
    pub fn basis(lambda: Partition2D, order: usize, lookahead: bool) -> Self {
        let mut v = StateVector {
            order,
            lookahead,
            map: BTreeMap::new(),
        };
        v.add(lambda, LaurentPoly::one(), true);
        v
    }

    pub fn vacuum(order: usize, lookahead: bool) -> Self {
        Self::basis(Partition2D::empty(), order, lookahead)
    }

    pub fn coeff(&self, lambda: &Partition2D) -> LaurentPoly {
        self.map.get(lambda).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Partition2D, &LaurentPoly)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `pending`: the size of `lambda` is not yet part of the degree.
    fn add(&mut self, lambda: Partition2D, c: LaurentPoly, pending: bool) {
        let budget = self.order as i64 - if pending && self.lookahead { lambda.size() as i64 } else { 0 };
        let c = c.filter(|m| degree(m) <= budget);
        if c.is_zero() {
            return;
        }
        match self.map.get_mut(&lambda) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.map.remove(&lambda);
                }
            }
            None => {
                self.map.insert(lambda, c);
            }
        }
    }

    fn empty_like(&self) -> Self {
        StateVector {
            order: self.order,
            lookahead: self.lookahead,
            map: BTreeMap::new(),
        }
    }

    /// Multiply each basis vector by `m^|lambda|`.
    pub fn weight(&self, m: &ExponentVector) -> Self {
        let mut out = self.empty_like();
        for (l, c) in &self.map {
            out.add(l.clone(), c.shift(&m.scale(l.size() as i32)), false);
        }
        out
    }

    /// `Gamma_-(x)|lambda> = sum_{mu > lambda} x^(|mu|-|lambda|) |mu>`.
    pub fn gamma_minus(&self, x: &ExponentVector) -> Self {
        let dx = degree(x);
        let mut out = self.empty_like();
        for (l, c) in &self.map {
            let Some(dmin) = min_degree(c) else { continue };
            let room = self.order as i64 - dmin;
            let cap = if self.lookahead {
                room
            } else {
                assert!(dx > 0, "Gamma_-(x) with x of degree 0 needs lookahead truncation");
                l.size() as i64 + room / dx
            };
            for mu in interlacing_above(l, cap.max(0) as u32) {
                debug_assert!(mu.interlaces_above(l));
                let k = (mu.size() - l.size()) as i32;
                out.add(mu, c.shift(&x.scale(k)), true);
            }
        }
        out
    }

    /// `Gamma_+(x)|lambda> = sum_{mu < lambda} x^(|lambda|-|mu|) |mu>`.
    pub fn gamma_plus(&self, x: &ExponentVector) -> Self {
        let mut out = self.empty_like();
        for (l, c) in &self.map {
            for mu in interlacing_below(l) {
                debug_assert!(l.interlaces_above(&mu));
                let k = (l.size() - mu.size()) as i32;
                out.add(mu, c.shift(&x.scale(k)), true);
            }
        }
        out
    }

    pub fn apply(&self, op: &Op, layout: &Layout) -> Self {
        match op {
            Op::GammaPlus(x) => self.gamma_plus(x),
            Op::GammaMinus(x) => self.gamma_minus(x),
            Op::Q(i) => self.weight(&layout.q(*i)),
            Op::KPlus => self.weight(&layout.c()),
            Op::KMinus => self.weight(&layout.c().inverse()),
        }
    }

    /// Multiply every coefficient by `p`.
    pub fn scale_by(&self, p: &LaurentPoly) -> Self {
        let mut out = self.empty_like();
        for (l, c) in &self.map {
            out.add(l.clone(), c * p, false);
        }
        out
    }
}

fn partition(mut parts: Vec<u32>) -> Partition2D {
    while parts.last() == Some(&0) {
        parts.pop();
    }
    Partition2D::from_parts_unchecked(parts)
}

/// All `mu` with `mu_1 >= l_1 >= mu_2 >= l_2 >= ...` and `|mu| <= cap`.
fn interlacing_above(l: &Partition2D, cap: u32) -> Vec<Partition2D> {
    let lp = l.parts();
    if l.size() > cap {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(lp.len() + 1);
    fn rec(lp: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition2D>) {
        if i > lp.len() {
            out.push(partition(cur.clone()));
            return;
        }
        let lo = lp.get(i).copied().unwrap_or(0);
        let hi = if i == 0 { lo + left } else { lp[i - 1] };
        // later positions need at least their lower bounds
        let later: u32 = lp.iter().skip(i + 1).sum();
        for v in lo..=hi {
            if v + later > left {
                break;
            }
            cur.push(v);
            rec(lp, i + 1, left - v, cur, out);
            cur.pop();
        }
    }
    rec(lp, 0, cap, &mut cur, &mut out);
    out
}

/// All `mu` with `l_1 >= mu_1 >= l_2 >= mu_2 >= ...`.
fn interlacing_below(l: &Partition2D) -> Vec<Partition2D> {
    let lp = l.parts();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(lp.len());
    fn rec(lp: &[u32], i: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition2D>) {
        if i == lp.len() {
            out.push(partition(cur.clone()));
            return;
        }
        let lo = lp.get(i + 1).copied().unwrap_or(0);
        for v in lo..=lp[i] {
            cur.push(v);
            rec(lp, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(lp, 0, &mut cur, &mut out);
    out
}

/// `A-bar_+-(x) = Gamma(x) Q_{r-1} ... Gamma(x) Q_1 Gamma(x) K Q_0`; `K` omitted when `with_k` is false.
pub fn abar(layout: Layout, plus: bool, x: &ExponentVector, with_k: bool) -> Result<OperatorSpec> {
    let gamma = || if plus { Op::GammaPlus(x.clone()) } else { Op::GammaMinus(x.clone()) };
    let mut ops = Vec::new();
    for i in (1..layout.r).rev() {
        ops.push(gamma());
        ops.push(Op::Q(i));
    }
    ops.push(gamma());
    if with_k {
        ops.push(if plus { Op::KPlus } else { Op::KMinus });
    }
    ops.push(Op::Q(0));
    OperatorSpec::new(layout, ops)
}

/// `<0| A-bar_+(1)^N A-bar_-(1)^N |0>` as a polynomial in `c` and the `q_i`.
fn vacuum_expectation(r: usize, order: usize, with_k: bool) -> Result<LaurentPoly> {
    let layout = Layout { r, extra: 0 };
    let one = layout.one();
    let plus = abar(layout, true, &one, with_k)?;
    let minus = abar(layout, false, &one, with_k)?;
    let mut v = StateVector::vacuum(order, true);
    for _ in 0..order {
        v = minus.apply(&v);
    }
    for _ in 0..order {
        v = plus.apply(&v);
    }
    Ok(v.coeff(&Partition2D::empty()))
}

fn q_key(m: &ExponentVector) -> ColorVector {
    ColorVector(m.q_part().iter().map(|&e| e as i64 / 2).collect())
}

/// Limit series from the operator word, with coefficients in `Q(c)`.
pub fn z_limit(r: usize, order: usize) -> Result<QSeries<CRational>> {
    if r == 0 {
        return Err(Error::Usage("r must be at least 1".into()));
    }
    let p = vacuum_expectation(r, order, true)?;
    let mut by_key: BTreeMap<ColorVector, CPoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let [a, b, cc] = m.t_part();
        debug_assert!(a == b && b == cc);
        let entry = by_key.entry(q_key(m)).or_insert_with(CPoly::zero);
        *entry = &*entry + &CPoly::monomial(a as i64, c.clone());
    }
    let mut z = QSeries::zero(r, order);
    for (k, v) in by_key {
        z.add_to(k, CRational::from_poly(v));
    }
    Ok(z)
}

/// The same word with `K_+-` removed: the unsigned count of colored plane partitions.
pub fn z_plain(r: usize, order: usize) -> Result<QSeries<BigRational>> {
    if r == 0 {
        return Err(Error::Usage("r must be at least 1".into()));
    }
    let p = vacuum_expectation(r, order, false)?;
    let mut z = QSeries::zero(r, order);
    for (m, c) in p.terms() {
        z.add_to(q_key(m), c.clone());
    }
    Ok(z)
}

/// Outcome of an operator identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub basis_checked: usize,
    pub counterexample: Option<String>,
}

/// `sum_k m^k` truncated at graded degree `order`.
fn geometric(m: &ExponentVector, order: usize) -> LaurentPoly {
    let d = degree(m);
    assert!(d > 0, "geometric series needs positive degree");
    let mut p = LaurentPoly::zero();
    let mut k = 0;
    while k * d <= order as i64 {
        p = &p + &LaurentPoly::unit_monomial(m.scale(k as i32));
        k += 1;
    }
    p
}

fn truncated(p: &LaurentPoly, order: usize) -> LaurentPoly {
    p.filter(|m| degree(m) <= order as i64)
}

fn partitions_up_to(n: u32) -> Vec<Partition2D> {
    let mut out = vec![Partition2D::empty()];
    let mut frontier = vec![Partition2D::empty()];
    for _ in 0..n {
        let mut next = std::collections::BTreeSet::new();
        for l in &frontier {
            let p = l.parts();
            for i in 0..=p.len() {
                let prev = if i == 0 { u32::MAX } else { p[i - 1] };
                let cur = p.get(i).copied().unwrap_or(0);
                if cur < prev {
                    let mut q = p.to_vec();
                    if i == q.len() {
                        q.push(1);
                    } else {
                        q[i] += 1;
                    }
                    next.insert(partition(q));
                }
            }
        }
        frontier = next.into_iter().collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

/// Compare `lhs |lambda>` with `factor * rhs |lambda>` for all `|lambda| <= order`.
fn compare_words(
    name: &str,
    lhs: &OperatorSpec,
    rhs: &OperatorSpec,
    factor: &LaurentPoly,
    order: usize,
) -> CheckReport {
    let basis = partitions_up_to(order as u32);
    for lambda in &basis {
        let v = StateVector::basis(lambda.clone(), order, false);
        let l = lhs.apply(&v);
        let r = rhs.apply(&v).scale_by(factor);
        if l != r {
            let keys: std::collections::BTreeSet<_> = l.map.keys().chain(r.map.keys()).cloned().collect();
            let bad = keys.into_iter().find(|k| l.coeff(k) != r.coeff(k)).expect("some entry differs");
            return CheckReport {
                name: name.into(),
                passed: false,
                basis_checked: basis.len(),
                counterexample: Some(format!(
                    "on |{lambda}>, coefficient of |{bad}>: {} vs {}",
                    truncated(&l.coeff(&bad), order),
                    truncated(&r.coeff(&bad), order)
                )),
            };
        }
    }
    CheckReport {
        name: name.into(),
        passed: true,
        basis_checked: basis.len(),
        counterexample: None,
    }
}

/// `Gamma_+(a) Gamma_-(b) = (1 - ab)^-1 Gamma_-(b) Gamma_+(a)` with formal `a`, `b`,
/// on every `|lambda|` with `|lambda| <= order`, to joint degree `order`.
pub fn check_gamma_commutation(order: usize) -> Result<CheckReport> {
    let layout = Layout { r: 0, extra: 2 };
    let (a, b) = (layout.extra(0), layout.extra(1));
    let lhs = OperatorSpec::new(layout, vec![Op::GammaPlus(a.clone()), Op::GammaMinus(b.clone())])?;
    let rhs = OperatorSpec::new(layout, vec![Op::GammaMinus(b.clone()), Op::GammaPlus(a.clone())])?;
    let factor = geometric(&a.mul(&b), order);
    Ok(compare_words("gamma exchange", &lhs, &rhs, &factor, order))
}

/// `A_+(x) = Gamma_+(x q c) Gamma_+(x q_[0,r-2] c) ... Gamma_+(x q_0 c)`.
pub fn a_plus(layout: Layout, x: &ExponentVector) -> Result<OperatorSpec> {
    let c = layout.c();
    let ops = (0..layout.r)
        .rev()
        .map(|i| Op::GammaPlus(x.mul(&layout.q_interval(0, i)).mul(&c)))
        .collect();
    OperatorSpec::new(layout, ops)
}

/// `A_-(y) = Gamma_-(y) Gamma_-(y q_{r-1}) ... Gamma_-(y q_[1,r-1])`.
pub fn a_minus(layout: Layout, y: &ExponentVector) -> Result<OperatorSpec> {
    let r = layout.r;
    let ops = (0..r)
        .rev()
        .map(|j| Op::GammaMinus(y.mul(&layout.q_interval(j + 1, r - 1))))
        .collect();
    OperatorSpec::new(layout, ops)
}

/// `C_r(x, y) = prod_{i,j} (1 - x y q (q_[0,i] / q_[0,j]) c)^-1`, truncated.
pub fn c_factor(layout: Layout, x: &ExponentVector, y: &ExponentVector, order: usize) -> LaurentPoly {
    let r = layout.r;
    let q = layout.q_interval(0, r - 1);
    let mut p = LaurentPoly::one();
    for i in 0..r {
        for j in 0..r {
            let m = x
                .mul(y)
                .mul(&q)
                .mul(&layout.q_interval(0, i))
                .div(&layout.q_interval(0, j))
                .mul(&layout.c());
            p = truncated(&(&p * &geometric(&m, order)), order);
        }
    }
    p
}

/// `A_+(x) A_-(y) = C_r(x, y) A_-(y) A_+(x)` with formal `x`, `y`.
pub fn check_a_commutation(r: usize, order: usize) -> Result<CheckReport> {
    if r == 0 {
        return Err(Error::Usage("r must be at least 1".into()));
    }
    let layout = Layout { r, extra: 2 };
    let (x, y) = (layout.extra(0), layout.extra(1));
    let lhs = a_plus(layout, &x)?.then(&a_minus(layout, &y)?)?;
    let rhs = a_minus(layout, &y)?.then(&a_plus(layout, &x)?)?;
    let factor = c_factor(layout, &x, &y, order);
    Ok(compare_words(&format!("A exchange (r = {r})"), &lhs, &rhs, &factor, order))
}

/// Unsigned count of plane partitions of each size `<= order` from the plain word.
pub fn macmahon_transfer(order: usize) -> Result<Vec<u64>> {
    let z = z_plain(1, order)?;
    (0..=order as i64)
        .map(|n| {
            let v = z.coeff(&ColorVector(vec![n]));
            if !v.is_integer() {
                return Err(Error::Domain(format!("non-integral count {v}")));
            }
            u64::try_from(v.to_integer()).map_err(|e| Error::Domain(e.to_string()))
        })
        .collect()
}
