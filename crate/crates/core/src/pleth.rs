//! Closed-form generating functions as finite sums of bracket terms, their
//! q-expansions, and the plethystic exponential and logarithm.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laurent::{CPoly, CRational, ExponentVector, LaurentPoly, RationalPoint, T_VARS};
use crate::partitions::{ColorVector, IndexSemigroup};
use crate::qseries::{Coefficient, FixedPointTable, QSeries};

/// `[x y][x y^-1] = x + 1/x - y - 1/y` for a t-monomial `x` and a q-monomial `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DPair {
    pub x: ExponentVector,
    pub y: ExponentVector,
}

impl DPair {
    /// The pair `D(q^beta)` built on `x = kappa^(1/2)`.
    pub fn kappa(r: usize, beta: &[i32]) -> Self {
        DPair {
            x: ExponentVector::kappa_half(r, 1),
            y: q_mono(r, beta),
        }
    }

    /// The pair `[q^beta][q^-beta]` with trivial `x`.
    pub fn plain(r: usize, beta: &[i32]) -> Self {
        DPair {
            x: ExponentVector::trivial(T_VARS + r),
            y: q_mono(r, beta),
        }
    }

    fn adams(&self, n: u32) -> Self {
        DPair {
            x: self.x.scale(n as i32),
            y: self.y.scale(n as i32),
        }
    }
}

/// `scalar * lead * prod [num] / (prod [den] * prod D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketTerm {
    pub scalar: BigRational,
    pub lead: ExponentVector,
    pub num: Vec<ExponentVector>,
    pub den: Vec<ExponentVector>,
    pub pairs: Vec<DPair>,
}

impl BracketTerm {
    pub fn adams(&self, n: u32) -> Self {
        let s = n as i32;
        BracketTerm {
            scalar: self.scalar.clone(),
            lead: self.lead.scale(s),
            num: self.num.iter().map(|m| m.scale(s)).collect(),
            den: self.den.iter().map(|m| m.scale(s)).collect(),
            pairs: self.pairs.iter().map(|p| p.adams(n)).collect(),
        }
    }
}

impl fmt::Display for BracketTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.scalar)?;
        if !self.lead.is_trivial() {
            write!(f, "*{}", self.lead)?;
        }
        for m in &self.num {
            write!(f, "*[{m}]")?;
        }
        if self.den.is_empty() && self.pairs.is_empty() {
            return Ok(());
        }
        f.write_str("/(")?;
        let mut first = true;
        for m in &self.den {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "[{m}]")?;
        }
        for p in &self.pairs {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "D({}; {})", p.x, p.y)?;
        }
        f.write_str(")")
    }
}

/// A finite sum of bracket terms in `3 + r` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicSum {
    r: usize,
    terms: Vec<BracketTerm>,
}

impl SymbolicSum {
    pub fn zero(r: usize) -> Self {
        SymbolicSum { r, terms: Vec::new() }
    }

    pub fn new(r: usize, terms: Vec<BracketTerm>) -> Result<Self> {
        for t in &terms {
            let arities = std::iter::once(&t.lead)
                .chain(&t.num)
                .chain(&t.den)
                .chain(t.pairs.iter().flat_map(|p| [&p.x, &p.y]));
            for m in arities {
                if m.arity() != T_VARS + r {
                    return Err(Error::ArityMismatch(m.arity(), T_VARS + r));
                }
            }
            let t_only = t.num.iter().chain(&t.den).chain(t.pairs.iter().map(|p| &p.x));
            if t_only.into_iter().any(|m| m.q_part().iter().any(|&e| e != 0)) {
                return Err(Error::Domain(format!("q-dependent bracket outside a D pair in {t}")));
            }
            for p in &t.pairs {
                if p.y.t_part() != [0; 3] {
                    return Err(Error::Domain(format!("D pair with t-dependent y in {t}")));
                }
                if p.y.q_part().iter().sum::<i32>() <= 0 {
                    return Err(Error::Domain(format!("D pair without positive q-degree in {t}")));
                }
            }
        }
        Ok(SymbolicSum { r, terms })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn terms(&self) -> &[BracketTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn adams(&self, n: u32) -> Self {
        SymbolicSum {
            r: self.r,
            terms: self.terms.iter().map(|t| t.adams(n)).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::ArityMismatch(T_VARS + self.r, T_VARS + other.r));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(SymbolicSum { r: self.r, terms })
    }

    /// `sum_alpha q^alpha sum_{m in M_alpha} m` for t-monomials `m`.
    pub fn from_assignments(r: usize, assignments: &BTreeMap<ColorVector, Vec<ExponentVector>>) -> Result<Self> {
        let mut terms = Vec::new();
        for (alpha, ms) in assignments {
            let q = q_mono(r, &alpha.0.iter().map(|&a| a as i32).collect::<Vec<_>>());
            for m in ms {
                let t = lift_t(r, m)?;
                terms.push(BracketTerm {
                    scalar: <BigRational as One>::one(),
                    lead: t.mul(&q),
                    num: vec![],
                    den: vec![],
                    pairs: vec![],
                });
            }
        }
        SymbolicSum::new(r, terms)
    }
}

impl fmt::Display for SymbolicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

fn q_mono(r: usize, beta: &[i32]) -> ExponentVector {
    let mut v = vec![0; T_VARS + r];
    for (j, b) in beta.iter().enumerate() {
        v[T_VARS + j] = 2 * b;
    }
    ExponentVector::from_doubled(v)
}

/// `q_[i,j] = q_i ... q_j` as an exponent list.
fn q_interval(r: usize, i: usize, j: usize) -> Vec<i32> {
    (0..r).map(|k| i32::from(i <= k && k <= j)).collect()
}

/// Embed a t-monomial of any arity >= 3 into `3 + r` variables.
fn lift_t(r: usize, m: &ExponentVector) -> Result<ExponentVector> {
    if m.arity() < T_VARS || m.q_part().iter().any(|&e| e != 0) {
        return Err(Error::Domain(format!("{m} is not a t-monomial")));
    }
    let mut v = vec![0; T_VARS + r];
    v[..T_VARS].copy_from_slice(&m.t_part());
    Ok(ExponentVector::from_doubled(v))
}

fn t_only(m: &ExponentVector) -> ExponentVector {
    ExponentVector::from_doubled(m.t_part().to_vec())
}

/// `F(w1, w2, w3) = [w2 w3][w1 w3][w1 w2] / ([w1][w2][w3] D(q))`.
pub fn build_f(r: usize, w: [&ExponentVector; 3]) -> Result<SymbolicSum> {
    for m in w {
        if m.arity() != T_VARS + r || m.q_part().iter().any(|&e| e != 0) {
            return Err(Error::Domain(format!("{m} is not a t-monomial in 3 + {r} variables")));
        }
        if m.is_trivial() {
            return Err(Error::ZeroWeight);
        }
    }
    if w[0].mul(w[1]).mul(w[2]) != ExponentVector::kappa_half(r, 2) {
        return Err(Error::CalabiYauViolation);
    }
    let term = BracketTerm {
        scalar: <BigRational as One>::one(),
        lead: ExponentVector::trivial(T_VARS + r),
        num: vec![w[1].mul(w[2]), w[0].mul(w[2]), w[0].mul(w[1])],
        den: vec![w[0].clone(), w[1].clone(), w[2].clone()],
        pairs: vec![DPair::kappa(r, &vec![1; r])],
    };
    SymbolicSum::new(r, vec![term])
}

/// Chart triples `(t1^(r-k) t2^-k, t1^(-r+k+1) t2^(k+1), t3)` for `k < r`.
pub fn charts(r: usize) -> Vec<[ExponentVector; 3]> {
    let ri = r as i32;
    (0..ri)
        .map(|k| {
            [
                ExponentVector::t(r, ri - k, -k, 0),
                ExponentVector::t(r, -ri + k + 1, k + 1, 0),
                ExponentVector::t(r, 0, 0, 1),
            ]
        })
        .collect()
}

/// `F_r = sum_k F(chart k)`.
pub fn build_f_r(r: usize) -> Result<SymbolicSum> {
    charts(r).iter().try_fold(SymbolicSum::zero(r), |acc, [a, b, c]| {
        acc.plus(&build_f(r, [a, b, c])?)
    })
}

/// `[t1 t2]/[t3] * sum_{0<i<=j<r} (q_[i,j] + q_[i,j]^-1) / D(q)`.
pub fn build_f_col(r: usize) -> Result<SymbolicSum> {
    let mut terms = Vec::new();
    for i in 1..r {
        for j in i..r {
            let q = q_mono(r, &q_interval(r, i, j));
            for lead in [q.clone(), q.inverse()] {
                terms.push(BracketTerm {
                    scalar: <BigRational as One>::one(),
                    lead,
                    num: vec![ExponentVector::t(r, 1, 1, 0)],
                    den: vec![ExponentVector::t(r, 0, 0, 1)],
                    pairs: vec![DPair::kappa(r, &vec![1; r])],
                });
            }
        }
    }
    SymbolicSum::new(r, terms)
}

/// `prefactor * (r + sum_{0<i<=j<r} (q_[i,j] + q_[i,j]^-1)) / pair`.
fn young_sum(r: usize, lead_t: ExponentVector, pair: DPair) -> Result<SymbolicSum> {
    let mut terms = vec![BracketTerm {
        scalar: BigRational::from_integer((-(r as i64)).into()),
        lead: lead_t.clone(),
        num: vec![],
        den: vec![],
        pairs: vec![pair.clone()],
    }];
    for i in 1..r {
        for j in i..r {
            let q = q_mono(r, &q_interval(r, i, j));
            for lead in [q.clone(), q.inverse()] {
                terms.push(BracketTerm {
                    scalar: -<BigRational as One>::one(),
                    lead: lead_t.mul(&lead),
                    num: vec![],
                    den: vec![],
                    pairs: vec![pair.clone()],
                });
            }
        }
    }
    SymbolicSum::new(r, terms)
}

/// `-kappa^(1/2)/D(q) * (r + sum_{0<i<=j<r} (q_[i,j] + q_[i,j]^-1))`.
pub fn build_f_limit(r: usize) -> Result<SymbolicSum> {
    young_sum(r, ExponentVector::kappa_half(r, 1), DPair::kappa(r, &vec![1; r]))
}

/// `-kappa^(1/2)/D(q) * sum_{i,j<r} q_[0,i] / q_[0,j]`.
pub fn build_f_limit_double(r: usize) -> Result<SymbolicSum> {
    let mut terms = Vec::new();
    for i in 0..r {
        for j in 0..r {
            let lead = q_mono(r, &q_interval(r, 0, i)).div(&q_mono(r, &q_interval(r, 0, j)));
            terms.push(BracketTerm {
                scalar: -<BigRational as One>::one(),
                lead: ExponentVector::kappa_half(r, 1).mul(&lead),
                num: vec![],
                den: vec![],
                pairs: vec![DPair::kappa(r, &vec![1; r])],
            });
        }
    }
    SymbolicSum::new(r, terms)
}

/// `-1/([q][q^-1]) * (r + sum_{0<i<=j<r} (q_[i,j] + q_[i,j]^-1))`.
pub fn build_f_num(r: usize) -> Result<SymbolicSum> {
    young_sum(r, ExponentVector::trivial(T_VARS + r), DPair::plain(r, &vec![1; r]))
}

/// Named closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formula {
    F,
    Fr,
    Fcol,
    Fnum,
    Flim,
    /// `F_r + F_col`.
    Main,
}

impl Formula {
    pub fn build(self, r: usize) -> Result<SymbolicSum> {
        match self {
            Formula::F => {
                let [a, b, c] = [ExponentVector::t(r, 1, 0, 0), ExponentVector::t(r, 0, 1, 0), ExponentVector::t(r, 0, 0, 1)];
                build_f(r, [&a, &b, &c])
            }
            Formula::Fr => build_f_r(r),
            Formula::Fcol => build_f_col(r),
            Formula::Fnum => build_f_num(r),
            Formula::Flim => build_f_limit(r),
            Formula::Main => build_f_r(r)?.plus(&build_f_col(r)?),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Formula::F => "F",
            Formula::Fr => "Fr",
            Formula::Fcol => "Fcol",
            Formula::Fnum => "Fnum",
            Formula::Flim => "Flim",
            Formula::Main => "main",
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F" => Ok(Formula::F),
            "Fr" => Ok(Formula::Fr),
            "Fcol" => Ok(Formula::Fcol),
            "Fnum" => Ok(Formula::Fnum),
            "Flim" => Ok(Formula::Flim),
            "main" => Ok(Formula::Main),
            _ => Err(Error::Usage(format!("unknown formula {s:?}; expected F, Fr, Fcol, Fnum, Flim or main"))),
        }
    }
}

/// How t-dependent factors become series coefficients.
pub trait Evaluator<C: Coefficient>: Sync {
    /// Value of a t-monomial given by doubled exponents.
    fn monomial(&self, t: [i32; 3]) -> Result<C>;
    /// Value of `[t]`; must be invertible when used as a denominator.
    fn bracket(&self, t: [i32; 3]) -> Result<C>;
    /// `num / den`.
    fn divide(&self, num: &C, den: &C) -> Result<C>;
}

/// Evaluation at a rational point.
#[derive(Clone, Debug)]
pub struct PointEval(pub RationalPoint);

impl Evaluator<BigRational> for PointEval {
    fn monomial(&self, t: [i32; 3]) -> Result<BigRational> {
        Ok(self.0.monomial_value(&ExponentVector::from_doubled(t.to_vec())))
    }

    fn bracket(&self, t: [i32; 3]) -> Result<BigRational> {
        self.0.bracket_value(&ExponentVector::from_doubled(t.to_vec()))
    }

    fn divide(&self, num: &BigRational, den: &BigRational) -> Result<BigRational> {
        if Zero::is_zero(den) {
            return Err(Error::BracketVanishes(format!("denominator vanishes at {}", self.0)));
        }
        Ok(num / den)
    }
}

/// Expression in `c = kappa^(1/2)`; only powers of `kappa` are admissible.
#[derive(Clone, Copy, Debug, Default)]
pub struct CRingEval;

fn kappa_exponent(t: [i32; 3]) -> Result<i64> {
    if t[0] == t[1] && t[1] == t[2] {
        Ok(t[0] as i64)
    } else {
        Err(Error::NonKappaContent(ExponentVector::from_doubled(t.to_vec()).to_string()))
    }
}

impl Evaluator<CRational> for CRingEval {
    fn monomial(&self, t: [i32; 3]) -> Result<CRational> {
        Ok(CRational::c_pow(kappa_exponent(t)?))
    }

    fn bracket(&self, t: [i32; 3]) -> Result<CRational> {
        let e = kappa_exponent(t)?;
        if e % 2 != 0 {
            return Err(Error::HalfLattice(ExponentVector::from_doubled(t.to_vec()).to_string()));
        }
        Ok(CRational::from_poly(CPoly::from_terms([
            (e / 2, <BigRational as One>::one()),
            (-e / 2, -<BigRational as One>::one()),
        ])))
    }

    fn divide(&self, num: &CRational, den: &CRational) -> Result<CRational> {
        if den.is_zero() {
            return Err(Error::BracketVanishes("denominator vanishes identically in c".into()));
        }
        Ok(num * &den.recip()?)
    }
}

/// Symbolic Laurent polynomials in `t1, t2, t3`; t-denominators are rejected.
#[derive(Clone, Copy, Debug, Default)]
pub struct SymbolicEval;

impl Evaluator<LaurentPoly> for SymbolicEval {
    fn monomial(&self, t: [i32; 3]) -> Result<LaurentPoly> {
        Ok(LaurentPoly::unit_monomial(ExponentVector::from_doubled(t.to_vec())))
    }

    fn bracket(&self, t: [i32; 3]) -> Result<LaurentPoly> {
        LaurentPoly::bracket(&ExponentVector::from_doubled(t.to_vec()))
    }

    fn divide(&self, num: &LaurentPoly, den: &LaurentPoly) -> Result<LaurentPoly> {
        if *den == LaurentPoly::one() {
            return Ok(num.clone());
        }
        Err(Error::Domain(format!("cannot divide by {den} symbolically")))
    }
}

fn t_factor<C: Coefficient>(t: &BracketTerm, ev: &impl Evaluator<C>) -> Result<C> {
    let mut num = ev.monomial(t.lead.t_part())?.scale(&t.scalar);
    for m in &t.num {
        num = num.mul(&ev.bracket(m.t_part())?);
    }
    let mut den = C::one();
    for m in &t.den {
        den = den.mul(&ev.bracket(m.t_part())?);
    }
    if t.den.is_empty() {
        Ok(num)
    } else {
        ev.divide(&num, &den)
    }
}

fn q_key(m: &ExponentVector) -> Result<ColorVector> {
    m.q_part()
        .iter()
        .map(|&e| {
            if e % 2 == 0 {
                Ok(e as i64 / 2)
            } else {
                Err(Error::HalfLattice(m.to_string()))
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(ColorVector)
}

/// `1/D = -sum_{k>=1} h_{k-1}(x, 1/x) y^k`; returns `[-h_0, -h_1, ...]` up to `len`.
fn pair_coefficients<C: Coefficient>(x: &ExponentVector, len: usize, ev: &impl Evaluator<C>) -> Result<Vec<C>> {
    let xv = ev.monomial(x.t_part())?;
    let xi = ev.monomial(x.inverse().t_part())?;
    let mut out = Vec::with_capacity(len);
    // h_m = x h_{m-1} + x^-m
    let mut h = C::one();
    let mut xi_pow = C::one();
    for m in 0..len {
        if m > 0 {
            xi_pow = xi_pow.mul(&xi);
            h = xv.mul(&h).add(&xi_pow);
        }
        out.push(h.neg());
    }
    Ok(out)
}

/// q-expansion of one term, truncated at total degree `order`.
pub fn expand_term<C: Coefficient>(
    t: &BracketTerm,
    r: usize,
    order: usize,
    ev: &impl Evaluator<C>,
) -> Result<QSeries<C>> {
    let mut out = QSeries::zero(r, order);
    let lead = q_key(&t.lead)?;
    let budget = order as i64 - lead.total();
    if budget < 0 {
        return Ok(out);
    }
    let mut partial: Vec<(ColorVector, C)> = vec![(ColorVector::zero(r), C::one())];
    for p in &t.pairs {
        let beta = q_key(&p.y)?;
        let b = beta.total();
        let kmax = (budget / b) as usize;
        let coeffs = pair_coefficients(&p.x, kmax, ev)?;
        let mut next = Vec::new();
        for (key, c) in &partial {
            let mut k_key = key.clone();
            for coeff in &coeffs {
                k_key = k_key.add(&beta);
                if k_key.total() > budget {
                    break;
                }
                next.push((k_key.clone(), c.mul(coeff)));
            }
        }
        partial = next;
    }
    if partial.is_empty() {
        return Ok(out);
    }
    let f = t_factor(t, ev)?;
    for (key, c) in partial {
        out.add_to(key.add(&lead), c.mul(&f));
    }
    Ok(out)
}

/// Expansion of a whole sum.
pub fn expand<C: Coefficient>(s: &SymbolicSum, order: usize, ev: &impl Evaluator<C>) -> Result<QSeries<C>> {
    s.terms.iter().try_fold(QSeries::zero(s.r, order), |acc, t| {
        acc.try_add(&expand_term(t, s.r, order, ev)?)
    })
}

/// `exp(sum_{n=1}^N (1/n) expand(adams(S, n)))`.
pub fn pexp_eval<C: Coefficient>(s: &SymbolicSum, order: usize, ev: &impl Evaluator<C>) -> Result<QSeries<C>> {
    let levels = (1..=order as u32)
        .into_par_iter()
        .map(|n| Ok(expand(&s.adams(n), order, ev)?.scale(&BigRational::new(1.into(), n.into()))))
        .collect::<Result<Vec<_>>>()?;
    let mut arg = QSeries::zero(s.r, order);
    for l in &levels {
        arg = arg.try_add(l)?;
    }
    arg.exp()
}

pub fn mobius(n: u32) -> i32 {
    let mut n = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// `sum_{n=1}^N (mu(n)/n) psi_n log zs(n)`, where `zs(n)` is the series with its
/// t-dependence already raised to the n-th Adams power; `psi_n` then only dilates q.
pub fn plog<C: Coefficient>(
    zs: impl Fn(u32) -> Result<QSeries<C>> + Sync,
    r: usize,
    order: usize,
) -> Result<QSeries<C>> {
    let levels = (1..=order as u32)
        .into_par_iter()
        .filter(|&n| mobius(n) != 0)
        .map(|n| {
            let z = zs(n)?;
            if z.r() != r || z.order() != order {
                return Err(Error::Usage(format!("family member {n} has the wrong shape")));
            }
            let coeff = BigRational::new(mobius(n).into(), n.into());
            Ok(z.log()?.dilate(n).scale(&coeff))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = QSeries::zero(r, order);
    for l in &levels {
        out = out.try_add(l)?;
    }
    Ok(out)
}

/// Complete homogeneous polynomials `h_0..=h_len` of a multiset of monomials.
fn complete_homogeneous(ms: &[LaurentPoly], len: usize) -> Vec<LaurentPoly> {
    let mut h = vec![LaurentPoly::zero(); len + 1];
    h[0] = LaurentPoly::one();
    for m in ms {
        for l in 1..=len {
            let add = m * &h[l - 1];
            h[l] = &h[l] + &add;
        }
    }
    h
}

/// `1 + sum_alpha q^alpha sum_{lambda in P_I(alpha)} prod_beta h_{l_beta}(M_beta)`.
pub fn pexp_direct(
    assignments: &BTreeMap<ColorVector, Vec<ExponentVector>>,
    i: &IndexSemigroup,
    order: usize,
) -> Result<QSeries<LaurentPoly>> {
    let r = i.r();
    if order > i.bound() {
        return Err(Error::Usage(format!("order {order} exceeds the index set bound {}", i.bound())));
    }
    let mut z = QSeries::one(r, order);
    for (beta, ms) in assignments {
        if beta.is_zero() || !beta.is_nonnegative() || !i.contains(beta)? {
            return Err(Error::Domain(format!("{:?} is not in the index set", beta.0)));
        }
        let b = beta.total() as usize;
        if b > order {
            continue;
        }
        let monomials = ms.iter().map(|m| Ok(LaurentPoly::unit_monomial(t_only(&lift_t(r, m)?)))).collect::<Result<Vec<_>>>()?;
        let h = complete_homogeneous(&monomials, order / b);
        let mut factor = QSeries::zero(r, order);
        let mut key = ColorVector::zero(r);
        for hl in h {
            factor.add_to(key.clone(), hl);
            key = key.add(beta);
        }
        z = z.try_mul(&factor)?;
    }
    Ok(z)
}

/// `h_alpha = (plog Z - expand F_r)_alpha / ([t1 t2]/[t3])` for every alpha, at `pt`.
pub fn rigidity_series(table: &FixedPointTable, pt: &RationalPoint, order: usize) -> Result<QSeries<BigRational>> {
    let r = table.r();
    let logz = plog(|n| table.z_point(&pt.power(n), order), r, order)?;
    let fr = expand(&build_f_r(r)?, order, &PointEval(pt.clone()))?;
    let diff = logz.try_sub(&fr)?;
    let num = pt.bracket_value(&ExponentVector::t(0, 1, 1, 0))?;
    let den = pt.bracket_value(&ExponentVector::t(0, 0, 0, 1))?;
    if Zero::is_zero(&num) || Zero::is_zero(&den) {
        return Err(Error::DivisionByZero(format!("[t1 t2]/[t3] is degenerate at {pt}")));
    }
    let ratio = num / den;
    Ok(diff.scale(&ratio.recip()))
}

/// `h_alpha` at two points sharing `s1 s2 s3`.
pub fn rigidity_h(
    table: &FixedPointTable,
    alpha: &ColorVector,
    pts: (&RationalPoint, &RationalPoint),
    order: usize,
) -> Result<(BigRational, BigRational)> {
    if pts.0.c() != pts.1.c() {
        return Err(Error::Domain("points must share s1 s2 s3".into()));
    }
    let a = rigidity_series(table, pts.0, order)?.coeff(alpha);
    let b = rigidity_series(table, pts.1, order)?.coeff(alpha);
    Ok((a, b))
}

/// Signed count of colored plane partitions from the closed form:
/// `PExp(F_num)` followed by `q0 -> -q0`.
pub fn numerical_closed_form(r: usize, order: usize) -> Result<QSeries<BigRational>> {
    let unit = RationalPoint::from_ints([(1, 1), (1, 1), (1, 1)])?;
    Ok(pexp_eval(&build_f_num(r)?, order, &PointEval(unit))?.flip_q0())
}

/// `true` when every coefficient sits at a key with nonnegative entries inside `I`.
pub fn supported_on(z: &QSeries<impl Coefficient>, i: &IndexSemigroup) -> Result<bool> {
    for (a, _) in z.coeffs() {
        if a.is_zero() {
            continue;
        }
        if !a.is_nonnegative() || !i.contains(a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertex::{ahat_eval, WeightMultiset};
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cv(v: &[i64]) -> ColorVector {
        ColorVector(v.to_vec())
    }

    fn pt() -> RationalPoint {
        RationalPoint::from_ints([(2, 1), (3, 1), (5, 1)]).unwrap()
    }

    fn cpoly(terms: &[(i64, i64)]) -> CRational {
        CRational::from_poly(CPoly::from_terms(terms.iter().map(|&(e, c)| (e, rat(c, 1)))))
    }

    #[test]
    fn calabi_yau_check() {
        let [a, b, _] = [ExponentVector::t(1, 1, 0, 0), ExponentVector::t(1, 0, 1, 0), ExponentVector::t(1, 0, 0, 1)];
        let bad = ExponentVector::t(1, 0, 0, 2);
        assert_eq!(build_f(1, [&a, &b, &bad]), Err(Error::CalabiYauViolation));
    }

    #[test]
    fn build_f_symmetric() {
        let w = [ExponentVector::t(1, 1, 0, 0), ExponentVector::t(1, 0, 1, 0), ExponentVector::t(1, 0, 0, 1)];
        let e1 = expand(&build_f(1, [&w[0], &w[1], &w[2]]).unwrap(), 5, &PointEval(pt())).unwrap();
        let e2 = expand(&build_f(1, [&w[2], &w[0], &w[1]]).unwrap(), 5, &PointEval(pt())).unwrap();
        assert_eq!(e1, e2);
    }

    #[test]
    fn charts_multiply_to_kappa() {
        for r in 1..=4 {
            for [a, b, c] in charts(r) {
                assert_eq!(a.mul(&b).mul(&c), ExponentVector::kappa_half(r, 2));
            }
        }
        let c2 = charts(2);
        assert_eq!(c2[0][0], ExponentVector::t(2, 2, 0, 0));
        assert_eq!(c2[0][1], ExponentVector::t(2, -1, 1, 0));
        assert_eq!(c2[1][0], ExponentVector::t(2, 1, -1, 0));
        assert_eq!(c2[1][1], ExponentVector::t(2, 0, 2, 0));
    }

    #[test]
    fn f_first_coefficient() {
        let f = expand(&Formula::F.build(1).unwrap(), 3, &PointEval(pt())).unwrap();
        let w = WeightMultiset(vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        assert_eq!(f.coeff(&cv(&[1])), -ahat_eval(&w, &pt()).unwrap());
        assert_eq!(f.constant_term(), rat(0, 1));
    }

    #[test]
    fn f_col_examples() {
        assert!(build_f_col(1).unwrap().is_empty());
        assert_eq!(build_f_col(3).unwrap().len(), 6);
        let e = expand(&build_f_col(2).unwrap(), 4, &PointEval(pt())).unwrap();
        // -[t1 t2]/[t3] at (2,3,5): -(6 - 1/6)/(5 - 1/5) = -175/144
        assert_eq!(e.coeff(&cv(&[1, 0])), rat(-175, 144));
    }

    #[test]
    fn inverse_pair_expansion() {
        let r = 1;
        let one_over_d = SymbolicSum::new(
            r,
            vec![BracketTerm {
                scalar: <BigRational as One>::one(),
                lead: ExponentVector::trivial(4),
                num: vec![],
                den: vec![],
                pairs: vec![DPair::kappa(r, &[1])],
            }],
        )
        .unwrap();
        let e = expand(&one_over_d, 4, &CRingEval).unwrap();
        assert_eq!(e.coeff(&cv(&[1])), cpoly(&[(0, -1)]));
        assert_eq!(e.coeff(&cv(&[2])), cpoly(&[(1, -1), (-1, -1)]));
        assert_eq!(e.coeff(&cv(&[3])), cpoly(&[(2, -1), (0, -1), (-2, -1)]));
        // D(q) = c + 1/c - q - 1/q; multiply back
        let c_plus = cpoly(&[(1, 1), (-1, 1)]);
        let mut prod = QSeries::zero(1, 4);
        for (a, v) in e.coeffs() {
            prod.add_to(a.clone(), v.mul(&c_plus));
            prod.add_to(a.add(&cv(&[1])), v.neg());
            prod.add_to(a.sub(&cv(&[1])), v.neg());
        }
        // exact up to degree 3; the top degree lacks its q^5 partner
        let low: Vec<_> = prod.coeffs().filter(|(a, _)| a.total() < 4).collect();
        assert_eq!(low, vec![(&cv(&[0]), &CRational::one())]);
    }

    #[test]
    fn limit_forms() {
        let e = expand(&build_f_limit(1).unwrap(), 3, &CRingEval).unwrap();
        assert_eq!(e.coeff(&cv(&[1])), cpoly(&[(1, 1)]));
        assert_eq!(e.coeff(&cv(&[2])), cpoly(&[(2, 1), (0, 1)]));
        for r in 2..=3 {
            assert_eq!(
                expand(&build_f_limit(r).unwrap(), 6, &CRingEval).unwrap(),
                expand(&build_f_limit_double(r).unwrap(), 6, &CRingEval).unwrap()
            );
        }
    }

    #[test]
    fn numerical_r1() {
        let unit = RationalPoint::from_ints([(1, 1), (1, 1), (1, 1)]).unwrap();
        let e = expand(&build_f_num(1).unwrap(), 4, &PointEval(unit)).unwrap().flip_q0();
        // q/(1-q)^2 at q -> -q is -q/(1+q)^2
        let want: Vec<_> = [-1, 2, -3, 4].iter().map(|&n| rat(n, 1)).collect();
        let got: Vec<_> = (1..=4).map(|k| e.coeff(&cv(&[k]))).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn non_kappa_content() {
        let f = build_f_r(1).unwrap();
        assert!(matches!(expand(&f, 2, &CRingEval), Err(Error::NonKappaContent(_))));
    }

    #[test]
    fn vanishing_bracket() {
        let bad = RationalPoint::from_ints([(1, 1), (3, 1), (5, 1)]).unwrap();
        assert!(matches!(
            expand(&build_f_r(1).unwrap(), 2, &PointEval(bad)),
            Err(Error::BracketVanishes(_))
        ));
    }

    #[test]
    fn mobius_values() {
        let got: Vec<i32> = (1..=12).map(mobius).collect();
        assert_eq!(got, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn pexp_of_zero_and_single_monomial() {
        assert_eq!(pexp_eval(&SymbolicSum::zero(1), 4, &SymbolicEval).unwrap(), QSeries::one(1, 4));
        let m = ExponentVector::t(0, 1, 0, 0);
        let assign: BTreeMap<_, _> = [(cv(&[1]), vec![m.clone()])].into_iter().collect();
        let s = SymbolicSum::from_assignments(1, &assign).unwrap();
        let z = pexp_eval(&s, 3, &SymbolicEval).unwrap();
        // PExp(t1 q) = 1/(1 - t1 q)
        assert_eq!(z.constant_term(), LaurentPoly::one());
        for k in 1..=3 {
            assert_eq!(z.coeff(&cv(&[k])), LaurentPoly::unit_monomial(ExponentVector::t(0, k as i32, 0, 0)));
        }
        let i = IndexSemigroup::new(1, 3);
        assert_eq!(pexp_direct(&assign, &i, 3).unwrap(), z);
    }

    #[test]
    fn pexp_direct_rejects_off_index() {
        let i = IndexSemigroup::new(2, 4);
        let assign: BTreeMap<_, _> = [(cv(&[0, 1]), vec![ExponentVector::t(0, 1, 0, 0)])].into_iter().collect();
        assert!(matches!(pexp_direct(&assign, &i, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn rigidity_single_box() {
        let table = FixedPointTable::new(2, 3).unwrap();
        let p = pt();
        let h = rigidity_series(&table, &p, 3).unwrap();
        assert_eq!(h.coeff(&cv(&[1, 0])), rat(-1, 1));
    }

    #[test]
    fn plog_single_monomial_round_trip() {
        let s = SymbolicSum::new(
            1,
            vec![BracketTerm {
                scalar: rat(3, 2),
                lead: ExponentVector::from_doubled(vec![2, 0, 0, 2]),
                num: vec![],
                den: vec![],
                pairs: vec![],
            }],
        )
        .unwrap();
        let p = pt();
        let back = plog(|n| pexp_eval(&s, 5, &PointEval(p.power(n))), 1, 5).unwrap();
        assert_eq!(back, expand(&s, 5, &PointEval(p)).unwrap());
        assert_eq!(plog(|_| Ok(QSeries::<BigRational>::one(1, 5)), 1, 5).unwrap(), QSeries::zero(1, 5));
    }

    #[test]
    fn closed_forms_match_enumeration_small() {
        for r in 1..=3 {
            let table = FixedPointTable::new(r, 4).unwrap();
            let z = table.z_point(&pt(), 4).unwrap();
            let f = pexp_eval(&Formula::Main.build(r).unwrap(), 4, &PointEval(pt())).unwrap();
            assert_eq!(z, f, "r = {r}");
            let zl = table.z_limit(4).unwrap();
            assert_eq!(zl, pexp_eval(&build_f_limit(r).unwrap(), 4, &CRingEval).unwrap(), "r = {r}");
            assert_eq!(table.z_numerical(4).unwrap(), numerical_closed_form(r, 4).unwrap(), "r = {r}");
        }
    }

    fn arb_assignment() -> impl Strategy<Value = BTreeMap<ColorVector, Vec<ExponentVector>>> {
        let keys = vec![cv(&[1, 0]), cv(&[1, 1]), cv(&[2, 1]), cv(&[2, 2]), cv(&[3, 1])];
        prop::collection::vec(
            (0..keys.len(), prop::collection::vec((-2i32..=2, -2i32..=2, -2i32..=2), 1..3)),
            1..4,
        )
        .prop_map(move |entries| {
            let mut out: BTreeMap<ColorVector, Vec<ExponentVector>> = BTreeMap::new();
            for (k, ms) in entries {
                out.entry(keys[k].clone())
                    .or_default()
                    .extend(ms.into_iter().map(|(a, b, c)| ExponentVector::t(0, a, b, c)));
            }
            out
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn direct_matches_eval(assign in arb_assignment()) {
            let i = IndexSemigroup::new(2, 5);
            let s = SymbolicSum::from_assignments(2, &assign).unwrap();
            prop_assert_eq!(pexp_direct(&assign, &i, 5).unwrap(), pexp_eval(&s, 5, &SymbolicEval).unwrap());
        }

        #[test]
        fn pexp_multiplicative(a in arb_assignment(), b in arb_assignment()) {
            let sa = SymbolicSum::from_assignments(2, &a).unwrap();
            let sb = SymbolicSum::from_assignments(2, &b).unwrap();
            let lhs = pexp_eval(&sa.plus(&sb).unwrap(), 5, &SymbolicEval).unwrap();
            let rhs = pexp_eval(&sa, 5, &SymbolicEval).unwrap().try_mul(&pexp_eval(&sb, 5, &SymbolicEval).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
