//! Fixed-point data of the colored vertex: characters, virtual tangent
//! spaces, their `mu_r`-invariant parts, the weight pairing `W(pi)` and the
//! symmetrized localization weight `a(pi) = prod_{w in W} [kappa/w] / [w]`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{CPoly, CRational, ExponentVector, LaurentPoly, RationalPoint};
use crate::partitions::PlanePartition;

/// Integer exponents `(a, b, c)` of `t1^a t2^b t3^c`.
pub type Weight = [i32; 3];

const KAPPA: Weight = [1, 1, 1];

fn t_mono(w: Weight) -> ExponentVector {
    ExponentVector::t(0, w[0], w[1], w[2])
}

fn integer_weight(m: &ExponentVector) -> Result<Weight> {
    let [a, b, c] = m.t_part();
    if a % 2 != 0 || b % 2 != 0 || c % 2 != 0 {
        return Err(Error::HalfLattice(m.to_string()));
    }
    Ok([a / 2, b / 2, c / 2])
}

fn kappa_over(w: Weight) -> Weight {
    [1 - w[0], 1 - w[1], 1 - w[2]]
}

/// `Q = sum_{box} t1^i1 t2^i2 t3^i3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character(LaurentPoly);

impl Character {
    pub fn poly(&self) -> &LaurentPoly {
        &self.0
    }
}

pub fn character(pi: &PlanePartition) -> Character {
    let mut q = LaurentPoly::zero();
    for b in pi.boxes() {
        q = &q + &LaurentPoly::unit_monomial(t_mono([b[0] as i32, b[1] as i32, b[2] as i32]));
    }
    Character(q)
}

/// Virtual tangent class; satisfies `coeff(kappa/m) = -coeff(m)` and has no constant term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualTangent(LaurentPoly);

impl VirtualTangent {
    /// Wrap a polynomial after checking the Calabi-Yau duality invariants.
    pub fn new(p: LaurentPoly) -> Result<Self> {
        check_duality(&p)?;
        Ok(VirtualTangent(p))
    }

    pub fn poly(&self) -> &LaurentPoly {
        &self.0
    }
}

fn check_duality(p: &LaurentPoly) -> Result<()> {
    if !p.constant_term().is_zero() {
        return Err(Error::DualityViolation(format!("constant term in {p}")));
    }
    let kappa = t_mono(KAPPA);
    for (m, c) in p.terms() {
        let partner = kappa.div(m);
        if p.coeff(&partner) != -c {
            return Err(Error::DualityViolation(format!(
                "coefficient of {partner} is not minus that of {m} in {p}"
            )));
        }
    }
    Ok(())
}

/// `dual(Q - Qbar/kappa + Q Qbar (1-t1)(1-t2)(1-t3)/kappa)`.
pub fn virtual_tangent(pi: &PlanePartition) -> Result<VirtualTangent> {
    let q = character(pi).0;
    if q.is_zero() {
        return Ok(VirtualTangent(LaurentPoly::zero()));
    }
    let qbar = q.dual();
    let kinv = LaurentPoly::unit_monomial(t_mono(KAPPA).inverse());
    let one = LaurentPoly::scalar(BigRational::one());
    let mut euler = one.clone();
    for i in 0..3 {
        let mut w = [0; 3];
        w[i] = 1;
        euler = &euler * &(&one - &LaurentPoly::unit_monomial(t_mono(w)));
    }
    let raw = &(&q - &(&qbar * &kinv)) + &(&(&(&q * &qbar) * &euler) * &kinv);
    VirtualTangent::new(raw.dual())
}

/// Keep the monomials `t1^a t2^b t3^c` with `a = b (mod r)`.
pub fn invariant_part(t: &VirtualTangent, r: usize) -> VirtualTangent {
    let r = r as i32;
    VirtualTangent(t.0.filter(|m| {
        let [a, b, _] = m.t_part();
        (a / 2 - b / 2).rem_euclid(r) == 0
    }))
}

/// Multiset `W` with `T = sum_{w in W} (w - kappa/w)`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WeightMultiset(pub Vec<Weight>);

impl WeightMultiset {
    pub fn weights(&self) -> &[Weight] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sum_{w in W} (w - kappa/w)`.
    pub fn tangent(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for &w in &self.0 {
            p = &p + &LaurentPoly::unit_monomial(t_mono(w));
            p = &p - &LaurentPoly::unit_monomial(t_mono(kappa_over(w)));
        }
        p
    }
}

impl fmt::Display for WeightMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", t_mono(*w))?;
        }
        f.write_str("}")
    }
}

/// Greedy extraction of `W`: repeatedly take the lexicographically smallest
/// positive monomial `w` and subtract `w - kappa/w`.
pub fn pair_weights(t: &VirtualTangent) -> Result<WeightMultiset> {
    let mut rest = t.0.clone();
    let mut out = Vec::new();
    loop {
        let next = rest
            .terms()
            .find(|(_, c)| c.is_positive())
            .map(|(m, c)| (m.clone(), c.clone()));
        let Some((m, c)) = next else { break };
        if !c.is_integer() {
            return Err(Error::PairingFailure(format!("non-integral multiplicity {c} at {m}")));
        }
        let w = integer_weight(&m)?;
        let partner = t_mono(kappa_over(w));
        if !(-rest.coeff(&partner)).is_positive() {
            return Err(Error::PairingFailure(format!("{m} has no negative partner {partner}")));
        }
        out.push(w);
        rest = &rest - &LaurentPoly::unit_monomial(m);
        rest = &rest + &LaurentPoly::unit_monomial(partner);
    }
    if !rest.is_zero() {
        return Err(Error::PairingFailure(format!("unpaired remainder {rest}")));
    }
    Ok(WeightMultiset(out))
}

/// `W(pi)` for the `mu_r`-colored vertex.
pub fn weights(pi: &PlanePartition, r: usize) -> Result<WeightMultiset> {
    pair_weights(&invariant_part(&virtual_tangent(pi)?, r))
}

fn bracket_at(w: Weight, pt: &RationalPoint) -> Result<BigRational> {
    let v = pt.bracket_value(&t_mono(w))?;
    if v.is_zero() {
        return Err(Error::BracketVanishes(t_mono(w).to_string()));
    }
    Ok(v)
}

/// Exact value of `prod_{w in W} [kappa/w] / [w]` at `pt`.
pub fn ahat_eval(w: &WeightMultiset, pt: &RationalPoint) -> Result<BigRational> {
    let mut acc = BigRational::one();
    for &x in &w.0 {
        acc *= bracket_at(kappa_over(x), pt)?;
        acc /= bracket_at(x, pt)?;
    }
    Ok(acc)
}

/// Behaviour of a weight under `t1, t3 -> 0`, `|t1| << |t3|`, `kappa` fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitClass {
    Attracting,
    Repelling,
    /// `w = kappa^b`.
    Neutral(i32),
}

pub fn classify(w: Weight) -> LimitClass {
    let [a, b, c] = w;
    // t2 = kappa / (t1 t3): w ~ t1^(a-b) t3^(c-b) kappa^b
    match (a - b, c - b) {
        (0, 0) => LimitClass::Neutral(b),
        (x, y) if x > 0 || (x == 0 && y > 0) => LimitClass::Attracting,
        _ => LimitClass::Repelling,
    }
}

/// Limit of `a(pi)` in `Q(c)`: `-c` per attracting weight, `-1/c` per
/// repelling weight, `[kappa^(1-b)] / [kappa^b]` per neutral `kappa^b`.
pub fn ahat_limit(w: &WeightMultiset) -> Result<CRational> {
    let mut power = 0i64;
    let mut sign = 1i64;
    let mut acc = CRational::one();
    for &x in &w.0 {
        match classify(x) {
            LimitClass::Attracting => {
                power += 1;
                sign = -sign;
            }
            LimitClass::Repelling => {
                power -= 1;
                sign = -sign;
            }
            LimitClass::Neutral(0) => return Err(Error::NeutralZero),
            LimitClass::Neutral(b) => {
                let b = b as i64;
                let br = |k: i64| {
                    CPoly::from_terms([(k, BigRational::one()), (-k, -BigRational::one())])
                };
                acc = &acc * &CRational::new(br(1 - b), br(b))?;
            }
        }
    }
    let monomial = CRational::from_poly(CPoly::monomial(power, BigRational::from_integer(sign.into())));
    Ok(&acc * &monomial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{enumerate_up_to, index};

    fn pp(boxes: &[[u32; 3]]) -> PlanePartition {
        PlanePartition::from_boxes(boxes.to_vec()).unwrap()
    }

    fn poly(terms: &[(Weight, i64)]) -> LaurentPoly {
        terms.iter().fold(LaurentPoly::zero(), |acc, &(w, c)| {
            &acc + &LaurentPoly::monomial(t_mono(w), BigRational::from_integer(c.into()))
        })
    }

    #[test]
    fn characters() {
        assert!(character(&PlanePartition::empty()).poly().is_zero());
        assert_eq!(character(&pp(&[[0, 0, 0]])).poly(), &poly(&[([0, 0, 0], 1)]));
        assert_eq!(
            character(&pp(&[[0, 0, 0], [1, 0, 0]])).poly(),
            &poly(&[([0, 0, 0], 1), ([1, 0, 0], 1)])
        );
    }

    #[test]
    fn single_box_tangent() {
        let t = virtual_tangent(&pp(&[[0, 0, 0]])).unwrap();
        let expected = poly(&[
            ([1, 0, 0], 1),
            ([0, 1, 0], 1),
            ([0, 0, 1], 1),
            ([1, 1, 0], -1),
            ([1, 0, 1], -1),
            ([0, 1, 1], -1),
        ]);
        assert_eq!(t.poly(), &expected);
        assert!(virtual_tangent(&PlanePartition::empty()).unwrap().poly().is_zero());
    }

    #[test]
    fn raw_orientation_is_not_pairable() {
        // without the final inversion no W exists
        let t = virtual_tangent(&pp(&[[0, 0, 0], [1, 0, 0]])).unwrap();
        let raw = t.poly().dual();
        assert!(check_duality(&raw).is_err());
    }

    #[test]
    fn invariant_parts() {
        let t = virtual_tangent(&pp(&[[0, 0, 0]])).unwrap();
        assert_eq!(invariant_part(&t, 1), t);
        assert_eq!(
            invariant_part(&t, 2).poly(),
            &poly(&[([0, 0, 1], 1), ([1, 1, 0], -1)])
        );
    }

    #[test]
    fn duality_and_pairing_hold_on_small_partitions() {
        for p in enumerate_up_to(6).iter().flatten() {
            let t = virtual_tangent(p).unwrap();
            for r in 1..=3 {
                let inv = invariant_part(&t, r);
                check_duality(inv.poly()).unwrap();
                let w = pair_weights(&inv).unwrap();
                assert_eq!(&w.tangent(), inv.poly());
            }
        }
    }

    #[test]
    fn weight_pairing_examples() {
        let single = pp(&[[0, 0, 0]]);
        assert_eq!(weights(&single, 1).unwrap().0, vec![[0, 0, 1], [0, 1, 0], [1, 0, 0]]);
        assert_eq!(weights(&single, 2).unwrap().0, vec![[0, 0, 1]]);
        assert!(weights(&PlanePartition::empty(), 1).unwrap().is_empty());
    }

    #[test]
    fn pairing_rejects_broken_duality() {
        let t = VirtualTangent(poly(&[([1, 0, 0], 1)]));
        assert!(matches!(pair_weights(&t), Err(Error::PairingFailure(_))));
    }

    #[test]
    fn ahat_values() {
        let pt = RationalPoint::from_ints([(2, 1), (3, 1), (5, 1)]).unwrap();
        assert_eq!(ahat_eval(&WeightMultiset::default(), &pt).unwrap(), BigRational::one());
        let w = weights(&pp(&[[0, 0, 0]]), 2).unwrap();
        // [t1 t2] / [t3] = (6 - 1/6) / (5 - 1/5) = 175/144
        assert_eq!(
            ahat_eval(&w, &pt).unwrap(),
            BigRational::new(175.into(), 144.into())
        );
        let bad = RationalPoint::from_ints([(1, 1), (3, 1), (5, 1)]).unwrap();
        let w1 = weights(&pp(&[[0, 0, 0]]), 1).unwrap();
        assert!(matches!(ahat_eval(&w1, &bad), Err(Error::BracketVanishes(_))));
    }

    #[test]
    fn limit_examples() {
        let minus_c = CRational::from_poly(CPoly::monomial(1, -BigRational::one()));
        let w1 = weights(&pp(&[[0, 0, 0]]), 1).unwrap();
        assert_eq!(ahat_limit(&w1).unwrap(), minus_c);
        let w2 = weights(&pp(&[[0, 0, 0]]), 2).unwrap();
        assert_eq!(ahat_limit(&w2).unwrap(), minus_c);
        assert_eq!(classify([1, 0, 0]), LimitClass::Attracting);
        assert_eq!(classify([0, 1, 0]), LimitClass::Repelling);
        assert_eq!(classify([0, 0, 1]), LimitClass::Attracting);
        assert_eq!(classify([2, 2, 2]), LimitClass::Neutral(2));
        assert_eq!(
            ahat_limit(&WeightMultiset(vec![[0, 0, 0]])),
            Err(Error::NeutralZero)
        );
    }

    #[test]
    fn limit_equals_index_power() {
        let minus_c = CRational::from_poly(CPoly::monomial(1, -BigRational::one()));
        for p in enumerate_up_to(6).iter().flatten() {
            for r in 1..=3 {
                let lim = ahat_limit(&weights(p, r).unwrap()).unwrap();
                assert_eq!(lim, minus_c.pow(index(p, r)).unwrap(), "{p} r={r}");
            }
        }
    }

    #[test]
    fn neutral_factor_value() {
        // [kappa^(1-b)] / [kappa^b] at b = 2 is (c^-1 - c) / (c^2 - c^-2)
        let got = ahat_limit(&WeightMultiset(vec![[2, 2, 2]])).unwrap();
        let c = BigRational::new(3.into(), 2.into());
        let expected = (c.recip() - &c) / (&c * &c - (&c * &c).recip());
        assert_eq!(got.evaluate(&c).unwrap(), expected);
    }
}
