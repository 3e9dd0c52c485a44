//! Reproducible random rational points `(s1, s2, s3)` with `s_i = p/q`, `1 <= p, q <= 97`.

use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::laurent::RationalPoint;

pub const MAX_NUMERATOR: i64 = 97;
pub const DEFAULT_RETRIES: usize = 32;

/// Seeded source of sample points.
#[derive(Clone, Debug)]
pub struct PointSampler {
    rng: ChaCha8Rng,
    retries: usize,
}

impl PointSampler {
    pub fn new(seed: u64) -> Self {
        PointSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            retries: DEFAULT_RETRIES,
        }
    }

    pub fn with_retries(mut self, retries: usize) -> Self {
        self.retries = retries;
        self
    }

    fn ratio(&mut self) -> BigRational {
        let p = self.rng.gen_range(1..=MAX_NUMERATOR);
        let q = self.rng.gen_range(1..=MAX_NUMERATOR);
        BigRational::new(p.into(), q.into())
    }

    /// A point with `s1 s2 s3 != +-1` and no `s_i = 1`.
    pub fn draw(&mut self) -> RationalPoint {
        loop {
            let s = [self.ratio(), self.ratio(), self.ratio()];
            let c = &s[0] * &s[1] * &s[2];
            if c.is_one() || s.iter().any(|x| x.is_one()) {
                continue;
            }
            let [a, b, d] = s;
            return RationalPoint::new(a, b, d).expect("nonzero coordinates");
        }
    }

    /// Draw until `f` succeeds, re-drawing on vanishing brackets.
    pub fn draw_generic<T>(&mut self, f: impl Fn(&RationalPoint) -> Result<T>) -> Result<(RationalPoint, T)> {
        let mut last = None;
        for _ in 0..self.retries {
            let pt = self.draw();
            match f(&pt) {
                Ok(v) => return Ok((pt, v)),
                Err(e @ (Error::BracketVanishes(_) | Error::DivisionByZero(_))) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::BracketVanishes("no retries allowed".into())))
    }

    /// `(s1 u, s2 / u, s3)`: same `s1 s2 s3`, different point.
    pub fn kappa_partner(&mut self, pt: &RationalPoint) -> RationalPoint {
        loop {
            let u = self.ratio();
            if u.is_one() {
                continue;
            }
            let [a, b, c] = pt.s().clone();
            let cand = RationalPoint::new(a * &u, b / &u, c).expect("nonzero coordinates");
            if cand.s().iter().any(|x| x.is_one()) {
                continue;
            }
            return cand;
        }
    }
}
