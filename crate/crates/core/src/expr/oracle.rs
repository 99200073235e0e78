use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Expr, ExprError, Point, Program, Rat};

/// Moduli used by [`Arithmetic::Modular`], one per trial in rotation.
const PRIMES: [u64; 8] = [
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
    4611686018427387751,
    4611686018427387737,
    4611686018427387733,
    4611686018427387709,
];

/// How sampled points are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arithmetic {
    /// Exact rational arithmetic.
    Exact,
    /// Arithmetic modulo a 62-bit prime (a different one per trial). A
    /// nonzero rational is misread as zero only when the prime divides its
    /// numerator, and a spurious pole only costs a retry.
    Modular,
}

/// Parameters of the randomized identity test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqOracle {
    pub trials: u32,
    pub bound: u32,
    pub max_retries: u32,
    pub seed: u64,
    pub arithmetic: Arithmetic,
}

impl Default for EqOracle {
    fn default() -> Self {
        EqOracle { trials: 16, bound: 50, max_retries: 64, seed: 0, arithmetic: Arithmetic::Modular }
    }
}

impl EqOracle {
    pub fn with_seed(seed: u64) -> EqOracle {
        EqOracle { seed, ..EqOracle::default() }
    }

    pub fn exact(mut self) -> EqOracle {
        self.arithmetic = Arithmetic::Exact;
        self
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        let b = self.bound.max(1) as i64;
        let mut coord = || {
            let n: i64 = rng.gen_range(-b..=b);
            let d: i64 = rng.gen_range(1..=b);
            Rat::new(BigInt::from(n), BigInt::from(d))
        };
        let x = coord();
        let y = coord();
        Point::new(x, y)
    }

    /// True iff every expression vanishes at each of `trials` pole-free
    /// sample points.
    pub fn all_zero(&self, exprs: &[Expr]) -> Result<bool, ExprError> {
        let pending: Vec<Expr> = exprs.iter().filter(|e| !e.is_zero_literal()).cloned().collect();
        if pending.is_empty() {
            return Ok(true);
        }
        if pending.iter().any(|e| e.as_const().is_some()) {
            return Ok(false);
        }
        let prog = Program::new(&pending);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for trial in 0..self.trials.max(1) {
            let mut retries = 0;
            loop {
                let p = self.sample(&mut rng);
                let outcome = match self.arithmetic {
                    Arithmetic::Exact => prog.eval_exact(&p).map(|vs| vs.iter().all(Zero::is_zero)),
                    Arithmetic::Modular => {
                        let prime = PRIMES[trial as usize % PRIMES.len()];
                        prog.eval_mod(&p, prime).map(|vs| vs.iter().all(|v| *v == 0))
                    }
                };
                match outcome {
                    Ok(true) => break,
                    Ok(false) => return Ok(false),
                    Err(ExprError::Pole) => {
                        retries += 1;
                        if retries > self.max_retries {
                            return Err(ExprError::SamplingExhausted { retries: self.max_retries });
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(true)
    }
}

/// Probabilistic test that `e` is identically zero.
///
/// ```
/// use lpde::expr::{eq_zero, ex, EqOracle};
/// let o = EqOracle::default();
/// assert!(eq_zero(&ex("(x+y)^2 - x^2 - 2*x*y - y^2"), &o).unwrap());
/// assert!(!eq_zero(&ex("x - y"), &o).unwrap());
/// ```
pub fn eq_zero(e: &Expr, o: &EqOracle) -> Result<bool, ExprError> {
    o.all_zero(std::slice::from_ref(e))
}

/// `eq_zero(a - b)`.
pub fn eq_expr(a: &Expr, b: &Expr, o: &EqOracle) -> Result<bool, ExprError> {
    eq_zero(&Expr::difference(a.clone(), b.clone()), o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ex;

    fn both() -> [EqOracle; 2] {
        [EqOracle::default(), EqOracle::default().exact()]
    }

    #[test]
    fn identities() {
        for o in both() {
            assert!(eq_zero(&ex("(x+y)^2 - x^2 - 2*x*y - y^2"), &o).unwrap());
            assert!(!eq_zero(&ex("x - y"), &o).unwrap());
            assert!(eq_zero(&ex("x/y - x*(1/y)"), &o).unwrap());
            assert!(eq_expr(&ex("1/(x-1) - 1/(x+1)"), &ex("2/(x^2-1)"), &o).unwrap());
        }
    }

    #[test]
    fn constants_short_circuit() {
        let o = EqOracle::default();
        assert!(eq_zero(&Expr::zero(), &o).unwrap());
        assert!(!eq_zero(&Expr::ratio(1, 3), &o).unwrap());
    }

    #[test]
    fn degenerate_expressions_exhaust_sampling() {
        for o in both() {
            let e = ex("1/(x - x)");
            assert_eq!(eq_zero(&e, &o), Err(ExprError::SamplingExhausted { retries: 64 }));
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let o = EqOracle::with_seed(7);
        let a = o.sample(&mut ChaCha8Rng::seed_from_u64(7));
        let b = o.sample(&mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
    }

    #[test]
    fn sample_ranges() {
        let o = EqOracle { bound: 3, ..EqOracle::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = o.sample(&mut rng);
            for c in [p.x, p.y] {
                assert!(c >= Rat::from_integer((-3).into()) && c <= Rat::from_integer(3.into()));
            }
        }
    }

    #[test]
    fn multiples_of_the_prime_are_caught_by_rotation() {
        // Every value is divisible by the first modulus.
        let e = Expr::constant(Rat::from_integer(PRIMES[0].into())) * Expr::x();
        assert!(!eq_zero(&e, &EqOracle::default()).unwrap());
    }
}
