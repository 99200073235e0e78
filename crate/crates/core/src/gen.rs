//! Seeded generators for property checks: random admissible
//! transformations, random constant-coefficient equations and fixed seed
//! equations for each stratum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equation::{discriminant, Lpde, StratumTag};
use crate::error::Result;
use crate::expr::{eq_zero, EqOracle, Expr};
use crate::frame::Frame;
use crate::invariants::InvariantContext;
use crate::transform::Transformation;

const MAX_ATTEMPTS: usize = 64;

/// Seed equations for a stratum, known from an independent computation to
/// lie in it. The case-a, b and d seeds all have an invertible `P1`.
pub fn seed_equations(tag: StratumTag) -> Vec<Lpde> {
    let rows: &[[&str; 6]] = match tag {
        StratumTag::CaseA => &[
            ["1", "0", "-1", "y", "0", "1"],
            ["1", "0", "-1", "x*y", "0", "1"],
            ["1", "0", "1", "y", "0", "1"],
            ["1", "0", "-1", "y", "0", "x"],
        ],
        StratumTag::CaseB => &[
            ["1", "0", "-1", "y", "0", "0"],
            ["1", "0", "1", "y", "0", "0"],
            ["1", "0", "-1", "x + y", "0", "0"],
            ["1", "0", "-1", "0", "x", "0"],
        ],
        StratumTag::CaseC => &[["1", "0", "-1", "x", "x", "0"]],
        StratumTag::CaseD => &[
            ["1", "0", "-1", "0", "1/y", "x"],
            ["1", "0", "-1", "x", "0", "y"],
            ["1", "0", "1", "0", "1/y", "x"],
        ],
        StratumTag::CaseE => &[["0", "x^2 + y", "0", "0", "0", "0"], ["1", "0", "-1", "0", "0", "0"]],
        StratumTag::Parabolic => &[["1", "2", "1", "0", "0", "0"]],
    };
    rows.iter().map(|r| Lpde::parse(*r)).collect()
}

/// Deterministic source of random inputs.
pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Generator {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn coefficient(&mut self, bound: i64) -> i64 {
        loop {
            let c = self.rng.gen_range(-bound..=bound);
            if c != 0 {
                return c;
            }
        }
    }

    /// A polynomial with up to `terms` monomials of total degree at most
    /// `degree` and small integer coefficients.
    pub fn polynomial(&mut self, degree: u32, terms: usize) -> Expr {
        let monomials: Vec<(u32, u32)> =
            (0..=degree).flat_map(|i| (0..=degree - i).map(move |j| (i, j))).collect();
        let count = self.rng.gen_range(1..=terms);
        let mut parts = Vec::with_capacity(count);
        for _ in 0..count {
            let (i, j) = monomials[self.rng.gen_range(0..monomials.len())];
            let c = Expr::int(self.coefficient(3));
            parts.push(Expr::product([c, Expr::x().pow(i as i32), Expr::y().pow(j as i32)]));
        }
        Expr::sum(parts)
    }

    /// Maps `ξ = x + p`, `η = y + q` with `p, q` of degree at most 3 and a
    /// polynomial gauge of degree at most 1, with `Δ ≢ 0` and `h ≢ 0`.
    pub fn admissible(&mut self, o: &EqOracle) -> Result<Transformation> {
        self.admissible_in(&Frame::identity(), o)
    }

    /// As [`Generator::admissible`], with the Jacobian taken in `fr`.
    pub fn admissible_in(&mut self, fr: &Frame, o: &EqOracle) -> Result<Transformation> {
        let mut last = None;
        for _ in 0..MAX_ATTEMPTS {
            let xi = Expr::x() + self.polynomial(3, 2);
            let eta = Expr::y() + self.polynomial(3, 2);
            let h = Expr::int(self.coefficient(3)) + self.polynomial(1, 1);
            match Transformation::from_maps_in(h, xi, eta, fr, o) {
                Ok(t) => return Ok(t),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }

    /// A non-parabolic constant-coefficient equation with `γ0 ≠ 0`.
    pub fn constant_equation(&mut self, o: &EqOracle) -> Result<Lpde> {
        loop {
            let c: [Expr; 6] = std::array::from_fn(|_| Expr::int(self.rng.gen_range(-3..=3)));
            let v = Lpde::from_array(c);
            if eq_zero(&discriminant(&v), o)? {
                continue;
            }
            if !InvariantContext::new(&v, &Frame::identity(), o)?.gamma0_zero()? {
                return Ok(v);
            }
        }
    }
}
