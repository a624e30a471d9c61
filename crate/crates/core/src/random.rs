//! Seeded generators for randomized identity checks.
//!
//! The seed comes from the `GJ_SEED` environment variable when set.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffring::{ratio, Coefficient, Monomial, Var};
use crate::exterior::{Blade, Chart, Graded, Kind};

pub const SEED_VAR: &str = "GJ_SEED";

/// Reads `GJ_SEED`, falling back to `default`.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var(SEED_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Seeded from `GJ_SEED`, mixed with a per-suite salt.
    pub fn from_env(salt: u64) -> Sampler {
        Sampler::new(seed_from_env(0x6a5f_2d1c).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn nonzero_int(&mut self, lo: i64, hi: i64) -> i64 {
        loop {
            let n = self.int(lo, hi);
            if n != 0 {
                return n;
            }
        }
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        items.choose(&mut self.rng).expect("nonempty choice")
    }

    /// Polynomial in `vars` with total degree at most `max_degree` and at most
    /// `max_terms` terms; small rational coefficients.
    pub fn polynomial<S: AsRef<str>>(&mut self, vars: &[S], max_degree: u32, max_terms: usize) -> Coefficient {
        let n_terms = self.rng.gen_range(0..=max_terms);
        let mut out = Coefficient::zero();
        for _ in 0..n_terms {
            let deg = self.rng.gen_range(0..=max_degree);
            let powers: Vec<(Var, i32)> = (0..deg)
                .filter(|_| !vars.is_empty())
                .map(|_| (Var::from(self.pick(vars).as_ref()), 1))
                .collect();
            let num = self.nonzero_int(-3, 3);
            let den = self.int(1, 2);
            out = &out + &Coefficient::term(ratio(num, den), Monomial::from_powers(powers));
        }
        out
    }

    /// Random homogeneous element of the given degree.
    pub fn graded<K: Kind, S: AsRef<str>>(
        &mut self,
        chart: &Chart,
        degree: usize,
        vars: &[S],
        max_degree: u32,
        max_blades: usize,
    ) -> Graded<K> {
        let dim = chart.dimension();
        let n = self.rng.gen_range(1..=max_blades.max(1));
        let mut terms = Vec::new();
        for _ in 0..n {
            let mut idx: Vec<usize> = (0..dim).collect();
            idx.shuffle(&mut self.rng);
            idx.truncate(degree);
            let b = Blade::from_indices(idx).expect("distinct indices");
            terms.push((b, self.polynomial(vars, max_degree, 2)));
        }
        Graded::from_terms(chart, degree, terms)
    }

    /// Decomposable `X₁∧⋯∧X_p` of random vector fields.
    pub fn decomposable<K: Kind, S: AsRef<str>>(
        &mut self,
        chart: &Chart,
        degree: usize,
        vars: &[S],
        max_degree: u32,
    ) -> Graded<K> {
        let mut acc = Graded::<K>::scalar(chart, Coefficient::one());
        for _ in 0..degree {
            let v = self.graded::<K, S>(chart, 1, vars, max_degree, 2);
            acc = acc.wedge(&v).expect("same chart");
        }
        acc
    }
}
