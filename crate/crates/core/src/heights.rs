//! Point counting on `P^1` with local unit conditions and the explicit
//! leading constant of the height asymptotic.
//!
//! Convention: the counted set consists of the affine points `(a : 1)` with
//! `v_q(a) = 0` for every `q` in the chosen set of primes; the point at
//! infinity is excluded. Only `K = Q` is counted exactly; for general number
//! fields the constant is evaluated from the supplied invariants.

use crate::error::{Error, Result};
use crate::Parallelism;

/// Invariants of a number field entering the leading constant.
#[derive(Debug, Clone)]
pub struct NumberFieldInvariants {
    pub degree: u32,
    pub r1: u32,
    pub r2: u32,
    pub class_number: u64,
    pub regulator: f64,
    pub roots_of_unity: u64,
    pub discriminant: i64,
    /// Dedekind zeta value at 2.
    pub zeta2: f64,
}

impl NumberFieldInvariants {
    pub fn rationals() -> NumberFieldInvariants {
        NumberFieldInvariants {
            degree: 1,
            r1: 1,
            r2: 0,
            class_number: 1,
            regulator: 1.0,
            roots_of_unity: 2,
            discriminant: 1,
            zeta2: std::f64::consts::PI * std::f64::consts::PI / 6.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree != self.r1 + 2 * self.r2 {
            return Err(Error::InvalidInvariants("d != r1 + 2 r2".into()));
        }
        if self.roots_of_unity < 2 {
            return Err(Error::InvalidInvariants("w >= 2 always".into()));
        }
        if self.class_number == 0 || self.regulator <= 0.0 || self.discriminant == 0 {
            return Err(Error::InvalidInvariants("h, R, D must be nonzero".into()));
        }
        if self.zeta2 <= 0.0 {
            return Err(Error::InvalidInvariants("zeta_K(2) > 0".into()));
        }
        Ok(())
    }
}

/// The leading constant
/// `C = (h R / (w zeta_K(2))) * gamma_{K,2} * prod (q-1)^2/(q^2-1)`
/// where `gamma_{K,2} = (2^{r1} (2 pi)^{r2})^2 * 2^r / |D_K|`, `r = r1+r2-1`,
/// and the product runs over the prime-ideal norms of the unit-condition set.
pub fn schanuel_constant(inv: &NumberFieldInvariants, norms: &[u64]) -> Result<f64> {
    inv.validate()?;
    if norms.iter().any(|&q| q < 2) {
        return Err(Error::InvalidInvariants("prime ideal norms are >= 2".into()));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let gamma = (2f64.powi(inv.r1 as i32) * two_pi.powi(inv.r2 as i32)).powi(2)
        * 2f64.powi((inv.r1 + inv.r2 - 1) as i32)
        / (inv.discriminant.unsigned_abs() as f64);
    let mut c = inv.class_number as f64 * inv.regulator
        / (inv.roots_of_unity as f64 * inv.zeta2)
        * gamma;
    for &q in norms {
        let qf = q as f64;
        c *= (qf - 1.0) * (qf - 1.0) / (qf * qf - 1.0);
    }
    Ok(c)
}

/// Exact count over `Q`: points `(a : b)` with `gcd(a, b) = 1`, `b >= 1`,
/// `max(|a|, b) <= X`, and `q` dividing neither `a` nor `b` for each `q` in
/// `sigma` (so `v_q(a/b) = 0`). The identification `(a : b) = (-a : -b)` is
/// built into `b >= 1`; `(1 : 0)` is excluded by convention.
pub fn brute_count_q(sigma: &[u64], x: u64, par: Parallelism) -> u64 {
    let count_b = |b: u64| -> u64 {
        if sigma.iter().any(|&q| b % q == 0) {
            return 0;
        }
        let mut cnt = 0u64;
        for a_abs in 0..=x {
            if gcd(a_abs, b) != 1 {
                continue;
            }
            if sigma.iter().any(|&q| a_abs % q == 0) {
                continue;
            }
            // a = 0 contributes once; a != 0 contributes +-a
            cnt += if a_abs == 0 { 1 } else { 2 };
        }
        cnt
    };
    let bs: Vec<u64> = (1..=x).collect();
    crate::par_map(par, bs, count_b).into_iter().sum()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// One row of the heights report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HeightsRow {
    pub x: u64,
    pub count: u64,
    pub predicted: f64,
    pub ratio: f64,
}

pub fn heights_row(sigma: &[u64], x: u64, par: Parallelism) -> Result<HeightsRow> {
    let c = schanuel_constant(&NumberFieldInvariants::rationals(), sigma)?;
    let count = brute_count_q(sigma, x, par);
    let predicted = c * (x as f64) * (x as f64);
    Ok(HeightsRow { x, count, predicted, ratio: count as f64 / predicted })
}
