//! Arithmetic in `F_p` and `F_{p^k}`, univariate polynomials over them,
//! factorization, and splitting-field root extraction.
//!
//! Extension field elements are coefficient vectors over the modulus basis,
//! packed into a `u64` code base `p` (coefficient of 1 in the lowest digit).
//! The text encoding is `c0,c1,...,c{k-1}` with entries in `[0, p)`.

use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed seed for the equal-degree splitting randomness, recorded here so
/// factorizations are reproducible run to run.
pub const FACTOR_SEED: u64 = 0x5eed_f0f0;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// p-adic valuation of n (n > 0).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Smallest generator of `(Z/p)^*`.
pub fn primitive_root(p: u64) -> u64 {
    assert!(is_prime(p) && p > 2);
    'outer: for g in 2..p {
        let mut x = g;
        for _ in 1..p - 2 {
            x = x * g % p;
            if x == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("every prime field has a primitive root")
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// A finite field `F_{p^k}`, described by a monic irreducible modulus of
/// degree `k` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fq {
    pub p: u64,
    pub k: u32,
    /// Monic modulus, length `k + 1`, coefficients in `[0, p)`, constant term first.
    pub modulus: Vec<u64>,
}

impl Fq {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Fq> {
        Fq::new(p, 1)
    }

    /// `F_{p^k}` with the lexicographically least monic irreducible modulus:
    /// candidates `x^k + m` are scanned by the base-`p` value of the lower
    /// coefficients, so equal inputs always produce identical moduli.
    pub fn new(p: u64, k: u32) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        assert!(k >= 1, "extension degree must be >= 1");
        if k == 1 {
            // modulus x, so elements are plain residues
            return Ok(Fq { p, k, modulus: vec![0, 1] });
        }
        let count = (p as u128).pow(k);
        for m in 0..count {
            let mut modulus = Vec::with_capacity(k as usize + 1);
            let mut rest = m;
            for _ in 0..k {
                modulus.push((rest % p as u128) as u64);
                rest /= p as u128;
            }
            modulus.push(1);
            let f = Poly {
                field: Fq::prime(p)?,
                coeffs: modulus.clone(),
            };
            if f.is_irreducible() {
                return Ok(Fq { p, k, modulus });
            }
        }
        Err(Error::NoModulus(p, k))
    }

    /// Number of elements `p^k`.
    pub fn q(&self) -> u128 {
        (self.p as u128).pow(self.k)
    }

    pub fn is_prime_field(&self) -> bool {
        self.k == 1
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        1
    }

    fn decode(&self, x: u64) -> Vec<u64> {
        let mut out = vec![0u64; self.k as usize];
        let mut rest = x;
        for c in out.iter_mut() {
            *c = rest % self.p;
            rest /= self.p;
        }
        out
    }

    fn encode(&self, coeffs: &[u64]) -> u64 {
        let mut x = 0u64;
        for &c in coeffs.iter().rev() {
            x = x * self.p + c % self.p;
        }
        x
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (va, vb) = (self.decode(a), self.decode(b));
        let sum: Vec<u64> = va.iter().zip(&vb).map(|(x, y)| (x + y) % self.p).collect();
        self.encode(&sum)
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.k == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let va = self.decode(a);
        let n: Vec<u64> = va.iter().map(|x| (self.p - x) % self.p).collect();
        self.encode(&n)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return a * b % self.p;
        }
        let (va, vb) = (self.decode(a), self.decode(b));
        let k = self.k as usize;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in va.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in vb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        // reduce by the monic modulus
        for i in (k..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..k {
                let m = self.modulus[j];
                if m != 0 {
                    let idx = i - k + j;
                    prod[idx] = (prod[idx] + (self.p - m) * c) % self.p;
                }
            }
        }
        prod.truncate(k);
        self.encode(&prod)
    }

    pub fn pow(&self, mut a: u64, mut e: u128) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        Some(self.pow(a, self.q() - 2))
    }

    /// Frobenius `x -> x^p`.
    pub fn frobenius(&self, a: u64) -> u64 {
        self.pow(a, self.p as u128)
    }

    /// Multiplicative order of a nonzero element.
    pub fn elt_order(&self, a: u64) -> u128 {
        assert!(a != 0);
        let mut x = a;
        let mut n = 1u128;
        while x != 1 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// Embed `F_p` into this field (constant coefficient).
    pub fn from_prime(&self, a: u64) -> u64 {
        a % self.p
    }

    pub fn parse_elt(&self, s: &str) -> Result<u64> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != self.k as usize {
            return Err(Error::Parse(format!(
                "expected {} comma-separated coefficients, got {:?}",
                self.k, s
            )));
        }
        let mut coeffs = Vec::with_capacity(parts.len());
        for part in parts {
            let v: u64 = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad field element entry {part:?}")))?;
            if v >= self.p {
                return Err(Error::Parse(format!("entry {v} not in [0, {})", self.p)));
            }
            coeffs.push(v);
        }
        Ok(self.encode(&coeffs))
    }

    pub fn display_elt(&self, x: u64) -> String {
        self.decode(x)
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Univariate polynomial over `Fq`. The zero polynomial has no coefficients;
/// otherwise the leading coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub field: Fq,
    /// Constant term first; elements are `Fq` codes.
    pub coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(field: Fq, mut coeffs: Vec<u64>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: Fq) -> Poly {
        Poly { field, coeffs: vec![] }
    }

    pub fn one(field: Fq) -> Poly {
        Poly { field, coeffs: vec![1] }
    }

    /// The monomial `x`.
    pub fn x(field: Fq) -> Poly {
        Poly { field, coeffs: vec![0, 1] }
    }

    /// `x - a`.
    pub fn x_minus(field: Fq, a: u64) -> Poly {
        let na = field.neg(a);
        Poly::new(field, vec![na, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of a nonzero polynomial. Panics on zero.
    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of zero polynomial");
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> u64 {
        *self.coeffs.last().expect("leading of zero polynomial")
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.leading() == 1
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, o) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *o = f.add(a, b);
        }
        Poly::new(f.clone(), out)
    }

    pub fn neg(&self) -> Poly {
        let f = &self.field;
        Poly::new(f.clone(), self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> Poly {
        let f = &self.field;
        Poly::new(f.clone(), self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field.clone());
        }
        let f = &self.field;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f.clone(), out)
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let f = self.field.clone();
        if self.is_zero() || self.coeffs.len() < div.coeffs.len() {
            return (Poly::zero(f), self.clone());
        }
        let dinv = f.inv(div.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let dd = div.degree();
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = f.mul(rem[i], dinv);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &m) in div.coeffs.iter().enumerate() {
                rem[i - dd + j] = f.sub(rem[i - dd + j], f.mul(c, m));
            }
        }
        (Poly::new(f.clone(), quot), Poly::new(f, rem))
    }

    pub fn rem(&self, div: &Poly) -> Poly {
        self.divrem(div).1
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn monic(&self) -> Poly {
        assert!(!self.is_zero());
        let inv = self.field.inv(self.leading()).unwrap();
        self.scale(inv)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let f = &self.field;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        if self.coeffs.len() <= 1 {
            return Poly::zero(f.clone());
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            let mult = (i as u64) % f.p;
            out.push(f.mul(c, f.from_prime(mult)));
        }
        Poly::new(f.clone(), out)
    }

    /// `self^e mod m`.
    pub fn powmod(&self, mut e: u128, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut acc = Poly::one(self.field.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Irreducibility over `Fq` by the standard Frobenius criterion:
    /// `x^{q^n} = x (mod f)` and `gcd(x^{q^{n/t}} - x, f) = 1` for prime `t | n`.
    pub fn is_irreducible(&self) -> bool {
        if self.is_zero() || self.degree() == 0 {
            return false;
        }
        let n = self.degree();
        if n == 1 {
            return true;
        }
        let f = self.monic();
        let q = self.field.q();
        let x = Poly::x(self.field.clone());
        let mut t = n;
        let mut prime_divs = vec![];
        let mut d = 2;
        while d * d <= t {
            if t % d == 0 {
                prime_divs.push(d);
                while t % d == 0 {
                    t /= d;
                }
            }
            d += 1;
        }
        if t > 1 {
            prime_divs.push(t);
        }
        for t in prime_divs {
            let e = q.pow((n / t) as u32);
            let xq = x.powmod(e, &f);
            let g = xq.sub(&x).gcd(&f);
            if g.is_zero() || g.degree() != 0 {
                return false;
            }
        }
        let e = q.pow(n as u32);
        let xq = x.powmod(e, &f);
        xq.sub(&x).rem(&f).is_zero()
    }

    /// Factor into monic irreducibles with multiplicities, sorted by
    /// (degree, coefficient codes) so output order is deterministic.
    pub fn factor(&self) -> Result<Vec<(Poly, usize)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED);
        let mut out: Vec<(Poly, usize)> = vec![];
        let mut stack = vec![(self.monic(), 1usize)];
        while let Some((f, mult)) = stack.pop() {
            if f.degree() == 0 {
                continue;
            }
            // square-free part
            let d = f.derivative();
            if d.is_zero() {
                // f = g(x^p): take p-th roots of coefficients
                let field = &f.field;
                let p = field.p as usize;
                let mut g = Vec::with_capacity(f.coeffs.len() / p + 1);
                for (i, &c) in f.coeffs.iter().enumerate() {
                    if i % p == 0 {
                        // p-th root in F_{p^k} is Frobenius inverse x^{p^{k-1}}
                        let root = field.pow(c, (field.p as u128).pow(field.k - 1));
                        g.push(root);
                    } else {
                        assert_eq!(c, 0, "nonzero coefficient in f with zero derivative");
                    }
                }
                stack.push((Poly::new(field.clone(), g), mult * p));
                continue;
            }
            let sq = f.gcd(&d);
            if !sq.is_zero() && sq.degree() > 0 {
                let (rest, r) = f.divrem(&sq);
                assert!(r.is_zero());
                stack.push((rest, mult));
                stack.push((sq, mult));
                continue;
            }
            // f is square-free: distinct-degree then equal-degree splitting
            for (g, deg) in distinct_degree(&f) {
                for irr in equal_degree(&g, deg, &mut rng) {
                    out.push((irr, mult));
                }
            }
        }
        // merge multiplicities of equal factors
        out.sort_by(|a, b| {
            (a.0.degree(), &a.0.coeffs).cmp(&(b.0.degree(), &b.0.coeffs))
        });
        let mut merged: Vec<(Poly, usize)> = vec![];
        for (f, m) in out {
            if let Some(last) = merged.last_mut() {
                if last.0 == f {
                    last.1 += m;
                    continue;
                }
            }
            merged.push((f, m));
        }
        Ok(merged)
    }

    /// Roots lying in the coefficient field, with multiplicity.
    pub fn roots_in_field(&self) -> Result<Vec<u64>> {
        let mut roots = vec![];
        for (f, m) in self.factor()? {
            if f.degree() == 1 {
                // x + c => root -c
                let root = self.field.neg(f.coeffs[0]);
                for _ in 0..m {
                    roots.push(root);
                }
            }
        }
        roots.sort_unstable();
        Ok(roots)
    }
}

/// Distinct-degree factorization of a square-free monic polynomial:
/// returns (product of irreducible factors of degree d, d).
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let field = f.field.clone();
    let q = field.q();
    let mut out = vec![];
    let mut f = f.clone();
    let mut xq = Poly::x(field.clone()).powmod(q, &f);
    let mut d = 1usize;
    while f.degree() >= 2 * d {
        let g = xq.sub(&Poly::x(field.clone())).gcd(&f);
        if !g.is_zero() && g.degree() > 0 {
            out.push((g.clone(), d));
            let (quot, r) = f.divrem(&g);
            assert!(r.is_zero());
            f = quot;
            xq = xq.rem(&f);
        }
        d += 1;
        xq = xq.powmod(q, &f);
    }
    if f.degree() > 0 {
        let d = f.degree();
        out.push((f, d));
    }
    out
}

/// Cantor–Zassenhaus equal-degree splitting (odd q). `f` is square-free,
/// monic, and a product of irreducibles all of degree `d`.
fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let field = f.field.clone();
    if f.degree() == d {
        return vec![f.monic()];
    }
    let q = field.q();
    let e = (q.pow(d as u32) - 1) / 2;
    loop {
        // random nonconstant polynomial of degree < deg f
        let coeffs: Vec<u64> = (0..f.degree()).map(|_| rng.random_range(0..q as u64)).collect();
        let a = Poly::new(field.clone(), coeffs);
        if a.is_zero() || a.degree() == 0 {
            continue;
        }
        let g0 = a.gcd(f);
        let g = if g0.degree() > 0 && g0.degree() < f.degree() {
            g0
        } else {
            let b = a.powmod(e, f).sub(&Poly::one(field.clone()));
            if b.is_zero() {
                continue;
            }
            let g = b.gcd(f);
            if g.is_zero() || g.degree() == 0 || g.degree() == f.degree() {
                continue;
            }
            g
        };
        let (quot, r) = f.divrem(&g);
        assert!(r.is_zero());
        let mut out = equal_degree(&g, d, rng);
        out.extend(equal_degree(&quot, d, rng));
        return out;
    }
}

/// Smallest field containing all roots of `f` (coefficients in a prime field),
/// together with the multiset of roots encoded in that field. The returned
/// field has degree lcm of the irreducible factor degrees.
pub fn roots_in_splitting_field(f: &Poly) -> Result<(Fq, Vec<u64>)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.field.is_prime_field() {
        return Err(Error::Unsupported(
            "splitting fields are computed over prime base fields only".into(),
        ));
    }
    let p = f.field.p;
    let factors = f.factor()?;
    let mut ell = 1usize;
    for (g, _) in &factors {
        ell = lcm(ell, g.degree());
    }
    let ext = Fq::new(p, ell as u32)?;
    let mut roots = vec![];
    for (g, mult) in &factors {
        // lift g coefficientwise (prime subfield embeds as constants)
        let lifted = Poly::new(ext.clone(), g.coeffs.iter().map(|&c| ext.from_prime(c)).collect());
        let rs = lifted.roots_in_field()?;
        assert_eq!(rs.len(), g.degree(), "factor must split in the lcm field");
        for r in rs {
            for _ in 0..*mult {
                roots.push(r);
            }
        }
    }
    roots.sort_unstable();
    Ok((ext, roots))
}
