//! Module-theoretic analysis of group actions: absolute irreducibility,
//! composition factors (a Holt–Rees style meataxe), Hom spaces,
//! simple-submodule enumeration, dual modules.

use crate::error::{Error, Result};
use crate::linalg::{kernel_field, poly_at_mat, Echelon, Mat, Ring, Summand};
use crate::matgrp::EnumeratedGroup;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Default seed for the meataxe splitting-element randomness; recorded in
/// reports so runs are reproducible.
pub const CHOP_SEED: u64 = 0xC40B_5EED;
const CHOP_BUDGET: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleTag {
    Trivial,
    Natural,
    NaturalDual,
    Adjoint,
    AdjointDual,
    Custom,
}

/// A finite group acting linearly on `F_q^d`, given by generator images
/// aligned with the group's generator list.
#[derive(Debug, Clone)]
pub struct GModule {
    pub group: Arc<EnumeratedGroup>,
    pub dim: usize,
    pub gen_images: Vec<Mat>,
    pub tag: ModuleTag,
}

impl GModule {
    pub fn ring(&self) -> Ring {
        self.group.spec.ring()
    }

    pub fn trivial(group: Arc<EnumeratedGroup>) -> GModule {
        let ring = group.spec.ring();
        let images = vec![Mat::identity(ring, 1); group.spec.generators.len()];
        GModule { group, dim: 1, gen_images: images, tag: ModuleTag::Trivial }
    }

    pub fn natural(group: Arc<EnumeratedGroup>) -> GModule {
        let images = group.spec.generators.clone();
        let dim = group.spec.n;
        GModule { group, dim, gen_images: images, tag: ModuleTag::Natural }
    }

    pub fn custom(group: Arc<EnumeratedGroup>, gen_images: Vec<Mat>) -> GModule {
        assert_eq!(gen_images.len(), group.spec.generators.len());
        let dim = gen_images.first().map_or(0, |m| m.rows);
        GModule { group, dim, gen_images, tag: ModuleTag::Custom }
    }

    /// Contragredient module: `s` acts by transpose-inverse.
    pub fn dual(&self) -> GModule {
        let images = self
            .gen_images
            .iter()
            .map(|m| m.inverse().expect("generator images are invertible").transpose())
            .collect();
        let tag = match self.tag {
            ModuleTag::Natural => ModuleTag::NaturalDual,
            ModuleTag::NaturalDual => ModuleTag::Natural,
            ModuleTag::Adjoint => ModuleTag::AdjointDual,
            ModuleTag::AdjointDual => ModuleTag::Adjoint,
            ModuleTag::Trivial => ModuleTag::Trivial,
            ModuleTag::Custom => ModuleTag::Custom,
        };
        GModule { group: self.group.clone(), dim: self.dim, gen_images: images, tag }
    }

    /// Image of an arbitrary group element, via the BFS tree word.
    pub fn rho(&self, idx: u32) -> Mat {
        let mut acc = Mat::identity(self.ring(), self.dim);
        for gi in self.group.gen_path(idx) {
            acc = acc.mul(&self.gen_images[gi as usize]);
        }
        acc
    }

    /// Spot-check multiplicativity on seeded random element pairs.
    pub fn verify_action(&self, samples: usize) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(0xACC0);
        for _ in 0..samples {
            let a = rng.random_range(0..self.group.order) as u32;
            let b = rng.random_range(0..self.group.order) as u32;
            let prod = self.group.mat_of_idx(a).mul(&self.group.mat_of_idx(b));
            let c = self.group.idx_of(self.group.code_of_mat(&prod)).expect("closed");
            if self.rho(a).mul(&self.rho(b)) != self.rho(c) {
                return false;
            }
        }
        true
    }

    /// Restrict the action to a subgroup of the same matrix group.
    pub fn restrict_to(&self, sub: &Arc<EnumeratedGroup>) -> GModule {
        let images = sub
            .spec
            .generators
            .iter()
            .map(|g| {
                let idx = self
                    .group
                    .idx_of(self.group.code_of_mat(g))
                    .expect("subgroup generator lies in the parent group");
                self.rho(idx)
            })
            .collect();
        GModule { group: sub.clone(), dim: self.dim, gen_images: images, tag: ModuleTag::Custom }
    }
}

/// Fixed space `H^0(G, M)`: intersection of the kernels of `rho(s) - 1` over
/// the generators.
pub fn h0(m: &GModule) -> Summand {
    let ring = m.ring();
    let k = m.gen_images.len();
    if k == 0 {
        return Summand::full(ring, m.dim);
    }
    let mut stacked = Mat::zeros(ring.clone(), k * m.dim, m.dim);
    for (s, img) in m.gen_images.iter().enumerate() {
        let diff = img.sub(&Mat::identity(ring.clone(), m.dim));
        for i in 0..m.dim {
            for j in 0..m.dim {
                stacked.set(s * m.dim + i, j, diff.at(i, j));
            }
        }
    }
    Summand::span_field(ring, m.dim, &kernel_field(&stacked))
}

/// Submodule generated by a set of vectors (spin).
pub fn spin(m: &GModule, seeds: &[Vec<u64>]) -> Summand {
    let ring = m.ring();
    let mut ech = Echelon::new(ring.clone(), m.dim);
    let mut frontier: Vec<Vec<u64>> = vec![];
    for v in seeds {
        if ech.insert(v).expect("field") {
            frontier.push(v.clone());
        }
    }
    while let Some(v) = frontier.pop() {
        for img in &m.gen_images {
            let w = img.apply(&v);
            if ech.insert(&w).expect("field") {
                frontier.push(w);
            }
        }
    }
    Summand::span_field(ring, m.dim, ech.rows())
}

/// Burnside criterion: the module is absolutely irreducible iff the span of
/// the action images of all group elements is the full matrix algebra. The
/// span is grown from the identity and generator images by right
/// multiplication until the rank stabilizes.
pub fn abs_irreducible(m: &GModule) -> bool {
    if m.dim == 0 {
        return false;
    }
    let ring = m.ring();
    let d2 = m.dim * m.dim;
    let mut ech = Echelon::new(ring.clone(), d2);
    let mut frontier: Vec<Mat> = vec![];
    let ident = Mat::identity(ring.clone(), m.dim);
    for cand in std::iter::once(&ident).chain(m.gen_images.iter()) {
        if ech.insert(&cand.vectorize()).expect("field") {
            frontier.push(cand.clone());
        }
    }
    while let Some(mat) = frontier.pop() {
        if ech.rank() == d2 {
            return true;
        }
        for img in &m.gen_images {
            let prod = mat.mul(img);
            if ech.insert(&prod.vectorize()).expect("field") {
                frontier.push(prod);
            }
        }
    }
    ech.rank() == d2
}

// ---------------------------------------------------------------------------
// Meataxe
// ---------------------------------------------------------------------------

fn submodule_action(m: &GModule, basis: &Summand) -> GModule {
    let images = m
        .gen_images
        .iter()
        .map(|img| {
            let dim = basis.dim();
            let mut out = Mat::zeros(m.ring(), dim, dim);
            for (i, b) in basis.basis().iter().enumerate() {
                let coords = basis
                    .coords(&img.apply(b))
                    .expect("submodule is invariant");
                for (r, &c) in coords.iter().enumerate() {
                    out.set(r, i, c);
                }
            }
            out
        })
        .collect();
    GModule { group: m.group.clone(), dim: basis.dim(), gen_images: images, tag: ModuleTag::Custom }
}

fn quotient_action(m: &GModule, basis: &Summand) -> GModule {
    // coordinates of the quotient: the non-pivot positions of the submodule's
    // echelon basis
    let ring = m.ring();
    let pivots: Vec<usize> = {
        let mut ech = Echelon::new(ring.clone(), m.dim);
        for b in basis.basis() {
            let _ = ech.insert(b);
        }
        ech.pivots().to_vec()
    };
    let free: Vec<usize> = (0..m.dim).filter(|j| !pivots.contains(j)).collect();
    let qdim = free.len();
    let reduce = |v: &[u64]| -> Vec<u64> {
        let mut out = v.to_vec();
        for (row, &pc) in basis.basis().iter().zip(&pivots) {
            let c = out[pc];
            if c != 0 {
                crate::linalg::vec_sub_scaled(&ring, &mut out, row, c);
            }
        }
        free.iter().map(|&j| out[j]).collect()
    };
    let images = m
        .gen_images
        .iter()
        .map(|img| {
            let mut out = Mat::zeros(ring.clone(), qdim, qdim);
            for (col, &j) in free.iter().enumerate() {
                let mut e = vec![0u64; m.dim];
                e[j] = ring.one();
                let w = reduce(&img.apply(&e));
                for (r, &c) in w.iter().enumerate() {
                    out.set(r, col, c);
                }
            }
            out
        })
        .collect();
    GModule { group: m.group.clone(), dim: qdim, gen_images: images, tag: ModuleTag::Custom }
}

fn random_algebra_element(m: &GModule, rng: &mut ChaCha8Rng) -> Mat {
    let ring = m.ring();
    let q = ring.size() as u64;
    let terms = rng.random_range(2..=4usize);
    let mut acc = Mat::zeros(ring.clone(), m.dim, m.dim);
    for _ in 0..terms {
        let len = rng.random_range(0..=3usize);
        let mut word = Mat::identity(ring.clone(), m.dim);
        for _ in 0..len {
            let gi = rng.random_range(0..m.gen_images.len());
            word = word.mul(&m.gen_images[gi]);
        }
        let c = rng.random_range(1..q);
        acc = acc.add(&word.scale(c));
    }
    acc
}

/// Composition factors with multiplicities, via singular algebra elements and
/// the Norton-style dual-spin irreducibility certificate on charpoly factors
/// of multiplicity one.
pub fn chop(m: &GModule) -> Result<Vec<(GModule, usize)>> {
    chop_seeded(m, CHOP_SEED)
}

pub fn chop_seeded(m: &GModule, seed: u64) -> Result<Vec<(GModule, usize)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut leaves: Vec<GModule> = vec![];
    chop_rec(m, &mut rng, &mut leaves)?;
    // group leaves by isomorphism
    let mut grouped: Vec<(GModule, usize)> = vec![];
    for leaf in leaves {
        if let Some(slot) = grouped
            .iter_mut()
            .find(|(s, _)| s.dim == leaf.dim && !hom_space(s, &leaf).is_empty())
        {
            slot.1 += 1;
        } else {
            grouped.push((leaf, 1));
        }
    }
    grouped.sort_by_key(|(s, _)| s.dim);
    Ok(grouped)
}

fn chop_rec(m: &GModule, rng: &mut ChaCha8Rng, leaves: &mut Vec<GModule>) -> Result<()> {
    if m.dim == 0 {
        return Ok(());
    }
    if m.dim == 1 {
        leaves.push(m.clone());
        return Ok(());
    }
    let ring = m.ring();
    for _ in 0..CHOP_BUDGET {
        let xi = random_algebra_element(m, rng);
        let cp = crate::ff::Poly::new(ring.as_fq().clone(), crate::linalg::charpoly(&xi)?);
        let factors = cp.factor()?;
        for (f, mult) in &factors {
            let theta = poly_at_mat(&f.coeffs, &xi);
            let ker = kernel_field(&theta);
            if ker.is_empty() {
                continue;
            }
            let w = spin(m, &ker[..1]);
            if w.dim() < m.dim {
                let sub = submodule_action(m, &w);
                let quot = quotient_action(m, &w);
                chop_rec(&sub, rng, leaves)?;
                chop_rec(&quot, rng, leaves)?;
                return Ok(());
            }
            if *mult == 1 {
                // dual spin certificate: theta^T has the same nullity; if some
                // dual kernel vector spins to a proper dual submodule, its
                // perp is a proper submodule; otherwise M is irreducible
                let dual = m.dual();
                let kert = kernel_field(&theta.transpose());
                assert!(!kert.is_empty());
                let wd = spin(&dual, &kert[..1]);
                if wd.dim() < m.dim {
                    // perp of a dual submodule is a submodule
                    let mut rows = Mat::zeros(ring.clone(), wd.dim(), m.dim);
                    for (i, b) in wd.basis().iter().enumerate() {
                        for j in 0..m.dim {
                            rows.set(i, j, b[j]);
                        }
                    }
                    let perp = Summand::span_field(ring.clone(), m.dim, &kernel_field(&rows));
                    assert!(perp.dim() < m.dim && perp.dim() > 0);
                    let sub = submodule_action(m, &perp);
                    let quot = quotient_action(m, &perp);
                    chop_rec(&sub, rng, leaves)?;
                    chop_rec(&quot, rng, leaves)?;
                    return Ok(());
                }
                leaves.push(m.clone());
                return Ok(());
            }
        }
    }
    Err(Error::RandomnessExhausted)
}

// ---------------------------------------------------------------------------
// Hom spaces and simple submodules
// ---------------------------------------------------------------------------

/// Basis of the space of intertwiners `X: S -> M` (so `X rho_S(s) =
/// rho_M(s) X` for every generator).
pub fn hom_space(s: &GModule, m: &GModule) -> Vec<Mat> {
    assert!(Arc::ptr_eq(&s.group, &m.group) || s.group.elements() == m.group.elements());
    let ring = s.ring();
    let (dm, ds) = (m.dim, s.dim);
    let unknowns = dm * ds;
    let gens = s.gen_images.len();
    let mut sys = Mat::zeros(ring.clone(), gens * unknowns, unknowns);
    for g in 0..gens {
        let rs = &s.gen_images[g];
        let rm = &m.gen_images[g];
        // equation (a, b): sum_j x_{aj} rs[j][b] - sum_i rm[a][i] x_{ib} = 0
        for a in 0..dm {
            for b in 0..ds {
                let row = g * unknowns + a * ds + b;
                for j in 0..ds {
                    let cur = sys.at(row, a * ds + j);
                    sys.set(row, a * ds + j, ring.add(cur, rs.at(j, b)));
                }
                for i in 0..dm {
                    let cur = sys.at(row, i * ds + b);
                    sys.set(row, i * ds + b, ring.sub(cur, rm.at(a, i)));
                }
            }
        }
    }
    kernel_field(&sys)
        .into_iter()
        .map(|v| Mat::from_vec(ring.clone(), dm, ds, v))
        .collect()
}

/// All simple submodules of `M`, enumerated as the images of the nonzero
/// intertwiners from each composition factor, up to scalar. The enumeration
/// is exhaustive: every simple submodule is the image of such an intertwiner.
pub fn simple_submodules(m: &GModule) -> Result<Vec<Summand>> {
    let ring = m.ring();
    let q = ring.size() as u64;
    let factors = chop(m)?;
    let mut out: Vec<Summand> = vec![];
    for (s, _) in &factors {
        let basis = hom_space(s, m);
        let h = basis.len();
        if h == 0 {
            continue;
        }
        // canonical projective representatives: first nonzero coefficient 1
        let mut coeffs = vec![0u64; h];
        loop {
            // advance to next tuple
            let mut lead = None;
            for (i, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    lead = Some(i);
                    break;
                }
            }
            if let Some(lead) = lead {
                if coeffs[lead] == 1 {
                    let mut phi = Mat::zeros(ring.clone(), m.dim, s.dim);
                    for (c, b) in coeffs.iter().zip(&basis) {
                        if *c != 0 {
                            phi = phi.add(&b.scale(*c));
                        }
                    }
                    // a nonzero intertwiner from a simple module is injective
                    let cols: Vec<Vec<u64>> = (0..s.dim).map(|j| phi.col(j)).collect();
                    let img = Summand::span_field(ring.clone(), m.dim, &cols);
                    assert_eq!(img.dim(), s.dim, "intertwiner from a simple module is injective");
                    if !out.contains(&img) {
                        out.push(img);
                    }
                }
            }
            // increment little-endian
            let mut i = 0;
            loop {
                if i == h {
                    break;
                }
                coeffs[i] += 1;
                if coeffs[i] < q {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
            if i == h {
                break;
            }
        }
    }
    Ok(out)
}
