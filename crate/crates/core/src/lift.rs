//! Lifting machinery over truncated local rings: Hensel factorization of
//! characteristic polynomials, idempotent-built invariant direct-summand
//! lifts, commuting-family lifts, the topological-nilpotent characterization,
//! and the `Ad(g)`-invariant Lie algebra lift `L_0` with its center.
//!
//! Coefficient rings are `Z/p^N` and the dual numbers `F_p[eps]`: finite,
//! faithful truncations on which every statement is checkable exactly (the
//! maximal ideal is nilpotent, so geometric-series inversion terminates).

use crate::error::{Error, Result};
use crate::ff::Poly;
use crate::liealg::ClassicalLieData;
use crate::linalg::{charpoly, kernel_chain, Mat, Ring, Summand};

// ---------------------------------------------------------------------------
// polynomials over a chain ring (coefficient vectors, constant first)
// ---------------------------------------------------------------------------

fn rp_trim(c: &mut Vec<u64>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

fn rp_add(ring: &Ring, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        *o = ring.add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
    }
    rp_trim(&mut out);
    out
}

fn rp_mul(ring: &Ring, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ring.add(out[i + j], ring.mul(x, y));
        }
    }
    rp_trim(&mut out);
    out
}

fn rp_scale(ring: &Ring, a: &[u64], c: u64) -> Vec<u64> {
    let mut out: Vec<u64> = a.iter().map(|&x| ring.mul(x, c)).collect();
    rp_trim(&mut out);
    out
}

fn rp_sub(ring: &Ring, a: &[u64], b: &[u64]) -> Vec<u64> {
    rp_add(ring, a, &rp_scale(ring, b, ring.neg(ring.one())))
}

// ---------------------------------------------------------------------------
// Hensel factorization
// ---------------------------------------------------------------------------

/// Extended gcd over the residue field: returns (r, s) with r*a + s*b = 1 for
/// coprime a, b.
fn bezout(a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
    let field = a.field.clone();
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(field.clone()), Poly::zero(field.clone()));
    let (mut t0, mut t1) = (Poly::zero(field.clone()), Poly::one(field.clone()));
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1);
        let ns = s0.sub(&q.mul(&s1));
        let nt = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = ns;
        t0 = t1;
        t1 = nt;
    }
    if r0.is_zero() || r0.degree() != 0 {
        return Err(Error::NotCoprime);
    }
    let inv = field.inv(r0.coeffs[0]).unwrap();
    Ok((s0.scale(inv), t0.scale(inv)))
}

/// A Hensel factorization `charpoly(f) = p * q` over the ring, with a Bezout
/// pair `p*r + q*s = 1` (exact, by geometric-series inversion in the
/// nilpotent truncation).
pub struct HenselSplit {
    pub ring: Ring,
    pub p: Vec<u64>,
    pub q: Vec<u64>,
    pub r: Vec<u64>,
    pub s: Vec<u64>,
}

/// Factor `charpoly(f)` along a monic factor `pbar` of the residue
/// characteristic polynomial, where `pbar` is coprime to its cofactor.
pub fn hensel_factor(f: &Mat, pbar: &Poly) -> Result<HenselSplit> {
    let ring = f.ring.clone();
    let nmax = ring.trunc_len();
    let res_field = ring.residue_field();
    let fqr = res_field.as_fq().clone();
    let c = charpoly(f)?;
    let cbar = Poly::new(fqr.clone(), c.iter().map(|&x| ring.residue(x)).collect());
    if pbar.is_zero() || !pbar.is_monic() {
        return Err(Error::NotCoprime);
    }
    let (qbar, rem) = cbar.divrem(pbar);
    if !rem.is_zero() {
        return Err(Error::NotCoprime);
    }
    let (rbar, sbar) = bezout(pbar, &qbar)?; // rbar*pbar + sbar*qbar = 1
    // linear Hensel lifting: p_i q_i = c mod pi^i
    let lift_poly = |x: &Poly| -> Vec<u64> { x.coeffs.to_vec() };
    let mut pcur = lift_poly(pbar);
    let mut qcur = lift_poly(&qbar);
    for i in 1..nmax {
        let prod = rp_mul(&ring, &pcur, &qcur);
        let diff = rp_sub(&ring, &c, &prod);
        // divide by pi^i exactly and reduce to the residue field
        let ebar: Vec<u64> = diff
            .iter()
            .map(|&x| {
                if x == 0 {
                    0
                } else {
                    debug_assert!(ring.val(x) >= i);
                    ring.residue(ring.div_exact(x, ring.mul_pi_pow(ring.one(), i)))
                }
            })
            .collect();
        let ebar = Poly::new(fqr.clone(), ebar);
        if ebar.is_zero() {
            continue;
        }
        // solve pbar*dq + qbar*dp = ebar with deg dp < deg pbar
        let dp = sbar.mul(&ebar).rem(pbar);
        let num = ebar.sub(&qbar.mul(&dp));
        let (dq, rem) = num.divrem(pbar);
        assert!(rem.is_zero(), "exact division in the Hensel step");
        let scale_up = |x: &Poly| -> Vec<u64> {
            x.coeffs.iter().map(|&v| ring.mul_pi_pow(ring.from_u64(v), i)).collect()
        };
        pcur = rp_add(&ring, &pcur, &scale_up(&dp));
        qcur = rp_add(&ring, &qcur, &scale_up(&dq));
    }
    debug_assert_eq!(rp_mul(&ring, &pcur, &qcur), {
        let mut cc = c.clone();
        rp_trim(&mut cc);
        cc
    });
    // Bezout over the ring: invert 1 + h by the finite geometric series
    let rlift = lift_poly(&rbar);
    let slift = lift_poly(&sbar);
    let mut h = rp_add(&ring, &rp_mul(&ring, &pcur, &rlift), &rp_mul(&ring, &qcur, &slift));
    h = rp_sub(&ring, &h, &[ring.one()]);
    let mut inv = vec![ring.one()];
    let mut pw = vec![ring.one()];
    for _ in 1..nmax {
        pw = rp_scale(&ring, &rp_mul(&ring, &pw, &h), ring.neg(ring.one()));
        inv = rp_add(&ring, &inv, &pw);
    }
    let r = rp_mul(&ring, &rlift, &inv);
    let s = rp_mul(&ring, &slift, &inv);
    let check = rp_add(&ring, &rp_mul(&ring, &pcur, &r), &rp_mul(&ring, &qcur, &s));
    assert_eq!(check, vec![ring.one()], "Bezout identity holds exactly");
    Ok(HenselSplit { ring, p: pcur, q: qcur, r, s })
}

// ---------------------------------------------------------------------------
// Invariant summand lifts
// ---------------------------------------------------------------------------

/// The invariant lift with its defining idempotent `e2 = q(f) s(f)`.
pub struct InvariantLift {
    pub summand: Summand,
    pub idempotent: Mat,
}

/// The unique `f`-invariant direct summand lift of `ker(pbar(fbar))`.
pub fn invariant_summand_lift(f: &Mat, pbar: &Poly) -> Result<InvariantLift> {
    let split = hensel_factor(f, pbar)?;
    let ring = f.ring.clone();
    let e2 = crate::linalg::poly_at_mat(&split.q, f).mul(&crate::linalg::poly_at_mat(&split.s, f));
    debug_assert!(e2.mul(&e2) == e2, "e2 is idempotent");
    debug_assert!(e2.mul(f) == f.mul(&e2));
    let cols: Vec<Vec<u64>> = (0..f.cols).map(|j| e2.col(j)).collect();
    let summand = Summand::saturate(ring, f.rows, &cols)
        .expect("the image of an idempotent is a direct summand");
    Ok(InvariantLift { summand, idempotent: e2 })
}

/// Generalized eigenspace factor `(x - lambda)^m` of the residue
/// characteristic polynomial (m = 0 gives the zero idempotent).
fn eigen_factor(f: &Mat, lambda: u64) -> Result<(Poly, usize)> {
    let ring = f.ring.clone();
    let res_field = ring.residue_field();
    let fqr = res_field.as_fq().clone();
    let c = charpoly(f)?;
    let cbar = Poly::new(fqr.clone(), c.iter().map(|&x| ring.residue(x)).collect());
    let lin = Poly::x_minus(fqr.clone(), lambda);
    let mut mult = 0usize;
    let mut cur = cbar;
    loop {
        let (q, r) = cur.divrem(&lin);
        if !r.is_zero() {
            break;
        }
        mult += 1;
        cur = q;
    }
    let mut pb = Poly::one(fqr);
    for _ in 0..mult {
        pb = pb.mul(&lin);
    }
    Ok((pb, mult))
}

/// Lift of `⊕_{lambda in S} V_lambda` for a commuting family, as the image of
/// the sum over tuples of products of the per-matrix eigen idempotents.
pub fn family_lift(fs: &[Mat], tuples: &[Vec<u64>]) -> Result<Summand> {
    assert!(!fs.is_empty());
    let ring = fs[0].ring.clone();
    let n = fs[0].rows;
    for (i, a) in fs.iter().enumerate() {
        for b in &fs[i + 1..] {
            if a.mul(b) != b.mul(a) {
                return Err(Error::NotCommuting);
            }
        }
    }
    // residues must split over the prime field
    let res_field = ring.residue_field();
    let fqr = res_field.as_fq().clone();
    for f in fs {
        let c = charpoly(f)?;
        let cbar = Poly::new(fqr.clone(), c.iter().map(|&x| ring.residue(x)).collect());
        for (fac, _) in cbar.factor()? {
            if fac.degree() > 1 {
                return Err(Error::EigenvaluesNotRational);
            }
        }
    }
    let mut total = Mat::zeros(ring.clone(), n, n);
    for tuple in tuples {
        assert_eq!(tuple.len(), fs.len());
        let mut e = Mat::identity(ring.clone(), n);
        for (f, &lambda) in fs.iter().zip(tuple) {
            let (pb, mult) = eigen_factor(f, ring.residue(lambda))?;
            if mult == 0 {
                e = Mat::zeros(ring.clone(), n, n);
                break;
            }
            let lift = invariant_summand_lift(f, &pb)?;
            e = e.mul(&lift.idempotent);
        }
        total = total.add(&e);
    }
    debug_assert!(total.mul(&total) == total, "orthogonal idempotents sum to an idempotent");
    for f in fs {
        debug_assert!(total.mul(f) == f.mul(&total));
    }
    let cols: Vec<Vec<u64>> = (0..n).map(|j| total.col(j)).collect();
    Summand::saturate(ring, n, &cols).ok_or(Error::NotCoprime)
}

/// Topologically nilpotent part: the invariant lift of the generalized
/// 0-eigenspace of the residue. Membership is equivalently `f^{nN} v = 0`.
pub fn topnil_part(f: &Mat) -> Result<InvariantLift> {
    let ring = f.ring.clone();
    let (pb, mult) = eigen_factor(f, 0)?;
    if mult == 0 {
        return Ok(InvariantLift {
            summand: Summand::zero(ring.clone(), f.rows),
            idempotent: Mat::zeros(ring, f.rows, f.rows),
        });
    }
    invariant_summand_lift(f, &pb)
}

/// The convergence test from the topological-nilpotent characterization:
/// in the truncation, `f^m(v) -> 0` is exactly `f^{nN}(v) = 0`.
pub fn is_topnil_vector(f: &Mat, v: &[u64]) -> bool {
    let e = (f.rows as u32) * f.ring.trunc_len();
    let fp = f.pow(e as u64);
    fp.apply(v).iter().all(|&x| x == 0)
}

// ---------------------------------------------------------------------------
// The Ad(g)-invariant Lie algebra lift
// ---------------------------------------------------------------------------

/// `g_A = L0 + L1` with both summands `Ad(g)`-stable; `L0` reduces to the
/// fixed space of `Ad(gbar)` and is a Lie subalgebra.
pub struct LieLift {
    pub ring: Ring,
    pub g: Mat,
    /// L0, in Lie-algebra coordinates of the datum used to build the lift
    pub l0: Summand,
    pub l1: Summand,
}

/// Build the `Ad(g)`-invariant lift inside the Lie algebra `lie.g0` (which
/// must be constructed over the same truncated ring as `g`).
pub fn l0_of(g: &Mat, lie: &ClassicalLieData) -> Result<LieLift> {
    let ring = g.ring.clone();
    assert_eq!(ring, lie.ring);
    let res = ring.residue_field();
    let gbar = g.reduce_to(&res);
    if !crate::liealg::mat_is_semisimple(&gbar) {
        return Err(Error::ResidueNotSemisimple);
    }
    let ad = lie.ad_matrix_g0(g);
    let d = lie.g0.dim();
    let f = ad.sub(&Mat::identity(ring.clone(), d));
    let lift = topnil_part(&f)?;
    let e1 = Mat::identity(ring.clone(), d).sub(&lift.idempotent);
    let cols: Vec<Vec<u64>> = (0..d).map(|j| e1.col(j)).collect();
    let l1 = Summand::saturate(ring.clone(), d, &cols)
        .expect("complementary idempotent image is a summand");
    assert_eq!(lift.summand.dim() + l1.dim(), d);
    Ok(LieLift { ring, g: g.clone(), l0: lift.summand, l1 })
}

impl LieLift {
    /// Exact bracket closure `[L0, L0] ⊆ L0` (not merely mod the maximal
    /// ideal).
    pub fn bracket_closed(&self, lie: &ClassicalLieData) -> bool {
        let mats: Vec<Mat> = self
            .l0
            .basis()
            .iter()
            .map(|c| lie.g0_mat(c))
            .collect();
        for (i, a) in mats.iter().enumerate() {
            for b in &mats[i + 1..] {
                let br = a.comm(b);
                let coords = match lie.g0_coords(&br) {
                    Some(c) => c,
                    None => return false,
                };
                if !self.l0.contains(&coords) {
                    return false;
                }
            }
        }
        true
    }

    /// Reduction of `L0` modulo the maximal ideal.
    pub fn l0_residue(&self) -> Summand {
        self.l0.reduce_to(&self.ring.residue_field())
    }
}

/// Center of `L0`: the saturated solution space of `[x, L0] = 0` inside
/// `L0`. Its reduction has dimension `dim z(L0bar)` by construction, which
/// is the residue-level dimension equality of the center lemma.
pub fn center_of_l0(lift: &LieLift, lie: &ClassicalLieData) -> Summand {
    let ring = lift.ring.clone();
    let r = lift.l0.dim();
    let dgl = lie.n * lie.n;
    if r == 0 {
        return Summand::zero(ring, lie.g0.dim());
    }
    let basis_mats: Vec<Mat> = lift.l0.basis().iter().map(|c| lie.g0_mat(c)).collect();
    // unknowns: coordinates y in the L0 basis; constraints: [sum y_a B_a, B_b]
    // = 0 for all b, expressed in gl coordinates
    let mut sys = Mat::zeros(ring.clone(), r * dgl, r);
    for (a, ba) in basis_mats.iter().enumerate() {
        for (b, bb) in basis_mats.iter().enumerate() {
            let br = ba.comm(bb);
            for (e, &v) in br.entries.iter().enumerate() {
                sys.set(b * dgl + e, a, v);
            }
        }
    }
    let ker = kernel_chain(&sys);
    let vecs: Vec<Vec<u64>> = ker
        .saturation
        .basis()
        .iter()
        .map(|y| lift.l0.from_coords(y))
        .collect();
    Summand::saturate(ring, lie.g0.dim(), &vecs)
        .expect("saturated center is a summand")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Fq;
    use crate::matgrp::Ambient;

    fn z9() -> Ring {
        Ring::zmod(3, 2).unwrap()
    }

    fn f3poly(coeffs: Vec<u64>) -> Poly {
        Poly::new(Fq::prime(3).unwrap(), coeffs)
    }

    #[test]
    fn hensel_diagonal() {
        // f = diag(1,2) over Z/9, split at (x-1): p = x-1, q = x-2
        let f = Mat::from_int_rows(z9(), &[vec![1, 0], vec![0, 2]]);
        let split = hensel_factor(&f, &f3poly(vec![2, 1])).unwrap();
        assert_eq!(split.p, vec![8, 1]); // x - 1
        assert_eq!(split.q, vec![7, 1]); // x - 2
    }

    #[test]
    fn hensel_nontrivial_roots() {
        // f = [[1,1],[3,2]] over Z/9: charpoly x^2 - 3x - 1 has mod-9 roots
        // 7 and 5 (exhaustive search oracle below)
        let f = Mat::from_int_rows(z9(), &[vec![1, 1], vec![3, 2]]);
        let mut roots = vec![];
        for x in 0..9u64 {
            if (x * x + 9 * 9 - 3 * x - 1) % 9 == 0 {
                roots.push(x);
            }
        }
        assert_eq!(roots, vec![5, 7]);
        // residue split at the eigenvalue-1 part (x - 1 over F_3)
        let split = hensel_factor(&f, &f3poly(vec![2, 1])).unwrap();
        assert_eq!(split.p, vec![2, 1]); // x - 7 = x + 2
        assert_eq!(split.q, vec![4, 1]); // x - 5 = x + 4
    }

    #[test]
    fn hensel_repeated_residue_factor_ok() {
        // (x-1)^2 as pbar is accepted when the cofactor is coprime
        let f = Mat::from_int_rows(
            z9(),
            &[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 2]],
        );
        let pbar = f3poly(vec![1, 1, 1]); // (x-1)^2 = x^2+x+1 over F_3
        let split = hensel_factor(&f, &pbar).unwrap();
        // p*q = charpoly exactly
        let ring = z9();
        let prod = rp_mul(&ring, &split.p, &split.q);
        let mut c = charpoly(&f).unwrap();
        rp_trim(&mut c);
        assert_eq!(prod, c);
        // non-coprime split rejected
        let bad = f3poly(vec![2, 1]); // x - 1 leaves cofactor (x-1)(x-2)
        assert!(matches!(hensel_factor(&f, &bad), Err(Error::NotCoprime)));
    }

    #[test]
    fn invariant_lift_examples() {
        // f = diag(1,2) over Z/9, target ker(fbar - 1) -> span{(1,0)}
        let f = Mat::from_int_rows(z9(), &[vec![1, 0], vec![0, 2]]);
        let lift = invariant_summand_lift(&f, &f3poly(vec![2, 1])).unwrap();
        assert_eq!(lift.summand.dim(), 1);
        assert!(lift.summand.contains(&[1, 0]));

        // f = [[1,1],[3,2]], target ker(fbar - 1) -> span{(1,6)}, unique by
        // brute force over all 1-dim f-invariant direct summands of (Z/9)^2
        let f = Mat::from_int_rows(z9(), &[vec![1, 1], vec![3, 2]]);
        let lift = invariant_summand_lift(&f, &f3poly(vec![2, 1])).unwrap();
        assert_eq!(lift.summand.dim(), 1);
        assert!(lift.summand.contains(&[1, 6]));
        let found = rank1_invariant_summands(&f)
            .into_iter()
            .filter(|s| {
                let red = s.reduce_to(&Ring::prime_field(3).unwrap());
                red.contains(&[1, 0])
            })
            .collect::<Vec<_>>();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0], lift.summand);
    }

    /// All rank-1 f-invariant direct summands of (Z/p^2)^2.
    fn rank1_invariant_summands(f: &Mat) -> Vec<Summand> {
        let ring = f.ring.clone();
        let size = ring.size() as u64;
        let mut out = vec![];
        let mut gens: Vec<Vec<u64>> = vec![];
        for t in 0..size {
            gens.push(vec![1, t]);
        }
        let p = ring.p();
        for s in 0..p {
            gens.push(vec![s * p, 1]);
        }
        for v in gens {
            let s = Summand::saturate(ring.clone(), 2, &[v]).unwrap();
            let fv = f.apply(&s.basis()[0]);
            if s.contains(&fv) && !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }

    #[test]
    fn dual_numbers_lift() {
        // f = diag(1,2) + eps*E21 over F_3[eps]: the eigenvalue-1 lift is
        // span{(1, 2 eps)}, solved directly and verified f-stable
        let ring = Ring::dual(3).unwrap();
        let eps = ring.uniformizer();
        let mut f = Mat::from_int_rows(ring.clone(), &[vec![1, 0], vec![0, 2]]);
        f.set(1, 0, eps);
        let lift = invariant_summand_lift(&f, &f3poly(vec![2, 1])).unwrap();
        assert_eq!(lift.summand.dim(), 1);
        let two_eps = ring.mul(ring.from_u64(2), eps);
        assert!(lift.summand.contains(&[1, two_eps]));
        let fv = f.apply(&[1, two_eps]);
        assert!(lift.summand.contains(&fv));
    }

    #[test]
    fn family_lift_examples() {
        let ring = z9();
        // single matrix: agrees with the invariant lift
        let f = Mat::from_int_rows(ring.clone(), &[vec![1, 0], vec![0, 2]]);
        let fam = family_lift(std::slice::from_ref(&f), &[vec![1]]).unwrap();
        let inv = invariant_summand_lift(&f, &f3poly(vec![2, 1])).unwrap();
        assert_eq!(fam, inv.summand);
        // fs = {diag(1,2), diag(2,2)}, S = {(1,2)} -> span{(1,0)}
        let f2 = Mat::from_int_rows(ring.clone(), &[vec![2, 0], vec![0, 2]]);
        let fam = family_lift(&[f.clone(), f2], &[vec![1, 2]]).unwrap();
        assert_eq!(fam.dim(), 1);
        assert!(fam.contains(&[1, 0]));
        // commuting conjugated diagonals over Z/25
        let z25 = Ring::zmod(5, 2).unwrap();
        let h = Mat::from_int_rows(z25.clone(), &[vec![1, 3], vec![1, 4]]);
        let hinv = h.inverse().unwrap();
        let d1 = Mat::from_int_rows(z25.clone(), &[vec![1, 0], vec![0, 2]]);
        let d2 = Mat::from_int_rows(z25.clone(), &[vec![3, 0], vec![0, 3]]);
        let c1 = h.mul(&d1).mul(&hinv);
        let c2 = h.mul(&d2).mul(&hinv);
        let fam = family_lift(&[c1, c2], &[vec![1, 3]]).unwrap();
        // expected: h * span{(1,0)}
        let expect = Summand::saturate(z25, 2, &[h.col(0)]).unwrap();
        assert_eq!(fam, expect);
        // non-commuting rejected
        let a = Mat::from_int_rows(ring.clone(), &[vec![1, 1], vec![0, 1]]);
        let b = Mat::from_int_rows(ring, &[vec![1, 0], vec![1, 1]]);
        assert!(matches!(family_lift(&[a, b], &[vec![1, 1]]), Err(Error::NotCommuting)));
    }

    #[test]
    fn topnil_examples() {
        let ring = z9();
        // nilpotent: full space
        let f = Mat::from_int_rows(ring.clone(), &[vec![0, 1], vec![0, 0]]);
        assert!(topnil_part(&f).unwrap().summand.is_full());
        // diag(2, 3) over Z/9: 3 is topologically nilpotent
        let f = Mat::from_int_rows(ring.clone(), &[vec![2, 0], vec![0, 3]]);
        let t = topnil_part(&f).unwrap().summand;
        assert_eq!(t.dim(), 1);
        assert!(t.contains(&[0, 1]));
        // iterate twice: image lands in 3*(Z/9), then 0
        assert!(is_topnil_vector(&f, &[0, 1]));
        assert!(!is_topnil_vector(&f, &[1, 0]));
        let f2v = f.pow(2).apply(&[0, 1]);
        assert!(f2v.iter().all(|&x| x == 0));
    }

    fn sp4_lie_over(ring: &Ring) -> ClassicalLieData {
        let j = crate::fixtures::sp4_form(ring);
        ClassicalLieData::new(Ambient::Sp, ring.clone(), 4, Some(j)).unwrap()
    }

    #[test]
    fn l0_examples() {
        // over Z/9, g = I + 3X for X in sp_4 is exactly symplectic (3^2 = 0)
        // and has residue I, so L0 is everything
        let z9r = z9();
        let lie9 = sp4_lie_over(&z9r);
        let x = lie9.g0_mat(&{
            let mut c = vec![0u64; 10];
            c[0] = 1;
            c[3] = 2;
            c
        });
        let g = Mat::identity(z9r.clone(), 4).add(&x.scale(3));
        let lift = l0_of(&g, &lie9).unwrap();
        assert_eq!(lift.l0.dim(), 10);
        assert!(lift.bracket_closed(&lie9));
        // diagonal regular semisimple lift: L0 = the torus subalgebra. The
        // residue must have four distinct eigenvalues, which needs p >= 7
        // for a rational diagonal; diag(2, 3, 1/3, 1/2) over Z/49
        let z49 = Ring::zmod(7, 2).unwrap();
        let lie49 = sp4_lie_over(&z49);
        let g = Mat::from_int_rows(
            z49.clone(),
            &[vec![2, 0, 0, 0], vec![0, 3, 0, 0], vec![0, 0, 33, 0], vec![0, 0, 0, 25]],
        );
        let lift = l0_of(&g, &lie49).unwrap();
        assert_eq!(lift.l0.dim(), 2);
        assert!(lift.bracket_closed(&lie49));
        // center of the torus is the torus itself (abelian)
        let c = center_of_l0(&lift, &lie49);
        assert_eq!(c.dim(), 2);
        // center of the full sp_4 is zero (sp_4 simple, p > 2)
        let z27 = Ring::zmod(3, 3).unwrap();
        let lie = sp4_lie_over(&z27);
        let gid = Mat::identity(z27.clone(), 4);
        let full = l0_of(&gid, &lie).unwrap();
        assert_eq!(full.l0.dim(), 10);
        assert_eq!(center_of_l0(&full, &lie).dim(), 0);
        // non-semisimple residue rejected
        let u = Mat::from_int_rows(
            z27,
            &[vec![1, 1, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 2], vec![0, 0, 0, 1]],
        );
        assert!(matches!(l0_of(&u, &lie), Err(Error::ResidueNotSemisimple)));
    }

    #[test]
    fn l0_block_involution() {
        // g = h * diag(1,-1,-1,1) * h^-1 * (unit perturbation): L0 has the
        // dimension of Lie(Sp_2 x Sp_2) = 6
        let z9 = z9();
        let lie = sp4_lie_over(&z9);
        let d = Mat::from_int_rows(
            z9.clone(),
            &[vec![1, 0, 0, 0], vec![0, 8, 0, 0], vec![0, 0, 8, 0], vec![0, 0, 0, 1]],
        );
        // conjugate by a group element to make it non-diagonal: use a
        // transvection lift
        let h = crate::fixtures::sp4_gens_over(&z9).remove(0);
        let g = h.mul(&d).mul(&h.inverse().unwrap());
        let lift = l0_of(&g, &lie).unwrap();
        assert_eq!(lift.l0.dim(), 6);
        assert!(lift.bracket_closed(&lie));
        assert_eq!(center_of_l0(&lift, &lie).dim(), 0);
        // reduction equals the residue fixed space
        let res = lift.l0_residue();
        let lie3 = sp4_lie_over(&Ring::prime_field(3).unwrap());
        let fixed = crate::liealg::fixed_subalgebra(&g.reduce_to(&Ring::prime_field(3).unwrap()), &lie3);
        assert_eq!(res, fixed);
    }

    #[test]
    fn monotone_containment() {
        // any f-invariant summand M with Mbar ⊆ Nbar satisfies M ⊆ N
        let f = Mat::from_int_rows(z9(), &[vec![1, 1], vec![3, 2]]);
        let lift = invariant_summand_lift(&f, &f3poly(vec![2, 1])).unwrap();
        let nbar = lift.summand.reduce_to(&Ring::prime_field(3).unwrap());
        for m in rank1_invariant_summands(&f) {
            let mbar = m.reduce_to(&Ring::prime_field(3).unwrap());
            if nbar.contains_summand(&mbar) {
                assert!(lift.summand.contains_summand(&m));
            }
        }
    }
}
