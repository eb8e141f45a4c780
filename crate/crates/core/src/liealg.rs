//! Classical Lie algebra constructions: the `gl_n = g + m` decomposition for
//! symplectic/orthogonal forms, centers of centralizers of semisimple
//! elements, the spanning sums over semisimple classes, ad-regularity,
//! root-datum good-prime checks, and the Taylor–Wiles quotient data.

use crate::error::{Error, Result};
use crate::ff::Fq;
use crate::linalg::{kernel_field, kernel_summand, smith_z, Echelon, Mat, Ring, Summand};
use crate::matgrp::{Ambient, EnumeratedGroup};
use crate::repmod::GModule;
use crate::{Parallelism, TriBool};
use std::sync::Arc;

/// The ambient decomposition data: bases of `g_hat` (the ambient group's Lie
/// algebra), `g_hat^0` (the derived group's), and the invariant complement
/// `m` of `g_hat^0 + scalars` inside `gl_n`, all in `gl_n` coordinates.
#[derive(Debug, Clone)]
pub struct ClassicalLieData {
    pub ambient: Ambient,
    pub ring: Ring,
    pub n: usize,
    pub form: Option<Mat>,
    form_inv: Option<Mat>,
    /// Lie algebra of the ambient group (gl_n, sl_n, sp_n, gsp_n, so_n).
    pub g: Summand,
    /// Lie algebra of the derived group (sl_n, sp_n, so_n).
    pub g0: Summand,
    /// Invariant complement of g0 in gl_n: {A : A^T J = J A} for Sp/SO,
    /// scalars for SL/GL.
    pub m: Summand,
    /// Rank of the derived group (dimension of fixed subalgebras of regular
    /// semisimple elements).
    pub rank_g0: usize,
    /// Rank of the ambient group (nilpotent rank of g).
    pub rank_g: usize,
}

impl ClassicalLieData {
    pub fn new(ambient: Ambient, ring: Ring, n: usize, form: Option<Mat>) -> Result<ClassicalLieData> {
        let p = ring.p();
        if p < 3 {
            return Err(Error::Unsupported("p must be odd".into()));
        }
        let n2 = n * n;
        match ambient {
            Ambient::GL | Ambient::SL => {
                if n as u64 % p == 0 {
                    return Err(Error::Unsupported(
                        "gl = sl + scalars needs p not dividing n".into(),
                    ));
                }
                // sl_n: kernel of the trace functional
                let mut tr_row = Mat::zeros(ring.clone(), 1, n2);
                for i in 0..n {
                    tr_row.set(0, i * n + i, ring.one());
                }
                let g0 = kernel_summand(&tr_row);
                let scalars = Summand::saturate(
                    ring.clone(),
                    n2,
                    &[Mat::identity(ring.clone(), n).vectorize()],
                )
                .expect("the identity spans a summand");
                let g = if ambient == Ambient::GL {
                    Summand::full(ring.clone(), n2)
                } else {
                    g0.clone()
                };
                let rank_g = if ambient == Ambient::GL { n } else { n - 1 };
                Ok(ClassicalLieData {
                    ambient,
                    ring,
                    n,
                    form: None,
                    form_inv: None,
                    g,
                    g0,
                    m: scalars,
                    rank_g0: n - 1,
                    rank_g,
                })
            }
            Ambient::Sp | Ambient::GSp | Ambient::SO | Ambient::O => {
                let j = form.ok_or_else(|| Error::AmbientMismatch("form required".into()))?;
                let jinv = j.inverse().ok_or_else(|| {
                    Error::AmbientMismatch("form must be nondegenerate".into())
                })?;
                // g0 = {A : A^T J + J A = 0}: kernel of A -> J^{-1} A^T J + A
                // m  = {A : A^T J - J A = 0}: kernel of A -> J^{-1} A^T J - A
                let mut plus = Mat::zeros(ring.clone(), n2, n2);
                let mut minus = Mat::zeros(ring.clone(), n2, n2);
                for a in 0..n {
                    for b in 0..n {
                        // image of E_{ab}: J^{-1} E_{ba} J has entries
                        // (J^{-1})_{i b} J_{a j}
                        for i in 0..n {
                            for jj in 0..n {
                                let v = ring.mul(jinv.at(i, b), j.at(a, jj));
                                let row = i * n + jj;
                                let col = a * n + b;
                                let idm = if row == col { ring.one() } else { 0 };
                                plus.set(row, col, ring.add(v, idm));
                                minus.set(row, col, ring.sub(v, idm));
                            }
                        }
                    }
                }
                let g0 = kernel_summand(&plus);
                let m = kernel_summand(&minus);
                let expected = match ambient {
                    Ambient::Sp | Ambient::GSp => n * (n + 1) / 2,
                    _ => n * (n - 1) / 2,
                };
                assert_eq!(g0.dim(), expected, "dim of sp/so");
                assert_eq!(g0.dim() + m.dim(), n2, "gl = g + m for odd p");
                let g = if ambient == Ambient::GSp {
                    // gsp = sp + scalars
                    let mut vecs: Vec<Vec<u64>> =
                        g0.basis().iter().map(|v| v.to_vec()).collect();
                    vecs.push(Mat::identity(ring.clone(), n).vectorize());
                    Summand::saturate(ring.clone(), n2, &vecs).expect("gsp is a summand")
                } else {
                    g0.clone()
                };
                let rank_g0 = n / 2;
                let rank_g = if ambient == Ambient::GSp { n / 2 + 1 } else { n / 2 };
                Ok(ClassicalLieData {
                    ambient,
                    ring,
                    n,
                    form: Some(j),
                    form_inv: Some(jinv),
                    g,
                    g0,
                    m,
                    rank_g0,
                    rank_g,
                })
            }
        }
    }

    /// Lie data for the ambient of an enumerated group.
    pub fn for_group(g: &EnumeratedGroup) -> Result<ClassicalLieData> {
        ClassicalLieData::new(g.spec.ambient, g.spec.ring(), g.spec.n, g.spec.form.clone())
    }

    /// Equivariant projection of `gl_n` onto `g0` along `m` (+ scalars).
    pub fn project_g0(&self, x: &Mat) -> Mat {
        let ring = &self.ring;
        match self.ambient {
            Ambient::GL | Ambient::SL => {
                // A - tr(A)/n
                let ninv = ring.inv(ring.from_u64(self.n as u64)).expect("p does not divide n");
                let c = ring.mul(x.trace(), ninv);
                let mut out = x.clone();
                for i in 0..self.n {
                    out.set(i, i, ring.sub(out.at(i, i), c));
                }
                out
            }
            _ => {
                // (A - J^{-1} A^T J) / 2
                let jinv = self.form_inv.as_ref().unwrap();
                let j = self.form.as_ref().unwrap();
                let t = jinv.mul(&x.transpose()).mul(j);
                let half = ring.inv(2 % ring.p()).expect("p odd");
                x.sub(&t).scale(half)
            }
        }
    }

    /// Coordinates of a matrix in the `g0` basis (None if not in `g0`).
    pub fn g0_coords(&self, x: &Mat) -> Option<Vec<u64>> {
        self.g0.coords(&x.vectorize())
    }

    pub fn g0_mat(&self, coords: &[u64]) -> Mat {
        Mat::from_vec(self.ring.clone(), self.n, self.n, self.g0.from_coords(coords))
    }

    pub fn g_coords(&self, x: &Mat) -> Option<Vec<u64>> {
        self.g.coords(&x.vectorize())
    }

    pub fn g_mat(&self, coords: &[u64]) -> Mat {
        Mat::from_vec(self.ring.clone(), self.n, self.n, self.g.from_coords(coords))
    }

    /// Matrix of `Ad(g): g0 -> g0` in `g0` coordinates.
    pub fn ad_matrix_g0(&self, g: &Mat) -> Mat {
        let ginv = g.inverse().expect("group element");
        let d = self.g0.dim();
        let mut out = Mat::zeros(self.ring.clone(), d, d);
        for (i, b) in self.g0.basis().iter().enumerate() {
            let bm = Mat::from_vec(self.ring.clone(), self.n, self.n, b.to_vec());
            let img = g.mul(&bm).mul(&ginv);
            let coords = self.g0_coords(&img).expect("Ad preserves g0");
            for (r, &c) in coords.iter().enumerate() {
                out.set(r, i, c);
            }
        }
        out
    }

    /// Matrix of `ad(a) = [a, -]` on `g` in `g` coordinates, for `a` given in
    /// `g` coordinates.
    pub fn ad_matrix_lie(&self, a_coords: &[u64]) -> Mat {
        let a = self.g_mat(a_coords);
        let d = self.g.dim();
        let mut out = Mat::zeros(self.ring.clone(), d, d);
        for (i, b) in self.g.basis().iter().enumerate() {
            let bm = Mat::from_vec(self.ring.clone(), self.n, self.n, b.to_vec());
            let img = a.comm(&bm);
            let coords = self.g_coords(&img).expect("g closed under bracket");
            for (r, &c) in coords.iter().enumerate() {
                out.set(r, i, c);
            }
        }
        out
    }

    /// Adjoint action of the group on `g0` as a `GModule`.
    pub fn adjoint_module(&self, group: &Arc<EnumeratedGroup>) -> GModule {
        let images: Vec<Mat> =
            group.spec.generators.iter().map(|g| self.ad_matrix_g0(g)).collect();
        GModule {
            group: group.clone(),
            dim: self.g0.dim(),
            gen_images: images,
            tag: crate::repmod::ModuleTag::Adjoint,
        }
    }
}

// ---------------------------------------------------------------------------
// Centers of centralizers
// ---------------------------------------------------------------------------

/// Multiplicative order of an invertible matrix.
pub fn mat_order(g: &Mat) -> u64 {
    let mut x = g.clone();
    let mut ord = 1u64;
    while !x.is_identity() {
        x = x.mul(g);
        ord += 1;
        assert!(ord < 100_000_000, "runaway matrix order");
    }
    ord
}

pub fn mat_is_semisimple(g: &Mat) -> bool {
    mat_order(g) % g.ring.p() != 0
}

/// `z(gl_n^gamma)` = span of the powers `I, gamma, ..., gamma^{n-1}`; its
/// dimension is the degree of the minimal polynomial.
pub fn z_centralizer_gl(gamma: &Mat) -> Result<Summand> {
    if !mat_is_semisimple(gamma) {
        return Err(Error::NotSemisimple);
    }
    let n = gamma.rows;
    let ring = gamma.ring.clone();
    let mut vecs = vec![];
    let mut pw = Mat::identity(ring.clone(), n);
    for _ in 0..n {
        vecs.push(pw.vectorize());
        pw = pw.mul(gamma);
    }
    Ok(Summand::span_field(ring, n * n, &vecs))
}

/// `Lie Z(M_gamma) ∩ g0`, computed in `g0` coordinates. For symplectic
/// ambients this is exactly the projection of the span of powers; for special
/// orthogonal ambients the one characterized exceptional case adjoins
/// `so(V_{±1})`, and the remaining exceptional cases are flagged as lower
/// bounds.
pub struct LieZ {
    /// subspace of g0, in g0 coordinates
    pub space: Summand,
    /// true when the value is only a lower bound (uncharacterized SO case)
    pub lower_bound: bool,
}

pub fn lie_z_of_centralizer(gamma: &Mat, lie: &ClassicalLieData) -> Result<LieZ> {
    let zgl = z_centralizer_gl(gamma)?;
    let ring = lie.ring.clone();
    let d = lie.g0.dim();
    let mut ech = Echelon::new(ring.clone(), d);
    for v in zgl.basis() {
        let x = Mat::from_vec(ring.clone(), lie.n, lie.n, v.to_vec());
        let proj = lie.project_g0(&x);
        let coords = lie.g0_coords(&proj).expect("projection lands in g0");
        let _ = ech.insert(&coords);
    }
    let mut lower_bound = false;
    if matches!(lie.ambient, Ambient::SO | Ambient::O) {
        // eigenvalue multiplicities at +1 and -1
        let ident = Mat::identity(ring.clone(), lie.n);
        let m1 = kernel_field(&gamma.sub(&ident)).len();
        let mm1 = kernel_field(&gamma.add(&ident)).len();
        let pair = (m1.min(mm1), m1.max(mm1));
        if pair == (0, 2) {
            // adjoin so(V_alpha) for the eigenvalue alpha with multiplicity 2
            let alpha_is_one = m1 == 2;
            let eig = if alpha_is_one { gamma.sub(&ident) } else { gamma.add(&ident) };
            let v_alpha = Summand::span_field(ring.clone(), lie.n, &kernel_field(&eig));
            // elements of g0 mapping V_alpha to itself and killing its
            // J-orthocomplement
            let j = lie.form.as_ref().unwrap();
            // orthocomplement: kernel of (basis of V_alpha)^T J
            let mut rows = Mat::zeros(ring.clone(), v_alpha.dim(), lie.n);
            for (i, b) in v_alpha.basis().iter().enumerate() {
                let jb = j.apply(b);
                for (jj, &val) in jb.iter().enumerate() {
                    rows.set(i, jj, val);
                }
            }
            let perp_vecs = kernel_field(&rows);
            // solve for T in g0 with T(perp) = 0 and T(V_alpha) inside
            // V_alpha, in g0 coordinates
            let basis_mats: Vec<Mat> = lie
                .g0
                .basis()
                .iter()
                .map(|v| Mat::from_vec(ring.clone(), lie.n, lie.n, v.to_vec()))
                .collect();
            let mut v_alpha_ech = Echelon::new(ring.clone(), lie.n);
            for b in v_alpha.basis() {
                let _ = v_alpha_ech.insert(b);
            }
            let mut sys: Vec<Vec<u64>> = vec![];
            for w in &perp_vecs {
                for row_i in 0..lie.n {
                    let mut row = vec![0u64; d];
                    for (c, bm) in basis_mats.iter().enumerate() {
                        row[c] = bm.apply(w)[row_i];
                    }
                    sys.push(row);
                }
            }
            for u in v_alpha.basis() {
                let mut rowset: Vec<Vec<u64>> = vec![vec![0u64; d]; lie.n];
                for (c, bm) in basis_mats.iter().enumerate() {
                    // residual of T_c(u) modulo V_alpha, linear in c
                    let red = v_alpha_ech.residual(&bm.apply(u));
                    for (ri, &val) in red.iter().enumerate() {
                        rowset[ri][c] = val;
                    }
                }
                sys.extend(rowset);
            }
            let so_v = kernel_field(&Mat::from_rows(ring.clone(), sys));
            assert_eq!(so_v.len(), 1, "so(V) of a 2-dim nondegenerate space is a line");
            for t in so_v {
                let _ = ech.insert(&t);
            }
        } else if m1 == 2 || mm1 == 2 {
            lower_bound = true;
        }
    }
    Ok(LieZ { space: Summand::span_field(ring, d, ech.rows()), lower_bound })
}

/// Regular semisimple: semisimple with fixed subalgebra of dimension equal to
/// the derived group's rank.
pub fn is_regular_semisimple(g: &Mat, lie: &ClassicalLieData) -> bool {
    if !mat_is_semisimple(g) {
        return false;
    }
    fixed_subalgebra(g, lie).dim() == lie.rank_g0
}

/// Fixed subalgebra `g0^g = ker(Ad(g) - 1)`, in g0 coordinates.
pub fn fixed_subalgebra(g: &Mat, lie: &ClassicalLieData) -> Summand {
    let ad = lie.ad_matrix_g0(g);
    let d = lie.g0.dim();
    let diff = ad.sub(&Mat::identity(lie.ring.clone(), d));
    Summand::span_field(lie.ring.clone(), d, &kernel_field(&diff))
}

#[derive(Debug, Clone)]
pub struct SpanVerdict {
    pub holds: TriBool,
    pub dim: usize,
}

fn close_under_group(
    lie: &ClassicalLieData,
    group: &EnumeratedGroup,
    ech: &mut Echelon,
) {
    let ads: Vec<Mat> = group.spec.generators.iter().map(|g| lie.ad_matrix_g0(g)).collect();
    let mut frontier: Vec<Vec<u64>> = ech.rows().to_vec();
    while let Some(v) = frontier.pop() {
        if ech.rank() == lie.g0.dim() {
            return;
        }
        for ad in &ads {
            let w = ad.apply(&v);
            if ech.insert(&w).expect("field") {
                frontier.push(w);
            }
        }
    }
}

/// Spanning condition (A): the sum over semisimple classes of
/// `Lie Z(M_gamma) ∩ g0` (closed under the group action) equals `g0`.
pub fn spanning_sum_a(
    group: &Arc<EnumeratedGroup>,
    lie: &ClassicalLieData,
    par: Parallelism,
) -> Result<SpanVerdict> {
    let reps: Vec<u32> = group
        .conjugacy_classes()
        .iter()
        .map(|c| c.rep)
        .filter(|&r| group.is_semisimple(r))
        .collect();
    let pieces: Vec<Result<LieZ>> = crate::par_map(par, reps, |r| {
        lie_z_of_centralizer(&group.mat_of_idx(r), lie)
    });
    let d = lie.g0.dim();
    let mut ech = Echelon::new(lie.ring.clone(), d);
    let mut lower_bound = false;
    for piece in pieces {
        let piece = piece?;
        lower_bound |= piece.lower_bound;
        for v in piece.space.basis() {
            let _ = ech.insert(v);
        }
    }
    close_under_group(lie, group, &mut ech);
    let dim = ech.rank();
    let holds = if dim == d {
        TriBool::True
    } else if lower_bound {
        TriBool::Indeterminate
    } else {
        TriBool::False
    };
    Ok(SpanVerdict { holds, dim })
}

/// Spanning condition (B), in the derived span form: the fixed subalgebras of
/// regular semisimple elements span `g0`.
pub fn spanning_sum_b(
    group: &Arc<EnumeratedGroup>,
    lie: &ClassicalLieData,
    par: Parallelism,
) -> Result<SpanVerdict> {
    let reps: Vec<u32> = group
        .conjugacy_classes()
        .iter()
        .map(|c| c.rep)
        .filter(|&r| is_regular_semisimple(&group.mat_of_idx(r), lie))
        .collect();
    let pieces: Vec<Summand> = crate::par_map(par, reps, |r| {
        fixed_subalgebra(&group.mat_of_idx(r), lie)
    });
    let d = lie.g0.dim();
    let mut ech = Echelon::new(lie.ring.clone(), d);
    for piece in pieces {
        for v in piece.basis() {
            let _ = ech.insert(v);
        }
    }
    close_under_group(lie, group, &mut ech);
    let dim = ech.rank();
    Ok(SpanVerdict { holds: TriBool::from_bool(dim == d), dim })
}

// ---------------------------------------------------------------------------
// Ad-regularity
// ---------------------------------------------------------------------------

/// `a` (in `g` coordinates) is ad-regular when the coefficient `c_r` of the
/// characteristic polynomial of `ad(a)` is nonzero, `r` the nilpotent rank.
pub fn is_ad_regular(a_coords: &[u64], lie: &ClassicalLieData) -> bool {
    let ad = lie.ad_matrix_lie(a_coords);
    let cp = crate::linalg::charpoly(&ad).expect("square");
    cp[lie.rank_g] != 0
}

/// Nilpotent rank: the minimal `r` with `c_r(ad a) != 0` for some `a`,
/// computed by seeded sampling until stable and certified by a witness and by
/// agreement with the ambient group's rank.
pub fn nilpotent_rank(lie: &ClassicalLieData, seed: u64) -> Result<(usize, Vec<u64>)> {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let d = lie.g.dim();
    let q = lie.ring.size() as u64;
    let mut best: Option<(usize, Vec<u64>)> = None;
    let mut stable = 0;
    for _ in 0..500 {
        let coords: Vec<u64> = (0..d).map(|_| rng.random_range(0..q)).collect();
        let ad = lie.ad_matrix_lie(&coords);
        let cp = crate::linalg::charpoly(&ad)?;
        let r = cp.iter().position(|&c| c != 0).unwrap_or(d);
        match &best {
            Some((cur, _)) if *cur <= r => stable += 1,
            _ => {
                best = Some((r, coords));
                stable = 0;
            }
        }
        if stable > 50 {
            break;
        }
    }
    let (r, witness) = best.ok_or(Error::RandomnessExhausted)?;
    if r != lie.rank_g {
        return Err(Error::Unsupported(format!(
            "sampled nilpotent rank {r} disagrees with the ambient rank {}",
            lie.rank_g
        )));
    }
    Ok((r, witness))
}

// ---------------------------------------------------------------------------
// Root data and pretty good primes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RootDatum {
    pub name: String,
    pub rank: usize,
    pub roots: Vec<Vec<i64>>,
    pub coroots: Vec<Vec<i64>>,
}

impl RootDatum {
    pub fn pairing(chi: &[i64], cochi: &[i64]) -> i64 {
        chi.iter().zip(cochi).map(|(a, b)| a * b).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.roots.len() != self.coroots.len() {
            return Err(Error::Parse("roots and coroots must pair up".into()));
        }
        for (a, av) in self.roots.iter().zip(&self.coroots) {
            if Self::pairing(a, av) != 2 {
                return Err(Error::Parse(format!("<{a:?}, {av:?}> != 2")));
            }
        }
        // reflections permute the roots
        for (a, av) in self.roots.iter().zip(&self.coroots) {
            for b in &self.roots {
                let c = Self::pairing(b, av);
                let refl: Vec<i64> =
                    b.iter().zip(a).map(|(x, y)| x - c * y).collect();
                if !self.roots.contains(&refl) {
                    return Err(Error::Parse(format!(
                        "reflection of {b:?} along {a:?} leaves the root set"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn builtin(name: &str) -> Result<RootDatum> {
        let datum = match name {
            // SL_2: X* = Z, alpha = 2 (the torus is diag(t, 1/t))
            "A1" => RootDatum {
                name: "A1".into(),
                rank: 1,
                roots: vec![vec![2], vec![-2]],
                coroots: vec![vec![1], vec![-1]],
            },
            "A1xA1" => RootDatum {
                name: "A1xA1".into(),
                rank: 2,
                roots: vec![vec![2, 0], vec![-2, 0], vec![0, 2], vec![0, -2]],
                coroots: vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            },
            // Sp_4: torus diag(a, b, 1/b, 1/a)
            "C2" => RootDatum {
                name: "C2".into(),
                rank: 2,
                roots: vec![
                    vec![1, -1],
                    vec![-1, 1],
                    vec![1, 1],
                    vec![-1, -1],
                    vec![2, 0],
                    vec![-2, 0],
                    vec![0, 2],
                    vec![0, -2],
                ],
                coroots: vec![
                    vec![1, -1],
                    vec![-1, 1],
                    vec![1, 1],
                    vec![-1, -1],
                    vec![1, 0],
                    vec![-1, 0],
                    vec![0, 1],
                    vec![0, -1],
                ],
            },
            // SO_5
            "B2" => RootDatum {
                name: "B2".into(),
                rank: 2,
                roots: vec![
                    vec![1, 0],
                    vec![-1, 0],
                    vec![0, 1],
                    vec![0, -1],
                    vec![1, 1],
                    vec![-1, -1],
                    vec![1, -1],
                    vec![-1, 1],
                ],
                coroots: vec![
                    vec![2, 0],
                    vec![-2, 0],
                    vec![0, 2],
                    vec![0, -2],
                    vec![1, 1],
                    vec![-1, -1],
                    vec![1, -1],
                    vec![-1, 1],
                ],
            },
            "GL2" => RootDatum {
                name: "GL2".into(),
                rank: 2,
                roots: vec![vec![1, -1], vec![-1, 1]],
                coroots: vec![vec![1, -1], vec![-1, 1]],
            },
            // GSp_4: torus diag(a, b, nu/b, nu/a); characters e1, e2, e0(=nu)
            "GSp4" => RootDatum {
                name: "GSp4".into(),
                rank: 3,
                roots: vec![
                    vec![1, -1, 0],
                    vec![-1, 1, 0],
                    vec![1, 1, -1],
                    vec![-1, -1, 1],
                    vec![2, 0, -1],
                    vec![-2, 0, 1],
                    vec![0, 2, -1],
                    vec![0, -2, 1],
                ],
                coroots: vec![
                    vec![1, -1, 0],
                    vec![-1, 1, 0],
                    vec![1, 1, 0],
                    vec![-1, -1, 0],
                    vec![1, 0, 0],
                    vec![-1, 0, 0],
                    vec![0, 1, 0],
                    vec![0, -1, 0],
                ],
            },
            _ => return Err(Error::Parse(format!("unknown root datum {name:?}"))),
        };
        datum.validate()?;
        Ok(datum)
    }

    /// Parse the root-datum file format: first line the rank r, then one line
    /// per root `a1 ... ar : c1 ... cr` (root : coroot).
    pub fn parse(name: &str, text: &str) -> Result<RootDatum> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let rank: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty root datum file".into()))?
            .trim()
            .parse()
            .map_err(|_| Error::Parse("first line must be the rank".into()))?;
        let mut roots = vec![];
        let mut coroots = vec![];
        for line in lines {
            let (a, b) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected 'root : coroot' in {line:?}")))?;
            let pa: std::result::Result<Vec<i64>, _> =
                a.split_whitespace().map(str::parse).collect();
            let pb: std::result::Result<Vec<i64>, _> =
                b.split_whitespace().map(str::parse).collect();
            let (pa, pb) = (
                pa.map_err(|_| Error::Parse(format!("bad root in {line:?}")))?,
                pb.map_err(|_| Error::Parse(format!("bad coroot in {line:?}")))?,
            );
            if pa.len() != rank || pb.len() != rank {
                return Err(Error::Parse(format!("row length != rank in {line:?}")));
            }
            roots.push(pa);
            coroots.push(pb);
        }
        let datum = RootDatum { name: name.into(), rank, roots, coroots };
        datum.validate()?;
        Ok(datum)
    }
}

/// Primes `l < bound` that are NOT pretty good: some subset `Phi'` of the
/// roots makes `X*/Z Phi'` or `X_*/Z (Phi')^dual` have `l`-torsion. Checked
/// by Smith normal forms over all `2^|Phi|` subsets.
pub fn pretty_good_bad_primes(datum: &RootDatum, bound: u64) -> Result<Vec<u64>> {
    let nroots = datum.roots.len();
    if nroots > 16 {
        return Err(Error::SubsetBudgetExceeded(nroots));
    }
    let mut bad = std::collections::BTreeSet::new();
    for mask in 0u32..(1 << nroots) {
        for side in 0..2 {
            let rows: Vec<Vec<i64>> = (0..nroots)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| {
                    if side == 0 {
                        datum.roots[i].clone()
                    } else {
                        datum.coroots[i].clone()
                    }
                })
                .collect();
            if rows.is_empty() {
                continue;
            }
            let snf = smith_z(&rows);
            for &d in &snf.divisors {
                let mut d = d.abs();
                let mut l = 2i64;
                while l * l <= d {
                    if d % l == 0 {
                        if (l as u64) < bound {
                            bad.insert(l as u64);
                        }
                        while d % l == 0 {
                            d /= l;
                        }
                    }
                    l += 1;
                }
                if d > 1 && (d as u64) < bound {
                    bad.insert(d as u64);
                }
            }
        }
    }
    Ok(bad.into_iter().collect())
}

// ---------------------------------------------------------------------------
// Taylor–Wiles quotient data
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwDelta {
    /// `n_v = dim Z(M_gbar) - dim Z(Ghat)`
    pub n_v: usize,
    /// order of each cyclic factor: the p-part of `q_v - 1`
    pub cyclic_order: u64,
    /// `Delta_v` as an abelian p-group: `n_v` copies of `Z/cyclic_order`
    pub factors: Vec<u64>,
}

/// Taylor–Wiles quotient data for a diagonal semisimple element of
/// `GSp_4(F_{p^k})` given by torus coordinates `(alpha, beta, nu)`, i.e.
/// `diag(alpha, beta, nu/beta, nu/alpha)`, at a place of residue size `q_v`
/// with `q_v = 1 mod p`.
pub fn tw_delta(fq: &Arc<Fq>, alpha: u64, beta: u64, nu: u64, q_v: u64) -> Result<TwDelta> {
    let p = fq.p;
    if q_v % p != 1 {
        return Err(Error::ResidueCondition(format!("q_v = {q_v} is not 1 mod p = {p}")));
    }
    if alpha == 0 || beta == 0 || nu == 0 {
        return Err(Error::NotSemisimple);
    }
    let ring = Ring::Fq(fq.clone());
    let j = crate::fixtures::sp4_form(&ring);
    let lie = ClassicalLieData::new(Ambient::GSp, ring.clone(), 4, Some(j))?;
    let binv = fq.inv(beta).unwrap();
    let ainv = fq.inv(alpha).unwrap();
    let g = Mat::from_rows(
        ring.clone(),
        vec![
            vec![alpha, 0, 0, 0],
            vec![0, beta, 0, 0],
            vec![0, 0, fq.mul(nu, binv), 0],
            vec![0, 0, 0, fq.mul(nu, ainv)],
        ],
    );
    // fixed subalgebra of Ad(g) on the full gsp_4
    let dg = lie.g.dim();
    let ginv = g.inverse().unwrap();
    let mut ad = Mat::zeros(ring.clone(), dg, dg);
    for (i, b) in lie.g.basis().iter().enumerate() {
        let bm = Mat::from_vec(ring.clone(), 4, 4, b.to_vec());
        let img = g.mul(&bm).mul(&ginv);
        let coords = lie.g_coords(&img).expect("Ad preserves gsp");
        for (r, &c) in coords.iter().enumerate() {
            ad.set(r, i, c);
        }
    }
    let fixed = kernel_field(&ad.sub(&Mat::identity(ring.clone(), dg)));
    let cent = Summand::span_field(ring.clone(), dg, &fixed);
    // center of the fixed subalgebra: x with [x, cent] = 0
    let basis_mats: Vec<Mat> = cent
        .basis()
        .iter()
        .map(|c| Mat::from_vec(ring.clone(), 4, 4, lie.g.from_coords(c)))
        .collect();
    let dim_c = cent.dim();
    let mut sys = Mat::zeros(ring.clone(), dim_c * 16, dim_c);
    for (col, x) in basis_mats.iter().enumerate() {
        for (bi, b) in basis_mats.iter().enumerate() {
            let br = x.comm(b);
            for (e, &v) in br.entries.iter().enumerate() {
                sys.set(bi * 16 + e, col, v);
            }
        }
    }
    let z_dim = kernel_field(&sys).len();
    // dim Z(GSp_4) = 1 (the scalar torus)
    let n_v = z_dim - 1;
    let e = crate::ff::valuation(q_v - 1, p);
    let cyclic = p.pow(e);
    Ok(TwDelta { n_v, cyclic_order: cyclic, factors: vec![cyclic; n_v] })
}
