//! Group cohomology `H^0` and `H^1` of enumerated finite groups with
//! finite-field module coefficients.
//!
//! A 1-cocycle is determined by its values on the generators; walking the
//! BFS tree of the Cayley graph expresses `c(g)` for every `g` as a linear
//! form in the generator unknowns, and every non-tree edge contributes the
//! constraint `c(gs) = c(g) + g c(s)`. The dimension of the constraint
//! solution space is `dim Z^1`; `dim B^1 = dim M - dim H^0`.
//!
//! Coefficients are taken over the prime field; the vanishing statements we
//! care about are stable under extension scalars by flat base change, so
//! dimensions over extensions follow without separate computation.

use crate::error::{Error, Result};
use crate::repmod::{h0, GModule};

/// Default order cap for the brute-force oracle.
pub const BRUTEFORCE_CAP: usize = 300;

/// Per-element data: `rho[g]` (d x d) and the coefficient matrix `coef[g]`
/// (d x kd) expressing `c(g)` in the generator unknowns. Entries are `u8`
/// residues mod p.
struct CocycleTables {
    p: u64,
    d: usize,
    w: usize,
    rho: Vec<u8>,
    coef: Vec<u8>,
}

fn build_tables(m: &GModule) -> CocycleTables {
    let g = &m.group;
    assert!(g.has_tree(), "cocycle computation needs the BFS tree");
    let fq = &g.spec.field;
    assert!(fq.is_prime_field() && fq.p < 256, "coefficients are over a small prime field");
    let p = fq.p;
    let d = m.dim;
    let k = m.gen_images.len();
    let w = k * d;
    let order = g.order;
    let gen_rho: Vec<Vec<u8>> = m
        .gen_images
        .iter()
        .map(|img| img.entries.iter().map(|&x| x as u8).collect())
        .collect();
    let mut rho = vec![0u8; order * d * d];
    let mut coef = vec![0u8; order * d * w];
    let mut filled = vec![false; order];
    let ident = g.identity_idx() as usize;
    for i in 0..d {
        rho[ident * d * d + i * d + i] = 1;
    }
    filled[ident] = true;
    for start in 0..order as u32 {
        if filled[start as usize] {
            continue;
        }
        // walk to the nearest filled ancestor, then fill on the way back
        let mut chain = vec![start];
        let mut cur = start;
        loop {
            let (parent, _) = g.tree_edge(cur).expect("only the identity has no parent");
            if filled[parent as usize] {
                break;
            }
            chain.push(parent);
            cur = parent;
        }
        for &idx in chain.iter().rev() {
            let (parent, gi) = g.tree_edge(idx).unwrap();
            let (pi, ii) = (parent as usize, idx as usize);
            let gr = &gen_rho[gi as usize];
            // rho[idx] = rho[parent] * rho(s)
            for r in 0..d {
                for c in 0..d {
                    let mut acc = 0u32;
                    for l in 0..d {
                        acc += rho[pi * d * d + r * d + l] as u32 * gr[l * d + c] as u32;
                    }
                    rho[ii * d * d + r * d + c] = (acc % p as u32) as u8;
                }
            }
            // coef[idx] = coef[parent] with block gi incremented by rho[parent]
            let (p_off, i_off) = (pi * d * w, ii * d * w);
            if p_off < i_off {
                let (left, right) = coef.split_at_mut(i_off);
                right[..d * w].copy_from_slice(&left[p_off..p_off + d * w]);
            } else {
                let (left, right) = coef.split_at_mut(p_off);
                left[i_off..i_off + d * w].copy_from_slice(&right[..d * w]);
            }
            let base = gi as usize * d;
            for r in 0..d {
                for c in 0..d {
                    let v = coef[i_off + r * w + base + c] as u32
                        + rho[pi * d * d + r * d + c] as u32;
                    coef[i_off + r * w + base + c] = (v % p as u32) as u8;
                }
            }
            filled[ii] = true;
        }
    }
    CocycleTables { p, d, w, rho, coef }
}

/// Dense mod-p row echelon over `u8` entries.
struct EchelonP {
    p: u32,
    width: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl EchelonP {
    fn new(p: u64, width: usize) -> EchelonP {
        EchelonP { p: p as u32, width, rows: vec![], pivots: vec![] }
    }

    fn insert(&mut self, row: &[u8]) -> bool {
        let mut r = row.to_vec();
        for (er, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = r[pc] as u32;
            if c != 0 {
                for (x, &e) in r.iter_mut().zip(er) {
                    *x = ((*x as u32 + (self.p - c) * e as u32) % self.p) as u8;
                }
            }
        }
        let Some(pc) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_inv(r[pc] as u32, self.p);
        for x in r.iter_mut() {
            *x = ((*x as u32 * inv) % self.p) as u8;
        }
        for er in self.rows.iter_mut() {
            let c = er[pc] as u32;
            if c != 0 {
                for (e, &x) in er.iter_mut().zip(&r) {
                    *e = ((*e as u32 + (self.p - c) * x as u32) % self.p) as u8;
                }
            }
        }
        let pos = self.pivots.iter().position(|&q| q > pc).unwrap_or(self.rows.len());
        self.rows.insert(pos, r);
        self.pivots.insert(pos, pc);
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Basis of the nullspace of the row system.
    fn nullspace(&self) -> Vec<Vec<u8>> {
        let mut out = vec![];
        for free in 0..self.width {
            if self.pivots.contains(&free) {
                continue;
            }
            let mut v = vec![0u8; self.width];
            v[free] = 1;
            for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                v[pc] = ((self.p - row[free] as u32) % self.p) as u8;
            }
            out.push(v);
        }
        out
    }
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64;
    let mut e = p - 2;
    let pp = p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % pp;
        }
        base = base * base % pp;
        e >>= 1;
    }
    acc as u32
}

/// `dim H^1(G, M)` by Cayley-graph constraint harvesting: non-tree edges are
/// processed in passes until a complete pass leaves the solution space
/// unchanged.
pub fn h1_dim(m: &GModule) -> Result<usize> {
    let g = &m.group;
    let t = build_tables(m);
    let (d, w, p) = (t.d, t.w, t.p);
    if w == 0 {
        return Ok(0);
    }
    let mut ech = EchelonP::new(p, w);
    let mut null = identity_nullspace(w);
    loop {
        let mut changed = false;
        for idx in 0..g.order as u32 {
            let gm = g.mat_of_idx(idx);
            for (gi, gen) in g.spec.generators.iter().enumerate() {
                let child_code = g.code_of_mat(&gm.mul(gen));
                let child = g.idx_of(child_code).expect("closure");
                if g.tree_edge(child) == Some((idx, gi as u8)) {
                    continue;
                }
                // constraint rows: coef[child] - coef[idx] - rho[idx] placed
                // in block gi
                let (ci, ii) = (child as usize, idx as usize);
                let mut dirty = false;
                let mut rows: Vec<Vec<u8>> = Vec::with_capacity(d);
                for r in 0..d {
                    let mut row = vec![0u8; w];
                    for c in 0..w {
                        let v = (t.coef[ci * d * w + r * w + c] as u32 + (p as u32 - 1)
                            * t.coef[ii * d * w + r * w + c] as u32)
                            % p as u32;
                        row[c] = v as u8;
                    }
                    let base = gi * d;
                    for c in 0..d {
                        let v = (row[base + c] as u32
                            + (p as u32 - 1) * t.rho[ii * d * d + r * d + c] as u32)
                            % p as u32;
                        row[base + c] = v as u8;
                    }
                    // quick test against the current nullspace
                    if !dirty {
                        'null: for nv in &null {
                            let mut acc = 0u32;
                            for (a, b) in row.iter().zip(nv) {
                                acc += *a as u32 * *b as u32;
                            }
                            if acc % p as u32 != 0 {
                                dirty = true;
                                break 'null;
                            }
                        }
                    }
                    rows.push(row);
                }
                if dirty {
                    let mut grew = false;
                    for row in &rows {
                        grew |= ech.insert(row);
                    }
                    if grew {
                        null = ech.nullspace();
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let z1 = w - ech.rank();
    let b1 = d - h0(m).dim();
    assert!(z1 >= b1, "coboundaries are cocycles");
    Ok(z1 - b1)
}

fn identity_nullspace(w: usize) -> Vec<Vec<u8>> {
    (0..w)
        .map(|i| {
            let mut v = vec![0u8; w];
            v[i] = 1;
            v
        })
        .collect()
}

/// Brute-force oracle: solve the cocycle condition `c(gh) = c(g) + g c(h)`
/// over ALL pairs `(g, h)`, with one unknown vector per group element
/// (parametrized through the tree substitution, then every pair enforced,
/// with no early stopping).
pub fn h1_bruteforce(m: &GModule, cap: usize) -> Result<usize> {
    let g = &m.group;
    if g.order > cap {
        return Err(Error::CapExceeded { partial: g.order });
    }
    let t = build_tables(m);
    let (d, w, p) = (t.d, t.w, t.p);
    if w == 0 {
        return Ok(0);
    }
    // multiplication table
    let order = g.order;
    let mut table = vec![0u32; order * order];
    for a in 0..order {
        let ma = g.mat_of_idx(a as u32);
        for b in 0..order {
            let prod = ma.mul(&g.mat_of_idx(b as u32));
            table[a * order + b] = g.idx_of(g.code_of_mat(&prod)).expect("closure");
        }
    }
    let mut ech = EchelonP::new(p, w);
    let pw = p as u32;
    for a in 0..order {
        for b in 0..order {
            let c = table[a * order + b] as usize;
            // rows: coef[c] - coef[a] - rho[a] * coef[b]
            for r in 0..d {
                let mut row = vec![0u8; w];
                for col in 0..w {
                    let mut acc = t.coef[c * d * w + r * w + col] as u32
                        + (pw - 1) * t.coef[a * d * w + r * w + col] as u32;
                    let mut dot = 0u32;
                    for l in 0..d {
                        dot += t.rho[a * d * d + r * d + l] as u32
                            * t.coef[b * d * w + l * w + col] as u32;
                    }
                    acc += (pw - 1) * (dot % pw);
                    row[col] = (acc % pw) as u8;
                }
                ech.insert(&row);
            }
        }
    }
    let z1 = w - ech.rank();
    let b1 = d - h0(m).dim();
    assert!(z1 >= b1);
    Ok(z1 - b1)
}
