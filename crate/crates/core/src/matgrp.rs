//! Matrix-group engine: closure enumeration, conjugacy classes, structural
//! subgroups, seeded subgroup search, similitude data.
//!
//! Elements are canonically encoded by packing the row-major entry codes
//! base `q = |field|` into a `u128`; the element list is kept sorted by code,
//! which fixes a deterministic ordering everywhere downstream.

use crate::error::{Error, Result};
use crate::ff::Fq;
use crate::linalg::{charpoly, Mat, Ring};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

/// Default enumeration cap on the group order.
pub const DEFAULT_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ambient {
    GL,
    SL,
    Sp,
    GSp,
    SO,
    O,
}

impl Ambient {
    pub fn needs_form(self) -> bool {
        matches!(self, Ambient::Sp | Ambient::GSp | Ambient::SO | Ambient::O)
    }

    pub fn is_alternating(self) -> bool {
        matches!(self, Ambient::Sp | Ambient::GSp)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Ambient::GL => "GL",
            Ambient::SL => "SL",
            Ambient::Sp => "Sp",
            Ambient::GSp => "GSp",
            Ambient::SO => "SO",
            Ambient::O => "O",
        }
    }

    pub fn parse(s: &str) -> Result<Ambient> {
        Ok(match s {
            "GL" => Ambient::GL,
            "SL" => Ambient::SL,
            "Sp" => Ambient::Sp,
            "GSp" => Ambient::GSp,
            "SO" => Ambient::SO,
            "O" => Ambient::O,
            _ => return Err(Error::Parse(format!("unknown ambient {s:?}"))),
        })
    }
}

/// Generator-matrix description of a matrix group.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub field: Arc<Fq>,
    pub n: usize,
    pub ambient: Ambient,
    /// Form matrix J for symplectic/orthogonal ambients.
    pub form: Option<Mat>,
    pub generators: Vec<Mat>,
}

impl GroupSpec {
    pub fn ring(&self) -> Ring {
        Ring::Fq(self.field.clone())
    }

    /// Determinant over the field, via the charpoly constant term.
    pub fn det(m: &Mat) -> u64 {
        let c0 = charpoly(m).expect("square")[0];
        if m.rows % 2 == 0 {
            c0
        } else {
            m.ring.neg(c0)
        }
    }

    /// Similitude factor of `g` with respect to `J`: the unit `nu` with
    /// `g^T J g = nu J`, if one exists.
    pub fn similitude_of(&self, g: &Mat) -> Option<u64> {
        let j = self.form.as_ref()?;
        let t = g.transpose().mul(j).mul(g);
        let (mut i0, mut j0) = (0, 0);
        'find: for i in 0..self.n {
            for jj in 0..self.n {
                if j.at(i, jj) != 0 {
                    (i0, j0) = (i, jj);
                    break 'find;
                }
            }
        }
        let ring = self.ring();
        let nu = ring.mul(t.at(i0, j0), ring.inv(j.at(i0, j0))?);
        (t == j.scale(nu) && nu != 0).then_some(nu)
    }

    /// Check all structural invariants; returns the list of generator
    /// similitudes for GSp.
    pub fn validate(&self) -> Result<Vec<u64>> {
        let ring = self.ring();
        if self.field.p < 3 {
            return Err(Error::InvalidGenerator("p must be odd".into()));
        }
        if self.n == 0 || self.n > 8 {
            return Err(Error::InvalidGenerator(format!("unsupported matrix size {}", self.n)));
        }
        let q = self.field.q();
        let mut cap = 1u128;
        for _ in 0..self.n * self.n {
            cap = cap
                .checked_mul(q)
                .ok_or_else(|| Error::InvalidGenerator("element codes exceed u128".into()))?;
        }
        if self.ambient.needs_form() {
            let j = self
                .form
                .as_ref()
                .ok_or_else(|| Error::InvalidGenerator("form matrix required".into()))?;
            if j.rows != self.n || j.cols != self.n || j.ring != ring {
                return Err(Error::InvalidGenerator("form matrix has wrong shape or ring".into()));
            }
            if crate::linalg::rank_field(j) != self.n {
                return Err(Error::InvalidGenerator("form matrix is degenerate".into()));
            }
            let jt = j.transpose();
            if self.ambient.is_alternating() {
                if jt != j.neg() || (0..self.n).any(|i| j.at(i, i) != 0) {
                    return Err(Error::InvalidGenerator("form must be alternating".into()));
                }
            } else if jt != *j {
                return Err(Error::InvalidGenerator("form must be symmetric".into()));
            }
        } else if self.form.is_some() {
            return Err(Error::InvalidGenerator("form matrix not allowed for GL/SL".into()));
        }
        let mut nus = vec![];
        for (idx, g) in self.generators.iter().enumerate() {
            if g.rows != self.n || g.cols != self.n || g.ring != ring {
                return Err(Error::InvalidGenerator(format!("generator {idx} has wrong shape")));
            }
            if g.inverse().is_none() {
                return Err(Error::InvalidGenerator(format!("generator {idx} is singular")));
            }
            match self.ambient {
                Ambient::GL => {}
                Ambient::SL => {
                    if Self::det(g) != 1 {
                        return Err(Error::InvalidGenerator(format!(
                            "generator {idx} has determinant != 1"
                        )));
                    }
                }
                Ambient::Sp | Ambient::SO | Ambient::O => {
                    let nu = self.similitude_of(g);
                    if nu != Some(1) {
                        return Err(Error::InvalidGenerator(format!(
                            "generator {idx} does not preserve the form"
                        )));
                    }
                    if self.ambient == Ambient::SO && Self::det(g) != 1 {
                        return Err(Error::InvalidGenerator(format!(
                            "generator {idx} has determinant != 1"
                        )));
                    }
                    nus.push(1);
                }
                Ambient::GSp => {
                    let nu = self.similitude_of(g).ok_or_else(|| {
                        Error::InvalidGenerator(format!("generator {idx} does not scale the form"))
                    })?;
                    nus.push(nu);
                }
            }
        }
        Ok(nus)
    }
}

// ---------------------------------------------------------------------------
// raw matrix kernels on entry slices
// ---------------------------------------------------------------------------

fn raw_mul(fq: &Fq, n: usize, a: &[u64], b: &[u64], out: &mut [u64]) {
    if fq.is_prime_field() {
        let p = fq.p;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u64;
                for l in 0..n {
                    acc += a[i * n + l] * b[l * n + j];
                }
                out[i * n + j] = acc % p;
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u64;
                for l in 0..n {
                    acc = fq.add(acc, fq.mul(a[i * n + l], b[l * n + j]));
                }
                out[i * n + j] = acc;
            }
        }
    }
}

fn encode_entries(q: u64, entries: &[u64]) -> u128 {
    let mut code = 0u128;
    for &e in entries.iter().rev() {
        code = code * q as u128 + e as u128;
    }
    code
}

fn decode_entries(q: u64, n2: usize, mut code: u128, out: &mut [u64]) {
    for slot in out.iter_mut().take(n2) {
        *slot = (code % q as u128) as u64;
        code /= q as u128;
    }
}

/// Conjugacy class: representative (index into the sorted element list) and
/// class size.
#[derive(Debug, Clone, Copy)]
pub struct ConjClass {
    pub rep: u32,
    pub size: u32,
}

/// Fully enumerated matrix group with deterministic (sorted-code) element
/// ordering. Structural data (classes, center, derived subgroup) is computed
/// on first use and cached; the value is immutable afterwards.
pub struct EnumeratedGroup {
    pub spec: GroupSpec,
    elements: Vec<u128>,
    /// packed `(parent_index << 8) | generator_index` per element, when the
    /// BFS tree was requested; the identity has generator index 0xff.
    tree: Option<Vec<u64>>,
    pub order: usize,
    gen_nus: Vec<u64>,
    classes: OnceLock<Vec<ConjClass>>,
    center: OnceLock<Vec<u32>>,
    derived: OnceLock<Vec<u128>>,
    abelian: OnceLock<AbelianQuotient>,
}

impl std::fmt::Debug for EnumeratedGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "EnumeratedGroup(order={}, n={}, {})",
            self.order,
            self.spec.n,
            self.spec.ambient.as_str()
        )
    }
}

/// Enumerate the closure of the generators under multiplication.
pub fn enumerate(spec: GroupSpec, cap: usize, want_tree: bool) -> Result<EnumeratedGroup> {
    let gen_nus = spec.validate()?;
    let fq = spec.field.clone();
    let q = fq.q() as u64;
    let n = spec.n;
    let n2 = n * n;
    let gens: Vec<Vec<u64>> = spec.generators.iter().map(|g| g.entries.clone()).collect();

    let ident: Vec<u64> = {
        let mut v = vec![0u64; n2];
        for i in 0..n {
            v[i * n + i] = 1;
        }
        v
    };
    let id_code = encode_entries(q, &ident);
    let mut codes: Vec<u128> = vec![id_code];
    let mut seen: HashMap<u128, u32> = HashMap::new();
    seen.insert(id_code, 0);
    let mut parents: Vec<u64> = if want_tree { vec![0xff] } else { vec![] };

    let mut buf_a = vec![0u64; n2];
    let mut buf_o = vec![0u64; n2];
    let mut i = 0usize;
    while i < codes.len() {
        decode_entries(q, n2, codes[i], &mut buf_a);
        for (gi, g) in gens.iter().enumerate() {
            raw_mul(&fq, n, &buf_a, g, &mut buf_o);
            let code = encode_entries(q, &buf_o);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(code) {
                if codes.len() >= cap {
                    return Err(Error::CapExceeded { partial: codes.len() });
                }
                e.insert(codes.len() as u32);
                codes.push(code);
                if want_tree {
                    parents.push(((i as u64) << 8) | gi as u64);
                }
            }
        }
        i += 1;
    }
    drop(seen);

    let order = codes.len();
    // sort and remap tree indices
    let mut perm: Vec<u32> = (0..order as u32).collect();
    perm.sort_unstable_by_key(|&i| codes[i as usize]);
    let mut elements = Vec::with_capacity(order);
    for &pi in &perm {
        elements.push(codes[pi as usize]);
    }
    let tree = if want_tree {
        let mut inv = vec![0u32; order];
        for (sorted_idx, &ins_idx) in perm.iter().enumerate() {
            inv[ins_idx as usize] = sorted_idx as u32;
        }
        let mut t = vec![0u64; order];
        for (sorted_idx, &ins_idx) in perm.iter().enumerate() {
            let packed = parents[ins_idx as usize];
            let gi = packed & 0xff;
            if gi == 0xff {
                t[sorted_idx] = ((sorted_idx as u64) << 8) | 0xff;
            } else {
                let parent_ins = packed >> 8;
                t[sorted_idx] = ((inv[parent_ins as usize] as u64) << 8) | gi;
            }
        }
        Some(t)
    } else {
        None
    };

    Ok(EnumeratedGroup {
        spec,
        elements,
        tree,
        order,
        gen_nus,
        classes: OnceLock::new(),
        center: OnceLock::new(),
        derived: OnceLock::new(),
        abelian: OnceLock::new(),
    })
}

impl EnumeratedGroup {
    pub fn elements(&self) -> &[u128] {
        &self.elements
    }

    pub fn idx_of(&self, code: u128) -> Option<u32> {
        self.elements.binary_search(&code).ok().map(|i| i as u32)
    }

    pub fn contains_code(&self, code: u128) -> bool {
        self.elements.binary_search(&code).is_ok()
    }

    pub fn code_of_mat(&self, m: &Mat) -> u128 {
        encode_entries(self.spec.field.q() as u64, &m.entries)
    }

    pub fn mat_of_idx(&self, idx: u32) -> Mat {
        self.mat_of_code(self.elements[idx as usize])
    }

    pub fn mat_of_code(&self, code: u128) -> Mat {
        let n = self.spec.n;
        let mut entries = vec![0u64; n * n];
        decode_entries(self.spec.field.q() as u64, n * n, code, &mut entries);
        Mat::from_vec(self.spec.ring(), n, n, entries)
    }

    pub fn identity_idx(&self) -> u32 {
        let n = self.spec.n;
        let ident = Mat::identity(self.spec.ring(), n);
        self.idx_of(self.code_of_mat(&ident)).expect("identity is in the group")
    }

    /// Generator-index path from the identity to this element along the BFS
    /// tree (element = identity * g_{i1} * g_{i2} * ...).
    pub fn gen_path(&self, idx: u32) -> Vec<u8> {
        let tree = self.tree.as_ref().expect("group enumerated without a BFS tree");
        let mut path = vec![];
        let mut cur = idx;
        loop {
            let packed = tree[cur as usize];
            let gi = (packed & 0xff) as u8;
            if gi == 0xff {
                break;
            }
            path.push(gi);
            cur = (packed >> 8) as u32;
        }
        path.reverse();
        path
    }

    /// BFS-tree parent and generator index (`None` for the identity).
    pub fn tree_edge(&self, idx: u32) -> Option<(u32, u8)> {
        let tree = self.tree.as_ref().expect("group enumerated without a BFS tree");
        let packed = tree[idx as usize];
        let gi = (packed & 0xff) as u8;
        (gi != 0xff).then_some(((packed >> 8) as u32, gi))
    }

    pub fn has_tree(&self) -> bool {
        self.tree.is_some()
    }

    /// Multiplicative order of an element.
    pub fn element_order(&self, idx: u32) -> u64 {
        let m = self.mat_of_idx(idx);
        let mut x = m.clone();
        let mut ord = 1u64;
        while !x.is_identity() {
            x = x.mul(&m);
            ord += 1;
            assert!(ord <= self.order as u64 + 1, "element order exceeds group order");
        }
        ord
    }

    /// Semisimple over `F_q` means order prime to `p`.
    pub fn is_semisimple(&self, idx: u32) -> bool {
        self.element_order(idx) % self.spec.field.p != 0
    }

    /// Orbit partition under conjugation by the generators. Representatives
    /// are the minimal element (in code order) of each class.
    pub fn conjugacy_classes(&self) -> &[ConjClass] {
        self.classes.get_or_init(|| {
            let fq = &self.spec.field;
            let q = fq.q() as u64;
            let n = self.spec.n;
            let n2 = n * n;
            let gens: Vec<Vec<u64>> =
                self.spec.generators.iter().map(|g| g.entries.clone()).collect();
            let gen_invs: Vec<Vec<u64>> = self
                .spec
                .generators
                .iter()
                .map(|g| g.inverse().expect("generators are invertible").entries)
                .collect();
            let mut classified = vec![false; self.order];
            let mut classes = vec![];
            let mut buf_x = vec![0u64; n2];
            let mut buf_t = vec![0u64; n2];
            let mut buf_o = vec![0u64; n2];
            for start in 0..self.order {
                if classified[start] {
                    continue;
                }
                classified[start] = true;
                let mut orbit: Vec<u32> = vec![start as u32];
                let mut qpos = 0usize;
                while qpos < orbit.len() {
                    let idx = orbit[qpos];
                    qpos += 1;
                    decode_entries(q, n2, self.elements[idx as usize], &mut buf_x);
                    for (g, ginv) in gens.iter().zip(&gen_invs) {
                        raw_mul(fq, n, ginv, &buf_x, &mut buf_t);
                        raw_mul(fq, n, &buf_t, g, &mut buf_o);
                        let code = encode_entries(q, &buf_o);
                        let j = self.idx_of(code).expect("conjugate stays in the group");
                        if !classified[j as usize] {
                            classified[j as usize] = true;
                            orbit.push(j);
                        }
                    }
                }
                classes.push(ConjClass { rep: start as u32, size: orbit.len() as u32 });
            }
            classes
        })
    }

    /// Indices of central elements.
    pub fn center(&self) -> &[u32] {
        self.center.get_or_init(|| {
            let mut out = vec![];
            for i in 0..self.order as u32 {
                let m = self.mat_of_idx(i);
                if self.spec.generators.iter().all(|g| g.mul(&m) == m.mul(g)) {
                    out.push(i);
                }
            }
            out
        })
    }

    /// Similitude values of the generators (all 1 except for GSp).
    pub fn gen_similitudes(&self) -> &[u64] {
        &self.gen_nus
    }

    /// Similitude of an arbitrary element (form ambients only).
    pub fn nu_of_idx(&self, idx: u32) -> u64 {
        self.spec
            .similitude_of(&self.mat_of_idx(idx))
            .expect("element of a similitude group")
    }

    /// Image of the similitude character, as a sorted list of field codes.
    pub fn similitude_image(&self) -> Vec<u64> {
        let fq = &self.spec.field;
        let mut img = vec![1u64];
        let mut frontier = vec![1u64];
        while let Some(x) = frontier.pop() {
            for &nu in &self.gen_nus {
                let y = fq.mul(x, nu);
                if !img.contains(&y) {
                    img.push(y);
                    frontier.push(y);
                }
            }
        }
        img.sort_unstable();
        img
    }

    pub fn similitude_surjective(&self) -> bool {
        self.similitude_image().len() as u128 == self.spec.field.q() - 1
    }

    /// Element set of the derived subgroup (normal closure of generator
    /// commutators), sorted.
    pub fn derived_subgroup(&self) -> &[u128] {
        self.derived.get_or_init(|| {
            let gens = &self.spec.generators;
            let mut seed: Vec<Mat> = vec![];
            for a in gens {
                for b in gens {
                    let c = a.mul(b).mul(&a.inverse().unwrap()).mul(&b.inverse().unwrap());
                    if !c.is_identity() {
                        seed.push(c);
                    }
                }
            }
            let mut closure = Closure::new(self);
            for s in &seed {
                if !closure.contains(&s.entries) {
                    closure.add_generator(s.entries.clone());
                }
            }
            // normal closure: conjugate current generators by group generators
            // until stable
            loop {
                let mut added = false;
                let current = closure.generators.clone();
                for g in gens {
                    let ginv = g.inverse().unwrap();
                    for h in &current {
                        let hm =
                            Mat::from_vec(self.spec.ring(), self.spec.n, self.spec.n, h.clone());
                        let c = g.mul(&hm).mul(&ginv);
                        if !closure.contains(&c.entries) {
                            closure.add_generator(c.entries.clone());
                            added = true;
                        }
                    }
                }
                if !added {
                    break;
                }
            }
            closure.sorted_codes()
        })
    }

    /// dim_{F_p} Hom(G, F_p) = p-rank of the abelianization, for the group's
    /// own residue characteristic p.
    pub fn hom_to_fp_dim(&self) -> usize {
        let p = self.spec.field.p;
        let ab = self.abelian_quotient();
        let count = ab.count_killed_by(p as usize);
        let mut dim = 0;
        let mut c = count;
        while c > 1 {
            assert_eq!(c % p as usize, 0);
            c /= p as usize;
            dim += 1;
        }
        dim
    }

    pub fn abelian_quotient(&self) -> &AbelianQuotient {
        self.abelian.get_or_init(|| AbelianQuotient::of(self))
    }

    /// Structure of the abelianization as invariant factors d_1 | d_2 | ...
    pub fn abelian_invariants(&self) -> Vec<u64> {
        self.abelian_quotient().invariant_factors()
    }

    /// All subgroups of index 2, as element sets (kernels of the nontrivial
    /// characters G -> Z/2). The list has size `2^r - 1` where `r` is the
    /// 2-rank of the abelianization.
    pub fn index2_subgroups(&self) -> Vec<Vec<u128>> {
        let ab = self.abelian_quotient();
        let characters = ab.two_torsion_characters();
        let mut out = vec![];
        for chi in characters {
            let mut elems = vec![];
            for (idx, &code) in self.elements.iter().enumerate() {
                let c = ab.class_of(idx as u32);
                if !chi[c as usize] {
                    elems.push(code);
                }
            }
            assert_eq!(elems.len() * 2, self.order, "character kernel has index 2");
            out.push(elems);
        }
        out
    }

    /// Build a subgroup (with its own enumeration and BFS tree) from a sorted
    /// element subset, finding a small generating set greedily.
    pub fn subgroup_from_elements(&self, elements: &[u128]) -> Result<EnumeratedGroup> {
        assert!(!elements.is_empty());
        let mut closure = Closure::new(self);
        let n2 = self.spec.n * self.spec.n;
        let q = self.spec.field.q() as u64;
        let mut gens: Vec<Mat> = vec![];
        for &code in elements {
            if !closure.set.contains(&code) {
                let mut entries = vec![0u64; n2];
                decode_entries(q, n2, code, &mut entries);
                closure.add_generator(entries.clone());
                gens.push(Mat::from_vec(self.spec.ring(), self.spec.n, self.spec.n, entries));
                if closure.set.len() == elements.len() {
                    break;
                }
            }
        }
        assert_eq!(closure.set.len(), elements.len(), "element set is not closed");
        let spec = GroupSpec { generators: gens, ..self.spec.clone() };
        enumerate(spec, elements.len() + 1, true)
    }

    /// The kernel of the similitude character as a subgroup with ambient Sp
    /// (for GSp groups; re-enumerates self for other ambients).
    pub fn sp_kernel(&self) -> Result<EnumeratedGroup> {
        if self.spec.ambient != Ambient::GSp {
            return self.subgroup_from_elements(&self.elements.clone());
        }
        let mut elems = vec![];
        for (i, &code) in self.elements.iter().enumerate() {
            if self.nu_of_idx(i as u32) == 1 {
                elems.push(code);
            }
        }
        let base = self.subgroup_from_elements(&elems)?;
        let spec = GroupSpec { ambient: Ambient::Sp, ..base.spec.clone() };
        enumerate(spec, elems.len() + 1, true)
    }
}

/// Incremental closure of a generating set inside the matrix space of an
/// ambient group (used for derived subgroups and generating-set extraction).
struct Closure<'a> {
    parent: &'a EnumeratedGroup,
    set: std::collections::HashSet<u128>,
    list: Vec<u128>,
    generators: Vec<Vec<u64>>,
}

impl<'a> Closure<'a> {
    fn new(parent: &'a EnumeratedGroup) -> Closure<'a> {
        let n = parent.spec.n;
        let mut ident = vec![0u64; n * n];
        for i in 0..n {
            ident[i * n + i] = 1;
        }
        let code = encode_entries(parent.spec.field.q() as u64, &ident);
        Closure {
            parent,
            set: std::collections::HashSet::from([code]),
            list: vec![code],
            generators: vec![],
        }
    }

    fn contains(&self, entries: &[u64]) -> bool {
        self.set.contains(&encode_entries(self.parent.spec.field.q() as u64, entries))
    }

    /// Add a generator and re-close under multiplication.
    fn add_generator(&mut self, g: Vec<u64>) {
        let fq = &self.parent.spec.field;
        let q = fq.q() as u64;
        let n = self.parent.spec.n;
        let n2 = n * n;
        self.generators.push(g);
        let mut buf_a = vec![0u64; n2];
        let mut buf_o = vec![0u64; n2];
        // multiply every known element by the new generator, then resume a
        // full BFS for the freshly added elements
        let mut queue: Vec<u128> = vec![];
        let new_gen = self.generators.last().unwrap().clone();
        for i in 0..self.list.len() {
            decode_entries(q, n2, self.list[i], &mut buf_a);
            raw_mul(fq, n, &buf_a, &new_gen, &mut buf_o);
            let code = encode_entries(q, &buf_o);
            if self.set.insert(code) {
                self.list.push(code);
                queue.push(code);
            }
        }
        let mut qpos = 0;
        while qpos < queue.len() {
            decode_entries(q, n2, queue[qpos], &mut buf_a);
            qpos += 1;
            for g in &self.generators {
                raw_mul(fq, n, &buf_a, g, &mut buf_o);
                let code = encode_entries(q, &buf_o);
                if self.set.insert(code) {
                    self.list.push(code);
                    queue.push(code);
                }
            }
        }
    }

    fn sorted_codes(&self) -> Vec<u128> {
        let mut v = self.list.clone();
        v.sort_unstable();
        v
    }
}

// ---------------------------------------------------------------------------
// Abelian quotient G / [G, G]
// ---------------------------------------------------------------------------

/// The abelianization of an enumerated group, with a multiplication table on
/// coset representatives.
pub struct AbelianQuotient {
    /// coset representative codes
    pub reps: Vec<u128>,
    /// mult[i][j] = class of rep_i * rep_j
    mult: Vec<Vec<u32>>,
    /// class of each group element, aligned with the sorted element list
    elt_class: Vec<u32>,
    identity_class: u32,
}

impl AbelianQuotient {
    fn of(g: &EnumeratedGroup) -> AbelianQuotient {
        let derived: &[u128] = g.derived_subgroup();
        let in_derived = |code: u128| derived.binary_search(&code).is_ok();
        let n = g.spec.n;
        // BFS over cosets
        let ident = Mat::identity(g.spec.ring(), n);
        let rep0_code = g.code_of_mat(&ident);
        let mut reps: Vec<Mat> = vec![ident];
        let mut rep_codes: Vec<u128> = vec![rep0_code];
        let class_of_mat = |reps: &Vec<Mat>, m: &Mat| -> Option<u32> {
            for (i, r) in reps.iter().enumerate() {
                let t = r.inverse().unwrap().mul(m);
                let code = g.code_of_mat(&t);
                if in_derived(code) {
                    return Some(i as u32);
                }
            }
            None
        };
        let mut qpos = 0;
        while qpos < reps.len() {
            let cur = reps[qpos].clone();
            qpos += 1;
            for gen in &g.spec.generators {
                let nxt = cur.mul(gen);
                if class_of_mat(&reps, &nxt).is_none() {
                    rep_codes.push(g.code_of_mat(&nxt));
                    reps.push(nxt);
                }
            }
        }
        let size = reps.len();
        let mut mult = vec![vec![0u32; size]; size];
        for i in 0..size {
            for j in 0..size {
                let prod = reps[i].mul(&reps[j]);
                mult[i][j] = class_of_mat(&reps, &prod).expect("cosets closed under product");
            }
        }
        let mut elt_class = Vec::with_capacity(g.order);
        for idx in 0..g.order {
            let m = g.mat_of_idx(idx as u32);
            elt_class.push(class_of_mat(&reps, &m).expect("every element lies in a coset"));
        }
        AbelianQuotient { reps: rep_codes, mult, elt_class, identity_class: 0 }
    }

    pub fn size(&self) -> usize {
        self.reps.len()
    }

    pub fn class_of(&self, idx: u32) -> u32 {
        self.elt_class[idx as usize]
    }

    fn pow(&self, a: u32, mut e: usize) -> u32 {
        let mut acc = self.identity_class;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mult[acc as usize][base as usize];
            }
            base = self.mult[base as usize][base as usize];
            e >>= 1;
        }
        acc
    }

    /// Number of classes x with x^e = identity.
    pub fn count_killed_by(&self, e: usize) -> usize {
        (0..self.size() as u32).filter(|&a| self.pow(a, e) == self.identity_class).count()
    }

    /// Invariant factors d_1 | d_2 | ... of the abelian group, computed by
    /// repeatedly splitting off a cyclic factor of maximal order.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let mut factors = vec![];
        let mut sub: Vec<u32> = vec![self.identity_class];
        loop {
            // coset representatives modulo <sub>
            let mut seen = vec![false; self.size()];
            let mut quots: Vec<u32> = vec![];
            for a in 0..self.size() as u32 {
                if seen[a as usize] {
                    continue;
                }
                quots.push(a);
                for &s in &sub {
                    seen[self.mult[a as usize][s as usize] as usize] = true;
                }
            }
            if quots.len() == 1 {
                break;
            }
            // order of a coset in the quotient: minimal e with a^e in sub
            let coset_order = |a: u32| -> usize {
                let mut x = a;
                let mut e = 1;
                while !sub.contains(&x) {
                    x = self.mult[x as usize][a as usize];
                    e += 1;
                }
                e
            };
            let best = *quots
                .iter()
                .max_by_key(|&&a| (coset_order(a), std::cmp::Reverse(a)))
                .unwrap();
            factors.push(coset_order(best) as u64);
            // grow sub to <sub, best>
            let mut new_sub: Vec<u32> = vec![];
            let mut frontier = sub.clone();
            while let Some(x) = frontier.pop() {
                if new_sub.contains(&x) {
                    continue;
                }
                new_sub.push(x);
                frontier.push(self.mult[x as usize][best as usize]);
                for &s in &sub {
                    frontier.push(self.mult[x as usize][s as usize]);
                }
            }
            sub = new_sub;
        }
        // normalize into a divisibility chain via prime-power components
        let mut primes = std::collections::BTreeSet::new();
        for &f in &factors {
            let mut f = f;
            let mut d = 2;
            while d * d <= f {
                if f % d == 0 {
                    primes.insert(d);
                    while f % d == 0 {
                        f /= d;
                    }
                }
                d += 1;
            }
            if f > 1 {
                primes.insert(f);
            }
        }
        let mut by_prime: Vec<Vec<u64>> = vec![];
        for &p in &primes {
            let mut powers: Vec<u64> = factors
                .iter()
                .filter_map(|&f| {
                    let mut f = f;
                    let mut pw = 1u64;
                    while f % p == 0 {
                        f /= p;
                        pw *= p;
                    }
                    (pw > 1).then_some(pw)
                })
                .collect();
            powers.sort_unstable();
            by_prime.push(powers);
        }
        let max_len = by_prime.iter().map(|v| v.len()).max().unwrap_or(0);
        let mut chain = vec![1u64; max_len];
        for powers in &by_prime {
            let offset = max_len - powers.len();
            for (i, &pw) in powers.iter().enumerate() {
                chain[offset + i] *= pw;
            }
        }
        chain
    }

    /// All nontrivial characters into Z/2, each given as a boolean vector over
    /// the classes (true = maps to -1).
    pub fn two_torsion_characters(&self) -> Vec<Vec<bool>> {
        let size = self.size();
        // subgroup generated by squares
        let squares: Vec<u32> =
            (0..size as u32).map(|a| self.mult[a as usize][a as usize]).collect();
        let mut sq: Vec<u32> = vec![self.identity_class];
        let mut frontier = vec![self.identity_class];
        while let Some(x) = frontier.pop() {
            for &s in &squares {
                let y = self.mult[x as usize][s as usize];
                if !sq.contains(&y) {
                    sq.push(y);
                    frontier.push(y);
                }
            }
        }
        // cosets of sq form an elementary abelian 2-group W
        let mut coset_id = vec![u32::MAX; size];
        let mut coset_reps = vec![];
        for a in 0..size as u32 {
            if coset_id[a as usize] != u32::MAX {
                continue;
            }
            let id = coset_reps.len() as u32;
            coset_reps.push(a);
            for &s in &sq {
                coset_id[self.mult[a as usize][s as usize] as usize] = id;
            }
        }
        let w_size = coset_reps.len();
        if w_size == 1 {
            return vec![];
        }
        // greedy F_2-basis of W with coordinates
        let w_mult = |a: u32, b: u32| -> u32 {
            coset_id
                [self.mult[coset_reps[a as usize] as usize][coset_reps[b as usize] as usize] as usize]
        };
        let mut coords: HashMap<u32, u32> =
            HashMap::from([(coset_id[self.identity_class as usize], 0)]);
        let mut rank = 0u32;
        for w in 0..w_size as u32 {
            if coords.contains_key(&w) {
                continue;
            }
            let existing: Vec<(u32, u32)> = coords.iter().map(|(&a, &m)| (a, m)).collect();
            for (a, m) in existing {
                coords.insert(w_mult(w, a), m | (1 << rank));
            }
            rank += 1;
        }
        assert_eq!(1usize << rank, w_size, "coset group of squares is elementary abelian 2");
        // nontrivial linear functionals
        let mut out = vec![];
        for mask in 1u32..(1 << rank) {
            let chi: Vec<bool> = (0..size as u32)
                .map(|cls| {
                    let m = coords[&coset_id[cls as usize]];
                    ((m & mask).count_ones() & 1) == 1
                })
                .collect();
            out.push(chi);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Subgroup search and conjugacy
// ---------------------------------------------------------------------------

pub struct SearchOutcome {
    /// pairwise non-conjugate subgroups found, in discovery order
    pub groups: Vec<Arc<EnumeratedGroup>>,
    pub samples: usize,
    pub cap_exceeded: usize,
    pub duplicates: usize,
}

/// Conjugation-invariant fingerprint used to prefilter conjugacy tests.
pub fn group_fingerprint(g: &EnumeratedGroup) -> (usize, Vec<u32>, Vec<u64>) {
    let mut sizes: Vec<u32> = g.conjugacy_classes().iter().map(|c| c.size).collect();
    sizes.sort_unstable();
    (g.order, sizes, g.abelian_invariants())
}

/// Search for subgroups generated by `num_gens` uniformly sampled elements.
/// Deterministic for a fixed seed; results are deduplicated by conjugacy in
/// `g` (set equality, then fingerprint-guarded conjugacy scan).
pub fn random_subgroup_search(
    g: &EnumeratedGroup,
    seed: u64,
    num_gens: usize,
    samples: usize,
    cap: usize,
    par: crate::Parallelism,
) -> SearchOutcome {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    let candidates: Vec<Option<EnumeratedGroup>> =
        crate::par_map(par, (0..samples).collect::<Vec<_>>(), |s| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                seed.wrapping_add((s as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            );
            let gens: Vec<Mat> = (0..num_gens)
                .map(|_| g.mat_of_idx(rng.random_range(0..g.order) as u32))
                .collect();
            let spec = GroupSpec { generators: gens, ..g.spec.clone() };
            enumerate(spec, cap, true).ok()
        });
    let mut out = SearchOutcome { groups: vec![], samples, cap_exceeded: 0, duplicates: 0 };
    let mut fingerprints: Vec<(usize, Vec<u32>, Vec<u64>)> = vec![];
    for cand in candidates {
        let Some(h) = cand else {
            out.cap_exceeded += 1;
            continue;
        };
        let fp = group_fingerprint(&h);
        let mut dup = false;
        for (k, kept) in out.groups.iter().enumerate() {
            if fingerprints[k] != fp {
                continue;
            }
            if kept.elements() == h.elements() || subgroup_conjugate(&h, kept, g).is_some() {
                dup = true;
                break;
            }
        }
        if dup {
            out.duplicates += 1;
        } else {
            fingerprints.push(fp);
            out.groups.push(Arc::new(h));
        }
    }
    out
}

/// Find `g` with `g H1 g^{-1} = H2` inside `parent`, scanning the parent's
/// elements in order (the scan covers every coset of the normalizer of H1, so
/// NONE is definitive).
pub fn subgroup_conjugate(
    h1: &EnumeratedGroup,
    h2: &EnumeratedGroup,
    parent: &EnumeratedGroup,
) -> Option<Mat> {
    if h1.order != h2.order {
        return None;
    }
    if h1.elements() == h2.elements() {
        return Some(Mat::identity(h1.spec.ring(), h1.spec.n));
    }
    let gens: Vec<&Mat> = h1.spec.generators.iter().collect();
    for idx in 0..parent.order {
        let g = parent.mat_of_idx(idx as u32);
        let ginv = g.inverse().unwrap();
        let ok = gens.iter().all(|x| {
            let c = g.mul(x).mul(&ginv);
            h2.contains_code(h2.code_of_mat(&c))
        });
        if ok {
            return Some(g);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn sl2_orders() {
        let g = enumerate(fixtures::sl2_gl2(3).unwrap(), DEFAULT_CAP, true).unwrap();
        assert_eq!(g.order, 24);
        // |SL_2(q)| = q(q^2-1)
        let h = enumerate(fixtures::sl2_gl2(5).unwrap(), DEFAULT_CAP, true).unwrap();
        assert_eq!(h.order, 120);
    }

    #[test]
    fn closure_property_sampled() {
        let g = enumerate(fixtures::sl2_gl2(3).unwrap(), DEFAULT_CAP, true).unwrap();
        for &a in g.elements().iter().step_by(5) {
            let ma = g.mat_of_code(a);
            assert!(g.contains_code(g.code_of_mat(&ma.inverse().unwrap())));
            for &b in g.elements().iter().step_by(7) {
                let mb = g.mat_of_code(b);
                assert!(g.contains_code(g.code_of_mat(&ma.mul(&mb))));
            }
        }
    }

    #[test]
    fn conjugacy_classes_sl2_f3() {
        let g = enumerate(fixtures::sl2_gl2(3).unwrap(), DEFAULT_CAP, true).unwrap();
        let classes = g.conjugacy_classes();
        assert_eq!(classes.len(), 7);
        let total: u32 = classes.iter().map(|c| c.size).sum();
        assert_eq!(total as usize, g.order);
        for c in classes {
            assert_eq!(g.order as u32 % c.size, 0, "class size divides order");
        }
        // brute-force orbit partition oracle
        let mut marked = vec![false; g.order];
        let mut count = 0;
        for i in 0..g.order {
            if marked[i] {
                continue;
            }
            count += 1;
            let mi = g.mat_of_idx(i as u32);
            for j in 0..g.order {
                let t = g.mat_of_idx(j as u32);
                let conj = t.mul(&mi).mul(&t.inverse().unwrap());
                let idx = g.idx_of(g.code_of_mat(&conj)).unwrap();
                marked[idx as usize] = true;
            }
        }
        assert_eq!(count, 7);
    }

    #[test]
    fn abelian_group_classes_are_singletons() {
        let g = enumerate(fixtures::diagonal_torus_sp4(3).unwrap(), DEFAULT_CAP, true).unwrap();
        assert_eq!(g.order, 4);
        assert!(g.conjugacy_classes().iter().all(|c| c.size == 1));
    }

    #[test]
    fn cap_exceeded_reports_partial() {
        let r = enumerate(fixtures::sl2_gl2(5).unwrap(), 50, false);
        match r {
            Err(Error::CapExceeded { partial }) => assert_eq!(partial, 50),
            _ => panic!("expected cap exceeded"),
        }
    }

    #[test]
    fn invalid_generator_rejected() {
        let mut spec = fixtures::sp4(3).unwrap();
        spec.generators[0] = Mat::from_int_rows(
            spec.ring(),
            &[vec![1, 1, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        );
        assert!(matches!(spec.validate(), Err(Error::InvalidGenerator(_))));
    }

    #[test]
    fn semisimple_detection() {
        let g = enumerate(fixtures::sl2_gl2(3).unwrap(), DEFAULT_CAP, true).unwrap();
        let ident = g.identity_idx();
        assert!(g.is_semisimple(ident));
        // unipotent generator has order 3 = p
        let gen_code = g.code_of_mat(&g.spec.generators[0]);
        let gi = g.idx_of(gen_code).unwrap();
        assert!(!g.is_semisimple(gi));
    }

    #[test]
    fn hom_and_index2_of_c6() {
        // C_6 as <diag(-1, 4)> inside GL_2(F_7): the element has order 6
        let fq = Arc::new(Fq::prime(7).unwrap());
        let ring = Ring::Fq(fq.clone());
        let gen = Mat::from_int_rows(ring, &[vec![6, 0], vec![0, 4]]);
        let spec =
            GroupSpec { field: fq, n: 2, ambient: Ambient::GL, form: None, generators: vec![gen] };
        let g = enumerate(spec, DEFAULT_CAP, true).unwrap();
        assert_eq!(g.order, 6);
        let ab = g.abelian_quotient();
        assert_eq!(ab.size(), 6);
        // Hom(C_6, F_3) is 1-dimensional
        assert_eq!(ab.count_killed_by(3), 3);
        assert_eq!(g.abelian_invariants(), vec![6]);
        let idx2 = g.index2_subgroups();
        assert_eq!(idx2.len(), 1);
        assert_eq!(idx2[0].len(), 3);
    }

    #[test]
    fn sl2_f3_abelianization() {
        let g = enumerate(fixtures::sl2_gl2(3).unwrap(), DEFAULT_CAP, true).unwrap();
        assert_eq!(g.abelian_invariants(), vec![3]);
        assert_eq!(g.hom_to_fp_dim(), 1);
        assert!(g.index2_subgroups().is_empty());
        assert_eq!(g.derived_subgroup().len(), 8); // the quaternion group
    }

    #[test]
    fn subgroup_conjugacy_examples() {
        let g = enumerate(fixtures::sp4(3).unwrap(), DEFAULT_CAP, true).unwrap();
        let b1 = enumerate(fixtures::block_sp2_first(3).unwrap(), DEFAULT_CAP, true).unwrap();
        let b2 = enumerate(fixtures::block_sp2_second(3).unwrap(), DEFAULT_CAP, true).unwrap();
        assert_eq!(b1.order, 24);
        assert_eq!(b2.order, 24);
        let w = subgroup_conjugate(&b1, &b2, &g).expect("blocks are conjugate via the swap");
        let winv = w.inverse().unwrap();
        for &code in b1.elements() {
            let m = b1.mat_of_code(code);
            let c = w.mul(&m).mul(&winv);
            assert!(b2.contains_code(b2.code_of_mat(&c)));
        }
        let same = subgroup_conjugate(&b1, &b1, &g).unwrap();
        assert!(same.is_identity());
        let torus = enumerate(fixtures::diagonal_torus_sp4(3).unwrap(), DEFAULT_CAP, true).unwrap();
        assert!(subgroup_conjugate(&torus, &b1, &g).is_none());
    }

    #[test]
    fn similitude_is_a_homomorphism() {
        let g = enumerate(fixtures::gsp4(3).unwrap(), 300_000, true).unwrap();
        assert_eq!(g.similitude_image(), vec![1, 2]);
        assert!(g.similitude_surjective());
        for i in (0..g.order as u32).step_by(9973) {
            for j in (0..g.order as u32).step_by(10007) {
                let prod = g.mat_of_idx(i).mul(&g.mat_of_idx(j));
                let k = g.idx_of(g.code_of_mat(&prod)).unwrap();
                let fq = &g.spec.field;
                assert_eq!(g.nu_of_idx(k), fq.mul(g.nu_of_idx(i), g.nu_of_idx(j)));
            }
        }
        // the similitude kernel has nu identically 1
        let sp = g.sp_kernel().unwrap();
        for i in (0..sp.order as u32).step_by(4999) {
            assert_eq!(sp.nu_of_idx(i), 1);
        }
    }

    #[test]
    fn index2_count_is_two_rank() {
        // the Sp_4(F_3) torus has abelianization C_2 x C_2: 2^2 - 1 subgroups
        let g = enumerate(fixtures::diagonal_torus_sp4(3).unwrap(), DEFAULT_CAP, true).unwrap();
        assert_eq!(g.abelian_invariants(), vec![2, 2]);
        let subs = g.index2_subgroups();
        assert_eq!(subs.len(), 3);
        for s in &subs {
            assert_eq!(s.len() * 2, g.order);
        }
    }

    #[test]
    fn torus_search_only_small_abelian() {
        let torus = enumerate(fixtures::diagonal_torus_sp4(3).unwrap(), DEFAULT_CAP, true).unwrap();
        let out =
            random_subgroup_search(&torus, 1, 2, 10, DEFAULT_CAP, crate::Parallelism::Sequential);
        assert_eq!(out.cap_exceeded, 0);
        for h in &out.groups {
            assert!(h.order <= 4);
            assert_eq!(4 % h.order, 0);
        }
    }
}
