//! Built-in group specifications and the JSON group-file format.
//!
//! The symplectic fixtures use the form `J = antidiag(1, 1, -1, -1)`, so the
//! standard torus is `diag(a, b, nu/b, nu/a)`.

use crate::error::{Error, Result};
use crate::ff::{primitive_root, Fq};
use crate::linalg::{Mat, Ring};
use crate::matgrp::{Ambient, GroupSpec};
use serde_json::{json, Value};
use std::sync::Arc;

fn field(p: u64) -> Result<(Arc<Fq>, Ring)> {
    let fq = Arc::new(Fq::prime(p)?);
    let ring = Ring::Fq(fq.clone());
    Ok((fq, ring))
}

/// `J = antidiag(1, 1, -1, -1)`.
pub fn sp4_form(ring: &Ring) -> Mat {
    Mat::from_int_rows(
        ring.clone(),
        &[vec![0, 0, 0, 1], vec![0, 0, 1, 0], vec![0, -1, 0, 0], vec![-1, 0, 0, 0]],
    )
}

fn sp4_chevalley_gens(ring: &Ring) -> Vec<Mat> {
    // simple short root e1 - e2, simple long root 2*e2, and their negatives
    vec![
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 1, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, -1], vec![0, 0, 0, 1]],
        ),
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 0, 0, 0], vec![1, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, -1, 1]],
        ),
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 0, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        ),
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 0, 1]],
        ),
    ]
}

/// `Sp_4(F_p)` from the four simple-root transvections.
pub fn sp4(p: u64) -> Result<GroupSpec> {
    let (fq, ring) = field(p)?;
    Ok(GroupSpec {
        field: fq,
        n: 4,
        ambient: Ambient::Sp,
        form: Some(sp4_form(&ring)),
        generators: sp4_chevalley_gens(&ring),
    })
}

/// `GSp_4(F_p)`: the `Sp_4` generators plus the similitude torus element
/// `diag(g0, g0, 1, 1)` for `g0` the least primitive root mod p.
pub fn gsp4(p: u64) -> Result<GroupSpec> {
    let (fq, ring) = field(p)?;
    let g0 = primitive_root(p) as i64;
    let mut gens = sp4_chevalley_gens(&ring);
    gens.push(Mat::from_int_rows(
        ring.clone(),
        &[vec![g0, 0, 0, 0], vec![0, g0, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
    ));
    Ok(GroupSpec {
        field: fq,
        n: 4,
        ambient: Ambient::GSp,
        form: Some(sp4_form(&ring)),
        generators: gens,
    })
}

/// Sp_2 acting on the hyperbolic plane <e1, e4>.
pub fn block_sp2_first(p: u64) -> Result<GroupSpec> {
    let (fq, ring) = field(p)?;
    Ok(GroupSpec {
        field: fq,
        n: 4,
        ambient: Ambient::Sp,
        form: Some(sp4_form(&ring)),
        generators: vec![
            Mat::from_int_rows(
                ring.clone(),
                &[vec![1, 0, 0, 1], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
            ),
            Mat::from_int_rows(
                ring.clone(),
                &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![1, 0, 0, 1]],
            ),
        ],
    })
}

/// Sp_2 acting on the hyperbolic plane <e2, e3>.
pub fn block_sp2_second(p: u64) -> Result<GroupSpec> {
    let (fq, ring) = field(p)?;
    Ok(GroupSpec {
        field: fq,
        n: 4,
        ambient: Ambient::Sp,
        form: Some(sp4_form(&ring)),
        generators: vec![
            Mat::from_int_rows(
                ring.clone(),
                &[vec![1, 0, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
            ),
            Mat::from_int_rows(
                ring.clone(),
                &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 0, 1]],
            ),
        ],
    })
}

fn plane_swap(ring: &Ring) -> Mat {
    Mat::from_int_rows(
        ring.clone(),
        &[vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 1, 0]],
    )
}

/// `Sp_2(F_p) x Sp_2(F_p)` on the planes `<e1,e4>` and `<e2,e3>`.
pub fn block_sp2_sp2(p: u64) -> Result<GroupSpec> {
    let first = block_sp2_first(p)?;
    let second = block_sp2_second(p)?;
    let mut gens = first.generators;
    gens.extend(second.generators);
    Ok(GroupSpec { generators: gens, ..second })
}

/// The imprimitive group `Sp_2(F_p)^2 : C_2` (order 1152 for p = 3): both
/// blocks together with the form-preserving swap of the two planes.
pub fn imprimitive_sp2_wr2(p: u64) -> Result<GroupSpec> {
    let mut spec = block_sp2_sp2(p)?;
    let swap = plane_swap(&spec.ring());
    spec.generators.push(swap);
    Ok(spec)
}

/// Diagonal torus `{diag(a, b, 1/b, 1/a)}` of `Sp_4(F_p)`, order `(p-1)^2`.
pub fn diagonal_torus_sp4(p: u64) -> Result<GroupSpec> {
    let (fq, ring) = field(p)?;
    let g0 = primitive_root(p) as i64;
    let g0inv = fq.inv(g0 as u64).unwrap() as i64;
    Ok(GroupSpec {
        field: fq,
        n: 4,
        ambient: Ambient::Sp,
        form: Some(sp4_form(&ring)),
        generators: vec![
            Mat::from_int_rows(
                ring.clone(),
                &[vec![g0, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, g0inv]],
            ),
            Mat::from_int_rows(
                ring.clone(),
                &[vec![1, 0, 0, 0], vec![0, g0, 0, 0], vec![0, 0, g0inv, 0], vec![0, 0, 0, 1]],
            ),
        ],
    })
}

/// Diagonal torus of `GSp_4(F_p)`, order `(p-1)^3`.
pub fn diagonal_torus_gsp4(p: u64) -> Result<GroupSpec> {
    let torus = diagonal_torus_sp4(p)?;
    let g0 = primitive_root(p) as i64;
    let ring = torus.ring();
    let mut gens = torus.generators.clone();
    gens.push(Mat::from_int_rows(
        ring,
        &[vec![g0, 0, 0, 0], vec![0, g0, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
    ));
    Ok(GroupSpec { ambient: Ambient::GSp, generators: gens, ..torus })
}

/// Stabilizer of the isotropic line `<e1>` in `Sp_4(F_p)` (a maximal
/// parabolic; order 1296 for p = 3).
pub fn isotropic_line_stabilizer(p: u64) -> Result<GroupSpec> {
    let torus = diagonal_torus_sp4(p)?;
    let ring = torus.ring();
    let mut gens = torus.generators;
    gens.extend([
        // positive simple roots and the long/short positive combinations
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 1, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, -1], vec![0, 0, 0, 1]],
        ),
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 0, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        ),
        // negative long simple root (inside the Levi Sp_2 on <e2,e3>)
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 0, 1]],
        ),
    ]);
    Ok(GroupSpec { generators: gens, ..torus })
}

/// `SL_2(F_p)` inside ambient `GL_2`.
pub fn sl2_gl2(p: u64) -> Result<GroupSpec> {
    let (fq, ring) = field(p)?;
    Ok(GroupSpec {
        field: fq,
        n: 2,
        ambient: Ambient::GL,
        form: None,
        generators: vec![
            Mat::from_int_rows(ring.clone(), &[vec![1, 1], vec![0, 1]]),
            Mat::from_int_rows(ring.clone(), &[vec![1, 0], vec![1, 1]]),
        ],
    })
}

/// The full `GL_2(F_p)`.
pub fn gl2(p: u64) -> Result<GroupSpec> {
    let mut spec = sl2_gl2(p)?;
    let g0 = primitive_root(p) as i64;
    spec.generators.push(Mat::from_int_rows(spec.ring(), &[vec![g0, 0], vec![0, 1]]));
    Ok(spec)
}

/// The nonsplit Cartan subgroup of `GL_2(F_p)`: the cyclic group
/// `F_{p^2}^*` acting on `F_{p^2} = F_p^2` by multiplication. Irreducible
/// over `F_p` but reducible over `F_{p^2}` (the image type of a dihedral,
/// i.e. induced, representation).
pub fn nonsplit_cartan_gl2(p: u64) -> Result<GroupSpec> {
    let (fq, ring) = field(p)?;
    let ext = Fq::new(p, 2)?;
    // smallest multiplicative generator of F_{p^2}
    let order = ext.q() - 1;
    let mut gen_code = None;
    for x in 2..ext.q() as u64 {
        if ext.elt_order(x) == order {
            gen_code = Some(x);
            break;
        }
    }
    let g = gen_code.expect("F_{p^2}^* is cyclic");
    let (a, b) = (g % p, g / p); // g = a + b t
    // multiplication by a + b t on the basis {1, t}, with t^2 = -c0 - c1 t
    let c0 = ext.modulus[0];
    let c1 = ext.modulus[1];
    let m = Mat::from_rows(
        ring,
        vec![
            vec![a, fq.neg(fq.mul(b, c0))],
            vec![b, fq.sub(a, fq.mul(b, c1))],
        ],
    );
    Ok(GroupSpec { field: fq, n: 2, ambient: Ambient::GL, form: None, generators: vec![m] })
}

/// The semilinear group `SL_2(F_9) : <Frobenius>` of order 1440 inside
/// `Sp_4(F_3)`, via the trace form on `F_9^2` (experimental fixture).
pub fn sigma_l2_9() -> Result<GroupSpec> {
    let (fq, ring) = field(3)?;
    // basis (1,0), (z,0), (0,1), (0,z) of F_9^2 over F_3, z^2 = -1;
    // J = Tr(x1 y2 - y1 x2)
    let j = Mat::from_int_rows(
        ring.clone(),
        &[vec![0, 0, 2, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, 2, 0, 0]],
    );
    let gens = vec![
        // upper unipotents with entries 1 and z
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 0, 1, 0], vec![0, 1, 0, 1], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        ),
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 0, 0, -1], vec![0, 1, 1, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        ),
        // lower unipotents
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![1, 0, 1, 0], vec![0, 1, 0, 1]],
        ),
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, -1, 1, 0], vec![1, 0, 0, 1]],
        ),
        // coordinatewise Frobenius
        Mat::from_int_rows(
            ring.clone(),
            &[vec![1, 0, 0, 0], vec![0, -1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, -1]],
        ),
    ];
    Ok(GroupSpec { field: fq, n: 4, ambient: Ambient::Sp, form: Some(j), generators: gens })
}

/// The four `Sp_4` transvection generators over an arbitrary coefficient
/// ring (their integer forms preserve the form exactly over `Z`).
pub fn sp4_gens_over(ring: &Ring) -> Vec<Mat> {
    sp4_chevalley_gens(ring)
}

/// `GSp_4` generators over an arbitrary ring: the `Sp_4` transvections plus
/// the similitude element `diag(g0, g0, 1, 1)`.
pub fn gsp4_gens_over(ring: &Ring) -> Vec<Mat> {
    let g0 = primitive_root(ring.p()) as i64;
    let mut gens = sp4_chevalley_gens(ring);
    gens.push(Mat::from_int_rows(
        ring.clone(),
        &[vec![g0, 0, 0, 0], vec![0, g0, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
    ));
    gens
}

/// Named fixture lookup for the CLI.
pub fn by_name(name: &str) -> Result<GroupSpec> {
    match name {
        "sp4_f3" => sp4(3),
        "sp4_f5" => sp4(5),
        "gsp4_f3" => gsp4(3),
        "gsp4_f5" => gsp4(5),
        "imprimitive_1152" => imprimitive_sp2_wr2(3),
        "block_sp2_sp2_f3" => block_sp2_sp2(3),
        "diagonal_torus_sp4_f3" => diagonal_torus_sp4(3),
        "diagonal_torus_gsp4_f3" => diagonal_torus_gsp4(3),
        "isotropic_line_stabilizer_f3" => isotropic_line_stabilizer(3),
        "sl2_f11_gl2" => sl2_gl2(11),
        "sl2_f13_gl2" => sl2_gl2(13),
        "nonsplit_cartan_gl2_f3" => nonsplit_cartan_gl2(3),
        "sigma_l2_9" => sigma_l2_9(),
        _ => Err(Error::Parse(format!("unknown fixture {name:?}"))),
    }
}

pub const FIXTURE_NAMES: &[&str] = &[
    "sp4_f3",
    "sp4_f5",
    "gsp4_f3",
    "gsp4_f5",
    "imprimitive_1152",
    "block_sp2_sp2_f3",
    "diagonal_torus_sp4_f3",
    "diagonal_torus_gsp4_f3",
    "isotropic_line_stabilizer_f3",
    "sl2_f11_gl2",
    "sl2_f13_gl2",
    "nonsplit_cartan_gl2_f3",
    "sigma_l2_9",
];

// ---------------------------------------------------------------------------
// JSON group files
// ---------------------------------------------------------------------------

fn mat_to_json(m: &Mat) -> Value {
    let fq = m.ring.as_fq();
    let rows: Vec<Value> = (0..m.rows)
        .map(|i| {
            let row: Vec<Value> = m
                .row(i)
                .iter()
                .map(|&e| {
                    if fq.is_prime_field() {
                        json!(e)
                    } else {
                        json!(fq.display_elt(e))
                    }
                })
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

fn mat_from_json(ring: &Ring, v: &Value) -> Result<Mat> {
    let fq = ring.as_fq();
    let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array".into()))?;
    let mut data = vec![];
    for row in rows {
        let row = row.as_array().ok_or_else(|| Error::Parse("matrix row must be an array".into()))?;
        let mut out = vec![];
        for e in row {
            let code = match e {
                Value::Number(n) => {
                    let x = n
                        .as_u64()
                        .ok_or_else(|| Error::Parse(format!("bad matrix entry {n}")))?;
                    if fq.is_prime_field() {
                        if x >= fq.p {
                            return Err(Error::Parse(format!("entry {x} not in [0, {})", fq.p)));
                        }
                        x
                    } else {
                        return Err(Error::Parse(
                            "extension-field entries must be coefficient strings".into(),
                        ));
                    }
                }
                Value::String(s) => fq.parse_elt(s)?,
                _ => return Err(Error::Parse(format!("bad matrix entry {e}"))),
            };
            out.push(code);
        }
        data.push(out);
    }
    let c = data.first().map(|r| r.len()).unwrap_or(0);
    if data.is_empty() || data.iter().any(|r| r.len() != c) {
        return Err(Error::Parse("empty or ragged matrix".into()));
    }
    Ok(Mat::from_rows(ring.clone(), data))
}

pub fn spec_to_json(spec: &GroupSpec) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("p".into(), json!(spec.field.p));
    obj.insert("ext_degree".into(), json!(spec.field.k));
    obj.insert("ambient".into(), json!(spec.ambient.as_str()));
    obj.insert("n".into(), json!(spec.n));
    if let Some(j) = &spec.form {
        obj.insert("form".into(), mat_to_json(j));
    }
    obj.insert(
        "generators".into(),
        Value::Array(spec.generators.iter().map(mat_to_json).collect()),
    );
    Value::Object(obj)
}

pub fn spec_from_json(v: &Value) -> Result<GroupSpec> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("group file must be an object".into()))?;
    let p = obj
        .get("p")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing prime p".into()))?;
    let k = obj.get("ext_degree").and_then(Value::as_u64).unwrap_or(1) as u32;
    let fq = Arc::new(if k == 1 { Fq::prime(p)? } else { Fq::new(p, k)? });
    let ring = Ring::Fq(fq.clone());
    let ambient = Ambient::parse(
        obj.get("ambient")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("missing ambient".into()))?,
    )?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing matrix size n".into()))? as usize;
    let form = obj.get("form").map(|f| mat_from_json(&ring, f)).transpose()?;
    let gens_v = obj
        .get("generators")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing generators".into()))?;
    let generators: Result<Vec<Mat>> = gens_v.iter().map(|g| mat_from_json(&ring, g)).collect();
    let spec = GroupSpec { field: fq, n, ambient, form, generators: generators? };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgrp::{enumerate, DEFAULT_CAP};

    #[test]
    fn fixture_specs_validate() {
        for name in FIXTURE_NAMES {
            let spec = by_name(name).unwrap();
            spec.validate().unwrap_or_else(|e| panic!("fixture {name}: {e}"));
        }
    }

    #[test]
    fn fixture_orders() {
        let cases: &[(&str, usize)] = &[
            ("block_sp2_sp2_f3", 576),
            ("imprimitive_1152", 1152),
            ("diagonal_torus_sp4_f3", 4),
            ("diagonal_torus_gsp4_f3", 8),
            ("isotropic_line_stabilizer_f3", 1296),
            ("nonsplit_cartan_gl2_f3", 8),
        ];
        for &(name, order) in cases {
            let g = enumerate(by_name(name).unwrap(), DEFAULT_CAP, false).unwrap();
            assert_eq!(g.order, order, "fixture {name}");
        }
    }

    #[test]
    fn sigma_l2_9_order_1440() {
        let g = enumerate(sigma_l2_9().unwrap(), DEFAULT_CAP, false).unwrap();
        assert_eq!(g.order, 1440);
    }

    #[test]
    fn json_roundtrip() {
        for name in ["gsp4_f3", "sl2_f11_gl2", "imprimitive_1152"] {
            let spec = by_name(name).unwrap();
            let v = spec_to_json(&spec);
            let back = spec_from_json(&v).unwrap();
            assert_eq!(back.generators, spec.generators);
            assert_eq!(back.form, spec.form);
            assert_eq!(back.ambient, spec.ambient);
        }
    }
}
