//! Command-line driver: group assessment reports, seeded subgroup search,
//! cohomology dimensions, lifting demos and property checks, height counts,
//! and root-datum prime checks.
//!
//! Exit codes: 0 success, 1 input error, 2 enumeration cap exceeded,
//! 3 internal invariant violation.

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use spadeq_core::adequacy::{assess, group_content_hash, AdequacyReport, CSV_HEADER};
use spadeq_core::ff::Poly;
use spadeq_core::linalg::{Mat, Ring};
use spadeq_core::matgrp::{enumerate, random_subgroup_search, EnumeratedGroup, GroupSpec};
use spadeq_core::repmod::GModule;
use spadeq_core::{fixtures, heights, liealg, lift, Parallelism};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "spadeq", version, about = "subgroup image condition certification")]
struct Cli {
    /// Seed for all randomized steps; recorded in every output.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Enumeration cap on subgroup orders.
    #[arg(long, global = true, default_value_t = spadeq_core::matgrp::DEFAULT_CAP)]
    max_order: usize,
    /// Worker threads (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Report cache directory.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assess groups from JSON files or built-in fixtures and emit report rows.
    Assess {
        /// Group definition file(s); each holds one group object or an array.
        #[arg(long)]
        input: Vec<PathBuf>,
        /// Built-in fixture name(s).
        #[arg(long)]
        fixture: Vec<String>,
        /// CSV report path (stdout when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Optional JSON report path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Seeded random subgroup search inside an ambient fixture or group file.
    Search {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 2)]
        num_gens: usize,
        /// Cap for enumerating the ambient group itself.
        #[arg(long, default_value_t = 20_000_000)]
        ambient_cap: usize,
        /// Directory for the found subgroup files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Summary JSON path (stdout when omitted).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// H^0/H^1 dimensions of a group module.
    Cohomology {
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        fixture: Option<String>,
        /// trivial | natural | adjoint | adjoint-dual
        #[arg(long, default_value = "adjoint-dual")]
        module: String,
    },
    /// Invariant direct-summand lift of a residue eigenspace.
    LiftDemo {
        /// Ring tag, e.g. Zmod[3,2] or Dual[5].
        #[arg(long)]
        ring: String,
        /// Matrix entries, rows separated by ';', entries by ','.
        #[arg(long)]
        matrix: String,
        /// Residue split, e.g. eigen=1 (generalized eigenvalue over F_p).
        #[arg(long)]
        split: String,
    },
    /// Property-test harness for the lifting machinery.
    LiftCheck {
        #[arg(long, default_value_t = 25)]
        count: usize,
    },
    /// Bounded-height point counts on P^1 with unit conditions.
    Heights {
        /// Comma-separated primes of the unit-condition set (may be empty).
        #[arg(long, default_value = "")]
        primes: String,
        #[arg(long = "X", alias = "x", default_value_t = 2000)]
        x: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Pretty-good-prime check for a root datum.
    Rootdata {
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        bound: u64,
    },
}

fn parallelism(threads: usize) -> Parallelism {
    #[cfg(feature = "parallel")]
    {
        if threads == 1 {
            return Parallelism::Sequential;
        }
        if threads > 1 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
        Parallelism::Rayon
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Parallelism::Sequential
    }
}

fn load_specs(path: &Path) -> anyhow::Result<Vec<GroupSpec>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading group file {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing JSON in {}", path.display()))?;
    let items: Vec<&serde_json::Value> = match &value {
        serde_json::Value::Array(a) => a.iter().collect(),
        v => vec![v],
    };
    items
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            fixtures::spec_from_json(v)
                .map_err(|e| anyhow!("{}: group {}: {}", path.display(), i, e))
        })
        .collect()
}

struct NamedSpec {
    label: String,
    spec: GroupSpec,
}

fn gather_specs(inputs: &[PathBuf], fixture_names: &[String]) -> anyhow::Result<Vec<NamedSpec>> {
    let mut out = vec![];
    for path in inputs {
        for (i, spec) in load_specs(path)?.into_iter().enumerate() {
            out.push(NamedSpec { label: format!("{}#{}", path.display(), i), spec });
        }
    }
    for name in fixture_names {
        let spec = fixtures::by_name(name).map_err(|e| anyhow!("{e}"))?;
        out.push(NamedSpec { label: name.clone(), spec });
    }
    Ok(out)
}

fn cached_assess(
    g: &Arc<EnumeratedGroup>,
    cache: Option<&Path>,
    par: Parallelism,
) -> anyhow::Result<AdequacyReport> {
    let key = cache.map(|dir| {
        let hash = group_content_hash(g);
        dir.join(format!("{}-{}.json", env!("CARGO_PKG_VERSION"), hash))
    });
    if let Some(k) = &key {
        if let Ok(text) = std::fs::read_to_string(k) {
            if let Ok(r) = serde_json::from_str::<serde_json::Value>(&text) {
                if let Some(report) = report_from_cache(&r) {
                    return Ok(report);
                }
            }
        }
    }
    let report = assess(g, par).map_err(|e| anyhow!("{e}"))?;
    if let Some(k) = &key {
        if let Some(dir) = k.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(k, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report)
}

fn tri_from_str(s: &str) -> spadeq_core::TriBool {
    match s {
        "TRUE" => spadeq_core::TriBool::True,
        "INDETERMINATE" => spadeq_core::TriBool::Indeterminate,
        _ => spadeq_core::TriBool::False,
    }
}

fn report_from_cache(v: &serde_json::Value) -> Option<AdequacyReport> {
    // cached reports are exactly the serialized form; rebuild the struct
    let o = v.as_object()?;
    let us = |k: &str| o.get(k).and_then(|x| x.as_u64());
    let bs = |k: &str| o.get(k).and_then(|x| x.as_bool());
    let ts = |k: &str| o.get(k).and_then(|x| x.as_str()).map(tri_from_str);
    Some(AdequacyReport {
        order_gamma_prime: us("order_gamma_prime")? as usize,
        order_gamma: us("order_gamma")? as usize,
        similitude_surjective: bs("similitude_surjective")?,
        abs_irred_gl: bs("abs_irred_gl")?,
        cond_a: ts("cond_a")?,
        cond_b: ts("cond_b")?,
        span_a_dim: us("span_a_dim")? as usize,
        span_b_dim: us("span_b_dim")? as usize,
        h0_adjoint_dual: us("h0_adjoint_dual")? as usize,
        h1_trivial: us("h1_trivial")? as usize,
        h1_adjoint_dual: us("h1_adjoint_dual")? as usize,
        adequate: ts("adequate")?,
        tidy: bs("tidy")?,
        induced: bs("induced")?,
        split_induced: bs("split_induced")?,
        g_irreducible: o.get("g_irreducible").and_then(|x| x.as_bool().map(Some)).unwrap_or(None),
        adjoint_self_dual: bs("adjoint_self_dual")?,
        fingerprint: spadeq_core::adequacy::Fingerprint {
            order: us("order_gamma_prime")? as usize,
            class_count: o
                .get("fingerprint")?
                .get("class_count")?
                .as_u64()? as usize,
            abelian_invariants: o
                .get("fingerprint")?
                .get("abelian_invariants")?
                .as_array()?
                .iter()
                .filter_map(|x| x.as_u64())
                .collect(),
            center_order: o.get("fingerprint")?.get("center_order")?.as_u64()? as usize,
        },
        chop_seed: us("chop_seed")?,
        runtime_ms: us("runtime_ms")? as u128,
        notes: o
            .get("notes")?
            .as_array()?
            .iter()
            .filter_map(|x| x.as_str().map(String::from))
            .collect(),
    })
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let par = parallelism(cli.threads);
    match cli.command {
        Command::Assess { input, fixture, report, json } => {
            let specs = gather_specs(&input, &fixture)?;
            let mut rows: Vec<(String, AdequacyReport)> = vec![];
            let mut cap_failures = 0usize;
            for named in specs {
                match enumerate(named.spec, cli.max_order, true) {
                    Ok(g) => {
                        let g = Arc::new(g);
                        let r = cached_assess(&g, cli.cache.as_deref(), par)?;
                        rows.push((named.label, r));
                    }
                    Err(spadeq_core::Error::CapExceeded { partial }) => {
                        eprintln!(
                            "{}: enumeration cap exceeded after {} elements; skipped",
                            named.label, partial
                        );
                        cap_failures += 1;
                    }
                    Err(e) => return Err(anyhow!("{}: {}", named.label, e)),
                }
            }
            rows.sort_by(|a, b| {
                a.1.fingerprint_key()
                    .cmp(&b.1.fingerprint_key())
                    .then_with(|| a.0.cmp(&b.0))
            });
            let mut csv = String::from(CSV_HEADER);
            csv.push('\n');
            for (_, r) in &rows {
                csv.push_str(&r.csv_row());
                csv.push('\n');
            }
            match report {
                Some(p) => std::fs::write(&p, &csv)?,
                None => print!("{csv}"),
            }
            if let Some(p) = json {
                let entries: Vec<serde_json::Value> = rows
                    .iter()
                    .map(|(label, r)| {
                        let mut v = serde_json::to_value(r).expect("serialize");
                        v["label"] = serde_json::json!(label);
                        v["seed"] = serde_json::json!(cli.seed);
                        v
                    })
                    .collect();
                std::fs::write(&p, serde_json::to_string_pretty(&entries)?)?;
            }
            Ok(if cap_failures > 0 { 2 } else { 0 })
        }
        Command::Search { input, fixture, samples, num_gens, ambient_cap, out_dir, summary } => {
            let spec = match (&input, &fixture) {
                (Some(p), None) => {
                    let mut specs = load_specs(p)?;
                    if specs.len() != 1 {
                        return Err(anyhow!("search needs exactly one ambient group"));
                    }
                    specs.remove(0)
                }
                (None, Some(f)) => fixtures::by_name(f).map_err(|e| anyhow!("{e}"))?,
                _ => return Err(anyhow!("give exactly one of --input / --fixture")),
            };
            let ambient = Arc::new(
                enumerate(spec, ambient_cap, false).map_err(|e| anyhow!("ambient: {e}"))?,
            );
            let outcome =
                random_subgroup_search(&ambient, cli.seed, num_gens, samples, cli.max_order, par);
            let mut entries = vec![];
            for (i, h) in outcome.groups.iter().enumerate() {
                let r = cached_assess(h, cli.cache.as_deref(), par)?;
                if let Some(dir) = &out_dir {
                    std::fs::create_dir_all(dir)?;
                    let path = dir.join(format!("subgroup_{i:03}.json"));
                    std::fs::write(
                        path,
                        serde_json::to_string_pretty(&fixtures::spec_to_json(&h.spec))?,
                    )?;
                }
                entries.push(serde_json::json!({
                    "index": i,
                    "order": h.order,
                    "abs_irred": r.abs_irred_gl,
                    "adequate": r.adequate.to_string(),
                }));
            }
            let doc = serde_json::json!({
                "seed": cli.seed,
                "samples": outcome.samples,
                "cap_exceeded": outcome.cap_exceeded,
                "duplicates": outcome.duplicates,
                "subgroups": entries,
            });
            let text = serde_json::to_string_pretty(&doc)?;
            match summary {
                Some(p) => std::fs::write(&p, &text)?,
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::Cohomology { group, fixture, module } => {
            let spec = match (&group, &fixture) {
                (Some(p), None) => {
                    let mut specs = load_specs(p)?;
                    if specs.len() != 1 {
                        return Err(anyhow!("cohomology needs exactly one group"));
                    }
                    specs.remove(0)
                }
                (None, Some(f)) => fixtures::by_name(f).map_err(|e| anyhow!("{e}"))?,
                _ => return Err(anyhow!("give exactly one of --group / --fixture")),
            };
            let g = Arc::new(match enumerate(spec, cli.max_order, true) {
                Ok(g) => g,
                Err(spadeq_core::Error::CapExceeded { partial }) => {
                    eprintln!("enumeration cap exceeded after {partial} elements");
                    return Ok(2);
                }
                Err(e) => return Err(anyhow!("{e}")),
            });
            let m = match module.as_str() {
                "trivial" => GModule::trivial(g.clone()),
                "natural" => GModule::natural(g.clone()),
                "adjoint" => {
                    let lie = liealg::ClassicalLieData::for_group(&g).map_err(|e| anyhow!("{e}"))?;
                    lie.adjoint_module(&g)
                }
                "adjoint-dual" => {
                    let lie = liealg::ClassicalLieData::for_group(&g).map_err(|e| anyhow!("{e}"))?;
                    lie.adjoint_module(&g).dual()
                }
                other => return Err(anyhow!("unknown module {other:?}")),
            };
            let h0 = spadeq_core::repmod::h0(&m).dim();
            let h1 = spadeq_core::cohom::h1_dim(&m).map_err(|e| anyhow!("{e}"))?;
            println!("group order {}", g.order);
            println!("module {} (dim {})", module, m.dim);
            println!("h0 = {h0}");
            println!("h1 = {h1}");
            Ok(0)
        }
        Command::LiftDemo { ring, matrix, split } => {
            let ring = Ring::parse_tag(&ring).map_err(|e| anyhow!("{e}"))?;
            let f = Mat::from_text(&format!("{} {}", ring.tag(), matrix))
                .map_err(|e| anyhow!("{e}"))?;
            if !f.is_square() {
                return Err(anyhow!("matrix must be square"));
            }
            let eigen = split
                .strip_prefix("eigen=")
                .ok_or_else(|| anyhow!("split must look like eigen=VALUE"))?;
            let lambda: u64 = eigen.parse().context("eigenvalue must be an integer")?;
            let res_field = ring.residue_field();
            let fq = res_field.as_fq().clone();
            let lambda = lambda % fq.p;
            // build (x - lambda)^mult from the residue charpoly
            let c = spadeq_core::linalg::charpoly(&f).map_err(|e| anyhow!("{e}"))?;
            let cbar = Poly::new(fq.clone(), c.iter().map(|&x| ring.residue(x)).collect());
            let lin = Poly::x_minus(fq.clone(), lambda);
            let mut mult = 0;
            let mut cur = cbar;
            loop {
                let (q, r) = cur.divrem(&lin);
                if !r.is_zero() {
                    break;
                }
                mult += 1;
                cur = q;
            }
            if mult == 0 {
                return Err(anyhow!("{lambda} is not a residue eigenvalue"));
            }
            let mut pbar = Poly::one(fq);
            for _ in 0..mult {
                pbar = pbar.mul(&lin);
            }
            let lift =
                lift::invariant_summand_lift(&f, &pbar).map_err(|e| anyhow!("{e}"))?;
            println!("ring {}", ring.tag());
            println!("matrix {}", f.to_text());
            println!("residue eigenvalue {lambda} with multiplicity {mult}");
            println!("invariant direct-summand lift, rank {}:", lift.summand.dim());
            for b in lift.summand.basis() {
                let text: Vec<String> = b.iter().map(|&x| ring.display_elt(x)).collect();
                println!("  ({})", text.join(", "));
            }
            Ok(0)
        }
        Command::LiftCheck { count } => {
            use rand::Rng;
            use rand_chacha::rand_core::SeedableRng;
            let mut failures = 0;
            for p in [3u64, 5] {
                let ring = Ring::zmod(p, 2).map_err(|e| anyhow!("{e}"))?;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
                let size = ring.size() as u64;
                let mut done = 0;
                while done < count {
                    let entries: Vec<u64> = (0..4).map(|_| rng.random_range(0..size)).collect();
                    let f = Mat::from_vec(ring.clone(), 2, 2, entries);
                    let c = spadeq_core::linalg::charpoly(&f).map_err(|e| anyhow!("{e}"))?;
                    let res_field = ring.residue_field();
                    let fq = res_field.as_fq().clone();
                    let cbar = Poly::new(fq.clone(), c.iter().map(|&x| ring.residue(x)).collect());
                    let facs = cbar.factor().map_err(|e| anyhow!("{e}"))?;
                    if facs.len() < 2 {
                        continue;
                    }
                    done += 1;
                    let mut pbar = Poly::one(fq.clone());
                    for _ in 0..facs[0].1 {
                        pbar = pbar.mul(&facs[0].0);
                    }
                    let lift = lift::invariant_summand_lift(&f, &pbar)
                        .map_err(|e| anyhow!("{e}"))?;
                    // the lift reduces to the right residue space and is
                    // f-invariant
                    let red = lift.summand.reduce_to(&res_field);
                    let fbar = f.reduce_to(&res_field);
                    let pfm = spadeq_core::linalg::poly_at_mat(&pbar.coeffs, &fbar);
                    let ker = spadeq_core::linalg::kernel_field(&pfm);
                    let ok = red.dim() == ker.len()
                        && ker.iter().all(|v| red.contains(v))
                        && lift
                            .summand
                            .basis()
                            .iter()
                            .all(|b| lift.summand.contains(&f.apply(b)));
                    if !ok {
                        failures += 1;
                        println!("FAIL p={p} matrix {}", f.to_text());
                    }
                }
                println!("p={p}: {done} random invariant lifts checked");
            }
            if failures == 0 {
                println!("lift-check: all properties hold (seed {})", cli.seed);
                Ok(0)
            } else {
                println!("lift-check: {failures} failures");
                Ok(3)
            }
        }
        Command::Heights { primes, x, csv } => {
            let sigma: Vec<u64> = if primes.trim().is_empty() {
                vec![]
            } else {
                primes
                    .split(',')
                    .map(|t| t.trim().parse::<u64>().context("bad prime"))
                    .collect::<anyhow::Result<_>>()?
            };
            if sigma.iter().any(|&q| !spadeq_core::ff::is_prime(q)) {
                return Err(anyhow!("unit-condition set must consist of primes"));
            }
            let row = heights::heights_row(&sigma, x, par).map_err(|e| anyhow!("{e}"))?;
            let header = "X,count,predicted,ratio";
            let line = format!("{},{},{:.6},{:.6}", row.x, row.count, row.predicted, row.ratio);
            println!("sigma = {{{primes}}}");
            println!("{header}");
            println!("{line}");
            if let Some(p) = csv {
                std::fs::write(p, format!("{header}\n{line}\n"))?;
            }
            Ok(0)
        }
        Command::Rootdata { name, file, bound } => {
            let datum = match (&name, &file) {
                (Some(n), None) => liealg::RootDatum::builtin(n).map_err(|e| anyhow!("{e}"))?,
                (None, Some(p)) => {
                    let text = std::fs::read_to_string(p)?;
                    liealg::RootDatum::parse(&p.display().to_string(), &text)
                        .map_err(|e| anyhow!("{e}"))?
                }
                _ => return Err(anyhow!("give exactly one of --name / --file")),
            };
            let bad =
                liealg::pretty_good_bad_primes(&datum, bound).map_err(|e| anyhow!("{e}"))?;
            println!("root datum {} (rank {}, {} roots)", datum.name, datum.rank, datum.roots.len());
            if bad.is_empty() {
                println!("no bad primes below {bound}");
            } else {
                let list: Vec<String> = bad.iter().map(|p| p.to_string()).collect();
                println!("bad primes below {bound}: {}", list.join(", "));
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(code)) => ExitCode::from(code as u8),
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(_) => {
            eprintln!("internal invariant violation");
            ExitCode::from(3)
        }
    }
}
