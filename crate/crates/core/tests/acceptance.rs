//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use irc_core::det_class::{specialization_check, theorem2_region, validate};
use irc_core::dm_region::{corollary1_region, theorem1_region};
use irc_core::gauss::{cfn, sum_rate, CSwap, GaussConfig, HkParams};
use irc_core::io;
use irc_core::sweep::{run_sweep, SweepSpec};
use irc_core::verify::{oracle, random};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn within_time(start: Instant, limit: Duration, detail: String) -> Verdict {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("{detail}; took {took:.1?}, limit {limit:?}"));
    }
    Ok(format!("{detail}; {took:.1?}"))
}

fn sweep_dominance() -> Verdict {
    let spec = io::load_sweep(&fixture("reference_sweep.json")).map_err(|e| e.to_string())?;
    if spec != SweepSpec::reference() {
        return Err("shipped sweep file differs from the built-in reference".into());
    }
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let rows = pool
        .install(|| run_sweep(&spec, CSwap::Pattern))
        .map_err(|e| e.to_string())?;
    if rows.len() != 21 {
        return Err(format!("{} rows", rows.len()));
    }
    for r in &rows {
        let best = r.ian.max(r.snd);
        if r.proposed < best - 1e-9 {
            return Err(format!("P = {}: proposed {} below baseline {}", r.x, r.proposed, best));
        }
    }
    let (x, gain) = rows
        .iter()
        .map(|r| (r.x, r.proposed - r.ian.max(r.snd)))
        .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    if gain < 0.01 {
        return Err(format!("largest improvement {gain:.6} bits is under 0.01"));
    }
    within_time(
        start,
        Duration::from_secs(60),
        format!("largest improvement {gain:.4} bits at P = {x:.3}"),
    )
}

fn theorem1_matches_corollary1() -> Verdict {
    let start = Instant::now();
    let mut r = rng(101);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let inst = random::dm_instance(&mut r, 1, 2, 2);
        let a = theorem1_region(&inst.channel, &inst.input).map_err(|e| e.to_string())?;
        let b = corollary1_region(&inst.channel, &inst.input).map_err(|e| e.to_string())?;
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x.rhs - y.rhs).abs());
        }
    }
    if worst > 1e-12 {
        return Err(format!("max difference {worst:e}"));
    }
    within_time(
        start,
        Duration::from_secs(30),
        format!("max difference {worst:.2e} over 20 instances"),
    )
}

fn specialization_identity() -> Verdict {
    let start = Instant::now();
    let spec = io::load_det_spec(&fixture("modulo2_spec.json")).map_err(|e| e.to_string())?;
    let input = io::load_det_input(&fixture("uniform_binary_input.json")).map_err(|e| e.to_string())?;
    let mut worst = specialization_check(&spec, &input).map_err(|e| e.to_string())?;
    let mut r = rng(102);
    for _ in 0..10 {
        let spec = random::ternary_det_spec(&mut r);
        if !validate(&spec).passed() {
            return Err(format!("generated an invalid spec: {spec:?}"));
        }
        let input = random::det_input(&mut r, &spec).to_input().map_err(|e| e.to_string())?;
        worst = worst.max(specialization_check(&spec, &input).map_err(|e| e.to_string())?);
    }
    if worst > 1e-9 {
        return Err(format!("max difference {worst:e}"));
    }
    within_time(
        start,
        Duration::from_secs(60),
        format!("max difference {worst:.2e} over 11 channels"),
    )
}

fn reductions() -> Verdict {
    let mut r = rng(103);
    let mut egc = 0.0f64;
    for _ in 0..10 {
        let spec = random::egc_spec(&mut r);
        let raw = random::det_input(&mut r, &spec);
        let region = theorem2_region(&spec, &raw.to_input().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let direct = oracle::el_gamal_costa(&oracle::Outcomes::from_det(&spec, &raw));
        for (a, b) in region.iter().zip(&direct) {
            egc = egc.max((a.rhs - b).abs());
        }
    }
    let mut single = 0.0f64;
    for _ in 0..10 {
        let spec = random::single_source_spec(&mut r);
        let raw = random::det_input(&mut r, &spec);
        let region = theorem2_region(&spec, &raw.to_input().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let direct = oracle::relay_channel_r1(&oracle::Outcomes::from_det(&spec, &raw), spec.r0);
        single = single.max((region[0].rhs - direct).abs());
    }
    let detail = format!("silent relay {egc:.2e}, single source {single:.2e}");
    if egc > 1e-10 || single > 1e-10 {
        return Err(detail);
    }
    Ok(detail)
}

fn mi_engine() -> Verdict {
    let mut r = rng(104);
    let mut worst_z = 0.0f64;
    for _ in 0..10 {
        let j = random::joint(&mut r, 3);
        let exact = j.mutual_info(&["A"], &["B"], &["C"]).map_err(|e| e.to_string())?;
        let (est, se) = oracle::mc_conditional_mi(&j, 1_000_000, &mut r);
        worst_z = worst_z.max((exact - est).abs() / se);
    }
    let mut worst_id = 0.0f64;
    for _ in 0..100 {
        let j = random::joint(&mut r, 3);
        let mi = |a: &[&str], b: &[&str], c: &[&str]| j.mutual_info(a, b, c).unwrap();
        let chain = mi(&["A"], &["B", "C"], &[]) - mi(&["A"], &["C"], &[]) - mi(&["A"], &["B"], &["C"]);
        let sym = mi(&["A"], &["B"], &["C"]) - mi(&["B"], &["A"], &["C"]);
        worst_id = worst_id.max(chain.abs()).max(sym.abs());
    }
    let detail = format!("worst {worst_z:.2} standard errors; identities {worst_id:.2e}");
    if worst_z > 3.0 || worst_id > 1e-10 {
        return Err(detail);
    }
    Ok(detail)
}

fn geometry() -> Verdict {
    let mut r = rng(105);
    let mut worst_gap = 0.0f64;
    let mut worst_vertex = 0.0f64;
    for _ in 0..50 {
        let (region, (w1, w2)) = random::region(&mut r);
        let (exact, _) = region.max_weighted(w1, w2).map_err(|e| e.to_string())?;
        let (grid, pitch) = oracle::grid_max_weighted(&region, w1, w2, 2000);
        if grid > exact + 1e-9 || exact - grid > pitch + 1e-9 {
            return Err(format!("exact {exact}, grid {grid}, pitch {pitch}"));
        }
        worst_gap = worst_gap.max((exact - grid) / pitch);
        for &(x, y) in region.frontier().vertices() {
            for i in region.inequalities() {
                worst_vertex = worst_vertex.max(i.lhs(x, y) - i.rhs);
            }
        }
    }
    if worst_vertex > 1e-9 {
        return Err(format!("a frontier vertex violates a bound by {worst_vertex:e}"));
    }
    Ok(format!("grid shortfall at most {worst_gap:.2} pitch over 50 regions"))
}

fn r0_monotone() -> Verdict {
    let mut r = rng(106);
    for n in 0..20 {
        let mut cfg = random::gauss_config(&mut r);
        let hk = random::hk_params(&mut r);
        let mut prev = f64::NEG_INFINITY;
        for r0 in [0.0, 0.5, 1.0, 2.0] {
            cfg.r0 = r0;
            let s = sum_rate(&cfg, &hk);
            if s < prev {
                return Err(format!("config {n}: sum rate falls from {prev} to {s} at R0 = {r0}"));
            }
            prev = s;
        }
    }
    Ok("20 configurations".into())
}

fn point_to_point() -> Verdict {
    let hk = HkParams::new(1.0, 1.0, 1e6).unwrap();
    let mut worst = 0.0f64;
    for (g41, g52) in [(1.0, 1.0), (1.3, 0.8), (0.5, 2.0)] {
        let cfg = GaussConfig {
            g31: 0.0,
            g32: 0.0,
            g41,
            g42: 0.0,
            g51: 0.0,
            g52,
            p: 10.0,
            r0: 0.0,
        };
        let expected = cfn(g41 * g41 * 10.0).unwrap() + cfn(g52 * g52 * 10.0).unwrap();
        worst = worst.max((sum_rate(&cfg, &hk) - expected).abs());
    }
    if worst > 1e-3 {
        return Err(format!("off by {worst:e}"));
    }
    Ok(format!("max gap {worst:.2e} bits"))
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let sweep = fixture("reference_sweep.json");
    let run = |threads: &str, name: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_irc"))
            .args(["--threads", threads, "gauss-sweep"])
            .arg(&sweep)
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("gauss-sweep exited with {status}"));
        }
        std::fs::read(&out).map_err(|e| e.to_string())
    };
    let a = run("1", "a.csv")?;
    let b = run("1", "b.csv")?;
    let c = run("8", "c.csv")?;
    if a != b {
        return Err("rerun changed the output".into());
    }
    if a != c {
        return Err("--threads 8 changed the output".into());
    }
    Ok(format!("{} identical bytes across three runs", a.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("sweep dominance over both baselines", sweep_dominance),
        ("theorem1 equals corollary1 for one relay", theorem1_matches_corollary1),
        ("deterministic specialization identity", specialization_identity),
        ("silent-relay and single-source reductions", reductions),
        ("mutual information engine", mi_engine),
        ("geometry against grid search", geometry),
        ("sum rate non-decreasing in R0", r0_monotone),
        ("point-to-point limit", point_to_point),
        ("sweep output determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let verdict = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("PASS {} {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
