//! One line per acceptance criterion, then a single assertion over all of
//! them. Runs both cases in full, so expect a few minutes in release mode.

use std::path::Path;
use std::time::Instant;

use triality::golden::Case;
use triality::pipeline::{run_case, CaseConfig, Check, DataConfig, PipelineReport, Stage, Status};
use triality::report::render_checks;

struct Outcome {
    id: u32,
    ok: bool,
    detail: String,
}

fn data() -> DataConfig {
    let data_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let cache_dir = std::env::temp_dir().join("triality-acceptance-cache");
    DataConfig { data_dir, cache_dir, offline: true }
}

fn run(case: Case, seed: u64, stages: &[Stage]) -> PipelineReport {
    let mut cfg = CaseConfig::new(case, data());
    cfg.seed = seed;
    if !stages.is_empty() {
        cfg.stages = stages.iter().copied().collect();
    }
    run_case(&cfg).expect("pipeline runs")
}

fn json(r: &PipelineReport) -> String {
    serde_json::to_string_pretty(&r.normalized()).expect("serializable")
}

/// All named checks present and passing, with their total time under `limit` seconds.
fn judge(id: u32, r: &PipelineReport, names: &[&str], limit: f64) -> Outcome {
    let mut seconds = 0.0;
    let mut problems = Vec::new();
    for name in names {
        match r.check(name) {
            Some(c) if c.passed() => seconds += c.seconds,
            Some(c) => problems.push(format!("{name}: expected {}, actual {}", c.expected, c.actual)),
            None => problems.push(format!("{name}: not run")),
        }
    }
    if seconds > limit {
        problems.push(format!("took {seconds:.1} s, limit {limit} s"));
    }
    let detail =
        if problems.is_empty() { format!("{} checks, {seconds:.1} s", names.len()) } else { problems.join("; ") };
    Outcome { id, ok: problems.is_empty(), detail }
}

fn with_prefix<'a>(r: &'a PipelineReport, prefixes: &[&str]) -> Vec<&'a str> {
    r.stages.iter().filter(|c| prefixes.iter().any(|p| c.name.starts_with(p))).map(|c| c.name.as_str()).collect()
}

fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn main() {
    let mut out: Vec<Outcome> = Vec::new();

    let q2 = run(Case::Q2, 1, &[]);
    let q2b = run(Case::Q2, 2, &[]);
    out.push(judge(
        1,
        &q2,
        &["build: |<x,y>|", "build: |<X,Y>|", "build: |<X,Y,P>|", "build: order of P", "build: P not in <X,Y>"],
        60.0,
    ));
    out.push(judge(2, &q2, &["build: x^rho, y^rho in <x,y>", "build: graph subgroup order"], 120.0));
    out.push(judge(
        3,
        &q2,
        &[
            "class: |rho^S|",
            "class: |C_S(rho)| = |G2(q)|",
            "vrho: |vrho^S|",
            "vrho: |C_S(vrho)|",
            "vrho: |vrho^S| != |rho^S|",
        ],
        600.0,
    ));
    out.push(judge(4, &q2, &with_prefix(&q2, &["orbits:", "pairs:"]), 300.0));
    out.push(judge(
        5,
        &q2,
        &[
            "alpha: |<rho, rho^x, rho^y>|",
            "alpha: largest <rho, rho^g>",
            "alpha(rho)",
            "vrho: |<vrho, vrho^x>|",
            "alpha(vrho)",
        ],
        120.0,
    ));

    let t = Instant::now();
    let q3 = run(Case::Q3, 1, &[]);
    let q3_seconds = t.elapsed().as_secs_f64();
    out.push(judge(
        6,
        &q3,
        &[
            "build: orders of x0, y0",
            "build: |<x0,y0>| = 24|S|",
            "build: |G'''|",
            "build: x0^4, y0^4 in G'''",
            "build: |<x,y>|",
            "build: order of rho = (x0 y0)^4",
            "build: rho not in S",
            "build: |<S,rho>|",
        ],
        900.0,
    ));
    let mut c7 = judge(7, &q3, &["class: |rho^S|", "class: |C_S(rho)| = |G2(q)|"], 3600.0);
    match peak_rss_kb() {
        Some(kb) if kb > 8 * 1024 * 1024 => {
            c7.ok = false;
            c7.detail.push_str(&format!("; peak RSS {} MB over 8 GB", kb / 1024));
        }
        Some(kb) => c7.detail.push_str(&format!(", peak RSS {} MB", kb / 1024)),
        None => c7.detail.push_str(", peak RSS unavailable"),
    }
    out.push(c7);

    let mut c8 = judge(8, &q3, &with_prefix(&q3, &["orbits:", "pairs:"]), 3600.0);
    for e in &q3.table {
        if let Some(twin) = q2.table.iter().find(|f| f.structure == e.structure) {
            if twin.fingerprint != e.fingerprint {
                c8.ok = false;
                c8.detail.push_str(&format!("; fingerprint of {} differs from q2", e.structure));
            }
        }
    }
    if !q3.table.iter().any(|e| e.order == 243) {
        c8.ok = false;
        c8.detail.push_str("; no order-243 entry");
    }
    out.push(c8);

    let plateau = "vrho: |C_S(vrho)| (lower bound, heuristic equality)";
    let mut c9 = judge(
        9,
        &q3,
        &["vrho: order", "vrho: vrho.rho^-1 in S", "vrho: not in rho^S", plateau, "vrho: |<vrho, vrho^x>|"],
        1800.0,
    );
    let q3b = run(Case::Q3, 2, &[]);
    let q3c = run(Case::Q3, 3, &[Stage::Vrho]);
    let plateaus: Vec<Option<(String, Status)>> =
        [&q3, &q3b, &q3c].iter().map(|r| r.check(plateau).map(|c| (c.actual.clone(), c.status))).collect();
    if plateaus.iter().any(|p| p.as_ref().map(|(_, s)| *s) != Some(Status::HeuristicPass))
        || plateaus.windows(2).any(|w| w[0] != w[1])
    {
        c9.ok = false;
        c9.detail.push_str(&format!("; plateaus over seeds 1..3: {plateaus:?}"));
    } else {
        c9.detail.push_str("; plateau identical for seeds 1, 2, 3");
    }
    out.push(c9);

    let t = Instant::now();
    let oracles = triality::selftest::run(None);
    let oracle_seconds = t.elapsed().as_secs_f64();
    let failed: Vec<&Check> = oracles.iter().filter(|c| !c.passed()).collect();
    out.push(Outcome {
        id: 10,
        ok: failed.is_empty() && oracle_seconds < 60.0,
        detail: if failed.is_empty() {
            format!("{} checks, {oracle_seconds:.1} s", oracles.len())
        } else {
            render_checks(&failed.into_iter().cloned().collect::<Vec<_>>(), false)
        },
    });

    let again = render_checks(&triality::selftest::run(None), false);
    let same_q2 = json(&q2) == json(&q2b);
    let same_q3 = json(&q3) == json(&q3b);
    let same_oracles = again == render_checks(&oracles, false);
    out.push(Outcome {
        id: 11,
        ok: same_q2 && same_q3 && same_oracles,
        detail: format!("q2 seeds 1/2 identical: {same_q2}; q3 seeds 1/2 identical: {same_q3}; selftest repeat identical: {same_oracles}"),
    });

    for o in &out {
        println!("criterion {:>2}: {} ({})", o.id, if o.ok { "pass" } else { "FAIL" }, o.detail.trim_end());
    }
    println!("q3 full run: {q3_seconds:.1} s");
    let failing: Vec<u32> = out.iter().filter(|o| !o.ok).map(|o| o.id).collect();
    if !failing.is_empty() {
        eprintln!("failing criteria: {failing:?}");
        std::process::exit(1);
    }
}
