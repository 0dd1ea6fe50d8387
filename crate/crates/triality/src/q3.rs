//! O8+(3) inside O8+(3):S4 on 3360 points, from the generators `x0`, `y0`.

use triality_core::bsgs::derived_subgroup;
use triality_core::{BsgsChain, BsgsOptions, GeneratorSet, GroupElement, PermAction, Permutation};

use crate::atlas::{load_generators, Cache, DataManifest, GeneratorFile, Transport};
use crate::golden::{o8_plus_order, Q3};
use crate::pipeline::{CaseConfig, Check, DataConfig, Groups, PipelineError};

/// Manifest entry holding `x0`, `y0`.
pub const DATA_NAME: &str = "o8p3-s4";

/// Reads the generator file named in the manifest, from the data
/// directory, the cache or (unless offline) the network.
pub fn load(data: &DataConfig) -> Result<GeneratorFile, PipelineError> {
    let manifest = DataManifest::load(&data.data_dir.join("manifest.json"))?;
    let cache = Cache::new(&data.cache_dir);
    let http;
    let transport: Option<&dyn Transport> = if data.offline {
        None
    } else {
        http = crate::atlas::default_transport();
        http.as_deref()
    };
    Ok(load_generators(&data.data_dir, &manifest, DATA_NAME, &cache, transport)?)
}

pub struct Q3Build {
    pub groups: Option<Groups<Permutation, PermAction>>,
    pub checks: Vec<Check>,
}

fn known(seed: u64, order: u128) -> BsgsOptions {
    BsgsOptions::known_order(seed, order)
}

/// Certifies `|⟨x0, y0⟩| = 24|S|`, recovers `S = G'''`, and forms
/// `x = x0^4`, `y = y0^4` and `ρ = (x0 y0)^4`.
pub fn build(file: &GeneratorFile, cfg: &CaseConfig) -> Q3Build {
    let seed = cfg.seed;
    let mut checks = Vec::new();
    let done = |checks: Vec<Check>| Q3Build { groups: None, checks };
    let s_order = o8_plus_order(3);
    let ambient = Q3.ambient_order.expect("q = 3 has an ambient group");

    let t = Check::timer();
    let orders: Vec<String> = file.permutations.iter().map(|p| p.order().to_string()).collect();
    checks.push(Check::compare_text("build: orders of x0, y0", "24, 20".into(), orders.join(", "), t));
    let [x0, y0] = match <[Permutation; 2]>::try_from(file.permutations.clone()) {
        Ok(g) => g,
        Err(_) => return done(checks),
    };

    let t = Check::timer();
    let g_gens = GeneratorSet::with_labels(vec![x0.clone(), y0.clone()], &["x0", "y0"]).expect("compatible");
    match BsgsChain::build(&g_gens, PermAction, &known(seed, ambient)) {
        Ok(c) => checks.push(Check::compare("build: |<x0,y0>| = 24|S|", ambient, c.order().expect("certified"), t)),
        Err(e) => {
            checks.push(Check::with_status(
                "build: |<x0,y0>| = 24|S|",
                Check::num(ambient),
                format!("error: {e}"),
                false,
                t,
            ));
            return done(checks);
        }
    }
    cfg.heartbeat(|| "ambient group certified".into());

    // G > G' > G'' > G''' with quotients S4 > A4 > V4 > 1
    let t = Check::timer();
    let mut current = g_gens.clone();
    let mut third = None;
    for (step, order) in [12 * s_order, 4 * s_order, s_order].into_iter().enumerate() {
        match derived_subgroup(&current, PermAction, &known(seed, order)) {
            Ok((gens, chain)) => {
                cfg.heartbeat(|| format!("derived subgroup {}: {} generators", step + 1, gens.len()));
                current = gens;
                third = Some(chain);
            }
            Err(e) => {
                checks.push(Check::with_status(
                    "build: |G'''|",
                    Check::num(s_order),
                    format!("error at derived step {}: {e}", step + 1),
                    false,
                    t,
                ));
                return done(checks);
            }
        }
    }
    let third = third.expect("three steps");
    checks.push(Check::compare("build: |G'''|", s_order, third.order().expect("certified"), t));

    let t = Check::timer();
    let x = x0.pow(4);
    let y = y0.pow(4);
    let inside = third.contains(&x).unwrap_or(false) && third.contains(&y).unwrap_or(false);
    checks.push(Check::compare_text("build: x0^4, y0^4 in G'''", "true".into(), inside.to_string(), t));
    let t = Check::timer();
    let s_gens = GeneratorSet::with_labels(vec![x, y], &["x", "y"]).expect("compatible");
    let s_chain = match BsgsChain::build(&s_gens, PermAction, &known(seed, s_order)) {
        Ok(c) => c,
        Err(e) => {
            checks.push(Check::with_status("build: |<x,y>|", Check::num(s_order), format!("error: {e}"), false, t));
            return done(checks);
        }
    };
    checks.push(Check::compare("build: |<x,y>|", s_order, s_chain.order().expect("certified"), t));

    let t = Check::timer();
    let rho = x0.mul(&y0).pow(4);
    checks.push(Check::compare_text("build: order of rho = (x0 y0)^4", "3".into(), rho.order().to_string(), t));
    let t = Check::timer();
    let outside = !s_chain.contains(&rho).expect("certified");
    checks.push(Check::compare_text("build: rho not in S", "true".into(), outside.to_string(), t));

    let t = Check::timer();
    let mut with_rho = s_gens.clone();
    with_rho.push(rho.clone(), "r").expect("compatible");
    let g_chain = match BsgsChain::build(&with_rho, PermAction, &known(seed, 3 * s_order)) {
        Ok(c) => c,
        Err(e) => {
            checks.push(Check::with_status(
                "build: |<S,rho>|",
                Check::num(3 * s_order),
                format!("error: {e}"),
                false,
                t,
            ));
            return done(checks);
        }
    };
    checks.push(Check::compare("build: |<S,rho>|", 3 * s_order, g_chain.order().expect("certified"), t));

    let ok = checks.iter().all(Check::passed);
    let groups = ok.then(|| Groups { s_gens, s_chain, g_chain, rho, action: PermAction });
    Q3Build { groups, checks }
}
