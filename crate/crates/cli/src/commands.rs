use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use workbench_core::density::{
    build_graph, contains_ktt, coverage_bound, empirical_polignac_density, kst_bound, MAX_GRAPH_N,
};
use workbench_core::gaps::{
    beta_subsequence_check, gap_value_set, partition_tuple, scan_singleton_cells, BetaSequence, GAP_SET_LABEL,
};
use workbench_core::primes::{gap_counts, goldbach_numbers, normalized_gaps, GapMode};
use workbench_core::sieve::{default_shape, GoldbachWindow, MomentRange};
use workbench_core::variational::{
    constrained_minimizer_ratio, fourier_kernel_check, g_closed_forms, moment_ratios, simplex_mc_integrals_with,
    tail_bounds, FourierOptions, McOptions, PsiChoice, Sampler,
};
use workbench_core::{Error, GParams, GShape, PrimeTable, SieveConfig, SieveEngine};

use crate::args::{
    Command, DensityArgs, GapsArgs, GoldbachArgs, PrimesArgs, SamplerArg, SieveArgs, VariationalArgs,
};
use crate::output::{merged, Body};
use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Runs one subcommand. The exit status is nonzero only when the run
/// finished but an internal check failed.
pub fn execute(cmd: &Command) -> Result<(Body, i32), CliError> {
    match cmd {
        Command::Primes(a) => primes(a).map(|b| (b, 0)),
        Command::Variational(a) => variational(a).map(|b| (b, 0)),
        Command::Sieve(a) => sieve(a).map(|b| (b, 0)),
        Command::GoldbachScan(a) => goldbach_scan(a),
        Command::Density(a) => density(a).map(|b| (b, 0)),
        Command::Gaps(a) => gaps(a).map(|b| (b, 0)),
    }
}

fn primes(a: &PrimesArgs) -> Result<Body, CliError> {
    if a.limit < 2 {
        return Err(usage(format!("--limit must be at least 2, got {}", a.limit)));
    }
    if a.goldbach_gaps {
        let nums = goldbach_numbers(a.limit)?;
        let rows = nums.windows(2).map(|w| vec![json!(w[0]), json!(w[1] - w[0])]).collect();
        return Ok(Body::Table { columns: vec!["g", "gap"], rows });
    }
    if a.gap_counts {
        let mode = if a.consecutive { GapMode::Consecutive } else { GapMode::AllPairs };
        let counts = gap_counts(a.limit, a.max_diff, mode)?;
        let rows = counts.iter().map(|(m, c)| vec![json!(m), json!(c)]).collect();
        return Ok(Body::Table { columns: vec!["m", "count"], rows });
    }
    if a.normalized_gaps {
        let g = normalized_gaps(a.limit)?;
        let rows = g.entries.iter().map(|e| vec![json!(e.p), json!(e.gap), json!(e.normalized)]).collect();
        return Ok(Body::Table { columns: vec!["p", "gap", "normalized"], rows });
    }
    let table = PrimeTable::up_to(a.limit, false)?;
    let ps = table.primes();
    let (gap, after) = ps.windows(2).map(|w| (w[1] - w[0], w[0])).fold((0, 0), |best, x| if x.0 > best.0 { x } else { best });
    Ok(Body::Record(json!({
        "prime_count": ps.len(),
        "largest_prime": ps.last(),
        "max_gap": gap,
        "max_gap_after": after,
    })))
}

fn psi_choice(text: &str, k: u64) -> Result<PsiChoice, CliError> {
    match text {
        "auto" if (k as f64).ln().ln() > 1.0 => Ok(PsiChoice::LogLog),
        "auto" => Ok(PsiChoice::Fixed(0.5)),
        "loglog" => Ok(PsiChoice::LogLog),
        other => other
            .parse::<f64>()
            .map(PsiChoice::Fixed)
            .map_err(|_| usage(format!("--psi must be auto, loglog or a number, got {other}"))),
    }
}

fn variational(a: &VariationalArgs) -> Result<Body, CliError> {
    let psi = psi_choice(&a.psi, a.k)?;
    let params = match (a.l, a.a, a.t) {
        (Some(l), Some(aa), Some(t)) => GParams::new(a.k, l, aa, t)?,
        _ => GParams::schedule(a.k, psi, a.c)?,
    };
    if let Some(n) = a.mc_samples {
        // fail before the expensive parts
        if a.k > 10 || n < workbench_core::variational::MIN_SAMPLES {
            return Err(usage(format!(
                "--mc-samples needs k <= 10 and at least {} samples",
                workbench_core::variational::MIN_SAMPLES
            )));
        }
    }
    // the library reports this as a domain error; on the command line it is
    // a parameter condition
    let epsilon = (1.0 - params.t / params.kf()) / params.l;
    let m_c = params.shape().m_c();
    if !(m_c < epsilon) {
        return Err(CliError::Core(Error::Condition(format!(
            "centre of mass m_c = {m_c} must be below (1 - T/k)/l = {epsilon}"
        ))));
    }
    let tails = tail_bounds(&params)?;
    let ratios = moment_ratios(&params)?;
    let minimizer = constrained_minimizer_ratio(&params)?;
    let scale = params.ratio_scale(psi).ok();
    let mut out = Map::new();
    out.insert("params".into(), to_value(&params));
    out.insert("psi".into(), to_value(&psi));
    out.insert("closed_forms".into(), to_value(&g_closed_forms(&params)));
    out.insert("tail_bounds".into(), to_value(&tails));
    out.insert("moment_ratios".into(), to_value(&ratios));
    out.insert("minimizer".into(), to_value(&minimizer));
    out.insert("scale".into(), to_value(&scale));
    if let Some(s) = scale {
        out.insert(
            "quotients".into(),
            json!({
                "j_over_i": ratios.j_over_i / s,
                "iprime_over_i": ratios.iprime_over_i / s,
                "minimizer": minimizer.ratio / s,
            }),
        );
    }
    if let Some(n) = a.mc_samples {
        let sampler = match a.sampler {
            SamplerArg::Product => Sampler::ProductImportance,
            SamplerArg::Uniform => Sampler::UniformSimplex,
        };
        let opts = McOptions { sampler, ..McOptions::default() };
        let mc = simplex_mc_integrals_with(&params, n, a.seed, opts)?;
        let j_over_i = mc.j_k.value / mc.i_k.value;
        out.insert(
            "monte_carlo".into(),
            merged(
                to_value(&mc),
                Map::from_iter([
                    ("j_over_i".to_string(), json!(j_over_i)),
                    ("tail1_within_bound".to_string(), json!(mc.tail1_relative.value <= tails.relative1 + 3.0 * mc.tail1_relative.stderr)),
                    ("tail2_within_bound".to_string(), json!(mc.tail2_relative.value <= tails.relative2 + 3.0 * mc.tail2_relative.stderr)),
                ]),
            ),
        );
    }
    if a.fourier {
        out.insert("fourier".into(), to_value(&fourier_kernel_check(FourierOptions::default())));
    }
    Ok(Body::Record(Value::Object(out)))
}

fn shape_override(l: Option<f64>, a: Option<f64>, t: Option<f64>, k: usize) -> Result<GShape, Error> {
    match (l, a, t) {
        (Some(l), Some(a), Some(t)) => GShape::new(l, a, t),
        _ => Ok(default_shape(k)),
    }
}

fn sieve(a: &SieveArgs) -> Result<Body, CliError> {
    let k = a.tuple.k();
    let shape = shape_override(a.l, a.a, a.t, k)?;
    let cfg = SieveConfig::with_parts(a.n, a.delta, a.tuple.clone(), shape, a.w_bound, a.b0)?;
    let range = match (a.range_half, a.lo, a.hi) {
        (true, _, _) => MomentRange::Half,
        (false, Some(lo), Some(hi)) => MomentRange::Custom { lo, hi },
        _ => MomentRange::Full,
    };
    let (lo, hi) = range.bounds(a.n);
    if lo == 0 || hi < lo || hi > a.n {
        return Err(usage(format!("range [{lo}, {hi}] must satisfy 1 <= lo <= hi <= N")));
    }
    if let Some(ij) = &a.tao {
        if ij.len() != 2 || ij[0] == ij[1] || ij[0] >= k || ij[1] >= k || !(a.tao_t_scale > 0.0) {
            return Err(usage("--tao needs two distinct indices below k and a positive --tao-t-scale"));
        }
    }
    let engine = SieveEngine::new(cfg.clone())?;
    let moments = engine.moment_sums(range, a.m)?;
    let mut out = Map::new();
    out.insert("config".into(), to_value(&cfg));
    out.insert("moments".into(), to_value(&moments));
    if let Some(ij) = &a.tao {
        let alt = GShape { t: cfg.shape.t * a.tao_t_scale, ..cfg.shape };
        out.insert("tao".into(), to_value(&engine.tao_domination_check(ij[0], ij[1], alt, range)?));
    }
    Ok(Body::Record(Value::Object(out)))
}

fn goldbach_scan(a: &GoldbachArgs) -> Result<(Body, i32), CliError> {
    let (from, to) = match (a.n, a.from, a.to) {
        (Some(n), _, _) => (n, n),
        (None, Some(f), Some(t)) => (f, t),
        _ => return Err(usage("give --N or both --from and --to")),
    };
    let evens: Vec<u64> = (from..=to).filter(|n| n % 2 == 0).collect();
    if evens.is_empty() {
        return Err(usage(format!("no even N in [{from}, {to}]")));
    }
    let k = a.tuple.k();
    let cfg = SieveConfig::with_parts(to, a.delta, a.tuple.clone(), default_shape(k), a.w_bound, None)?;
    let reach = to
        .checked_add(a.tuple.max().max(0) as u64 + 1)
        .ok_or_else(|| usage("N too large"))?;
    let primes = Arc::new(PrimeTable::up_to(reach, true)?);
    let window = GoldbachWindow::new(cfg, primes)?;
    let reports = evens.par_iter().map(|&n| window.scan(n)).collect::<Result<Vec<_>, _>>()?;
    let failed = reports.iter().filter(|r| !r.cs_holds).count();
    let rows = reports
        .iter()
        .map(|r| {
            let w = r.witness;
            vec![
                json!(r.big_n),
                json!(r.n_count),
                json!(r.sum_w2),
                json!(r.s_tilde),
                json!(r.positive_mass),
                json!(r.pairs_same),
                json!(r.pairs_cross),
                json!(r.cs_holds),
                json!(r.off_diagonal_form_holds),
                json!(w.map(|w| w.n)),
                json!(w.map(|w| w.i)),
                json!(w.map(|w| w.j)),
                json!(w.map(|w| w.p)),
                json!(w.map(|w| w.q)),
            ]
        })
        .collect();
    let columns = vec![
        "N", "n_count", "sum_w2", "s_tilde", "positive_mass", "pairs_same", "pairs_cross", "cs_holds",
        "off_diagonal_form_holds", "witness_n", "i", "j", "p", "q",
    ];
    let status = if failed > 0 {
        eprintln!("workbench: Cauchy-Schwarz check failed for {failed} values of N");
        5
    } else {
        0
    };
    Ok((Body::Table { columns, rows }, status))
}

fn density(a: &DensityArgs) -> Result<Body, CliError> {
    if let Some(n) = a.graph_n {
        if n == 0 || n > MAX_GRAPH_N {
            return Err(CliError::Core(Error::Resource {
                what: "difference graph vertices",
                requested: n,
                budget: MAX_GRAPH_N,
            }));
        }
        if a.ktt == 0 || !(a.kst_c > 0.0) {
            return Err(usage("--ktt must be positive and --kst-c must be positive"));
        }
    }
    let rep = empirical_polignac_density(a.limit, a.threshold, a.max_diff)?;
    let mut out = Map::new();
    out.insert(
        "polignac".into(),
        merged(to_value(&rep), Map::from_iter([("exception_count".to_string(), json!(rep.exceptions.len()))])),
    );
    if let Some(n) = a.graph_n {
        let counts = gap_counts(a.limit, (2 * (n - 1)).max(2), GapMode::AllPairs)?;
        let g = build_graph(n, |m| counts.get(&m).is_some_and(|&c| c >= a.threshold))?;
        let edges = g.edge_count();
        let ktt = contains_ktt(&g, a.ktt)?;
        out.insert(
            "graph".into(),
            json!({
                "n": n,
                "edge_count": edges,
                "edge_differences": g.edge_differences().len(),
                "coverage_bound": coverage_bound(edges),
                "kst_bound": kst_bound(n, a.ktt as u64, a.kst_c)?,
                "ktt": ktt,
            }),
        );
    }
    Ok(Body::Record(Value::Object(out)))
}

fn gaps(a: &GapsArgs) -> Result<Body, CliError> {
    let betas = BetaSequence::new(a.beta.clone())?;
    let part = a.tuple.as_ref().map(|t| partition_tuple(t, a.theta, a.m)).transpose()?;
    if part.is_some() && a.hi < a.lo {
        return Err(usage(format!("--hi {} is below --lo {}", a.hi, a.lo)));
    }
    let set = gap_value_set(a.gap_limit)?;
    let res = beta_subsequence_check(&betas, &set, a.tol, a.min_len)?;
    let mut out = Map::new();
    out.insert("label".into(), json!(GAP_SET_LABEL));
    out.insert("gap_set_size".into(), json!(set.len()));
    out.insert("subsequence".into(), to_value(&res));
    if let Some(part) = part {
        let t = &part.tuple;
        if (a.lo as i64).saturating_add(t.min()) < 0 {
            return Err(usage("--lo plus the smallest offset must be nonnegative"));
        }
        let reach = a.hi.saturating_add(t.max().max(0) as u64 + 1);
        let table = PrimeTable::up_to(reach, false)?;
        let hits = scan_singleton_cells(&part, a.lo, a.hi, a.min_singletons, None, &table)?;
        let first: Vec<Value> = hits.iter().take(a.max_hits).map(|c| json!({ "n": c.n, "y": c.y })).collect();
        out.insert(
            "cells".into(),
            json!({
                "a": part.a,
                "cells": part.cells.len(),
                "cell_size": part.cell_size(),
                "scanned": a.hi - a.lo + 1,
                "hits": hits.len(),
                "first_hits": first,
            }),
        );
    }
    Ok(Body::Record(Value::Object(out)))
}
