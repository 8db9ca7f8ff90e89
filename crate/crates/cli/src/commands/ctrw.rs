use std::path::PathBuf;

use serde::Serialize;
use superdiff::kinetic::{path_ensemble, StartLaw};
use superdiff::scaling::{ks_p_value, ks_statistic};
use superdiff::{Branch, PhononState, RngStream};

use super::{require, streams};
use crate::output::{float, write_json, CsvOut};
use crate::{CliError, Ctx};

#[derive(Serialize)]
struct KsPair {
    t: f64,
    n_a: f64,
    n_b: f64,
    statistic: f64,
    p_value: f64,
}

#[derive(Serialize)]
struct Summary {
    space_scaling_exponent: f64,
    paths: usize,
    ks_successive_n: Vec<KsPair>,
}

pub fn run(ctx: &Ctx) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.config.ctrw;
    let p = ctx.config.model.params()?;
    require(cfg.paths > 0, "ctrw.paths must be positive")?;
    require(!cfg.n_list.is_empty() && !cfg.t_list.is_empty(), "ctrw.n_list and ctrw.t_list must be nonempty")?;
    let start = match cfg.start_k {
        Some(k) => StartLaw::Fixed(PhononState::new(k, Branch::from_index(cfg.start_branch)?)?),
        None => StartLaw::Pi,
    };
    let meta = ctx.meta(cfg)?;
    let expo = p.space_scaling_exponent();
    let mut w = CsvOut::create(
        &ctx.out,
        "ctrw_endpoints.csv",
        &meta,
        &["path_index", "N", "t", "scaled_endpoint", "n_jumps"],
    )?;
    let mut groups: Vec<(f64, f64, Vec<f64>)> = Vec::new();
    for (ni, &n) in cfg.n_list.iter().enumerate() {
        require(n >= 1.0, format!("ctrw.n_list entries must be >= 1, got {n}"))?;
        for (ti, &t) in cfg.t_list.iter().enumerate() {
            require(t >= 0.0, format!("ctrw.t_list entries must be >= 0, got {t}"))?;
            let stream = RngStream::new(ctx.seed, streams::CTRW + 100 * ni as u64 + ti as u64);
            let paths = path_ensemble(start, 0.0, n * t, &p, &stream, cfg.paths, false)?;
            let scale = n.powf(-expo);
            let mut ends = Vec::with_capacity(paths.len());
            for (j, path) in paths.iter().enumerate() {
                let z = path.z_final * scale;
                ends.push(z);
                w.row(&[j.to_string(), float(n), float(t), float(z), path.n_jumps.to_string()])?;
            }
            groups.push((n, t, ends));
        }
    }
    let mut ks = Vec::new();
    for &t in &cfg.t_list {
        let at_t: Vec<&(f64, f64, Vec<f64>)> = groups.iter().filter(|g| g.1 == t).collect();
        for pair in at_t.windows(2) {
            let d = ks_statistic(&pair[0].2, &pair[1].2)?;
            ks.push(KsPair {
                t,
                n_a: pair[0].0,
                n_b: pair[1].0,
                statistic: d,
                p_value: ks_p_value(d, pair[0].2.len(), pair[1].2.len()),
            });
        }
    }
    let summary = Summary {
        space_scaling_exponent: expo,
        paths: cfg.paths,
        ks_successive_n: ks,
    };
    Ok(vec![w.finish()?, write_json(&ctx.out, "ctrw_summary.json", &meta, &summary)?])
}
