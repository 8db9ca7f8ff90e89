use std::path::PathBuf;

use serde::Serialize;
use superdiff::boltzmann::{k_average_profile, InitialDatum, KProfile, YProfile};
use superdiff::fracdiff::{evolve, leakage_estimate, GridFunction};
use superdiff::{Error, RngStream};

use super::{linspace, require, streams};
use crate::output::{float, write_json, CsvOut};
use crate::{CliError, Ctx};

#[derive(Serialize)]
struct Summary {
    d: f64,
    s_half: f64,
    max_relative_error: f64,
    l2_distance: f64,
    /// Largest `|difference| / stderr` over the grid.
    max_standardized: f64,
    /// True when `t = 0` or `D = 0`: the reference does not move.
    frozen_reference: bool,
}

pub fn run(ctx: &Ctx) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.config.compare;
    let p = ctx.config.model.params()?;
    let d = cfg
        .d
        .ok_or_else(|| CliError::Config("compare.d is required (fit it with `ctrw` + `fit`)".into()))?;
    require(d >= 0.0, "compare.d must be >= 0")?;
    require(cfg.sigma > 0.0, "compare.sigma must be positive")?;
    require(cfg.y_points >= 2, "compare.y_points must be >= 2")?;
    let meta = ctx.meta(cfg)?;
    let s_half = 0.5 * p.stable_index();
    let ys = linspace(cfg.y_min, cfg.y_max, cfg.y_points);
    let profile = YProfile::Gaussian { center: 0.0, width: cfg.sigma };
    // u₀ = ½ ū₀(y), constant in (k, i), so Σᵢ∫u₀ dk = ū₀
    let u0 = InitialDatum::new(0.5, profile.clone(), KProfile::Constant)?;
    let stream = RngStream::new(ctx.seed, streams::COMPARE);
    let kinetic = k_average_profile(&ys, cfg.n_scale, cfg.t, &u0, cfg.paths, &p, &stream)?;

    let frozen = cfg.t == 0.0 || d == 0.0;
    let reference: Vec<f64> = if frozen {
        ys.iter().map(|&y| profile.value(y)).collect()
    } else {
        let leak = leakage_estimate(cfg.half_length, d, s_half, cfg.t);
        if leak > 1e-6 {
            return Err(Error::NumericalGuard(format!(
                "box half-length {} leaks {leak:.2e} of the mass; enlarge compare.half_length",
                cfg.half_length
            ))
            .into());
        }
        let g0 = GridFunction::gaussian(cfg.half_length, cfg.grid_points, 0.0, cfg.sigma, 1.0)?;
        let g = evolve(&g0, d, s_half, cfg.t)?;
        ys.iter().map(|&y| g.interpolate_local(y, 8)).collect()
    };

    let mut w = CsvOut::create(
        &ctx.out,
        "compare.csv",
        &meta,
        &["y", "boltzmann", "stderr", "fracdiff", "difference", "relative"],
    )?;
    let (mut max_rel, mut l2, mut max_std) = (0.0f64, 0.0, 0.0f64);
    let dy = ys[1] - ys[0];
    for ((&y, k), &r) in ys.iter().zip(&kinetic).zip(&reference) {
        let diff = k.mean - r;
        let rel = if r != 0.0 { diff.abs() / r.abs() } else { diff.abs() };
        max_rel = max_rel.max(rel);
        l2 += diff * diff * dy;
        if k.stderr > 0.0 {
            max_std = max_std.max(diff.abs() / k.stderr);
        } else if diff != 0.0 {
            max_std = f64::INFINITY;
        }
        w.row(&[float(y), float(k.mean), float(k.stderr), float(r), float(diff), float(rel)])?;
    }
    let summary = Summary {
        d,
        s_half,
        max_relative_error: max_rel,
        l2_distance: l2.sqrt(),
        max_standardized: max_std,
        frozen_reference: frozen,
    };
    Ok(vec![w.finish()?, write_json(&ctx.out, "compare_summary.json", &meta, &summary)?])
}
