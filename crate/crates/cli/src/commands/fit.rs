use std::path::PathBuf;

use serde::Serialize;
use superdiff::scaling::{default_xi_grid, empirical_charfn_modulus, fit_stable_charfn, StableFit};

use crate::output::{float, read_csv, write_json, CsvOut};
use crate::{CliError, Ctx};

#[derive(Serialize)]
struct GroupFit {
    n: f64,
    t: f64,
    paths: usize,
    fit: StableFit,
}

fn column(header: &[String], name: &str) -> Result<usize, CliError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Config(format!("input has no column `{name}`")))
}

fn parse(s: &str) -> Result<f64, CliError> {
    s.parse().map_err(|_| CliError::Config(format!("not a number: `{s}`")))
}

pub fn run(ctx: &Ctx) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.config.fit;
    let p = ctx.config.model.params()?;
    let input = cfg.input.clone().unwrap_or_else(|| ctx.out.join("ctrw_endpoints.csv"));
    let reference = cfg.reference_exponent.unwrap_or_else(|| p.stable_index());
    let xi_points = cfg.xi_points.unwrap_or(40);
    let meta = ctx.meta(cfg)?;
    let (header, rows) = read_csv(&input)?;
    let (cn, ct, cz) = (column(&header, "N")?, column(&header, "t")?, column(&header, "scaled_endpoint")?);
    // groups in order of first appearance
    let mut groups: Vec<(f64, f64, Vec<f64>)> = Vec::new();
    for r in &rows {
        let (n, t, z) = (parse(&r[cn])?, parse(&r[ct])?, parse(&r[cz])?);
        match groups.iter_mut().find(|g| g.0 == n && g.1 == t) {
            Some(g) => g.2.push(z),
            None => groups.push((n, t, vec![z])),
        }
    }
    let mut fits = Vec::new();
    let mut w = CsvOut::create(&ctx.out, "fit_charfn.csv", &meta, &["N", "t", "xi", "modulus", "fitted"])?;
    for (n, t, ens) in groups.iter().filter(|g| g.1 > 0.0) {
        let grid = default_xi_grid(ens, xi_points)?;
        let fit = fit_stable_charfn(ens, *t, Some(&grid), reference)?;
        for &xi in &grid {
            let model = (-t * fit.d_constant * xi.powf(reference)).exp();
            w.row(&[float(*n), float(*t), float(xi), float(empirical_charfn_modulus(ens, xi)), float(model)])?;
        }
        fits.push(GroupFit {
            n: *n,
            t: *t,
            paths: ens.len(),
            fit,
        });
    }
    if fits.is_empty() {
        return Err(CliError::Config(format!("{} has no ensemble with t > 0", input.display())));
    }
    Ok(vec![w.finish()?, write_json(&ctx.out, "fit_report.json", &meta, &fits)?])
}
