use std::path::PathBuf;

use rayon::prelude::*;
use superdiff::chain::{binned_spectral_density, spectral_density_estimate, step_count, ChainState, ModeTable};
use superdiff::scaling::mean_stderr;
use superdiff::{ModelParams, RngStream};

use super::{require, streams};
use crate::output::{float, CsvOut};
use crate::{CliError, Ctx};

struct Member {
    energies: Vec<f64>,
    /// Per Wigner width: `[initial, final]` pairings for both branches.
    wigner: Vec<[[f64; 2]; 2]>,
    last: ChainState,
}

pub fn run(ctx: &Ctx) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.config.chain;
    let m = &ctx.config.model;
    // γ = 0 switches the noise off
    let p = if m.gamma == 0.0 { ModelParams::noiseless(m.b)? } else { m.params()? };
    require(cfg.ensemble > 0, "chain.ensemble must be positive")?;
    require(cfg.temperature >= 0.0, "chain.temperature must be >= 0")?;
    require(cfg.wigner_widths.iter().all(|&w| w > 0.0), "chain.wigner_widths must be positive")?;
    let segments = cfg.snapshots.max(1);
    let seg = cfg.t_macro / segments as f64;
    step_count(seg, cfg.epsilon, cfg.dt)?;
    let modes = ModeTable::new(cfg.n_sites, &p)?;
    let meta = ctx.meta(cfg)?;
    let (t0, amp, width) = (cfg.temperature, cfg.modulation_amplitude, cfg.modulation_width);
    let temperature = move |y: f64| t0 * (1.0 + amp * (-0.5 * y * y / (width * width)).exp());
    let stream = RngStream::new(ctx.seed, streams::CHAIN);
    let half = cfg.n_sites / 2;
    let pairings = |st: &ChainState| -> Result<Vec<[f64; 2]>, CliError> {
        cfg.wigner_widths
            .iter()
            .map(|&w| Ok(st.wigner_pairing(|y| (-0.5 * y * y / (w * w)).exp(), |_, _| 1.0, half)?))
            .collect()
    };
    let members: Vec<Member> = (0..cfg.ensemble as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream.substream(j).path_rng();
            let mut st = ChainState::thermal(modes.clone(), cfg.epsilon, temperature, &mut rng)?;
            let first = pairings(&st)?;
            let mut energies = vec![st.energy()];
            for _ in 0..segments {
                st.run_kinetic_horizon(seg, cfg.dt, &mut rng)?;
                energies.push(st.energy());
            }
            let last = pairings(&st)?;
            Ok(Member {
                energies,
                wigner: first.into_iter().zip(last).map(|(a, b)| [a, b]).collect(),
                last: st,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let mut we = CsvOut::create(&ctx.out, "chain_energy.csv", &meta, &["member", "t_macro", "energy", "relative_drift"])?;
    for (j, mem) in members.iter().enumerate() {
        let e0 = mem.energies[0];
        for (s, &e) in mem.energies.iter().enumerate() {
            let drift = if e0 > 0.0 { (e - e0) / e0 } else { e - e0 };
            we.row(&[j.to_string(), float(seg * s as f64), float(e), float(drift)])?;
        }
    }

    let finals: Vec<ChainState> = members.iter().map(|m| m.last.clone()).collect();
    let mut ws = CsvOut::create(&ctx.out, "chain_spectrum.csv", &meta, &["t_macro", "branch", "k", "density", "stderr"])?;
    if cfg.spectrum_bins == 0 {
        let est = spectral_density_estimate(&finals)?;
        let ks = modes.wavenumbers();
        let mut order: Vec<usize> = (0..ks.len()).collect();
        order.sort_by(|&a, &b| ks[a].total_cmp(&ks[b]));
        for (i, branch) in est.iter().enumerate() {
            for &j in &order {
                ws.row(&[float(cfg.t_macro), (i + 1).to_string(), float(ks[j]), float(branch[j].mean), float(branch[j].stderr)])?;
            }
        }
    } else {
        let (centres, est) = binned_spectral_density(&finals, cfg.spectrum_bins)?;
        for (i, branch) in est.iter().enumerate() {
            for (c, e) in centres.iter().zip(branch) {
                ws.row(&[float(cfg.t_macro), (i + 1).to_string(), float(*c), float(e.mean), float(e.stderr)])?;
            }
        }
    }

    let mut ww = CsvOut::create(&ctx.out, "chain_wigner.csv", &meta, &["t_macro", "width", "branch", "pairing", "stderr"])?;
    for (wi, &width) in cfg.wigner_widths.iter().enumerate() {
        for (slot, t) in [(0, 0.0), (1, cfg.t_macro)] {
            for branch in 0..2 {
                let e = mean_stderr(members.iter().map(|m| m.wigner[wi][slot][branch]));
                ww.row(&[float(t), float(width), (branch + 1).to_string(), float(e.mean), float(e.stderr)])?;
            }
        }
    }
    Ok(vec![we.finish()?, ws.finish()?, ww.finish()?])
}
