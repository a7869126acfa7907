//! `sedx synth`: emit a corpus file from the multiplicative SARX generator.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sedx_core::sarx::{expand_multiplicative, synthesize_sarx, NoiseSpec, SarxCoeffs};
use sedx_core::series::TimeSeries;

use crate::config::RunConfig;
use crate::corpus::write_corpus;
use crate::error::{CliError, Result};

pub fn run(config: &RunConfig, out: &Path) -> Result<()> {
    let synth = config.synth.as_ref().ok_or_else(|| {
        CliError::Usage("synth requires a [synth] block in the config".into())
    })?;
    let spec = config.seasonal_spec()?;
    let exo = synth.exo.to_process();

    let base = expand_multiplicative(&synth.psi, &synth.seasonal_psi, &spec)?;
    let mut coeffs = SarxCoeffs::zeros(&spec, exo.dim());
    coeffs.standard = base.standard;
    coeffs.seasonal = base.seasonal;
    coeffs.intercept = synth.intercept;
    if exo.dim() > 0 {
        coeffs.exo[0] = vec![synth.exo_weight];
    }

    let mut affine_rng = ChaCha8Rng::seed_from_u64(synth.seed.wrapping_mul(0x9E37_79B9).wrapping_add(1));
    let noise = NoiseSpec {
        sigma_e: synth.sigma_e,
    };
    let mut corpus = Vec::with_capacity(synth.n_series);
    for i in 0..synth.n_series {
        let raw = synthesize_sarx(&coeffs, &spec, noise, synth.length, &exo, synth.seed + i as u64)?;
        let amp = draw(&mut affine_rng, synth.scale_min, synth.scale_max);
        let shift = draw(&mut affine_rng, synth.shift_min, synth.shift_max);
        let y = raw.y.iter().map(|v| amp * v + shift).collect();
        corpus.push(TimeSeries::new(format!("s{i:03}"), y, raw.x)?);
    }
    write_corpus(out, &corpus)?;
    println!(
        "synth: wrote {} series of {} points to {}",
        corpus.len(),
        synth.length,
        out.display()
    );
    Ok(())
}

fn draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}
