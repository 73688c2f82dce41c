//! Draw Gaussian and masked-DCT ensembles, store one in the binary container,
//! and read it back.

use gpr::io;
use gpr::{estimate_norm_and_radius, gen_gaussian_ensemble, gen_masked_dct_ensemble, ComplexSignal};

fn main() -> gpr::Result<()> {
    let n = 16;
    let x = ComplexSignal::gaussian_unit(n, 7, 0)?;
    let gauss = gen_gaussian_ensemble(n, 200, &x, 7)?;
    let (x_est, r0) = estimate_norm_and_radius(&gauss);
    println!("gaussian: m = {}, ||x|| = {:.4}, estimate = {x_est:.4}, R0 = {r0:.4}", gauss.m(), x.norm());

    let x_real = ComplexSignal::from_real(&(0..n).map(|k| (k as f64).sin()).collect::<Vec<_>>())?;
    let dct = gen_masked_dct_ensemble(n, 8, &x_real, 7)?;
    println!("masked DCT: {} masks, m = {}", dct.num_masks().unwrap(), dct.m());

    let dir = std::env::temp_dir().join("gpr-example");
    std::fs::create_dir_all(&dir).map_err(|e| gpr::Error::io(&dir, e))?;
    let path = dir.join("ensemble.bin");
    io::write_ensemble(&path, &gauss, Some(&x))?;
    let (back, x_back) = io::read_ensemble(&path)?;
    println!(
        "round trip: identical rows {}, identical magnitudes {}, target stored {}",
        back.rows() == gauss.rows(),
        back.magnitudes() == gauss.magnitudes(),
        x_back.is_some()
    );
    Ok(())
}
