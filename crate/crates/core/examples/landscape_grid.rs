//! Objective values on a 2D grid for `x = (1, 0)`, exported as CSV plus a
//! JSON metadata file.

use gpr::harness::grid_critical_points;
use gpr::landscape::{landscape_grid_2d, AxisSpec, GridMode};
use gpr::MeasurementModel;

fn main() -> gpr::Result<()> {
    let axis = AxisSpec::new(-2.0, 2.0, 81)?;
    let grid = landscape_grid_2d(GridMode::PopulationRealGaussian, &[1.0, 0.0], axis, axis, 0)?;
    let (minima, saddles) = grid_critical_points(&grid);
    let at = |(i, j): (usize, usize)| (axis.point(j), axis.point(i));
    println!("minima:  {:?}", minima.into_iter().map(at).collect::<Vec<_>>());
    println!("saddles: {:?}", saddles.into_iter().map(at).collect::<Vec<_>>());

    let empirical = GridMode::Empirical { model: MeasurementModel::GaussianComplex, samples: 200 };
    let emp = landscape_grid_2d(empirical, &[1.0, 0.0], axis, axis, 4)?;
    let path = std::env::temp_dir().join("gpr-landscape.csv");
    emp.write(&path)?;
    println!("empirical grid written to {} (and .json)", path.display());
    Ok(())
}
