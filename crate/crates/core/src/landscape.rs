//! Geometry of the objective: region membership, curvature and gradient
//! certificates, coverage scans, and 2D landscape grids.
//!
//! Region membership is decided from population quantities and so needs the
//! target `x`. This module is an analysis tool, not part of the solver.
//!
//! | region | condition |
//! |--------|-----------|
//! | `R1`   | `E`-form along `x e^{iφ(z)}` `≤ −‖x‖²‖z‖²/100 − ‖x‖⁴/50` |
//! | `R2z`  | `Re(z^* ∇E f) ≥ ‖z‖⁴/100 + ‖x‖²‖z‖²/500` |
//! | `R2h`  | `Re(h^* ∇E f) ≥ ‖x‖²‖z‖‖h‖/250`, `11‖x‖/20 ≤ ‖z‖ ≤ ‖x‖`, `dist ≥ ‖x‖/3` |
//! | `R3`   | `dist(z, X) ≤ ‖x‖/√7` |

use std::io::Write;
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::measurement::{self, MeasurementEnsemble, MeasurementModel};
use crate::objective;
use crate::rng::{self, Domain};
use crate::signal::{align_phase, random_unit, uniform_ball, ComplexSignal};

/// Region flags at a point together with the certificate quantities.
///
/// The quantities are population values from [`classify_region`] and
/// finite-sample values from [`classify_region_empirical`]; flags are always
/// population-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCertificate {
    pub in_r1: bool,
    pub in_r2z: bool,
    pub in_r2h: bool,
    pub in_r3: bool,
    pub z_norm: f64,
    pub dist: f64,
    /// Quadratic form along `x e^{iφ(z)}` divided by `‖x‖²`.
    pub curvature_along_target: f64,
    /// `Re(h(z)^* ∇_z f)`.
    pub radial_grad: f64,
    /// `Re(z^* ∇_z f)`.
    pub z_grad: f64,
    /// Quadratic form along the unit direction `g(z)`.
    pub rsc_form: f64,
}

impl RegionCertificate {
    pub fn covered(&self) -> bool {
        self.in_r1 || self.in_r2z || self.in_r2h || self.in_r3
    }
}

/// Unit direction `g(z) = h(z)/‖h(z)‖`. On the target circle, where `h = 0`,
/// the first coordinate direction projected onto `{h : Im(h^* z) = 0}` is used
/// (the imaginary first coordinate if that projection vanishes).
pub fn rsc_direction(z: &ComplexSignal, h: &ComplexSignal, dist: f64, x_norm: f64) -> ComplexSignal {
    if dist > 1e-14 * x_norm {
        return h.scaled(1.0 / dist);
    }
    let n = z.len();
    let zn = z.norm();
    let normal = DVector::from_fn(2 * n, |i, _| if i < n { -z[i].im } else { z[i - n].re }) / zn;
    for idx in [0, n] {
        let mut e = DVector::<f64>::zeros(2 * n);
        e[idx] = 1.0;
        let proj = &e - &normal * normal.dot(&e);
        let norm = proj.norm();
        if norm > 1e-8 {
            let v = proj / norm;
            return ComplexSignal::new(crate::signal::complexify(&v)).expect("finite direction");
        }
    }
    unreachable!("two orthogonal coordinate directions cannot both be normal")
}

struct Geometry {
    target_dir: ComplexSignal,
    h: ComplexSignal,
    g: ComplexSignal,
    dist: f64,
    x_norm: f64,
    z_norm: f64,
}

fn geometry(x: &ComplexSignal, z: &ComplexSignal) -> Result<Geometry> {
    let al = align_phase(z, x)?;
    let x_norm = x.norm();
    let g = rsc_direction(z, &al.h, al.dist, x_norm);
    Ok(Geometry { target_dir: x.rotated(al.phi), h: al.h, g, dist: al.dist, x_norm, z_norm: z.norm() })
}

fn flags(x: &ComplexSignal, z: &ComplexSignal, geo: &Geometry) -> Result<(bool, bool, bool, bool)> {
    let (xn2, zn) = (geo.x_norm * geo.x_norm, geo.z_norm);
    let zn2 = zn * zn;
    let pgrad = objective::population_grad(x, z)?;
    let pform = objective::population_hessian_form(x, z, &geo.target_dir)?;
    let in_r1 = pform <= -xn2 * zn2 / 100.0 - xn2 * xn2 / 50.0;
    let in_r3 = geo.dist <= geo.x_norm / 7f64.sqrt();
    let zg = z.as_vector().dotc(&pgrad).re;
    let in_r2z = zg >= zn2 * zn2 / 100.0 + xn2 * zn2 / 500.0;
    let hg = geo.h.as_vector().dotc(&pgrad).re;
    let in_r2h = hg >= xn2 * zn * geo.dist / 250.0
        && zn >= 11.0 * geo.x_norm / 20.0
        && zn <= geo.x_norm
        && geo.dist >= geo.x_norm / 3.0;
    Ok((in_r1, in_r2z, in_r2h, in_r3))
}

/// Region flags and population certificate values at `z`.
pub fn classify_region(x: &ComplexSignal, z: &ComplexSignal) -> Result<RegionCertificate> {
    let geo = geometry(x, z)?;
    let (in_r1, in_r2z, in_r2h, in_r3) = flags(x, z, &geo)?;
    let pgrad = objective::population_grad(x, z)?;
    Ok(RegionCertificate {
        in_r1,
        in_r2z,
        in_r2h,
        in_r3,
        z_norm: geo.z_norm,
        dist: geo.dist,
        curvature_along_target: objective::population_hessian_form(x, z, &geo.target_dir)?
            / (geo.x_norm * geo.x_norm),
        radial_grad: geo.h.as_vector().dotc(&pgrad).re,
        z_grad: z.as_vector().dotc(&pgrad).re,
        rsc_form: objective::population_hessian_form(x, z, &geo.g)?,
    })
}

/// Population region flags with the certificate values computed from `ensemble`.
pub fn classify_region_empirical(
    ensemble: &MeasurementEnsemble,
    x: &ComplexSignal,
    z: &ComplexSignal,
) -> Result<RegionCertificate> {
    let geo = geometry(x, z)?;
    let (in_r1, in_r2z, in_r2h, in_r3) = flags(x, z, &geo)?;
    let grad = objective::wirtinger_grad(ensemble, z)?;
    Ok(RegionCertificate {
        in_r1,
        in_r2z,
        in_r2h,
        in_r3,
        z_norm: geo.z_norm,
        dist: geo.dist,
        curvature_along_target: objective::hessian_quadratic_form(ensemble, z, &geo.target_dir)?
            / (geo.x_norm * geo.x_norm),
        radial_grad: geo.h.as_vector().dotc(&grad).re,
        z_grad: z.as_vector().dotc(&grad).re,
        rsc_form: objective::hessian_quadratic_form(ensemble, z, &geo.g)?,
    })
}

/// Finite-sample certificate quantities at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalCertificate {
    /// Quadratic form along `x e^{iφ(z)}` divided by `‖x‖²`.
    pub neg_curv: f64,
    /// Stacked gradient norm `√2‖∇_z f‖`.
    pub grad_norm: f64,
    /// `Re(z^* ∇_z f)/‖z‖`.
    pub z_grad_ratio: f64,
    /// `Re(h^* ∇_z f)`.
    pub radial_grad: f64,
    /// Quadratic form along `g(z)`.
    pub rsc: f64,
}

pub fn empirical_certificates(
    ensemble: &MeasurementEnsemble,
    x: &ComplexSignal,
    z: &ComplexSignal,
) -> Result<EmpiricalCertificate> {
    let geo = geometry(x, z)?;
    let grad = objective::wirtinger_grad(ensemble, z)?;
    let z_grad = z.as_vector().dotc(&grad).re;
    Ok(EmpiricalCertificate {
        neg_curv: objective::hessian_quadratic_form(ensemble, z, &geo.target_dir)? / (geo.x_norm * geo.x_norm),
        grad_norm: objective::stacked_norm(&grad),
        z_grad_ratio: if geo.z_norm > 0.0 { z_grad / geo.z_norm } else { 0.0 },
        radial_grad: geo.h.as_vector().dotc(&grad).re,
        rsc: objective::hessian_quadratic_form(ensemble, z, &geo.g)?,
    })
}

/// Which region bound a sample is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    R1,
    R2z,
    R2h,
    R3,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::R1, Region::R2z, Region::R2h, Region::R3];

    pub fn contains(self, c: &RegionCertificate) -> bool {
        match self {
            Region::R1 => c.in_r1,
            Region::R2z => c.in_r2z,
            Region::R2h => c.in_r2h,
            Region::R3 => c.in_r3,
        }
    }

    /// Whether a point is drawn as a certificate sample for this region.
    /// The gradient bounds are only claimed on the complement of R1 ∪ R3,
    /// so R2z and R2h samples exclude points already certified elsewhere.
    pub fn samples(self, c: &RegionCertificate) -> bool {
        match self {
            Region::R1 | Region::R3 => self.contains(c),
            Region::R2z | Region::R2h => self.contains(c) && !c.in_r1 && !c.in_r3,
        }
    }

    /// Whether the finite-sample bound for this region holds:
    /// `neg_curv ≤ −‖x‖²/100`, `Re(z^*∇f)/‖z‖ ≥ ‖x‖²‖z‖/1000`,
    /// `Re(h^*∇f) ≥ ‖x‖²‖z‖‖h‖/1000`, or `rsc ≥ ‖x‖²/4`.
    pub fn bound_holds(self, cert: &EmpiricalCertificate, x_norm: f64, z_norm: f64, dist: f64) -> bool {
        let xn2 = x_norm * x_norm;
        match self {
            Region::R1 => cert.neg_curv <= -xn2 / 100.0,
            Region::R2z => cert.z_grad_ratio >= xn2 * z_norm / 1000.0,
            Region::R2h => cert.radial_grad >= xn2 * z_norm * dist / 1000.0,
            Region::R3 => cert.rsc >= xn2 / 4.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Region::R1 => "r1",
            Region::R2z => "r2z",
            Region::R2h => "r2h",
            Region::R3 => "r3",
        }
    }
}

/// Components of the sampling mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    /// Uniform in the ball of radius `2‖x‖`.
    Ball,
    /// Radius uniform in `[0, 2‖x‖]`, angle to `x` uniform in `[0, π/2]`.
    Cone,
    /// `x e^{iψ}` plus a perturbation of log-uniform size in `[1e-6, 1]·‖x‖`.
    NearTarget,
    /// A point of `S` plus a perturbation of log-uniform size in `[1e-6, 1/2]·‖x‖`.
    NearSaddle,
}

impl SampleKind {
    const ALL: [SampleKind; 4] = [SampleKind::Ball, SampleKind::Cone, SampleKind::NearTarget, SampleKind::NearSaddle];
}

fn unit_orthogonal_to<R: Rng + ?Sized>(rng: &mut R, x: &ComplexSignal) -> ComplexSignal {
    let xu = x.scaled(1.0 / x.norm());
    loop {
        let w = random_unit(rng, x.len());
        let proj = xu.inner(&w);
        let v = w.as_vector() - xu.as_vector() * proj;
        let norm = v.norm();
        if norm > 1e-8 {
            return ComplexSignal::new(v / Complex64::new(norm, 0.0)).expect("finite");
        }
    }
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Sample `index` of the scan mixture; the component cycles with the index.
pub fn mixture_sample(x: &ComplexSignal, seed: u64, index: u64) -> (SampleKind, ComplexSignal) {
    let mut rng = rng::stream(seed, Domain::Sample, index);
    let kind = SampleKind::ALL[(index % 4) as usize];
    let n = x.len();
    let xn = x.norm();
    let z = match kind {
        SampleKind::Ball => uniform_ball(&mut rng, n, 2.0 * xn),
        SampleKind::Cone => {
            let r = 2.0 * xn * rng.gen::<f64>();
            let theta = std::f64::consts::FRAC_PI_2 * rng.gen::<f64>();
            let psi = std::f64::consts::TAU * rng.gen::<f64>();
            let w = unit_orthogonal_to(&mut rng, x);
            let along = x.rotated(psi).scaled(r * theta.cos() / xn);
            ComplexSignal::new(along.as_vector() + w.as_vector() * Complex64::new(r * theta.sin(), 0.0))
                .expect("finite")
        }
        SampleKind::NearTarget => {
            let psi = std::f64::consts::TAU * rng.gen::<f64>();
            let size = log_uniform(&mut rng, 1e-6, 1.0) * xn;
            let p = random_unit(&mut rng, n);
            ComplexSignal::new(x.rotated(psi).as_vector() + p.as_vector() * Complex64::new(size, 0.0)).expect("finite")
        }
        SampleKind::NearSaddle => {
            let psi = std::f64::consts::TAU * rng.gen::<f64>();
            let w = unit_orthogonal_to(&mut rng, x);
            let s = w.rotated(psi).scaled(xn / 2f64.sqrt());
            let size = log_uniform(&mut rng, 1e-6, 0.5) * xn;
            let p = random_unit(&mut rng, n);
            ComplexSignal::new(s.as_vector() + p.as_vector() * Complex64::new(size, 0.0)).expect("finite")
        }
    };
    (kind, z)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub num_samples: usize,
    pub uncovered: usize,
    pub in_r1: usize,
    pub in_r2z: usize,
    pub in_r2h: usize,
    pub in_r3: usize,
    /// Up to ten uncovered samples as `(index, ‖z‖, dist)`.
    pub examples: Vec<(u64, f64, f64)>,
}

/// Classify `num_samples` mixture samples and count those in no region.
pub fn coverage_scan(x: &ComplexSignal, num_samples: usize, seed: u64) -> Result<CoverageReport> {
    if num_samples == 0 {
        return Err(Error::InvalidArgument("coverage scan needs at least one sample".into()));
    }
    if x.norm_sq() == 0.0 {
        return Err(Error::InvalidArgument("target signal must be nonzero".into()));
    }
    let certs: Vec<RegionCertificate> = (0..num_samples as u64)
        .into_par_iter()
        .map(|i| classify_region(x, &mixture_sample(x, seed, i).1))
        .collect::<Result<_>>()?;
    let count = |f: fn(&RegionCertificate) -> bool| certs.iter().filter(|c| f(c)).count();
    let examples = certs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.covered())
        .take(10)
        .map(|(i, c)| (i as u64, c.z_norm, c.dist))
        .collect();
    Ok(CoverageReport {
        num_samples,
        uncovered: count(|c| !c.covered()),
        in_r1: count(|c| c.in_r1),
        in_r2z: count(|c| c.in_r2z),
        in_r2h: count(|c| c.in_r2h),
        in_r3: count(|c| c.in_r3),
        examples,
    })
}

/// One sampled point of a certificate scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedSample {
    pub index: u64,
    pub region: Region,
    pub passed: bool,
    #[serde(flatten)]
    pub cert: RegionCertificate,
    pub neg_curv: f64,
    pub grad_norm: f64,
    pub z_grad_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionTally {
    pub region: Region,
    pub samples: usize,
    pub passed: usize,
    pub pass_rate: f64,
}

/// Draw mixture samples until each region has `per_region` members (or the
/// draw budget runs out) and test the finite-sample bound at each.
pub fn certify_regions(
    ensemble: &MeasurementEnsemble,
    x: &ComplexSignal,
    per_region: usize,
    seed: u64,
) -> Result<(Vec<RegionTally>, Vec<CertifiedSample>)> {
    check_dims("certify target", ensemble.n(), x.len())?;
    let x_norm = x.norm();
    let budget = (per_region as u64).saturating_mul(2000).max(10_000);
    let batch = 256u64;
    let mut samples: Vec<CertifiedSample> = Vec::new();
    let mut counts = [0usize; 4];
    let mut next = 0u64;
    while counts.iter().any(|c| *c < per_region) && next < budget {
        let end = (next + batch).min(budget);
        let classified: Vec<(u64, ComplexSignal, RegionCertificate)> = (next..end)
            .into_par_iter()
            .map(|i| {
                let z = mixture_sample(x, seed, i).1;
                classify_region(x, &z).map(|c| (i, z, c))
            })
            .collect::<Result<_>>()?;
        let mut wanted = Vec::new();
        for (i, z, c) in classified {
            for (r_idx, region) in Region::ALL.iter().enumerate() {
                if region.samples(&c) && counts[r_idx] < per_region {
                    counts[r_idx] += 1;
                    wanted.push((i, z.clone(), *region));
                }
            }
        }
        let evaluated: Vec<CertifiedSample> = wanted
            .into_par_iter()
            .map(|(i, z, region)| {
                let cert = classify_region_empirical(ensemble, x, &z)?;
                let emp = empirical_certificates(ensemble, x, &z)?;
                Ok(CertifiedSample {
                    index: i,
                    region,
                    passed: region.bound_holds(&emp, x_norm, cert.z_norm, cert.dist),
                    cert,
                    neg_curv: emp.neg_curv,
                    grad_norm: emp.grad_norm,
                    z_grad_ratio: emp.z_grad_ratio,
                })
            })
            .collect::<Result<_>>()?;
        samples.extend(evaluated);
        next = end;
    }
    let tallies = Region::ALL
        .iter()
        .map(|r| {
            let of: Vec<&CertifiedSample> = samples.iter().filter(|s| s.region == *r).collect();
            let passed = of.iter().filter(|s| s.passed).count();
            RegionTally {
                region: *r,
                samples: of.len(),
                passed,
                pass_rate: if of.is_empty() { 0.0 } else { passed as f64 / of.len() as f64 },
            }
        })
        .collect();
    Ok((tallies, samples))
}

// The csv writer cannot serialize flattened structs, so rows are spelled out.
#[derive(Serialize)]
struct CertificateRow {
    index: u64,
    region: Region,
    passed: bool,
    in_r1: bool,
    in_r2z: bool,
    in_r2h: bool,
    in_r3: bool,
    z_norm: f64,
    dist: f64,
    curvature_along_target: f64,
    radial_grad: f64,
    z_grad: f64,
    rsc_form: f64,
    neg_curv: f64,
    grad_norm: f64,
    z_grad_ratio: f64,
}

pub fn write_certificates_csv(path: impl AsRef<Path>, samples: &[CertifiedSample]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    for s in samples {
        let c = &s.cert;
        let row = CertificateRow {
            index: s.index,
            region: s.region,
            passed: s.passed,
            in_r1: c.in_r1,
            in_r2z: c.in_r2z,
            in_r2h: c.in_r2h,
            in_r3: c.in_r3,
            z_norm: c.z_norm,
            dist: c.dist,
            curvature_along_target: c.curvature_along_target,
            radial_grad: c.radial_grad,
            z_grad: c.z_grad,
            rsc_form: c.rsc_form,
            neg_curv: s.neg_curv,
            grad_norm: s.grad_norm,
            z_grad_ratio: s.z_grad_ratio,
        };
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format(format!("{}: {other:?}", path.display())),
    }
}

/// `(min, max, steps)` for one axis; points are evenly spaced inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps < 2 || !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidArgument(format!("bad axis ({min}, {max}, {steps})")));
        }
        Ok(AxisSpec { min, max, steps })
    }

    pub fn point(&self, i: usize) -> f64 {
        self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum GridMode {
    /// Closed-form expectation under complex Gaussian rows.
    PopulationComplex,
    /// Closed-form expectation under real Gaussian rows.
    PopulationRealGaussian,
    /// The finite-sample objective of a freshly drawn ensemble; for the masked
    /// DCT model `samples` is the number of masks, otherwise the number of rows.
    Empirical { model: MeasurementModel, samples: usize },
}

/// Objective values on a 2D grid over real `z = (u, v)`; `values[i][j]` is at
/// `u = x_axis.point(j)`, `v = y_axis.point(i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandscapeGrid {
    pub mode: GridMode,
    pub x_target: [f64; 2],
    pub seed: u64,
    pub x_axis: AxisSpec,
    pub y_axis: AxisSpec,
    pub values: Vec<Vec<f64>>,
}

pub fn landscape_grid_2d(
    mode: GridMode,
    x: &[f64],
    x_axis: AxisSpec,
    y_axis: AxisSpec,
    seed: u64,
) -> Result<LandscapeGrid> {
    if x.len() != 2 {
        return Err(Error::Dimension(format!("landscape grids need n = 2, got {}", x.len())));
    }
    let xs = ComplexSignal::from_real(x)?;
    let ensemble = match mode {
        GridMode::Empirical { model: MeasurementModel::MaskedDctReal, samples } => {
            Some(measurement::gen_masked_dct_ensemble(2, samples, &xs, seed)?)
        }
        GridMode::Empirical { model: MeasurementModel::GaussianComplex, samples } => {
            Some(measurement::gen_gaussian_ensemble(2, samples, &xs, seed)?)
        }
        _ => None,
    };
    let values: Vec<Vec<f64>> = (0..y_axis.steps)
        .into_par_iter()
        .map(|i| {
            (0..x_axis.steps)
                .map(|j| {
                    let z = [x_axis.point(j), y_axis.point(i)];
                    match (&mode, &ensemble) {
                        (GridMode::PopulationRealGaussian, _) => objective::population_f_real(x, &z),
                        (GridMode::PopulationComplex, _) => {
                            objective::population_f(&xs, &ComplexSignal::from_real(&z)?)
                        }
                        (_, Some(ens)) => objective::eval_f(ens, &ComplexSignal::from_real(&z)?),
                        _ => unreachable!(),
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(LandscapeGrid { mode, x_target: [x[0], x[1]], seed, x_axis, y_axis, values })
}

impl LandscapeGrid {
    /// Header rows `axis,min,max,steps` for both axes, then one CSV line per
    /// grid row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis,min,max,steps\n");
        out += &format!("u,{},{},{}\n", self.x_axis.min, self.x_axis.max, self.x_axis.steps);
        out += &format!("v,{},{},{}\n", self.y_axis.min, self.y_axis.max, self.y_axis.steps);
        for row in &self.values {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out += &line.join(",");
            out.push('\n');
        }
        out
    }

    pub fn metadata_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mode": self.mode,
            "x": self.x_target,
            "seed": self.seed,
            "u_axis": self.x_axis,
            "v_axis": self.y_axis,
        })
    }

    /// Writes `<path>` (CSV) and `<path>.json` (metadata).
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv().as_bytes()).map_err(|e| Error::io(path, e))?;
        let meta = path.with_extension(match path.extension() {
            Some(ext) => format!("{}.json", ext.to_string_lossy()),
            None => "json".into(),
        });
        let text = serde_json::to_string_pretty(&self.metadata_json()).expect("serializable");
        std::fs::write(&meta, text).map_err(|e| Error::io(&meta, e))
    }

    /// Grid indices `(i, j)` of the smallest value.
    pub fn argmin(&self) -> (usize, usize) {
        let mut best = (0, 0, f64::INFINITY);
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v < best.2 {
                    best = (i, j, *v);
                }
            }
        }
        (best.0, best.1)
    }
}
