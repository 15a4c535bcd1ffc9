//! End-to-end verification: eigen-residual sweeps, duality sweeps on the
//! compact duals, regular-value certification, an independent mean-curvature
//! oracle for minimality of the zero fibers, and the explicit chart of the
//! SL(3,R)/SO(3) example fiber.

use crate::catalog::{dual_expectations, EigenSpec};
use crate::error::{Error, Result};
use crate::fiber::{
    combine, is_regular, newton_correct, normal_frame, zero_test, FiberPoint, NEWTON_COND_LIMIT,
};
use crate::matrix::{mat_exp, vector_to_strings, Complex64, ComplexMatrix, ZERO};
use crate::operators::{eval, first_derivative, kappa, tau, QuadTraceFn};
use crate::spaces::{
    build_descriptor, random_point_with, Family, GroupPoint, SpaceId, SymmetricSpaceDescriptor,
};
use serde::{Deserialize, Serialize};

/// Points with |phi| below this are excluded from the lambda / mu fits.
pub const FIT_GUARD: f64 = 1e-6;

/// Default sampling scale, bounding the conditioning on the non-compact groups.
pub const SAMPLE_SCALE: f64 = 0.5;

fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ ((index as u64).wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Fit and residual data of one sweep over random group points.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub space: SpaceId,
    pub points: usize,
    pub used_points: usize,
    pub fitted_lambda: f64,
    pub fitted_mu: f64,
    /// Candidate closest to the fitted lambda.
    pub lambda_resolved: f64,
    /// Largest deviation of a per-point lambda ratio from the median;
    /// certifies that the fit is a single constant across points.
    pub lambda_spread: f64,
    pub max_ratio_imag: f64,
    /// max |tau phi - lambda phi| / (1 + |lambda phi|) over all points.
    pub max_tau_residual: f64,
    /// max |kappa(phi,phi) - mu phi^2| / (1 + |mu phi^2|) over all points.
    pub max_kappa_residual: f64,
}

fn sweep_core(
    f: &QuadTraceFn,
    d: &SymmetricSpaceDescriptor,
    lambda_candidates: &[f64],
    expected_mu: f64,
    num_points: usize,
    seed: u64,
) -> Result<SweepOutcome> {
    if num_points == 0 {
        return Err(Error::InvalidParameter(
            "sweep needs at least one point".into(),
        ));
    }
    let basis: Vec<ComplexMatrix> = d.full_basis().cloned().collect();
    let mut samples = Vec::with_capacity(num_points);
    for i in 0..num_points {
        let x = random_point_with(d, point_seed(seed, i), SAMPLE_SCALE)?.matrix;
        let phi = eval(f, &x)?;
        let t = tau(f, &basis, &x)?;
        let k = kappa(f, f, &basis, &x)?;
        samples.push((phi, t, k));
    }
    let mut lam_ratios: Vec<f64> = Vec::new();
    let mut mu_ratios: Vec<f64> = Vec::new();
    let mut max_imag = 0.0_f64;
    for (phi, t, k) in &samples {
        if phi.norm() > FIT_GUARD {
            let lr = t / phi;
            let mr = k / (phi * phi);
            lam_ratios.push(lr.re);
            mu_ratios.push(mr.re);
            max_imag = max_imag.max(lr.im.abs()).max(mr.im.abs());
        }
    }
    if lam_ratios.is_empty() {
        return Err(Error::DegenerateSweep(format!(
            "all {num_points} points landed near the zero set; resample with a new seed"
        )));
    }
    let used = lam_ratios.len();
    let fitted_lambda = median(&mut lam_ratios.clone());
    let fitted_mu = median(&mut mu_ratios.clone());
    let lambda_spread = lam_ratios
        .iter()
        .map(|r| (r - fitted_lambda).abs())
        .fold(0.0, f64::max);
    let lambda_resolved = *lambda_candidates
        .iter()
        .min_by(|a, b| {
            (*a - fitted_lambda)
                .abs()
                .partial_cmp(&(*b - fitted_lambda).abs())
                .unwrap()
        })
        .expect("at least one candidate");
    let mut max_tau_residual = 0.0_f64;
    let mut max_kappa_residual = 0.0_f64;
    for (phi, t, k) in &samples {
        let lphi = phi * Complex64::new(lambda_resolved, 0.0);
        let rt = (t - lphi).norm() / (1.0 + lphi.norm());
        let mphi2 = phi * phi * Complex64::new(expected_mu, 0.0);
        let rk = (k - mphi2).norm() / (1.0 + mphi2.norm());
        max_tau_residual = max_tau_residual.max(rt);
        max_kappa_residual = max_kappa_residual.max(rk);
    }
    Ok(SweepOutcome {
        space: d.id,
        points: num_points,
        used_points: used,
        fitted_lambda,
        fitted_mu,
        lambda_resolved,
        lambda_spread,
        max_ratio_imag: max_imag,
        max_tau_residual,
        max_kappa_residual,
    })
}

/// Verify the eigen identities at random points of the non-compact group.
pub fn eigen_sweep(spec: &EigenSpec, num_points: usize, seed: u64) -> Result<SweepOutcome> {
    let d = build_descriptor(spec.space)?;
    sweep_core(
        &spec.f,
        &d,
        &spec.lambda_candidates,
        spec.expected_mu,
        num_points,
        seed,
    )
}

/// Evaluate the same function on the compact dual (basis k and i p) and fit
/// the dual spectrum, expected to be the negated one.
pub fn duality_sweep(spec: &EigenSpec, num_points: usize, seed: u64) -> Result<SweepOutcome> {
    let dual = dual_expectations(spec);
    let d = build_descriptor(dual.space)?;
    sweep_core(
        &spec.f,
        &d,
        &dual.lambda_candidates,
        dual.mu,
        num_points,
        seed,
    )
}

/// Summary of the regularity certification of a set of fiber samples.
#[derive(Debug, Clone, Serialize)]
pub struct RegularValueReport {
    pub total: usize,
    pub regular: usize,
    pub min_margin: f64,
    /// Smallest margin / ||M|| ratio over the samples.
    pub min_margin_ratio: f64,
    pub failures: Vec<usize>,
}

pub fn regular_value_report(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    samples: &[FiberPoint],
    tol: f64,
) -> Result<RegularValueReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter(
            "regular-value report needs samples".into(),
        ));
    }
    let mut regular = 0;
    let mut min_margin = f64::INFINITY;
    let mut min_ratio = f64::INFINITY;
    let mut failures = Vec::new();
    for (i, fp) in samples.iter().enumerate() {
        let reg = is_regular(spec, d, &fp.point.matrix, tol)?;
        if reg.regular {
            regular += 1;
        } else {
            failures.push(i);
        }
        min_margin = min_margin.min(reg.margin);
        if reg.criterion_norm > 0.0 {
            min_ratio = min_ratio.min(reg.margin / reg.criterion_norm);
        } else {
            min_ratio = 0.0;
        }
    }
    Ok(RegularValueReport {
        total: samples.len(),
        regular,
        min_margin,
        min_margin_ratio: min_ratio,
        failures,
    })
}

// ---------------------------------------------------------------------------
// Mean curvature oracle
// ---------------------------------------------------------------------------

/// Orthonormal basis of the tangent space {X in p : dphi(X) = 0} as
/// coefficient vectors, completing (q1, q2) to a frame by Gram-Schmidt over
/// the standard directions.
fn tangent_basis(frame_q1: &[f64], frame_q2: &[f64]) -> Vec<Vec<f64>> {
    let dim = frame_q1.len();
    let mut collected: Vec<Vec<f64>> = vec![frame_q1.to_vec(), frame_q2.to_vec()];
    let mut tangent = Vec::new();
    for i in 0..dim {
        if tangent.len() + 2 == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        for u in &collected {
            let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= dot * ui;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            collected.push(v.clone());
            tangent.push(v);
        }
    }
    tangent
}

/// Solve for nu in the normal plane with phi(x exp(h T + nu1 q1 + nu2 q2)) =
/// level. The Jacobian is the left-translated derivative at the current
/// point, accurate enough for Newton since ||V|| = O(h).
fn solve_normal_offset(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    x: &ComplexMatrix,
    t_dir: &[f64],
    h: f64,
    frame: &crate::fiber::NormalFrame,
    level: Complex64,
) -> Result<[f64; 2]> {
    let (q1, q2) = (&frame.q1, &frame.q2);
    let dim = t_dir.len();
    let mut nu = [0.0_f64; 2];
    for _ in 0..40 {
        let coeffs: Vec<f64> = (0..dim)
            .map(|i| h * t_dir[i] + nu[0] * q1[i] + nu[1] * q2[i])
            .collect();
        let y = x * &mat_exp(&combine(&d.basis_p, &coeffs), 1e-13)?;
        let f = eval(&spec.f, &y)? - level;
        if f.norm() <= 1e-13 {
            return Ok(nu);
        }
        let grads: Vec<Complex64> = d
            .basis_p
            .iter()
            .map(|z| first_derivative(&spec.f, &y, z))
            .collect::<Result<_>>()?;
        let d1: Complex64 = grads
            .iter()
            .zip(q1)
            .map(|(g, q)| g * Complex64::new(*q, 0.0))
            .sum();
        let d2: Complex64 = grads
            .iter()
            .zip(q2)
            .map(|(g, q)| g * Complex64::new(*q, 0.0))
            .sum();
        let det = d1.re * d2.im - d2.re * d1.im;
        let norm = (d1.norm_sqr() + d2.norm_sqr()).sqrt();
        if det.abs() <= norm * norm / NEWTON_COND_LIMIT {
            return Err(Error::NotConverged(
                "normal Jacobian near-singular in curvature solve".into(),
            ));
        }
        let rhs = [-f.re, -f.im];
        nu[0] += (rhs[0] * d2.im - rhs[1] * d2.re) / det;
        nu[1] += (rhs[1] * d1.re - rhs[0] * d1.im) / det;
    }
    Err(Error::NotConverged(
        "curvature Newton did not reach tolerance".into(),
    ))
}

/// Norm of the mean curvature vector of the level set through x, estimated
/// from symmetric-space normal coordinates: for each tangent direction T the
/// level-set curve exp(h T + nu(h)) has covariant acceleration
/// (nu(h) + nu(-h)) / h^2 at h -> 0, and only the normal component enters.
/// For a minimal fiber the estimate decays like O(h^2) down to the Newton
/// tolerance floor.
pub fn mean_curvature_at_level(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    x: &ComplexMatrix,
    h: f64,
    level: Complex64,
) -> Result<f64> {
    if h <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "curvature step must be positive, got {h}"
        )));
    }
    let frame = normal_frame(spec, d, x)?;
    let tangent = tangent_basis(&frame.q1, &frame.q2);
    let mut acc = [0.0_f64; 2];
    for t_dir in &tangent {
        let plus = solve_normal_offset(spec, d, x, t_dir, h, &frame, level)?;
        let minus = solve_normal_offset(spec, d, x, t_dir, -h, &frame, level)?;
        acc[0] += (plus[0] + minus[0]) / (h * h);
        acc[1] += (plus[1] + minus[1]) / (h * h);
    }
    Ok((acc[0] * acc[0] + acc[1] * acc[1]).sqrt())
}

/// Mean curvature of the zero fiber at a certified fiber point.
pub fn mean_curvature_estimate(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    p: &FiberPoint,
    h: f64,
) -> Result<f64> {
    mean_curvature_at_level(spec, d, &p.point.matrix, h, ZERO)
}

/// Find a point on the level set {phi = level}, for the negative-control
/// runs on non-zero levels. Walks outward from `start` along the normal
/// direction and Newton-projects onto the level set.
pub fn find_level_point(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    start: &ComplexMatrix,
    level: Complex64,
) -> Result<GroupPoint> {
    let frame = normal_frame(spec, d, start)?;
    for k in 1..=20 {
        let t = 0.1 * k as f64;
        let coeffs: Vec<f64> = frame.q1.iter().map(|q| t * q).collect();
        let probe = start * &mat_exp(&combine(&d.basis_p, &coeffs), 1e-13)?;
        if let Ok(x) = newton_correct(spec, d, probe, level, 1e-12, 50) {
            return GroupPoint::new(spec.space, x);
        }
    }
    Err(Error::NotConverged(format!(
        "no point found on the level set {level}"
    )))
}

// ---------------------------------------------------------------------------
// The explicit SL(3,R)/SO(3) chart
// ---------------------------------------------------------------------------

/// The chart (u, v, w) -> [[u, 0, 0], [0, u, 0], [v, w, u^-2]] of the
/// a = (1, i, 0) example fiber; defined for u > 0 and exactly unimodular.
pub fn sl3_chart(u: f64, v: f64, w: f64) -> Result<GroupPoint> {
    if u <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "chart needs u > 0, got {u}"
        )));
    }
    let mut m = ComplexMatrix::zeros(3, 3);
    m[(0, 0)] = Complex64::new(u, 0.0);
    m[(1, 1)] = Complex64::new(u, 0.0);
    m[(2, 0)] = Complex64::new(v, 0.0);
    m[(2, 1)] = Complex64::new(w, 0.0);
    m[(2, 2)] = Complex64::new(1.0 / (u * u), 0.0);
    GroupPoint::new(SpaceId::new(Family::SlrSo, 3)?, m)
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Invert the chart on the a = (1, i, 0) fiber: rotate the coset to the
/// unique representative [[u,0,0],[0,u,0],[v,w,u^-2]] and read it off. The
/// rotation is y = (y1^t, y2^t, y1 x y2) built from the normalized first two
/// rows, so the result is invariant under right SO(3) translation.
pub fn sl3_canonical(x: &GroupPoint) -> Result<(f64, f64, f64)> {
    if x.space.family != Family::SlrSo || x.space.n != 3 {
        return Err(Error::InvalidParameter(format!(
            "chart inversion is defined on slr-so:3, got {}",
            x.space
        )));
    }
    let spec = crate::catalog::example_spec(Family::SlrSo)?;
    let phi = zero_test(&spec, &x.matrix)?.norm();
    if phi > 1e-8 {
        return Err(Error::OffFiber { phi_abs: phi });
    }
    let m = &x.matrix;
    let row = |i: usize| -> [f64; 3] { [m[(i, 0)].re, m[(i, 1)].re, m[(i, 2)].re] };
    let r1 = row(0);
    let r2 = row(1);
    let u = (r1[0] * r1[0] + r1[1] * r1[1] + r1[2] * r1[2]).sqrt();
    if u == 0.0 {
        return Err(Error::InvalidParameter("first row vanishes".into()));
    }
    let y1 = [r1[0] / u, r1[1] / u, r1[2] / u];
    let y2 = [r2[0] / u, r2[1] / u, r2[2] / u];
    let y3 = cross3(&y1, &y2);
    let mut y = ComplexMatrix::zeros(3, 3);
    for i in 0..3 {
        y[(i, 0)] = Complex64::new(y1[i], 0.0);
        y[(i, 1)] = Complex64::new(y2[i], 0.0);
        y[(i, 2)] = Complex64::new(y3[i], 0.0);
    }
    let canon = m * &y;
    let (uu, v, w) = (canon[(0, 0)].re, canon[(2, 0)].re, canon[(2, 1)].re);
    // confirm the representative really has the canonical shape
    let mut expect = ComplexMatrix::zeros(3, 3);
    expect[(0, 0)] = Complex64::new(uu, 0.0);
    expect[(1, 1)] = Complex64::new(uu, 0.0);
    expect[(2, 0)] = Complex64::new(v, 0.0);
    expect[(2, 1)] = Complex64::new(w, 0.0);
    expect[(2, 2)] = Complex64::new(1.0 / (uu * uu), 0.0);
    let defect = (&canon - &expect).frobenius_norm();
    if defect > 1e-8 * (1.0 + canon.frobenius_norm()) {
        return Err(Error::NotConverged(format!(
            "rotated representative misses the canonical form by {defect:.3e}"
        )));
    }
    Ok((uu, v, w))
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportParams {
    pub a: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
}

/// JSON-stable verification record assembled by the front ends.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub space: String,
    pub n: usize,
    pub params: ReportParams,
    pub points: usize,
    pub max_tau_residual: f64,
    pub max_kappa_residual: f64,
    pub fitted_lambda: f64,
    pub fitted_mu: f64,
    pub lambda_candidates: Vec<f64>,
    pub lambda_resolved: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_space: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_mu: Option<f64>,
    pub regular_count: usize,
    pub mean_curvature: Vec<f64>,
    pub seed: u64,
}

pub fn verification_report(
    spec: &EigenSpec,
    eigen: &SweepOutcome,
    dual: Option<&SweepOutcome>,
    regular_count: usize,
    mean_curvature: Vec<f64>,
    seed: u64,
) -> VerificationReport {
    VerificationReport {
        space: spec.space.to_string(),
        n: spec.space.n,
        params: ReportParams {
            a: vector_to_strings(&spec.a),
            b: spec.b.as_ref().map(vector_to_strings),
        },
        points: eigen.points,
        max_tau_residual: eigen.max_tau_residual,
        max_kappa_residual: eigen.max_kappa_residual,
        fitted_lambda: eigen.fitted_lambda,
        fitted_mu: eigen.fitted_mu,
        lambda_candidates: spec.lambda_candidates.clone(),
        lambda_resolved: eigen.lambda_resolved,
        dual_space: dual.map(|d| d.space.to_string()),
        dual_lambda: dual.map(|d| d.fitted_lambda),
        dual_mu: dual.map(|d| d.fitted_mu),
        regular_count,
        mean_curvature,
        seed,
    }
}
