//! Zero-fiber machinery: the zero and regularity criteria for quadratic
//! trace functions, the constructive zero points traced from the existence
//! proofs, a generic numeric zero finder, and fiber sampling by tangent
//! stepping with Newton projection back onto the level set.
//!
//! All Newton corrections work in the two-dimensional normal space of the
//! fiber inside p: the span of the coefficient gradients of Re phi and
//! Im phi. The 2x2 systems are solved directly, with steps rejected near
//! critical points where the Jacobian condition number exceeds 1e8.

use crate::catalog::EigenSpec;
use crate::error::{Error, Result};
use crate::matrix::{
    bilinear, hermitian_trace, inverse, mat_exp, matrix_to_strings, numerical_rank, Complex64,
    ComplexMatrix, ComplexVector, ONE,
};
use crate::operators::{eval, first_derivative};
use crate::spaces::{GroupPoint, SymmetricSpaceDescriptor};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::json;

/// A certified fiber point must have |phi| at or below this.
pub const FIBER_PHI_TOL: f64 = 1e-10;

/// Newton steps are rejected when the 2x2 normal Jacobian is worse than this.
pub const NEWTON_COND_LIMIT: f64 = 1e8;

/// Regularity margin threshold, relative to the norm of the criterion matrix.
pub const REGULARITY_REL_TOL: f64 = 1e-6;

/// A certified sample of the zero fiber.
#[derive(Debug, Clone)]
pub struct FiberPoint {
    pub point: GroupPoint,
    pub phi_abs: f64,
    pub regularity_margin: f64,
}

/// The zero criterion: (B x^t b, x^t a) under the complex bilinear form,
/// equal to +-eval(f, x) with the sign fixed by the symmetry class of B.
pub fn zero_test(spec: &EigenSpec, x: &ComplexMatrix) -> Result<Complex64> {
    let m = spec.f.size();
    if x.rows != m || x.cols != m {
        return Err(Error::ShapeMismatch(x.rows, x.cols, m, m));
    }
    let b = spec.b.as_ref().unwrap_or(&spec.a);
    let xtb = x.tmul_vec(b);
    let xta = x.tmul_vec(&spec.a);
    bilinear(&spec.f.b.mul_vec(&xtb), &xta)
}

/// Outcome of the regularity criterion at a fiber point.
#[derive(Debug, Clone, Copy)]
pub struct Regularity {
    pub regular: bool,
    /// max over basis elements Z of |trace(M Z*)| with M = B x^t a b^t x.
    pub margin: f64,
    pub criterion_norm: f64,
}

/// The differential of phi vanishes at x exactly when M = B x^t a b^t x lies
/// in the orthogonal complement of the complexified algebra; the margin is
/// the largest pairing of M with a basis element and certifies regularity
/// when it clears tol * ||M||.
pub fn is_regular(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    x: &ComplexMatrix,
    tol: f64,
) -> Result<Regularity> {
    let b = spec.b.as_ref().unwrap_or(&spec.a);
    let xta = x.tmul_vec(&spec.a);
    let xtb_row = x.tmul_vec(b);
    // M = B (x^t a) (b^t x) = B (x^t a) (x^t b)^t
    let m = spec.f.b.mul_vec(&xta).outer(&xtb_row);
    let m_norm = m.frobenius_norm();
    let mut margin = 0.0_f64;
    for z in d.full_basis() {
        margin = margin.max(hermitian_trace(&m, z)?.norm());
    }
    Ok(Regularity {
        regular: margin > tol * m_norm && m_norm > 0.0,
        margin,
        criterion_norm: m_norm,
    })
}

/// Certify a matrix as a fiber point: membership, |phi| and the regularity
/// margin are measured and stored.
pub fn make_fiber_point(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    x: ComplexMatrix,
) -> Result<FiberPoint> {
    let phi_abs = zero_test(spec, &x)?.norm();
    if phi_abs > FIBER_PHI_TOL {
        return Err(Error::OffFiber { phi_abs });
    }
    let reg = is_regular(spec, d, &x, REGULARITY_REL_TOL)?;
    let point = GroupPoint::new(spec.space, x)?;
    Ok(FiberPoint {
        point,
        phi_abs,
        regularity_margin: reg.margin,
    })
}

// ---------------------------------------------------------------------------
// The symmetric transitivity lemma: s u = v with s symmetric
// ---------------------------------------------------------------------------

/// Real symmetric matrix s with s u = v. Branches: v = 0 gives s = 0,
/// anti-parallel v gives a negative scaled identity, otherwise the
/// Householder-like s = -I + 2 w w^t on normalized vectors, rescaled.
pub fn symmetric_mapping(u: &[f64], v: &[f64]) -> Result<ComplexMatrix> {
    let n = u.len();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: v.len(),
        });
    }
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 {
        return Err(Error::InvalidParameter(
            "symmetric_mapping requires u != 0".into(),
        ));
    }
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut s = ComplexMatrix::zeros(n, n);
    if nv == 0.0 {
        return Ok(s);
    }
    let uh: Vec<f64> = u.iter().map(|x| x / nu).collect();
    let vh: Vec<f64> = v.iter().map(|x| x / nv).collect();
    let dot: f64 = uh.iter().zip(&vh).map(|(a, b)| a * b).sum();
    let ratio = nv / nu;
    let sum_norm: f64 = uh
        .iter()
        .zip(&vh)
        .map(|(a, b)| (a + b) * (a + b))
        .sum::<f64>()
        .sqrt();
    if sum_norm < 1e-12 {
        // u and v anti-parallel
        for i in 0..n {
            s[(i, i)] = Complex64::new(-ratio, 0.0);
        }
        return Ok(s);
    }
    let denom = (2.0 + 2.0 * dot).sqrt();
    let w: Vec<f64> = uh.iter().zip(&vh).map(|(a, b)| (a + b) / denom).collect();
    for i in 0..n {
        for j in 0..n {
            let wij = 2.0 * w[i] * w[j] - if i == j { 1.0 } else { 0.0 };
            s[(i, j)] = Complex64::new(ratio * wij, 0.0);
        }
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// Constructive zeros from the existence proofs
// ---------------------------------------------------------------------------

fn real_parts(v: &ComplexVector) -> (Vec<f64>, Vec<f64>) {
    (
        v.data.iter().map(|z| z.re).collect(),
        v.data.iter().map(|z| z.im).collect(),
    )
}

/// Extend the given real columns to a basis of R^n by greedily adjoining
/// standard basis vectors, testing rank at tolerance 1e-10.
fn greedy_extend(cols: Vec<Vec<f64>>, n: usize) -> Result<ComplexMatrix> {
    let mut out = cols;
    for j in 0..n {
        if out.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let mut trial = out.clone();
        trial.push(e);
        let mut m = ComplexMatrix::zeros(n, trial.len());
        for (c, col) in trial.iter().enumerate() {
            for i in 0..n {
                m[(i, c)] = Complex64::new(col[i], 0.0);
            }
        }
        if numerical_rank(&m, 1e-10)? == trial.len() {
            out = trial;
        }
    }
    if out.len() != n {
        return Err(Error::NotConverged("could not extend to a basis".into()));
    }
    let mut y = ComplexMatrix::zeros(n, n);
    for (c, col) in out.iter().enumerate() {
        for i in 0..n {
            y[(i, c)] = Complex64::new(col[i], 0.0);
        }
    }
    Ok(y)
}

fn constructive_zero_slr(spec: &EigenSpec) -> Result<ComplexMatrix> {
    let n = spec.space.n;
    let (a1, a2) = real_parts(&spec.a);
    let mut y = greedy_extend(vec![a1, a2], n)?;
    let det = crate::matrix::determinant(&y)?;
    // n >= 3 guarantees the last column was adjoined; scaling it by 1/det
    // lands det = +1 (a negative det flips its sign along the way)
    let s = ONE / det;
    for i in 0..n {
        y[(i, n - 1)] *= s;
    }
    Ok(inverse(&y)?.transpose())
}

fn block_from(
    n: usize,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    d: &ComplexMatrix,
) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = a[(i, j)];
            m[(i, n + j)] = b[(i, j)];
            m[(n + i, j)] = c[(i, j)];
            m[(n + i, n + j)] = d[(i, j)];
        }
    }
    m
}

fn constructive_zero_spr(spec: &EigenSpec) -> Result<ComplexMatrix> {
    let n = spec.space.n;
    let scale = spec.a.norm();
    let (b, _) = real_parts(&spec.a);
    let b1_norm = b[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
    if b1_norm > 1e-12 * scale {
        return constructive_zero_spr_main(n, &spec.a);
    }
    // b1 = 0: transform by the symplectic form and solve for J^t a instead;
    // x = J x' then maps (x')^t J^t a = e1 + i e2 back to x^t a
    let j = crate::matrix::basis_generator(crate::matrix::Generator::Symplectic, n)?;
    let a_flip = j.transpose().mul_vec(&spec.a);
    let xp = constructive_zero_spr_main(n, &a_flip)?;
    Ok(&j * &xp)
}

fn constructive_zero_spr_main(n: usize, a: &ComplexVector) -> Result<ComplexMatrix> {
    let scale = a.norm();
    let (b, c) = real_parts(a);
    let (b1, b2) = (b[..n].to_vec(), b[n..].to_vec());
    let (c1, c2) = (c[..n].to_vec(), c[n..].to_vec());
    let eye = ComplexMatrix::identity(n);
    let zero = ComplexMatrix::zeros(n, n);

    let neg_b2: Vec<f64> = b2.iter().map(|x| -x).collect();
    let s1 = symmetric_mapping(&b1, &neg_b2)?;
    let s1_cap = block_from(n, &eye, &zero, &s1, &eye);
    // c3 = s1 c1 + c2
    let c1v = ComplexVector::from_real(&c1);
    let s1c1 = s1.mul_vec(&c1v);
    let c3: Vec<f64> = (0..n).map(|i| s1c1.data[i].re + c2[i]).collect();
    let c3_norm = c3.iter().map(|x| x * x).sum::<f64>().sqrt();

    if c3_norm <= 1e-12 * scale {
        // b1 and c1 are independent here; extend them to a basis
        let v = greedy_extend(vec![b1, c1], n)?;
        let d1 = block_from(n, &inverse(&v)?, &zero, &zero, &v.transpose());
        return Ok((&d1 * &s1_cap).transpose());
    }
    let neg_c1: Vec<f64> = c1.iter().map(|x| -x).collect();
    let s2 = symmetric_mapping(&c3, &neg_c1)?;
    let s2_cap = block_from(n, &eye, &s2, &zero, &eye);
    let b1_norm = b1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let lam = (c3_norm / b1_norm).sqrt();
    let mut d2 = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        d2[(i, i)] = Complex64::new(lam, 0.0);
        d2[(n + i, n + i)] = Complex64::new(1.0 / lam, 0.0);
    }
    Ok((&(&d2 * &s2_cap) * &s1_cap).transpose())
}

/// Zero point from the constructive existence proofs. For SL(n,R) the basis
/// built on (Re a, Im a) with a determinant-normalized free column; for
/// Sp(n,R) the two-branch shear/dilation algorithm; for SO*(2n) and SU*(2n)
/// the identity matrix, which the theorem conditions already place on the
/// fiber.
pub fn constructive_zero(spec: &EigenSpec, d: &SymmetricSpaceDescriptor) -> Result<FiberPoint> {
    if !spec.theorem_conditions_met {
        return Err(Error::InvalidParameter(
            "constructive zero requires the theorem conditions on the parameters".into(),
        ));
    }
    let x = match spec.space.family {
        crate::spaces::Family::SlrSo => constructive_zero_slr(spec)?,
        crate::spaces::Family::SprU => constructive_zero_spr(spec)?,
        crate::spaces::Family::SostarU | crate::spaces::Family::SustarSp => {
            ComplexMatrix::identity(spec.f.size())
        }
        f => {
            return Err(Error::InvalidParameter(format!(
                "constructive zeros exist on the non-compact spaces only, got {}",
                f.token()
            )))
        }
    };
    make_fiber_point(spec, d, x)
}

// ---------------------------------------------------------------------------
// Normal frame and Newton projection
// ---------------------------------------------------------------------------

/// Gradient data of phi at x in p-coordinates: the complex derivative along
/// each basis element of p plus an orthonormal basis (q1, q2) of the real
/// normal plane spanned by the gradients of Re phi and Im phi.
pub struct NormalFrame {
    pub grads: Vec<Complex64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
}

fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn vec_dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn normal_frame(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    x: &ComplexMatrix,
) -> Result<NormalFrame> {
    let grads: Vec<Complex64> = d
        .basis_p
        .iter()
        .map(|z| first_derivative(&spec.f, x, z))
        .collect::<Result<_>>()?;
    let g1: Vec<f64> = grads.iter().map(|g| g.re).collect();
    let g2: Vec<f64> = grads.iter().map(|g| g.im).collect();
    let scale = vec_norm(&g1).max(vec_norm(&g2));
    let n1 = vec_norm(&g1);
    if n1 <= 1e-14 * scale.max(1.0) {
        return Err(Error::NotConverged(
            "degenerate normal frame: grad Re phi ~ 0".into(),
        ));
    }
    let q1: Vec<f64> = g1.iter().map(|x| x / n1).collect();
    let proj = vec_dot(&q1, &g2);
    let mut q2: Vec<f64> = g2.iter().zip(&q1).map(|(g, q)| g - proj * q).collect();
    let n2 = vec_norm(&q2);
    if n2 <= 1e-12 * scale.max(1.0) {
        return Err(Error::NotConverged(
            "degenerate normal frame: gradients colinear".into(),
        ));
    }
    for v in q2.iter_mut() {
        *v /= n2;
    }
    Ok(NormalFrame { grads, q1, q2 })
}

/// Linear combination of basis_p with real coefficients.
pub fn combine(basis: &[ComplexMatrix], coeffs: &[f64]) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(basis[0].rows, basis[0].cols);
    for (c, b) in coeffs.iter().zip(basis) {
        if *c != 0.0 {
            acc = &acc + &b.scale(Complex64::new(*c, 0.0));
        }
    }
    acc
}

fn solve_2x2(j: [[f64; 2]; 2], rhs: [f64; 2]) -> Result<[f64; 2]> {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let norm1 =
        (j[0][0] * j[0][0] + j[0][1] * j[0][1] + j[1][0] * j[1][0] + j[1][1] * j[1][1]).sqrt();
    if det.abs() <= norm1 * norm1 / NEWTON_COND_LIMIT {
        return Err(Error::NotConverged(format!(
            "normal Jacobian near-singular (det {det:.3e} vs norm {norm1:.3e})"
        )));
    }
    Ok([
        (rhs[0] * j[1][1] - rhs[1] * j[0][1]) / det,
        (rhs[1] * j[0][0] - rhs[0] * j[1][0]) / det,
    ])
}

/// Project x back onto the level set {phi = level} by Newton steps in the
/// two normal directions of p. Converges quadratically from nearby starts.
pub fn newton_correct(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    mut x: ComplexMatrix,
    level: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<ComplexMatrix> {
    for _ in 0..max_iter {
        let f = eval(&spec.f, &x)? - level;
        if f.norm() <= tol {
            return Ok(x);
        }
        let frame = normal_frame(spec, d, &x)?;
        let d1: Complex64 = frame
            .grads
            .iter()
            .zip(&frame.q1)
            .map(|(g, q)| g * Complex64::new(*q, 0.0))
            .sum();
        let d2: Complex64 = frame
            .grads
            .iter()
            .zip(&frame.q2)
            .map(|(g, q)| g * Complex64::new(*q, 0.0))
            .sum();
        let t = solve_2x2([[d1.re, d2.re], [d1.im, d2.im]], [-f.re, -f.im])?;
        let coeffs: Vec<f64> = frame
            .q1
            .iter()
            .zip(&frame.q2)
            .map(|(a, b)| t[0] * a + t[1] * b)
            .collect();
        let step = combine(&d.basis_p, &coeffs);
        x = &x * &mat_exp(&step, 1e-13)?;
    }
    let f = eval(&spec.f, &x)? - level;
    if f.norm() <= tol {
        Ok(x)
    } else {
        Err(Error::NotConverged(format!(
            "Newton stalled at |phi - level| = {:.3e}",
            f.norm()
        )))
    }
}

// ---------------------------------------------------------------------------
// Numeric zero finder
// ---------------------------------------------------------------------------

/// Find a fiber point by Riemannian gradient descent on |phi|^2 / 2 with the
/// retraction x exp(-eta G), followed by the 2x2 Newton polish. Fails after
/// `max_iter` descent steps; the failure is informative for parameters where
/// the function is bounded away from zero.
pub fn numeric_zero(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    seed: u64,
) -> Result<FiberPoint> {
    numeric_zero_with(spec, d, seed, 500)
}

pub fn numeric_zero_with(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    seed: u64,
    max_iter: usize,
) -> Result<FiberPoint> {
    let start = crate::spaces::random_point_with(d, seed, 0.3)?;
    let mut x = start.matrix;
    let mut eta = 0.5_f64;
    for _ in 0..max_iter {
        let f = eval(&spec.f, &x)?;
        if f.norm() <= 1e-3 {
            if let Ok(polished) =
                newton_correct(spec, d, x.clone(), Complex64::new(0.0, 0.0), 1e-13, 30)
            {
                if zero_test(spec, &polished)?.norm() <= FIBER_PHI_TOL {
                    return make_fiber_point(spec, d, polished);
                }
            }
        }
        let value = 0.5 * f.norm_sqr();
        // gradient of |phi|^2/2 over p: Re(conj(phi) Z(phi))
        let grads: Vec<f64> = d
            .basis_p
            .iter()
            .map(|z| first_derivative(&spec.f, &x, z).map(|g| (f.conj() * g).re))
            .collect::<Result<_>>()?;
        let gn = vec_norm(&grads);
        if gn <= 1e-14 {
            break;
        }
        let dir: Vec<f64> = grads.iter().map(|g| -g / gn.max(1.0)).collect();
        let mut step = eta;
        let mut accepted = false;
        for _ in 0..30 {
            let coeffs: Vec<f64> = dir.iter().map(|c| c * step).collect();
            let trial = &x * &mat_exp(&combine(&d.basis_p, &coeffs), 1e-13)?;
            if 0.5 * eval(&spec.f, &trial)?.norm_sqr() < value {
                x = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        eta = (step * 2.0).min(1.0);
    }
    Err(Error::NotConverged(format!(
        "gradient descent did not reach the fiber (|phi| = {:.3e})",
        eval(&spec.f, &x)?.norm()
    )))
}

// ---------------------------------------------------------------------------
// Fiber walk
// ---------------------------------------------------------------------------

fn step_rng(seed: u64, step: usize) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed ^ (step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Sample the fiber by repeated unit tangent steps followed by Newton
/// projection. Each emitted point is re-certified. Steps whose projection
/// fails are halved up to ten times before giving up.
pub fn fiber_walk(
    spec: &EigenSpec,
    d: &SymmetricSpaceDescriptor,
    start: &FiberPoint,
    steps: usize,
    step_size: f64,
    seed: u64,
) -> Result<Vec<FiberPoint>> {
    if step_size < 0.0 {
        return Err(Error::InvalidParameter(
            "step size must be nonnegative".into(),
        ));
    }
    let mut out = Vec::with_capacity(steps);
    let mut x = start.point.matrix.clone();
    for k in 0..steps {
        let mut rng = step_rng(seed, k);
        let frame = normal_frame(spec, d, &x)?;
        let mut t: Vec<f64> = (0..d.dim_p())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let p1 = vec_dot(&t, &frame.q1);
        let p2 = vec_dot(&t, &frame.q2);
        for ((ti, q1), q2) in t.iter_mut().zip(&frame.q1).zip(&frame.q2) {
            *ti -= p1 * q1 + p2 * q2;
        }
        let tn = vec_norm(&t);
        if tn <= 1e-12 {
            return Err(Error::NotConverged(format!(
                "no tangent direction at step {k}"
            )));
        }
        for ti in t.iter_mut() {
            *ti /= tn;
        }
        let mut h = step_size;
        let mut next = None;
        for _ in 0..10 {
            let coeffs: Vec<f64> = t.iter().map(|c| c * h).collect();
            let trial = &x * &mat_exp(&combine(&d.basis_p, &coeffs), 1e-13)?;
            match newton_correct(spec, d, trial, Complex64::new(0.0, 0.0), 1e-12, 25) {
                Ok(corrected) => {
                    next = Some(corrected);
                    break;
                }
                Err(_) => h *= 0.5,
            }
        }
        let next = next.ok_or_else(|| {
            Error::NotConverged(format!("Newton projection failed at walk step {k}"))
        })?;
        let fp = make_fiber_point(spec, d, next)?;
        x = fp.point.matrix.clone();
        out.push(fp);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Sample export
// ---------------------------------------------------------------------------

/// CSV header: step index, flattened matrix entries (re, im interleaved,
/// row-major), |phi| and the regularity margin.
pub fn csv_header(size: usize) -> String {
    let mut cols = vec!["step".to_string()];
    for i in 0..size {
        for j in 0..size {
            cols.push(format!("re_{i}_{j}"));
            cols.push(format!("im_{i}_{j}"));
        }
    }
    cols.push("phi_abs".into());
    cols.push("regularity_margin".into());
    cols.join(",")
}

pub fn csv_row(step: usize, fp: &FiberPoint) -> String {
    let mut cols = vec![step.to_string()];
    for z in &fp.point.matrix.data {
        cols.push(format!("{}", z.re));
        cols.push(format!("{}", z.im));
    }
    cols.push(format!("{}", fp.phi_abs));
    cols.push(format!("{}", fp.regularity_margin));
    cols.join(",")
}

pub fn jsonl_record(step: usize, fp: &FiberPoint) -> serde_json::Value {
    json!({
        "step": step,
        "space": fp.point.space.to_string(),
        "matrix": matrix_to_strings(&fp.point.matrix),
        "phi_abs": fp.phi_abs,
        "regularity_margin": fp.regularity_margin,
        "membership_residual": fp.point.membership_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{example_spec, make_slr, random_valid_params};
    use crate::matrix::{Generator, I};
    use crate::operators::BSymmetry;
    use crate::spaces::{build_descriptor, Family};
    use rand::Rng;

    #[test]
    fn zero_test_examples() {
        let spec = example_spec(Family::SlrSo).unwrap();
        let z = zero_test(&spec, &ComplexMatrix::identity(3)).unwrap();
        assert!(z.norm() < 1e-15, "rows e1, e2 are orthonormal");

        let spec = example_spec(Family::SostarU).unwrap();
        assert!(
            zero_test(&spec, &ComplexMatrix::identity(6))
                .unwrap()
                .norm()
                < 1e-15
        );

        let spec = example_spec(Family::SustarSp).unwrap();
        assert!(
            zero_test(&spec, &ComplexMatrix::identity(4))
                .unwrap()
                .norm()
                < 1e-15
        );
    }

    #[test]
    fn zero_test_is_signed_eval() {
        // (B x^t b, x^t a) = +eval for symmetric B, -eval for skew B
        for fam in [
            Family::SlrSo,
            Family::SprU,
            Family::SostarU,
            Family::SustarSp,
        ] {
            let n = fam.min_n();
            let (a, b) = random_valid_params(fam, n, 3).unwrap();
            let spec = crate::catalog::make_spec(fam, n, a, b).unwrap();
            let d = build_descriptor(spec.space).unwrap();
            let sign = match spec.f.symmetry_of_b {
                BSymmetry::Symmetric => 1.0,
                BSymmetry::Skew => -1.0,
            };
            for seed in 0..10 {
                let x = crate::spaces::random_point_with(&d, seed, 0.5)
                    .unwrap()
                    .matrix;
                let zt = zero_test(&spec, &x).unwrap();
                let ev = eval(&spec.f, &x).unwrap() * Complex64::new(sign, 0.0);
                assert!((zt - ev).norm() <= 1e-12 * (1.0 + ev.norm()), "{fam:?}");
            }
        }
    }

    #[test]
    fn symmetric_mapping_branches() {
        // v = 0 -> s = 0
        let s = symmetric_mapping(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(s.frobenius_norm() == 0.0);
        // u = -v -> s = -I
        let s = symmetric_mapping(&[1.0, 0.0], &[-1.0, 0.0]).unwrap();
        assert!((&s + &ComplexMatrix::identity(2)).frobenius_norm() < 1e-12);
        // u = e1, v = e2 -> the exchange matrix
        let s = symmetric_mapping(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        let x12 = crate::matrix::basis_generator(Generator::Sym(1, 2), 2).unwrap();
        assert!((&s - &x12.scale(Complex64::new(2.0_f64.sqrt(), 0.0))).frobenius_norm() < 1e-12);
        assert!(symmetric_mapping(&[0.0, 0.0], &[1.0, 0.0]).is_err());

        // property: s u = v, s = s^t on random input
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(4);
        for _ in 0..40 {
            let n = 2 + (rng.random::<u32>() % 4) as usize;
            let u: Vec<f64> = (0..n)
                .map(|_| rand_distr::Distribution::sample(&StandardNormal, &mut rng))
                .collect();
            let v: Vec<f64> = (0..n)
                .map(|_| rand_distr::Distribution::sample(&StandardNormal, &mut rng))
                .collect();
            let s = symmetric_mapping(&u, &v).unwrap();
            assert!((&s - &s.transpose()).frobenius_norm() < 1e-12);
            let su = s.mul_vec(&ComplexVector::from_real(&u));
            let vv = ComplexVector::from_real(&v);
            assert!(su.sub(&vv).norm() < 1e-12 * (1.0 + vv.norm()));
        }
    }

    #[test]
    fn constructive_zero_slr_follows_proof() {
        // a = (1, i, 0): y has columns e1, e2, e3, so x = I and x^t a = e1 + i e2
        let spec = example_spec(Family::SlrSo).unwrap();
        let d = build_descriptor(spec.space).unwrap();
        let fp = constructive_zero(&spec, &d).unwrap();
        assert!((&fp.point.matrix - &ComplexMatrix::identity(3)).frobenius_norm() < 1e-14);

        // random theorem parameters: x^t a = e1 + i e2 up to solver tolerance
        for seed in 0..6 {
            let (a, _) = random_valid_params(Family::SlrSo, 4, seed).unwrap();
            let spec = make_slr(4, a).unwrap();
            let d = build_descriptor(spec.space).unwrap();
            let fp = constructive_zero(&spec, &d).unwrap();
            let xta = fp.point.matrix.tmul_vec(&spec.a);
            let mut target = ComplexVector::zeros(4);
            target.data[0] = ONE;
            target.data[1] = I;
            assert!(xta.sub(&target).norm() < 1e-10, "x^t a = e1 + i e2");
            assert!(bilinear(&xta, &xta).unwrap().norm() <= 1e-12);
            assert!(fp.phi_abs <= FIBER_PHI_TOL);
        }
    }

    #[test]
    fn constructive_zero_spr_branches() {
        // worked example lands on the identity through the c3 = 0 branch
        let spec = example_spec(Family::SprU).unwrap();
        let d = build_descriptor(spec.space).unwrap();
        let fp = constructive_zero(&spec, &d).unwrap();
        assert!((&fp.point.matrix - &ComplexMatrix::identity(4)).frobenius_norm() < 1e-14);

        // branch 2 (c3 != 0): a = e1 + i e3, norms |x^t b| = |x^t c| match
        let mut a = ComplexVector::zeros(4);
        a.data[0] = ONE;
        a.data[2] = I;
        let spec = crate::catalog::make_spr(2, a).unwrap();
        let fp = constructive_zero(&spec, &d).unwrap();
        let xta = fp.point.matrix.tmul_vec(&spec.a);
        let nb: f64 = xta.data.iter().map(|z| z.re * z.re).sum::<f64>().sqrt();
        let nc: f64 = xta.data.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
        assert!((nb - nc).abs() < 1e-10, "|x^t b| = {nb} vs |x^t c| = {nc}");
        assert!(fp.phi_abs <= FIBER_PHI_TOL);

        // b1 = 0 path goes through the symplectic flip
        let mut a = ComplexVector::zeros(4);
        a.data[2] = ONE; // Re a supported in the lower half
        a.data[1] = I;
        let spec = crate::catalog::make_spr(2, a).unwrap();
        let fp = constructive_zero(&spec, &d).unwrap();
        assert!(fp.phi_abs <= FIBER_PHI_TOL);

        // random parameters
        for seed in 0..6 {
            let (a, _) = random_valid_params(Family::SprU, 2, 100 + seed).unwrap();
            let spec = crate::catalog::make_spr(2, a).unwrap();
            let fp = constructive_zero(&spec, &d).unwrap();
            assert!(fp.phi_abs <= FIBER_PHI_TOL);
            assert!(fp.point.membership_residual <= crate::spaces::MEMBERSHIP_TOL);
        }
    }

    #[test]
    fn constructive_zero_identity_families() {
        for fam in [Family::SostarU, Family::SustarSp] {
            let spec = example_spec(fam).unwrap();
            let d = build_descriptor(spec.space).unwrap();
            let fp = constructive_zero(&spec, &d).unwrap();
            let m = spec.f.size();
            assert!((&fp.point.matrix - &ComplexMatrix::identity(m)).frobenius_norm() == 0.0);
            assert!(fp.phi_abs <= FIBER_PHI_TOL);
        }
    }

    #[test]
    fn constructive_zero_requires_theorem_conditions() {
        let spec = make_slr(3, ComplexVector::basis(3, 1)).unwrap();
        let d = build_descriptor(spec.space).unwrap();
        assert!(constructive_zero(&spec, &d).is_err());
    }

    #[test]
    fn regularity_at_constructive_zeros() {
        for fam in [
            Family::SlrSo,
            Family::SprU,
            Family::SostarU,
            Family::SustarSp,
        ] {
            let spec = example_spec(fam).unwrap();
            let d = build_descriptor(spec.space).unwrap();
            let fp = constructive_zero(&spec, &d).unwrap();
            let reg = is_regular(&spec, &d, &fp.point.matrix, REGULARITY_REL_TOL).unwrap();
            assert!(
                reg.regular,
                "{fam:?} margin {:.3e} of {:.3e}",
                reg.margin, reg.criterion_norm
            );
            assert!(
                reg.margin > 0.1 * reg.criterion_norm,
                "{fam:?} margin is comfortable"
            );
        }
        // degenerate criterion matrix: a = 0 makes M = 0 and the point singular
        let spec = example_spec(Family::SlrSo).unwrap();
        let d = build_descriptor(spec.space).unwrap();
        let mut degenerate = spec.clone();
        degenerate.a = ComplexVector::zeros(3);
        let reg = is_regular(
            &degenerate,
            &d,
            &ComplexMatrix::identity(3),
            REGULARITY_REL_TOL,
        )
        .unwrap();
        assert!(!reg.regular && reg.margin == 0.0);
    }

    #[test]
    fn numeric_zero_converges_and_agrees_with_regularity() {
        let spec = example_spec(Family::SlrSo).unwrap();
        let d = build_descriptor(spec.space).unwrap();
        for seed in 0..3 {
            let fp = numeric_zero(&spec, &d, seed).unwrap();
            assert!(fp.phi_abs <= FIBER_PHI_TOL);
            let reg = is_regular(&spec, &d, &fp.point.matrix, REGULARITY_REL_TOL).unwrap();
            assert!(reg.regular);
        }
    }

    #[test]
    fn numeric_zero_fails_for_real_a() {
        // phi(x) = |x^t a|^2 > 0 everywhere: the reported failure is the
        // expected outcome
        let spec = make_slr(3, ComplexVector::basis(3, 1)).unwrap();
        let d = build_descriptor(spec.space).unwrap();
        let r = numeric_zero_with(&spec, &d, 0, 120);
        assert!(r.is_err());
    }

    #[test]
    fn fiber_walk_stays_certified() {
        let spec = example_spec(Family::SlrSo).unwrap();
        let d = build_descriptor(spec.space).unwrap();
        let start = constructive_zero(&spec, &d).unwrap();
        let walk = fiber_walk(&spec, &d, &start, 25, 0.05, 11).unwrap();
        assert_eq!(walk.len(), 25);
        for fp in &walk {
            assert!(fp.phi_abs <= FIBER_PHI_TOL);
            assert!(fp.point.membership_residual <= crate::spaces::MEMBERSHIP_TOL);
            assert!(fp.regularity_margin > 0.0);
        }
        // reproducibility
        let walk2 = fiber_walk(&spec, &d, &start, 25, 0.05, 11).unwrap();
        for (a, b) in walk.iter().zip(&walk2) {
            assert_eq!(a.point.matrix, b.point.matrix);
        }
        // zero step size keeps the start point
        let frozen = fiber_walk(&spec, &d, &start, 5, 0.0, 1).unwrap();
        for fp in &frozen {
            assert!((&fp.point.matrix - &start.point.matrix).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn sostar_example_params_certify_on_walk() {
        let spec = example_spec(Family::SostarU).unwrap();
        let d = build_descriptor(spec.space).unwrap();
        let start = constructive_zero(&spec, &d).unwrap();
        let walk = fiber_walk(&spec, &d, &start, 10, 0.08, 5).unwrap();
        for fp in &walk {
            assert!(fp.phi_abs <= FIBER_PHI_TOL);
        }
    }

    #[test]
    fn csv_and_jsonl_rows_have_expected_shape() {
        let spec = example_spec(Family::SlrSo).unwrap();
        let d = build_descriptor(spec.space).unwrap();
        let fp = constructive_zero(&spec, &d).unwrap();
        let header = csv_header(3);
        let row = csv_row(0, &fp);
        assert_eq!(header.split(',').count(), 1 + 2 * 9 + 2);
        assert_eq!(row.split(',').count(), 1 + 2 * 9 + 2);
        let rec = jsonl_record(0, &fp);
        assert_eq!(rec["step"], 0);
        assert_eq!(rec["matrix"].as_array().unwrap().len(), 3);
        assert_eq!(rec["matrix"][0][0], "1+0i");
    }

    #[test]
    fn make_fiber_point_rejects_off_fiber() {
        let spec = example_spec(Family::SlrSo).unwrap();
        let d = build_descriptor(spec.space).unwrap();
        let x = crate::spaces::random_point_with(&d, 40, 0.5)
            .unwrap()
            .matrix;
        // a generic group point is not on the fiber
        assert!(matches!(
            make_fiber_point(&spec, &d, x),
            Err(Error::OffFiber { .. })
        ));
    }
}
