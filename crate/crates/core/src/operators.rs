//! The tension field tau and the conformality operator kappa on a matrix Lie
//! group with the left-invariant trace metric, in closed form for quadratic
//! trace functions x -> trace(A x B x^t), plus a finite-difference oracle for
//! cross-validation of the closed forms.
//!
//! Both operators are sums over an orthonormal basis of the Lie algebra of
//! left-translated directional derivatives; the basis is supplied by the
//! caller (k u p of a space descriptor), so the same code serves the
//! non-compact groups and their compact duals.

use crate::error::{Error, Result};
use crate::matrix::{mat_exp, Complex64, ComplexMatrix, ZERO};

/// Symmetry class of the fixed matrix B in trace(A x B x^t).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BSymmetry {
    Symmetric,
    Skew,
}

/// The quadratic trace function x -> trace(A x B x^t), stored as the pair
/// (A, B). Every eigenfunction in the catalog is of this shape, with
/// A = a b^t rank one and B either the identity or the symplectic form.
#[derive(Debug, Clone)]
pub struct QuadTraceFn {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub symmetry_of_b: BSymmetry,
}

impl QuadTraceFn {
    /// Validates that B matches its declared symmetry class to 1e-12.
    pub fn new(
        a: ComplexMatrix,
        b: ComplexMatrix,
        symmetry_of_b: BSymmetry,
    ) -> Result<QuadTraceFn> {
        if !a.is_square() || !b.is_square() || a.rows != b.rows {
            return Err(Error::ShapeMismatch(a.rows, a.cols, b.rows, b.cols));
        }
        let bt = b.transpose();
        let defect = match symmetry_of_b {
            BSymmetry::Symmetric => (&b - &bt).frobenius_norm(),
            BSymmetry::Skew => (&b + &bt).frobenius_norm(),
        };
        if defect > 1e-12 * (1.0 + b.frobenius_norm()) {
            return Err(Error::InvalidParameter(format!(
                "B violates its declared symmetry class by {defect:.3e}"
            )));
        }
        Ok(QuadTraceFn {
            a,
            b,
            symmetry_of_b,
        })
    }

    pub fn size(&self) -> usize {
        self.a.rows
    }

    fn check_size(&self, x: &ComplexMatrix) -> Result<()> {
        if x.rows != self.size() || x.cols != self.size() {
            return Err(Error::ShapeMismatch(
                x.rows,
                x.cols,
                self.size(),
                self.size(),
            ));
        }
        Ok(())
    }
}

/// trace(A x B x^t).
pub fn eval(f: &QuadTraceFn, x: &ComplexMatrix) -> Result<Complex64> {
    f.check_size(x)?;
    let t = &(&(&f.a * x) * &f.b) * &x.transpose();
    Ok(t.trace())
}

/// First left-translated derivative: d/ds trace(A x e^{sZ} B e^{sZ^t} x^t)
/// at s = 0, i.e. trace(A x Z B x^t) + trace(A x B Z^t x^t).
pub fn first_derivative(
    f: &QuadTraceFn,
    x: &ComplexMatrix,
    z: &ComplexMatrix,
) -> Result<Complex64> {
    f.check_size(x)?;
    f.check_size(z)?;
    let ax = &f.a * x;
    let xt = x.transpose();
    let t1 = (&(&(&ax * z) * &f.b) * &xt).trace();
    let t2 = (&(&(&ax * &f.b) * &z.transpose()) * &xt).trace();
    Ok(t1 + t2)
}

/// Second left-translated derivative:
/// trace(A x Z^2 B x^t) + 2 trace(A x Z B Z^t x^t) + trace(A x B (Z^t)^2 x^t).
pub fn second_derivative(
    f: &QuadTraceFn,
    x: &ComplexMatrix,
    z: &ComplexMatrix,
) -> Result<Complex64> {
    f.check_size(x)?;
    f.check_size(z)?;
    let ax = &f.a * x;
    let xt = x.transpose();
    let zt = z.transpose();
    let zz = z * z;
    let ztzt = &zt * &zt;
    let t1 = (&(&(&ax * &zz) * &f.b) * &xt).trace();
    let t2 = (&(&(&(&ax * z) * &f.b) * &zt) * &xt).trace();
    let t3 = (&(&(&ax * &f.b) * &ztzt) * &xt).trace();
    Ok(t1 + t2 * Complex64::new(2.0, 0.0) + t3)
}

/// Tension field: sum of second derivatives over the full orthonormal basis.
pub fn tau(f: &QuadTraceFn, basis: &[ComplexMatrix], x: &ComplexMatrix) -> Result<Complex64> {
    let mut acc = ZERO;
    for z in basis {
        acc += second_derivative(f, x, z)?;
    }
    Ok(acc)
}

/// Conformality operator: sum of Z(f) Z(g) over the basis.
pub fn kappa(
    f: &QuadTraceFn,
    g: &QuadTraceFn,
    basis: &[ComplexMatrix],
    x: &ComplexMatrix,
) -> Result<Complex64> {
    let mut acc = ZERO;
    for z in basis {
        acc += first_derivative(f, x, z)? * first_derivative(g, x, z)?;
    }
    Ok(acc)
}

/// Derivative order for the finite-difference oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOrder {
    First,
    Second,
}

/// Default steps balancing truncation against cancellation in f64.
pub const ORACLE_H1: f64 = 1e-5;
pub const ORACLE_H2: f64 = 1e-3;

/// Centered finite-difference estimate of d^k/ds^k f(x exp(sZ)) at s = 0 for
/// an arbitrary scalar function on matrices. Two-point stencil for k = 1,
/// five-point for k = 2. This is the independent route used to cross-check
/// the closed forms, so it never calls them.
pub fn derivative_oracle<F>(
    func: F,
    x: &ComplexMatrix,
    z: &ComplexMatrix,
    order: OracleOrder,
    h: f64,
) -> Result<Complex64>
where
    F: Fn(&ComplexMatrix) -> Complex64,
{
    if h <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "oracle step must be positive, got {h}"
        )));
    }
    let step = |s: f64| -> Result<ComplexMatrix> {
        Ok(x * &mat_exp(&z.scale(Complex64::new(s, 0.0)), 1e-13)?)
    };
    match order {
        OracleOrder::First => {
            let fp = func(&step(h)?);
            let fm = func(&step(-h)?);
            Ok((fp - fm) / Complex64::new(2.0 * h, 0.0))
        }
        OracleOrder::Second => {
            let f2p = func(&step(2.0 * h)?);
            let fp = func(&step(h)?);
            let f0 = func(x);
            let fm = func(&step(-h)?);
            let f2m = func(&step(-2.0 * h)?);
            let num = -f2p + fp * Complex64::new(16.0, 0.0) - f0 * Complex64::new(30.0, 0.0)
                + fm * Complex64::new(16.0, 0.0)
                - f2m;
            Ok(num / Complex64::new(12.0 * h * h, 0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{basis_generator, ComplexVector, Generator, I, ONE};
    use crate::spaces::{build_descriptor, random_point_with, Family, SpaceId};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(n: usize, rng: &mut ChaCha12Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        m
    }

    fn slr_quadratic(a: &ComplexVector) -> QuadTraceFn {
        let n = a.dim();
        QuadTraceFn::new(a.outer(a), ComplexMatrix::identity(n), BSymmetry::Symmetric).unwrap()
    }

    #[test]
    fn eval_examples() {
        let a = ComplexVector::new(vec![ONE, I, ZERO]);
        let f = slr_quadratic(&a);
        assert!(eval(&f, &ComplexMatrix::identity(3)).unwrap().norm() < 1e-15);

        let e1 = ComplexVector::basis(2, 1);
        let e2 = ComplexVector::basis(2, 2);
        let j1 = basis_generator(Generator::Symplectic, 1).unwrap();
        let g = QuadTraceFn::new(e1.outer(&e2), j1, BSymmetry::Skew).unwrap();
        assert!((eval(&g, &ComplexMatrix::identity(2)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);

        assert!(eval(&g, &ComplexMatrix::zeros(2, 2)).unwrap().norm() < 1e-30);
        assert!(eval(&g, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn symmetry_class_is_validated() {
        let id = ComplexMatrix::identity(2);
        assert!(QuadTraceFn::new(id.clone(), id.clone(), BSymmetry::Skew).is_err());
        let j = basis_generator(Generator::Symplectic, 1).unwrap();
        assert!(QuadTraceFn::new(id.clone(), j.clone(), BSymmetry::Symmetric).is_err());
        assert!(QuadTraceFn::new(id.clone(), j, BSymmetry::Skew).is_ok());
    }

    #[test]
    fn first_derivative_matches_gradient_form() {
        // for A = a a^t and symmetric B the derivative is 2 trace(B x^t A x Z)
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let a = ComplexVector::new(vec![c(1.0, 0.3), c(0.0, 1.0), c(0.5, -0.2)]);
        let f = slr_quadratic(&a);
        for _ in 0..10 {
            let x = random_matrix(3, &mut rng);
            let z = random_matrix(3, &mut rng);
            let lhs = first_derivative(&f, &x, &z).unwrap();
            let m = &(&(&f.b * &x.transpose()) * &f.a) * &x;
            let rhs = (&m * &z).trace() * c(2.0, 0.0);
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
        let zero = ComplexMatrix::zeros(3, 3);
        let x = random_matrix(3, &mut rng);
        assert!(first_derivative(&f, &x, &zero).unwrap().norm() < 1e-30);
    }

    #[test]
    fn second_derivative_frozen_value() {
        // f(x) = trace(a a^t x x^t) with a = e1 on 3x3, Z = X(1,2), x = I: value 2
        let a = ComplexVector::basis(3, 1);
        let f = slr_quadratic(&a);
        let z = basis_generator(Generator::Sym(1, 2), 3).unwrap();
        let v = second_derivative(&f, &ComplexMatrix::identity(3), &z).unwrap();
        assert!((v - c(2.0, 0.0)).norm() < 1e-14);
        let zero = ComplexMatrix::zeros(3, 3);
        assert!(
            second_derivative(&f, &ComplexMatrix::identity(3), &zero)
                .unwrap()
                .norm()
                < 1e-30
        );
    }

    #[test]
    fn closed_forms_match_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let a = ComplexVector::new(vec![c(0.8, -0.1), c(0.2, 1.1), c(-0.4, 0.5)]);
        let f = slr_quadratic(&a);
        for _ in 0..20 {
            let x = random_matrix(3, &mut rng);
            let z = random_matrix(3, &mut rng);
            let g = |y: &ComplexMatrix| eval(&f, y).unwrap();
            let d1 = first_derivative(&f, &x, &z).unwrap();
            let o1 = derivative_oracle(g, &x, &z, OracleOrder::First, ORACLE_H1).unwrap();
            assert!(
                (d1 - o1).norm() <= 1e-8 * (1.0 + d1.norm()),
                "d1 {d1} vs {o1}"
            );
            let d2 = second_derivative(&f, &x, &z).unwrap();
            let o2 = derivative_oracle(g, &x, &z, OracleOrder::Second, ORACLE_H2).unwrap();
            assert!(
                (d2 - o2).norm() <= 1e-6 * (1.0 + d2.norm()),
                "d2 {d2} vs {o2}"
            );
        }
    }

    #[test]
    fn oracle_degenerate_cases() {
        let x = ComplexMatrix::identity(2);
        let z = basis_generator(Generator::Skew(1, 2), 2).unwrap();
        let constf = |_: &ComplexMatrix| c(3.0, -1.0);
        assert!(
            derivative_oracle(constf, &x, &z, OracleOrder::First, 1e-5)
                .unwrap()
                .norm()
                < 1e-10
        );
        assert!(
            derivative_oracle(constf, &x, &z, OracleOrder::Second, 1e-3)
                .unwrap()
                .norm()
                < 1e-9
        );
        assert!(derivative_oracle(constf, &x, &z, OracleOrder::First, 0.0).is_err());
    }

    #[test]
    fn kappa_is_symmetric_and_vanishes_on_constants() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let d = build_descriptor(SpaceId::new(Family::SlrSo, 3).unwrap()).unwrap();
        let basis: Vec<ComplexMatrix> = d.full_basis().cloned().collect();
        let a = ComplexVector::new(vec![c(1.0, 0.2), c(0.1, 1.0), c(0.0, 0.4)]);
        let b = ComplexVector::new(vec![c(0.3, -1.0), c(1.0, 0.0), c(0.2, 0.2)]);
        let f = slr_quadratic(&a);
        let g = slr_quadratic(&b);
        let x = random_matrix(3, &mut rng);
        let kfg = kappa(&f, &g, &basis, &x).unwrap();
        let kgf = kappa(&g, &f, &basis, &x).unwrap();
        assert_eq!(kfg, kgf);
        let zerof = QuadTraceFn::new(
            ComplexMatrix::zeros(3, 3),
            ComplexMatrix::identity(3),
            BSymmetry::Symmetric,
        )
        .unwrap();
        assert!(kappa(&f, &zerof, &basis, &x).unwrap().norm() < 1e-30);
    }

    #[test]
    fn tau_eigen_identity_on_slr3() {
        // tau(f) = (20/3) f at random group points for the catalog function
        let id = SpaceId::new(Family::SlrSo, 3).unwrap();
        let d = build_descriptor(id).unwrap();
        let basis: Vec<ComplexMatrix> = d.full_basis().cloned().collect();
        let a = ComplexVector::new(vec![c(0.9, 0.1), c(-0.2, 1.3), c(0.4, -0.7)]);
        let f = slr_quadratic(&a);
        for seed in 0..8 {
            let x = random_point_with(&d, seed, 0.5).unwrap().matrix;
            let t = tau(&f, &basis, &x).unwrap();
            let v = eval(&f, &x).unwrap() * c(20.0 / 3.0, 0.0);
            assert!(
                (t - v).norm() <= 1e-8 * (1.0 + v.norm()),
                "residual {:.3e}",
                (t - v).norm()
            );
        }
    }

    #[test]
    fn product_rule_via_oracle() {
        // tau(fg) = tau(f) g + 2 kappa(f,g) + f tau(g); the product is quartic
        // so only the oracle can differentiate it
        let id = SpaceId::new(Family::SlrSo, 3).unwrap();
        let d = build_descriptor(id).unwrap();
        let basis: Vec<ComplexMatrix> = d.full_basis().cloned().collect();
        let a = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.2, 0.1)]);
        let b = ComplexVector::new(vec![c(0.5, 0.5), c(1.0, -0.3), c(0.0, 0.8)]);
        let f = slr_quadratic(&a);
        let g = slr_quadratic(&b);
        for seed in 0..4 {
            let x = random_point_with(&d, 100 + seed, 0.4).unwrap().matrix;
            let product = |y: &ComplexMatrix| eval(&f, y).unwrap() * eval(&g, y).unwrap();
            let mut tau_p = ZERO;
            for z in &basis {
                tau_p += derivative_oracle(product, &x, z, OracleOrder::Second, ORACLE_H2).unwrap();
            }
            let rhs = tau(&f, &basis, &x).unwrap() * eval(&g, &x).unwrap()
                + kappa(&f, &g, &basis, &x).unwrap() * c(2.0, 0.0)
                + eval(&f, &x).unwrap() * tau(&g, &basis, &x).unwrap();
            assert!(
                (tau_p - rhs).norm() <= 1e-5 * (1.0 + rhs.norm()),
                "{:.3e}",
                (tau_p - rhs).norm()
            );
        }
    }

    #[test]
    fn operators_invariant_under_basis_rotation() {
        // mix basis_k and basis_p by independent random orthogonal matrices
        let id = SpaceId::new(Family::SprU, 2).unwrap();
        let d = build_descriptor(id).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let rotate = |blocks: &[ComplexMatrix], rng: &mut ChaCha12Rng| -> Vec<ComplexMatrix> {
            let k = blocks.len();
            // random orthogonal via Gram-Schmidt on a Gaussian matrix
            let mut q: Vec<Vec<f64>> = Vec::new();
            for _ in 0..k {
                let mut v: Vec<f64> = (0..k).map(|_| rng.random::<f64>() - 0.5).collect();
                for u in &q {
                    let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= dot * ui;
                    }
                }
                let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                for vi in v.iter_mut() {
                    *vi /= norm;
                }
                q.push(v);
            }
            (0..k)
                .map(|i| {
                    let mut acc = ComplexMatrix::zeros(blocks[0].rows, blocks[0].cols);
                    for (j, b) in blocks.iter().enumerate() {
                        acc = &acc + &b.scale(c(q[i][j], 0.0));
                    }
                    acc
                })
                .collect()
        };
        let mut basis: Vec<ComplexMatrix> = rotate(&d.basis_k, &mut rng);
        basis.extend(rotate(&d.basis_p, &mut rng));
        let orig: Vec<ComplexMatrix> = d.full_basis().cloned().collect();

        let a = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.3, 0.0), c(0.0, -0.4)]);
        let f = slr_quadratic(&a);
        let x = random_point_with(&d, 17, 0.5).unwrap().matrix;
        let t1 = tau(&f, &orig, &x).unwrap();
        let t2 = tau(&f, &basis, &x).unwrap();
        assert!((t1 - t2).norm() <= 1e-9 * (1.0 + t1.norm()));
        let k1 = kappa(&f, &f, &orig, &x).unwrap();
        let k2 = kappa(&f, &f, &basis, &x).unwrap();
        assert!((k1 - k2).norm() <= 1e-9 * (1.0 + k1.norm()));
    }
}
