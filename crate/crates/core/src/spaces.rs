//! Descriptors of the eight matrix symmetric spaces: the four non-compact
//! quotients SL(n,R)/SO(n), Sp(n,R)/U(n), SO*(2n)/U(n), SU*(2n)/Sp(n) and
//! their compact duals SU(n)/SO(n), Sp(n)/U(n), SO(2n)/U(n), SU(2n)/Sp(n).
//!
//! Bases are constructed from the groups' defining relations (not transcribed
//! from printed lists) and validated by [`validate_cartan`]: orthonormality,
//! bracket closure of the Cartan split, normality of every element, and the
//! linearized group equations. Membership of arbitrary matrices is measured
//! from the group-level defining equations.

use crate::error::{Error, Result};
use crate::matrix::{
    basis_generator, determinant, frobenius_inner, mat_exp, traceless_diag, Complex64,
    ComplexMatrix, Generator, ONE,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default tolerance for membership of constructed group points.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// The eight families. The last four are the compact duals of the first four.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// SL(n,R)/SO(n)
    SlrSo,
    /// Sp(n,R)/U(n)
    SprU,
    /// SO*(2n)/U(n)
    SostarU,
    /// SU*(2n)/Sp(n)
    SustarSp,
    /// SU(n)/SO(n)
    SuSo,
    /// Sp(n)/U(n)
    SpU,
    /// SO(2n)/U(n)
    So2nU,
    /// SU(2n)/Sp(n)
    Su2nSp,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::SlrSo,
        Family::SprU,
        Family::SostarU,
        Family::SustarSp,
        Family::SuSo,
        Family::SpU,
        Family::So2nU,
        Family::Su2nSp,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Family::SlrSo => "slr-so",
            Family::SprU => "spr-u",
            Family::SostarU => "sostar-u",
            Family::SustarSp => "sustar-sp",
            Family::SuSo => "su-so",
            Family::SpU => "sp-u",
            Family::So2nU => "so2n-u",
            Family::Su2nSp => "su2n-sp",
        }
    }

    pub fn parse_token(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.token() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown space family {s:?}")))
    }

    pub fn is_compact(self) -> bool {
        matches!(
            self,
            Family::SuSo | Family::SpU | Family::So2nU | Family::Su2nSp
        )
    }

    /// Compact dual of a non-compact family (identity on compact families).
    pub fn compact_dual(self) -> Family {
        match self {
            Family::SlrSo => Family::SuSo,
            Family::SprU => Family::SpU,
            Family::SostarU => Family::So2nU,
            Family::SustarSp => Family::Su2nSp,
            f => f,
        }
    }

    /// Non-compact sibling of a compact family (identity on non-compact ones).
    pub fn noncompact_sibling(self) -> Family {
        match self {
            Family::SuSo => Family::SlrSo,
            Family::SpU => Family::SprU,
            Family::So2nU => Family::SostarU,
            Family::Su2nSp => Family::SustarSp,
            f => f,
        }
    }

    pub fn min_n(self) -> usize {
        match self {
            Family::SlrSo | Family::SuSo => 3,
            _ => 2,
        }
    }

    /// Ambient matrix size: n for the SL/SU families on C^n, 2n otherwise.
    pub fn ambient_size(self, n: usize) -> usize {
        match self {
            Family::SlrSo | Family::SuSo => n,
            _ => 2 * n,
        }
    }
}

/// A family together with its rank parameter, e.g. "slr-so:3".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceId {
    pub family: Family,
    pub n: usize,
}

impl SpaceId {
    pub fn new(family: Family, n: usize) -> Result<SpaceId> {
        if n < family.min_n() {
            return Err(Error::InvalidParameter(format!(
                "{} requires n >= {}, got {n}",
                family.token(),
                family.min_n()
            )));
        }
        Ok(SpaceId { family, n })
    }

    pub fn ambient_size(self) -> usize {
        self.family.ambient_size(self.n)
    }

    pub fn parse(s: &str) -> Result<SpaceId> {
        let (fam, n) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("space id {s:?} is not family:n")))?;
        let n: usize = n
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad n in space id {s:?}")))?;
        SpaceId::new(Family::parse_token(fam)?, n)
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family.token(), self.n)
    }
}

impl Serialize for SpaceId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SpaceId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        SpaceId::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Orthonormal Cartan bases of the isometry algebra: g = k + p, with p
/// replaced by i*p on the compact duals.
#[derive(Debug, Clone)]
pub struct SymmetricSpaceDescriptor {
    pub id: SpaceId,
    pub ambient_size: usize,
    pub basis_k: Vec<ComplexMatrix>,
    pub basis_p: Vec<ComplexMatrix>,
}

impl SymmetricSpaceDescriptor {
    pub fn dim_k(&self) -> usize {
        self.basis_k.len()
    }

    pub fn dim_p(&self) -> usize {
        self.basis_p.len()
    }

    pub fn dim_g(&self) -> usize {
        self.basis_k.len() + self.basis_p.len()
    }

    /// k followed by p, the order every operator sum uses.
    pub fn full_basis(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.basis_k.iter().chain(self.basis_p.iter())
    }
}

/// Assemble [[a, b], [c, d]] from n x n blocks.
fn block2(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    d: &ComplexMatrix,
) -> ComplexMatrix {
    let n = a.rows;
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

fn scaled(m: ComplexMatrix, re: f64, im: f64) -> ComplexMatrix {
    m.scale(Complex64::new(re, im))
}

/// The embedded u(n) basis shared by the Sp(n,R) and SO*(2n) pictures:
/// blocks of Y on the diagonal, and X / D paired off-diagonally with a sign.
fn basis_u_embedded(n: usize) -> Vec<ComplexMatrix> {
    let z = ComplexMatrix::zeros(n, n);
    let r2 = 1.0 / 2.0_f64.sqrt();
    let mut out = Vec::new();
    for r in 1..=n {
        for s in r + 1..=n {
            let y = basis_generator(Generator::Skew(r, s), n).unwrap();
            let x = basis_generator(Generator::Sym(r, s), n).unwrap();
            out.push(scaled(block2(&y, &z, &z, &y), r2, 0.0));
            out.push(scaled(block2(&z, &x, &-&x, &z), r2, 0.0));
        }
    }
    for t in 1..=n {
        let d = basis_generator(Generator::Diag(t), n).unwrap();
        out.push(scaled(block2(&z, &d, &-&d, &z), r2, 0.0));
    }
    out
}

fn bases_slr(n: usize) -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
    let mut k = Vec::new();
    let mut p = Vec::new();
    for r in 1..=n {
        for s in r + 1..=n {
            k.push(basis_generator(Generator::Skew(r, s), n).unwrap());
            p.push(basis_generator(Generator::Sym(r, s), n).unwrap());
        }
    }
    for t in 1..n {
        p.push(traceless_diag(t, n).unwrap());
    }
    (k, p)
}

fn bases_spr(n: usize) -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
    let z = ComplexMatrix::zeros(n, n);
    let r2 = 1.0 / 2.0_f64.sqrt();
    let k = basis_u_embedded(n);
    let mut p = Vec::new();
    for r in 1..=n {
        for s in r + 1..=n {
            let x = basis_generator(Generator::Sym(r, s), n).unwrap();
            p.push(scaled(block2(&x, &z, &z, &-&x), r2, 0.0));
            p.push(scaled(block2(&z, &x, &x, &z), r2, 0.0));
        }
    }
    for t in 1..=n {
        let d = basis_generator(Generator::Diag(t), n).unwrap();
        p.push(scaled(block2(&d, &z, &z, &-&d), r2, 0.0));
        p.push(scaled(block2(&z, &d, &d, &z), r2, 0.0));
    }
    (k, p)
}

fn bases_sostar(n: usize) -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
    let z = ComplexMatrix::zeros(n, n);
    let r2 = 1.0 / 2.0_f64.sqrt();
    let k = basis_u_embedded(n);
    let mut p = Vec::new();
    for r in 1..=n {
        for s in r + 1..=n {
            let y = basis_generator(Generator::Skew(r, s), n).unwrap();
            p.push(scaled(block2(&y, &z, &z, &-&y), 0.0, r2));
            p.push(scaled(block2(&z, &y, &y, &z), 0.0, r2));
        }
    }
    (k, p)
}

fn bases_sustar(n: usize) -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
    let z = ComplexMatrix::zeros(n, n);
    let r2 = 1.0 / 2.0_f64.sqrt();
    let mut k = Vec::new();
    let mut p = Vec::new();
    // k = sp(n): anti-Hermitian upper-left block, complex symmetric upper-right
    for r in 1..=n {
        for s in r + 1..=n {
            let x = basis_generator(Generator::Sym(r, s), n).unwrap();
            let y = basis_generator(Generator::Skew(r, s), n).unwrap();
            k.push(scaled(block2(&y, &z, &z, &y), r2, 0.0));
            k.push(scaled(block2(&x, &z, &z, &-&x), 0.0, r2));
            k.push(scaled(block2(&z, &x, &-&x, &z), r2, 0.0));
            k.push(scaled(block2(&z, &x, &x, &z), 0.0, r2));
            p.push(scaled(block2(&x, &z, &z, &x), r2, 0.0));
            p.push(scaled(block2(&y, &z, &z, &-&y), 0.0, r2));
            p.push(scaled(block2(&z, &y, &-&y, &z), r2, 0.0));
            p.push(scaled(block2(&z, &y, &y, &z), 0.0, r2));
        }
    }
    for t in 1..=n {
        let d = basis_generator(Generator::Diag(t), n).unwrap();
        k.push(scaled(block2(&d, &z, &z, &-&d), 0.0, r2));
        k.push(scaled(block2(&z, &d, &-&d, &z), r2, 0.0));
        k.push(scaled(block2(&z, &d, &d, &z), 0.0, r2));
    }
    // traceless diagonal directions of the Hermitian part
    for t in 1..n {
        let h = traceless_diag(t, n).unwrap();
        p.push(scaled(block2(&h, &z, &z, &h), r2, 0.0));
    }
    (k, p)
}

/// Build the validated Cartan bases for a space. Compact duals reuse the
/// non-compact sibling's k and multiply its p by i.
pub fn build_descriptor(id: SpaceId) -> Result<SymmetricSpaceDescriptor> {
    let fam = id.family;
    let n = id.n;
    let (k, p) = match fam.noncompact_sibling() {
        Family::SlrSo => bases_slr(n),
        Family::SprU => bases_spr(n),
        Family::SostarU => bases_sostar(n),
        Family::SustarSp => bases_sustar(n),
        _ => unreachable!(),
    };
    let p = if fam.is_compact() {
        p.into_iter()
            .map(|m| m.scale(Complex64::new(0.0, 1.0)))
            .collect()
    } else {
        p
    };
    Ok(SymmetricSpaceDescriptor {
        id,
        ambient_size: id.ambient_size(),
        basis_k: k,
        basis_p: p,
    })
}

/// Residual of the group-level defining equations: sums of Frobenius norms of
/// the equation defects, |det - 1| where the determinant is pinned, and the
/// norm of the imaginary part where realness is required. Zero exactly on the
/// group.
pub fn membership_residual(id: SpaceId, x: &ComplexMatrix) -> Result<f64> {
    let m = id.ambient_size();
    if x.rows != m || x.cols != m {
        return Err(Error::ShapeMismatch(x.rows, x.cols, m, m));
    }
    let eye = ComplexMatrix::identity(m);
    let det_res = |x: &ComplexMatrix| -> Result<f64> { Ok((determinant(x)? - ONE).norm()) };
    let j = || basis_generator(Generator::Symplectic, id.n).unwrap();
    let r = match id.family {
        Family::SlrSo => x.imag_norm() + det_res(x)?,
        Family::SprU => {
            let jm = j();
            x.imag_norm() + (&(&(x * &jm) * &x.transpose()) - &jm).frobenius_norm()
        }
        Family::SostarU => {
            let jm = j();
            (&(x * &x.transpose()) - &eye).frobenius_norm()
                + det_res(x)?
                + (&(&(&x.conj() * &jm) * &x.transpose()) - &jm).frobenius_norm()
        }
        Family::SustarSp => {
            let jm = j();
            (&(x * &jm) - &(&jm * &x.conj())).frobenius_norm() + det_res(x)?
        }
        Family::SuSo | Family::Su2nSp => {
            (&(x * &x.adjoint()) - &eye).frobenius_norm() + det_res(x)?
        }
        Family::SpU => {
            let jm = j();
            (&(x * &x.adjoint()) - &eye).frobenius_norm()
                + (&(&(x * &jm) * &x.transpose()) - &jm).frobenius_norm()
        }
        Family::So2nU => {
            x.imag_norm() + (&(x * &x.transpose()) - &eye).frobenius_norm() + det_res(x)?
        }
    };
    Ok(r)
}

/// Residual of the linearized defining equations at the identity; zero on the
/// Lie algebra of the group (k + p as stored in the descriptor).
pub fn linearized_residual(id: SpaceId, z: &ComplexMatrix) -> f64 {
    let j = || basis_generator(Generator::Symplectic, id.n).unwrap();
    match id.family {
        Family::SlrSo => z.imag_norm() + z.trace().norm(),
        Family::SprU => {
            let jm = j();
            z.imag_norm() + (&(z * &jm) + &(&jm * &z.transpose())).frobenius_norm()
        }
        Family::SostarU => {
            let jm = j();
            (&z.transpose() + z).frobenius_norm()
                + (&(&z.conj() * &jm) + &(&jm * &z.transpose())).frobenius_norm()
        }
        Family::SustarSp => {
            let jm = j();
            (&(z * &jm) - &(&jm * &z.conj())).frobenius_norm() + z.trace().norm()
        }
        Family::SuSo | Family::Su2nSp => (&z.adjoint() + z).frobenius_norm() + z.trace().norm(),
        Family::SpU => {
            let jm = j();
            (&z.adjoint() + z).frobenius_norm()
                + (&(z * &jm) + &(&jm * &z.transpose())).frobenius_norm()
        }
        Family::So2nU => z.imag_norm() + (&z.transpose() + z).frobenius_norm() + z.trace().norm(),
    }
}

/// A validated point of the isometry group.
#[derive(Debug, Clone)]
pub struct GroupPoint {
    pub space: SpaceId,
    pub matrix: ComplexMatrix,
    pub membership_residual: f64,
}

impl GroupPoint {
    /// Wrap a matrix after measuring its membership residual.
    pub fn new(space: SpaceId, matrix: ComplexMatrix) -> Result<GroupPoint> {
        let r = membership_residual(space, &matrix)?;
        if !matrix.is_finite() {
            return Err(Error::InvalidParameter(
                "group point has non-finite entries".into(),
            ));
        }
        if r > MEMBERSHIP_TOL {
            return Err(Error::NotConverged(format!(
                "membership residual {r:.3e} exceeds {MEMBERSHIP_TOL:.1e} on {space}"
            )));
        }
        Ok(GroupPoint {
            space,
            matrix,
            membership_residual: r,
        })
    }
}

/// Gaussian coefficients over an orthonormal basis, std = scale.
fn gaussian_combination(
    basis: &[ComplexMatrix],
    scale: f64,
    rng: &mut ChaCha12Rng,
    size: usize,
) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(size, size);
    for b in basis {
        let c: f64 = StandardNormal.sample(rng);
        acc = &acc + &b.scale(Complex64::new(c * scale, 0.0));
    }
    acc
}

/// Deterministic random group point exp(P) exp(K), Gaussian coefficients of
/// std `scale` over basis_p and basis_k (over the basis of u on the compact
/// duals, where basis_p already stores i*p).
pub fn random_point(id: SpaceId, seed: u64, scale: f64) -> Result<GroupPoint> {
    if scale <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "scale must be positive, got {scale}"
        )));
    }
    let d = build_descriptor(id)?;
    random_point_with(&d, seed, scale)
}

/// Same as [`random_point`] but reusing a prebuilt descriptor.
pub fn random_point_with(
    d: &SymmetricSpaceDescriptor,
    seed: u64,
    scale: f64,
) -> Result<GroupPoint> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let m = d.ambient_size;
    let p = gaussian_combination(&d.basis_p, scale, &mut rng, m);
    let k = gaussian_combination(&d.basis_k, scale, &mut rng, m);
    let x = &mat_exp(&p, 1e-13)? * &mat_exp(&k, 1e-13)?;
    GroupPoint::new(d.id, x)
}

/// Result of checking a descriptor against the Cartan axioms.
#[derive(Debug, Clone, Default)]
pub struct CartanReport {
    pub max_orthonormality_defect: f64,
    pub max_bracket_defect: f64,
    pub max_normality_defect: f64,
    pub max_linearized_defect: f64,
    pub failures: Vec<String>,
}

impl CartanReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

/// Frobenius norm of the component of `m` orthogonal to the span of `basis`
/// (assumed orthonormal).
fn projection_defect(m: &ComplexMatrix, basis: &[ComplexMatrix]) -> f64 {
    let mut rest = m.clone();
    for b in basis {
        let c = frobenius_inner(&rest, b).unwrap();
        rest = &rest - &b.scale(Complex64::new(c, 0.0));
    }
    rest.frobenius_norm()
}

/// Check orthonormality of k u p, the bracket inclusions [k,k] in k,
/// [k,p] in p, [p,p] in k, normality ZZ* = Z*Z of every element and the
/// linearized group equations.
pub fn validate_cartan(d: &SymmetricSpaceDescriptor, tol: f64) -> CartanReport {
    let mut rep = CartanReport::default();
    let full: Vec<&ComplexMatrix> = d.full_basis().collect();
    for (i, a) in full.iter().enumerate() {
        for (j, b) in full.iter().enumerate() {
            let g = frobenius_inner(a, b).unwrap();
            let target = if i == j { 1.0 } else { 0.0 };
            let defect = (g - target).abs();
            rep.max_orthonormality_defect = rep.max_orthonormality_defect.max(defect);
            if defect > tol {
                rep.failures.push(format!(
                    "orthonormality failed for pair ({i},{j}): {defect:.3e}"
                ));
            }
        }
    }
    let mut check_brackets =
        |left: &[ComplexMatrix], right: &[ComplexMatrix], target: &[ComplexMatrix], label: &str| {
            for (i, a) in left.iter().enumerate() {
                for (j, b) in right.iter().enumerate() {
                    let defect = projection_defect(&commutator(a, b), target);
                    rep.max_bracket_defect = rep.max_bracket_defect.max(defect);
                    if defect > tol {
                        rep.failures.push(format!("{label} failed for pair ({i},{j}): {defect:.3e}"));
                    }
                }
            }
        };
    check_brackets(&d.basis_k, &d.basis_k, &d.basis_k, "[k,k] in k");
    check_brackets(&d.basis_k, &d.basis_p, &d.basis_p, "[k,p] in p");
    check_brackets(&d.basis_p, &d.basis_p, &d.basis_k, "[p,p] in k");
    for (i, z) in full.iter().enumerate() {
        let defect = (&(*z * &z.adjoint()) - &(&z.adjoint() * z)).frobenius_norm();
        rep.max_normality_defect = rep.max_normality_defect.max(defect);
        if defect > tol {
            rep.failures
                .push(format!("normality failed for element {i}: {defect:.3e}"));
        }
        let lin = linearized_residual(d.id, z);
        rep.max_linearized_defect = rep.max_linearized_defect.max(lin);
        if lin > tol.max(1e-12) {
            rep.failures.push(format!(
                "linearized group equations failed for element {i}: {lin:.3e}"
            ));
        }
    }
    rep
}
