//! CPT superselection: sector projectors, the two-element twirl, invariant
//! (Majorana) states, decoherence-free subspaces and frameness measures.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    column_basis, hermitian_eigensystem, pure_state_trace_distance, trace_distance, ComplexMatrix, DensityMatrix,
    StateVector, C64, KRON_DIM_CAP,
};
pub use crate::reps::Sector;

/// `|q0 − q1|` below this makes the alignment rate infinite.
pub const RATE_DIVERGENCE: f64 = 1e-12;

/// Largest `dim^n` for which Helstrom success is computed from dense
/// density matrices; above it the n-copy difference is compressed onto the
/// span of the two pure states.
pub const DENSE_HELSTROM_LIMIT: usize = 64;

/// Projectors `P± = (1 ± U)/2` onto the CPT eigenspaces.
#[derive(Clone, Debug, Serialize)]
pub struct SectorDecomposition {
    pub p_plus: ComplexMatrix,
    pub p_minus: ComplexMatrix,
    pub dim_plus: usize,
    pub dim_minus: usize,
}

impl SectorDecomposition {
    pub fn projector(&self, sector: Sector) -> &ComplexMatrix {
        match sector {
            Sector::Plus => &self.p_plus,
            Sector::Minus => &self.p_minus,
        }
    }

    pub fn dim(&self, sector: Sector) -> usize {
        match sector {
            Sector::Plus => self.dim_plus,
            Sector::Minus => self.dim_minus,
        }
    }

    pub fn total_dim(&self) -> usize {
        self.p_plus.rows()
    }
}

/// Fails unless `u` is a unitary involution to within `tol`.
fn require_involution(u: &ComplexMatrix, tol: f64) -> Result<()> {
    if !u.is_square() {
        return Err(Error::Contract("CPT operator must be square".into()));
    }
    let deviation = (u * u).max_abs_diff(&ComplexMatrix::identity(u.rows()));
    if deviation > tol {
        return Err(Error::PhaseNotStripped { deviation });
    }
    if !u.is_unitary(tol) {
        return Err(Error::Contract("CPT operator is not unitary".into()));
    }
    Ok(())
}

pub fn sector_projectors(u_cpt: &ComplexMatrix, tol: f64) -> Result<SectorDecomposition> {
    require_involution(u_cpt, tol)?;
    let id = ComplexMatrix::identity(u_cpt.rows());
    let half = C64::new(0.5, 0.0);
    let p_plus = (&id + u_cpt).scale(half);
    let p_minus = (&id - u_cpt).scale(half);
    let dim_plus = p_plus.trace().re.round() as usize;
    let dim_minus = p_minus.trace().re.round() as usize;
    Ok(SectorDecomposition {
        p_plus,
        p_minus,
        dim_plus,
        dim_minus,
    })
}

/// `ρ ↦ ½(ρ + UρU†)`: the uniform average over `{1, CPT}`.
pub fn twirl(rho: &DensityMatrix, u_cpt: &ComplexMatrix) -> Result<DensityMatrix> {
    if u_cpt.rows() != rho.dim() || !u_cpt.is_square() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: u_cpt.rows(),
        });
    }
    let m = rho.matrix();
    let conjugated = &(u_cpt * m) * &u_cpt.adjoint();
    Ok(DensityMatrix::from_matrix_unchecked(
        (m + &conjugated).scale(C64::new(0.5, 0.0)),
    ))
}

/// Invariance under CPT: `Uψ = ψ` within `tol` (eigenvalue exactly +1, not
/// merely up to phase).
pub fn is_majorana(psi: &StateVector, u_cpt: &ComplexMatrix, tol: f64) -> bool {
    u_cpt.cols() == psi.dim() && u_cpt.apply(psi).max_abs_diff(psi) <= tol
}

/// Orthonormal basis of one sector: Gram-Schmidt over the projector's
/// columns in index order, which for a phased-permutation CPT yields the
/// pair states `(|b⟩ ± CPT|b⟩)/√2`.
pub fn dfs_subspace(decomp: &SectorDecomposition, sector: Sector) -> Result<Vec<StateVector>> {
    if decomp.dim(sector) == 0 {
        return Err(Error::Usage(format!("sector {sector:?} is empty")));
    }
    Ok(column_basis(decomp.projector(sector), 1e-8))
}

/// Sector weights `(q0, q1) = (⟨ψ|P₊|ψ⟩, ⟨ψ|P₋|ψ⟩)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResourceForm {
    pub q0: f64,
    pub q1: f64,
}

impl ResourceForm {
    pub fn new(q0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q0) {
            return Err(Error::Usage(format!("q0 must lie in [0, 1], got {q0}")));
        }
        Ok(Self { q0, q1: 1.0 - q0 })
    }
}

pub fn standard_form(psi: &StateVector, decomp: &SectorDecomposition, tol: f64) -> Result<ResourceForm> {
    if psi.dim() != decomp.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: decomp.total_dim(),
            found: psi.dim(),
        });
    }
    if !psi.is_normalized(tol) {
        return Err(Error::Contract(format!("state has norm {}", psi.norm())));
    }
    let weight = |p: &ComplexMatrix| psi.inner(&p.apply(psi)).re.clamp(0.0, 1.0);
    Ok(ResourceForm {
        q0: weight(&decomp.p_plus),
        q1: weight(&decomp.p_minus),
    })
}

/// `√q0·|+⟩ + √q1·|−⟩` built from the first vector of each sector.
pub fn resource_state(q0: f64, decomp: &SectorDecomposition) -> Result<StateVector> {
    let form = ResourceForm::new(q0)?;
    let plus = dfs_subspace(decomp, Sector::Plus)?;
    let minus = dfs_subspace(decomp, Sector::Minus)?;
    Ok(plus[0]
        .scale(C64::new(form.q0.sqrt(), 0.0))
        .add(&minus[0].scale(C64::new(form.q1.sqrt(), 0.0))))
}

/// Alignment rate in bits per token.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlignmentRate {
    Finite(f64),
    Infinite,
}

impl AlignmentRate {
    pub fn bits(self) -> f64 {
        match self {
            Self::Finite(b) => b,
            Self::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for AlignmentRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(b) => write!(f, "{b}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

/// JSON has no infinity literal; the divergent rate is the string `"inf"`.
impl Serialize for AlignmentRate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(b) => s.serialize_f64(*b),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `R = −2·log₂|q0 − q1|`.
pub fn alignment_rate(form: &ResourceForm) -> AlignmentRate {
    let gap = (form.q0 - form.q1).abs();
    if gap < RATE_DIVERGENCE {
        AlignmentRate::Infinite
    } else {
        // -0.0 for sector-pure states would print as "-0.0"
        AlignmentRate::Finite((-2.0 * gap.log2()).max(0.0))
    }
}

/// Optimal probability of telling `ψ^{⊗n}` from `(Uψ)^{⊗n}` with equal
/// priors: `½ + ½·D(ρ^{⊗n}, (UρU†)^{⊗n})`.
pub fn helstrom_success(psi: &StateVector, u_cpt: &ComplexMatrix, n_copies: usize, tol: f64) -> Result<f64> {
    if u_cpt.cols() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: u_cpt.cols(),
            found: psi.dim(),
        });
    }
    if !psi.is_normalized(tol) {
        return Err(Error::Contract(format!("state has norm {}", psi.norm())));
    }
    let total = checked_power(psi.dim(), n_copies)?;
    let image = u_cpt.apply(psi);
    let distance = if total <= DENSE_HELSTROM_LIMIT {
        let rho = DensityMatrix::pure(psi);
        let sigma = DensityMatrix::pure(&image);
        let mut rho_n = DensityMatrix::pure(&StateVector::basis(1, 0));
        let mut sigma_n = rho_n.clone();
        for _ in 0..n_copies {
            rho_n = rho_n.kron(&rho)?;
            sigma_n = sigma_n.kron(&sigma)?;
        }
        trace_distance(&rho_n, &sigma_n)?
    } else {
        pure_state_trace_distance(&psi.tensor_power(n_copies)?, &image.tensor_power(n_copies)?)?
    };
    Ok(0.5 + 0.5 * distance.min(1.0))
}

/// Pure-state closed form `½ + ½√(1 − |⟨ψ|U|ψ⟩|^{2n})`.
pub fn helstrom_success_closed_form(psi: &StateVector, u_cpt: &ComplexMatrix, n_copies: usize) -> f64 {
    let overlap = psi.inner(&u_cpt.apply(psi)).norm();
    0.5 + 0.5 * (1.0 - overlap.powi(2 * n_copies as i32)).max(0.0).sqrt()
}

fn checked_power(dim: usize, n: usize) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total
            .checked_mul(dim)
            .filter(|&t| t <= KRON_DIM_CAP)
            .ok_or(Error::Size {
                requested: dim.saturating_pow(n as u32),
                cap: KRON_DIM_CAP,
            })?;
    }
    Ok(total)
}

/// Two-outcome Helstrom measurement distinguishing `ψ^{⊗n}` (frame `1`)
/// from `(Uψ)^{⊗n}` (frame `CPT`).
///
/// The measurement projects onto the non-negative eigenspace of
/// `ρ₀^{⊗n} − ρ₁^{⊗n}` (outcome "1"; zero eigenvalues go here) and its
/// complement (outcome "CPT"). Both hypotheses live in a two-dimensional
/// span, so only that compressed block is diagonalized.
#[derive(Clone, Debug)]
pub struct HelstromMeasurement {
    /// Probability of answering "1" when the tokens were left alone.
    pub p_identity_given_identity: f64,
    /// Probability of answering "1" when the tokens were CPT-transformed.
    pub p_identity_given_cpt: f64,
}

impl HelstromMeasurement {
    pub fn new(token: &StateVector, u_cpt: &ComplexMatrix, n_tokens: usize, tol: f64) -> Result<Self> {
        if !token.is_normalized(tol) {
            return Err(Error::Contract(format!("token has norm {}", token.norm())));
        }
        checked_power(token.dim(), n_tokens)?;
        let a = token.tensor_power(n_tokens)?;
        let b = u_cpt.apply(token).tensor_power(n_tokens)?;
        let basis = column_basis(&ComplexMatrix::from_columns(&[a.clone(), b.clone()]), 1e-12);
        let coords = |v: &StateVector| -> Vec<C64> { basis.iter().map(|e| e.inner(v)).collect() };
        let (ca, cb) = (coords(&a), coords(&b));
        let k = basis.len();
        let mut delta = ComplexMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                delta[(i, j)] = ca[i] * ca[j].conj() - cb[i] * cb[j].conj();
            }
        }
        let es = hermitian_eigensystem(&delta, 1e-8)?;
        let weight_on_identity = |c: &[C64]| -> f64 {
            (0..k)
                .filter(|&col| es.values[col] >= -tol)
                .map(|col| {
                    let amp: C64 = (0..k).map(|i| es.vectors[(i, col)].conj() * c[i]).sum();
                    amp.norm_sqr()
                })
                .sum::<f64>()
                .clamp(0.0, 1.0)
        };
        Ok(Self {
            p_identity_given_identity: weight_on_identity(&ca),
            p_identity_given_cpt: weight_on_identity(&cb),
        })
    }

    /// Success probability with equal priors.
    pub fn success_probability(&self) -> f64 {
        0.5 * (self.p_identity_given_identity + 1.0 - self.p_identity_given_cpt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::{build_operator, build_subbasis, PhaseConfig, SpeciesLabel, Transformation};
    use num_rational::Rational64;

    fn spin_zero_cpt() -> ComplexMatrix {
        let species = SpeciesLabel::with_u(Rational64::from_integer(1), 0, true);
        let b = build_subbasis(&species, 1.0, false).unwrap();
        build_operator(Transformation::CPT, &b, &PhaseConfig::default()).unwrap()
    }

    #[test]
    fn projector_dimensions_spin_zero() {
        let d = sector_projectors(&spin_zero_cpt(), 1e-12).unwrap();
        assert_eq!((d.dim_plus, d.dim_minus), (2, 2));
    }

    #[test]
    fn phased_operator_is_rejected() {
        let u = spin_zero_cpt().scale(C64::from_polar(1.0, 0.4));
        assert!(matches!(
            sector_projectors(&u, 1e-12),
            Err(Error::PhaseNotStripped { .. })
        ));
    }

    #[test]
    fn twirl_of_basis_projector() {
        let u = spin_zero_cpt();
        let rho = DensityMatrix::pure(&StateVector::basis(4, 1));
        let t = twirl(&rho, &u).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(1, 1)] = C64::new(0.5, 0.0);
        expected[(2, 2)] = C64::new(0.5, 0.0);
        assert_eq!(t.matrix(), &expected);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert_eq!(twirl(&mixed, &u).unwrap(), mixed);
    }

    #[test]
    fn twirl_dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(twirl(&rho, &spin_zero_cpt()).is_err());
    }

    #[test]
    fn majorana_membership() {
        let u = spin_zero_cpt();
        let d = sector_projectors(&u, 1e-12).unwrap();
        let plus = dfs_subspace(&d, Sector::Plus).unwrap();
        let minus = dfs_subspace(&d, Sector::Minus).unwrap();
        assert!(is_majorana(&plus[0], &u, 1e-12));
        assert!(!is_majorana(&minus[0], &u, 1e-12));
        assert!(!is_majorana(&StateVector::basis(4, 0), &u, 1e-12));
    }

    #[test]
    fn standard_form_examples() {
        let u = spin_zero_cpt();
        let d = sector_projectors(&u, 1e-12).unwrap();
        let plus = &dfs_subspace(&d, Sector::Plus).unwrap()[0];
        let f = standard_form(plus, &d, 1e-12).unwrap();
        assert!((f.q0 - 1.0).abs() < 1e-15 && f.q1.abs() < 1e-15);
        let f = standard_form(&StateVector::basis(4, 0), &d, 1e-12).unwrap();
        assert!((f.q0 - 0.5).abs() < 1e-15 && (f.q1 - 0.5).abs() < 1e-15);
        let unnormalized = StateVector::basis(4, 0).scale(C64::new(2.0, 0.0));
        assert!(standard_form(&unnormalized, &d, 1e-12).is_err());
    }

    #[test]
    fn alignment_rate_examples() {
        assert_eq!(
            alignment_rate(&ResourceForm::new(1.0).unwrap()),
            AlignmentRate::Finite(0.0)
        );
        assert_eq!(
            alignment_rate(&ResourceForm::new(0.5).unwrap()),
            AlignmentRate::Infinite
        );
        assert_eq!(
            alignment_rate(&ResourceForm::new(0.75).unwrap()),
            AlignmentRate::Finite(2.0)
        );
        assert_eq!(serde_json::to_string(&AlignmentRate::Infinite).unwrap(), "\"inf\"");
        assert!(ResourceForm::new(1.5).is_err());
    }

    #[test]
    fn helstrom_examples() {
        let u = spin_zero_cpt();
        let d = sector_projectors(&u, 1e-12).unwrap();
        let eigen = resource_state(1.0, &d).unwrap();
        for n in 1..4 {
            assert!((helstrom_success(&eigen, &u, n, 1e-12).unwrap() - 0.5).abs() < 1e-12);
        }
        let token = resource_state(0.75, &d).unwrap();
        let expected = 0.5 + 0.5 * (1.0f64 - 0.25).sqrt();
        assert!((helstrom_success(&token, &u, 1, 1e-12).unwrap() - expected).abs() < 1e-12);
        let balanced = resource_state(0.5, &d).unwrap();
        assert!((helstrom_success(&balanced, &u, 1, 1e-12).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn helstrom_cap() {
        let u = spin_zero_cpt();
        let psi = StateVector::basis(4, 0);
        assert!(helstrom_success(&psi, &u, 7, 1e-12).is_ok());
        assert!(matches!(helstrom_success(&psi, &u, 8, 1e-12), Err(Error::Size { .. })));
    }

    #[test]
    fn measurement_matches_success_probability() {
        let u = spin_zero_cpt();
        let d = sector_projectors(&u, 1e-12).unwrap();
        let token = resource_state(0.75, &d).unwrap();
        for n in [1, 2, 5] {
            let m = HelstromMeasurement::new(&token, &u, n, 1e-12).unwrap();
            let direct = helstrom_success(&token, &u, n, 1e-12).unwrap();
            assert!((m.success_probability() - direct).abs() < 1e-12, "n = {n}");
        }
        let eigen = resource_state(1.0, &d).unwrap();
        let m = HelstromMeasurement::new(&eigen, &u, 3, 1e-12).unwrap();
        assert!((m.p_identity_given_identity - 1.0).abs() < 1e-12);
        assert!((m.p_identity_given_cpt - 1.0).abs() < 1e-12);
    }
}
