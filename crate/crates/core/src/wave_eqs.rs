//! Matrix content of the relativistic wave equations and numerical checks of
//! their algebra, dispersion and plane-wave solution counts.
//!
//! Natural units (ħ = c = 1), metric `diag(+1, −1, −1, −1)` and plane waves
//! `w·exp(−ip·x)`, so `i∂_μ → p_μ`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{nullspace_basis, singular_values, ComplexMatrix, StateVector, C64, I, ONE, ZERO};
use crate::rng;

/// Minkowski metric diagonal.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// `|p² − m²|` below this classifies a momentum as on-shell.
pub const ON_SHELL_TOL: f64 = 1e-9;

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Pauli matrices `σ¹, σ², σ³`.
pub fn pauli() -> [ComplexMatrix; 3] {
    [
        ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]]),
        ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]]),
        ComplexMatrix::from_rows(&[[ONE, ZERO], [ZERO, -ONE]]),
    ]
}

/// Summary emitted by every `verify` check.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub check: String,
    pub max_deviation: f64,
    pub pass: bool,
    /// Per-relation deviations, in evaluation order.
    pub items: Vec<(String, f64)>,
}

impl VerifyReport {
    fn from_items(check: &str, items: Vec<(String, f64)>, tol: f64) -> Self {
        let max_deviation = items.iter().map(|(_, d)| *d).fold(0.0, f64::max);
        Self {
            check: check.to_string(),
            max_deviation,
            pass: max_deviation <= tol,
            items,
        }
    }
}

/// Four 4×4 matrices `γ^0 … γ^3`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet {
    pub gamma: [ComplexMatrix; 4],
}

impl GammaSet {
    /// Dirac representation: `γ⁰ = diag(1, −1)`, `γʲ = [[0, σʲ], [−σʲ, 0]]`.
    pub fn dirac() -> Self {
        let id = ComplexMatrix::identity(2);
        let zero = ComplexMatrix::zeros(2, 2);
        let g0 = ComplexMatrix::from_blocks(&[&[&id, &zero], &[&zero, &-&id]]);
        let [s1, s2, s3] = pauli();
        let spatial = |s: &ComplexMatrix| ComplexMatrix::from_blocks(&[&[&zero, s], &[&-s, &zero]]);
        Self {
            gamma: [g0, spatial(&s1), spatial(&s2), spatial(&s3)],
        }
    }

    /// `γ^μ p_μ` (lower-index momentum).
    pub fn slash(&self, p: &FourMomentum) -> ComplexMatrix {
        let lower = p.lower();
        let mut out = ComplexMatrix::zeros(4, 4);
        for (g, &pm) in self.gamma.iter().zip(&lower) {
            out = &out + &g.scale(r(pm));
        }
        out
    }

    /// `U γ^μ U†` for every μ.
    pub fn transformed(&self, u: &ComplexMatrix) -> Self {
        let ud = u.adjoint();
        Self {
            gamma: self.gamma.clone().map(|g| &(u * &g) * &ud),
        }
    }
}

/// Unitary taking the Dirac representation to the Majorana one:
/// `U = (1/√2)[[1, σ²], [σ², −1]]` (Hermitian, `U² = 1`).
pub fn majorana_similarity() -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let s2 = &pauli()[1];
    let u = ComplexMatrix::from_blocks(&[&[&id, s2], &[s2, &-&id]]);
    u.scale(r(std::f64::consts::FRAC_1_SQRT_2))
}

/// Purely imaginary gamma matrices, `γ̃^μ = U γ^μ U†` with
/// [`majorana_similarity`]. Imaginarity is checked, not assumed.
pub fn majorana_set() -> Result<GammaSet> {
    let set = GammaSet::dirac().transformed(&majorana_similarity());
    let worst = set
        .gamma
        .iter()
        .flat_map(|g| g.entries().iter().map(|z| z.re.abs()))
        .fold(0.0, f64::max);
    if worst > 1e-15 {
        return Err(Error::Construction(format!(
            "Majorana similarity left a real part of {worst:.3e}"
        )));
    }
    Ok(set)
}

/// Max deviation of `{γ^μ, γ^ν} − 2g^{μν}·1` for each of the ten pairs `μ ≤ ν`.
pub fn clifford_check(set: &GammaSet, tol: f64) -> VerifyReport {
    let id = ComplexMatrix::identity(4);
    let mut items = Vec::with_capacity(10);
    for mu in 0..4 {
        for nu in mu..4 {
            let anti = set.gamma[mu].anticommutator(&set.gamma[nu]);
            let target = if mu == nu {
                id.scale(r(2.0 * METRIC[mu]))
            } else {
                ComplexMatrix::zeros(4, 4)
            };
            items.push((format!("({mu},{nu})"), anti.max_abs_diff(&target)));
        }
    }
    VerifyReport::from_items("clifford", items, tol)
}

/// Spin-1 generators `S¹, S², S³` (`(Sⁱ)_{jk} = −iε_{ijk}`) and the
/// matrices derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOneSet {
    pub s: [ComplexMatrix; 3],
}

impl SpinOneSet {
    pub fn standard() -> Self {
        let s1 = ComplexMatrix::from_real_rows(&[[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]).scale(I);
        let s2 = ComplexMatrix::from_real_rows(&[[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]).scale(I);
        let s3 = ComplexMatrix::from_real_rows(&[[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]).scale(I);
        Self { s: [s1, s2, s3] }
    }

    /// `M^{(ij)} = (iSʲ)(iSⁱ)` for spatial indices `i, j ∈ {1, 2, 3}`.
    pub fn m(&self, i: usize, j: usize) -> ComplexMatrix {
        &self.s[j - 1].scale(I) * &self.s[i - 1].scale(I)
    }

    /// `S·v`.
    pub fn dot(&self, v: &[f64; 3]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(3, 3);
        for (s, &x) in self.s.iter().zip(v) {
            out = &out + &s.scale(r(x));
        }
        out
    }
}

/// `β¹ = [[0, 1], [1, 0]]` on 3+3 components.
pub fn beta1() -> ComplexMatrix {
    let id = ComplexMatrix::identity(3);
    let zero = ComplexMatrix::zeros(3, 3);
    ComplexMatrix::from_blocks(&[&[&zero, &id], &[&id, &zero]])
}

/// `β³ = [[1, 0], [0, −1]]` on 3+3 components.
pub fn beta3() -> ComplexMatrix {
    let id = ComplexMatrix::identity(3);
    let zero = ComplexMatrix::zeros(3, 3);
    ComplexMatrix::from_blocks(&[&[&id, &zero], &[&zero, &-&id]])
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `[Sⁱ, Sʲ] = iε_{ijk}Sᵏ` for all pairs and the Casimir `Σ(Sⁱ)² = 2·1`.
pub fn su2_check(set: &SpinOneSet, tol: f64) -> VerifyReport {
    let mut items = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let comm = set.s[i].commutator(&set.s[j]);
            let mut target = ComplexMatrix::zeros(3, 3);
            for k in 0..3 {
                target = &target + &set.s[k].scale(I * levi_civita(i, j, k));
            }
            items.push((format!("[S{},S{}]", i + 1, j + 1), comm.max_abs_diff(&target)));
        }
    }
    let casimir = set.s.iter().fold(ComplexMatrix::zeros(3, 3), |acc, s| &acc + &(s * s));
    items.push((
        "casimir".into(),
        casimir.max_abs_diff(&ComplexMatrix::identity(3).scale(r(2.0))),
    ));
    VerifyReport::from_items("su2", items, tol)
}

/// The sixteen 6×6 matrices `γ^{μν}`:
/// `γ^{00} = −[[0, 1], [1, 0]]`, `γ^{0i} = γ^{i0} = [[0, Sⁱ], [−Sⁱ, 0]]`,
/// `γ^{ij} = [[0, B], [B, 0]]` with `B = δ_{ij}·1 + M^{(ij)} + M^{(ji)}`.
pub fn wsg_gamma_tensor(set: &SpinOneSet) -> [[ComplexMatrix; 4]; 4] {
    let id = ComplexMatrix::identity(3);
    let zero = ComplexMatrix::zeros(3, 3);
    let off = |b: &ComplexMatrix, c: &ComplexMatrix| ComplexMatrix::from_blocks(&[&[&zero, b], &[c, &zero]]);
    std::array::from_fn(|mu| {
        std::array::from_fn(|nu| match (mu, nu) {
            (0, 0) => -&off(&id, &id),
            (0, i) | (i, 0) => {
                let s = &set.s[i - 1];
                off(s, &-s)
            }
            (i, j) => {
                let delta = if i == j { id.clone() } else { zero.clone() };
                let b = &(&delta + &set.m(i, j)) + &set.m(j, i);
                off(&b, &b)
            }
        })
    })
}

/// Structural checks of the spin-1 tensor: the stated `γ^{00}`, symmetry
/// `γ^{μν} = γ^{νμ}`, the `M^{(ij)}` definition, and the three-fold rest-frame
/// kernel of the massive equation.
pub fn wsg_check(set: &SpinOneSet, tol: f64) -> VerifyReport {
    let g = wsg_gamma_tensor(set);
    let id = ComplexMatrix::identity(3);
    let zero = ComplexMatrix::zeros(3, 3);
    let expected_00 = -&ComplexMatrix::from_blocks(&[&[&zero, &id], &[&id, &zero]]);
    let mut items = vec![("gamma00".to_string(), g[0][0].max_abs_diff(&expected_00))];
    let mut sym: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            sym = sym.max(g[mu][nu].max_abs_diff(&g[nu][mu]));
        }
    }
    items.push(("symmetry".into(), sym));
    let m12 = &set.s[1].scale(I) * &set.s[0].scale(I);
    items.push(("M12".into(), set.m(1, 2).max_abs_diff(&m12)));
    let rest = FourMomentum::new(1.0, [0.0; 3]);
    let k = planewave_kernel(WaveEquation::Wsg, &rest, 1.0).expect("massive kernel");
    items.push((
        "rest_kernel_dim".into(),
        (kernel_nullity(WaveEquation::Wsg, &k, &rest, 1.0, 1e-9) as f64 - 3.0).abs(),
    ));
    VerifyReport::from_items("wsg", items, tol)
}

/// Contravariant four-momentum `(p⁰, p⃗)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourMomentum {
    pub p0: f64,
    pub p: [f64; 3],
}

impl FourMomentum {
    pub fn new(p0: f64, p: [f64; 3]) -> Self {
        Self { p0, p }
    }

    /// Positive-energy on-shell momentum `p⁰ = √(|p|² + m²)`.
    pub fn on_shell(m: f64, p: [f64; 3]) -> Self {
        let p2: f64 = p.iter().map(|x| x * x).sum();
        Self::new((p2 + m * m).sqrt(), p)
    }

    pub fn spatial_norm(&self) -> f64 {
        self.p.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `p² = (p⁰)² − |p|²`.
    pub fn minkowski_square(&self) -> f64 {
        self.p0 * self.p0 - self.p.iter().map(|x| x * x).sum::<f64>()
    }

    /// Covariant components `p_μ = (p⁰, −p⃗)`.
    pub fn lower(&self) -> [f64; 4] {
        [self.p0, -self.p[0], -self.p[1], -self.p[2]]
    }

    pub fn is_on_shell(&self, m: f64) -> bool {
        (self.minkowski_square() - m * m).abs() < ON_SHELL_TOL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WaveEquation {
    KleinGordon,
    Dirac,
    Weyl,
    Wsg,
    Bbs,
}

impl WaveEquation {
    pub const ALL: [WaveEquation; 5] = [Self::KleinGordon, Self::Dirac, Self::Weyl, Self::Wsg, Self::Bbs];

    pub fn massless_only(self) -> bool {
        matches!(self, Self::Weyl | Self::Bbs)
    }

    /// Power of momentum in the kernel (sets the scale of the null test).
    fn order(self) -> i32 {
        match self {
            Self::KleinGordon | Self::Wsg => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for WaveEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::KleinGordon => "kg",
            Self::Dirac => "dirac",
            Self::Weyl => "weyl",
            Self::Wsg => "wsg",
            Self::Bbs => "bbs",
        })
    }
}

impl FromStr for WaveEquation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kg" | "klein-gordon" => Ok(Self::KleinGordon),
            "dirac" => Ok(Self::Dirac),
            "weyl" => Ok(Self::Weyl),
            "wsg" => Ok(Self::Wsg),
            "bbs" => Ok(Self::Bbs),
            other => Err(Error::Usage(format!("unknown wave equation {other:?}"))),
        }
    }
}

/// Matrix acting on the plane-wave amplitude `w` after substituting
/// `ψ = w·exp(−ip·x)`:
///
/// | equation | kernel |
/// |---|---|
/// | KG | `p² − m²` (1×1) |
/// | Dirac | `γ^μ p_μ + m` |
/// | Weyl | `σ^μ p_μ = p⁰ − σ⃗·p⃗` |
/// | WSG | `p_μ γ^{μν} p_ν − p² + 2m²` |
/// | BB-S | `p⁰ − β³ (S⃗·p⃗)` |
pub fn planewave_kernel(eq: WaveEquation, p: &FourMomentum, m: f64) -> Result<ComplexMatrix> {
    if !m.is_finite() || m < 0.0 {
        return Err(Error::Usage(format!("mass must be finite and >= 0, got {m}")));
    }
    if eq.massless_only() && m > 0.0 {
        return Err(Error::Usage(format!("{eq} describes massless particles; got m = {m}")));
    }
    let lower = p.lower();
    let p2 = p.minkowski_square();
    Ok(match eq {
        WaveEquation::KleinGordon => ComplexMatrix::from_rows(&[[r(p2 - m * m)]]),
        WaveEquation::Dirac => &GammaSet::dirac().slash(p) + &ComplexMatrix::identity(4).scale(r(m)),
        WaveEquation::Weyl => {
            let [s1, s2, s3] = pauli();
            let mut k = ComplexMatrix::identity(2).scale(r(lower[0]));
            for (s, &pl) in [s1, s2, s3].iter().zip(&lower[1..]) {
                k = &k + &s.scale(r(pl));
            }
            k
        }
        WaveEquation::Wsg => {
            let g = wsg_gamma_tensor(&SpinOneSet::standard());
            let mut k = ComplexMatrix::identity(6).scale(r(2.0 * m * m - p2));
            for mu in 0..4 {
                for nu in 0..4 {
                    let c = lower[mu] * lower[nu];
                    if c != 0.0 {
                        k = &k + &g[mu][nu].scale(r(c));
                    }
                }
            }
            k
        }
        WaveEquation::Bbs => {
            let sp = SpinOneSet::standard().dot(&p.p);
            let zero = ComplexMatrix::zeros(3, 3);
            let b3_sp = &beta3() * &ComplexMatrix::from_blocks(&[&[&sp, &zero], &[&zero, &sp]]);
            &ComplexMatrix::identity(6).scale(r(p.p0)) - &b3_sp
        }
    })
}

/// Scale against which kernel singular values are judged: the size of the
/// momentum-dependent terms, so a vanishing scalar kernel still registers.
fn kernel_scale(eq: WaveEquation, p: &FourMomentum, m: f64) -> f64 {
    let linear = p.p0.abs() + p.spatial_norm() + m;
    linear.powi(eq.order())
}

/// Kernel dimension of an already-built plane-wave matrix: singular values
/// `≤ tol·max(σ_max, scale(p, m))`.
pub fn kernel_nullity(eq: WaveEquation, kernel: &ComplexMatrix, p: &FourMomentum, m: f64, tol: f64) -> usize {
    let sv = singular_values(kernel);
    let scale = sv.first().copied().unwrap_or(0.0).max(kernel_scale(eq, p, m));
    sv.iter().filter(|&&s| s <= tol * scale).count()
}

/// Number of independent plane-wave amplitudes at `p`.
pub fn solution_count(eq: WaveEquation, p: &FourMomentum, m: f64, tol: f64) -> Result<usize> {
    let k = planewave_kernel(eq, p, m)?;
    Ok(kernel_nullity(eq, &k, p, m, tol))
}

/// `w = β¹·w*` within `tol` for a six-component amplitude.
pub fn bbs_auxiliary_check(w: &StateVector, tol: f64) -> Result<bool> {
    if w.dim() != 6 {
        return Err(Error::DimensionMismatch {
            expected: 6,
            found: w.dim(),
        });
    }
    Ok(w.max_abs_diff(&beta1().apply(&w.conj())) <= tol)
}

/// Real matrix of an ℝ-linear map `ℂⁿ → ℂᵐ` (possibly involving complex
/// conjugation), in the real coordinates `(Re z, Im z)`.
pub fn real_form<F>(n_in: usize, map: F) -> ComplexMatrix
where
    F: Fn(&StateVector) -> StateVector,
{
    let probe = map(&StateVector::zeros(n_in));
    let n_out = probe.dim();
    let mut out = ComplexMatrix::zeros(2 * n_out, 2 * n_in);
    for col in 0..2 * n_in {
        let mut amps = vec![ZERO; n_in];
        amps[col % n_in] = if col < n_in { ONE } else { I };
        let image = map(&StateVector::new(amps));
        for row in 0..n_out {
            out[(row, col)] = r(image[row].re);
            out[(n_out + row, col)] = r(image[row].im);
        }
    }
    out
}

/// Dimension over ℝ of the kernel of a real-form matrix.
fn real_kernel_dim(m: &ComplexMatrix, tol: f64) -> usize {
    nullspace_basis(m, tol).cols()
}

#[derive(Clone, Debug, Serialize)]
pub struct MajoranaReport {
    pub imaginary: bool,
    pub max_real_part: f64,
    pub clifford: VerifyReport,
    /// Real dimension of plane-wave solutions `ψ = w e^{−ipx} + v e^{ipx}`.
    pub real_solution_dim: usize,
    /// `4 ×` the complex kernel dimension of `γ̃^μ p_μ + m`.
    pub expected_dim: usize,
    pub pass: bool,
}

/// Checks a Majorana gamma set: imaginary entries, Clifford relations, and
/// the solution count of `iγ̃^μ∂_μψ_c + mψ = 0` with `ψ_c = iψ*`.
///
/// With `ψ = w e^{−ipx} + v e^{ipx}` the equation splits into
/// `i p̸ v* + m w = 0` and `−i p̸ w* + m v = 0`, an ℝ-linear system in
/// `(w, v) ∈ ℂ⁸` solved in real coordinates. Its real solution dimension
/// equals four times the complex kernel dimension of `p̸ + m` (eight on
/// shell, zero off shell, for any `m ≥ 0`).
pub fn majorana_reality_check(set: &GammaSet, p: &FourMomentum, m: f64, tol: f64) -> MajoranaReport {
    let max_real_part = set
        .gamma
        .iter()
        .flat_map(|g| g.entries().iter().map(|z| z.re.abs()))
        .fold(0.0, f64::max);
    let clifford = clifford_check(set, tol);
    let slash = set.slash(p);
    let map = |x: &StateVector| {
        let w = StateVector::new(x.amplitudes()[..4].to_vec());
        let v = StateVector::new(x.amplitudes()[4..].to_vec());
        let first = slash.apply(&v.conj()).scale(I).add(&w.scale(r(m)));
        let second = slash.apply(&w.conj()).scale(-I).add(&v.scale(r(m)));
        StateVector::new([first.amplitudes(), second.amplitudes()].concat())
    };
    let real = real_form(8, map);
    let real_solution_dim = real_kernel_dim(&real, tol);
    let dirac_like = &slash + &ComplexMatrix::identity(4).scale(r(m));
    let expected_dim = 4 * kernel_nullity(WaveEquation::Dirac, &dirac_like, p, m, tol);
    let imaginary = max_real_part == 0.0;
    MajoranaReport {
        imaginary,
        max_real_part,
        pass: imaginary && clifford.pass && real_solution_dim == expected_dim,
        clifford,
        real_solution_dim,
        expected_dim,
    }
}

/// Solutions of the BB-S equation at one frequency.
#[derive(Clone, Debug, Serialize)]
pub struct BbsSolutionSector {
    pub p0: f64,
    /// Complex kernel dimension of `p⁰ − β³(S·p)`.
    pub kernel_dim: usize,
    /// Spin projection `S·p̂` of the upper (`Ψ₊`) block of the kernel.
    pub helicity: i32,
    /// Real dimension of kernel vectors obeying `ψ = β¹ψ*`.
    pub auxiliary_dim: usize,
    /// Real dimension of those that are also transverse (`p·Ψ± = 0`).
    pub transverse_dim: usize,
}

/// Enumerates the BB-S solution sectors at `p⁰ ∈ {−|p|, 0, |p|}`.
pub fn bbs_solution_sectors(p: &[f64; 3], tol: f64) -> Result<Vec<BbsSolutionSector>> {
    let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Usage("BB-S sectors need a nonzero three-momentum".into()));
    }
    let b1 = beta1();
    let mut out = Vec::new();
    for helicity in [-1, 0, 1] {
        let fm = FourMomentum::new(helicity as f64 * norm, *p);
        let kernel = planewave_kernel(WaveEquation::Bbs, &fm, 0.0)?;
        let kernel_dim = kernel_nullity(WaveEquation::Bbs, &kernel, &fm, 0.0, tol);
        // stack the kernel equation and the auxiliary condition
        let stacked = |w: &StateVector, transverse: bool| {
            let mut parts = vec![kernel.apply(w), w.sub(&b1.apply(&w.conj()))];
            if transverse {
                let dot = |off: usize| -> C64 { (0..3).map(|i| w[off + i] * p[i]).sum() };
                parts.push(StateVector::new(vec![dot(0), dot(3)]));
            }
            StateVector::new(parts.iter().flat_map(|v| v.amplitudes().to_vec()).collect())
        };
        let auxiliary_dim = real_kernel_dim(&real_form(6, |w| stacked(w, false)), tol);
        let transverse_dim = real_kernel_dim(&real_form(6, |w| stacked(w, true)), tol);
        out.push(BbsSolutionSector {
            p0: fm.p0,
            kernel_dim,
            helicity,
            auxiliary_dim,
            transverse_dim,
        });
    }
    Ok(out)
}

/// One line of a dispersion scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DispersionRow {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub m: f64,
    pub nullspace_dim: usize,
}

/// Off-shell shift applied to `p⁰` for the second row of each draw.
pub const OFF_SHELL_SHIFT: f64 = 0.1;

/// Draw `i` of a scan: mass uniform in `(0, 10]` (zero for massless
/// equations) and momentum components uniform in `[−10, 10]`.
pub fn scan_draw(eq: WaveEquation, seed: u64, index: u64) -> (f64, [f64; 3]) {
    let mut g = rng::stream(seed, index);
    let m = if eq.massless_only() {
        0.0
    } else {
        10.0 * (1.0 - g.gen::<f64>())
    };
    let p = [
        g.gen_range(-10.0..=10.0),
        g.gen_range(-10.0..=10.0),
        g.gen_range(-10.0..=10.0),
    ];
    (m, p)
}

/// For each of `n` seeded draws, the kernel dimension on shell and with
/// `p⁰` shifted by [`OFF_SHELL_SHIFT`]; two rows per draw, in draw order.
pub fn dispersion_scan(eq: WaveEquation, n: usize, seed: u64, tol: f64) -> Result<Vec<DispersionRow>> {
    let rows: Result<Vec<[DispersionRow; 2]>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let (m, p) = scan_draw(eq, seed, i);
            let on = FourMomentum::on_shell(m, p);
            let off = FourMomentum::new(on.p0 + OFF_SHELL_SHIFT, p);
            let row = |fm: FourMomentum| -> Result<DispersionRow> {
                Ok(DispersionRow {
                    p0: fm.p0,
                    p1: fm.p[0],
                    p2: fm.p[1],
                    p3: fm.p[2],
                    m,
                    nullspace_dim: solution_count(eq, &fm, m, tol)?,
                })
            };
            Ok([row(on)?, row(off)?])
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::determinant;

    #[test]
    fn dirac_set_is_exactly_clifford() {
        let rep = clifford_check(&GammaSet::dirac(), 0.0);
        assert!(rep.pass);
        assert_eq!(rep.items.len(), 10);
        assert_eq!(rep.max_deviation, 0.0);
    }

    #[test]
    fn gamma0_with_flipped_square_fails_only_the_00_pair() {
        // iγ⁰ squares to −1 while still anticommuting with every γʲ
        let mut set = GammaSet::dirac();
        set.gamma[0] = set.gamma[0].scale(I);
        let rep = clifford_check(&set, 1e-12);
        assert!(!rep.pass);
        for (name, dev) in &rep.items {
            if name == "(0,0)" {
                assert_eq!(*dev, 4.0);
            } else {
                assert_eq!(*dev, 0.0, "{name}");
            }
        }
    }

    #[test]
    fn majorana_set_is_imaginary_clifford() {
        let set = majorana_set().unwrap();
        assert!(clifford_check(&set, 1e-15).pass);
        for g in &set.gamma {
            assert!(g.entries().iter().all(|z| z.re == 0.0));
        }
    }

    #[test]
    fn spin_one_algebra() {
        let set = SpinOneSet::standard();
        let rep = su2_check(&set, 0.0);
        assert!(rep.pass, "{rep:?}");
        let mut broken = set.clone();
        broken.s[2] = ComplexMatrix::zeros(3, 3);
        assert!(!su2_check(&broken, 1e-12).pass);
    }

    #[test]
    fn wsg_structure() {
        let set = SpinOneSet::standard();
        let g = wsg_gamma_tensor(&set);
        let id = ComplexMatrix::identity(3);
        let zero = ComplexMatrix::zeros(3, 3);
        assert_eq!(g[0][0], -&ComplexMatrix::from_blocks(&[&[&zero, &id], &[&id, &zero]]));
        assert_eq!(g[1][2], g[2][1]);
        assert!(wsg_check(&set, 0.0).pass);
        // M^(12) = (iS²)(iS¹) = −S²S¹; entry (0,1) of S²S¹ is i·i·(1·(−1))... computed directly:
        // S²S¹ = −[[0,0,1],[0,0,0],[−1,0,0]]·[[0,0,0],[0,0,−1],[0,1,0]] = [[0,−1,0],[0,0,0],[0,0,0]]
        let m12 = set.m(1, 2);
        let expected = ComplexMatrix::from_real_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert_eq!(m12, expected);
    }

    #[test]
    fn kg_vanishes_on_shell() {
        let p = FourMomentum::on_shell(2.0, [1.0, -3.0, 0.5]);
        let k = planewave_kernel(WaveEquation::KleinGordon, &p, 2.0).unwrap();
        assert!(k[(0, 0)].norm() < 1e-12);
        assert_eq!(solution_count(WaveEquation::KleinGordon, &p, 2.0, 1e-9).unwrap(), 1);
    }

    #[test]
    fn massless_equations_reject_mass() {
        let p = FourMomentum::new(1.0, [0.0, 0.0, 1.0]);
        assert!(matches!(
            planewave_kernel(WaveEquation::Weyl, &p, 1.0),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            planewave_kernel(WaveEquation::Bbs, &p, 0.5),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            planewave_kernel(WaveEquation::Dirac, &p, -1.0),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn dirac_counts() {
        let p = FourMomentum::on_shell(3.0, [1.0, 2.0, -2.0]);
        assert_eq!(solution_count(WaveEquation::Dirac, &p, 3.0, 1e-9).unwrap(), 2);
        let off = FourMomentum::new(p.p0 + 0.1, p.p);
        assert_eq!(solution_count(WaveEquation::Dirac, &off, 3.0, 1e-9).unwrap(), 0);
        let neg = FourMomentum::new(-p.p0, p.p);
        assert_eq!(solution_count(WaveEquation::Dirac, &neg, 3.0, 1e-9).unwrap(), 2);
    }

    #[test]
    fn dirac_determinant_is_squared_dispersion() {
        let p = FourMomentum::new(1.7, [0.3, -0.8, 1.1]);
        let m = 0.9;
        let k = planewave_kernel(WaveEquation::Dirac, &p, m).unwrap();
        let d = determinant(&k);
        let expected = (p.minkowski_square() - m * m).powi(2);
        assert!((d.re - expected).abs() < 1e-12 && d.im.abs() < 1e-12);
    }

    #[test]
    fn weyl_and_wsg_counts() {
        let p = FourMomentum::on_shell(0.0, [0.6, 0.0, 0.8]);
        assert_eq!(solution_count(WaveEquation::Weyl, &p, 0.0, 1e-9).unwrap(), 1);
        let pw = FourMomentum::on_shell(1.5, [2.0, -1.0, 0.25]);
        assert_eq!(solution_count(WaveEquation::Wsg, &pw, 1.5, 1e-9).unwrap(), 3);
        let off = FourMomentum::new(pw.p0 + 0.1, pw.p);
        assert_eq!(solution_count(WaveEquation::Wsg, &off, 1.5, 1e-9).unwrap(), 0);
    }

    #[test]
    fn bbs_sectors() {
        let sectors = bbs_solution_sectors(&[1.0, 2.0, 2.0], 1e-9).unwrap();
        assert_eq!(sectors.len(), 3);
        for s in &sectors {
            assert_eq!(s.kernel_dim, 2);
            assert_eq!(s.auxiliary_dim, 2);
            let expected_transverse = if s.helicity == 0 { 0 } else { 2 };
            assert_eq!(s.transverse_dim, expected_transverse, "{s:?}");
        }
        let p = FourMomentum::new(1.3, [1.0, 2.0, 2.0]);
        assert_eq!(solution_count(WaveEquation::Bbs, &p, 0.0, 1e-9).unwrap(), 0);
    }

    #[test]
    fn auxiliary_condition() {
        let v = [C64::new(0.3, -1.2), C64::new(2.0, 0.5), C64::new(-0.7, 0.1)];
        let stacked = |sign: f64| {
            let lower: Vec<C64> = v.iter().map(|z| z.conj() * sign).collect();
            StateVector::new([v.to_vec(), lower].concat())
        };
        assert!(bbs_auxiliary_check(&stacked(1.0), 1e-12).unwrap());
        assert!(!bbs_auxiliary_check(&stacked(-1.0), 1e-12).unwrap());
        let real = StateVector::new([1.0, -2.0, 0.5, 1.0, -2.0, 0.5].iter().map(|&x| r(x)).collect());
        assert!(bbs_auxiliary_check(&real, 1e-12).unwrap());
        assert!(bbs_auxiliary_check(&StateVector::zeros(4), 1e-12).is_err());
    }

    #[test]
    fn majorana_solution_space() {
        let set = majorana_set().unwrap();
        let p = FourMomentum::on_shell(1.2, [0.4, -0.3, 0.9]);
        let rep = majorana_reality_check(&set, &p, 1.2, 1e-9);
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.real_solution_dim, 8);
        let off = FourMomentum::new(p.p0 + 0.1, p.p);
        let rep_off = majorana_reality_check(&set, &off, 1.2, 1e-9);
        assert_eq!(rep_off.real_solution_dim, 0);
        assert!(rep_off.pass);
        let massless = FourMomentum::on_shell(0.0, [0.0, 0.6, 0.8]);
        let rep0 = majorana_reality_check(&set, &massless, 0.0, 1e-9);
        let dirac_massless = solution_count(WaveEquation::Dirac, &massless, 0.0, 1e-9).unwrap();
        assert_eq!(rep0.real_solution_dim, 4 * dirac_massless);
    }

    #[test]
    fn scan_is_seed_deterministic() {
        let a = dispersion_scan(WaveEquation::Dirac, 8, 42, 1e-9).unwrap();
        let b = dispersion_scan(WaveEquation::Dirac, 8, 42, 1e-9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
        for pair in a.chunks(2) {
            assert_eq!(pair[0].nullspace_dim, 2);
            assert_eq!(pair[1].nullspace_dim, 0);
        }
    }
}
