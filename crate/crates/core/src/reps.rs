//! Plane-wave sub-bases and the representation `{1, C, PT, CPT}` on them.
//!
//! A sub-basis collects the states `|±u, ±s, ±p⟩` at one momentum magnitude.
//! Labels are kept in canonical order (conjugation flag `+` before `−`, then
//! spin projection descending, then momentum sign `+` before `−`), which
//! makes CPT anti-diagonal for every spin.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{phase, ComplexMatrix, StateVector, C64, ONE};

/// Internal quantum numbers and spin of a particle species.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeciesLabel {
    pub charge: i64,
    #[serde(with = "rational_text")]
    pub baryon: Rational64,
    pub lepton: i64,
    pub spin_times_two: u32,
    pub massive: bool,
}

/// `u = Q + (B − L)`.
pub fn total_internal_quantum_number(charge: i64, baryon: Rational64, lepton: i64) -> Rational64 {
    Rational64::from_integer(charge) + baryon - Rational64::from_integer(lepton)
}

impl SpeciesLabel {
    pub fn new(charge: i64, baryon: Rational64, lepton: i64, spin_times_two: u32, massive: bool) -> Self {
        Self {
            charge,
            baryon,
            lepton,
            spin_times_two,
            massive,
        }
    }

    /// A representative species with the given total internal number: the
    /// number is carried as charge when integral and as baryon number
    /// otherwise. Only the sign of `u` affects the sub-basis.
    pub fn with_u(u: Rational64, spin_times_two: u32, massive: bool) -> Self {
        if u.is_integer() {
            Self::new(u.to_integer(), Rational64::zero(), 0, spin_times_two, massive)
        } else {
            Self::new(0, u, 0, spin_times_two, massive)
        }
    }

    /// Named particles used by the CLI and the examples.
    pub fn preset(name: &str) -> Option<Self> {
        let int = Rational64::from_integer;
        let s = match name.to_ascii_lowercase().as_str() {
            "electron" => Self::new(-1, int(0), 1, 1, true),
            "positron" => Self::new(1, int(0), -1, 1, true),
            "proton" => Self::new(1, int(1), 0, 1, true),
            "neutron" => Self::new(0, int(1), 0, 1, true),
            "neutrino" => Self::new(0, int(0), 1, 1, false),
            "up-quark" => Self::new(0, Rational64::new(1, 3), 0, 1, true),
            "pion0" => Self::new(0, int(0), 0, 0, true),
            "pion+" => Self::new(1, int(0), 0, 0, true),
            "w+" => Self::new(1, int(0), 0, 2, true),
            "z0" => Self::new(0, int(0), 0, 2, true),
            "photon" => Self::new(0, int(0), 0, 2, false),
            _ => return None,
        };
        Some(s)
    }

    pub fn u(&self) -> Rational64 {
        total_internal_quantum_number(self.charge, self.baryon, self.lepton)
    }
}

/// One state `|κu, m, πp⟩` of a sub-basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    /// `+1` for `+u` (or the first helicity family when `u = 0`), `−1` otherwise.
    pub kappa: i8,
    /// Twice the spin projection.
    #[serde(rename = "m2")]
    pub m_times_two: i32,
    /// Sign of the momentum along the forward axis.
    pub pi: i8,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = if self.kappa > 0 { "u" } else { "-u" };
        let m = if self.m_times_two % 2 == 0 {
            format!("{}", self.m_times_two / 2)
        } else {
            format!("{}/2", self.m_times_two)
        };
        let p = if self.pi > 0 { "p" } else { "-p" };
        write!(f, "|{u},{m},{p}>")
    }
}

/// Labels spanning the fixed-|p| state space of one species.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubBasis {
    pub species: SpeciesLabel,
    pub p_mag: f64,
    pub labels: Vec<BasisLabel>,
    /// Set when identical labels were merged (`u = 0` spinless, or `p = 0`).
    pub degenerate: bool,
    #[serde(default)]
    pub photon: bool,
}

impl SubBasis {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &BasisLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn kappa_collapsed(&self) -> bool {
        self.labels.iter().all(|l| l.kappa > 0)
    }

    fn pi_collapsed(&self) -> bool {
        self.labels.iter().all(|l| l.pi > 0)
    }

    /// Representative of `label` inside this sub-basis, merging the flags
    /// that the sub-basis does not distinguish.
    fn canonical(&self, mut label: BasisLabel) -> BasisLabel {
        if self.kappa_collapsed() {
            label.kappa = 1;
        }
        if self.pi_collapsed() {
            label.pi = 1;
        }
        label
    }
}

/// Builds the canonical sub-basis of `species` at momentum magnitude `p_mag`.
///
/// `photon_mode` drops the four zero-helicity labels of a massless spin-1
/// particle.
pub fn build_subbasis(species: &SpeciesLabel, p_mag: f64, photon_mode: bool) -> Result<SubBasis> {
    if !p_mag.is_finite() || p_mag < 0.0 {
        return Err(Error::Usage(format!(
            "momentum magnitude must be finite and >= 0, got {p_mag}"
        )));
    }
    if photon_mode && (species.spin_times_two != 2 || species.massive) {
        return Err(Error::Usage("photon mode requires a massless spin-1 species".into()));
    }
    let s2 = species.spin_times_two as i32;
    let kappas: &[i8] = if species.u().is_zero() && s2 == 0 {
        &[1]
    } else {
        &[1, -1]
    };
    let pis: &[i8] = if p_mag == 0.0 { &[1] } else { &[1, -1] };
    let ms: Vec<i32> = (0..=s2)
        .map(|k| s2 - 2 * k)
        .filter(|&m| !(photon_mode && m == 0))
        .collect();

    let mut labels = Vec::with_capacity(kappas.len() * ms.len() * pis.len());
    for &kappa in kappas {
        for &m_times_two in &ms {
            for &pi in pis {
                labels.push(BasisLabel { kappa, m_times_two, pi });
            }
        }
    }
    Ok(SubBasis {
        species: species.clone(),
        p_mag,
        labels,
        degenerate: kappas.len() == 1 || pis.len() == 1,
        photon: photon_mode,
    })
}

/// Elements of the Klein four-group `{1, C, PT, CPT}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Transformation {
    #[serde(rename = "1")]
    Identity,
    C,
    PT,
    CPT,
}

impl Transformation {
    pub const ALL: [Transformation; 4] = [Self::Identity, Self::C, Self::PT, Self::CPT];

    fn bits(self) -> u8 {
        match self {
            Self::Identity => 0b00,
            Self::C => 0b01,
            Self::PT => 0b10,
            Self::CPT => 0b11,
        }
    }

    fn from_bits(b: u8) -> Self {
        match b & 0b11 {
            0b00 => Self::Identity,
            0b01 => Self::C,
            0b10 => Self::PT,
            _ => Self::CPT,
        }
    }

    /// Group law of `ℤ₂ × ℤ₂`.
    pub fn compose(self, other: Self) -> Self {
        Self::from_bits(self.bits() ^ other.bits())
    }

    /// Image of a label: C flips `kappa`; PT flips `m` and `pi`.
    pub fn act(self, label: BasisLabel) -> BasisLabel {
        let mut out = label;
        if self.bits() & 0b01 != 0 {
            out.kappa = -out.kappa;
        }
        if self.bits() & 0b10 != 0 {
            out.m_times_two = -out.m_times_two;
            out.pi = -out.pi;
        }
        out
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Identity => "1",
            Self::C => "C",
            Self::PT => "PT",
            Self::CPT => "CPT",
        }
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Transformation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "1" | "I" | "ID" | "IDENTITY" => Ok(Self::Identity),
            "C" => Ok(Self::C),
            "PT" => Ok(Self::PT),
            "CPT" => Ok(Self::CPT),
            other => Err(Error::Usage(format!("unknown transformation {other:?}"))),
        }
    }
}

/// Phases attached to C and PT; the CPT phase is their sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    pub theta_c: f64,
    pub theta_pt: f64,
}

impl PhaseConfig {
    pub fn new(theta_c: f64, theta_pt: f64) -> Self {
        Self { theta_c, theta_pt }
    }

    pub fn theta_cpt(&self) -> f64 {
        self.theta_c + self.theta_pt
    }

    pub fn theta(&self, g: Transformation) -> f64 {
        match g {
            Transformation::Identity => 0.0,
            Transformation::C => self.theta_c,
            Transformation::PT => self.theta_pt,
            Transformation::CPT => self.theta_cpt(),
        }
    }
}

/// Unitary matrix of `g` on `subbasis`: `U|b⟩ = e^{iθ_g}|g·b⟩`.
pub fn build_operator(g: Transformation, subbasis: &SubBasis, phases: &PhaseConfig) -> Result<ComplexMatrix> {
    let n = subbasis.dim();
    let factor = if g == Transformation::Identity {
        ONE
    } else {
        phase(phases.theta(g))
    };
    let mut u = ComplexMatrix::zeros(n, n);
    for (col, &label) in subbasis.labels.iter().enumerate() {
        let image = subbasis.canonical(g.act(label));
        let row = subbasis
            .index_of(&image)
            .ok_or_else(|| Error::Construction(format!("{g} maps {label} outside the sub-basis")))?;
        u[(row, col)] = factor;
    }
    Ok(u)
}

/// The four operators `{1, C, PT, CPT}` on one sub-basis.
#[derive(Clone, Debug)]
pub struct RepresentationSet {
    pub subbasis: SubBasis,
    pub phases: PhaseConfig,
    pub op_identity: ComplexMatrix,
    pub op_c: ComplexMatrix,
    pub op_pt: ComplexMatrix,
    pub op_cpt: ComplexMatrix,
}

impl RepresentationSet {
    pub fn build(subbasis: SubBasis, phases: PhaseConfig) -> Result<Self> {
        Ok(Self {
            op_identity: ComplexMatrix::identity(subbasis.dim()),
            op_c: build_operator(Transformation::C, &subbasis, &phases)?,
            op_pt: build_operator(Transformation::PT, &subbasis, &phases)?,
            op_cpt: build_operator(Transformation::CPT, &subbasis, &phases)?,
            subbasis,
            phases,
        })
    }

    pub fn operator(&self, g: Transformation) -> &ComplexMatrix {
        match g {
            Transformation::Identity => &self.op_identity,
            Transformation::C => &self.op_c,
            Transformation::PT => &self.op_pt,
            Transformation::CPT => &self.op_cpt,
        }
    }

    pub fn elements(&self) -> Vec<(Transformation, &ComplexMatrix)> {
        Transformation::ALL.iter().map(|&g| (g, self.operator(g))).collect()
    }
}

/// CPT on a generic-spin sub-basis (massive, `u ≠ 0`).
pub fn build_cpt_generic(spin_times_two: u32, p_mag: f64) -> Result<(SubBasis, ComplexMatrix)> {
    let species = SpeciesLabel::with_u(Rational64::from_integer(1), spin_times_two, true);
    let basis = build_subbasis(&species, p_mag, false)?;
    let cpt = build_operator(Transformation::CPT, &basis, &PhaseConfig::default())?;
    Ok((basis, cpt))
}

/// One entry `g·h = phase · k` of a closure table.
#[derive(Clone, Debug, Serialize)]
pub struct ProductEntry {
    pub left: Transformation,
    pub right: Transformation,
    /// `None` when the product matched no member of the set.
    pub result: Option<Transformation>,
    /// Phase of the product relative to `result`, in `[0, 2π)`.
    pub phase: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub elements: Vec<Transformation>,
    pub table: Vec<ProductEntry>,
    pub closed: bool,
    pub abelian: bool,
    /// Some product picks up a phase other than 1.
    pub projective: bool,
    /// Every element squares to a multiple of the identity.
    pub involutions: bool,
    /// Every element squares to the identity exactly (no rounding).
    pub squares_exactly_identity: bool,
    pub failures: Vec<(Transformation, Transformation)>,
}

fn wrap_angle(theta: f64, tol: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let w = theta.rem_euclid(tau);
    if w > tau - tol || w < tol {
        0.0
    } else {
        w
    }
}

/// Phase `ω` with `a = ω b`, if one exists within `tol` and has unit modulus.
fn proportionality(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Option<C64> {
    let (idx, _) = b
        .entries()
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    let pivot = b.entries()[idx];
    if pivot.norm() <= tol {
        return None;
    }
    let omega = a.entries()[idx] / pivot;
    if (omega.norm() - 1.0).abs() > tol {
        return None;
    }
    (a.max_abs_diff(&b.scale(omega)) <= tol).then_some(omega)
}

/// Closure, commutativity and projective phases of a set of operators
/// labelled by group elements.
pub fn verify_closure(elements: &[(Transformation, &ComplexMatrix)], tol: f64) -> GroupReport {
    let mut table = Vec::new();
    let mut failures = Vec::new();
    let mut abelian = true;
    let mut projective = false;
    let mut involutions = true;
    let mut exact = true;

    for &(g, ug) in elements {
        for &(h, uh) in elements {
            let prod = ug * uh;
            if g <= h && prod.max_abs_diff(&(uh * ug)) > tol {
                abelian = false;
            }
            // try the element the group law predicts first
            let expected = g.compose(h);
            let mut candidates: Vec<&(Transformation, &ComplexMatrix)> =
                elements.iter().filter(|(k, _)| *k == expected).collect();
            candidates.extend(elements.iter().filter(|(k, _)| *k != expected));
            let found = candidates
                .iter()
                .find_map(|(k, uk)| proportionality(&prod, uk, tol).map(|w| (*k, w)));
            match found {
                Some((k, w)) => {
                    let ph = wrap_angle(w.arg(), tol);
                    if ph != 0.0 {
                        projective = true;
                    }
                    table.push(ProductEntry {
                        left: g,
                        right: h,
                        result: Some(k),
                        phase: ph,
                    });
                }
                None => {
                    failures.push((g, h));
                    table.push(ProductEntry {
                        left: g,
                        right: h,
                        result: None,
                        phase: 0.0,
                    });
                }
            }
            if g == h {
                let id = ComplexMatrix::identity(ug.rows());
                if proportionality(&prod, &id, tol).is_none() {
                    involutions = false;
                }
                if prod != id {
                    exact = false;
                }
            }
        }
    }
    GroupReport {
        elements: elements.iter().map(|(g, _)| *g).collect(),
        table,
        closed: failures.is_empty(),
        abelian,
        projective,
        involutions,
        squares_exactly_identity: exact,
        failures,
    }
}

pub fn verify_group(rep: &RepresentationSet, tol: f64) -> GroupReport {
    verify_closure(&rep.elements(), tol)
}

/// CPT eigenvalue sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sector {
    pub fn eigenvalue(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }

    pub fn sign(self) -> C64 {
        C64::new(self.eigenvalue(), 0.0)
    }
}

impl FromStr for Sector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "+1" => Ok(Self::Plus),
            "-" | "minus" | "-1" => Ok(Self::Minus),
            other => Err(Error::Usage(format!("unknown sector {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CptEigenstate {
    pub sector: Sector,
    /// Canonical indices of the basis pair `(b, CPT b)`; equal for a fixed point.
    pub pair: (usize, usize),
    pub vector: StateVector,
}

/// Eigenvectors `(|b⟩ ± CPT|b⟩)/√2` of a phase-stripped CPT operator, one
/// pair per canonical orbit `{b, CPT b}` in index order, `+` before `−`.
pub fn cpt_eigenbasis(u_cpt: &ComplexMatrix, subbasis: &SubBasis) -> Result<Vec<CptEigenstate>> {
    let n = subbasis.dim();
    if u_cpt.rows() != n || u_cpt.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u_cpt.rows(),
        });
    }
    let sq = u_cpt * u_cpt;
    let deviation = sq.max_abs_diff(&ComplexMatrix::identity(n));
    if deviation > 1e-12 {
        return Err(Error::PhaseNotStripped { deviation });
    }
    // monomial structure: one nonzero per column
    let mut image = Vec::with_capacity(n);
    for col in 0..n {
        let nonzero: Vec<usize> = (0..n).filter(|&row| u_cpt[(row, col)].norm() > 1e-12).collect();
        if nonzero.len() != 1 {
            return Err(Error::Contract(format!(
                "CPT column {col} is not a phased basis permutation"
            )));
        }
        image.push(nonzero[0]);
    }

    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut out = Vec::with_capacity(n);
    for b in 0..n {
        let partner = image[b];
        if partner < b {
            continue;
        }
        if partner == b {
            let lambda = u_cpt[(b, b)];
            let sector = if lambda.re > 0.0 { Sector::Plus } else { Sector::Minus };
            out.push(CptEigenstate {
                sector,
                pair: (b, b),
                vector: StateVector::basis(n, b),
            });
            continue;
        }
        let eb = StateVector::basis(n, b);
        let ub = u_cpt.apply(&eb);
        for sector in [Sector::Plus, Sector::Minus] {
            out.push(CptEigenstate {
                sector,
                pair: (b, partner),
                vector: eb.add(&ub.scale(sector.sign())).scale(h),
            });
        }
    }
    Ok(out)
}

/// Parses spin given as `0`, `1/2`, `0.5`, `1`, `3/2`, ... into `2s`.
pub fn parse_spin(text: &str) -> Result<u32> {
    let bad = || Error::Usage(format!("invalid spin {text:?}"));
    let r = parse_rational(text).map_err(|_| bad())?;
    let twice = r * Rational64::from_integer(2);
    if !twice.is_integer() || twice.is_negative() {
        return Err(bad());
    }
    u32::try_from(twice.to_integer()).map_err(|_| bad())
}

/// Parses `n`, `n/d` or a terminating decimal such as `0.5`.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let t = text.trim();
    let bad = || Error::Usage(format!("invalid rational number {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(n, d));
    }
    if let Ok(n) = t.parse::<i64>() {
        return Ok(Rational64::from_integer(n));
    }
    let x: f64 = t.parse().map_err(|_| bad())?;
    Rational64::approximate_float(x).ok_or_else(bad)
}

mod rational_text {
    use num_rational::Rational64;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        if r.is_integer() {
            s.serialize_i64(r.to_integer())
        } else {
            s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Text {
        Int(i64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        match Text::deserialize(d)? {
            Text::Int(n) => Ok(Rational64::from_integer(n)),
            Text::Str(s) => super::parse_rational(&s).map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn massive(spin2: u32, u: i64) -> SpeciesLabel {
        SpeciesLabel::with_u(Rational64::from_integer(u), spin2, true)
    }

    fn anti_diagonal(n: usize, value: C64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, n - 1 - i)] = value;
        }
        m
    }

    #[test]
    fn internal_quantum_numbers() {
        let int = Rational64::from_integer;
        assert_eq!(total_internal_quantum_number(0, int(0), 0), int(0));
        assert_eq!(total_internal_quantum_number(-1, int(0), 1), int(-2));
        assert_eq!(total_internal_quantum_number(1, int(1), 0), int(2));
        assert_eq!(SpeciesLabel::preset("up-quark").unwrap().u(), Rational64::new(1, 3));
    }

    #[test]
    fn subbasis_dimensions() {
        assert_eq!(build_subbasis(&massive(0, 1), 1.0, false).unwrap().dim(), 4);
        assert_eq!(build_subbasis(&massive(1, -2), 1.0, false).unwrap().dim(), 8);
        assert_eq!(build_subbasis(&massive(2, 1), 1.0, false).unwrap().dim(), 12);
        let photon = SpeciesLabel::preset("photon").unwrap();
        let b = build_subbasis(&photon, 1.0, true).unwrap();
        assert_eq!(b.dim(), 8);
        assert!(b.labels.iter().all(|l| l.m_times_two != 0));
    }

    #[test]
    fn degenerate_subbases() {
        let neutral = massive(0, 0);
        let b = build_subbasis(&neutral, 1.0, false).unwrap();
        assert_eq!(b.dim(), 2);
        assert!(b.degenerate);
        let b0 = build_subbasis(&neutral, 0.0, false).unwrap();
        assert_eq!(b0.dim(), 1);
        assert!(b0.degenerate);
        assert!(!build_subbasis(&massive(0, 1), 1.0, false).unwrap().degenerate);
    }

    #[test]
    fn canonical_order_spin_half() {
        let b = build_subbasis(&massive(1, 1), 2.0, false).unwrap();
        let expected = [
            (1, 1, 1),
            (1, 1, -1),
            (1, -1, 1),
            (1, -1, -1),
            (-1, 1, 1),
            (-1, 1, -1),
            (-1, -1, 1),
            (-1, -1, -1),
        ];
        for (l, &(k, m, p)) in b.labels.iter().zip(&expected) {
            assert_eq!((l.kappa, l.m_times_two, l.pi), (k, m, p));
        }
    }

    #[test]
    fn subbasis_usage_errors() {
        assert!(matches!(
            build_subbasis(&massive(0, 1), -1.0, false),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            build_subbasis(&massive(2, 0), 1.0, true),
            Err(Error::Usage(_))
        ));
        let massless_scalar = SpeciesLabel::with_u(Rational64::from_integer(0), 0, false);
        assert!(matches!(
            build_subbasis(&massless_scalar, 1.0, true),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn cpt_is_anti_diagonal_for_spin_zero_and_one() {
        for spin2 in [0, 2] {
            let b = build_subbasis(&massive(spin2, 1), 1.0, false).unwrap();
            let cpt = build_operator(Transformation::CPT, &b, &PhaseConfig::default()).unwrap();
            assert_eq!(cpt, anti_diagonal(b.dim(), ONE));
        }
    }

    #[test]
    fn cpt_phase_scales_spin_half() {
        let b = build_subbasis(&massive(1, 1), 1.0, false).unwrap();
        let phases = PhaseConfig::new(PI / 3.0, 0.0);
        let cpt = build_operator(Transformation::CPT, &b, &phases).unwrap();
        assert!(cpt.max_abs_diff(&anti_diagonal(8, phase(PI / 3.0))) < 1e-15);
    }

    #[test]
    fn photon_cpt_is_anti_diagonal() {
        let b = build_subbasis(&SpeciesLabel::preset("photon").unwrap(), 1.0, true).unwrap();
        let cpt = build_operator(Transformation::CPT, &b, &PhaseConfig::default()).unwrap();
        assert_eq!(cpt, anti_diagonal(8, ONE));
    }

    #[test]
    fn klein_group_at_zero_phase() {
        let b = build_subbasis(&massive(0, 1), 1.0, false).unwrap();
        let rep = RepresentationSet::build(b, PhaseConfig::default()).unwrap();
        let report = verify_group(&rep, 1e-12);
        assert!(report.closed && report.abelian && report.involutions);
        assert!(report.squares_exactly_identity);
        assert!(!report.projective);
        assert_eq!(&rep.op_c * &rep.op_pt, rep.op_cpt);
        for e in &report.table {
            assert_eq!(e.result, Some(e.left.compose(e.right)));
        }
    }

    #[test]
    fn quarter_turn_phases_are_projective() {
        let b = build_subbasis(&massive(1, 1), 1.0, false).unwrap();
        let rep = RepresentationSet::build(b, PhaseConfig::new(PI / 2.0, PI / 2.0)).unwrap();
        let report = verify_group(&rep, 1e-12);
        assert!(report.closed && report.abelian && report.projective);
        let c_sq = report
            .table
            .iter()
            .find(|e| e.left == Transformation::C && e.right == Transformation::C)
            .unwrap();
        assert_eq!(c_sq.result, Some(Transformation::Identity));
        assert!((c_sq.phase - PI).abs() < 1e-12);
        // θ_CPT = π so CPT² = e^{2πi} = 1
        let cpt_sq = &rep.op_cpt * &rep.op_cpt;
        assert!(cpt_sq.max_abs_diff(&ComplexMatrix::identity(8)) < 1e-12);
    }

    #[test]
    fn identity_alone_is_closed() {
        let id = ComplexMatrix::identity(3);
        let report = verify_closure(&[(Transformation::Identity, &id)], 1e-12);
        assert!(report.closed && report.abelian && !report.projective);
        assert_eq!(report.table.len(), 1);
    }

    #[test]
    fn closure_failure_is_reported() {
        let b = build_subbasis(&massive(0, 1), 1.0, false).unwrap();
        let rep = RepresentationSet::build(b, PhaseConfig::default()).unwrap();
        let mut broken = rep.op_c.clone();
        broken[(0, 0)] = C64::new(0.5, 0.0);
        let report = verify_closure(
            &[
                (Transformation::Identity, &rep.op_identity),
                (Transformation::C, &broken),
            ],
            1e-12,
        );
        assert!(!report.closed);
        assert!(!report.failures.is_empty());
    }

    #[test]
    fn generic_builder_matches_specific_ones() {
        let (b0, cpt0) = build_cpt_generic(0, 1.0).unwrap();
        let specific = build_operator(
            Transformation::CPT,
            &build_subbasis(&massive(0, 1), 1.0, false).unwrap(),
            &PhaseConfig::default(),
        )
        .unwrap();
        assert_eq!(b0.dim(), 4);
        assert_eq!(cpt0, specific);
        let (b3, cpt3) = build_cpt_generic(3, 1.0).unwrap();
        assert_eq!(b3.dim(), 16);
        assert_eq!(cpt3, anti_diagonal(16, ONE));
    }

    #[test]
    fn spin_zero_eigenstates() {
        let b = build_subbasis(&massive(0, 1), 1.0, false).unwrap();
        let cpt = build_operator(Transformation::CPT, &b, &PhaseConfig::default()).unwrap();
        let eig = cpt_eigenbasis(&cpt, &b).unwrap();
        assert_eq!(eig.len(), 4);
        let pairs: Vec<_> = eig.iter().map(|e| (e.sector, e.pair)).collect();
        assert_eq!(
            pairs,
            vec![
                (Sector::Plus, (0, 3)),
                (Sector::Minus, (0, 3)),
                (Sector::Plus, (1, 2)),
                (Sector::Minus, (1, 2)),
            ]
        );
        // |u,0,p> = labels[0], |-u,0,-p> = labels[3]
        assert_eq!(b.labels[0].to_string(), "|u,0,p>");
        assert_eq!(b.labels[3].to_string(), "|-u,0,-p>");
        for e in &eig {
            let image = cpt.apply(&e.vector);
            assert!(image.max_abs_diff(&e.vector.scale(e.sector.sign())) < 1e-15);
        }
    }

    #[test]
    fn eigenbasis_requires_stripped_phase() {
        let b = build_subbasis(&massive(1, 1), 1.0, false).unwrap();
        let cpt = build_operator(Transformation::CPT, &b, &PhaseConfig::new(0.3, 0.0)).unwrap();
        assert!(matches!(cpt_eigenbasis(&cpt, &b), Err(Error::PhaseNotStripped { .. })));
    }

    #[test]
    fn degenerate_fixed_point_eigenstate() {
        let b = build_subbasis(&massive(0, 0), 0.0, false).unwrap();
        let cpt = build_operator(Transformation::CPT, &b, &PhaseConfig::default()).unwrap();
        let eig = cpt_eigenbasis(&cpt, &b).unwrap();
        assert_eq!(eig.len(), 1);
        assert_eq!(eig[0].sector, Sector::Plus);
    }

    #[test]
    fn spin_and_rational_parsing() {
        assert_eq!(parse_spin("1/2").unwrap(), 1);
        assert_eq!(parse_spin("0.5").unwrap(), 1);
        assert_eq!(parse_spin("3/2").unwrap(), 3);
        assert_eq!(parse_spin("1").unwrap(), 2);
        assert!(parse_spin("1/3").is_err());
        assert!(parse_spin("-1").is_err());
        assert_eq!(parse_rational("-2/6").unwrap(), Rational64::new(-1, 3));
    }

    #[test]
    fn subbasis_json_schema() {
        let b = build_subbasis(&SpeciesLabel::preset("up-quark").unwrap(), 1.5, false).unwrap();
        let v = serde_json::to_value(&b).unwrap();
        assert_eq!(v["p_mag"], 1.5);
        assert_eq!(v["species"]["baryon"], "1/3");
        assert_eq!(v["labels"][0], serde_json::json!({"kappa": 1, "m2": 1, "pi": 1}));
        let back: SubBasis = serde_json::from_value(v).unwrap();
        assert_eq!(back, b);
    }
}
