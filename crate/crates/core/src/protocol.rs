//! Alice→Bob transmission of a logical qubit through a channel that applies
//! an unknown `g ∈ {1, CPT}`.
//!
//! Trial `i` draws from `rng::stream(seed, i)`, in this order:
//! 1. four `StandardNormal` samples `(a, b, c, d)`, giving the Haar-uniform
//!    logical state `(a + ib, c + id)/‖·‖`;
//! 2. for the random channel, one `bool` (`true` = CPT);
//! 3. with tokens, one `f64` in `[0, 1)` resolving Bob's measurement outcome.
//!
//! Trials run in parallel but are collected in index order and reduced
//! sequentially, so reports are bit-identical for any thread count.

use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, StateVector, C64};
use crate::reps::{build_operator, build_subbasis, BasisLabel, PhaseConfig, SpeciesLabel, SubBasis, Transformation};
use crate::rng;
use crate::ssr::{dfs_subspace, helstrom_success, sector_projectors, HelstromMeasurement, Sector};

/// Logical amplitudes must be normalized to this tolerance.
pub const AMPLITUDE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    Dfs,
    Naive,
}

impl FromStr for Encoding {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dfs" => Ok(Self::Dfs),
            "naive" => Ok(Self::Naive),
            other => Err(Error::Usage(format!("unknown encoding {other:?} (dfs|naive)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    RandomUniform,
    FixedIdentity,
    FixedCpt,
}

impl FromStr for ChannelMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" | "random_uniform" => Ok(Self::RandomUniform),
            "id" | "fixed_identity" => Ok(Self::FixedIdentity),
            "cpt" | "fixed_cpt" => Ok(Self::FixedCpt),
            other => Err(Error::Usage(format!("unknown channel mode {other:?} (random|id|cpt)"))),
        }
    }
}

/// The unknown frame relation; Lorentz parts are taken as compensated.
#[derive(Clone, Debug)]
pub struct ChannelModel {
    pub mode: ChannelMode,
    pub u_cpt: ComplexMatrix,
}

impl ChannelModel {
    fn draw(&self, rng: &mut rng::StreamRng) -> Transformation {
        match self.mode {
            ChannelMode::FixedIdentity => Transformation::Identity,
            ChannelMode::FixedCpt => Transformation::CPT,
            ChannelMode::RandomUniform => {
                if rng.gen::<bool>() {
                    Transformation::CPT
                } else {
                    Transformation::Identity
                }
            }
        }
    }

    fn act(&self, g: Transformation, psi: &StateVector) -> StateVector {
        match g {
            Transformation::CPT => self.u_cpt.apply(psi),
            _ => psi.clone(),
        }
    }

    fn undo(&self, g: Transformation, psi: &StateVector) -> StateVector {
        match g {
            Transformation::CPT => self.u_cpt.adjoint().apply(psi),
            _ => psi.clone(),
        }
    }
}

/// Logical qubit `α|0_L⟩ + β|1_L⟩` on two orthonormal physical states.
#[derive(Clone, Debug)]
pub struct LogicalEncoder {
    pub encoding: Encoding,
    pub zero: StateVector,
    pub one: StateVector,
}

impl LogicalEncoder {
    pub fn dfs(dfs_basis: &[StateVector]) -> Result<Self> {
        if dfs_basis.len() < 2 {
            return Err(Error::Usage(format!(
                "decoherence-free subspace has dimension {}; a qubit needs 2",
                dfs_basis.len()
            )));
        }
        Ok(Self {
            encoding: Encoding::Dfs,
            zero: dfs_basis[0].clone(),
            one: dfs_basis[1].clone(),
        })
    }

    /// `|u,0,p⟩` and `|u,0,−p⟩` of a spin-0 sub-basis.
    pub fn naive(subbasis: &SubBasis) -> Result<Self> {
        if subbasis.species.spin_times_two != 0 {
            return Err(Error::Usage("naive encoding needs a spin-0 sub-basis".into()));
        }
        let index = |pi| {
            subbasis
                .index_of(&BasisLabel {
                    kappa: 1,
                    m_times_two: 0,
                    pi,
                })
                .ok_or_else(|| Error::Usage("sub-basis lacks the |u,0,±p> pair".into()))
        };
        let (i0, i1) = (index(1)?, index(-1)?);
        let n = subbasis.dim();
        Ok(Self {
            encoding: Encoding::Naive,
            zero: StateVector::basis(n, i0),
            one: StateVector::basis(n, i1),
        })
    }

    pub fn dim(&self) -> usize {
        self.zero.dim()
    }

    pub fn encode(&self, alpha: C64, beta: C64) -> Result<StateVector> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > AMPLITUDE_TOL {
            return Err(Error::Usage(format!("|α|² + |β|² = {norm}, expected 1")));
        }
        Ok(self.zero.scale(alpha).add(&self.one.scale(beta)))
    }
}

pub fn encode_dfs(alpha: C64, beta: C64, dfs_basis: &[StateVector]) -> Result<StateVector> {
    LogicalEncoder::dfs(dfs_basis)?.encode(alpha, beta)
}

pub fn encode_naive(alpha: C64, beta: C64, subbasis: &SubBasis) -> Result<StateVector> {
    LogicalEncoder::naive(subbasis)?.encode(alpha, beta)
}

/// Spin-0 sub-basis, its phase-free CPT operator and `+`-sector basis.
#[derive(Clone, Debug)]
pub struct ProtocolSetup {
    pub subbasis: SubBasis,
    pub u_cpt: ComplexMatrix,
    pub dfs_basis: Vec<StateVector>,
}

impl ProtocolSetup {
    pub fn spin_zero(species: &SpeciesLabel, p_mag: f64) -> Result<Self> {
        if species.spin_times_two != 0 {
            return Err(Error::Usage("protocol runs on spin-0 sub-bases".into()));
        }
        let subbasis = build_subbasis(species, p_mag, false)?;
        let u_cpt = build_operator(Transformation::CPT, &subbasis, &PhaseConfig::default())?;
        let decomp = sector_projectors(&u_cpt, 1e-12)?;
        let dfs_basis = dfs_subspace(&decomp, Sector::Plus)?;
        Ok(Self {
            subbasis,
            u_cpt,
            dfs_basis,
        })
    }

    pub fn encoder(&self, encoding: Encoding) -> Result<LogicalEncoder> {
        match encoding {
            Encoding::Dfs => LogicalEncoder::dfs(&self.dfs_basis),
            Encoding::Naive => LogicalEncoder::naive(&self.subbasis),
        }
    }

    pub fn channel(&self, mode: ChannelMode) -> ChannelModel {
        ChannelModel {
            mode,
            u_cpt: self.u_cpt.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub g: Transformation,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub guess: Option<Transformation>,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupBreakdown {
    pub g: Transformation,
    pub trials: u64,
    pub mean_fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TokenReport {
    pub n_tokens: usize,
    pub guess_accuracy: f64,
    pub guess_std_error: f64,
    /// Optimal success probability with equal priors, for comparison.
    pub helstrom_success: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub encoding: Encoding,
    pub mode: ChannelMode,
    pub trials: u64,
    pub seed: u64,
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub min_fidelity: f64,
    pub per_g: Vec<GroupBreakdown>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub token: Option<TokenReport>,
}

/// Haar-uniform `(α, β)` from two complex Gaussians.
pub fn haar_qubit<R: Rng>(rng: &mut R) -> (C64, C64) {
    loop {
        let z: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return (C64::new(z[0], z[1]) / norm, C64::new(z[2], z[3]) / norm);
        }
    }
}

struct Token {
    measurement: HelstromMeasurement,
    n_tokens: usize,
    helstrom_success: f64,
}

fn check_dims(encoder: &LogicalEncoder, channel: &ChannelModel, trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    if channel.u_cpt.rows() != encoder.dim() || !channel.u_cpt.is_square() {
        return Err(Error::DimensionMismatch {
            expected: encoder.dim(),
            found: channel.u_cpt.rows(),
        });
    }
    Ok(())
}

/// Bob decodes in his own frame without correcting for `g`.
pub fn run_protocol(
    encoder: &LogicalEncoder,
    channel: &ChannelModel,
    trials: u64,
    seed: u64,
) -> Result<ProtocolReport> {
    Ok(simulate(encoder, channel, None, trials, seed)?.0)
}

/// Bob first guesses `g` from `n_tokens` copies of `token` that passed
/// through the same channel, then undoes his guess before decoding.
pub fn run_token_assisted(
    token: &StateVector,
    n_tokens: usize,
    encoder: &LogicalEncoder,
    channel: &ChannelModel,
    trials: u64,
    seed: u64,
) -> Result<ProtocolReport> {
    Ok(run_with_trials(encoder, channel, Some((token, n_tokens)), trials, seed)?.0)
}

/// As [`run_protocol`] / [`run_token_assisted`], also returning every trial.
pub fn run_with_trials(
    encoder: &LogicalEncoder,
    channel: &ChannelModel,
    token: Option<(&StateVector, usize)>,
    trials: u64,
    seed: u64,
) -> Result<(ProtocolReport, Vec<TrialRecord>)> {
    match token {
        None => simulate(encoder, channel, None, trials, seed),
        Some((state, n)) => {
            check_dims(encoder, channel, trials)?;
            if state.dim() != channel.u_cpt.cols() {
                return Err(Error::DimensionMismatch {
                    expected: channel.u_cpt.cols(),
                    found: state.dim(),
                });
            }
            let token = Token {
                measurement: HelstromMeasurement::new(state, &channel.u_cpt, n, 1e-12)?,
                n_tokens: n,
                helstrom_success: helstrom_success(state, &channel.u_cpt, n, 1e-10)?,
            };
            simulate(encoder, channel, Some(&token), trials, seed)
        }
    }
}

fn run_trial(
    index: u64,
    seed: u64,
    encoder: &LogicalEncoder,
    channel: &ChannelModel,
    token: Option<&Token>,
) -> TrialRecord {
    let mut rng = rng::stream(seed, index);
    let (alpha, beta) = haar_qubit(&mut rng);
    let g = channel.draw(&mut rng);
    let sent = encoder.encode(alpha, beta).expect("Haar amplitudes are normalized");
    let received = channel.act(g, &sent);
    let (guess, decoded) = match token {
        None => (None, received),
        Some(t) => {
            let p_identity = match g {
                Transformation::CPT => t.measurement.p_identity_given_cpt,
                _ => t.measurement.p_identity_given_identity,
            };
            let guess = if rng.gen::<f64>() < p_identity {
                Transformation::Identity
            } else {
                Transformation::CPT
            };
            (Some(guess), channel.undo(guess, &received))
        }
    };
    let fidelity = sent.inner(&decoded).norm_sqr().min(1.0);
    TrialRecord {
        trial: index,
        g,
        alpha_re: alpha.re,
        alpha_im: alpha.im,
        beta_re: beta.re,
        beta_im: beta.im,
        guess,
        fidelity,
    }
}

fn mean_and_error(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn simulate(
    encoder: &LogicalEncoder,
    channel: &ChannelModel,
    token: Option<&Token>,
    trials: u64,
    seed: u64,
) -> Result<(ProtocolReport, Vec<TrialRecord>)> {
    check_dims(encoder, channel, trials)?;
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(i, seed, encoder, channel, token))
        .collect();

    let fidelities = records.iter().map(|r| r.fidelity);
    let (mean_fidelity, std_error) = mean_and_error(fidelities.clone());
    let min_fidelity = fidelities.fold(f64::INFINITY, f64::min);
    let per_g = [Transformation::Identity, Transformation::CPT]
        .into_iter()
        .map(|g| {
            let subset = records.iter().filter(|r| r.g == g).map(|r| r.fidelity);
            let count = subset.clone().count() as u64;
            GroupBreakdown {
                g,
                trials: count,
                mean_fidelity: (count > 0).then(|| mean_and_error(subset).0),
            }
        })
        .collect();
    let token = token.map(|t| {
        let hits = records.iter().map(|r| if r.guess == Some(r.g) { 1.0 } else { 0.0 });
        let (guess_accuracy, guess_std_error) = mean_and_error(hits);
        TokenReport {
            n_tokens: t.n_tokens,
            guess_accuracy,
            guess_std_error,
            helstrom_success: t.helstrom_success,
        }
    });
    let report = ProtocolReport {
        encoding: encoder.encoding,
        mode: channel.mode,
        trials,
        seed,
        mean_fidelity,
        std_error,
        min_fidelity,
        per_g,
        token,
    };
    Ok((report, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn setup() -> ProtocolSetup {
        ProtocolSetup::spin_zero(&SpeciesLabel::with_u(Rational64::from_integer(1), 0, true), 1.0).unwrap()
    }

    #[test]
    fn dfs_encoding_is_cpt_invariant() {
        let s = setup();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = encode_dfs(C64::new(r, 0.0), C64::new(0.0, r), &s.dfs_basis).unwrap();
        assert!(s.u_cpt.apply(&psi).max_abs_diff(&psi) < 1e-12);
        assert_eq!(
            encode_dfs(C64::new(1.0, 0.0), C64::new(0.0, 0.0), &s.dfs_basis).unwrap(),
            s.dfs_basis[0]
        );
    }

    #[test]
    fn naive_encoding_basis_states() {
        let s = setup();
        let zero = encode_naive(C64::new(1.0, 0.0), C64::new(0.0, 0.0), &s.subbasis).unwrap();
        let one = encode_naive(C64::new(0.0, 0.0), C64::new(1.0, 0.0), &s.subbasis).unwrap();
        assert_eq!(zero, StateVector::basis(4, 0));
        assert_eq!(one, StateVector::basis(4, 1));
    }

    #[test]
    fn encoding_errors() {
        let s = setup();
        assert!(encode_dfs(C64::new(1.0, 0.0), C64::new(1.0, 0.0), &s.dfs_basis).is_err());
        assert!(encode_dfs(C64::new(1.0, 0.0), C64::new(0.0, 0.0), &s.dfs_basis[..1]).is_err());
        let spin_half = build_subbasis(&SpeciesLabel::preset("electron").unwrap(), 1.0, false).unwrap();
        assert!(encode_naive(C64::new(1.0, 0.0), C64::new(0.0, 0.0), &spin_half).is_err());
    }

    #[test]
    fn zero_trials_rejected() {
        let s = setup();
        let enc = s.encoder(Encoding::Dfs).unwrap();
        assert!(run_protocol(&enc, &s.channel(ChannelMode::RandomUniform), 0, 1).is_err());
    }

    #[test]
    fn haar_draw_is_normalized_and_seeded() {
        let (a, b) = haar_qubit(&mut rng::stream(3, 9));
        assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(haar_qubit(&mut rng::stream(3, 9)), (a, b));
    }

    #[test]
    fn small_run_shapes() {
        let s = setup();
        let enc = s.encoder(Encoding::Naive).unwrap();
        let rep = run_protocol(&enc, &s.channel(ChannelMode::FixedCpt), 50, 5).unwrap();
        assert_eq!(rep.per_g[0].trials, 0);
        assert_eq!(rep.per_g[0].mean_fidelity, None);
        assert_eq!(rep.per_g[1].trials, 50);
        assert!(rep.mean_fidelity < 1e-12);
        let rep = run_protocol(&enc, &s.channel(ChannelMode::FixedIdentity), 1, 5).unwrap();
        assert_eq!(rep.std_error, 0.0);
        assert!((rep.mean_fidelity - 1.0).abs() < 1e-12);
    }
}
