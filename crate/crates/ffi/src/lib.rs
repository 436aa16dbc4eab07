//! C ABI for `cpt-frameness`.
//!
//! Every fallible call returns a [`CptfStatus`]; on failure a description is
//! available from [`cptf_last_error`] on the same thread. Representations
//! are opaque [`CptfRep`] handles released with [`cptf_rep_free`]. Complex
//! arrays are interleaved `re, im` doubles, matrices row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cpt_frameness::error::Error;
use cpt_frameness::linalg::{StateVector, C64};
use cpt_frameness::protocol::{run_with_trials, ChannelMode, Encoding, ProtocolSetup};
use cpt_frameness::reps::{build_subbasis, PhaseConfig, RepresentationSet, SpeciesLabel, Transformation};
use cpt_frameness::ssr::{
    alignment_rate, helstrom_success, resource_state, sector_projectors, standard_form, AlignmentRate,
    SectorDecomposition,
};
use num_rational::Rational64;

/// Tolerance for unitarity, normalization and sector checks.
const TOL: f64 = 1e-10;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CptfStatus {
    Ok = 0,
    NullPointer = 1,
    Usage = 2,
    DimensionMismatch = 3,
    PhaseNotStripped = 4,
    SizeCap = 5,
    Contract = 6,
    Numerical = 7,
    InvalidData = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CptfTransformation {
    Identity = 0,
    C = 1,
    PT = 2,
    CPT = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CptfEncoding {
    Dfs = 0,
    Naive = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CptfChannelMode {
    RandomUniform = 0,
    FixedIdentity = 1,
    FixedCpt = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CptfProtocolSummary {
    pub trials: u64,
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub min_fidelity: f64,
    /// NaN when no tokens were used.
    pub guess_accuracy: f64,
}

/// A built representation `{1, C, PT, CPT}` with its CPT sector projectors
/// (when the CPT phase is stripped).
pub struct CptfRep {
    rep: RepresentationSet,
    sectors: Option<SectorDecomposition>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CptfStatus {
    match e {
        Error::Size { .. } => CptfStatus::SizeCap,
        Error::DimensionMismatch { .. } => CptfStatus::DimensionMismatch,
        Error::Contract(_) => CptfStatus::Contract,
        Error::Usage(_) => CptfStatus::Usage,
        Error::PhaseNotStripped { .. } => CptfStatus::PhaseNotStripped,
        Error::Construction(_) => CptfStatus::Numerical,
        Error::InvalidData(_) | Error::Json(_) | Error::Io(_) => CptfStatus::InvalidData,
    }
}

struct Fail(CptfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CptfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, recording any error or panic for [`cptf_last_error`].
fn guarded<F: FnOnce() -> Result<(), Fail>>(body: F) -> CptfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CptfStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CptfStatus::Panic
        }
    }
}

impl From<CptfTransformation> for Transformation {
    fn from(g: CptfTransformation) -> Self {
        match g {
            CptfTransformation::Identity => Transformation::Identity,
            CptfTransformation::C => Transformation::C,
            CptfTransformation::PT => Transformation::PT,
            CptfTransformation::CPT => Transformation::CPT,
        }
    }
}

/// # Safety
/// `data` must point to `2 * dim` readable doubles.
unsafe fn read_state(data: *const f64, dim: usize) -> Result<StateVector, Fail> {
    if data.is_null() {
        return Err(null("state"));
    }
    let raw = std::slice::from_raw_parts(data, 2 * dim);
    Ok(StateVector::new(
        raw.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect(),
    ))
}

fn sectors(handle: &CptfRep) -> Result<&SectorDecomposition, Fail> {
    handle.sectors.as_ref().ok_or_else(|| {
        Fail(
            CptfStatus::PhaseNotStripped,
            "CPT carries a phase; sector operations need theta_c + theta_pt = 0 mod pi".into(),
        )
    })
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cptf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds the representation for spin `spin_times_two / 2`, internal number
/// `u_num / u_den` and momentum magnitude `p_mag`. `photon` keeps only the
/// transverse helicities of a massless spin-1 field.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cptf_rep_new(
    spin_times_two: u32,
    u_num: i64,
    u_den: i64,
    p_mag: f64,
    massive: bool,
    photon: bool,
    theta_c: f64,
    theta_pt: f64,
    out: *mut *mut CptfRep,
) -> CptfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if u_den == 0 {
            return Err(Fail(CptfStatus::Usage, "u denominator is zero".into()));
        }
        let species = SpeciesLabel::with_u(Rational64::new(u_num, u_den), spin_times_two, massive);
        let subbasis = build_subbasis(&species, p_mag, photon)?;
        let rep = RepresentationSet::build(subbasis, PhaseConfig::new(theta_c, theta_pt))?;
        let sectors = sector_projectors(&rep.op_cpt, TOL).ok();
        *out = Box::into_raw(Box::new(CptfRep { rep, sectors }));
        Ok(())
    })
}

/// Releases a handle from [`cptf_rep_new`]; null is ignored.
///
/// # Safety
/// `rep` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cptf_rep_free(rep: *mut CptfRep) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// Sub-basis dimension, or 0 for a null handle.
///
/// # Safety
/// `rep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cptf_rep_dim(rep: *const CptfRep) -> usize {
    rep.as_ref().map_or(0, |r| r.rep.subbasis.dim())
}

/// Copies the operator of `g` into `out` (`2·dim·dim` doubles).
///
/// # Safety
/// `rep` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cptf_rep_operator(
    rep: *const CptfRep,
    g: CptfTransformation,
    out: *mut f64,
    len: usize,
) -> CptfStatus {
    guarded(|| {
        let handle = rep.as_ref().ok_or_else(|| null("rep"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = handle.rep.operator(g.into());
        let needed = 2 * m.entries().len();
        if len < needed {
            return Err(Fail(
                CptfStatus::BufferTooSmall,
                format!("need {needed} doubles, got {len}"),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(out, needed);
        for (pair, z) in dst.chunks_exact_mut(2).zip(m.entries()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// Dimensions of the CPT `+` and `−` sectors.
///
/// # Safety
/// `rep` must be a live handle; `plus` and `minus` writable.
#[no_mangle]
pub unsafe extern "C" fn cptf_rep_sector_dims(rep: *const CptfRep, plus: *mut usize, minus: *mut usize) -> CptfStatus {
    guarded(|| {
        let handle = rep.as_ref().ok_or_else(|| null("rep"))?;
        if plus.is_null() || minus.is_null() {
            return Err(null("output"));
        }
        let d = sectors(handle)?;
        *plus = d.dim_plus;
        *minus = d.dim_minus;
        Ok(())
    })
}

/// Sector weights of a normalized state of dimension `dim`.
///
/// # Safety
/// `rep` must be a live handle, `state` must hold `2·dim` doubles, `q0`
/// and `q1` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cptf_standard_form(
    rep: *const CptfRep,
    state: *const f64,
    dim: usize,
    q0: *mut f64,
    q1: *mut f64,
) -> CptfStatus {
    guarded(|| {
        let handle = rep.as_ref().ok_or_else(|| null("rep"))?;
        if q0.is_null() || q1.is_null() {
            return Err(null("output"));
        }
        let psi = read_state(state, dim)?;
        let form = standard_form(&psi, sectors(handle)?, TOL)?;
        *q0 = form.q0;
        *q1 = form.q1;
        Ok(())
    })
}

/// Alignment rate in bits for sector weight `q0`; `+∞` when `q0 = ½`.
///
/// # Safety
/// `bits` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cptf_alignment_rate(q0: f64, bits: *mut f64) -> CptfStatus {
    guarded(|| {
        if bits.is_null() {
            return Err(null("bits"));
        }
        let form = cpt_frameness::ssr::ResourceForm::new(q0)?;
        *bits = match alignment_rate(&form) {
            AlignmentRate::Finite(b) => b,
            AlignmentRate::Infinite => f64::INFINITY,
        };
        Ok(())
    })
}

/// Optimal probability of telling `ψ⊗ⁿ` from `(CPT ψ)⊗ⁿ`.
///
/// # Safety
/// `rep` must be a live handle, `state` must hold `2·dim` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cptf_helstrom_success(
    rep: *const CptfRep,
    state: *const f64,
    dim: usize,
    copies: usize,
    out: *mut f64,
) -> CptfStatus {
    guarded(|| {
        let handle = rep.as_ref().ok_or_else(|| null("rep"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let psi = read_state(state, dim)?;
        *out = helstrom_success(&psi, &handle.rep.op_cpt, copies, TOL)?;
        Ok(())
    })
}

/// Seeded spin-0 (`u = 1`, `|p| = 1`) protocol run. Pass NaN as `token_q0`
/// for decoding without tokens.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cptf_protocol_run(
    encoding: CptfEncoding,
    mode: CptfChannelMode,
    trials: u64,
    seed: u64,
    token_q0: f64,
    n_tokens: usize,
    out: *mut CptfProtocolSummary,
) -> CptfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let setup = ProtocolSetup::spin_zero(&SpeciesLabel::with_u(Rational64::from_integer(1), 0, true), 1.0)?;
        let encoder = setup.encoder(match encoding {
            CptfEncoding::Dfs => Encoding::Dfs,
            CptfEncoding::Naive => Encoding::Naive,
        })?;
        let channel = setup.channel(match mode {
            CptfChannelMode::RandomUniform => ChannelMode::RandomUniform,
            CptfChannelMode::FixedIdentity => ChannelMode::FixedIdentity,
            CptfChannelMode::FixedCpt => ChannelMode::FixedCpt,
        });
        let token = if token_q0.is_nan() {
            None
        } else {
            Some(resource_state(token_q0, &sector_projectors(&setup.u_cpt, TOL)?)?)
        };
        let (report, _) = run_with_trials(&encoder, &channel, token.as_ref().map(|t| (t, n_tokens)), trials, seed)?;
        *out = CptfProtocolSummary {
            trials: report.trials,
            mean_fidelity: report.mean_fidelity,
            std_error: report.std_error,
            min_fidelity: report.min_fidelity,
            guess_accuracy: report.token.map_or(f64::NAN, |t| t.guess_accuracy),
        };
        Ok(())
    })
}
