//! C ABI over the `mutagen` core.
//!
//! Programs and mutant sets are opaque handles owned by the caller and
//! released with their `*_free` function. Every fallible call returns an
//! [`MgStatus`]; on failure [`mg_last_error`] describes the problem. Strings
//! handed out by the library are released with [`mg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mutagen::ga::{GaConfig, InputDomain, Interval, TestCase};
use mutagen::interp::{execute, ExecBudget, Outcome, RuntimeErrorKind};
use mutagen::lang::{parse, pretty_print, Program};
use mutagen::mutation::{build_kill_matrix, generate_mutants, mutants_to_json, Mutant, MutationOperator};
use mutagen::suite::{optimize, RunOptions, ScanMode};
use mutagen::{config, report, Error, Parallelism};

pub const MG_OP_AOR: u32 = 1;
pub const MG_OP_ROR: u32 = 2;
pub const MG_OP_CRP: u32 = 4;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ArityMismatch = 4,
    ConfigError = 5,
    NoMutants = 6,
    DomainTooLarge = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MgOutcomeKind {
    Value = 0,
    RuntimeError = 1,
    FuelExhausted = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MgRuntimeError {
    None = 0,
    UndefinedVariable = 1,
    DivisionByZero = 2,
    Overflow = 3,
    NoReturn = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MgScanMode {
    Off = 0,
    Auto = 1,
    On = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MgOutcome {
    pub kind: MgOutcomeKind,
    /// Meaningful when `kind` is `Value`.
    pub value: i64,
    /// Meaningful when `kind` is `RuntimeError`.
    pub error: MgRuntimeError,
}

/// Parsed program.
pub struct MgProgram {
    program: Program,
}

/// A program together with its generated mutants.
pub struct MgMutantSet {
    original: Program,
    mutants: Vec<Mutant>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let msg = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: MgStatus, message: impl Into<String>) -> MgStatus {
    set_error(message);
    status
}

fn from_error(err: Error) -> MgStatus {
    let status = match err {
        Error::Parse(_) => MgStatus::ParseError,
        Error::ArityMismatch { .. } => MgStatus::ArityMismatch,
        Error::NoMutants => MgStatus::NoMutants,
        Error::DomainTooLarge { .. } => MgStatus::DomainTooLarge,
        Error::Config(_) | Error::SuiteFormat { .. } => MgStatus::ConfigError,
    };
    fail(status, err.to_string())
}

fn guard(body: impl FnOnce() -> MgStatus) -> MgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == MgStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(MgStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, MgStatus> {
    if p.is_null() {
        return Err(fail(MgStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(MgStatus::InvalidUtf8, "string is not valid UTF-8"))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize) -> Result<&'a [T], MgStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(MgStatus::NullArgument, "null array argument"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn operators_from_mask(mask: u32) -> Result<Vec<MutationOperator>, MgStatus> {
    let ops: Vec<MutationOperator> =
        [(MG_OP_AOR, MutationOperator::Aor), (MG_OP_ROR, MutationOperator::Ror), (MG_OP_CRP, MutationOperator::Crp)]
            .into_iter()
            .filter(|(bit, _)| mask & bit != 0)
            .map(|(_, op)| op)
            .collect();
    if ops.is_empty() || mask & !(MG_OP_AOR | MG_OP_ROR | MG_OP_CRP) != 0 {
        return Err(fail(MgStatus::ConfigError, format!("invalid operator mask {mask:#x}")));
    }
    Ok(ops)
}

fn budget(fuel: u64) -> Result<ExecBudget, MgStatus> {
    ExecBudget::new(fuel).map_err(from_error)
}

/// Message for the most recent failed call on this thread; empty after a
/// successful call. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn mg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn mg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mg_program_parse(source: *const c_char, out: *mut *mut MgProgram) -> MgStatus {
    guard(|| {
        if out.is_null() {
            return fail(MgStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let src = match str_arg(source) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match parse(src) {
            Ok(program) => {
                *out = Box::into_raw(Box::new(MgProgram { program }));
                MgStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// # Safety
/// `program` must be null or a handle from [`mg_program_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mg_program_free(program: *mut MgProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Number of parameters; 0 for a null handle.
///
/// # Safety
/// `program` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mg_program_arity(program: *const MgProgram) -> usize {
    program.as_ref().map_or(0, |p| p.program.arity())
}

/// Canonical source text of the program.
///
/// # Safety
/// `program` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mg_program_pretty(program: *const MgProgram, out: *mut *mut c_char) -> MgStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return fail(MgStatus::NullArgument, "null argument");
        };
        *out = into_c_string(pretty_print(&p.program));
        MgStatus::Ok
    })
}

/// # Safety
/// `program` must be a live handle, `inputs` must point to `len` values and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mg_program_execute(
    program: *const MgProgram,
    inputs: *const i64,
    len: usize,
    fuel: u64,
    out: *mut MgOutcome,
) -> MgStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return fail(MgStatus::NullArgument, "null argument");
        };
        let run = || -> Result<Outcome, MgStatus> {
            let inputs = slice_arg(inputs, len)?;
            execute(&p.program, inputs, budget(fuel)?).map_err(from_error)
        };
        match run() {
            Ok(outcome) => {
                *out = match outcome {
                    Outcome::Value(v) => {
                        MgOutcome { kind: MgOutcomeKind::Value, value: v, error: MgRuntimeError::None }
                    }
                    Outcome::RuntimeError(k) => MgOutcome {
                        kind: MgOutcomeKind::RuntimeError,
                        value: 0,
                        error: match k {
                            RuntimeErrorKind::UndefinedVariable => MgRuntimeError::UndefinedVariable,
                            RuntimeErrorKind::DivisionByZero => MgRuntimeError::DivisionByZero,
                            RuntimeErrorKind::Overflow => MgRuntimeError::Overflow,
                            RuntimeErrorKind::NoReturn => MgRuntimeError::NoReturn,
                        },
                    },
                    Outcome::FuelExhausted => {
                        MgOutcome { kind: MgOutcomeKind::FuelExhausted, value: 0, error: MgRuntimeError::None }
                    }
                };
                MgStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Generates the mutants of `program` for the operators in `operator_mask`
/// (a combination of `MG_OP_*`). An empty result is not an error.
///
/// # Safety
/// `program` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mg_mutants_generate(
    program: *const MgProgram,
    operator_mask: u32,
    out: *mut *mut MgMutantSet,
) -> MgStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return fail(MgStatus::NullArgument, "null argument");
        };
        *out = ptr::null_mut();
        let ops = match operators_from_mask(operator_mask) {
            Ok(ops) => ops,
            Err(status) => return status,
        };
        let mutants = generate_mutants(&p.program, &ops);
        *out = Box::into_raw(Box::new(MgMutantSet { original: p.program.clone(), mutants }));
        MgStatus::Ok
    })
}

/// # Safety
/// `set` must be null or a live handle from [`mg_mutants_generate`].
#[no_mangle]
pub unsafe extern "C" fn mg_mutants_free(set: *mut MgMutantSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mg_mutants_count(set: *const MgMutantSet) -> usize {
    set.as_ref().map_or(0, |s| s.mutants.len())
}

/// JSON array of `{id, operator, line, column, original, mutated}`.
///
/// # Safety
/// `set` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mg_mutants_json(set: *const MgMutantSet, out: *mut *mut c_char) -> MgStatus {
    guard(|| {
        let (Some(s), false) = (set.as_ref(), out.is_null()) else {
            return fail(MgStatus::NullArgument, "null argument");
        };
        *out = into_c_string(mutants_to_json(&s.mutants));
        MgStatus::Ok
    })
}

/// Fills `cells` (row-major, `n_tests * mg_mutants_count(set)` bytes) with
/// 1 where a test kills a mutant and 0 otherwise. `tests` holds `n_tests`
/// rows of `arity` inputs each.
///
/// # Safety
/// All pointers must be valid for the sizes described above.
#[no_mangle]
pub unsafe extern "C" fn mg_kill_matrix(
    set: *const MgMutantSet,
    tests: *const i64,
    n_tests: usize,
    arity: usize,
    fuel: u64,
    cells: *mut u8,
) -> MgStatus {
    guard(|| {
        let Some(s) = set.as_ref() else {
            return fail(MgStatus::NullArgument, "null mutant set");
        };
        let run = || -> Result<(), MgStatus> {
            if arity != s.original.arity() {
                return Err(from_error(Error::ArityMismatch { expected: s.original.arity(), found: arity }));
            }
            let flat = slice_arg(tests, n_tests * arity)?;
            let suite: Vec<TestCase> = if arity == 0 {
                vec![TestCase::new(Vec::new()); n_tests]
            } else {
                flat.chunks(arity).map(|row| TestCase::new(row.to_vec())).collect()
            };
            let km = build_kill_matrix(&s.original, &s.mutants, &suite, budget(fuel)?, Parallelism::Parallel)
                .map_err(from_error)?;
            let width = s.mutants.len();
            if n_tests * width == 0 {
                return Ok(());
            }
            if cells.is_null() {
                return Err(fail(MgStatus::NullArgument, "null output buffer"));
            }
            let dest = std::slice::from_raw_parts_mut(cells, n_tests * width);
            for t in 0..n_tests {
                for (m, &k) in km.row(t).iter().enumerate() {
                    dest[t * width + m] = k as u8;
                }
            }
            Ok(())
        };
        match run() {
            Ok(()) => MgStatus::Ok,
            Err(status) => status,
        }
    })
}

/// Runs the optimizer and returns the JSON run report in `report_json`.
///
/// `config` is null (defaults) or a JSON object / `key = value` text of
/// evolution settings. `lo`/`hi` hold either one interval applied to every
/// parameter or one per parameter. `scan` is an [`MgScanMode`] value.
/// `target_reached`, when not null, receives 1 when the
/// suite reached the target score or the achievable maximum.
///
/// # Safety
/// All pointers must be valid; `lo` and `hi` must hold `n_intervals` values.
#[no_mangle]
pub unsafe extern "C" fn mg_optimize(
    program: *const MgProgram,
    config: *const c_char,
    operator_mask: u32,
    lo: *const i64,
    hi: *const i64,
    n_intervals: usize,
    scan: u32,
    target_reached: *mut i32,
    report_json: *mut *mut c_char,
) -> MgStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), report_json.is_null()) else {
            return fail(MgStatus::NullArgument, "null argument");
        };
        *report_json = ptr::null_mut();
        let run = || -> Result<String, MgStatus> {
            let cfg = if config.is_null() {
                GaConfig::default()
            } else {
                config::parse_config(str_arg(config)?).map_err(from_error)?
            };
            let ops = operators_from_mask(operator_mask)?;
            let lo = slice_arg(lo, n_intervals)?;
            let hi = slice_arg(hi, n_intervals)?;
            let intervals = lo
                .iter()
                .zip(hi)
                .map(|(&l, &h)| Interval::new(l, h))
                .collect::<Result<Vec<_>, _>>()
                .map_err(from_error)?;
            let arity = p.program.arity();
            let domain = match intervals.len() {
                1 => InputDomain::new(vec![intervals[0]; arity]),
                _ => InputDomain::new(intervals),
            };
            let options = RunOptions {
                scan: match scan {
                    s if s == MgScanMode::Off as u32 => ScanMode::Off,
                    s if s == MgScanMode::Auto as u32 => ScanMode::Auto,
                    s if s == MgScanMode::On as u32 => ScanMode::On,
                    other => return Err(fail(MgStatus::ConfigError, format!("invalid scan mode {other}"))),
                },
                ..RunOptions::default()
            };
            let run = optimize(&p.program, &ops, &domain, &cfg, &options).map_err(from_error)?;
            if !target_reached.is_null() {
                *target_reached = run.target_reached as i32;
            }
            Ok(report::to_json(&run))
        };
        match run() {
            Ok(json) => {
                *report_json = into_c_string(json);
                MgStatus::Ok
            }
            Err(status) => status,
        }
    })
}
