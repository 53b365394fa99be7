//! C interface to the `lintest` testers.
//!
//! Programs under test are either C callbacks or built-in fault models,
//! wrapped in an opaque [`LtOracle`]. Every entry point returns an
//! [`LtStatus`]; on anything but `LT_STATUS_OK` a message is available from
//! [`lt_last_error`] on the same thread. Strings returned by the library are
//! released with [`lt_string_free`].
//!
//! The callback interface carries `int64_t` answers and `uint64_t`
//! coordinates, so callback oracles are limited to `n ≤ 63` bits per
//! coordinate. Fault-model oracles have no such limit on `n`.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lintest::adversaries::{materialize, FaultSpec, Sites};
use lintest::analysis::chernoff_trials;
use lintest::ratio::Ratio;
use lintest::testers::{
    budget_for, check_input, general_linear_test, hom_self_test, self_test, Budget, FailureSite,
};
use lintest::{rng_from_seed, Error, LinearSpec, Oracle, OracleError, VectorDomainParams, Verdict};
use num_bigint::{BigInt, BigUint};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidBudget = 3,
    DimensionMismatch = 4,
    DomainTooLarge = 5,
    UnrealizableFraction = 6,
    InvalidFault = 7,
    OracleError = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtOutcome {
    Pass = 0,
    Fail = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtFailureSite {
    None = 0,
    PairingLoop = 1,
    SplitLoop = 2,
    DivisibilityCheck = 3,
    FinalSplit = 4,
}

/// Summary of one tester run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LtVerdict {
    pub outcome: LtOutcome,
    pub failure_site: LtFailureSite,
    pub queries_used: u64,
}

/// Evaluates the program at the `m` coordinates in `x`, writing the answer
/// to `out`. Returns 0 on success; any other value aborts the test with
/// `LT_STATUS_ORACLE_ERROR`.
pub type LtEvalFn =
    Option<unsafe extern "C" fn(ctx: *mut c_void, x: *const u64, m: usize, out: *mut i64) -> i32>;

/// A program under test.
pub struct LtOracle {
    inner: Oracle,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> LtStatus {
    match err {
        Error::InvalidBudget(_) => LtStatus::InvalidBudget,
        Error::DimensionMismatch { .. } => LtStatus::DimensionMismatch,
        Error::DomainTooLarge { .. } => LtStatus::DomainTooLarge,
        Error::UnrealizableFraction { .. } => LtStatus::UnrealizableFraction,
        Error::InvalidFault(_) => LtStatus::InvalidFault,
        Error::Oracle(_) => LtStatus::OracleError,
        _ => LtStatus::InvalidArgument,
    }
}

/// Runs `body`, turning errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), (LtStatus, String)>) -> LtStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LtStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LtStatus::Panic
        }
    }
}

fn lib<T>(r: lintest::Result<T>) -> Result<T, (LtStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn invalid(msg: impl Into<String>) -> (LtStatus, String) {
    (LtStatus::InvalidArgument, msg.into())
}

fn null(what: &str) -> (LtStatus, String) {
    (LtStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (LtStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn ratio_arg(
    p: *const c_char,
    what: &str,
    default: Ratio,
) -> Result<Ratio, (LtStatus, String)> {
    if p.is_null() {
        return Ok(default);
    }
    lib(str_arg(p, what)?.parse::<Ratio>())
}

unsafe fn oracle_arg<'a>(p: *const LtOracle) -> Result<&'a Oracle, (LtStatus, String)> {
    p.as_ref().map(|o| &o.inner).ok_or_else(|| null("oracle"))
}

unsafe fn coefficients(b: *const i64, m: usize) -> Result<LinearSpec, (LtStatus, String)> {
    if b.is_null() {
        return Err(null("coefficients"));
    }
    if m == 0 {
        return Err(invalid("dimension must be positive"));
    }
    let coeffs = std::slice::from_raw_parts(b, m)
        .iter()
        .map(|&v| BigInt::from(v))
        .collect();
    lib(LinearSpec::vector(coeffs))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), (LtStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// `epsilon` may be null for 1/8; `k1 = k2 = 0` derives both from it.
unsafe fn budget_arg(
    epsilon: *const c_char,
    k1: u64,
    k2: u64,
) -> Result<Budget, (LtStatus, String)> {
    let eps = ratio_arg(epsilon, "epsilon", Ratio::new(1, 8))?;
    if k1 == 0 && k2 == 0 {
        return lib(Budget::for_epsilon(eps));
    }
    lib(Budget::new(k1, k2, eps))
}

fn verdict(v: &Verdict) -> LtVerdict {
    LtVerdict {
        outcome: if v.failed() {
            LtOutcome::Fail
        } else {
            LtOutcome::Pass
        },
        failure_site: match v.failure_site {
            FailureSite::PairingLoop => LtFailureSite::PairingLoop,
            FailureSite::SplitLoop => LtFailureSite::SplitLoop,
            FailureSite::DivisibilityCheck => LtFailureSite::DivisibilityCheck,
            FailureSite::FinalSplit => LtFailureSite::FinalSplit,
            FailureSite::None => LtFailureSite::None,
        },
        queries_used: v.queries_used,
    }
}

struct Callback {
    f: unsafe extern "C" fn(*mut c_void, *const u64, usize, *mut i64) -> i32,
    ctx: *mut c_void,
}

// The caller promises the callback may be invoked from the thread running
// the test; the library never calls it concurrently.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

impl lintest::Program for Callback {
    fn eval(&self, x: &[BigUint]) -> Result<BigInt, OracleError> {
        let coords: Vec<u64> = x
            .iter()
            .map(|c| u64::try_from(c).expect("callback domains fit in 64 bits"))
            .collect();
        let mut out = 0i64;
        let rc = unsafe { (self.f)(self.ctx, coords.as_ptr(), coords.len(), &mut out) };
        if rc != 0 {
            return Err(OracleError {
                point: lintest::domain::format_point(x),
                message: format!("callback returned {rc}"),
            });
        }
        Ok(BigInt::from(out))
    }
}

/// Wraps a C callback on `D_nᵐ`, `1 ≤ n ≤ 63`. With `extension` the oracle
/// also answers the scalar point `2ⁿ`, which the property tester needs.
///
/// # Safety
/// `f` must be safe to call with `ctx` until the oracle is freed.
#[no_mangle]
pub unsafe extern "C" fn lt_oracle_from_callback(
    n: u32,
    m: usize,
    f: LtEvalFn,
    ctx: *mut c_void,
    extension: bool,
    out: *mut *mut LtOracle,
) -> LtStatus {
    guard(|| {
        let f = f.ok_or_else(|| null("callback"))?;
        if !(1..=63).contains(&n) {
            return Err(invalid(format!(
                "callback oracles need 1 <= n <= 63, got {n}"
            )));
        }
        if extension && m != 1 {
            return Err(invalid("the extension point exists only for m = 1"));
        }
        let domain = lib(VectorDomainParams::new(n, m))?;
        let oracle = Oracle::vector(domain, Callback { f, ctx }).with_extension(extension);
        write_out(
            out,
            Box::into_raw(Box::new(LtOracle { inner: oracle })),
            "out",
        )
    })
}

/// A built-in faulty program deviating from `x ↦ Σ bᵢxᵢ` as described by
/// `fault` in the compact `kind[:fraction[:magnitude]]` form. Seeded sites
/// use `fault_seed`.
///
/// # Safety
/// `b` must point to `m` values and `fault` to a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lt_oracle_from_fault(
    n: u32,
    m: usize,
    b: *const i64,
    fault: *const c_char,
    fault_seed: u64,
    out: *mut *mut LtOracle,
) -> LtStatus {
    guard(|| {
        let spec = coefficients(b, m)?;
        let mut fs = lib(FaultSpec::parse_compact(str_arg(fault, "fault")?))?;
        if let Sites::Seeded(_) = fs.sites {
            fs.sites = Sites::Seeded(fault_seed);
        }
        let domain = lib(VectorDomainParams::new(n, m))?;
        let adv = lib(materialize(&fs, &spec, domain))?;
        write_out(
            out,
            Box::into_raw(Box::new(LtOracle { inner: adv.oracle })),
            "out",
        )
    })
}

/// # Safety
/// `oracle` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lt_oracle_free(oracle: *mut LtOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// Total queries answered so far.
///
/// # Safety
/// `oracle` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn lt_oracle_query_count(oracle: *const LtOracle) -> u64 {
    oracle.as_ref().map_or(0, |o| o.inner.query_count())
}

/// Self-tests a scalar program against `x ↦ b·x`. `epsilon` may be null
/// (1/8); `k1 = k2 = 0` derives the loop counts from it.
///
/// # Safety
/// Pointers must be valid; `epsilon` may be null.
#[no_mangle]
pub unsafe extern "C" fn lt_self_test(
    oracle: *const LtOracle,
    b: i64,
    epsilon: *const c_char,
    k1: u64,
    k2: u64,
    seed: u64,
    out: *mut LtVerdict,
) -> LtStatus {
    guard(|| {
        let oracle = oracle_arg(oracle)?;
        let budget = budget_arg(epsilon, k1, k2)?;
        let v = lib(self_test(
            &LinearSpec::scalar(b),
            oracle,
            &budget,
            &mut rng_from_seed(seed),
        ))?;
        write_out(out, verdict(&v), "out")
    })
}

/// Tests a scalar program for linearity. On PASS `*learned_b` receives the
/// coefficient as a decimal string (free it with `lt_string_free`); on FAIL
/// it is set to null. The oracle needs the extension point.
///
/// # Safety
/// Pointers must be valid; `epsilon` may be null.
#[no_mangle]
pub unsafe extern "C" fn lt_general_linear_test(
    oracle: *const LtOracle,
    epsilon: *const c_char,
    k1: u64,
    k2: u64,
    seed: u64,
    out: *mut LtVerdict,
    learned_b: *mut *mut c_char,
) -> LtStatus {
    guard(|| {
        let oracle = oracle_arg(oracle)?;
        let budget = budget_arg(epsilon, k1, k2)?;
        if learned_b.is_null() {
            return Err(null("learned_b"));
        }
        let (v, b) = lib(general_linear_test(
            oracle,
            &budget,
            &mut rng_from_seed(seed),
        ))?;
        let s = match b {
            Some(b) => CString::new(b.to_string()).expect("digits").into_raw(),
            None => ptr::null_mut(),
        };
        write_out(out, verdict(&v), "out")?;
        learned_b.write(s);
        Ok(())
    })
}

/// Self-tests a program on `m`-vectors against `x ↦ Σ bᵢxᵢ`.
///
/// # Safety
/// `b` must point to `m` values; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lt_hom_self_test(
    oracle: *const LtOracle,
    b: *const i64,
    m: usize,
    epsilon: *const c_char,
    k1: u64,
    k2: u64,
    seed: u64,
    out: *mut LtVerdict,
) -> LtStatus {
    guard(|| {
        let oracle = oracle_arg(oracle)?;
        let spec = coefficients(b, m)?;
        let budget = budget_arg(epsilon, k1, k2)?;
        let v = lib(hom_self_test(
            &spec,
            oracle,
            &budget,
            &mut rng_from_seed(seed),
        ))?;
        write_out(out, verdict(&v), "out")
    })
}

/// Checks the program's answer at input `a` against `x ↦ b·x`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lt_check_input(
    oracle: *const LtOracle,
    b: i64,
    a: u64,
    seed: u64,
    out: *mut LtVerdict,
) -> LtStatus {
    guard(|| {
        let oracle = oracle_arg(oracle)?;
        let v = lib(check_input(
            &BigUint::from(a),
            &LinearSpec::scalar(b),
            oracle,
            &mut rng_from_seed(seed),
        ))?;
        write_out(out, verdict(&v), "out")
    })
}

/// Derives the loop counts for closeness `epsilon`. Rationals are strings
/// such as "1/8"; null `beta`, `alpha` and `target` mean `ε/4`, `2/3` and
/// `7/8`.
///
/// # Safety
/// String arguments must be null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lt_budget_for(
    epsilon: *const c_char,
    beta: *const c_char,
    alpha: *const c_char,
    target: *const c_char,
    k1: *mut u64,
    k2: *mut u64,
) -> LtStatus {
    guard(|| {
        let eps = lib(str_arg(epsilon, "epsilon")?.parse::<Ratio>())?;
        let beta = ratio_arg(beta, "beta", &eps / &Ratio::new(4, 1))?;
        let alpha = ratio_arg(alpha, "alpha", Ratio::new(2, 3))?;
        let target = ratio_arg(target, "target", Ratio::new(7, 8))?;
        let b = lib(budget_for(&eps, &beta, &alpha, &target))?;
        write_out(k1, b.k1, "k1")?;
        write_out(k2, b.k2, "k2")
    })
}

/// Smallest trial count after which an event of probability `p` is missed
/// with probability at most `failure_bound`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lt_chernoff_trials(
    p: *const c_char,
    failure_bound: *const c_char,
    out: *mut u64,
) -> LtStatus {
    guard(|| {
        let p = lib(str_arg(p, "p")?.parse::<Ratio>())?;
        let t = lib(str_arg(failure_bound, "failure_bound")?.parse::<Ratio>())?;
        let k = lib(chernoff_trials(&p, &t))?;
        write_out(out, k, "out")
    })
}

/// The last error message on this thread, or null. Valid until the next
/// call into the library on this thread.
#[no_mangle]
pub extern "C" fn lt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn lt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
