//! C ABI over the hyperlie core. Opaque handles, flat arrays, integer error
//! codes; see include/hyperlie.h for the matching declarations.

use std::os::raw::{c_char, c_double, c_int};

use hyperlie::error::HyperLieError;
use hyperlie::su2::Triple;
use hyperlie::{leaf, nahm, poisson, su2};

pub const HYPERLIE_OK: c_int = 0;
pub const HYPERLIE_ERR_NULL: c_int = 1;
pub const HYPERLIE_ERR_DEGENERATE: c_int = 2;
pub const HYPERLIE_ERR_INVALID_ARGUMENT: c_int = 3;
pub const HYPERLIE_ERR_NOT_ON_LEAF: c_int = 4;
pub const HYPERLIE_ERR_NUMERICAL: c_int = 5;

fn error_code(e: &HyperLieError) -> c_int {
    use HyperLieError::*;
    match e {
        DegenerateConfiguration { .. } | DegenerateGram | DegeneratePlane(_)
        | ZeroBoundaryPoint => HYPERLIE_ERR_DEGENERATE,
        InvalidChart(_) | InvalidArgument(_) | NotOrthogonal(_) | WrongRegion { .. }
        | PoleInDomain(_) => HYPERLIE_ERR_INVALID_ARGUMENT,
        NotInCanonicalLeaf(_) => HYPERLIE_ERR_NOT_ON_LEAF,
        _ => HYPERLIE_ERR_NUMERICAL,
    }
}

unsafe fn triple_from(ptr: *const c_double) -> Option<Triple> {
    if ptr.is_null() {
        return None;
    }
    let mut a = [0.0; 9];
    a.copy_from_slice(std::slice::from_raw_parts(ptr, 9));
    Some(Triple::from_array(&a))
}

/// Scalar triple product of the configuration.
///
/// # Safety
/// `a` must point to 9 readable doubles.
#[no_mangle]
pub unsafe extern "C" fn hyperlie_phi(a: *const c_double) -> c_double {
    match triple_from(a) {
        Some(t) => su2::phi(&t),
        None => f64::NAN,
    }
}

/// Writes the five Casimir values to `out`.
///
/// # Safety
/// `a` must point to 9 readable doubles, `out` to 5 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hyperlie_casimirs(a: *const c_double, out: *mut c_double) -> c_int {
    let t = match triple_from(a) {
        Some(t) => t,
        None => return HYPERLIE_ERR_NULL,
    };
    if out.is_null() {
        return HYPERLIE_ERR_NULL;
    }
    let c = poisson::casimirs(&t).to_array();
    std::slice::from_raw_parts_mut(out, 5).copy_from_slice(&c);
    HYPERLIE_OK
}

/// Canonicalizing rotation and leaf parameters. `o` receives the rotation in
/// row-major order; `anti` is nonzero when the input sits in the positive
/// region and the map is orientation-reversing on the third slot.
///
/// # Safety
/// `a` must point to 9 readable doubles; `o` to 9, `q`/`r` to 1, and `anti`
/// to 1 writable slots.
#[no_mangle]
pub unsafe extern "C" fn hyperlie_canonicalize(
    a: *const c_double,
    o: *mut c_double,
    q: *mut c_double,
    r: *mut c_double,
    anti: *mut c_int,
) -> c_int {
    let t = match triple_from(a) {
        Some(t) => t,
        None => return HYPERLIE_ERR_NULL,
    };
    if o.is_null() || q.is_null() || r.is_null() || anti.is_null() {
        return HYPERLIE_ERR_NULL;
    }
    match leaf::canonicalize_any(&t) {
        Ok((rot, p, flipped)) => {
            let om = std::slice::from_raw_parts_mut(o, 9);
            for i in 0..3 {
                for j in 0..3 {
                    om[3 * i + j] = rot[(i, j)];
                }
            }
            *q = p.q;
            *r = p.r;
            *anti = flipped as c_int;
            HYPERLIE_OK
        }
        Err(e) => error_code(&e),
    }
}

/// Writes the 9x9 matrix of the k-th bivector (k in 1..=3) in row-major
/// order.
///
/// # Safety
/// `a` must point to 9 readable doubles, `out` to 81 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hyperlie_pi_matrix(
    k: c_int,
    a: *const c_double,
    out: *mut c_double,
) -> c_int {
    let t = match triple_from(a) {
        Some(t) => t,
        None => return HYPERLIE_ERR_NULL,
    };
    if out.is_null() {
        return HYPERLIE_ERR_NULL;
    }
    if !(1..=3).contains(&k) {
        return HYPERLIE_ERR_INVALID_ARGUMENT;
    }
    match poisson::pi_matrix(k as usize, &t) {
        Ok(b) => {
            let om = std::slice::from_raw_parts_mut(out, 81);
            for i in 0..9 {
                for j in 0..9 {
                    om[9 * i + j] = b.m[(i, j)];
                }
            }
            HYPERLIE_OK
        }
        Err(e) => error_code(&e),
    }
}

/// Opaque trajectory handle.
pub struct HyperlieTrajectory(nahm::Trajectory);

/// Integrates the flow backward from `s0` over `[-t_total, 0]` and returns an
/// owned handle through `out`.
///
/// # Safety
/// `s0` must point to 9 readable doubles ordered B1,B2,B3; `out` must be a
/// valid location for one pointer. On success the handle must be released
/// with `hyperlie_trajectory_free`.
#[no_mangle]
pub unsafe extern "C" fn hyperlie_nahm_solve(
    s0: *const c_double,
    t_total: c_double,
    step: c_double,
    out: *mut *mut HyperlieTrajectory,
) -> c_int {
    let t = match triple_from(s0) {
        Some(t) => t,
        None => return HYPERLIE_ERR_NULL,
    };
    if out.is_null() {
        return HYPERLIE_ERR_NULL;
    }
    match nahm::integrate(&t, t_total, step) {
        Ok(tr) => {
            *out = Box::into_raw(Box::new(HyperlieTrajectory(tr)));
            HYPERLIE_OK
        }
        Err(e) => error_code(&e),
    }
}

/// Number of stored samples.
///
/// # Safety
/// `h` must be a live handle from `hyperlie_nahm_solve` or null.
#[no_mangle]
pub unsafe extern "C" fn hyperlie_trajectory_len(h: *const HyperlieTrajectory) -> usize {
    if h.is_null() {
        0
    } else {
        (*h).0.states.len()
    }
}

/// Copies sample `i` (time into `t`, the nine components into `out`).
///
/// # Safety
/// `h` must be a live handle; `t` and `out` must point to 1 and 9 writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn hyperlie_trajectory_sample(
    h: *const HyperlieTrajectory,
    i: usize,
    t: *mut c_double,
    out: *mut c_double,
) -> c_int {
    if h.is_null() || t.is_null() || out.is_null() {
        return HYPERLIE_ERR_NULL;
    }
    let tr = &(*h).0;
    if i >= tr.states.len() {
        return HYPERLIE_ERR_INVALID_ARGUMENT;
    }
    *t = tr.t[i];
    std::slice::from_raw_parts_mut(out, 9).copy_from_slice(&tr.states[i].to_array());
    HYPERLIE_OK
}

/// Runs the moduli isometry check on a stored trajectory.
///
/// # Safety
/// `h` must be a live handle; `diag_errors` must point to 4 writable doubles,
/// the remaining outputs to one writable slot each.
#[no_mangle]
pub unsafe extern "C" fn hyperlie_isometry_check(
    h: *const HyperlieTrajectory,
    diag_errors: *mut c_double,
    offdiag_max: *mut c_double,
    frame_table_error: *mut c_double,
    intertwine_ok: *mut c_int,
) -> c_int {
    if h.is_null()
        || diag_errors.is_null()
        || offdiag_max.is_null()
        || frame_table_error.is_null()
        || intertwine_ok.is_null()
    {
        return HYPERLIE_ERR_NULL;
    }
    match nahm::isometry_check(&(*h).0) {
        Ok(rep) => {
            std::slice::from_raw_parts_mut(diag_errors, 4).copy_from_slice(&rep.diag_errors);
            *offdiag_max = rep.offdiag_max;
            *frame_table_error = rep.frame_table_error;
            *intertwine_ok = rep.intertwine_ok as c_int;
            HYPERLIE_OK
        }
        Err(e) => error_code(&e),
    }
}

/// Releases a trajectory handle. Null is a no-op.
///
/// # Safety
/// `h` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn hyperlie_trajectory_free(h: *mut HyperlieTrajectory) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Static description of an error code.
#[no_mangle]
pub extern "C" fn hyperlie_error_message(code: c_int) -> *const c_char {
    let s: &'static [u8] = match code {
        HYPERLIE_OK => b"ok\0",
        HYPERLIE_ERR_NULL => b"null pointer argument\0",
        HYPERLIE_ERR_DEGENERATE => b"degenerate configuration\0",
        HYPERLIE_ERR_INVALID_ARGUMENT => b"invalid argument\0",
        HYPERLIE_ERR_NOT_ON_LEAF => b"configuration not on a canonical leaf\0",
        HYPERLIE_ERR_NUMERICAL => b"numerical failure\0",
        _ => b"unknown error code\0",
    };
    s.as_ptr() as *const c_char
}
