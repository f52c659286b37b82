//! Double-double helpers on top of `twofloat`.
//!
//! `TwoFloat / TwoFloat` in twofloat 0.8 drops the residual of `1 − b·(1/b)` when no
//! FMA is used and is then only double accurate, so quotients go through [`div`].

pub use twofloat::TwoFloat as DD;

#[inline]
pub fn dd(x: f64) -> DD {
    DD::from(x)
}

/// Long division with two correction steps (≈1e−32 relative).
#[inline]
pub fn div(a: DD, b: DD) -> DD {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    DD::new_add(q1, q2) + q3
}

/// Nearest double.
#[inline]
pub fn to_f64(a: DD) -> f64 {
    a.hi() + a.lo()
}

/// √n for small integers, cached.
pub fn sqrt_int(n: usize) -> DD {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<DD>> = OnceLock::new();
    let t = TABLE.get_or_init(|| (0..1024).map(|k| dd(k as f64).sqrt()).collect());
    if n < t.len() {
        t[n]
    } else {
        dd(n as f64).sqrt()
    }
}

pub fn pi_quarter() -> DD {
    twofloat::consts::PI.sqrt().sqrt()
}
