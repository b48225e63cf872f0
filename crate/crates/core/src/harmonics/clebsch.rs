use super::ln_factorial;
use crate::{Error, Result};
use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

/// Indices of the coefficient `<j m | j1 m1, j2 m2>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CgKey {
    pub j: i32,
    pub m: i32,
    pub j1: i32,
    pub m1: i32,
    pub j2: i32,
    pub m2: i32,
}

impl CgKey {
    pub fn new(j: i32, m: i32, j1: i32, m1: i32, j2: i32, m2: i32) -> Self {
        Self { j, m, j1, m1, j2, m2 }
    }

    fn well_formed(&self) -> bool {
        self.j >= 0 && self.j1 >= 0 && self.j2 >= 0 && self.m.abs() <= self.j && self.m1.abs() <= self.j1 && self.m2.abs() <= self.j2
    }

    fn allowed(&self) -> bool {
        // with all projections zero, an odd j + j1 + j2 flips the sign
        let parity = self.m != 0 || self.m1 != 0 || (self.j + self.j1 + self.j2) % 2 == 0;
        self.m == self.m1 + self.m2 && self.j >= (self.j1 - self.j2).abs() && self.j <= self.j1 + self.j2 && parity
    }
}

/// Clebsch-Gordan coefficient. Selection-rule failures give exactly 0.
pub fn cg(key: CgKey) -> Result<f64> {
    if !key.well_formed() {
        return Err(Error::Contract(format!("malformed CG indices {key:?}")));
    }
    Ok(cg_or_zero(key.j, key.m, key.j1, key.m1, key.j2, key.m2))
}

/// Like [`cg`] but returns 0 for malformed indices as well. Cached.
pub fn cg_or_zero(j: i32, m: i32, j1: i32, m1: i32, j2: i32, m2: i32) -> f64 {
    let key = CgKey::new(j, m, j1, m1, j2, m2);
    if !key.well_formed() || !key.allowed() {
        return 0.0;
    }
    static CACHE: OnceLock<RwLock<HashMap<CgKey, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().unwrap().get(&key) {
        return *v;
    }
    let v = racah(&key);
    cache.write().unwrap().insert(key, v);
    v
}

fn racah(k: &CgKey) -> f64 {
    let (j, m, j1, m1, j2, m2) = (k.j as i64, k.m as i64, k.j1 as i64, k.m1 as i64, k.j2 as i64, k.m2 as i64);
    let ln_pre = 0.5
        * (((2 * j + 1) as f64).ln() + ln_factorial(j + j1 - j2) + ln_factorial(j - j1 + j2) + ln_factorial(j1 + j2 - j)
            - ln_factorial(j1 + j2 + j + 1)
            + ln_factorial(j + m)
            + ln_factorial(j - m)
            + ln_factorial(j1 - m1)
            + ln_factorial(j1 + m1)
            + ln_factorial(j2 - m2)
            + ln_factorial(j2 + m2));
    let lo = 0.max(j2 - j - m1).max(j1 + m2 - j);
    let hi = (j1 + j2 - j).min(j1 - m1).min(j2 + m2);
    let mut sum = 0.0;
    for s in lo..=hi {
        let ln_den = ln_factorial(s)
            + ln_factorial(j1 + j2 - j - s)
            + ln_factorial(j1 - m1 - s)
            + ln_factorial(j2 + m2 - s)
            + ln_factorial(j - j2 + m1 + s)
            + ln_factorial(j - j1 - m2 + s);
        let t = (ln_pre - ln_den).exp();
        sum += if s % 2 == 0 { t } else { -t };
    }
    sum
}
