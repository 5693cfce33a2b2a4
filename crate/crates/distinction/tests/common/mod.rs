#![allow(dead_code)]

use std::sync::OnceLock;

use distinction::characters::Setting;
use distinction::cli::standard_suite;
use distinction::localfield::{ExtType, FieldSpec};

/// The four standard configurations, built once per test binary.
pub fn suite() -> &'static [Setting] {
    static S: OnceLock<Vec<Setting>> = OnceLock::new();
    S.get_or_init(|| standard_suite().into_iter().map(|sp| Setting::new(sp).expect("standard config")).collect())
}

/// `q_E ≡ 1`, `q_F ≡ −1 (mod ℓ)`: the regime the standard suite skips.
pub fn one_minus_one() -> &'static Setting {
    static S: OnceLock<Setting> = OnceLock::new();
    S.get_or_init(|| Setting::new(FieldSpec::new(5, 1, ExtType::Unramified, 3, 1)).expect("config"))
}

/// Ramified with `ℓ | q_F + 1` and `−1` a non-square, so a quadratic `χ` can
/// restrict to `ω·ν^{1/2}` on `F×`.
pub fn ramified_induced() -> &'static Setting {
    static S: OnceLock<Setting> = OnceLock::new();
    S.get_or_init(|| Setting::new(FieldSpec::new(11, 1, ExtType::Ramified { twisted: false }, 3, 1)).expect("config"))
}

pub fn label(s: &Setting) -> String {
    let sp = s.spec();
    let ext = match sp.ext {
        ExtType::Unramified => "unram",
        ExtType::Ramified { .. } => "ram",
    };
    format!("p={} {} ell={}", sp.p, ext, sp.ell)
}
