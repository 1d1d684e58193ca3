//! Parametric sideband coupling: λ = g·J_n(ε/ν), and its inverse.

use crate::error::{Error, Result};
use crate::optimize::golden_section_max;
use crate::scalar::{lit, Real};

pub const MAX_ORDER: u32 = 64;
pub const MAX_ARGUMENT: f64 = 700.0;
/// Below this |x| the ascending series is used directly.
const SERIES_LIMIT: f64 = 2.0;
const FREQUENCY_MATCH_TOL: f64 = 1e-9;
const ROOT_TOL: f64 = 1e-12;

/// Bessel function of the first kind J_n(x).
pub fn bessel_jn<T: Real>(n: u32, x: T) -> Result<T> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!("Bessel order {n} exceeds {MAX_ORDER}")));
    }
    if !x.is_finite() || !(x.abs() < lit(MAX_ARGUMENT)) {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside (-{MAX_ARGUMENT}, {MAX_ARGUMENT})"
        )));
    }
    let ax = x.abs();
    let value = if ax <= lit(SERIES_LIMIT) {
        ascending_series(n, ax)
    } else {
        miller(n, ax)
    };
    // J_n(−x) = (−1)^n J_n(x)
    Ok(if x < T::zero() && n % 2 == 1 { -value } else { value })
}

fn ascending_series<T: Real>(n: u32, x: T) -> T {
    let half = x / lit(2.0);
    let mut term = T::one();
    for k in 1..=n {
        term = term * half / T::from_usize_lossy(k as usize);
    }
    let q = -half * half;
    let mut sum = term;
    let mut m = 1usize;
    while term.abs() > T::epsilon() * sum.abs().max(T::min_positive_value()) {
        term = term * q / T::from_usize_lossy(m * (m + n as usize));
        sum = sum + term;
        m += 1;
        if m > 200 {
            break;
        }
    }
    sum
}

/// Downward recurrence from well above max(n, x), normalized with
/// J_0 + 2ΣJ_2k = 1.
fn miller<T: Real>(n: u32, x: T) -> T {
    let top = (n as f64).max(x.to_f64_lossy());
    let mut start = (top + 30.0 + 10.0 * top.sqrt()) as usize;
    start += start % 2;
    let two_over_x = lit::<T>(2.0) / x;
    let big = T::max_value().sqrt();
    let shrink = T::one() / big;

    let mut above = T::zero();
    let mut current = T::one();
    let mut result = T::zero();
    let mut norm = T::zero();
    for k in (1..=start).rev() {
        let below = two_over_x * T::from_usize_lossy(k) * current - above;
        above = current;
        current = below;
        let idx = k - 1;
        if idx == n as usize {
            result = current;
        }
        if idx % 2 == 0 {
            norm = norm + if idx == 0 { current } else { lit::<T>(2.0) * current };
        }
        if current.abs() > big {
            current = current * shrink;
            above = above * shrink;
            result = result * shrink;
            norm = norm * shrink;
        }
    }
    result / norm
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandConfig<T> {
    /// On-resonance qubit-resonator coupling (angular frequency).
    pub g: T,
    /// Modulation amplitude, same unit as `nu`.
    pub epsilon: T,
    /// Modulation frequency.
    pub nu: T,
    /// Sideband order; 0 selects the carrier term.
    pub n: u32,
    pub omega_q: Option<T>,
    pub omega_r: Option<T>,
}

impl<T: Real> SidebandConfig<T> {
    pub fn new(g: T, epsilon: T, nu: T, n: u32) -> Result<Self> {
        let cfg = Self {
            g,
            epsilon,
            nu,
            n,
            omega_q: None,
            omega_r: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Attaches qubit and resonator frequencies; ν must equal (ω_r − ω_q)/n.
    pub fn with_frequencies(mut self, omega_q: T, omega_r: T) -> Result<Self> {
        self.omega_q = Some(omega_q);
        self.omega_r = Some(omega_r);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > T::zero()) || !self.g.is_finite() {
            return Err(Error::Domain(format!("g must be positive, got {}", self.g)));
        }
        if !(self.nu > T::zero()) || !self.nu.is_finite() {
            return Err(Error::Domain(format!("nu must be positive, got {}", self.nu)));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::Domain("epsilon must be finite".into()));
        }
        if let (Some(wq), Some(wr)) = (self.omega_q, self.omega_r) {
            if self.n == 0 {
                return Err(Error::Domain("frequency matching needs a sideband order n >= 1".into()));
            }
            let expected = (wr - wq) / T::from_usize_lossy(self.n as usize);
            if !((self.nu - expected).abs() / self.nu < lit(FREQUENCY_MATCH_TOL)) {
                return Err(Error::Domain(format!(
                    "nu = {} does not match (omega_r - omega_q)/n = {expected}",
                    self.nu
                )));
            }
        }
        Ok(())
    }

    /// μ = ε/ν.
    pub fn mu(&self) -> T {
        self.epsilon / self.nu
    }
}

/// g·J_n(ε/ν). The sign is physical; ξ uses |λ|.
pub fn effective_coupling<T: Real>(cfg: &SidebandConfig<T>) -> Result<T> {
    cfg.validate()?;
    Ok(cfg.g * bessel_jn(cfg.n, cfg.mu())?)
}

/// ξ = 4|λ|/κ.
pub fn xi_from_coupling<T: Real>(lambda: T, kappa: T) -> T {
    lit::<T>(4.0) * lambda.abs() / kappa
}

/// Location and height of the first maximum of J_n, n ≥ 1.
pub fn first_maximum<T: Real>(n: u32) -> Result<(T, T)> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::Domain(format!(
            "first maximum needs 1 <= n <= {MAX_ORDER}, got {n}"
        )));
    }
    let j = |mu: T| bessel_jn(n, mu).unwrap_or(T::neg_infinity());
    // J_n rises from zero up to its first maximum, which lies below n + 2n^(1/3) + 2.
    let h = lit::<T>(0.05);
    let mut mu = h;
    while j(mu + h) >= j(mu) {
        mu = mu + h;
    }
    let m = golden_section_max(j, mu - h, mu + h, lit(1e-13));
    Ok((m.x, m.value))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude<T> {
    /// ε = μν.
    pub epsilon: T,
    /// μ = ε/ν.
    pub mu: T,
    /// Target coupling ξκ/4.
    pub lambda: T,
}

/// Smallest modulation amplitude with g·J_n(ε/ν) = ξκ/4, searched on the
/// rising branch of J_n below its first maximum.
pub fn solve_amplitude<T: Real>(g: T, nu: T, n: u32, kappa: T, target_xi: T) -> Result<Amplitude<T>> {
    if !(g > T::zero()) || !(nu > T::zero()) || !(kappa > T::zero()) {
        return Err(Error::Domain("g, nu and kappa must be positive".into()));
    }
    if !(target_xi >= T::zero()) || !target_xi.is_finite() {
        return Err(Error::Domain(format!(
            "target xi must be non-negative, got {target_xi}"
        )));
    }
    let lambda = target_xi * kappa / lit(4.0);
    if lambda == T::zero() {
        return Ok(Amplitude {
            epsilon: T::zero(),
            mu: T::zero(),
            lambda,
        });
    }
    let (mu_max, j_max) = first_maximum::<T>(n)?;
    let target = lambda / g;
    if target > j_max {
        return Err(Error::Unreachable {
            target_xi: target_xi.to_f64_lossy(),
            max_xi: xi_from_coupling(g * j_max, kappa).to_f64_lossy(),
        });
    }
    let (mut lo, mut hi) = (T::zero(), mu_max);
    for _ in 0..200 {
        if hi - lo <= lit(ROOT_TOL) {
            break;
        }
        let mid = (lo + hi) / lit(2.0);
        if bessel_jn(n, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = (lo + hi) / lit(2.0);
    Ok(Amplitude {
        epsilon: mu * nu,
        mu,
        lambda,
    })
}

/// Sideband order used experimentally for a given ξ: first order in the
/// weak-coupling region, second order above.
pub fn regime_preset<T: Real>(xi: T) -> u32 {
    if xi <= T::one() {
        1
    } else {
        2
    }
}
