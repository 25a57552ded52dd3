//! 192-bit reference evaluations of the selector's calibration formulas,
//! independent of the f64 implementation they validate. Comparisons happen
//! in big-float space so no value ever round-trips through f64.

use astro_float::{BigFloat, Consts, RoundingMode};

const P: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

pub struct HighPrec {
    cc: Consts,
}

/// Reference values for one `derive_params` call.
pub struct ParamsRef {
    pub delta: BigFloat,
    pub eps_prime: BigFloat,
    pub eps_a: BigFloat,
    pub i_max: u32,
    /// Distance of `log2_arg` to the nearest integer (ceil boundary guard).
    pub boundary_distance: f64,
    pub theta_0: BigFloat,
}

impl HighPrec {
    pub fn new() -> Self {
        HighPrec {
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn f(x: f64) -> BigFloat {
        BigFloat::from_f64(x, P)
    }

    pub fn u(x: u64) -> BigFloat {
        BigFloat::from_u64(x, P)
    }

    fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(P, RM, &mut self.cc)
    }

    /// `|x - reference| <= tol * |reference|`, evaluated at 192 bits.
    /// A zero reference demands a zero value.
    pub fn rel_close(x: f64, reference: &BigFloat, tol: f64) -> bool {
        let diff = Self::f(x).sub(reference, P, RM).abs();
        if reference.is_zero() {
            return diff.is_zero();
        }
        let bound = reference.abs().mul(&Self::f(tol), P, RM);
        matches!(diff.cmp(&bound), Some(ord) if ord <= 0)
    }

    /// `ln C(n, b)` by term summation over `min(b, n-b)` factors.
    pub fn ln_choose(&mut self, n: u64, b: u64) -> BigFloat {
        let b = b.min(n - b);
        let mut acc = Self::u(0);
        for i in 0..b {
            let num = self.ln(&Self::u(n - i));
            let den = self.ln(&Self::u(i + 1));
            acc = acc.add(&num, P, RM).sub(&den, P, RM);
        }
        acc
    }

    /// Reference for `derive_params`: `δ = 0.01·ε·b/n` (expected mode).
    pub fn derive_params_ref(&mut self, n: u64, b: u64, eps: f64) -> ParamsRef {
        let nf = Self::u(n);
        let bf = Self::u(b);
        let delta = Self::f(0.01)
            .mul(&Self::f(eps), P, RM)
            .mul(&bf, P, RM)
            .div(&nf, P, RM);
        let dn = delta.mul(&nf, P, RM);
        let eps_prime =
            bf.mul(&Self::f(eps), P, RM)
                .sub(&dn, P, RM)
                .div(&bf.sub(&dn, P, RM), P, RM);
        self.finish_params(n, b, delta, eps_prime)
    }

    fn finish_params(&mut self, n: u64, b: u64, delta: BigFloat, eps_prime: BigFloat) -> ParamsRef {
        let one = Self::u(1);
        let eps_a = eps_prime.div(&one.sub(&eps_prime, P, RM), P, RM);
        let factor = Self::u(2).add(
            &Self::u(2).mul(&eps_a, P, RM).div(&Self::u(3), P, RM),
            P,
            RM,
        );
        let arg = factor
            .mul(&Self::u(n), P, RM)
            .div(&eps_a.mul(&eps_a, P, RM), P, RM);
        let log2_arg = arg.log2(P, RM, &mut self.cc);

        let ceil = log2_arg.ceil();
        let ceil_f64 = big_to_f64_int(&ceil);
        let i_max = if ceil_f64 + 1.0 < 1.0 {
            1
        } else {
            (ceil_f64 + 1.0) as u32
        };
        let boundary_distance = {
            let frac = log2_arg.fract().abs();
            let dist_down = big_to_f64_small(&frac);
            dist_down.min(1.0 - dist_down)
        };

        let ln_c = self.ln_choose(n, b);
        let theta_0 = Self::u(2)
            .div(&delta, P, RM)
            .ln(P, RM, &mut self.cc)
            .add(&ln_c, P, RM)
            .div(&Self::u(b), P, RM);
        ParamsRef {
            delta,
            eps_prime,
            eps_a,
            i_max,
            boundary_distance,
            theta_0,
        }
    }

    /// `a = ln(2·i_max/δ)` for a given iteration cap.
    pub fn a_ref(&mut self, i_max: u32, delta: &BigFloat) -> BigFloat {
        let x = Self::u(2 * i_max as u64).div(delta, P, RM);
        self.ln(&x)
    }

    /// Reference for `theta_max`.
    pub fn theta_max_ref(&mut self, n: u64, b: u64, eps_a: f64, delta_a: f64) -> BigFloat {
        let ea = Self::f(eps_a);
        let factor = Self::u(2).add(&Self::u(2).mul(&ea, P, RM).div(&Self::u(3), P, RM), P, RM);
        let scale =
            factor
                .mul(&Self::u(n), P, RM)
                .div(&ea.mul(&ea, P, RM).mul(&Self::u(b), P, RM), P, RM);
        let ln_term =
            self.ln(&Self::u(1).div(&Self::f(delta_a), P, RM))
                .add(&self.ln_choose(n, b), P, RM);
        scale.mul(&ln_term, P, RM)
    }

    /// Reference for the worst-case calibration shift `√(ln(1/δ)/(2r))`.
    pub fn calibration_shift_ref(&mut self, r: u64, delta: f64) -> BigFloat {
        self.ln(&Self::u(1).div(&Self::f(delta), P, RM))
            .div(&Self::u(2 * r), P, RM)
            .sqrt(P, RM)
    }

    /// Signed comparison helper: `x < y`.
    pub fn less_than(x: &BigFloat, y: &BigFloat) -> bool {
        matches!(x.cmp(y), Some(ord) if ord < 0)
    }

    pub fn sub(x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.sub(y, P, RM)
    }
}

/// Exact conversion of an integer-valued BigFloat with small magnitude.
fn big_to_f64_int(x: &BigFloat) -> f64 {
    // Integer ceil values here are tiny (tens); scan for the matching int.
    for candidate in -64i64..=2048 {
        if x.cmp(&BigFloat::from_i64(candidate, P)) == Some(0) {
            return candidate as f64;
        }
    }
    panic!("ceil value out of the expected range");
}

/// Lossy conversion for values in [0, 1]; used only for the guard band.
fn big_to_f64_small(x: &BigFloat) -> f64 {
    // Bisection against f64 probes; 40 iterations pin ~1e-12.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if HighPrec::less_than(x, &HighPrec::f(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_close_discriminates() {
        let hp = HighPrec::f(1.0);
        assert!(HighPrec::rel_close(1.0 + 1e-12, &hp, 1e-9));
        assert!(!HighPrec::rel_close(1.0 + 1e-6, &hp, 1e-9));
    }

    #[test]
    fn ln_choose_matches_known_values() {
        let mut hp = HighPrec::new();
        // C(5, 2) = 10.
        let v = hp.ln_choose(5, 2);
        assert!(HighPrec::rel_close(10.0f64.ln(), &v, 1e-15));
        // C(n, n) = 1.
        assert!(hp.ln_choose(7, 7).is_zero());
    }

    #[test]
    fn shift_matches_f64_route() {
        let mut hp = HighPrec::new();
        let reference = hp.calibration_shift_ref(50, 0.5);
        let f64_route = ((1.0f64 / 0.5).ln() / 100.0).sqrt();
        assert!(HighPrec::rel_close(f64_route, &reference, 1e-12));
    }
}
