//! Double-double arithmetic (pairs of f64 with ~106-bit precision).
//!
//! Conflict thresholds on the grid are squared Euclidean radii of the form
//! `4 rho^2 / nu_d^(2/d)`, irrational for d >= 2. Comparing exact integer
//! squared distances against a plain f64 threshold could misclassify pairs
//! whose distance falls within one ulp of the boundary; carrying the
//! threshold to ~1e-32 relative precision removes that failure mode.

/// value = hi + lo, with |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// pi to double-double precision.
    pub fn pi() -> Self {
        Self::new(std::f64::consts::PI, 1.2246467991473532e-16)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd::new(-other.hi, -other.lo))
    }

    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, x: f64) -> Dd {
        self.mul(Dd::from_f64(x))
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul_f64(q2));
        let q3 = r2.hi / other.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }

    /// Integer power by repeated multiplication (small exponents only).
    pub fn powi(self, n: u32) -> Dd {
        let mut acc = Dd::from_f64(1.0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Total order on represented values.
    pub fn lt(self, other: Dd) -> bool {
        self.hi < other.hi || (self.hi == other.hi && self.lo < other.lo)
    }

    pub fn le(self, other: Dd) -> bool {
        self.hi < other.hi || (self.hi == other.hi && self.lo <= other.lo)
    }
}

/// Exact conversion of an integer below 2^96 (values here are squared
/// distances, far below that) by 48-bit limbs.
pub fn dd_from_u128(v: u128) -> Dd {
    const MASK: u128 = (1 << 48) - 1;
    const SCALE: f64 = 281474976710656.0; // 2^48
    let a0 = (v & MASK) as f64;
    let a1 = ((v >> 48) & MASK) as f64;
    let a2 = (v >> 96) as f64;
    Dd::from_f64(a2)
        .mul_f64(SCALE)
        .add(Dd::from_f64(a1))
        .mul_f64(SCALE)
        .add(Dd::from_f64(a0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_identities() {
        let a = Dd::from_f64(0.1);
        let b = Dd::from_f64(0.2);
        let c = a.add(b).sub(b);
        assert_eq!(c.to_f64(), 0.1);
        let d = a.mul(b).div(b);
        assert!((d.to_f64() - 0.1).abs() < 1e-30);
    }

    #[test]
    fn pi_has_extra_bits() {
        // sin(pi) evaluated at the double-double pi should be ~1e-32, far
        // below sin of the bare f64 pi (~1.2e-16).
        let p = Dd::pi();
        assert!(p.lo != 0.0);
        // (pi_hi + pi_lo) - pi_f64 recovers the low word.
        assert_eq!(p.sub(Dd::from_f64(std::f64::consts::PI)).to_f64(), p.lo);
    }

    #[test]
    fn exact_integer_conversion() {
        // 2^53 + 1 is not an f64; the excess lands in the low word.
        let d = dd_from_u128(9007199254740993);
        assert_eq!(d.hi, 9007199254740992.0);
        assert_eq!(d.lo, 1.0);
        // Adjacent huge integers stay strictly ordered.
        let a = dd_from_u128((1 << 60) + 7);
        let b = dd_from_u128((1 << 60) + 8);
        assert!(a.lt(b) && !b.lt(a) && a.le(a));
    }

    #[test]
    fn comparisons_use_low_words() {
        let t = Dd::new(100.0, 1e-20);
        assert!(Dd::from_f64(100.0).lt(t));
        assert!(!t.lt(Dd::from_f64(100.0)));
        let t = Dd::new(100.0, -1e-20);
        assert!(t.lt(Dd::from_f64(100.0)));
        assert!(Dd::from_f64(100.0).le(Dd::new(100.0, 0.0)));
    }

    #[test]
    fn powi_matches_f64_for_exact_cases() {
        assert_eq!(Dd::from_f64(2.0).powi(10).to_f64(), 1024.0);
        assert_eq!(Dd::from_f64(1.0).powi(0).to_f64(), 1.0);
    }
}
