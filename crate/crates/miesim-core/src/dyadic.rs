//! Exact dyadic rationals `mantissa / 2^exponent`.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: u64,
    exponent: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic {
        mantissa: 0,
        exponent: 0,
    };
    pub const ONE: Dyadic = Dyadic {
        mantissa: 1,
        exponent: 0,
    };

    pub fn new(mantissa: u64, exponent: u32) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    /// `2^{-e}`.
    pub fn inv_pow2(e: u32) -> Self {
        Dyadic {
            mantissa: 1,
            exponent: e,
        }
    }

    fn normalize(&mut self) {
        if self.mantissa == 0 {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().min(self.exponent);
        self.mantissa >>= tz;
        self.exponent -= tz;
    }

    pub fn mantissa(&self) -> u64 {
        self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn is_one(&self) -> bool {
        *self == Dyadic::ONE
    }

    pub fn to_f64(&self) -> f64 {
        self.mantissa as f64 * (-(self.exponent as f64)).exp2()
    }

    pub fn checked_mul(self, rhs: Dyadic) -> Option<Dyadic> {
        let m = self.mantissa.checked_mul(rhs.mantissa)?;
        let e = self.exponent.checked_add(rhs.exponent)?;
        Some(Dyadic::new(m, e))
    }

    pub fn checked_add(self, rhs: Dyadic) -> Option<Dyadic> {
        let e = self.exponent.max(rhs.exponent);
        let a = shl(self.mantissa, e - self.exponent)?;
        let b = shl(rhs.mantissa, e - rhs.exponent)?;
        Some(Dyadic::new(a.checked_add(b)?, e))
    }

    /// Multiply by `2^k`.
    pub fn scale_pow2(self, k: u32) -> Option<Dyadic> {
        if self.exponent >= k {
            Some(Dyadic::new(self.mantissa, self.exponent - k))
        } else {
            Some(Dyadic::new(shl(self.mantissa, k - self.exponent)?, 0))
        }
    }
}

fn shl(m: u64, k: u32) -> Option<u64> {
    if m == 0 {
        return Some(0);
    }
    if k >= 64 || m.leading_zeros() < k {
        None
    } else {
        Some(m << k)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        // compare a/2^e1 with b/2^e2 as a·2^e2 vs b·2^e1 in u128 when possible
        let e = self.exponent.max(other.exponent);
        let (da, db) = (e - self.exponent, e - other.exponent);
        if da < 64 && db < 64 {
            ((self.mantissa as u128) << da).cmp(&((other.mantissa as u128) << db))
        } else {
            self.to_f64().total_cmp(&other.to_f64())
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}/2^{}", self.mantissa, self.exponent)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let half = Dyadic::inv_pow2(1);
        assert_eq!(half.checked_add(half), Some(Dyadic::ONE));
        assert_eq!(half.checked_mul(half), Some(Dyadic::inv_pow2(2)));
        assert_eq!(Dyadic::new(6, 2), Dyadic::new(3, 1));
        assert!(half < Dyadic::ONE);
        assert_eq!(Dyadic::inv_pow2(2).scale_pow2(3), Some(Dyadic::new(2, 0)));
        assert_eq!(Dyadic::new(3, 1).to_f64(), 1.5);
    }
}
