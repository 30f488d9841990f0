use super::ring::Ring;

/// Fixed-width unsigned integer modulo `2^(64 N)`, little-endian limbs.
///
/// Wrapping arithmetic is enough for the max-sum embedding: the transforms
/// only ever add, subtract and multiply, and the final values are known to
/// fit, so intermediate overflow cancels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WideInt<const N: usize>(pub [u64; N]);

impl<const N: usize> WideInt<N> {
    pub const ZERO: Self = WideInt([0; N]);

    /// `2^bit`, or zero when `bit` is out of range.
    pub fn pow2(bit: usize) -> Self {
        let mut x = [0u64; N];
        if bit < 64 * N {
            x[bit / 64] = 1 << (bit % 64);
        }
        WideInt(x)
    }

    /// Position of the highest set bit.
    pub fn top_bit(&self) -> Option<usize> {
        (0..N)
            .rev()
            .find(|&i| self.0[i] != 0)
            .map(|i| 64 * i + 63 - self.0[i].leading_zeros() as usize)
    }
}

impl<const N: usize> Ring for WideInt<N> {
    type Ctx = ();

    #[inline]
    fn zero(_: &()) -> Self {
        Self::ZERO
    }

    #[inline]
    fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    #[inline]
    fn add_assign(&mut self, other: &Self, _: &()) {
        let mut carry = false;
        for i in 0..N {
            let (s1, c1) = self.0[i].overflowing_add(other.0[i]);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            self.0[i] = s2;
            carry = c1 | c2;
        }
    }

    #[inline]
    fn sub_assign(&mut self, other: &Self, _: &()) {
        let mut borrow = false;
        for i in 0..N {
            let (d1, b1) = self.0[i].overflowing_sub(other.0[i]);
            let (d2, b2) = d1.overflowing_sub(borrow as u64);
            self.0[i] = d2;
            borrow = b1 | b2;
        }
    }

    #[inline]
    fn add_mul(&mut self, a: &Self, b: &Self, _: &()) {
        if N == 1 {
            self.0[0] = self.0[0].wrapping_add(a.0[0].wrapping_mul(b.0[0]));
            return;
        }
        // Truncated schoolbook product, accumulated straight into self.
        for i in 0..N {
            if a.0[i] == 0 {
                continue;
            }
            let mut carry: u128 = 0;
            for j in 0..N - i {
                let t = a.0[i] as u128 * b.0[j] as u128 + self.0[i + j] as u128 + carry;
                self.0[i + j] = t as u64;
                carry = t >> 64;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carries_cross_limbs() {
        let mut x = WideInt::<2>([u64::MAX, 0]);
        x.add_assign(&WideInt([1, 0]), &());
        assert_eq!(x, WideInt([0, 1]));
        x.sub_assign(&WideInt([1, 0]), &());
        assert_eq!(x, WideInt([u64::MAX, 0]));
        let mut p = WideInt::<3>::ZERO;
        p.add_mul(&WideInt::pow2(70), &WideInt::pow2(60), &());
        assert_eq!(p, WideInt::pow2(130));
        assert_eq!(p.top_bit(), Some(130));
    }

    #[test]
    fn wraps_like_modular_arithmetic() {
        let mut x = WideInt::<1>::ZERO;
        x.sub_assign(&WideInt([5]), &());
        x.add_mul(&WideInt([3]), &WideInt([2]), &());
        assert_eq!(x, WideInt([1]));
    }
}
