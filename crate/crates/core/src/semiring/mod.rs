//! Subset convolution over GF(2) and over the max-sum semiring.
//!
//! The max-sum product is computed by embedding into an integer ring: a
//! finite value `v` becomes `β^(v - min)` with `β = 2^(u+1)`, the ranked
//! sum-product convolution runs on fixed-width integers, and the highest
//! nonzero base-β digit of each result is the maximum.

mod ring;
mod wide;

use num_bigint::{BigInt, Sign};

pub use ring::{ranked_convolve, Gf2, Ring};
pub use wide::WideInt;

use crate::error::{Error, Result};

/// Extended integer: `NEG_INF` is the absorbing minus infinity.
pub type Ext = i32;
pub const NEG_INF: Ext = i32::MIN;

/// Largest universe accepted by [`SetFunction`].
pub const MAX_UNIVERSE: usize = 25;
/// Largest universe accepted by [`naive_convolve`].
pub const MAX_NAIVE_UNIVERSE: usize = 16;

#[inline]
pub fn ext_add(a: Ext, b: Ext) -> Ext {
    if a == NEG_INF || b == NEG_INF {
        NEG_INF
    } else {
        a + b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Ring2,
    MaxSum,
}

/// A function `2^U -> values`, indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunction {
    domain: Domain,
    universe: usize,
    values: Vec<Ext>,
}

impl SetFunction {
    pub fn new(domain: Domain, universe: usize, values: Vec<Ext>) -> Result<Self> {
        if universe > MAX_UNIVERSE {
            return Err(Error::TooLarge(format!("universe of size {universe}")));
        }
        if values.len() != 1 << universe {
            return Err(Error::InvalidInput(format!(
                "{} values for a universe of size {universe}",
                values.len()
            )));
        }
        if domain == Domain::Ring2 && values.iter().any(|&v| v != 0 && v != 1) {
            return Err(Error::InvalidInput("GF(2) values must be 0 or 1".into()));
        }
        Ok(Self {
            domain,
            universe,
            values,
        })
    }

    /// Identity for convolution: one at the empty set.
    pub fn delta(domain: Domain, universe: usize) -> Self {
        let (one, zero) = match domain {
            Domain::Ring2 => (1, 0),
            Domain::MaxSum => (0, NEG_INF),
        };
        let mut values = vec![zero; 1 << universe];
        values[0] = one;
        Self::new(domain, universe, values).expect("valid identity")
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn values(&self) -> &[Ext] {
        &self.values
    }

    pub fn get(&self, mask: usize) -> Ext {
        self.values[mask]
    }
}

fn check_pair(f: &SetFunction, g: &SetFunction, domain: Domain) -> Result<()> {
    if f.universe != g.universe {
        return Err(Error::UniverseMismatch {
            left: f.universe,
            right: g.universe,
        });
    }
    if f.domain != domain || g.domain != domain {
        return Err(Error::InvalidInput(format!("expected {domain:?} set functions")));
    }
    Ok(())
}

/// `h(Y) = Σ_{A ⊎ B = Y} f(A) g(B)` in GF(2), by ranked transforms.
pub fn convolve_ring2(f: &SetFunction, g: &SetFunction) -> Result<SetFunction> {
    check_pair(f, g, Domain::Ring2)?;
    let lift = |s: &SetFunction| s.values.iter().map(|&v| Gf2(v == 1)).collect::<Vec<_>>();
    let h = ranked_convolve(&lift(f), &lift(g), f.universe, &());
    SetFunction::new(Domain::Ring2, f.universe, h.into_iter().map(|x| x.0 as Ext).collect())
}

/// `h(Y) = max_{A ⊎ B = Y} f(A) + g(B)`; finite inputs must lie in
/// `[-bound, bound]`.
pub fn convolve_maxsum(f: &SetFunction, g: &SetFunction, bound: i64) -> Result<SetFunction> {
    check_pair(f, g, Domain::MaxSum)?;
    for &v in f.values.iter().chain(&g.values) {
        if v != NEG_INF && (v as i64).abs() > bound {
            return Err(Error::ValueOutOfBound { value: v as i64, bound });
        }
    }
    let h = maxsum_convolve(&f.values, &g.values, f.universe);
    SetFunction::new(Domain::MaxSum, f.universe, h)
}

/// Direct `3^u` evaluation in the function's domain.
pub fn naive_convolve(f: &SetFunction, g: &SetFunction) -> Result<SetFunction> {
    check_pair(f, g, f.domain)?;
    if f.universe > MAX_NAIVE_UNIVERSE {
        return Err(Error::TooLarge(format!(
            "naive convolution over a universe of size {}",
            f.universe
        )));
    }
    let h = match f.domain {
        Domain::MaxSum => maxsum_naive(&f.values, &g.values, f.universe),
        Domain::Ring2 => {
            let mut h = vec![0; f.values.len()];
            for (y, out) in h.iter_mut().enumerate() {
                let mut a = y;
                loop {
                    *out ^= f.values[a] & g.values[y ^ a];
                    if a == 0 {
                        break;
                    }
                    a = (a - 1) & y;
                }
            }
            h
        }
    };
    SetFunction::new(f.domain, f.universe, h)
}

/// Unchecked naive max-sum subset convolution on raw slices.
pub fn maxsum_naive(f: &[Ext], g: &[Ext], u: usize) -> Vec<Ext> {
    let mut h = vec![NEG_INF; 1 << u];
    for (y, out) in h.iter_mut().enumerate() {
        let mut a = y;
        loop {
            *out = (*out).max(ext_add(f[a], g[y ^ a]));
            if a == 0 {
                break;
            }
            a = (a - 1) & y;
        }
    }
    h
}

fn finite_range(f: &[Ext]) -> Option<(Ext, Ext)> {
    f.iter().filter(|&&v| v != NEG_INF).fold(None, |acc, &v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

fn embed_run<R: Ring<Ctx = ()>>(
    f: &[Ext],
    g: &[Ext],
    u: usize,
    (fmin, gmin): (Ext, Ext),
    digit: usize,
    one_at: impl Fn(usize) -> R,
    top_bit: impl Fn(&R) -> Option<usize>,
) -> Vec<Ext> {
    let enc = |x: &[Ext], min: Ext| -> Vec<R> {
        x.iter()
            .map(|&v| {
                if v == NEG_INF {
                    R::zero(&())
                } else {
                    one_at((v - min) as usize * digit)
                }
            })
            .collect()
    };
    ranked_convolve(&enc(f, fmin), &enc(g, gmin), u, &())
        .iter()
        .map(|h| match top_bit(h) {
            None => NEG_INF,
            Some(b) => (b / digit) as Ext + fmin + gmin,
        })
        .collect()
}

/// Unchecked max-sum subset convolution on raw slices via the integer
/// embedding. Uses the narrowest fixed-width integer that holds
/// `β^(2D+1)` where `D` is the larger spread of finite values, and falls
/// back to arbitrary precision beyond 4096 bits.
pub fn maxsum_convolve(f: &[Ext], g: &[Ext], u: usize) -> Vec<Ext> {
    let (Some((fmin, fmax)), Some((gmin, gmax))) = (finite_range(f), finite_range(g)) else {
        return vec![NEG_INF; 1 << u];
    };
    let spread = (fmax - fmin).max(gmax - gmin) as usize;
    // Each digit counts at most 2^u terms, so β = 2^(u+1) never carries.
    let digit = u + 1;
    let bits = (2 * spread + 1) * digit;
    let mins = (fmin, gmin);
    fn run_n<const N: usize>(f: &[Ext], g: &[Ext], u: usize, mins: (Ext, Ext), digit: usize) -> Vec<Ext> {
        embed_run(f, g, u, mins, digit, WideInt::<N>::pow2, WideInt::<N>::top_bit)
    }
    macro_rules! run {
        ($n:expr) => {
            || run_n::<$n>(f, g, u, mins, digit)
        };
    }
    match bits {
        b if b <= 64 => run!(1)(),
        b if b <= 128 => run!(2)(),
        b if b <= 192 => run!(3)(),
        b if b <= 256 => run!(4)(),
        b if b <= 384 => run!(6)(),
        b if b <= 512 => run!(8)(),
        b if b <= 768 => run!(12)(),
        b if b <= 1024 => run!(16)(),
        b if b <= 1536 => run!(24)(),
        b if b <= 2048 => run!(32)(),
        b if b <= 3072 => run!(48)(),
        b if b <= 4096 => run!(64)(),
        _ => embed_run(
            f,
            g,
            u,
            mins,
            digit,
            |bit| BigInt::from(1u8) << bit,
            |h: &BigInt| (h.sign() != Sign::NoSign).then(|| h.bits() as usize - 1),
        ),
    }
}
