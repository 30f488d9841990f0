use std::collections::BTreeMap;

use crate::semiring::Ring;

/// Truncation window for the accumulators. The admissible region is
/// down-closed and every recurrence only increases `a, b, c, w`, so
/// dropping terms outside it is a ring homomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub amax: usize,
    pub bmax: usize,
    pub cmax: usize,
    /// Bound on `b + c`.
    pub bcmax: usize,
    pub wmax: usize,
}

impl Bounds {
    /// Window for a root read at `a = target`, with `b < n`. Weights are
    /// at most `6n` per vertex of `X` and per marker.
    pub fn for_target(n: usize, target: usize) -> Self {
        Self {
            amax: target,
            bmax: target.saturating_sub(1).min(n.saturating_sub(1)),
            cmax: target,
            bcmax: target,
            wmax: 12 * n * target,
        }
    }

    /// Window that keeps every reachable entry (for testing the full table).
    pub fn full(n: usize) -> Self {
        Self {
            amax: n,
            bmax: n.saturating_sub(1),
            cmax: n,
            bcmax: 2 * n,
            wmax: 12 * n * n,
        }
    }

    #[inline]
    fn admits(&self, k: Key) -> bool {
        k.a as usize <= self.amax
            && k.b as usize <= self.bmax
            && k.c as usize <= self.cmax
            && (k.b + k.c) as usize <= self.bcmax
    }

    fn words(&self) -> usize {
        self.wmax / 64 + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub a: u16,
    pub b: u16,
    pub c: u16,
}

/// Dense GF(2) polynomial in `w`, bit `i` is the coefficient of `w^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WBits(Vec<u64>);

impl WBits {
    fn zero(words: usize) -> Self {
        WBits(vec![0; words])
    }

    pub fn get(&self, w: usize) -> bool {
        self.0.get(w / 64).is_some_and(|x| x >> (w % 64) & 1 == 1)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &word)| (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| 64 * i + b))
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    fn mask_top(&mut self, wmax: usize) {
        let last = wmax / 64;
        let keep = wmax % 64 + 1;
        if keep < 64 {
            self.0[last] &= (1u64 << keep) - 1;
        }
    }

    /// `self ^= other * w^k`, truncated at `wmax`.
    fn xor_shifted_up(&mut self, other: &WBits, k: usize, wmax: usize) {
        let (q, r) = (k / 64, k % 64);
        let n = self.0.len();
        for i in (q..n).rev() {
            let src = i - q;
            let mut v = other.0[src] << r;
            if r > 0 && src > 0 {
                v |= other.0[src - 1] >> (64 - r);
            }
            self.0[i] ^= v;
        }
        self.mask_top(wmax);
    }

    /// `other / w^k` with lower terms dropped.
    fn shifted_down(&self, k: usize) -> WBits {
        let (q, r) = (k / 64, k % 64);
        let n = self.0.len();
        let mut out = vec![0u64; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let src = i + q;
            if src >= n {
                break;
            }
            let mut v = self.0[src] >> r;
            if r > 0 && src + 1 < n {
                v |= self.0[src + 1] << (64 - r);
            }
            *slot = v;
        }
        WBits(out)
    }

    /// `self ^= a * b` (carry-less), truncated at `wmax`.
    fn clmul_into(&mut self, a: &WBits, b: &WBits, wmax: usize) {
        for (i, &word) in a.0.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let shift = 64 * i + t;
                if shift > wmax {
                    return;
                }
                self.xor_shifted_up(b, shift, wmax);
            }
        }
    }
}

/// Sparse polynomial over GF(2) in `a, b, c`, dense in `w`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParityPoly {
    terms: BTreeMap<Key, WBits>,
}

impl ParityPoly {
    /// The constant polynomial 1.
    pub fn one(bounds: &Bounds) -> Self {
        let mut bits = WBits::zero(bounds.words());
        bits.0[0] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Key { a: 0, b: 0, c: 0 }, bits);
        Self { terms }
    }

    pub fn get(&self, a: usize, b: usize, c: usize, w: usize) -> bool {
        self.terms
            .get(&Key {
                a: a as u16,
                b: b as u16,
                c: c as u16,
            })
            .is_some_and(|bits| bits.get(w))
    }

    /// The `w` polynomial at `(a, b, c)`, if nonzero.
    pub fn weights(&self, a: usize, b: usize, c: usize) -> Option<&WBits> {
        self.terms.get(&Key {
            a: a as u16,
            b: b as u16,
            c: c as u16,
        })
    }

    pub fn terms(&self) -> impl Iterator<Item = (Key, &WBits)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// Multiplies by `a^da b^db c^dc w^dw`, dropping terms outside the window.
    pub fn shifted(&self, da: usize, db: usize, dc: usize, dw: usize, bounds: &Bounds) -> Self {
        let mut out = Self::default();
        out.add_shifted(self, da, db, dc, dw, bounds);
        out
    }

    /// `self += other * a^da b^db c^dc w^dw`.
    pub fn add_shifted(&mut self, other: &Self, da: usize, db: usize, dc: usize, dw: usize, bounds: &Bounds) {
        if dw > bounds.wmax {
            return;
        }
        for (k, bits) in &other.terms {
            let key = Key {
                a: k.a + da as u16,
                b: k.b + db as u16,
                c: k.c + dc as u16,
            };
            if !bounds.admits(key) {
                continue;
            }
            let slot = self.terms.entry(key).or_insert_with(|| WBits::zero(bounds.words()));
            slot.xor_shifted_up(bits, dw, bounds.wmax);
            if slot.is_zero() {
                self.terms.remove(&key);
            }
        }
    }

    /// Divides by `a^da w^dw`; terms with smaller exponents must not exist.
    pub fn divided(&self, da: usize, dw: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (k, bits) in &self.terms {
            debug_assert!(k.a as usize >= da, "term below the divisor");
            if (k.a as usize) < da {
                continue;
            }
            let bits = bits.shifted_down(dw);
            if !bits.is_zero() {
                terms.insert(
                    Key {
                        a: k.a - da as u16,
                        ..*k
                    },
                    bits,
                );
            }
        }
        Self { terms }
    }
}

impl Ring for ParityPoly {
    type Ctx = Bounds;

    fn zero(_: &Bounds) -> Self {
        Self::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_assign(&mut self, other: &Self, bounds: &Bounds) {
        self.add_shifted(other, 0, 0, 0, 0, bounds);
    }

    fn sub_assign(&mut self, other: &Self, bounds: &Bounds) {
        self.add_shifted(other, 0, 0, 0, 0, bounds);
    }

    fn add_mul(&mut self, x: &Self, y: &Self, bounds: &Bounds) {
        for (kx, bx) in &x.terms {
            for (ky, by) in &y.terms {
                let key = Key {
                    a: kx.a + ky.a,
                    b: kx.b + ky.b,
                    c: kx.c + ky.c,
                };
                if !bounds.admits(key) {
                    continue;
                }
                let slot = self.terms.entry(key).or_insert_with(|| WBits::zero(bounds.words()));
                slot.clmul_into(bx, by, bounds.wmax);
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }
        }
    }
}
