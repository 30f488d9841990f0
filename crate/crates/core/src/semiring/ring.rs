/// Commutative ring with an evaluation context (truncation bounds and the
/// like). Subtraction must be the inverse of addition.
pub trait Ring: Clone + Send + Sync {
    type Ctx: Sync;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self, ctx: &Self::Ctx);
    fn sub_assign(&mut self, other: &Self, ctx: &Self::Ctx);
    /// `self += a * b`.
    fn add_mul(&mut self, a: &Self, b: &Self, ctx: &Self::Ctx);
}

/// The field with two elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Gf2(pub bool);

impl Ring for Gf2 {
    type Ctx = ();

    #[inline]
    fn zero(_: &()) -> Self {
        Gf2(false)
    }

    #[inline]
    fn is_zero(&self) -> bool {
        !self.0
    }

    #[inline]
    fn add_assign(&mut self, other: &Self, _: &()) {
        self.0 ^= other.0;
    }

    #[inline]
    fn sub_assign(&mut self, other: &Self, _: &()) {
        self.0 ^= other.0;
    }

    #[inline]
    fn add_mul(&mut self, a: &Self, b: &Self, _: &()) {
        self.0 ^= a.0 & b.0;
    }
}

impl Ring for num_bigint::BigInt {
    type Ctx = ();

    fn zero(_: &()) -> Self {
        num_bigint::BigInt::default()
    }

    fn is_zero(&self) -> bool {
        self.sign() == num_bigint::Sign::NoSign
    }

    fn add_assign(&mut self, other: &Self, _: &()) {
        *self += other;
    }

    fn sub_assign(&mut self, other: &Self, _: &()) {
        *self -= other;
    }

    fn add_mul(&mut self, a: &Self, b: &Self, _: &()) {
        if !a.is_zero() && !b.is_zero() {
            *self += a * b;
        }
    }
}

/// Subset sum over each rank layer in place: `x[S] = sum over T ⊆ S`.
fn zeta<R: Ring>(layer: &mut [R], u: usize, ctx: &R::Ctx) {
    for i in 0..u {
        let bit = 1usize << i;
        for block in layer.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                h.add_assign(l, ctx);
            }
        }
    }
}

fn mobius<R: Ring>(layer: &mut [R], u: usize, ctx: &R::Ctx) {
    for i in 0..u {
        let bit = 1usize << i;
        for block in layer.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                h.sub_assign(l, ctx);
            }
        }
    }
}

/// Rank layers `0..=u` of `f`, each zeta-transformed, stored back to back.
fn ranked<R: Ring>(f: &[R], u: usize, ctx: &R::Ctx) -> Vec<R> {
    let size = 1usize << u;
    let mut layers = vec![R::zero(ctx); (u + 1) * size];
    for (s, v) in f.iter().enumerate() {
        if !v.is_zero() {
            layers[s.count_ones() as usize * size + s] = v.clone();
        }
    }
    for layer in layers.chunks_exact_mut(size) {
        zeta(layer, u, ctx);
    }
    layers
}

/// Subset convolution `h(Y) = sum over A ⊎ B = Y of f(A) g(B)` via ranked
/// zeta and Möbius transforms, `O(2^u u^2)` ring operations.
pub fn ranked_convolve<R: Ring>(f: &[R], g: &[R], u: usize, ctx: &R::Ctx) -> Vec<R> {
    let size = 1usize << u;
    assert_eq!(f.len(), size);
    assert_eq!(g.len(), size);
    let fh = ranked(f, u, ctx);
    let gh = ranked(g, u, ctx);
    let mut out = vec![R::zero(ctx); size];
    let mut layer = vec![R::zero(ctx); size];
    for k in 0..=u {
        for (s, slot) in layer.iter_mut().enumerate() {
            let pop = s.count_ones() as usize;
            let mut acc = R::zero(ctx);
            // Layer j of a transform vanishes on sets smaller than j.
            for j in k.saturating_sub(pop)..=k.min(pop) {
                acc.add_mul(&fh[j * size + s], &gh[(k - j) * size + s], ctx);
            }
            *slot = acc;
        }
        mobius(&mut layer, u, ctx);
        for (s, slot) in out.iter_mut().enumerate() {
            if s.count_ones() as usize == k {
                std::mem::swap(slot, &mut layer[s]);
            }
        }
    }
    out
}
