//! Computable well-orders on ℕ of a prescribed order type.
//!
//! A codec is a bijection between ℕ and the ordinals below its order type.
//! Strategies only ever talk to a codec through [`WellOrderCodec`], so test
//! harnesses can swap in scrambled presentations of the same order.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ordinal::{left_subtract, nat_add, omega_pow, ord_add, Ordinal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("order type {0} is finite; a well-order of ℕ has order type at least w")]
    FiniteOrderType(Ordinal),
    #[error("ordinal {0} is not below the order type {1}")]
    OutOfRange(Ordinal, Ordinal),
    #[error("the code of {0} does not fit in 64 bits")]
    Overflow(Ordinal),
    #[error("interval [{0}, {1}] has infinitely many members")]
    InfiniteInterval(Ordinal, Ordinal),
    #[error("interval [{0}, {1}] has more than {2} members")]
    IntervalTooLarge(Ordinal, Ordinal, u64),
}

/// Largest interval [`WellOrderCodec::interval_members`] will materialize.
pub const MAX_INTERVAL: u64 = 1 << 24;

/// A presentation of a well-order `≺` on ℕ.
pub trait WellOrderCodec: Send + Sync {
    /// `|≺|`, the order type.
    fn order_type(&self) -> &Ordinal;

    /// Order type of the ≺-initial segment below `n`.
    fn rank(&self, n: u64) -> Ordinal;

    /// Inverse of [`rank`](Self::rank) on `[0, order_type)`.
    fn unrank(&self, a: &Ordinal) -> Result<u64, CodecError>;

    fn prec(&self, m: u64, n: u64) -> bool {
        m != n && self.rank(m) < self.rank(n)
    }

    /// Naturals whose rank lies in `[lo, hi]`, clipped to `[0, order_type)`.
    fn interval_members(&self, lo: &Ordinal, hi: &Ordinal) -> Result<BTreeSet<u64>, CodecError> {
        let delta = self.order_type();
        let end = std::cmp::min(hi.successor(), delta.clone());
        if *lo >= end {
            return Ok(BTreeSet::new());
        }
        let (base, start) = lo.split_finite();
        let (end_base, stop) = end.split_finite();
        if base != end_base {
            return Err(CodecError::InfiniteInterval(lo.clone(), hi.clone()));
        }
        let count = (&stop - &start)
            .to_u64()
            .filter(|&c| c <= MAX_INTERVAL)
            .ok_or_else(|| CodecError::IntervalTooLarge(lo.clone(), hi.clone(), MAX_INTERVAL))?;
        let mut out = BTreeSet::new();
        let mut point = lo.clone();
        for _ in 0..count {
            out.insert(self.unrank(&point)?);
            point = point.successor();
        }
        Ok(out)
    }
}

pub type SharedCodec = Arc<dyn WellOrderCodec>;

pub fn prec(c: &dyn WellOrderCodec, m: u64, n: u64) -> bool {
    c.prec(m, n)
}

pub fn interval_members(
    c: &dyn WellOrderCodec,
    lo: &Ordinal,
    hi: &Ordinal,
) -> Result<BTreeSet<u64>, CodecError> {
    c.interval_members(lo, hi)
}

/// Cantor pairing `(a+b)(a+b+1)/2 + b`.
pub fn pair(a: u64, b: u64) -> Option<u64> {
    let s = a as u128 + b as u128;
    let z = s.checked_mul(s + 1)? / 2 + b as u128;
    u64::try_from(z).ok()
}

pub fn unpair(z: u64) -> (u64, u64) {
    let z = z as u128;
    let w = ((8 * z + 1).isqrt() - 1) / 2;
    let t = w * (w + 1) / 2;
    let b = z - t;
    ((w - b) as u64, b as u64)
}

/// An interval `[offset, offset + ω^exponent)` of the order.
#[derive(Debug, Clone)]
struct Slot {
    offset: Ordinal,
    exponent: Ordinal,
    end: Ordinal,
}

/// The standard codec built from the Cantor normal form of the order type.
///
/// The finite tail of `δ` (if any) takes the first few naturals; the
/// remaining naturals are dealt round-robin to the infinite slots. Inside a
/// slot of type `ω^d` with `d` finite, a natural codes the coefficient tuple by
/// iterated Cantor pairing; for infinite `d` it codes a finite multiset of
/// exponents below `d` as a bitset.
pub struct CnfCodec {
    delta: Ordinal,
    finite_offset: Ordinal,
    finite_count: u64,
    slots: Vec<Slot>,
    inner: HashMap<Ordinal, Arc<CnfCodec>>,
    cache: RwLock<HashMap<u64, Ordinal>>,
}

const CACHE_LIMIT: usize = 1 << 16;

pub fn make_codec(delta: &Ordinal) -> Result<Arc<CnfCodec>, CodecError> {
    CnfCodec::new(delta).map(Arc::new)
}

impl CnfCodec {
    pub fn new(delta: &Ordinal) -> Result<Self, CodecError> {
        if delta.is_finite() {
            return Err(CodecError::FiniteOrderType(delta.clone()));
        }
        let (limit, finite) = delta.split_finite();
        let finite_count = finite
            .to_u64()
            .ok_or_else(|| CodecError::Overflow(delta.clone()))?;
        let mut slots = Vec::new();
        let mut inner = HashMap::new();
        let mut offset = Ordinal::zero();
        for t in limit.terms() {
            let copies = t
                .coefficient
                .to_u64()
                .ok_or_else(|| CodecError::Overflow(delta.clone()))?;
            if !t.exponent.is_finite() && !inner.contains_key(&t.exponent) {
                inner.insert(t.exponent.clone(), Arc::new(CnfCodec::new(&t.exponent)?));
            }
            for _ in 0..copies {
                let end = ord_add(&offset, &omega_pow(&t.exponent));
                slots.push(Slot {
                    offset: offset.clone(),
                    exponent: t.exponent.clone(),
                    end: end.clone(),
                });
                offset = end;
            }
        }
        Ok(CnfCodec {
            delta: delta.clone(),
            finite_offset: offset,
            finite_count,
            slots,
            inner,
            cache: RwLock::new(HashMap::new()),
        })
    }

    fn block_rank(&self, exponent: &Ordinal, m: u64) -> Ordinal {
        match exponent.to_u64() {
            Some(d) => {
                // a tuple (a_{d-1}, ..., a_0) by iterated pairing
                let mut terms = Vec::with_capacity(d as usize);
                let mut rest = m;
                for e in (1..d).rev() {
                    let (a, r) = unpair(rest);
                    terms.push((Ordinal::from(e), a));
                    rest = r;
                }
                terms.push((Ordinal::zero(), rest));
                Ordinal::sum_of(terms)
            }
            None => {
                // a multiset of codes below the exponent, as a bitset with gaps
                let sub = &self.inner[exponent];
                let mut acc = Ordinal::zero();
                let mut bits = m;
                let mut i = 0u64;
                while bits != 0 {
                    let z = bits.trailing_zeros() as u64;
                    bits &= bits - 1;
                    let y = z - i;
                    acc = nat_add(&acc, &omega_pow(&sub.rank(y)));
                    i += 1;
                }
                acc
            }
        }
    }

    fn block_unrank(&self, exponent: &Ordinal, r: &Ordinal) -> Option<u64> {
        match exponent.to_u64() {
            Some(d) => {
                let coeff = |e: u64| r.finite_coefficient(e);
                let mut code = coeff(0)?;
                for e in 1..d {
                    code = pair(coeff(e)?, code)?;
                }
                Some(code)
            }
            None => {
                let sub = &self.inner[exponent];
                let mut ys = Vec::new();
                for t in r.terms() {
                    let y = sub.unrank(&t.exponent).ok()?;
                    for _ in 0..t.coefficient.to_u64()? {
                        ys.push(y);
                    }
                }
                ys.sort_unstable();
                let mut code = 0u64;
                for (i, y) in ys.into_iter().enumerate() {
                    let z = y.checked_add(i as u64)?;
                    if z >= 64 {
                        return None;
                    }
                    code |= 1u64 << z;
                }
                Some(code)
            }
        }
    }

    fn compute_rank(&self, n: u64) -> Ordinal {
        if n < self.finite_count {
            return ord_add(&self.finite_offset, &Ordinal::from(n));
        }
        let n = n - self.finite_count;
        let k = self.slots.len() as u64;
        let slot = &self.slots[(n % k) as usize];
        ord_add(&slot.offset, &self.block_rank(&slot.exponent, n / k))
    }
}

impl WellOrderCodec for CnfCodec {
    fn order_type(&self) -> &Ordinal {
        &self.delta
    }

    fn rank(&self, n: u64) -> Ordinal {
        if let Some(r) = self.cache.read().expect("rank cache poisoned").get(&n) {
            return r.clone();
        }
        let r = self.compute_rank(n);
        let mut cache = self.cache.write().expect("rank cache poisoned");
        if cache.len() < CACHE_LIMIT {
            cache.insert(n, r.clone());
        }
        r
    }

    fn unrank(&self, a: &Ordinal) -> Result<u64, CodecError> {
        if *a >= self.delta {
            return Err(CodecError::OutOfRange(a.clone(), self.delta.clone()));
        }
        let overflow = || CodecError::Overflow(a.clone());
        if *a >= self.finite_offset {
            let r = left_subtract(a, &self.finite_offset).expect("a is above the offset");
            return r.to_u64().ok_or_else(overflow);
        }
        let k = self.slots.len() as u64;
        let (index, slot) = self
            .slots
            .iter()
            .enumerate()
            .find(|(_, s)| *a < s.end)
            .expect("a is below the finite offset");
        let r = left_subtract(a, &slot.offset).expect("slots are visited in order");
        let m = self.block_unrank(&slot.exponent, &r).ok_or_else(overflow)?;
        m.checked_mul(k)
            .and_then(|x| x.checked_add(index as u64))
            .and_then(|x| x.checked_add(self.finite_count))
            .ok_or_else(overflow)
    }
}

/// The same order presented through a seeded permutation of ℕ that shuffles
/// each block of 64 consecutive naturals.
pub struct ScrambledCodec<C: ?Sized> {
    seed: u64,
    base: Arc<C>,
}

const SCRAMBLE_BLOCK: u64 = 64;

impl<C: WellOrderCodec + ?Sized> ScrambledCodec<C> {
    pub fn new(base: Arc<C>, seed: u64) -> Self {
        ScrambledCodec { seed, base }
    }

    fn block_permutation(&self, block: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ block.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut perm: Vec<u64> = (0..SCRAMBLE_BLOCK).collect();
        perm.shuffle(&mut rng);
        perm
    }

    fn forward(&self, n: u64) -> u64 {
        let (q, r) = (n / SCRAMBLE_BLOCK, n % SCRAMBLE_BLOCK);
        q * SCRAMBLE_BLOCK + self.block_permutation(q)[r as usize]
    }

    fn backward(&self, n: u64) -> u64 {
        let (q, r) = (n / SCRAMBLE_BLOCK, n % SCRAMBLE_BLOCK);
        let perm = self.block_permutation(q);
        let pos = perm.iter().position(|&x| x == r).expect("permutation");
        q * SCRAMBLE_BLOCK + pos as u64
    }
}

impl<C: WellOrderCodec + ?Sized> WellOrderCodec for ScrambledCodec<C> {
    fn order_type(&self) -> &Ordinal {
        self.base.order_type()
    }

    fn rank(&self, n: u64) -> Ordinal {
        self.base.rank(self.forward(n))
    }

    fn unrank(&self, a: &Ordinal) -> Result<u64, CodecError> {
        self.base.unrank(a).map(|n| self.backward(n))
    }
}

/// `ω^e · c` as an ordinal, for building order types in code.
pub fn omega_term(e: u64, c: u64) -> Ordinal {
    Ordinal::monomial(Ordinal::from(e), BigUint::from(c))
}

/// `ω^(h+1) + ω + extra` when `extra > 0`, else `ω^(h+1) + ω`.
pub fn threshold_order(h: usize, extra: u64) -> Ordinal {
    let base = ord_add(&omega_pow(&Ordinal::from(h as u64 + 1)), &Ordinal::omega());
    ord_add(&base, &Ordinal::from(extra))
}

impl std::fmt::Debug for CnfCodec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CnfCodec").field("order_type", &self.delta.to_string()).finish()
    }
}
