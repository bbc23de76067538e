//! Compensated summation and the deterministic block reduction used by every
//! long sum in the crate.
//!
//! Parallel sums split their input into fixed-size blocks (independent of the
//! worker count), reduce each block with a compensated accumulator, and merge
//! the block results sequentially in block order. The result is therefore
//! bit-identical for any number of threads.

use num_complex::Complex64;
use rayon::prelude::*;

/// Block length for parallel reductions.
pub const BLOCK: usize = 2048;

/// Error-free transformation: `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free product: `a * b = p + e` exactly (uses a fused multiply-add).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Neumaier-compensated accumulator for `f64`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.comp += e;
    }

    /// Merges another partial sum, keeping its compensation term.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// The running sum and the accumulated compensation, unmerged.
    pub fn parts(&self) -> (f64, f64) {
        (self.sum, self.comp)
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated accumulator for complex values (componentwise).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Deterministic parallel sum of `f(item)` over `items`.
pub fn par_sum<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    let blocks: Vec<CompensatedSum> = items.par_chunks(BLOCK).map(|chunk| chunk.iter().map(&f).collect()).collect();
    let mut total = CompensatedSum::new();
    for b in &blocks {
        total.merge(b);
    }
    total.value()
}

/// Deterministic parallel complex sum of `f(item)` over `items`.
pub fn par_sum_complex<T, F>(items: &[T], f: F) -> Complex64
where
    T: Sync,
    F: Fn(&T) -> Complex64 + Sync,
{
    let blocks: Vec<ComplexSum> = items.par_chunks(BLOCK).map(|chunk| chunk.iter().map(&f).collect()).collect();
    let mut total = ComplexSum::new();
    for b in &blocks {
        total.merge(b);
    }
    total.value()
}

/// A double-double number `hi + lo` with `|lo| <= ulp(hi)/2`.
///
/// Only the handful of operations needed for accurate theta residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (s, e) = two_sum(hi, lo);
        Self { hi: s, lo: e }
    }

    pub fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        Self::renorm(s, e + self.lo + other.lo)
    }

    pub fn add_f64(self, x: f64) -> Self {
        let (s, e) = two_sum(self.hi, x);
        Self::renorm(s, e + self.lo)
    }

    pub fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    pub fn mul_f64(self, x: f64) -> Self {
        let (p, e) = two_prod(self.hi, x);
        Self::renorm(p, e + self.lo * x)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// π as a double-double.
pub const PI_DD: DoubleDouble = DoubleDouble::new(std::f64::consts::PI, 1.2246467991473532e-16);
/// ln 2 as a double-double.
pub const LN2_DD: DoubleDouble = DoubleDouble::new(std::f64::consts::LN_2, 2.3190468138462996e-17);
/// ln(2π) as a double-double.
pub const LN_2PI_DD: DoubleDouble = DoubleDouble::new(1.8378770664093456, -7.756588316134483e-17);
