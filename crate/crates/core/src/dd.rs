//! Double-double arithmetic and compensated prefix sums.
//!
//! A value is kept as an unevaluated pair `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits of significand. Prefix sums store each prefix this
//! way, so interval sums are accurate to about one ulp regardless of how far
//! from the origin the interval starts, and a run of equal values averages
//! back to exactly that value.

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLIT: f64 = 134_217_729.0; // 2^27 + 1
    let c = SPLIT * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

/// Exact product `a·b` as `hi + lo` (Dekker), valid away from overflow.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

/// Exact product `a·n` as `hi + lo` for an integer-valued `n < 2^26`.
#[inline]
fn two_prod_small(a: f64, n: f64) -> (f64, f64) {
    let p = a * n;
    let (a_hi, a_lo) = split(a);
    (p, (a_hi * n - p) + a_lo * n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl Dd {
    #[inline]
    fn renorm(hi: f64, lo: f64) -> Dd {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        Dd::renorm(s, e + (self.lo + other.lo))
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn product(a: f64, b: f64) -> Dd {
        let (p, e) = two_prod(a, b);
        Dd::renorm(p, e)
    }

    #[inline]
    pub fn scale_by(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        Dd::renorm(p, e + self.lo * b)
    }

    #[inline]
    fn div_f64(self, b: f64) -> Dd {
        let q = self.hi / b;
        let (p, e) = two_prod(q, b);
        Dd::renorm(q, (((self.hi - p) - e) + self.lo) / b)
    }

    /// `e^self` to double-double accuracy: reduce by multiples of `ln 2`,
    /// shrink by `2^10`, sum a short Taylor series and square back up.
    pub fn exp(self) -> Dd {
        const LN2: Dd = Dd {
            hi: std::f64::consts::LN_2,
            lo: 2.319_046_813_846_299_6e-17,
        };
        const SHRINK: i32 = 10;
        if self.hi.is_nan() || self.hi.abs() >= 700.0 {
            return Dd::from(self.hi.exp());
        }
        let k = (self.hi / LN2.hi).round();
        let r = self.add(
            Dd {
                hi: -LN2.hi,
                lo: -LN2.lo,
            }
            .scale_by(k),
        );
        let r = r.scale_by(1.0 / f64::from(1 << SHRINK));
        let mut term = r;
        let mut sum = Dd::from(1.0).add(r);
        for i in 2..=12 {
            term = term.mul(r).div_f64(f64::from(i));
            sum = sum.add(term);
        }
        for _ in 0..SHRINK {
            sum = sum.mul(sum);
        }
        let two_k = 2f64.powi(k as i32);
        Dd {
            hi: sum.hi * two_k,
            lo: sum.lo * two_k,
        }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        Dd::renorm(p, e + (self.hi * other.lo + self.lo * other.hi))
    }

    #[inline]
    pub fn recip(self) -> Dd {
        let q = 1.0 / self.hi;
        // residual 1 - q·self, evaluated with the exact product
        let (p, e) = two_prod(q, self.hi);
        let r = ((1.0 - p) - e) - q * self.lo;
        Dd::renorm(q, r * q)
    }

    #[inline]
    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from(self.hi.sqrt());
        }
        let q = self.hi.sqrt();
        let (p, e) = two_prod(q, q);
        let r = ((self.hi - p) - e) + self.lo;
        Dd::renorm(q, r / (2.0 * q))
    }

    fn powi(self, k: u32) -> Dd {
        let mut acc = Dd::from(1.0);
        let mut base = self;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(base);
            }
        }
        acc
    }

    /// `self^e`. Integer and half-integer exponents stay in double-double;
    /// anything else goes through `powf` on the leading part with a
    /// first-order correction for the trailing part.
    #[inline]
    pub fn pow(self, e: DdExponent) -> Dd {
        match e {
            DdExponent::One => self,
            DdExponent::HalfInteger(k2) => {
                let mag = k2.unsigned_abs();
                let v = if mag % 2 == 0 {
                    self.powi(mag / 2)
                } else {
                    self.sqrt().powi(mag)
                };
                if k2 < 0 {
                    v.recip()
                } else {
                    v
                }
            }
            DdExponent::General(e) => {
                let h = self.hi.powf(e);
                Dd::renorm(h, h * e * (self.lo / self.hi))
            }
        }
    }
}

/// Exponent classified once so the per-interval power picks its path cheaply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum DdExponent {
    One,
    /// `k2 / 2` for a small nonzero integer `k2`.
    HalfInteger(i32),
    General(f64),
}

impl DdExponent {
    pub fn new(e: f64) -> Self {
        let twice = 2.0 * e;
        if e == 1.0 {
            DdExponent::One
        } else if twice.fract() == 0.0 && twice != 0.0 && twice.abs() <= 16.0 {
            DdExponent::HalfInteger(twice as i32)
        } else {
            DdExponent::General(e)
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PrefixSums {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl PrefixSums {
    pub fn new(values: impl IntoIterator<Item = f64>) -> Self {
        Self::new_dd(values.into_iter().map(Dd::from))
    }

    pub fn new_dd(values: impl IntoIterator<Item = Dd>) -> Self {
        let iter = values.into_iter();
        let (lower, _) = iter.size_hint();
        let mut hi = Vec::with_capacity(lower + 1);
        let mut lo = Vec::with_capacity(lower + 1);
        hi.push(0.0);
        lo.push(0.0);
        let (mut s, mut c) = (0.0f64, 0.0f64);
        for x in iter {
            let (t, e) = two_sum(s, x.hi);
            c += e + x.lo;
            // renormalise so that |lo| stays below half an ulp of hi
            let (h, l) = two_sum(t, c);
            s = h;
            c = l;
            hi.push(s);
            lo.push(c);
        }
        PrefixSums { hi, lo }
    }

    /// Sum of the values with indices in `[start, end)`.
    #[inline]
    pub fn sum(&self, start: usize, end: usize) -> f64 {
        let (d, e) = two_sum(self.hi[end], -self.hi[start]);
        d + (e + (self.lo[end] - self.lo[start]))
    }

    /// Mean over `[start, end)`, with the division carried out on the
    /// unrounded pair so that the result is the correctly rounded mean up to
    /// terms of order `eps^2`.
    #[inline]
    pub fn mean(&self, start: usize, end: usize) -> f64 {
        let (q, r) = self.mean_parts(start, end);
        q + r
    }

    /// Mean over `[start, end)` kept as a double-double.
    #[inline]
    pub fn mean_dd(&self, start: usize, end: usize) -> Dd {
        let (q, r) = self.mean_parts(start, end);
        Dd::renorm(q, r)
    }

    #[inline]
    fn mean_parts(&self, start: usize, end: usize) -> (f64, f64) {
        let n = (end - start) as f64;
        let (d, e) = two_sum(self.hi[end], -self.hi[start]);
        let tail = e + (self.lo[end] - self.lo[start]);
        let q = d / n;
        let (ph, pl) = two_prod_small(q, n);
        let rem = (d - ph) - pl;
        (q, (rem + tail) / n)
    }
}
