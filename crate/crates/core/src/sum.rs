//! Neumaier-compensated accumulation.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

/// Running compensated sum of `f64` values.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Compensated sum of a slice.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<NeumaierSum>().value()
}

/// Entrywise compensated accumulator for flat complex vectors.
#[derive(Clone, Debug)]
pub struct ComplexAccumulator {
    re: Vec<NeumaierSum>,
    im: Vec<NeumaierSum>,
}

impl ComplexAccumulator {
    pub fn new(len: usize) -> Self {
        ComplexAccumulator {
            re: vec![NeumaierSum::new(); len],
            im: vec![NeumaierSum::new(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    /// Adds `scale · values`.
    pub fn add_scaled(&mut self, scale: Complex64, values: &[Complex64]) {
        debug_assert_eq!(values.len(), self.re.len());
        for ((re, im), v) in self.re.iter_mut().zip(self.im.iter_mut()).zip(values) {
            let w = scale * v;
            re.add(w.re);
            im.add(w.im);
        }
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(r, i)| Complex64::new(r.value(), i.value()))
            .collect()
    }
}


/// Turns a row-major array of `width`-vectors over a box of the given shape
/// into inclusive prefix sums, one compensated sweep per axis. Afterwards
/// entry `k` holds the sum of all entries `j ≤ k` componentwise.
pub fn prefix_sums(values: &mut [Complex64], shape: &[usize], width: usize) {
    let points: usize = shape.iter().product();
    assert_eq!(values.len(), points * width, "buffer does not match shape");
    if points == 0 {
        return;
    }
    let mut stride = width;
    for &len in shape.iter().rev() {
        let block = stride * len;
        for start in (0..values.len()).step_by(block) {
            for lane in 0..stride {
                let mut re = NeumaierSum::new();
                let mut im = NeumaierSum::new();
                for step in 0..len {
                    let at = start + step * stride + lane;
                    re.add(values[at].re);
                    im.add(values[at].im);
                    values[at] = Complex64::new(re.value(), im.value());
                }
            }
        }
        stride = block;
    }
}
