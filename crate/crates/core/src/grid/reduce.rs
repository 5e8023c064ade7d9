//! Compensated accumulation used by every phase-space reduction.

/// Neumaier's improved Kahan summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// N independent compensated accumulators.
#[derive(Debug, Clone, Copy)]
pub struct NeumaierN<const N: usize>([Neumaier; N]);

impl<const N: usize> Default for NeumaierN<N> {
    fn default() -> Self {
        Self([Neumaier::default(); N])
    }
}

impl<const N: usize> NeumaierN<N> {
    #[inline]
    pub fn add(&mut self, x: &[f64; N]) {
        for (acc, &v) in self.0.iter_mut().zip(x) {
            acc.add(v);
        }
    }

    #[inline]
    pub fn add_scaled(&mut self, w: f64, x: &[f64; N]) {
        for (acc, &v) in self.0.iter_mut().zip(x) {
            acc.add(w * v);
        }
    }

    pub fn value(&self) -> [f64; N] {
        std::array::from_fn(|c| self.0[c].value())
    }
}

/// Compensated sum of a slice in index order.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let mut acc = Neumaier::default();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}
