//! Small numeric helpers shared across modules.

/// Compensated (Kahan) summation accumulator.
///
/// Keeps a running correction term so that long sums of small terms do not
/// lose low-order bits; used wherever partition functions or probability
/// masses are accumulated over many independent sets.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
