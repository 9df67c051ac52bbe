use crate::scalar::Real;

/// Gauss–Legendre rule mapped to `[0, 1]`; weights sum to 1.
#[derive(Clone, Debug)]
pub(crate) struct UnitGaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> UnitGaussLegendre<T> {
    /// Nodes are found by Newton's method on `P_n` in `f64` and then cast.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes.push(T::lit(0.5 * (1.0 - x)));
            weights.push(T::lit(0.5 * w));
        }
        UnitGaussLegendre { nodes, weights }
    }

    pub fn average(&self, mut f: impl FnMut(T) -> T) -> T {
        let mut acc = NeumaierSum::default();
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(t));
        }
        acc.value()
    }
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Compensated summation with a fixed accumulation order.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct NeumaierSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> NeumaierSum<T> {
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}
