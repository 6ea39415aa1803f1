//! Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson).

use crate::scalar::Real;

/// Interpolant through strictly increasing knots `xs` with values `ys`.
///
/// Monotone data gives a monotone interpolant. Outside the knot range the
/// boundary segment is continued linearly with the end slope.
#[derive(Clone, Debug)]
pub struct MonotoneCubic<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> MonotoneCubic<T> {
    /// Returns `None` unless there are at least two knots with strictly
    /// increasing abscissae.
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Option<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n || xs.windows(2).any(|w| !(w[0] < w[1])) {
            return None;
        }
        let secants: Vec<T> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut slopes = vec![T::zero(); n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (a, b) = (secants[i - 1], secants[i]);
            slopes[i] = if a * b <= T::zero() {
                T::zero()
            } else {
                // Weighted harmonic mean keeps each segment monotone.
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w1 = T::lit(2.0) * h1 + h0;
                let w2 = h1 + T::lit(2.0) * h0;
                (w1 + w2) / (w1 / a + w2 / b)
            };
        }
        Some(Self { xs, ys, slopes })
    }

    pub fn x_range(&self) -> (T, T) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Slope used for linear continuation past the left end.
    pub fn left_slope(&self) -> T {
        self.slopes[0]
    }

    pub fn eval(&self, x: T) -> T {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.slopes[0] * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.slopes[n - 1] * (x - self.xs[n - 1]);
        }
        let i = match self.xs.binary_search_by(|k| k.partial_cmp(&x).expect("finite knots")) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_knots_and_lines() {
        let m = MonotoneCubic::<f64>::new(vec![0.0, 1.0, 3.0], vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(m.eval(1.0), 2.0);
        assert!((m.eval(2.0) - 3.0).abs() < 1e-12);
        assert!((m.eval(-1.0) - 0.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unsorted_knots() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_none());
        assert!(MonotoneCubic::<f64>::new(vec![0.0], vec![1.0]).is_none());
    }

    proptest! {
        #[test]
        fn monotone_data_gives_monotone_interpolant(
            steps in proptest::collection::vec((0.01f64..2.0, 0.0f64..3.0), 2..12),
            probes in proptest::collection::vec(0.0f64..1.0, 2..40),
        ) {
            let mut xs = vec![0.0];
            let mut ys = vec![0.0];
            for (dx, dy) in &steps {
                xs.push(xs.last().unwrap() + dx);
                ys.push(ys.last().unwrap() + dy);
            }
            let span = *xs.last().unwrap();
            let m = MonotoneCubic::new(xs, ys).unwrap();
            let mut p: Vec<f64> = probes.iter().map(|u| u * span).collect();
            p.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for w in p.windows(2) {
                prop_assert!(m.eval(w[0]) <= m.eval(w[1]) + 1e-12);
            }
        }
    }
}
