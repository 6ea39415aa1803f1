//! Golden-section search for the maximum of a unimodal function on a bracket.

use crate::scalar::Real;

/// Returns `(argmax, max)` of `func` on `[a, b]`, assuming unimodality there.
pub fn golden_max<T, F>(func: F, a: T, b: T, xtol: T) -> (T, T)
where
    T: Real,
    F: Fn(T) -> T,
{
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = func(c);
    let mut fd = func(d);
    let floor = T::lit(4.0) * T::epsilon();
    while (b - a).abs() > xtol && (b - a).abs() > floor * (a.abs() + b.abs()) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = func(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = func(d);
        }
    }
    let x = (a + b) / T::lit(2.0);
    let fx = func(x);
    let mut best = (x, fx);
    for (xi, fi) in [(c, fc), (d, fd)] {
        if fi > best.1 {
            best = (xi, fi);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let (x, fx) = golden_max(|x: f64| -(x - 1.3) * (x - 1.3) + 2.0, 0.0, 5.0, 1e-12);
        assert!((x - 1.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn accepts_reversed_bracket() {
        let (x, _) = golden_max(|x: f64| (-(x - 0.5) * (x - 0.5)).exp(), 3.0, -2.0, 1e-10);
        assert!((x - 0.5).abs() < 1e-6);
    }
}
