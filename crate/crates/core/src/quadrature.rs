//! Composite Simpson quadrature.

/// Integrates `f` over `[a, b]` with `panels` Simpson panels (rounded up to even).
pub fn simpson<F>(f: F, a: f64, b: f64, panels: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let n = panels.max(2) + panels % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + j as f64 * h);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 2);
        assert!((v - 3.75).abs() < 1e-13);
    }

    #[test]
    fn converges_on_smooth_periodic() {
        let v = simpson(|x| x.cos().powi(2), -std::f64::consts::PI, std::f64::consts::PI, 2048);
        assert!((v - std::f64::consts::PI).abs() < 1e-12);
    }
}
