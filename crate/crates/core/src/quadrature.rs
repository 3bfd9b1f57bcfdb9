//! Triangle quadrature.

/// Seven-point rule exact for polynomials of degree five, as barycentric
/// coordinates and weights normalised to sum to one (multiply by the area).
pub const STRANG_FIX_7: [([f64; 3], f64); 7] = {
    const A1: f64 = 0.059_715_871_789_769_82;
    const B1: f64 = 0.470_142_064_105_115_1;
    const W1: f64 = 0.132_394_152_788_506_2;
    const A2: f64 = 0.797_426_985_353_087_3;
    const B2: f64 = 0.101_286_507_323_456_3;
    const W2: f64 = 0.125_939_180_544_827_1;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
        ([A1, B1, B1], W1),
        ([B1, A1, B1], W1),
        ([B1, B1, A1], W1),
        ([A2, B2, B2], W2),
        ([B2, A2, B2], W2),
        ([B2, B2, A2], W2),
    ]
};

/// Integrates `f` over the triangle `(a, b, c)` of the given area.
pub fn integrate(a: [f64; 2], b: [f64; 2], c: [f64; 2], area: f64, f: impl Fn([f64; 2]) -> f64) -> f64 {
    STRANG_FIX_7
        .iter()
        .map(|(l, w)| {
            let x = [l[0] * a[0] + l[1] * b[0] + l[2] * c[0], l[0] * a[1] + l[1] * b[1] + l[2] * c[1]];
            w * f(x)
        })
        .sum::<f64>()
        * area
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_are_positive() {
        let s: f64 = STRANG_FIX_7.iter().map(|(_, w)| w).sum();
        assert!((s - 1.0).abs() < 1e-15);
        assert!(STRANG_FIX_7.iter().all(|(_, w)| *w > 0.0));
    }

    #[test]
    fn exact_for_degree_five_monomials() {
        // Reference triangle (0,0) (1,0) (0,1): int x^p y^q = p! q! / (p + q + 2)!.
        let fact = |n: u32| (1..=n).product::<u32>() as f64;
        for p in 0..=5u32 {
            for q in 0..=(5 - p) {
                let exact = fact(p) * fact(q) / fact(p + q + 2);
                let got = integrate([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], 0.5, |x| {
                    libm::pow(x[0], p as f64) * libm::pow(x[1], q as f64)
                });
                assert!((got - exact).abs() < 1e-15, "x^{p} y^{q}: {got} vs {exact}");
            }
        }
    }
}
