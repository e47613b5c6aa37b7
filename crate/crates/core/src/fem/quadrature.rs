//! Reference-triangle and reference-edge rules. Triangle points are given
//! in barycentric coordinates with weights summing to 1 (multiply by the
//! element area, or by `|det J| / 2` on the reference triangle).

/// Barycentric point with weight.
#[derive(Debug, Clone, Copy)]
pub struct TriPoint {
    pub bary: [f64; 3],
    pub weight: f64,
}

/// Exact for polynomials of degree 2.
pub fn triangle_degree2() -> Vec<TriPoint> {
    let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
    [[a, b, b], [b, a, b], [b, b, a]].into_iter().map(|bary| TriPoint { bary, weight: 1.0 / 3.0 }).collect()
}

/// Seven-point rule, exact for polynomials of degree 5.
pub fn triangle_degree5() -> Vec<TriPoint> {
    let s15 = 15f64.sqrt();
    let a1 = (6.0 - s15) / 21.0;
    let a2 = (6.0 + s15) / 21.0;
    let w1 = (155.0 - s15) / 1200.0;
    let w2 = (155.0 + s15) / 1200.0;
    let mut out = vec![TriPoint { bary: [1.0 / 3.0; 3], weight: 9.0 / 40.0 }];
    for (a, w) in [(a1, w1), (a2, w2)] {
        let b = 1.0 - 2.0 * a;
        for bary in [[b, a, a], [a, b, a], [a, a, b]] {
            out.push(TriPoint { bary, weight: w });
        }
    }
    out
}

/// Rule matched to a space of the given polynomial degree (exact for
/// degree `2·degree` products, with room for curved-element Jacobians).
pub fn triangle_rule(degree: usize) -> Vec<TriPoint> {
    if degree <= 1 { triangle_degree2() } else { triangle_degree5() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(rule: &[TriPoint], f: impl Fn(f64, f64) -> f64) -> f64 {
        // reference triangle (0,0), (1,0), (0,1): x = λ1, y = λ2, area 1/2
        rule.iter().map(|q| 0.5 * q.weight * f(q.bary[1], q.bary[2])).sum()
    }

    fn monomial_exact(i: u32, j: u32) -> f64 {
        // ∫ x^i y^j over the reference triangle = i! j! / (i + j + 2)!
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(i) * fact(j) / fact(i + j + 2)
    }

    #[test]
    fn rules_integrate_monomials_exactly() {
        for (rule, deg) in [(triangle_degree2(), 2), (triangle_degree5(), 5)] {
            assert!((rule.iter().map(|q| q.weight).sum::<f64>() - 1.0).abs() < 1e-15);
            for i in 0..=deg {
                for j in 0..=(deg - i) {
                    let got = integrate(&rule, |x, y| x.powi(i as i32) * y.powi(j as i32));
                    assert!((got - monomial_exact(i, j)).abs() < 1e-14, "x^{i} y^{j}");
                }
            }
        }
    }
}
