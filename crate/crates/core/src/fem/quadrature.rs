//! Symmetric quadrature on triangles (barycentric points, weights summing
//! to one) and Gauss–Legendre rules on `[0, 1]`.

/// One quadrature node: barycentric coordinates and weight relative to the area.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadPoint {
    pub bary: [f64; 3],
    pub weight: f64,
}

fn orbit3(a: f64, b: f64, weight: f64) -> [QuadPoint; 3] {
    [
        QuadPoint { bary: [a, b, b], weight },
        QuadPoint { bary: [b, a, b], weight },
        QuadPoint { bary: [b, b, a], weight },
    ]
}

fn orbit6(a: f64, b: f64, c: f64, weight: f64) -> [QuadPoint; 6] {
    [
        QuadPoint { bary: [a, b, c], weight },
        QuadPoint { bary: [a, c, b], weight },
        QuadPoint { bary: [b, a, c], weight },
        QuadPoint { bary: [b, c, a], weight },
        QuadPoint { bary: [c, a, b], weight },
        QuadPoint { bary: [c, b, a], weight },
    ]
}

/// Six-point rule exact for polynomials of degree 4 (Dunavant).
pub fn triangle_degree4() -> Vec<QuadPoint> {
    let mut rule = Vec::with_capacity(6);
    rule.extend(orbit3(0.108103018168070, 0.445948490915965, 0.223381589678011));
    rule.extend(orbit3(0.816847572980459, 0.091576213509771, 0.109951743655322));
    rule
}

/// Twelve-point rule exact for polynomials of degree 6 (Dunavant).
pub fn triangle_degree6() -> Vec<QuadPoint> {
    let mut rule = Vec::with_capacity(12);
    rule.extend(orbit3(0.501426509658179, 0.249286745170910, 0.116786275726379));
    rule.extend(orbit3(0.873821971016996, 0.063089014491502, 0.050844906370207));
    rule.extend(orbit6(0.053145049844817, 0.310352451033784, 0.636502499121399, 0.082851075618374));
    rule
}

/// Three-point Gauss–Legendre rule on `[0, 1]` as `(s, weight)` pairs.
pub fn gauss_legendre3() -> [(f64, f64); 3] {
    let r = 0.5 * (0.6f64).sqrt();
    [(0.5 - r, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + r, 5.0 / 18.0)]
}
