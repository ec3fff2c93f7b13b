//! Composite Gauss–Legendre rules on graded panels.

use std::sync::OnceLock;

/// Nodes per panel.
pub const GL_NODES: usize = 64;

fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(GL_NODES))
}

/// Singular point of the integrand in the `y` plane: real part `eta`,
/// distance `delta` from the real axis.
#[derive(Debug, Clone, Copy)]
pub struct Singularity {
    pub eta: f64,
    pub delta: f64,
}

/// Largest panel width allowed near singularities.
const SING_RATIO: f64 = 4.0;

fn singularity_limit(a: f64, h: f64, sing: &[Singularity]) -> bool {
    let (lo, hi) = if h >= 0.0 { (a, a + h) } else { (a + h, a) };
    sing.iter().all(|s| {
        let gap = if s.eta < lo {
            lo - s.eta
        } else if s.eta > hi {
            s.eta - hi
        } else {
            0.0
        };
        h.abs() <= SING_RATIO * gap.hypot(s.delta)
    })
}

/// Panel endpoints along `[0, T]` (`dir = 1`) or `[-T, 0]` (`dir = -1`),
/// ordered outward from zero.
///
/// The first width is `first`, widths then double, limited by
/// `cap(y)` and by the distance to the singularities.
pub fn half_axis_panels(
    t_max: f64,
    dir: f64,
    first: f64,
    cap: &dyn Fn(f64) -> f64,
    sing: &[Singularity],
    budget: usize,
) -> Option<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut y = 0.0;
    let mut h = first.min(t_max);
    while y < t_max * (1.0 - 1e-15) {
        h = h.min(cap(y)).min(t_max - y);
        while !singularity_limit(dir * y, dir * h, sing) {
            h *= 0.5;
        }
        out.push((dir * y, dir * (y + h)));
        if out.len() > budget {
            return None;
        }
        y += h;
        h *= 2.0;
    }
    Some(out)
}

/// Uniform panels along one half axis.
pub fn uniform_panels(t_max: f64, dir: f64, count: usize) -> Vec<(f64, f64)> {
    let h = t_max / count as f64;
    (0..count).map(|i| (dir * h * i as f64, dir * h * (i + 1) as f64)).collect()
}

/// Merges consecutive panel pairs (an odd last panel is kept).
pub fn merge_pairs(panels: &[(f64, f64)]) -> Vec<(f64, f64)> {
    panels
        .chunks(2)
        .map(|c| (c[0].0, c[c.len() - 1].1))
        .collect()
}

/// Nodes and weights of the composite rule; `edge` marks nodes of the
/// outermost panel on each side.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub edge: Vec<bool>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Rule over the union of the negative and positive half-axis panels.
pub fn composite(neg: &[(f64, f64)], pos: &[(f64, f64)]) -> Rule {
    let (x, w) = gauss_legendre();
    let mut rule = Rule { nodes: Vec::new(), weights: Vec::new(), edge: Vec::new() };
    let mut push = |panels: &[(f64, f64)]| {
        for (i, &(a, b)) in panels.iter().enumerate() {
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let edge = i + 1 == panels.len();
            for k in 0..x.len() {
                rule.nodes.push(mid + half * x[k]);
                rule.weights.push(half.abs() * w[k]);
                rule.edge.push(edge);
            }
        }
    };
    push(neg);
    push(pos);
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let (x, w) = gauss_legendre();
        assert_eq!(x.len(), GL_NODES);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn integrates_high_degree_polynomials() {
        let (x, w) = gauss_legendre();
        for deg in [0usize, 10, 62, 126] {
            let q: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((q - exact).abs() < 1e-14, "deg {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn graded_layout_covers_axis() {
        let sing = [Singularity { eta: 3.0, delta: 0.05 }];
        let p = half_axis_panels(40.0, 1.0, 0.1, &|_| 5.0, &sing, 10_000).unwrap();
        assert_eq!(p[0].0, 0.0);
        assert!((p.last().unwrap().1 - 40.0).abs() < 1e-12);
        assert!(p.windows(2).all(|w| w[0].1 == w[1].0));
        // panels crossing the singularity projection are narrow
        for &(a, b) in &p {
            if a <= 3.0 && 3.0 <= b {
                assert!(b - a <= 0.2 + 1e-12);
            }
        }
        let n = half_axis_panels(40.0, -1.0, 0.1, &|_| 5.0, &[], 10_000).unwrap();
        assert!((n.last().unwrap().1 + 40.0).abs() < 1e-12);
    }

    #[test]
    fn composite_gaussian() {
        let p = half_axis_panels(10.0, 1.0, 0.5, &|_| 2.0, &[], 100).unwrap();
        let n = half_axis_panels(10.0, -1.0, 0.5, &|_| 2.0, &[], 100).unwrap();
        let r = composite(&n, &p);
        let v: f64 = r.nodes.iter().zip(&r.weights).map(|(y, w)| w * (-y * y).exp()).sum();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        let c = composite(&merge_pairs(&n), &merge_pairs(&p));
        assert!(c.len() < r.len());
    }
}
