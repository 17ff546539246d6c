//! Composite Gauss-Legendre quadrature on radial panels, with exact
//! cumulative (indefinite) integration inside each panel.

use std::sync::OnceLock;

/// Points per panel.
pub const ORDER: usize = 16;

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

fn legendre_values(n: usize, z: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 2];
    p[0] = 1.0;
    if n + 1 >= 1 {
        p[1] = z;
    }
    for k in 2..n + 2 {
        p[k] = ((2 * k - 1) as f64 * z * p[k - 1] - (k - 1) as f64 * p[k - 2]) / k as f64;
    }
    p
}

struct Reference {
    x: Vec<f64>,
    w: Vec<f64>,
    /// `s[i][j]`: weight of node j in `int_{-1}^{x_i} f`.
    s: Vec<Vec<f64>>,
}

fn reference() -> &'static Reference {
    static R: OnceLock<Reference> = OnceLock::new();
    R.get_or_init(|| {
        let (x, w) = gauss_legendre(ORDER);
        let n = ORDER;
        // Interpolate f by its Legendre expansion, integrate term-wise:
        // int_{-1}^{y} P_k = (P_{k+1}(y) - P_{k-1}(y)) / (2k+1), and y + 1 for k = 0.
        let pj: Vec<Vec<f64>> = x.iter().map(|&xj| legendre_values(n, xj)).collect();
        let s = x
            .iter()
            .map(|&xi| {
                let pi = legendre_values(n, xi);
                let integ: Vec<f64> = (0..n)
                    .map(|k| {
                        if k == 0 {
                            xi + 1.0
                        } else {
                            (pi[k + 1] - pi[k - 1]) / (2 * k + 1) as f64
                        }
                    })
                    .collect();
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| w[j] * pj[j][k] * (2 * k + 1) as f64 / 2.0 * integ[k])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Reference { x, w, s }
    })
}

fn barycentric_weights() -> &'static [f64] {
    static W: OnceLock<Vec<f64>> = OnceLock::new();
    W.get_or_init(|| {
        let x = &reference().x;
        (0..ORDER)
            .map(|j| 1.0 / (0..ORDER).filter(|&k| k != j).map(|k| x[j] - x[k]).product::<f64>())
            .collect()
    })
}

/// Reference-panel matrix `S[i][j]`: weight of node j in `int_{-1}^{x_i} f`.
pub fn integration_matrix() -> &'static [Vec<f64>] {
    &reference().s
}

#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub start: usize,
    pub a: f64,
    pub b: f64,
}

/// Radial grid on `[0, r_max]` made of equal-order Gauss-Legendre panels.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    pub panels: Vec<Panel>,
}

/// Panel layout: the first panel has width `first_width`, later panels double
/// until they reach `max_width`.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub r_max: f64,
    pub first_width: f64,
    pub max_width: f64,
}

impl GridSpec {
    pub fn new(r_max: f64, max_width: f64) -> Self {
        GridSpec {
            r_max,
            first_width: (max_width / 64.0).min(0.02),
            max_width,
        }
    }
}

impl RadialGrid {
    pub fn new(spec: GridSpec) -> Self {
        let mut edges = vec![0.0];
        let mut width = spec.first_width.min(spec.max_width);
        let mut r = 0.0;
        while r < spec.r_max {
            let mut next = r + width;
            if spec.r_max - next < 0.25 * width {
                next = spec.r_max;
            }
            edges.push(next);
            r = next;
            width = (width * 2.0).min(spec.max_width);
        }
        Self::from_edges(&edges)
    }

    pub fn from_edges(edges: &[f64]) -> Self {
        let rf = reference();
        let mut r = Vec::with_capacity(ORDER * edges.len());
        let mut w = Vec::with_capacity(ORDER * edges.len());
        let mut panels = Vec::with_capacity(edges.len());
        for e in edges.windows(2) {
            let (a, b) = (e[0], e[1]);
            let half = 0.5 * (b - a);
            panels.push(Panel { start: r.len(), a, b });
            for k in 0..ORDER {
                r.push(a + half * (rf.x[k] + 1.0));
                w.push(half * rf.w[k]);
            }
        }
        RadialGrid { r, w, panels }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.panels.last().map(|p| p.b).unwrap_or(0.0)
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.w.iter().zip(f).map(|(w, f)| w * f).sum()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.r.iter().map(|&r| f(r)).collect()
    }

    /// Weights of `int_{a}^{r_i} f` inside the panel, scaled to physical width.
    pub fn panel_partial(&self, p: &Panel, i: usize, f: &[f64]) -> f64 {
        let rf = reference();
        let half = 0.5 * (p.b - p.a);
        let row = &rf.s[i];
        (0..ORDER).map(|j| row[j] * f[j]).sum::<f64>() * half
    }

    /// `F(r_i) = int_0^{r_i} f(t) dt` at every node.
    pub fn cumulative(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let mut carry = 0.0;
        for p in &self.panels {
            let seg = &f[p.start..p.start + ORDER];
            for i in 0..ORDER {
                out[p.start + i] = carry + self.panel_partial(p, i, seg);
            }
            carry += (0..ORDER).map(|j| self.w[p.start + j] * seg[j]).sum::<f64>();
        }
        out
    }

    /// `F(r_i) = int_{r_i}^{r_max} f(t) dt` at every node, accumulated from the right.
    pub fn cumulative_right(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let mut carry = 0.0;
        for p in self.panels.iter().rev() {
            let seg = &f[p.start..p.start + ORDER];
            let whole: f64 = (0..ORDER).map(|j| self.w[p.start + j] * seg[j]).sum();
            for i in 0..ORDER {
                let tail: f64 = (0..ORDER)
                    .map(|j| (self.w[p.start + j] - reference().s[i][j] * 0.5 * (p.b - p.a)) * seg[j])
                    .sum();
                out[p.start + i] = carry + tail;
            }
            carry += whole;
        }
        out
    }

    /// Split every panel into `parts(panel)` equal sub-panels.
    pub fn subdivide(&self, parts: impl Fn(&Panel) -> usize) -> RadialGrid {
        let mut edges = vec![self.panels.first().map(|p| p.a).unwrap_or(0.0)];
        for p in &self.panels {
            let m = parts(p).max(1);
            for k in 1..=m {
                edges.push(if k == m { p.b } else { p.a + (p.b - p.a) * k as f64 / m as f64 });
            }
        }
        Self::from_edges(&edges)
    }

    /// Evaluate the panel-wise interpolant of `f` at the nodes of `fine`, whose
    /// panels must nest inside the panels of `self`.
    pub fn interpolate_to(&self, fine: &RadialGrid, f: &[f64]) -> Vec<f64> {
        let rf = reference();
        let bw = barycentric_weights();
        let mut out = Vec::with_capacity(fine.len());
        let mut pi = 0;
        for fp in &fine.panels {
            let mid = 0.5 * (fp.a + fp.b);
            while pi + 1 < self.panels.len() && self.panels[pi].b <= mid {
                pi += 1;
            }
            let p = self.panels[pi];
            let seg = &f[p.start..p.start + ORDER];
            let half = 0.5 * (p.b - p.a);
            for k in 0..ORDER {
                let t = (fine.r[fp.start + k] - p.a) / half - 1.0;
                let mut num = 0.0;
                let mut den = 0.0;
                let mut exact = None;
                for j in 0..ORDER {
                    let d = t - rf.x[j];
                    if d == 0.0 {
                        exact = Some(seg[j]);
                        break;
                    }
                    let c = bw[j] / d;
                    num += c * seg[j];
                    den += c;
                }
                out.push(exact.unwrap_or(num / den));
            }
        }
        out
    }

    /// Multipole potential `y^j(r) = int f(t) r_<^j / r_>^{j+1} dt` of a radial density `f`
    /// (already including the `t^2` measure).
    pub fn multipole_potential(&self, f: &[f64], j: u32) -> Vec<f64> {
        let j = j as i32;
        let inner: Vec<f64> = f.iter().zip(&self.r).map(|(f, r)| f * r.powi(j)).collect();
        let outer: Vec<f64> = f.iter().zip(&self.r).map(|(f, r)| f / r.powi(j + 1)).collect();
        let ci = self.cumulative(&inner);
        let co = self.cumulative_right(&outer);
        self.r
            .iter()
            .enumerate()
            .map(|(i, r)| ci[i] / r.powi(j + 1) + co[i] * r.powi(j))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        let (x, w) = gauss_legendre(ORDER);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_exponential() {
        let g = RadialGrid::new(GridSpec::new(40.0, 1.0));
        let f = g.sample(|r| (-r).exp());
        let c = g.cumulative(&f);
        for (i, r) in g.r.iter().enumerate() {
            assert!((c[i] - (1.0 - (-r).exp())).abs() < 1e-14);
        }
        let cr = g.cumulative_right(&f);
        for (i, r) in g.r.iter().enumerate() {
            assert!((cr[i] - ((-r).exp() - (-40.0f64).exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolation_onto_subdivided_grid() {
        let g = RadialGrid::new(GridSpec::new(20.0, 2.0));
        let fine = g.subdivide(|_| 3);
        let f = g.sample(|r| r * (-0.7 * r).exp());
        let fi = g.interpolate_to(&fine, &f);
        for (i, &r) in fine.r.iter().enumerate() {
            assert!((fi[i] - r * (-0.7 * r).exp()).abs() < 1e-12);
        }
        assert!((fine.integrate(&fi) - g.integrate(&f)).abs() < 1e-13);
    }

    #[test]
    fn hydrogen_1s_potential() {
        // y^0 of the 1s density 4 r^2 e^{-2r}: 1/r - (1 + 1/r) e^{-2r}
        let g = RadialGrid::new(GridSpec::new(60.0, 1.0));
        let f = g.sample(|r| 4.0 * r * r * (-2.0 * r).exp());
        let y = g.multipole_potential(&f, 0);
        for (i, &r) in g.r.iter().enumerate() {
            let want = 1.0 / r - (1.0 + 1.0 / r) * (-2.0 * r).exp();
            assert!((y[i] - want).abs() < 1e-12 * want.abs().max(1.0), "r={r}");
        }
    }
}
