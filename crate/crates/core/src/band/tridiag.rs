//! Lowest eigenpairs of a real symmetric tridiagonal matrix by Sturm
//! bisection and inverse iteration.

#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// off[i] couples rows i and i + 1.
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len());
        SymTridiag { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let denom = if q == 0.0 {
                f64::EPSILON * self.off[i - 1].abs().max(1e-300)
            } else {
                q
            };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The k-th smallest eigenvalue (k from 0), bisected to machine precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an accurately known eigenvalue, unit Euclidean norm.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 97) as f64 / 97.0).collect();
        let lu = ShiftedLu::factor(self, lambda);
        for _ in 0..3 {
            lu.solve(&mut x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// y = T x
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
    }
}

/// LU factors of T - σI with partial pivoting (two super-diagonals).
struct ShiftedLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swap: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiag, sigma: f64) -> Self {
        let n = t.len();
        let scale =
            t.diag.iter().map(|d| d.abs()).fold(0.0, f64::max) + t.off.iter().map(|e| e.abs()).fold(0.0, f64::max);
        let tiny = f64::EPSILON * scale.max(1e-300);
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut swap = vec![false; n];

        // working row i: (a, b, c) at columns i, i+1, i+2
        let mut a = t.diag[0] - sigma;
        let mut b = if n > 1 { t.off[0] } else { 0.0 };
        let mut c = 0.0;
        for i in 0..n {
            if i + 1 == n {
                u0[i] = if a == 0.0 { tiny } else { a };
                break;
            }
            let sub = t.off[i];
            let nd = t.diag[i + 1] - sigma;
            let nsup = if i + 2 < n { t.off[i + 1] } else { 0.0 };
            if sub.abs() > a.abs() {
                // pivot with the next row
                swap[i] = true;
                u0[i] = sub;
                u1[i] = nd;
                u2[i] = nsup;
                let m = a / sub;
                l[i] = m;
                a = b - m * nd;
                b = c - m * nsup;
                c = 0.0;
            } else {
                let piv = if a == 0.0 { tiny } else { a };
                u0[i] = piv;
                u1[i] = b;
                u2[i] = c;
                let m = sub / piv;
                l[i] = m;
                a = nd - m * b;
                b = nsup - m * c;
                c = 0.0;
            }
        }
        ShiftedLu { u0, u1, u2, l, swap }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.l[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            if i + 1 < n {
                v -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= self.u2[i] * x[i + 2];
            }
            x[i] = v / self.u0[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiag {
        SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 200;
        let t = laplacian(n);
        for k in 0..5 {
            let want = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenvectors_have_small_residual() {
        let n = 300;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + 1e-4 * (i as f64 - 150.0).powi(2)).collect();
        let t = SymTridiag::new(diag, vec![-1.0; n - 1]);
        let mut y = vec![0.0; n];
        let mut vs = Vec::new();
        for k in 0..4 {
            let lam = t.eigenvalue(k);
            let v = t.eigenvector(lam);
            t.apply(&v, &mut y);
            let r: f64 = y.iter().zip(&v).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
            assert!(r < 1e-12, "k={k} residual {r}");
            vs.push(v);
        }
        for i in 0..4 {
            for j in 0..i {
                let d: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
                assert!(d.abs() < 1e-10);
            }
        }
    }
}
