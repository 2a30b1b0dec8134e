//! Symmetric 2x2 tensor algebra: cofactors, closed-form eigendecomposition and
//! the projection onto the cone of positive-semidefinite matrices.

/// Symmetric 2x2 matrix `[[a11, a12], [a12, a22]]` with the off-diagonal stored once.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymTensor2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymTensor2 {
    pub const ZERO: SymTensor2 = SymTensor2 { a11: 0.0, a12: 0.0, a22: 0.0 };

    pub fn new(a11: f64, a12: f64, a22: f64) -> Self {
        SymTensor2 { a11, a12, a22 }
    }

    pub fn identity() -> Self {
        SymTensor2 { a11: 1.0, a12: 0.0, a22: 1.0 }
    }

    pub fn diag(d1: f64, d2: f64) -> Self {
        SymTensor2 { a11: d1, a12: 0.0, a22: d2 }
    }

    /// Cofactor matrix: `cof([[a,b],[b,c]]) = [[c,-b],[-b,a]]`.
    ///
    /// Satisfies `cof(t) * t = det(t) * I` exactly (same products, same rounding).
    pub fn cofactor(self) -> Self {
        SymTensor2 { a11: self.a22, a12: -self.a12, a22: self.a11 }
    }

    pub fn det(self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn trace(self) -> f64 {
        self.a11 + self.a22
    }

    pub fn add(self, o: SymTensor2) -> Self {
        SymTensor2 { a11: self.a11 + o.a11, a12: self.a12 + o.a12, a22: self.a22 + o.a22 }
    }

    pub fn sub(self, o: SymTensor2) -> Self {
        SymTensor2 { a11: self.a11 - o.a11, a12: self.a12 - o.a12, a22: self.a22 - o.a22 }
    }

    pub fn scale(self, s: f64) -> Self {
        SymTensor2 { a11: s * self.a11, a12: s * self.a12, a22: s * self.a22 }
    }

    /// Adds `s` to the diagonal (`self + s * I`).
    pub fn add_scaled_identity(self, s: f64) -> Self {
        SymTensor2 { a11: self.a11 + s, a12: self.a12, a22: self.a22 + s }
    }

    pub fn mul_vec(self, v: [f64; 2]) -> [f64; 2] {
        [self.a11 * v[0] + self.a12 * v[1], self.a12 * v[0] + self.a22 * v[1]]
    }

    /// Quadratic form `u . (self v)`.
    pub fn bilinear(self, u: [f64; 2], v: [f64; 2]) -> f64 {
        let av = self.mul_vec(v);
        u[0] * av[0] + u[1] * av[1]
    }

    pub fn frobenius_norm(self) -> f64 {
        (self.a11 * self.a11 + 2.0 * self.a12 * self.a12 + self.a22 * self.a22).sqrt()
    }

    /// Eigenvalues in ascending order, by the closed-form symmetric 2x2 formulas.
    pub fn eigenvalues(self) -> (f64, f64) {
        let mean = 0.5 * (self.a11 + self.a22);
        let delta = f64::hypot(0.5 * (self.a11 - self.a22), self.a12);
        (mean - delta, mean + delta)
    }

    pub fn min_eigenvalue(self) -> f64 {
        self.eigenvalues().0
    }

    /// Nearest (Frobenius) positive-semidefinite matrix: clip negative eigenvalues to zero.
    pub fn project_psd(self) -> Self {
        let (mu1, mu2) = self.eigenvalues();
        if mu1 >= 0.0 {
            return self;
        }
        if mu2 <= 0.0 {
            return SymTensor2::ZERO;
        }
        // Only the larger eigenvalue survives; rebuild mu2 * v v^T from the more
        // robustly determined of the two eigenvector candidates.
        let c1 = [self.a12, mu2 - self.a11];
        let c2 = [mu2 - self.a22, self.a12];
        let n1 = c1[0] * c1[0] + c1[1] * c1[1];
        let n2 = c2[0] * c2[0] + c2[1] * c2[1];
        let v = if n1 >= n2 { c1 } else { c2 };
        let nn = v[0] * v[0] + v[1] * v[1];
        if nn == 0.0 {
            // mu1 < 0 <= mu2 rules out a multiple of the identity, so nn > 0;
            // kept as a guard against pathological rounding.
            return SymTensor2::diag(mu2.max(0.0), 0.0);
        }
        let s = mu2 / nn;
        SymTensor2 { a11: s * v[0] * v[0], a12: s * v[0] * v[1], a22: s * v[1] * v[1] }
    }
}
