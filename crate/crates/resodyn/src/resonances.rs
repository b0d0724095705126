//! The effective operator on the doubled `N^2` space, its exact numerical
//! resonances, and the perturbative eigenvalue formulas.
//!
//! The operator is assembled from Kronecker products of the bare constituents
//! (`sigma * L_S` plus the lambda-quadratic bath term built from the infrared
//! inner product and `xi(0)`); that construction is kept deliberately separate
//! from [`BathFunctions::delta_table`] so the entrywise identity between the
//! two routes is a genuine cross-check, not a tautology. Eigenvalues are
//! labeled `(a, b)` by marching `sigma` up from zero and following each
//! eigenvalue to its diagonal parent.

use crate::bath::BathFunctions;
use crate::error::{Error, Result};
use crate::model::{CouplingParams, SystemSpec};
use crate::C64;
use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, EigVals, Eigh, Inverse, UPLO};

/// Row-major ordering of the doubled-space product basis: index `a*n + b`
/// carries the label `(a, b)`.
pub fn basis_labels(n: usize) -> Vec<(usize, usize)> {
    let mut labels = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            labels.push((a, b));
        }
    }
    labels
}

/// System Liouville operator `L_S = H_S (x) 1 - 1 (x) conj(H_S)` on the
/// doubled space, in the fixed row-major product-basis ordering; Hermitian.
pub fn liouvillian_ls(spec: &SystemSpec) -> Array2<C64> {
    let n = spec.dim();
    let eye = Array2::<C64>::eye(n);
    let hs = spec.hs();
    let hs_conj = hs.mapv(|z| z.conj());
    &kron(hs, &eye) - &kron(&eye, &hs_conj)
}

/// The finite effective operator `sigma * L_S + lambda^2 * diag(delta_{a,b})`
/// on the doubled space, with the quadratic term assembled from Kronecker
/// products of `G` so it stays an independent route to the diagonal.
#[derive(Debug, Clone)]
pub struct EffectiveOperator {
    sigma: f64,
    lambda: f64,
    n: usize,
    labels: Vec<(usize, usize)>,
    liouville: Array2<C64>,
    lambda_quad: Array2<C64>,
    matrix: Array2<C64>,
}

impl EffectiveOperator {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Dimension `N` of the underlying system (the operator is `N^2 x N^2`).
    pub fn system_dim(&self) -> usize {
        self.n
    }

    pub fn basis_labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    /// The assembled operator at the requested `sigma`.
    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// The sigma-independent quadratic block `lambda^2 * diag(delta)` (as
    /// built from the Kronecker route).
    pub fn lambda_quad(&self) -> &Array2<C64> {
        &self.lambda_quad
    }

    /// The operator re-assembled at an intermediate coupling `s` (used by the
    /// continuation labeling).
    fn at_sigma(&self, s: f64) -> Array2<C64> {
        &self.liouville.mapv(|z| z * s) + &self.lambda_quad
    }
}

/// Build the effective operator from the mean-field constituents:
/// `alpha = (1/2) <g, |k|^{-1} g> - i (pi/2) xi(0)` enters through
/// `-lambda^2 (alpha G^2 (x) 1 - alpha G (x) G + conj(alpha) G (x) G - conj(alpha) 1 (x) G^2)`,
/// which is diagonal in the product basis with entries `lambda^2 delta_{a,b}`.
pub fn effective_operator(
    spec: &SystemSpec,
    bf: &BathFunctions,
    cp: &CouplingParams,
) -> EffectiveOperator {
    let n = spec.dim();
    let alpha = C64::new(0.5 * bf.inner_1_over_k(), -0.5 * std::f64::consts::PI * bf.xi0());
    let eye = Array2::<C64>::eye(n);
    let mut g = Array2::<C64>::zeros((n, n));
    let mut g2 = Array2::<C64>::zeros((n, n));
    for a in 0..n {
        let ga = spec.g_levels()[a];
        g[(a, a)] = C64::new(ga, 0.0);
        g2[(a, a)] = C64::new(ga * ga, 0.0);
    }
    let gg = kron(&g, &g);
    let quad = &(&kron(&g2, &eye).mapv(|z| z * alpha) - &gg.mapv(|z| z * alpha))
        + &(&gg.mapv(|z| z * alpha.conj()) - &kron(&eye, &g2).mapv(|z| z * alpha.conj()));
    let l2 = cp.lambda() * cp.lambda();
    let lambda_quad = quad.mapv(|z| -l2 * z);
    let liouville = liouvillian_ls(spec);
    let matrix = &liouville.mapv(|z| z * cp.sigma()) + &lambda_quad;
    EffectiveOperator {
        sigma: cp.sigma(),
        lambda: cp.lambda(),
        n,
        labels: basis_labels(n),
        liouville,
        lambda_quad,
        matrix,
    }
}

/// Exact eigendecomposition of the effective operator, with each eigenvalue
/// labeled by its `sigma -> 0` parent `(a, b)`.
#[derive(Debug, Clone)]
pub struct ResonanceSpectrum {
    eigenvalues: Vec<C64>,
    labels: Vec<(usize, usize)>,
    right: Array2<C64>,
    left: Array2<C64>,
    biortho_residual: f64,
}

impl ResonanceSpectrum {
    /// Eigenvalues in label order (same order as [`Self::labels`]).
    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    /// The eigenvalue carrying label `(a, b)`.
    pub fn eigenvalue(&self, a: usize, b: usize) -> Option<C64> {
        self.labels
            .iter()
            .position(|&l| l == (a, b))
            .map(|i| self.eigenvalues[i])
    }

    /// Right eigenvectors as columns, in label order.
    pub fn right(&self) -> &Array2<C64> {
        &self.right
    }

    /// Left eigenvectors as columns, normalized so that
    /// `left^H * right = identity`.
    pub fn left(&self) -> &Array2<C64> {
        &self.left
    }

    /// Maximum deviation of `left^H * right` from the identity.
    pub fn biortho_residual(&self) -> f64 {
        self.biortho_residual
    }
}

/// Greedy nearest-neighbor assignment: returns `perm` with `next[perm[j]]`
/// matched to `prev[j]`.
fn assign_nearest(prev: &[C64], next: &[C64]) -> Vec<usize> {
    let n = prev.len();
    debug_assert_eq!(n, next.len());
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            pairs.push(((prev[i] - next[j]).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut perm = vec![usize::MAX; n];
    let mut used_next = vec![false; n];
    let mut assigned = 0;
    for (_, i, j) in pairs {
        if perm[i] == usize::MAX && !used_next[j] {
            perm[i] = j;
            used_next[j] = true;
            assigned += 1;
            if assigned == n {
                break;
            }
        }
    }
    perm
}

/// Number of geometric continuation steps from near-zero coupling up to the
/// requested `sigma`.
const CONTINUATION_STEPS: usize = 64;
/// Absolute collision tolerance below which two eigenvalues are reported as
/// degenerate and labeling is suspended.
const COLLISION_TOL: f64 = 1e-12;

/// Dense non-Hermitian eigendecomposition of the effective operator with
/// `(a, b)` labels assigned by sigma-continuation from the `sigma = 0`
/// diagonal. Diagonal-sector labels `(a, a)` are ordered by ascending
/// imaginary part, matching the ascending relaxation spectrum `xi_a`.
///
/// Errors with [`Error::DegenerateAtRequestedPoint`] when two eigenvalues
/// coincide within `1e-12` at the requested coupling (the exceptional point
/// `gamma = gamma*` of the two-level system is the canonical case).
pub fn resonances_numeric(op: &EffectiveOperator) -> Result<ResonanceSpectrum> {
    let m = op.system_dim() * op.system_dim();
    let labels = op.basis_labels().to_vec();

    if op.sigma() == 0.0 {
        // Exactly diagonal: labels are structural, no continuation needed.
        let eigenvalues: Vec<C64> = (0..m).map(|i| op.matrix()[(i, i)]).collect();
        check_im_floor(&eigenvalues)?;
        return Ok(ResonanceSpectrum {
            eigenvalues,
            labels,
            right: Array2::<C64>::eye(m),
            left: Array2::<C64>::eye(m),
            biortho_residual: 0.0,
        });
    }

    // March sigma up geometrically from sigma * 2^-20, dragging each
    // eigenvalue's label along by nearest-neighbor matching.
    let start = op.sigma() * 2.0_f64.powi(-20);
    let ratio = (op.sigma() / start).powf(1.0 / (CONTINUATION_STEPS - 1) as f64);
    let mut tracked: Vec<C64> = (0..m).map(|i| op.lambda_quad()[(i, i)]).collect();
    for k in 0..CONTINUATION_STEPS - 1 {
        let s = start * ratio.powi(k as i32);
        let vals = op
            .at_sigma(s)
            .eigvals()
            .map_err(|e| Error::compute("continuation eigensolver", e.to_string()))?;
        let vals: Vec<C64> = vals.to_vec();
        let perm = assign_nearest(&tracked, &vals);
        tracked = (0..m).map(|j| vals[perm[j]]).collect();
    }

    // Final step at the requested sigma with full eigenvector output.
    let (vals, vecs) = op
        .matrix()
        .eig()
        .map_err(|e| Error::compute("dense eigensolver", e.to_string()))?;
    let vals: Vec<C64> = vals.to_vec();
    let perm = assign_nearest(&tracked, &vals);
    let mut eigenvalues: Vec<C64> = (0..m).map(|j| vals[perm[j]]).collect();

    // Collisions at the requested point make the labeling meaningless for the
    // affected pair: report them rather than guessing.
    let mut collisions = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if (eigenvalues[i] - eigenvalues[j]).norm() <= COLLISION_TOL {
                collisions.push((labels[i], labels[j]));
            }
        }
    }
    if !collisions.is_empty() {
        return Err(Error::DegenerateAtRequestedPoint { pairs: collisions });
    }

    let mut right = Array2::<C64>::zeros((m, m));
    for j in 0..m {
        right.column_mut(j).assign(&vecs.column(perm[j]));
    }

    // Within the diagonal sector the sigma = 0 parents are all zero, so the
    // continuation cannot distinguish them; order those labels by ascending
    // imaginary part instead (the relaxation spectrum ordering).
    let mut diag_slots: Vec<usize> = Vec::new();
    for (i, &(a, b)) in labels.iter().enumerate() {
        if a == b {
            diag_slots.push(i);
        }
    }
    let mut diag_data: Vec<(C64, Array1<C64>)> = diag_slots
        .iter()
        .map(|&i| (eigenvalues[i], right.column(i).to_owned()))
        .collect();
    diag_data.sort_by(|x, y| (x.0.im, x.0.re).partial_cmp(&(y.0.im, y.0.re)).unwrap());
    for (slot, (val, vec)) in diag_slots.iter().zip(diag_data) {
        eigenvalues[*slot] = val;
        right.column_mut(*slot).assign(&vec);
    }

    check_im_floor(&eigenvalues)?;

    // Left eigenvectors from the inverse: columns of (X^-1)^H satisfy
    // left^H * right = identity by construction.
    let inv = right
        .inv()
        .map_err(|e| Error::compute("eigenvector inversion", e.to_string()))?;
    let left = inv.t().mapv(|z| z.conj());
    let gram = left.t().mapv(|z| z.conj()).dot(&right);
    let mut biortho_residual = 0.0_f64;
    for i in 0..m {
        for j in 0..m {
            let want = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            biortho_residual = biortho_residual.max((gram[(i, j)] - want).norm());
        }
    }

    Ok(ResonanceSpectrum { eigenvalues, labels, right, left, biortho_residual })
}

/// Resonances lie in the closed upper half plane; tolerate only eigensolver
/// roundoff below the axis.
fn check_im_floor(eigenvalues: &[C64]) -> Result<()> {
    for (i, e) in eigenvalues.iter().enumerate() {
        if e.im < -1e-10 {
            return Err(Error::compute(
                "resonance spectrum",
                format!("eigenvalue {i} has imaginary part {:.3e} below -1e-10", e.im),
            ));
        }
    }
    Ok(())
}

/// Real symmetric relaxation generator built from the level-pair decay data.
#[derive(Debug, Clone)]
pub struct TMatrix {
    matrix: Array2<f64>,
    xi: Array1<f64>,
    vectors: Array2<f64>,
}

impl TMatrix {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// Eigenvalues sorted ascending; `xi[0]` is the exact zero carried by the
    /// uniform vector.
    pub fn xi(&self) -> &Array1<f64> {
        &self.xi
    }

    /// Orthonormal eigenvectors as columns, ordered like [`Self::xi`].
    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    /// `x^T T x`, which equals `sum_{a<b} |T_{a,b}| |x_a - x_b|^2`.
    pub fn quadratic_form(&self, x: &Array1<f64>) -> f64 {
        x.dot(&self.matrix.dot(x))
    }
}

/// Build the relaxation matrix
/// `[T]_{a,b} = -(Im delta_{a,b} / |delta_{a,b}|^2) |[H_S]_{a,b}|^2` (a != b)
/// with diagonal entries fixed by exact zero row sums. Symmetric, positive
/// semidefinite, with the uniform vector in its null space.
///
/// Errors with [`Error::DivisionByZero`] when some `delta_{a,b}` vanishes
/// while the matching Hamiltonian element does not.
pub fn t_matrix(spec: &SystemSpec, bf: &BathFunctions) -> Result<TMatrix> {
    let n = spec.dim();
    let delta = bf.delta_table(spec);
    let hs = spec.hs();
    let mut t = Array2::<f64>::zeros((n, n));
    for a in 0..n {
        for b in a + 1..n {
            let d = delta[(a, b)];
            let h2 = hs[(a, b)].norm_sqr();
            if d.norm() == 0.0 {
                if h2 > 1e-24 {
                    return Err(Error::DivisionByZero { a, b });
                }
                continue;
            }
            let val = -(d.im / d.norm_sqr()) * h2;
            t[(a, b)] = val;
            t[(b, a)] = val;
        }
    }
    for a in 0..n {
        let off: f64 = (0..n).filter(|&b| b != a).map(|b| t[(a, b)]).sum();
        t[(a, a)] = -off;
    }

    let (xi, vectors) = t
        .eigh(UPLO::Lower)
        .map_err(|e| Error::compute("relaxation matrix eigendecomposition", e.to_string()))?;
    let scale = xi.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    if xi[0].abs() > 1e-12 * scale {
        return Err(Error::compute(
            "relaxation matrix",
            format!("expected a zero eigenvalue, found {:.3e}", xi[0]),
        ));
    }
    let mut xi = xi;
    // The uniform null vector is exact; snap the roundoff-level bottom
    // eigenvalue so downstream rates vanish identically for it.
    xi[0] = 0.0;
    Ok(TMatrix { matrix: t, xi, vectors })
}

/// Three-term perturbative expansion of the off-diagonal resonance:
///
/// ```text
/// eta_{a,b} = lambda^2 delta_{a,b} + sigma ([H_S]_{a,a} - [H_S]_{b,b})
///  - (sigma^2/lambda^2) (sum_{c != a} |[H_S]_{a,c}|^2 / (delta_{c,b} - delta_{a,b})
///                      + sum_{c != b} |[H_S]_{b,c}|^2 / (delta_{a,c} - delta_{a,b}))
/// ```
///
/// Errors with [`Error::DegenerateDenominator`] when a needed delta-difference
/// vanishes (a pairwise-distinctness violation); terms with zero numerator are
/// skipped without touching their denominator.
pub fn eta_ab(
    spec: &SystemSpec,
    bf: &BathFunctions,
    cp: &CouplingParams,
    a: usize,
    b: usize,
) -> Result<C64> {
    let n = spec.dim();
    if a == b || a >= n || b >= n {
        return Err(Error::config("indices", "eta is defined for distinct level pairs (a, b)"));
    }
    let delta = bf.delta_table(spec);
    let hs = spec.hs();
    let l2 = cp.lambda() * cp.lambda();
    let dab = delta[(a, b)];
    let mut eta = l2 * dab + cp.sigma() * (hs[(a, a)] - hs[(b, b)]);

    let scale = {
        let mut s = 0.0_f64;
        for v in delta.iter() {
            s = s.max(v.norm());
        }
        s.max(1.0)
    };
    let mut quad = C64::new(0.0, 0.0);
    for c in 0..n {
        if c != a {
            let num = hs[(a, c)].norm_sqr();
            if num > 0.0 {
                let den = delta[(c, b)] - dab;
                if den.norm() < 1e-14 * scale {
                    return Err(Error::DegenerateDenominator { a, b, c });
                }
                quad += num / den;
            }
        }
        if c != b {
            let num = hs[(b, c)].norm_sqr();
            if num > 0.0 {
                let den = delta[(a, c)] - dab;
                if den.norm() < 1e-14 * scale {
                    return Err(Error::DegenerateDenominator { a, b, c });
                }
                quad += num / den;
            }
        }
    }
    eta -= (cp.sigma() * cp.sigma() / l2) * quad;
    Ok(eta)
}

/// Leading-order diagonal resonance `2i (sigma^2/lambda^2) xi_a`, with `xi_a`
/// the `a`-th ascending eigenvalue of the relaxation matrix (so `a = 0` gives
/// an exact zero).
pub fn eps_a_approx(
    spec: &SystemSpec,
    bf: &BathFunctions,
    cp: &CouplingParams,
    a: usize,
) -> Result<C64> {
    if a >= spec.dim() {
        return Err(Error::config("indices", "level index out of range"));
    }
    let tm = t_matrix(spec, bf)?;
    let rate = 2.0 * cp.sigma() * cp.sigma() / (cp.lambda() * cp.lambda()) * tm.xi()[a];
    Ok(C64::new(0.0, rate))
}
