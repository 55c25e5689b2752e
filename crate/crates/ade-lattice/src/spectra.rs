//! Spectral data of height graphs and the closed-form relations built on it:
//! the loop weight `lambda`, the positive node-weight vector `S`, Coxeter
//! numbers and exponents, the SLE parameter `kappa` on both branches, loop
//! fugacities, and minimal-model conformal data.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphKind, GraphSpec, Node};

/// Which lattice phase a relation refers to. The dilute branch lives at
/// `kappa <= 4`, the dense branch at `kappa >= 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Dilute,
    Dense,
}

/// Eigendata of a height graph for one selected eigenvalue.
///
/// `weights` (the vector `S`) is scaled so that its largest-magnitude
/// component equals +1; for the Perron choice (`selected_index == 0`) every
/// component is then strictly positive. Only ratios of components enter any
/// model weight, so the scale is a pure output convention.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralData {
    pub kind: GraphKind,
    /// All eigenvalues, sorted descending. Degenerate pairs are ordered by
    /// the lexicographically smallest sign-canonical eigenvector.
    pub eigenvalues: Vec<f64>,
    pub selected_index: usize,
    /// The selected eigenvalue.
    pub lambda: f64,
    /// Eigenvector for `lambda`, one entry per node.
    pub weights: Vec<f64>,
    /// Coxeter number, defined for the plain A/D/E kinds only.
    pub coxeter: Option<u32>,
    /// Coxeter exponents matching `eigenvalues` entrywise (A/D/E only).
    pub exponents: Option<Vec<u32>>,
    /// `kappa` on the dilute branch for the selected eigenvalue, when defined.
    pub kappa_dilute: Option<f64>,
    /// `kappa` on the dense branch for the selected eigenvalue, when defined.
    pub kappa_dense: Option<f64>,
}

/// Residual tolerance the eigensolve is checked against.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-12;

/// Compute the spectral data of `graph`, selecting the eigenvalue at
/// `selected_index` in the descending-sorted spectrum (0 = Perron-Frobenius).
pub fn spectrum(graph: &GraphSpec, selected_index: usize) -> Result<SpectralData> {
    let n = graph.node_count;
    if selected_index >= n {
        return Err(Error::Spectral(format!(
            "eigen index {selected_index} out of range for {n} nodes"
        )));
    }
    let mat = DMatrix::from_fn(n, n, |i, j| graph.adjacency[i][j] as f64);
    let eig = mat.clone().symmetric_eigen();

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            canonicalize_sign(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then_with(|| lex_cmp(&a.1, &b.1))
    });

    for (val, vec) in &pairs {
        let residual = eigen_residual(graph, *val, vec);
        assert!(
            residual < 1e-10,
            "eigen residual {residual:.2e} too large for lambda={val}"
        );
    }

    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let lambda = eigenvalues[selected_index];
    let mut weights = pairs[selected_index].1.clone();
    scale_max_to_one(&mut weights);

    let coxeter = if graph.kind.is_ade() {
        let h = (std::f64::consts::PI / (lambda_max_angle(eigenvalues[0]))).round();
        debug_assert!((2.0 * (std::f64::consts::PI / h).cos() - eigenvalues[0]).abs() < 1e-9);
        Some(h as u32)
    } else {
        None
    };

    let exponents: Option<Vec<u32>> = coxeter.map(|h| {
        eigenvalues
            .iter()
            .map(|&l| {
                let theta = (l / 2.0).clamp(-1.0, 1.0).acos();
                (theta * h as f64 / std::f64::consts::PI).round() as u32
            })
            .collect()
    });

    let (kappa_dilute, kappa_dense) = match (coxeter, &exponents) {
        (Some(h), Some(exps)) => {
            let hp = exps[selected_index];
            if hp >= h {
                (None, None)
            } else {
                (
                    Some(kappa_from_coxeter(h, hp, Phase::Dilute)?),
                    Some(kappa_from_coxeter(h, hp, Phase::Dense)?),
                )
            }
        }
        _ => {
            // Non-Coxeter kinds: invert the fugacity relation when possible.
            if (0.0..=2.0).contains(&lambda) {
                (
                    kappa_from_fugacity(lambda, Phase::Dilute).ok(),
                    kappa_from_fugacity(lambda, Phase::Dense).ok(),
                )
            } else {
                (None, None)
            }
        }
    };

    Ok(SpectralData {
        kind: graph.kind,
        eigenvalues,
        selected_index,
        lambda,
        weights,
        coxeter,
        exponents,
        kappa_dilute,
        kappa_dense,
    })
}

impl SpectralData {
    /// Reject spectra that cannot weight a loop gas. Model constructors call
    /// this before accepting an eigenvector.
    pub fn require_model_grade(&self) -> Result<()> {
        if self.lambda < 0.0 {
            return Err(Error::Spectral(format!(
                "selected eigenvalue {:.6} is negative; the loop measure needs lambda >= 0",
                self.lambda
            )));
        }
        Ok(())
    }

    /// True when no component of `weights` is (numerically) zero, so ratios
    /// of components are all well defined.
    pub fn weights_nonzero(&self) -> bool {
        self.weights.iter().all(|w| w.abs() > 1e-8)
    }

    pub fn s_ratio(&self, a: Node, b: Node) -> f64 {
        self.weights[a] / self.weights[b]
    }
}

fn lambda_max_angle(lambda_max: f64) -> f64 {
    (lambda_max / 2.0).clamp(-1.0, 1.0).acos()
}

fn canonicalize_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-9) {
        if *first < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

fn scale_max_to_one(v: &mut [f64]) {
    let (idx, _) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .unwrap();
    let scale = v[idx];
    for x in v.iter_mut() {
        *x /= scale;
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap() {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

/// Max-norm of `G s - lambda s`.
pub fn eigen_residual(graph: &GraphSpec, lambda: f64, s: &[f64]) -> f64 {
    (0..graph.node_count)
        .map(|i| {
            let gs: f64 = graph.neighbors[i].iter().map(|&j| s[j]).sum();
            (gs - lambda * s[i]).abs()
        })
        .fold(0.0, f64::max)
}

/// `kappa` from a Coxeter number and exponent. Dilute: `4h/(h+h')`; dense:
/// `4h/(h-h')`. Requires `1 <= h' < h`.
pub fn kappa_from_coxeter(h: u32, h_prime: u32, phase: Phase) -> Result<f64> {
    if h_prime == 0 || h_prime >= h {
        return Err(Error::Parameter(format!(
            "need 1 <= h' < h, got h' = {h_prime}, h = {h}"
        )));
    }
    let (h, hp) = (h as f64, h_prime as f64);
    Ok(match phase {
        Phase::Dilute => 4.0 * h / (h + hp),
        Phase::Dense => 4.0 * h / (h - hp),
    })
}

/// Loop fugacity and cluster count from `kappa`: `n = -2 cos(4 pi / kappa)`,
/// `Q = n^2` on the dense branch. Valid for `kappa` in (2, 8).
pub fn fugacity_from_kappa(kappa: f64) -> Result<(f64, f64)> {
    if !(2.0 < kappa && kappa < 8.0) {
        return Err(Error::Parameter(format!(
            "kappa = {kappa} outside the loop-gas window (2, 8)"
        )));
    }
    let n = -2.0 * (4.0 * std::f64::consts::PI / kappa).cos();
    Ok((n, n * n))
}

/// Invert the fugacity relation on the requested branch:
/// dilute resolves into (2, 4], dense into [4, 8).
pub fn kappa_from_fugacity(n: f64, phase: Phase) -> Result<f64> {
    if !(-2.0..=2.0).contains(&n) {
        return Err(Error::Parameter(format!("fugacity n = {n} outside [-2, 2]")));
    }
    let theta = (-n / 2.0).clamp(-1.0, 1.0).acos();
    let angle = match phase {
        Phase::Dense => theta,
        Phase::Dilute => 2.0 * std::f64::consts::PI - theta,
    };
    Ok(4.0 * std::f64::consts::PI / angle)
}

/// Critical fugacity of the dilute loop gas on the honeycomb lattice,
/// `x_c = (2 + sqrt(2 - n))^(-1/2)`, for `0 <= n <= 2`.
pub fn o_n_critical_point(n: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&n) {
        return Err(Error::Parameter(format!(
            "critical point defined for 0 <= n <= 2, got n = {n}"
        )));
    }
    Ok((2.0 + (2.0 - n).sqrt()).powf(-0.5))
}

/// Conformal data of the minimal model labeled by coprime `(p, p_lower)`.
#[derive(Debug, Clone, Serialize)]
pub struct MinimalModelData {
    pub p: u32,
    pub p_prime: u32,
    /// Central charge `1 - 6 (p - p')^2 / (p p')`.
    pub central_charge: f64,
    /// `kac[r-1][s-1] = h_{r,s}` for `1 <= r <= p'-1`, `1 <= s <= p-1`.
    pub kac: Vec<Vec<f64>>,
}

/// Populate the central charge and full Kac table for `(p, p')`, requiring
/// `p > p' >= 2` and coprimality.
pub fn minimal_model(p: u32, p_prime: u32) -> Result<MinimalModelData> {
    if p_prime < 2 || p <= p_prime {
        return Err(Error::Parameter(format!(
            "need p > p' >= 2, got ({p}, {p_prime})"
        )));
    }
    if gcd(p, p_prime) != 1 {
        return Err(Error::Parameter(format!("({p}, {p_prime}) are not coprime")));
    }
    let (pf, qf) = (p as f64, p_prime as f64);
    let central_charge = 1.0 - 6.0 * (pf - qf).powi(2) / (pf * qf);
    let kac = (1..p_prime)
        .map(|r| {
            (1..p)
                .map(|s| kac_weight(p, p_prime, r, s))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(MinimalModelData {
        p,
        p_prime,
        central_charge,
        kac,
    })
}

/// `h_{r,s} = ((r p - s p')^2 - (p - p')^2) / (4 p p')`.
pub fn kac_weight(p: u32, p_prime: u32, r: u32, s: u32) -> f64 {
    let (pf, qf, rf, sf) = (p as f64, p_prime as f64, r as f64, s as f64);
    ((rf * pf - sf * qf).powi(2) - (pf - qf).powi(2)) / (4.0 * pf * qf)
}

/// Kac weight as a continuous function of `kappa`:
/// `h_{r,s}(kappa) = ((r kappa - 4 s)^2 - (kappa - 4)^2) / (16 kappa)`.
///
/// At rational `kappa = 4p/p'` (dense) this agrees with the `(p, p')` table
/// entry `h_{r,s}`; on the dilute branch it agrees with `h_{s,r}`.
pub fn kac_weight_continuum(kappa: f64, r: u32, s: u32) -> f64 {
    let (rf, sf) = (r as f64, s as f64);
    ((rf * kappa - 4.0 * sf).powi(2) - (kappa - 4.0).powi(2)) / (16.0 * kappa)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Best rational approximation `kappa = 4 num / den` with `den <= max_den`,
/// returned as the minimal-model pair `(p, p')`. `None` when nothing within
/// `1e-9` exists.
pub fn rational_kappa(kappa: f64, max_den: u32) -> Option<(u32, u32)> {
    let target = kappa / 4.0;
    for den in 1..=max_den {
        let num = (target * den as f64).round();
        if num < 1.0 {
            continue;
        }
        let num = num as u32;
        if gcd(num, den) != 1 {
            continue;
        }
        if (target - num as f64 / den as f64).abs() < 1e-9 {
            // (p, p') with p > p': dense kappa = 4p/p', dilute kappa = 4p'/p.
            return if num > den { Some((num, den)) } else { Some((den, num)) };
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;

    fn spec(kind: GraphKind) -> SpectralData {
        spectrum(&GraphSpec::build(kind).unwrap(), 0).unwrap()
    }

    #[test]
    fn a3_perron_data() {
        let s = spec(GraphKind::A(3));
        assert!((s.lambda - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.coxeter, Some(4));
        // S proportional to (1, sqrt 2, 1), scaled so max = 1.
        let expect = [1.0 / 2f64.sqrt(), 1.0, 1.0 / 2f64.sqrt()];
        for (a, b) in s.weights.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn a2_is_the_triangular_ising_point() {
        let s = spec(GraphKind::A(2));
        assert!((s.lambda - 1.0).abs() < 1e-12);
        assert_eq!(s.coxeter, Some(3));
        assert!((s.kappa_dilute.unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn star_lambda_is_sqrt_q() {
        for q in 1..=9usize {
            let s = spec(GraphKind::Star(q));
            assert!((s.lambda - (q as f64).sqrt()).abs() < 1e-12, "q = {q}");
            assert!(s.coxeter.is_none());
        }
    }

    #[test]
    fn extended_diagrams_have_lambda_two_and_flat_ring_weights() {
        for kind in [
            GraphKind::ExtA(6),
            GraphKind::ExtD(4),
            GraphKind::ExtD(6),
            GraphKind::ExtE6,
            GraphKind::ExtE7,
            GraphKind::ExtE8,
        ] {
            let s = spec(kind);
            assert!((s.lambda - 2.0).abs() < 1e-12, "{}", kind.name());
        }
        let ring = spec(GraphKind::ExtA(6));
        for w in &ring.weights {
            assert!((w - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn e8_coxeter_number_is_thirty() {
        let s = spec(GraphKind::E8);
        assert!((s.lambda - 2.0 * (std::f64::consts::PI / 30.0).cos()).abs() < 1e-12);
        assert_eq!(s.coxeter, Some(30));
        assert_eq!(
            s.exponents.unwrap(),
            vec![1, 7, 11, 13, 17, 19, 23, 29]
        );
    }

    #[test]
    fn a_series_matches_sine_profile() {
        for m in 2..=20usize {
            let g = GraphSpec::build(GraphKind::A(m)).unwrap();
            let s = spectrum(&g, 0).unwrap();
            let h = (m + 1) as f64;
            assert!((s.lambda - 2.0 * (std::f64::consts::PI / h).cos()).abs() < 1e-10);
            let profile: Vec<f64> = (1..=m)
                .map(|a| (std::f64::consts::PI * a as f64 / h).sin())
                .collect();
            let peak = profile.iter().cloned().fold(0.0, f64::max);
            for (w, p) in s.weights.iter().zip(&profile) {
                assert!((w - p / peak).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eigenvalue_multiset_matches_exponents() {
        for kind in [
            GraphKind::A(7),
            GraphKind::D(4),
            GraphKind::D(5),
            GraphKind::E6,
            GraphKind::E7,
            GraphKind::E8,
        ] {
            let g = GraphSpec::build(kind).unwrap();
            let s = spectrum(&g, 0).unwrap();
            let h = s.coxeter.unwrap() as f64;
            for (l, hp) in s.eigenvalues.iter().zip(s.exponents.unwrap()) {
                let predicted = 2.0 * (std::f64::consts::PI * hp as f64 / h).cos();
                assert!((l - predicted).abs() < 1e-10, "{} h'={hp}", kind.name());
            }
        }
    }

    #[test]
    fn residuals_stay_small_for_every_eigenvector() {
        for kind in [GraphKind::A(9), GraphKind::D(6), GraphKind::E7, GraphKind::Star(5)] {
            let g = GraphSpec::build(kind).unwrap();
            for idx in 0..g.node_count {
                let s = spectrum(&g, idx).unwrap();
                assert!(eigen_residual(&g, s.lambda, &s.weights) < 1e-10);
            }
        }
    }

    #[test]
    fn kappa_windows() {
        for h in 3..=40u32 {
            let dilute = kappa_from_coxeter(h, 1, Phase::Dilute).unwrap();
            let dense = kappa_from_coxeter(h, 1, Phase::Dense).unwrap();
            assert!(dilute > 2.0 && dilute < 4.0);
            assert!(dense > 4.0 && dense < 8.0);
        }
        assert!(kappa_from_coxeter(4, 4, Phase::Dilute).is_err());
        assert!((kappa_from_coxeter(3, 1, Phase::Dilute).unwrap() - 3.0).abs() < 1e-15);
        assert!((kappa_from_coxeter(4, 1, Phase::Dense).unwrap() - 16.0 / 3.0).abs() < 1e-15);
        assert!((kappa_from_coxeter(6, 1, Phase::Dense).unwrap() - 4.8).abs() < 1e-15);
    }

    #[test]
    fn fugacity_relations_invert_on_each_branch() {
        assert!((fugacity_from_kappa(3.0).unwrap().0 - 1.0).abs() < 1e-14);
        assert!((fugacity_from_kappa(4.0).unwrap().0 - 2.0).abs() < 1e-14);
        let (n, q) = fugacity_from_kappa(16.0 / 3.0).unwrap();
        assert!((n - 2f64.sqrt()).abs() < 1e-14);
        assert!((q - 2.0).abs() < 1e-13);

        for phase in [Phase::Dilute, Phase::Dense] {
            for k in 1..40 {
                let kappa = match phase {
                    Phase::Dilute => 8.0 / 3.0 + (4.0 - 8.0 / 3.0) * k as f64 / 41.0,
                    Phase::Dense => 4.0 + 4.0 * k as f64 / 41.0,
                };
                let (n, _) = fugacity_from_kappa(kappa).unwrap();
                let back = kappa_from_fugacity(n, phase).unwrap();
                assert!((back - kappa).abs() < 1e-10, "kappa = {kappa}");
            }
        }
        assert!(fugacity_from_kappa(8.5).is_err());
    }

    #[test]
    fn critical_point_values() {
        assert!((o_n_critical_point(1.0).unwrap() - 3f64.powf(-0.5)).abs() < 1e-7);
        assert!((o_n_critical_point(2.0).unwrap() - 2f64.powf(-0.5)).abs() < 1e-7);
        assert!((o_n_critical_point(0.0).unwrap() - (2.0 + 2f64.sqrt()).powf(-0.5)).abs() < 1e-7);
        assert!(o_n_critical_point(2.5).is_err());
    }

    #[test]
    fn minimal_models() {
        let ising = minimal_model(4, 3).unwrap();
        assert!((ising.central_charge - 0.5).abs() < 1e-15);
        assert!((ising.kac[0][1] - 1.0 / 16.0).abs() < 1e-15);
        let tricritical = minimal_model(6, 5).unwrap();
        assert!((tricritical.central_charge - 0.8).abs() < 1e-15);
        assert!(minimal_model(6, 4).is_err());
        assert!(minimal_model(3, 4).is_err());

        // Kac-table symmetry h_{r,s} = h_{p'-r, p-s}.
        let m = minimal_model(7, 5).unwrap();
        for r in 1..5u32 {
            for s in 1..7u32 {
                let a = m.kac[(r - 1) as usize][(s - 1) as usize];
                let b = m.kac[(5 - r - 1) as usize][(7 - s - 1) as usize];
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn continuum_kac_matches_tables() {
        // Dense: kappa = 16/3 is the (4,3) model; h_{1,2} = 1/16.
        assert!((kac_weight_continuum(16.0 / 3.0, 1, 2) - kac_weight(4, 3, 1, 2)).abs() < 1e-13);
        // Dilute: kappa = 3 is also (4,3); continuum h_{1,2}(3) = table h_{2,1}.
        assert!((kac_weight_continuum(3.0, 1, 2) - kac_weight(4, 3, 2, 1)).abs() < 1e-13);
        assert_eq!(rational_kappa(16.0 / 3.0, 64), Some((4, 3)));
        assert_eq!(rational_kappa(3.0, 64), Some((4, 3)));
        assert_eq!(rational_kappa(4.8, 64), Some((6, 5)));
    }
}
