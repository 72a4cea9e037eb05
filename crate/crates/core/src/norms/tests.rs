use super::*;
use crate::calculus::{fractional_power_apply, log_operator};
use crate::operators::{
    build_bisectorial, build_dirichlet_laplacian_1d, build_nonnormal_sectorial, build_schrodinger_1d,
};
use crate::partitions::{build_bump, build_equidistant, build_homogeneous_dyadic, even_extension, to_inhomogeneous};
use crate::random;
use crate::symbols::Symbol;

fn hom() -> PartitionOfUnity {
    build_homogeneous_dyadic(build_bump())
}

fn diag(l: &[f64]) -> ModelOperator<f64> {
    let c: Vec<C<f64>> = l.iter().map(|v| cr(*v)).collect();
    build_nonnormal_sectorial(&c, 1.0, 0).unwrap()
}

/// Self-adjoint 1×1 operator with eigenvalue `l` (mesh `h = 2/√l`).
fn scalar_op(l: f64) -> ModelOperator<f64> {
    let op = build_schrodinger_1d(1, 2.0 / l.sqrt(), &[l / 2.0]).unwrap();
    assert!((op.eigenvalues().unwrap()[0].re - l).abs() < 1e-12 * l);
    op
}

fn block_norm(op: &ModelOperator<f64>, blocks: &[Block<f64>], n: i32) -> f64 {
    blocks
        .iter()
        .find(|b| b.index == n)
        .map_or(0.0, |b| op.measure().norm(&b.vector))
}

fn eigvec(op: &ModelOperator<f64>, k: usize) -> CVector<f64> {
    let mut c = vec![czero(); op.rank()];
    c[k] = cr(1.0);
    op.synthesize(&c)
}

fn rand_vec(n: usize, seed: u64) -> Vec<C<f64>> {
    random::complex_gaussian_vec(&mut random::rng(seed), n)
}

#[test]
fn eigenvector_on_plateau_keeps_its_norm() {
    let op = diag(&[1.0, 5.0, 0.1]);
    let x = eigvec(&op, 0);
    let nx = op.measure().norm(&x);
    let v = pl_square_norm(&op, &hom(), &x, 2.0, 0.0).unwrap();
    assert!((v - nx).abs() < 1e-12 * nx);
    let blocks = spectral_blocks(&op, &hom(), &x, 0.0).unwrap();
    assert!((block_norm(&op, &blocks, 0) - nx).abs() < 1e-12);
    for b in blocks.iter().filter(|b| b.index != 0) {
        assert!(op.measure().norm(&b.vector) < 1e-12);
    }
}

#[test]
fn overlap_sandwich_on_dirichlet() {
    let op = build_dirichlet_laplacian_1d::<f64>(64, 1.0).unwrap();
    for s in 0..20 {
        let x = rand_vec(64, s);
        let r = pl_square_norm(&op, &hom(), &x, 2.0, 0.0).unwrap() / op.measure().norm(&x);
        assert!(r >= 0.5f64.sqrt() - 1e-9 && r <= 1.0 + 1e-9, "ratio {r}");
        let w = pl_square_norm(&op, &hom(), &x, 2.0, 0.0).unwrap();
        let b = besov_discrete_norm(&op, &hom(), &x, 0.0, 2.0, 2.0).unwrap();
        assert!((w - b).abs() < 1e-12 * w);
    }
}

#[test]
fn fractional_sandwich() {
    let op = build_dirichlet_laplacian_1d::<f64>(48, 0.5).unwrap();
    for theta in [-1.0, 0.5, 1.0] {
        for s in 0..10 {
            let x = rand_vec(48, 100 + s);
            let ax = fractional_power_apply(&op, theta, &x).unwrap();
            let r = pl_square_norm(&op, &hom(), &x, 2.0, theta).unwrap() / op.measure().norm(&ax);
            let lo = 2f64.powf(-theta.abs() - 0.5);
            let hi = 2f64.powf(theta.abs());
            assert!(r >= lo * (1.0 - 1e-9) && r <= hi * (1.0 + 1e-9), "θ = {theta}: {r}");
        }
    }
}

#[test]
fn single_block_random_norm_is_deterministic() {
    let op = diag(&[1.0, 3.0]);
    let x = eigvec(&op, 0);
    let est = pl_random_norm(&op, &hom(), &x, 2.0, &RandomEnsemble::rademacher(3, 64), 0.0).unwrap();
    assert!((est.mean - op.measure().norm(&x)).abs() < 1e-12);
    assert_eq!(est.stderr, 0.0);
    assert_eq!(est.samples, 64);
}

#[test]
fn rademacher_square_identity() {
    let op = build_dirichlet_laplacian_1d::<f64>(64, 1.0).unwrap();
    for s in 0..5 {
        let x = rand_vec(64, 40 + s);
        let blocks = spectral_blocks(&op, &hom(), &x, 0.0).unwrap();
        let exact: f64 = blocks.iter().map(|b| op.measure().norm(&b.vector).powi(2)).sum();
        let est = pl_random_norm(&op, &hom(), &x, 2.0, &RandomEnsemble::rademacher(7 + s, 256), 0.0).unwrap();
        assert!((est.mean_sq - exact).abs() <= 3.0 * est.stderr_sq, "{} vs {exact}", est.mean_sq);
    }
}

#[test]
fn gaussian_and_rademacher_means_are_comparable() {
    let op = build_dirichlet_laplacian_1d::<f64>(32, 1.0).unwrap();
    let x = rand_vec(32, 9);
    let r = pl_random_norm(&op, &hom(), &x, 4.0, &RandomEnsemble::rademacher(1, 256), 0.0).unwrap();
    let g = pl_random_norm(&op, &hom(), &x, 4.0, &RandomEnsemble::gaussian(1, 256), 0.0).unwrap();
    let q = g.mean / r.mean;
    assert!((0.5..=2.0).contains(&q), "{q}");
}

#[test]
fn sup_norm_dominates_random_mean() {
    let op = build_dirichlet_laplacian_1d::<f64>(32, 1.0).unwrap();
    let x = rand_vec(32, 2);
    let ens = RandomEnsemble::rademacher(5, 64);
    let sup = pl_sup_norm(&op, &hom(), &x, 2.0, &ens, 0.0).unwrap();
    let mean = pl_random_norm(&op, &hom(), &x, 2.0, &ens, 0.0).unwrap().mean;
    assert!(sup >= mean);
    assert!(sup >= op.measure().norm(&x) * (1.0 - 1e-12));
}

#[test]
fn inhomogeneous_examples() {
    let inh = to_inhomogeneous(hom());
    let op = diag(&[0.1, 0.5, 1.0]);
    let x = rand_vec(3, 4);
    let v = pl_inhomogeneous_norm(&op, &inh, &x, 2.0, 0.0, &PlVariant::Square).unwrap();
    assert!((v - op.measure().norm(&x)).abs() < 1e-12);

    let op = diag(&[4.0, 0.3]);
    let e = eigvec(&op, 0);
    let blocks = spectral_blocks(&op, &inh, &e, 1.0).unwrap();
    let ne = op.measure().norm(&e);
    assert!((block_norm(&op, &blocks, 2) - ne).abs() < 1e-12);
    assert_eq!(blocks.iter().find(|b| b.index == 2).unwrap().weight, 4.0);
    assert!(blocks.iter().filter(|b| b.index != 2).all(|b| op.measure().norm(&b.vector) < 1e-12));
    let v = pl_inhomogeneous_norm(&op, &inh, &e, 2.0, 1.0, &PlVariant::Square).unwrap();
    assert!((v - 4.0 * op.measure().norm(&e)).abs() < 1e-12);

    let zero = vec![czero(); 2];
    let ens = PlVariant::Random(RandomEnsemble::rademacher(0, 8));
    assert_eq!(pl_inhomogeneous_norm(&op, &inh, &zero, 2.0, 1.0, &ens).unwrap(), 0.0);
    assert!(pl_inhomogeneous_norm(&op, &hom(), &e, 2.0, 1.0, &PlVariant::Square).is_err());
    assert!(pl_inhomogeneous_norm(&op, &inh, &e, 2.0, -1.0, &PlVariant::Square).is_err());
}

#[test]
fn continuous_square_of_t_exp() {
    let psi = Symbol::psi_exp(1.0, 1.0);
    let quad = QuadratureSpec::default();
    let op = build_dirichlet_laplacian_1d::<f64>(32, 0.3).unwrap();
    for s in 0..3 {
        let x = rand_vec(32, 60 + s);
        let v = continuous_square_norm(&op, &psi, 0.0, &x, 2.0, &quad).unwrap();
        let nx = op.measure().norm(&x);
        assert!((v - 0.5 * nx).abs() <= 1e-6 * nx, "{v} vs {}", 0.5 * nx);
    }
    assert_eq!(continuous_square_norm(&op, &psi, 0.0, &vec![czero(); 32], 2.0, &quad).unwrap(), 0.0);
}

#[test]
fn continuous_square_substitution_identity() {
    let psi = Symbol::psi_exp(1.0, 1.0);
    let quad = QuadratureSpec::default();
    let c: f64 = symbol_log_integral(&psi, 0.5, 2.0, &quad).unwrap();
    // ∫ s^{-1} s² e^{-2s} ds/s = ∫ e^{-2s} ds = 1/2
    assert!((c - 0.5f64).abs() < 1e-10);
    for l in [0.25, 1.0, 7.0] {
        let op = diag(&[l]);
        let x = eigvec(&op, 0);
        let v = continuous_square_norm(&op, &psi, 0.5, &x, 2.0, &quad).unwrap();
        assert!((v - l.sqrt() * c.sqrt()).abs() < 1e-8 * v, "λ = {l}");
    }
}

#[test]
fn besov_discrete_on_eigenvectors() {
    let op = diag(&[8.0, 12.0, 0.7]);
    let e = eigvec(&op, 0);
    let v = besov_discrete_norm(&op, &hom(), &e, 0.0, f64::INFINITY, 2.0).unwrap();
    assert!((v - 1.0).abs() < 1e-12);
    let blocks = spectral_blocks(&op, &hom(), &e, 0.0).unwrap();
    let outside: f64 = blocks
        .iter()
        .filter(|b| !(2..=4).contains(&b.index))
        .map(|b| op.measure().norm(&b.vector))
        .sum();
    assert!(outside < 1e-12);
    let e = eigvec(&op, 1);
    let v = besov_discrete_norm(&op, &hom(), &e, 0.0, f64::INFINITY, 2.0).unwrap();
    assert!((v - 0.5).abs() < 1e-12);
    let x = rand_vec(3, 5);
    let a = besov_discrete_norm(&op, &hom(), &x, 0.5, 3.0, 2.0).unwrap();
    let cx: Vec<_> = x.iter().map(|v| *v * C::new(-2.0, 1.0)).collect();
    let b = besov_discrete_norm(&op, &hom(), &cx, 0.5, 3.0, 2.0).unwrap();
    assert!((b - 5f64.sqrt() * a).abs() < 1e-12 * b);
    assert!(besov_discrete_norm(&op, &hom(), &x, 0.5, 0.5, 2.0).is_err());
}

#[test]
fn besov_continuous_substitution_identity() {
    let f = Symbol::window(hom(), 0);
    let quad = QuadratureSpec::default();
    let mut c0 = None;
    for l in [1.0, 3.0, 9.0, 27.0] {
        let op = diag(&[l]);
        let x = eigvec(&op, 0);
        let v = besov_continuous_norm(&op, &x, 0.5, 2.0, &f, 2.0, &quad).unwrap() / l.sqrt();
        match c0 {
            None => c0 = Some(v),
            Some(c) => assert!((v - c).abs() < 1e-6 * c, "λ = {l}: {v} vs {c}"),
        }
    }
    let op = diag(&[2.0]);
    assert_eq!(
        besov_continuous_norm(&op, &[czero()], 0.5, 2.0, &f, 2.0, &quad).unwrap(),
        0.0
    );
}

#[test]
fn besov_continuous_admissibility() {
    let op = diag(&[1.0, 2.0]);
    let x = rand_vec(2, 1);
    let quad = QuadratureSpec::default();
    let bare = Symbol::custom("bare", |z| z / (z + 1.0), true, None);
    assert_eq!(
        besov_continuous_norm(&op, &x, 0.5, 2.0, &bare, 2.0, &quad),
        Err(Error::MissingDecayCertificate)
    );
    let weak = Symbol::psi_exp(0.5, 1.0);
    assert!(matches!(
        besov_continuous_norm(&op, &x, 0.5, 2.0, &weak, 2.0, &quad),
        Err(Error::InvalidParameter(_))
    ));
    assert!(besov_continuous_norm(&op, &x, 0.5, 2.0, &Symbol::rational_power(1.0, 2.0), 2.0, &quad).is_ok());
    assert!(besov_continuous_norm(&op, &x, 0.5, f64::INFINITY, &Symbol::psi_exp(1.0, 1.0), 2.0, &quad).is_ok());
}

#[test]
fn quadrature_coverage_and_tail() {
    let psi = Symbol::psi_exp(1.0, 1.0);
    let q = QuadratureSpec::default().with_range(1e-2, 1e3);
    assert!(matches!(q.resolve(&psi, 0.0, 2.0, 1.0, 10.0), Err(Error::InvalidParameter(_))));
    let q = QuadratureSpec {
        override_coverage: true,
        ..q
    };
    assert!(matches!(q.resolve(&psi, 0.0, 2.0, 1.0, 10.0), Err(Error::TailTooLarge { .. })));
    let q = QuadratureSpec { tail_tol: 100.0, ..q };
    let r = q.resolve(&psi, 0.0, 2.0, 1.0, 10.0).unwrap();
    assert!(r.tail > 1.0 && r.tail <= 100.0);
    let r = QuadratureSpec::default().resolve(&psi, 0.0, 2.0, 1.0, 10.0).unwrap();
    assert!(r.t_lo <= 1.0 / 10240.0 && r.t_hi >= 1024.0 && r.tail <= 1e-13);
    let w: f64 = r.weights.iter().sum();
    assert!((w - (r.t_hi / r.t_lo).ln()).abs() < 1e-9);
}

#[test]
fn spec_json_round_trips() {
    let q: QuadratureSpec = serde_json::from_str(r#"{"nodes_per_decade": 16}"#).unwrap();
    assert_eq!(q.nodes_per_decade, 16);
    assert_eq!(q.rule, QuadratureRule::LogTrapezoid);
    let back: QuadratureSpec = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
    assert_eq!(back, q);
    let e: RandomEnsemble = serde_json::from_str(r#"{"seed": 4, "kind": "gaussian"}"#).unwrap();
    assert_eq!(e, RandomEnsemble::gaussian(4, 256));
    assert!(serde_json::from_str::<RandomEnsemble>(r#"{"seed": 4, "samples": 3}"#).is_err());
    assert!(RandomEnsemble::rademacher(0, 0).validate().is_err());
}

#[test]
fn k_functional_scalar_case() {
    for l in [0.3, 1.0, 17.0] {
        let op = scalar_op(l);
        let x = [cr(1.0)];
        let nx = op.measure().norm(&x);
        for t in [1e-3, 0.1, 1.0 / l, 2.0, 50.0] {
            let k = k_functional(&op, &x, t, 0.0, 1.0, 2.0).unwrap();
            assert!((k - 1f64.min(t * l) * nx).abs() < 1e-10, "λ = {l}, t = {t}: {k}");
        }
    }
    assert!(matches!(
        k_functional(&scalar_op(1.0), &[cr(1.0)], 1.0, 0.0, 1.0, 4.0),
        Err(Error::Unsupported(_))
    ));
}

fn brute_force_k(a: &[f64], l: &[f64], t: f64, th0: f64, th1: f64) -> f64 {
    let mu: Vec<f64> = l.iter().map(|v| v.powf(th0)).collect();
    let nu: Vec<f64> = l.iter().map(|v| v.powf(th1)).collect();
    let f = |y: &[f64]| {
        let p: f64 = (0..a.len()).map(|k| (mu[k] * (a[k] - y[k])).powi(2)).sum::<f64>().sqrt();
        let q: f64 = (0..a.len()).map(|k| (nu[k] * y[k]).powi(2)).sum::<f64>().sqrt();
        p + t * q
    };
    let mut y: Vec<f64> = a.iter().map(|v| v / 2.0).collect();
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..300 {
        for k in 0..a.len() {
            let (mut lo, mut hi) = (0.0, a[k]);
            for _ in 0..80 {
                let c = hi - g * (hi - lo);
                let d = lo + g * (hi - lo);
                y[k] = c;
                let fc = f(&y);
                y[k] = d;
                let fd = f(&y);
                if fc < fd {
                    hi = d;
                } else {
                    lo = c;
                }
            }
            y[k] = (lo + hi) / 2.0;
        }
    }
    let zero = vec![0.0; a.len()];
    f(&y).min(f(&zero)).min(f(a))
}

#[test]
fn k_functional_matches_brute_force() {
    let mut r = random::rng(11);
    for n in 2..=6 {
        let a: Vec<f64> = (0..n).map(|_| random::gaussian::<f64>(&mut r).abs() + 0.05).collect();
        let l: Vec<f64> = (0..n).map(|i| 0.2 * 2.5f64.powi(i)).collect();
        for t in [0.05, 0.3, 1.0, 4.0] {
            let k = k_functional_diagonal(&a, &l, t, 0.0, 1.0).unwrap();
            let b = brute_force_k(&a, &l, t, 0.0, 1.0);
            assert!((k - b).abs() <= 1e-6 * b, "n = {n}, t = {t}: {k} vs {b}");
            assert!(k <= b + 1e-12);
        }
    }
}

#[test]
fn k_functional_is_monotone_and_concave() {
    let op = build_dirichlet_laplacian_1d::<f64>(24, 0.5).unwrap();
    let x = rand_vec(24, 3);
    let ts: Vec<f64> = (0..50).map(|i| 10f64.powf(-4.0 + 6.0 * i as f64 / 49.0)).collect();
    let ks: Vec<f64> = ts.iter().map(|t| k_functional(&op, &x, *t, 0.0, 1.0, 2.0).unwrap()).collect();
    for i in 1..50 {
        assert!(ks[i] >= ks[i - 1] * (1.0 - 1e-12));
    }
    for i in 1..49 {
        // Concavity in t on a non-uniform grid.
        let s1 = (ks[i] - ks[i - 1]) / (ts[i] - ts[i - 1]);
        let s2 = (ks[i + 1] - ks[i]) / (ts[i + 1] - ts[i]);
        assert!(s2 <= s1 * (1.0 + 1e-9) + 1e-12, "at {}", ts[i]);
    }
}

#[test]
fn real_interpolation_eigenvector_oracle() {
    let quad = QuadratureSpec::default();
    for l in [0.25, 1.0, 16.0] {
        let op = scalar_op(l);
        let x = [C::new(0.6, -0.8)];
        let nx = op.measure().norm(&x);
        let v = real_interpolation_norm(&op, &x, 0.5, 2.0, 0.0, 1.0, &quad).unwrap();
        assert!((v - 2f64.sqrt() * l.sqrt() * nx).abs() < 1e-12 * v, "λ = {l}: {v}");
    }
    let op = build_dirichlet_laplacian_1d::<f64>(16, 1.0).unwrap();
    assert_eq!(
        real_interpolation_norm(&op, &vec![czero(); 16], 0.5, 2.0, 0.0, 1.0, &quad).unwrap(),
        0.0
    );
    assert!(real_interpolation_norm(&op, &rand_vec(16, 1), 1.5, 2.0, 0.0, 1.0, &quad).is_err());
}

#[test]
fn real_interpolation_converges_in_node_density() {
    let op = build_dirichlet_laplacian_1d::<f64>(32, 1.0).unwrap();
    let x = rand_vec(32, 8);
    let coarse = real_interpolation_norm(&op, &x, 0.5, 2.0, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
    let fine = real_interpolation_norm(
        &op,
        &x,
        0.5,
        2.0,
        0.0,
        1.0,
        &QuadratureSpec::default().with_nodes_per_decade(128),
    )
    .unwrap();
    assert!((coarse - fine).abs() < 1e-4 * fine);
    let b = besov_discrete_norm(&op, &hom(), &x, 0.5, 2.0, 2.0).unwrap();
    assert!(fine / b > 0.1 && fine / b < 10.0);
}

#[test]
fn strip_partition_sandwich() {
    let op = build_dirichlet_laplacian_1d::<f64>(48, 0.5).unwrap();
    let b = log_operator(&op).unwrap();
    let p = build_equidistant(build_bump());
    for s in 0..10 {
        let x = rand_vec(48, 200 + s);
        let r = pl_square_norm(&b, &p, &x, 2.0, 0.0).unwrap() / op.measure().norm(&x);
        assert!(r >= 0.5f64.sqrt() - 1e-9 && r <= 1.0 + 1e-9, "{r}");
    }
}

#[test]
fn bisectorial_bracket_holds() {
    let eigs: Vec<C<f64>> = [0.3, 1.2, 5.0, -0.7, -2.5, -9.0].iter().map(|v| cr(*v)).collect();
    let op = build_bisectorial(&eigs, 4.0, 2).unwrap();
    let p = even_extension(hom());
    for s in 0..5 {
        let x = rand_vec(6, 300 + s);
        let b = bisectorial_pl_bracket(&op, &p, &x, 0.0).unwrap();
        assert!(b.ratio >= b.lower * (1.0 - 1e-9) && b.ratio <= b.upper + 1e-9, "{b:?}");
    }
    assert!(bisectorial_pl_bracket(&op, &hom(), &rand_vec(6, 0), 0.0).is_err());
}

#[test]
fn complex_spectrum_is_rejected_by_windows() {
    let op = build_nonnormal_sectorial(&[C::new(1.0, 0.5), cr(2.0)], 1.0, 0).unwrap();
    assert!(matches!(
        pl_square_norm(&op, &hom(), &rand_vec(2, 0), 2.0, 0.0),
        Err(Error::SymbolDomain(_))
    ));
}

#[test]
fn single_precision_square_norm() {
    let op = build_dirichlet_laplacian_1d::<f32>(32, 1.0).unwrap();
    let x: Vec<C<f32>> = random::complex_gaussian_vec(&mut random::rng(1), 32);
    let r = pl_square_norm(&op, &hom(), &x, 2.0, 0.0).unwrap() / op.measure().norm(&x);
    assert!((std::f32::consts::FRAC_1_SQRT_2 - 1e-4..=1.0 + 1e-4).contains(&r));
}
