use gaussgrid::nodes::{gauss_hermite_f64, gaussian_leja, genz_keister, leja_objective, rule, GENZ_KEISTER_MAX_LEVEL};
use gaussgrid::NodeFamily;

/// `E[xi^j]` under N(0,1).
fn gaussian_moment(j: u32) -> f64 {
    if j % 2 == 1 {
        0.0
    } else {
        (1..j).step_by(2).map(f64::from).product()
    }
}

/// Quadrature error relative to the exact moment, or to `sum |w||x|^j`
/// when the moment vanishes.
fn moment_error(nodes: &[f64], weights: &[f64], j: u32) -> f64 {
    let q: f64 = nodes.iter().zip(weights).map(|(x, w)| w * x.powi(j as i32)).sum();
    let exact = gaussian_moment(j);
    let scale = if exact != 0.0 {
        exact
    } else {
        nodes
            .iter()
            .zip(weights)
            .map(|(x, w)| (w * x.powi(j as i32)).abs())
            .sum::<f64>()
            .max(1.0)
    };
    (q - exact).abs() / scale
}

#[test]
fn gauss_hermite_moments_up_to_twice_n_minus_one() {
    for n in 1..=20 {
        let r = gauss_hermite_f64(n).unwrap();
        for j in 0..=(2 * n as u32 - 1) {
            let e = moment_error(&r.nodes, &r.weights, j);
            assert!(e < 1e-12, "n={n} j={j} err={e:e}");
        }
        // degree 2n is not integrated exactly
        assert!(moment_error(&r.nodes, &r.weights, 2 * n as u32) > 1e-6);
    }
}

#[test]
fn genz_keister_tabulated_degrees() {
    for level in 0..=GENZ_KEISTER_MAX_LEVEL {
        let r = genz_keister::<f64>(level).unwrap();
        for j in 0..=r.exactness.unwrap() as u32 {
            let e = moment_error(&r.nodes, &r.weights, j);
            assert!(e < 1e-12, "level={level} j={j} err={e:e}");
        }
    }
}

#[test]
fn leja_prefixes_are_nested() {
    let full = gaussian_leja(150).unwrap();
    for n in [1, 2, 3, 10, 57, 149, 150] {
        assert_eq!(gaussian_leja(n).unwrap()[..], full[..n]);
    }
    for l in 0..40 {
        let coarse = rule::<f64>(NodeFamily::GaussianLeja, l).unwrap();
        let fine = rule::<f64>(NodeFamily::GaussianLeja, l + 1).unwrap();
        assert!(coarse.nodes.iter().all(|x| fine.nodes.contains(x)));
    }
}

#[test]
fn leja_nodes_maximize_the_weighted_product() {
    let nodes = gaussian_leja(30).unwrap();
    for n in 1..30 {
        let best = leja_objective(nodes[n], &nodes[..n]);
        for k in 0..=8000 {
            let x = -40.0 + 0.01 * k as f64;
            assert!(leja_objective(x, &nodes[..n]) <= best + 1e-9, "n={n} x={x}");
        }
    }
}

fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn leja_nodes_follow_the_semicircle_law() {
    let nodes = gaussian_leja(150).unwrap();
    let r = 2.0 * 150f64.sqrt();
    let cdf = |x: f64| {
        let t = (x / r).clamp(-1.0, 1.0);
        0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / std::f64::consts::PI
    };
    let d = ks_statistic(&nodes, cdf);
    assert!(d < 0.05, "KS = {d}");
}

#[test]
#[ignore = "Leja nodes spread like 2 sqrt(n); the statistic is about 0.43"]
fn leja_nodes_against_standard_normal() {
    let nodes = gaussian_leja(150).unwrap();
    let cdf = |x: f64| 0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2));
    let d = ks_statistic(&nodes, cdf);
    assert!(d < 0.15, "KS = {d}");
}

/// Abramowitz-Stegun 7.1.26, adequate for a KS statistic.
fn erf(x: f64) -> f64 {
    let t = 1.0 / (1.0 + 0.3275911 * x.abs());
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t + 0.254829592)
            * t
            * (-x * x).exp();
    y.copysign(x)
}
