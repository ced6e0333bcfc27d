//! Scalar test functions for the quadrature and interpolation sweeps.

use gaussgrid::nodes::gauss_hermite_f64;
use serde::{Deserialize, Serialize};

/// `c_m = scale * m^{-decay}`, further divided by the dimension count when
/// `per_dimension` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub decay: f64,
    #[serde(default)]
    pub per_dimension: bool,
}

fn one() -> f64 {
    1.0
}

impl Default for Coefficients {
    fn default() -> Self {
        Self {
            scale: 1.0,
            decay: 0.0,
            per_dimension: false,
        }
    }
}

impl Coefficients {
    pub fn values(&self, dims: usize) -> Vec<f64> {
        let norm = if self.per_dimension { dims as f64 } else { 1.0 };
        (1..=dims)
            .map(|m| self.scale * (m as f64).powf(-self.decay) / norm)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `exp(sum_m c_m xi_m)`.
    ExpSum {
        #[serde(default)]
        c: Coefficients,
    },
    /// `prod_m (1 + a xi_m^2)^{-1}`.
    InverseQuadraticProduct {
        #[serde(default = "half")]
        a: f64,
    },
    /// `cos(sum_m c_m xi_m)`.
    CosSum {
        #[serde(default)]
        c: Coefficients,
    },
}

fn half() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedFunction {
    pub name: String,
    #[serde(flatten)]
    pub function: TestFunction,
}

impl TestFunction {
    /// The function fixed to `dims` parameters.
    pub fn bind(&self, dims: usize) -> BoundFunction {
        let c = match self {
            TestFunction::ExpSum { c } | TestFunction::CosSum { c } => c.values(dims),
            TestFunction::InverseQuadraticProduct { .. } => Vec::new(),
        };
        BoundFunction {
            function: self.clone(),
            dims,
            c,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundFunction {
    function: TestFunction,
    dims: usize,
    c: Vec<f64>,
}

impl BoundFunction {
    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Coordinates beyond `xi.len()` count as 0.
    pub fn eval(&self, xi: &[f64]) -> f64 {
        let padded;
        let xi = if xi.len() >= self.dims {
            &xi[..self.dims]
        } else {
            padded = [xi, &vec![0.0; self.dims - xi.len()]].concat();
            &padded[..]
        };
        match &self.function {
            TestFunction::ExpSum { .. } => self.c.iter().zip(xi).map(|(c, x)| c * x).sum::<f64>().exp(),
            TestFunction::CosSum { .. } => self.c.iter().zip(xi).map(|(c, x)| c * x).sum::<f64>().cos(),
            TestFunction::InverseQuadraticProduct { a } => xi.iter().map(|x| 1.0 / (1.0 + a * x * x)).product(),
        }
    }

    /// Integral against the standard Gaussian measure.
    pub fn integral(&self) -> f64 {
        let s2: f64 = self.c.iter().map(|c| c * c).sum();
        match &self.function {
            TestFunction::ExpSum { .. } => (0.5 * s2).exp(),
            TestFunction::CosSum { .. } => (-0.5 * s2).exp(),
            TestFunction::InverseQuadraticProduct { a } => {
                let gh = gauss_hermite_f64(200).expect("200 nodes are supported");
                let one_d = gh.integrate(|x| 1.0 / (1.0 + a * x * x));
                one_d.powi(self.dims as i32)
            }
        }
    }
}

/// The stand-in suite used when a config lists no functions.
pub fn default_suite() -> Vec<NamedFunction> {
    vec![
        NamedFunction {
            name: "f1".into(),
            function: TestFunction::ExpSum {
                c: Coefficients {
                    per_dimension: true,
                    ..Coefficients::default()
                },
            },
        },
        NamedFunction {
            name: "f2".into(),
            function: TestFunction::InverseQuadraticProduct { a: 0.5 },
        },
        NamedFunction {
            name: "f3".into(),
            function: TestFunction::CosSum {
                c: Coefficients {
                    scale: 1.0,
                    decay: 2.0,
                    per_dimension: false,
                },
            },
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::gaussian_batches;

    #[test]
    fn integrals_match_sample_means() {
        let batch = &gaussian_batches(3, 1, 400_000, 5)[0];
        for f in default_suite() {
            let b = f.function.bind(3);
            let mean = batch.iter().map(|x| b.eval(x)).sum::<f64>() / batch.len() as f64;
            assert!(
                (mean - b.integral()).abs() < 5e-3,
                "{}: {mean} vs {}",
                f.name,
                b.integral()
            );
        }
    }

    #[test]
    fn exp_sum_integral_is_the_mgf() {
        let b = default_suite()[0].function.bind(6);
        assert!((b.integral() - (1.0f64 / 12.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn parses_from_toml() {
        let f: NamedFunction =
            toml::from_str("name = \"g\"\nkind = \"cos_sum\"\nc = { scale = 0.5, decay = 1.0 }\n").unwrap();
        assert_eq!(f.function.bind(2).c, vec![0.5, 0.25]);
    }
}
