//! Right-hand side and single time steps.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{ScalarField, SpectrumField};
use crate::symbols::MultiplierSpec;
use crate::velocity::velocity_spectra;

use super::config::{Integrator, RunConfig};

/// `θ̂` at time `t` after `step_count` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub theta_hat: SpectrumField,
    pub step_count: u64,
}

impl SimState {
    pub fn new(theta_hat: SpectrumField) -> Self {
        SimState {
            t: 0.0,
            theta_hat,
            step_count: 0,
        }
    }

    pub fn theta(&self) -> ScalarField {
        self.theta_hat.to_real_unchecked()
    }
}

/// `−F[u·∇θ]`, pseudo-spectral with the product formed on the grid and the
/// result dealiased.
pub fn nonlinear_term(theta_hat: &SpectrumField, p: &MultiplierSpec) -> SpectrumField {
    let grid = theta_hat.grid();
    let (u1, u2) = velocity_spectra(theta_hat, p);
    let (t1, t2) = theta_hat.gradient();
    let u1 = u1.to_real_unchecked();
    let u2 = u2.to_real_unchecked();
    let t1 = t1.to_real_unchecked();
    let t2 = t2.to_real_unchecked();
    let adv: Vec<f64> = (0..grid.len())
        .map(|i| -(u1.values()[i] * t1.values()[i] + u2.values()[i] * t2.values()[i]))
        .collect();
    let mut out = ScalarField::from_raw(grid, adv).forward_unchecked();
    out.dealias_in_place();
    // u is divergence free, so the mean of u·∇θ vanishes
    out.coeffs_mut()[0] = Complex64::default();
    out
}

/// `exp(−κ|k|^{2α}τ)` for every mode.
fn decay_factors(theta_hat: &SpectrumField, kappa: f64, alpha: f64, tau: f64) -> Vec<f64> {
    let grid = theta_hat.grid();
    (0..grid.len())
        .map(|i| (-kappa * grid.radius(i).powf(2.0 * alpha) * tau).exp())
        .collect()
}

#[derive(Debug, Clone)]
struct Factors {
    dt: f64,
    half: Vec<f64>,
    full: Vec<f64>,
}

/// Stateless stepping for a fixed `(κ, α, P)`, caching the decay factors of
/// the last step size used.
#[derive(Debug, Clone)]
pub struct Stepper {
    kappa: f64,
    alpha: f64,
    p: MultiplierSpec,
    integrator: Integrator,
    cached: Option<Factors>,
    rates: Option<Vec<f64>>,
}

impl Stepper {
    pub fn new(config: &RunConfig) -> Self {
        Stepper {
            kappa: config.kappa,
            alpha: config.alpha,
            p: config.p,
            integrator: config.integrator,
            cached: None,
            rates: None,
        }
    }

    /// Advances by `dt`. A non-finite result is an error.
    pub fn step(&mut self, state: &SimState, dt: f64) -> Result<SimState> {
        let next = match self.integrator {
            Integrator::IfRk4 => self.if_rk4(&state.theta_hat, dt),
            Integrator::Rk4 => self.rk4(&state.theta_hat, dt),
        };
        if !next.is_finite() {
            return Err(Error::NonFinite("theta_hat"));
        }
        Ok(SimState {
            t: state.t + dt,
            theta_hat: next,
            step_count: state.step_count + 1,
        })
    }

    fn factors(&mut self, v: &SpectrumField, dt: f64) -> &Factors {
        let fresh =
            matches!(&self.cached, Some(f) if f.dt == dt && f.full.len() == v.coeffs().len());
        if !fresh {
            self.cached = Some(Factors {
                dt,
                half: decay_factors(v, self.kappa, self.alpha, dt / 2.0),
                full: decay_factors(v, self.kappa, self.alpha, dt),
            });
        }
        self.cached.as_ref().expect("just filled")
    }

    fn if_rk4(&mut self, v: &SpectrumField, h: f64) -> SpectrumField {
        let p = self.p;
        let n = |x: &SpectrumField| nonlinear_term(x, &p);
        let f = self.factors(v, h);
        let (e2, e) = (&f.half, &f.full);
        let comb = |f: &dyn Fn(usize) -> Complex64| -> SpectrumField {
            SpectrumField::from_raw(v.grid(), (0..v.coeffs().len()).map(f).collect())
        };
        let vc = v.coeffs();
        let a = n(v).scale(h);
        let ac = a.coeffs();
        let s1 = comb(&|i| e2[i] * (vc[i] + 0.5 * ac[i]));
        let b = n(&s1).scale(h);
        let bc = b.coeffs();
        let s2 = comb(&|i| e2[i] * vc[i] + 0.5 * bc[i]);
        let c = n(&s2).scale(h);
        let cc = c.coeffs();
        let s3 = comb(&|i| e[i] * vc[i] + e2[i] * cc[i]);
        let d = n(&s3).scale(h);
        let dc = d.coeffs();
        comb(&|i| e[i] * vc[i] + (e[i] * ac[i] + 2.0 * e2[i] * (bc[i] + cc[i]) + dc[i]) / 6.0)
    }

    fn rk4(&mut self, v: &SpectrumField, h: f64) -> SpectrumField {
        if self.rates.as_ref().map(Vec::len) != Some(v.coeffs().len()) {
            let grid = v.grid();
            self.rates = Some(
                (0..grid.len())
                    .map(|i| self.kappa * grid.radius(i).powf(2.0 * self.alpha))
                    .collect(),
            );
        }
        let rates = self.rates.as_ref().expect("rates");
        let p = self.p;
        let rhs = |x: &SpectrumField| {
            let mut out = nonlinear_term(x, &p);
            out.coeffs_mut()
                .iter_mut()
                .zip(x.coeffs())
                .zip(rates)
                .for_each(|((o, xv), r)| *o -= r * xv);
            out
        };
        let axpy = |x: &SpectrumField, k: &SpectrumField, w: f64| {
            SpectrumField::from_raw(
                x.grid(),
                x.coeffs()
                    .iter()
                    .zip(k.coeffs())
                    .map(|(a, b)| a + w * b)
                    .collect(),
            )
        };
        let k1 = rhs(v);
        let k2 = rhs(&axpy(v, &k1, h / 2.0));
        let k3 = rhs(&axpy(v, &k2, h / 2.0));
        let k4 = rhs(&axpy(v, &k3, h));
        let coeffs = (0..v.coeffs().len())
            .map(|i| {
                v.coeffs()[i]
                    + h / 6.0
                        * (k1.coeffs()[i]
                            + 2.0 * k2.coeffs()[i]
                            + 2.0 * k3.coeffs()[i]
                            + k4.coeffs()[i])
            })
            .collect();
        SpectrumField::from_raw(v.grid(), coeffs)
    }
}

/// One step of the configured integrator.
pub fn step(state: &SimState, config: &RunConfig, dt: f64) -> Result<SimState> {
    Stepper::new(config).step(state, dt)
}
