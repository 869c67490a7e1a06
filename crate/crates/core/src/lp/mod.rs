//! Order-by-order construction of the Lindstedt–Poincaré solution with the
//! artificial coupling term `eta * Delta`.

mod dump;
mod engine;
mod legendre;

pub use dump::CoefficientRecord;
pub use engine::{
    assemble_rhs, build_solution, eccentricity_factor, extract_bifurcation_coeffs, linear_operator,
    nonlinear_terms, solve_order_n, Rhs,
};
pub use legendre::{legendre_polys, legendre_terms};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::params::{CouplingCase, CouplingConstants, LibrationContext};
use crate::scalar::Scalar;
use crate::series::{EtaPoly, FreqSeries, Parity, TrigSeries, Truncation};

/// How the coupling parameter `eta` enters the coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EtaMode<T> {
    /// Coefficients are polynomials in `eta`; `degree` bounds the degree of `Delta`.
    Symbolic { degree: usize },
    /// `eta` is a fixed number.
    Numeric(T),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildConfig<T> {
    pub order: u32,
    pub eta: EtaMode<T>,
    /// Which of `alpha1, alpha2, alpha3, e` are carried as series variables.
    pub active: [bool; 4],
    pub n_poly_max: usize,
}

impl<T: Scalar> BuildConfig<T> {
    /// Symbolic in `eta` with the exact `Delta` degree `2(order - 1)`.
    pub fn symbolic(order: u32) -> Self {
        BuildConfig {
            order,
            eta: EtaMode::Symbolic { degree: 2 * order.saturating_sub(1) as usize },
            active: [true; 4],
            n_poly_max: crate::params::DEFAULT_N_POLY_MAX,
        }
    }

    pub fn numeric(order: u32, eta: T) -> Self {
        BuildConfig { eta: EtaMode::Numeric(eta), ..Self::symbolic(order) }
    }

    pub fn with_active(mut self, active: [bool; 4]) -> Self {
        self.active = active;
        self
    }

    pub fn with_eta_degree(mut self, degree: usize) -> Self {
        self.eta = EtaMode::Symbolic { degree };
        self
    }

    /// Highest power of `eta` stored in the coordinate coefficients.
    ///
    /// One more than the degree of `Delta`, because `z` (or `y`) carries the
    /// product `eta * Delta`.
    pub fn eta_cap(&self) -> usize {
        match self.eta {
            EtaMode::Symbolic { degree } => degree + 1,
            EtaMode::Numeric(_) => 0,
        }
    }

    pub fn trunc(&self) -> Truncation {
        Truncation::new(self.order, self.eta_cap())
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::Domain("order must be at least 1".into()));
        }
        if self.order > 30 {
            return Err(Error::Domain(format!("order {} too large", self.order)));
        }
        if !self.active[..3].iter().any(|&a| a) {
            return Err(Error::Domain("at least one amplitude must be active".into()));
        }
        if let EtaMode::Numeric(v) = self.eta {
            if !v.is_finite() {
                return Err(Error::Domain("eta must be finite".into()));
            }
        }
        Ok(())
    }
}

/// The three coordinate series, the frequency corrections and `Delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSet<T> {
    pub ctx: LibrationContext<T>,
    pub coupling: CouplingConstants<T>,
    pub config: BuildConfig<T>,
    /// Highest order whose coefficients are final.
    pub completed_order: u32,
    pub x: TrigSeries<T>,
    pub y: TrigSeries<T>,
    pub z: TrigSeries<T>,
    pub omega: FreqSeries<T>,
    pub nu: FreqSeries<T>,
    pub lambda: FreqSeries<T>,
    pub delta: FreqSeries<T>,
    /// Set when `eta = 0` in numeric mode left some `Delta` corrections free (they are stored as zero).
    pub delta_undetermined: bool,
}

impl<T: Scalar> SolutionSet<T> {
    pub fn case(&self) -> CouplingCase {
        self.coupling.case
    }

    pub fn trunc(&self) -> Truncation {
        self.config.trunc()
    }

    pub fn coords(&self) -> [&TrigSeries<T>; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn freqs(&self) -> [&FreqSeries<T>; 3] {
        [&self.omega, &self.nu, &self.lambda]
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.config.eta, EtaMode::Symbolic { .. })
    }

    /// The same solution as it stood after order `k`.
    ///
    /// Frequency and `Delta` corrections of amplitude order `k` are dropped,
    /// since they are fixed only at order `k + 1`.
    pub fn truncated_to(&self, k: u32) -> Self {
        let k = k.clamp(1, self.completed_order.max(1));
        let freq = |fs: &FreqSeries<T>| {
            let mut out = FreqSeries::new(fs.trunc());
            for (key, c) in fs.iter().filter(|(key, _)| key.order() < k) {
                out.add_term(*key, c);
            }
            out
        };
        SolutionSet {
            completed_order: k,
            x: self.x.truncated(k),
            y: self.y.truncated(k),
            z: self.z.truncated(k),
            omega: freq(&self.omega),
            nu: freq(&self.nu),
            lambda: freq(&self.lambda),
            delta: freq(&self.delta),
            ..self.clone()
        }
    }

    pub(crate) fn ring(&self) -> Ring<T> {
        Ring { mode: self.config.eta, cap: self.config.eta_cap() }
    }

    /// Empty solution with the linear frequencies and `d0000` in place.
    pub(crate) fn empty(ctx: &LibrationContext<T>, case: CouplingCase, config: BuildConfig<T>) -> Self {
        let tr = config.trunc();
        let lin = ctx.linear;
        let coupling = ctx.coupling(case);
        let z_parity = if case.z_is_sine() { Parity::Sin } else { Parity::Cos };
        SolutionSet {
            ctx: ctx.clone(),
            coupling,
            config,
            completed_order: 0,
            x: TrigSeries::new(Parity::Cos, tr),
            y: TrigSeries::new(Parity::Sin, tr),
            z: TrigSeries::new(z_parity, tr),
            omega: FreqSeries::constant(tr, EtaPoly::real(lin.omega0)),
            nu: FreqSeries::constant(tr, EtaPoly::real(lin.nu0)),
            lambda: FreqSeries::constant(tr, EtaPoly::real(lin.lambda0)),
            delta: FreqSeries::constant(tr, EtaPoly::real(coupling.d0000)),
            delta_undetermined: false,
        }
    }
}

/// Arithmetic on `eta` coefficients for a given mode.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Ring<T> {
    pub mode: EtaMode<T>,
    pub cap: usize,
}

/// Relative size below which a constant term counts as zero in exact `eta` division.
pub(crate) const RING_TOL: f64 = 1e-9;

impl<T: Scalar> Ring<T> {
    pub fn eta(&self) -> EtaPoly<T> {
        match self.mode {
            EtaMode::Symbolic { .. } => EtaPoly::eta(),
            EtaMode::Numeric(v) => EtaPoly::real(v),
        }
    }

    pub fn mul(&self, a: &EtaPoly<T>, b: &EtaPoly<T>) -> EtaPoly<T> {
        a.mul_trunc(b, self.cap)
    }

    /// Divides by `eta`; the flag reports a free value (numeric `eta = 0`).
    pub fn div_eta(&self, a: &EtaPoly<T>, scale: T) -> Result<(EtaPoly<T>, bool)> {
        let tol = T::lit(RING_TOL);
        match self.mode {
            EtaMode::Symbolic { .. } => Ok((a.div_eta(tol)?, false)),
            EtaMode::Numeric(v) => {
                if v != T::zero() {
                    Ok((a.scale(Complex::new(T::one() / v, T::zero())), false))
                } else if a.max_abs() <= tol * scale.max(T::one()) {
                    Ok((EtaPoly::zero(), true))
                } else {
                    Err(Error::Consistency(format!(
                        "coupling correction required at eta = 0 (residual {:e})",
                        a.max_abs()
                    )))
                }
            }
        }
    }
}
