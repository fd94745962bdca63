//! Confocal shrink-down of a viscous ellipsoidal blob with a continuum of
//! sinks on the focal ellipsoid, and the moment conservation that makes
//! the exact solution falsifiable.
//!
//! The flow is not time-stepped: the confocal family Ω_{λ(t)} is the
//! exact solution, the sink measure is the time derivative of the
//! mother-body measure (a pure rescaling of the base measure since
//! dμ_λ/dμ = Vol(Ω_λ)/Vol(Ω)), and the checks verify that every harmonic
//! moment evolves exactly through the sinks.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::geometry::Ellipsoid;
use crate::moments::ellipsoid_mean;
use crate::poly::RatPoly;
use crate::potentials::{MotherBodyMeasure, PotentialOpts};

/// How λ(t) is parametrized over [0, T).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleMode {
    /// Vol(Ω_{λ(t)}) = Vol(Ω_0)·(1 − t/T): constant total pumping rate.
    ConstantRate,
    /// λ(t) = −a_N²·t/T.
    LinearLambda,
}

/// Monotone extraction schedule t ↦ λ(t) ∈ (−a_N², 0], shrinking the blob
/// down to the zero-volume focal set as t → T.
#[derive(Clone, Debug)]
pub struct ExtractionSchedule {
    base: Ellipsoid,
    total_time: f64,
    mode: ScheduleMode,
    vol0: f64,
    sq: Vec<f64>,
    min_sq: f64,
}

impl ExtractionSchedule {
    pub fn new(base: &Ellipsoid, total_time: f64, mode: ScheduleMode) -> Result<Self> {
        if !base.is_strict() {
            return Err(Error::DegenerateFocal);
        }
        if total_time.is_nan() || total_time <= 0.0 {
            return Err(Error::Invalid("schedule needs T > 0".into()));
        }
        let sq: Vec<f64> = base
            .semiaxes_sq()
            .iter()
            .map(|s| s.to_f64().unwrap())
            .collect();
        Ok(ExtractionSchedule {
            base: base.clone(),
            total_time,
            mode,
            vol0: base.volume(),
            min_sq: *sq.last().unwrap(),
            sq,
        })
    }

    pub fn base(&self) -> &Ellipsoid {
        &self.base
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn mode(&self) -> ScheduleMode {
        self.mode
    }

    pub fn initial_volume(&self) -> f64 {
        self.vol0
    }

    fn volume_of_lambda(&self, lambda: f64) -> f64 {
        let ball = crate::geometry::unit_ball_volume(self.sq.len());
        ball * self
            .sq
            .iter()
            .map(|s| (s + lambda).max(0.0).sqrt())
            .product::<f64>()
    }

    /// λ(t); strictly decreasing, λ(0) = 0, λ → −a_N² as t → T.
    pub fn lambda_at(&self, t: f64) -> Result<f64> {
        if !(0.0..self.total_time).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                total: self.total_time,
            });
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        match self.mode {
            ScheduleMode::LinearLambda => Ok(-self.min_sq * t / self.total_time),
            ScheduleMode::ConstantRate => {
                let target = self.vol0 * (1.0 - t / self.total_time);
                // Solve Σ log(a_j²+λ) = 2·log(target/V_N), increasing in λ.
                let ball = crate::geometry::unit_ball_volume(self.sq.len());
                let goal = 2.0 * (target / ball).ln();
                let f =
                    |l: f64| -> f64 { self.sq.iter().map(|s| (s + l).ln()).sum::<f64>() - goal };
                let fp = |l: f64| -> f64 { self.sq.iter().map(|s| 1.0 / (s + l)).sum() };
                let mut lo = -self.min_sq;
                let mut hi = 0.0;
                let mut l = -self.min_sq * t / self.total_time; // monotone seed
                for _ in 0..200 {
                    let v = f(l);
                    if v > 0.0 {
                        hi = l;
                    } else {
                        lo = l;
                    }
                    let mut next = l - v / fp(l);
                    if !(next > lo && next < hi) {
                        next = 0.5 * (lo + hi);
                    }
                    if (next - l).abs() <= 1e-15 * self.min_sq {
                        return Ok(next);
                    }
                    l = next;
                }
                Err(Error::RootFindFailed(format!("lambda(t) at t = {}", t)))
            }
        }
    }

    pub fn ellipsoid_at(&self, t: f64) -> Result<Ellipsoid> {
        self.base.confocal(self.lambda_at(t)?)
    }

    pub fn volume_at(&self, t: f64) -> Result<f64> {
        Ok(self.volume_of_lambda(self.lambda_at(t)?))
    }
}

/// The continuum sink measure dQ_t = −(d/dt) μ_{λ(t)} supported on the
/// focal ellipsoid. Confocal mother bodies share E and rescale by the
/// volume ratio, so dQ_t is the base measure times the volume extraction
/// rate divided by the initial volume.
pub struct SinkMeasure {
    schedule: ExtractionSchedule,
    mother_body: MotherBodyMeasure,
}

impl SinkMeasure {
    pub fn new(schedule: &ExtractionSchedule) -> Result<Self> {
        Ok(SinkMeasure {
            schedule: schedule.clone(),
            mother_body: MotherBodyMeasure::new(schedule.base())?,
        })
    }

    pub fn mother_body(&self) -> &MotherBodyMeasure {
        &self.mother_body
    }

    /// Total pumping rate ∫ dQ_t = −d/dt Vol(Ω_{λ(t)}) > 0, by the same
    /// extrapolated central differences the conservation residual uses.
    pub fn total_rate(&self, t: f64, dt: f64) -> Result<f64> {
        Ok(-volume_rate(&self.schedule, t, dt)?)
    }

    /// Sink density at a point of the focal hyperplane at time t.
    pub fn density(&self, y_plane: &[f64], t: f64, dt: f64) -> Result<f64> {
        Ok(self.total_rate(t, dt)? / self.schedule.initial_volume()
            * self.mother_body.density(y_plane))
    }

    /// ∫_E u dQ_t for a harmonic probe.
    pub fn integrate_probe(
        &self,
        u: &RatPoly,
        t: f64,
        dt: f64,
        opts: &PotentialOpts,
    ) -> Result<f64> {
        let q_u = sink_integral(&self.mother_body, u, opts)?;
        Ok(self.total_rate(t, dt)? * q_u / self.schedule.initial_volume())
    }
}

/// d/dt Vol(Ω_{λ(t)}) by Richardson-extrapolated central differences.
fn volume_rate(schedule: &ExtractionSchedule, t: f64, dt: f64) -> Result<f64> {
    let cd = |h: f64| -> Result<f64> {
        Ok((schedule.volume_at(t + h)? - schedule.volume_at(t - h)?) / (2.0 * h))
    };
    let full = cd(dt)?;
    let half = cd(0.5 * dt)?;
    Ok((4.0 * half - full) / 3.0)
}

/// One conservation-law evaluation at time t.
#[derive(Clone, Debug)]
pub struct RichardsonResidual {
    /// |d/dt ∫ u dV + ∫_E u dQ_t| / scale.
    pub residual: f64,
    /// Extrapolated central difference of the moment.
    pub moment_rate: f64,
    /// Sink-side value ∫_E u dQ_t.
    pub sink_rate: f64,
    /// Normalization used for the relative residual.
    pub scale: f64,
}

/// Σ |c_α| Π a_j^{α_j}: a sup-norm proxy for u on Ω, used only to scale
/// residuals of probes whose moments vanish identically.
pub fn probe_scale(u: &RatPoly, e: &Ellipsoid) -> f64 {
    let a = e.semiaxes();
    let mut acc = 0.0;
    for (m, c) in u.terms() {
        let mut t = c.to_f64().unwrap_or(0.0).abs();
        for (j, &p) in m.exps().iter().enumerate() {
            t *= a[j].powi(p as i32);
        }
        acc += t;
    }
    acc
}

/// ∫_E u dμ_0 via the mother-body quadrature (u restricted to x_N = 0).
pub fn sink_integral(mb: &MotherBodyMeasure, u: &RatPoly, opts: &PotentialOpts) -> Result<f64> {
    // Odd probes integrate to zero; the floor keeps the quadrature from
    // chasing a relative target on a vanishing value.
    let floor = opts.rel_tol * mb.base().volume() * probe_scale(u, mb.base()).max(1e-300);
    mb.integrate_scalar_abs(|y| u.eval_f64(y), opts, floor)
}

/// Richardson's conservation law in continuum-sink form at time t:
/// d/dt ∫_{Ω_{λ(t)}} u dV = −∫_E u dQ_t, with dQ_t the time derivative of
/// the shrinking mother-body measure. Central differences in t with one
/// Richardson extrapolation step; the same differences feed both sides so
/// the u = 1 mass balance holds by construction.
pub fn richardson_residual(
    schedule: &ExtractionSchedule,
    u: &RatPoly,
    t: f64,
    dt: f64,
) -> Result<RichardsonResidual> {
    if !u.laplacian().is_zero() {
        return Err(Error::HarmonicityViolated);
    }
    let opts = PotentialOpts {
        rel_tol: 1e-12,
        ..PotentialOpts::default()
    };
    let mb = MotherBodyMeasure::new(schedule.base())?;
    let q_u = sink_integral(&mb, u, &opts)?;
    richardson_residual_with_sink(schedule, u, t, dt, q_u)
}

/// Same, with ∫_E u dμ_0 precomputed (the sink integral is
/// time-independent up to the volume-rate factor).
pub fn richardson_residual_with_sink(
    schedule: &ExtractionSchedule,
    u: &RatPoly,
    t: f64,
    dt: f64,
    q_u: f64,
) -> Result<RichardsonResidual> {
    if !u.laplacian().is_zero() {
        return Err(Error::HarmonicityViolated);
    }
    let moment_at = |time: f64| -> Result<(f64, f64)> {
        let el = schedule.ellipsoid_at(time)?;
        let vol = el.volume();
        let mean = ellipsoid_mean(u, &el)?.to_f64().unwrap();
        Ok((vol * mean, vol))
    };
    let cd = |h: f64| -> Result<(f64, f64)> {
        let (ip, vp) = moment_at(t + h)?;
        let (im, vm) = moment_at(t - h)?;
        Ok(((ip - im) / (2.0 * h), (vp - vm) / (2.0 * h)))
    };
    let (cd_full, vr_full) = cd(dt)?;
    let (cd_half, vr_half) = cd(0.5 * dt)?;
    let moment_rate = (4.0 * cd_half - cd_full) / 3.0;
    let vol_rate = (4.0 * vr_half - vr_full) / 3.0;
    // dQ_t = −(dVol/dt)/Vol_0 · dμ_0, so ∫ u dQ_t = rate·Q_u/Vol_0.
    let rate = -vol_rate;
    let sink_rate = rate * q_u / schedule.initial_volume();
    let scale = (rate.abs() * probe_scale(u, schedule.base())).max(1e-300);
    Ok(RichardsonResidual {
        residual: (moment_rate + sink_rate).abs() / scale,
        moment_rate,
        sink_rate,
        scale,
    })
}

/// One row of the shrink-down trajectory.
#[derive(Clone, Debug, serde::Serialize)]
pub struct StepRecord {
    pub t: f64,
    pub lambda: f64,
    pub semiaxes: Vec<f64>,
    pub volume: f64,
    /// ∫_{Ω_{λ(t)}} u_k dV per probe.
    pub probe_moments: Vec<f64>,
    /// Largest relative conservation residual over the probes.
    pub residual: f64,
}

/// Evaluates the exact confocal solution on an equispaced time grid and
/// verifies the conservation law at every step.
pub fn simulate(
    e: &Ellipsoid,
    total_time: f64,
    steps: usize,
    probes: &[RatPoly],
) -> Result<Vec<StepRecord>> {
    let schedule = ExtractionSchedule::new(e, total_time, ScheduleMode::ConstantRate)?;
    simulate_schedule(&schedule, steps, probes)
}

pub fn simulate_schedule(
    schedule: &ExtractionSchedule,
    steps: usize,
    probes: &[RatPoly],
) -> Result<Vec<StepRecord>> {
    if steps == 0 {
        return Err(Error::Invalid("need at least one step".into()));
    }
    for u in probes {
        if !u.laplacian().is_zero() {
            return Err(Error::HarmonicityViolated);
        }
    }
    let opts = PotentialOpts {
        rel_tol: 1e-12,
        ..PotentialOpts::default()
    };
    let mb = MotherBodyMeasure::new(schedule.base())?;
    let sink_integrals: Vec<f64> = probes
        .iter()
        .map(|u| sink_integral(&mb, u, &opts))
        .collect::<Result<_>>()?;
    let total = schedule.total_time();
    let dt = total / 1e4;
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let t = total * i as f64 / steps as f64;
        let lambda = schedule.lambda_at(t)?;
        let el = schedule.base().confocal(lambda)?;
        let vol = el.volume();
        let probe_moments: Vec<f64> = probes
            .iter()
            .map(|u| Ok(vol * ellipsoid_mean(u, &el)?.to_f64().unwrap()))
            .collect::<Result<_>>()?;
        // Clamp the differencing stencil inside the schedule window.
        let t_res = t.clamp(dt, total - 2.0 * dt);
        let residual = probes
            .iter()
            .zip(&sink_integrals)
            .map(|(u, &q_u)| {
                richardson_residual_with_sink(schedule, u, t_res, dt, q_u).map(|r| r.residual)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0f64, f64::max);
        rows.push(StepRecord {
            t,
            lambda,
            semiaxes: el.semiaxes().to_vec(),
            volume: vol,
            probe_moments,
            residual,
        });
    }
    Ok(rows)
}

/// One row of the homothetic growth report (the exterior-drain analogue:
/// an expanding family t·Ω is an exact solution, and the shell between
/// successive fronts exerts no force in the cavity).
#[derive(Clone, Debug, serde::Serialize)]
pub struct GrowthRecord {
    pub factor: f64,
    pub volume: f64,
    /// |shell force| at the probe cavity point, for sampled rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cavity_force: Option<f64>,
}

/// Homothetic growth reporting mode: volumes grow like t^N and the cavity
/// stays force-free (checked at a fixed interior point on sampled rows).
pub fn simulate_growth(
    e: &Ellipsoid,
    end_factor: f64,
    steps: usize,
    check_cavity: bool,
) -> Result<Vec<GrowthRecord>> {
    if end_factor.is_nan() || end_factor <= 1.0 {
        return Err(Error::InvalidHomothety(end_factor));
    }
    if steps < 2 {
        return Err(Error::Invalid("growth needs at least two steps".into()));
    }
    let probe: Vec<f64> = e.semiaxes().iter().map(|a| 0.3 * a).collect();
    let opts = PotentialOpts::default();
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let factor = 1.0 + (end_factor - 1.0) * i as f64 / (steps - 1) as f64;
        let volume = e.volume() * factor.powi(e.dim() as i32);
        let cavity_force = if check_cavity && factor > 1.0 && (i == steps / 2 || i + 1 == steps) {
            let f = crate::potentials::shell_force(e, factor, &probe, &opts)?;
            Some(f.iter().map(|v| v * v).sum::<f64>().sqrt())
        } else {
            None
        };
        rows.push(GrowthRecord {
            factor,
            volume,
            cavity_force,
        });
    }
    Ok(rows)
}
