//! Default tolerances used by the verification checks.
//!
//! Exact-arithmetic identities carry a zero tolerance; quadrature-backed
//! checks carry the accuracy the cubature targets plus headroom for the
//! comparison chain. CLI subcommands accept `--tol` to override.

/// Identities established in exact rational arithmetic.
pub const EXACT: f64 = 0.0;

/// Float renderings of exact identities (reproducing kernel, isotropic
/// harmonicity): f64 round-off through short arithmetic chains.
pub const FLOAT_IDENTITY: f64 = 1e-12;

/// Agreement of the volume potential with the mother-body potential at
/// exterior points (two independent cubatures at 1e-8 targets).
pub const MOTHER_BODY: f64 = 1e-6;

/// Mother-body total mass against the ellipsoid volume.
pub const MOTHER_BODY_MASS: f64 = 1e-8;

/// Cavity force magnitude relative to the boundary force scale.
pub const NEWTON_CAVITY: f64 = 1e-6;

/// Interior quadratic least-squares fit residual (relative).
pub const INTERIOR_FIT: f64 = 1e-5;

/// Equilibrium potential boundary identity V = 1 on Γ and per-surface
/// spread of V on confocal surfaces.
pub const EQUILIBRIUM: f64 = 1e-5;

/// Capacity homogeneity σ(t·Ω) = t^{N-2} σ(Ω).
pub const CAPACITY_SCALING: f64 = 1e-4;

/// One-sided boundary limits in the analytic-continuation check.
pub const CONTINUATION: f64 = 1e-5;

/// Off-band recurrence entries for ellipse Bergman polynomials.
pub const BERGMAN_OFFBAND: f64 = 1e-10;

/// Orthonormality residual of the Bergman basis.
pub const BERGMAN_GRAM: f64 = 1e-11;

/// Richardson continuum-sink residual for harmonic probes.
pub const RICHARDSON: f64 = 1e-6;

/// Mass-balance residual in the shrink-down evolution.
pub const MASS_BALANCE: f64 = 1e-10;

/// MacLaurin constancy applied to the Newtonian kernel (λ-sweep).
pub const KERNEL_MACLAURIN: f64 = 1e-6;

/// Relative error target for exterior potential cubature.
pub const CUBATURE_EXTERIOR: f64 = 1e-8;

/// Relative error target for interior potential cubature.
pub const CUBATURE_INTERIOR: f64 = 1e-6;
