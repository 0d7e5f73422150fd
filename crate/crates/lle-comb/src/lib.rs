//! Stationary frequency combs of the damped, driven nonlinear Schrödinger
//! equation (the Lugiato–Lefever model of a ring resonator).
//!
//! Writing the intracavity field as `a = a1 + i a2` with detuning `zeta`,
//! dispersion `d != 0` and forcing `f`, the stationary problem on the circle
//! is the real system
//!
//! ```text
//!   -d a1'' = -a2 - zeta a1 + (a1^2 + a2^2) a1
//!   -d a2'' =  a1 - zeta a2 + (a1^2 + a2^2) a2 - f
//! ```
//!
//! restricted to even (cosine-series) profiles, i.e. a Neumann problem on
//! `[0, pi]` whose even `2 pi`-periodic extension solves the full problem.
//!
//! The crate provides, in dependency order:
//!
//! * [`trivial`] — the two closed-form families of spatially constant
//!   solutions: detuning-swept curves at fixed forcing and forcing-swept
//!   curves at fixed detuning, plus their shared algebraic invariant.
//! * [`bounds`] — explicit a-priori supremum bounds for all stationary
//!   solutions and the detuning window outside which only constant solutions
//!   exist.
//! * [`bifurcation`] — analytic location of the bifurcation points on the
//!   constant curves where cosine mode `k` loses stability, including the
//!   kernel vectors and the simplicity/transversality checks.
//! * [`grid`], [`field`], [`operator`] — the cosine-spectral discretization:
//!   collocation grid and transforms, nodal fields, the discrete residual and
//!   its exact coefficient-space Jacobian, and the linearized operator.
//! * [`newton`], [`eigen`] — a damped Newton corrector and a shift-invert
//!   subspace eigensolver for the smallest eigenvalues of the linearization.
//! * [`continuation`] — branch switching at a bifurcation point and
//!   pseudo-arclength continuation with turning-point, secondary-bifurcation
//!   and trivial-return event detection.
//! * [`validate`] — residual, integral-identity and bound checks for
//!   computed solutions.
//! * [`evolve`] — a Strang-splitting integrator for the time-dependent
//!   equation with a detuning ramp, used to capture solitons dynamically.
//! * [`io`], [`plot`], [`presets`], [`cli`] — CSV/JSON persistence, SVG
//!   bifurcation diagrams, bundled parameter presets and the command-line
//!   front end.
//!
//! Angles are never involved: the domain coordinate `x` always lives on
//! `[0, pi]` and integrals quoted on the full circle are twice the `[0, pi]`
//! integrals by evenness.

pub mod bifurcation;
pub mod bounds;
pub mod cli;
pub mod continuation;
pub mod eigen;
pub mod evolve;
pub mod field;
pub mod grid;
pub mod io;
pub mod newton;
pub mod operator;
pub mod params;
pub mod plot;
pub mod presets;
pub mod trivial;
pub mod validate;

pub use field::FieldState;
pub use grid::Grid;
pub use params::{Mode, Parameters};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation
    /// (e.g. a curve coordinate past the fold of the constant branch).
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition documented on the operation does not hold
    /// (e.g. requesting kernel vectors away from a bifurcation point).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An iteration failed to converge within its budget.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// The linearized system is numerically rank-deficient; expected exactly
    /// at bifurcation points, an error anywhere else.
    #[error("singular linearization: {0}")]
    SingularLinearization(String),

    /// The eigenvalue solver failed to settle.
    #[error("eigenvalue solver failed: {0}")]
    Eigen(String),

    /// A computed object violates a theorem that must hold for it — a bug
    /// trap, never an expected runtime outcome.
    #[error("theory violation: {0}")]
    TheoryViolation(String),

    /// Malformed on-disk data.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
