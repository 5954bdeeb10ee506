//! Nonlinear systems `F(x) = 0`: the benchmark collection plus closure-backed
//! user systems and a forward-difference Jacobian.

mod builtin;

pub use builtin::{builtin, Builtin, BuiltinKind, DEFAULT_EX48_SIZE};

use rand::{Rng, SeedableRng};

use crate::error::{NlError, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;

/// A square nonlinear system with an analytic (or approximated) Jacobian.
pub trait NonlinearSystem<T: Scalar>: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    /// `true` when every component function is defined at `x`.
    fn in_domain(&self, _x: &Vector<T>) -> bool {
        true
    }

    fn residual(&self, x: &Vector<T>) -> Result<Vector<T>>;

    fn jacobian(&self, x: &Vector<T>) -> Result<Matrix<T>>;

    fn initial_guess(&self) -> Vector<T>;

    /// Reference solution, when known.
    fn root(&self) -> Option<Vector<T>> {
        None
    }
}

impl<T: Scalar, S: NonlinearSystem<T> + ?Sized> NonlinearSystem<T> for Box<S> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn in_domain(&self, x: &Vector<T>) -> bool {
        (**self).in_domain(x)
    }
    fn residual(&self, x: &Vector<T>) -> Result<Vector<T>> {
        (**self).residual(x)
    }
    fn jacobian(&self, x: &Vector<T>) -> Result<Matrix<T>> {
        (**self).jacobian(x)
    }
    fn initial_guess(&self) -> Vector<T> {
        (**self).initial_guess()
    }
    fn root(&self) -> Option<Vector<T>> {
        (**self).root()
    }
}

type VecMap<T> = Box<dyn Fn(&Vector<T>) -> Vector<T> + Send + Sync>;
type MatMap<T> = Box<dyn Fn(&Vector<T>) -> Matrix<T> + Send + Sync>;
type Guard<T> = Box<dyn Fn(&Vector<T>) -> bool + Send + Sync>;

/// A user-defined system built from closures. Without an analytic Jacobian
/// the forward-difference approximation is used.
pub struct FnSystem<T: Scalar> {
    name: String,
    x0: Vector<T>,
    f: VecMap<T>,
    jac: Option<MatMap<T>>,
    guard: Option<Guard<T>>,
    root: Option<Vector<T>>,
}

impl<T: Scalar> FnSystem<T> {
    pub fn new(name: impl Into<String>, x0: Vector<T>, f: impl Fn(&Vector<T>) -> Vector<T> + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            x0,
            f: Box::new(f),
            jac: None,
            guard: None,
            root: None,
        }
    }

    pub fn with_jacobian(mut self, jac: impl Fn(&Vector<T>) -> Matrix<T> + Send + Sync + 'static) -> Self {
        self.jac = Some(Box::new(jac));
        self
    }

    pub fn with_domain(mut self, guard: impl Fn(&Vector<T>) -> bool + Send + Sync + 'static) -> Self {
        self.guard = Some(Box::new(guard));
        self
    }

    pub fn with_root(mut self, root: Vector<T>) -> Self {
        self.root = Some(root);
        self
    }

    fn check_domain(&self, x: &Vector<T>) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(NlError::DomainError {
                problem: self.name.clone(),
                reason: "domain guard rejected the point".into(),
            })
        }
    }
}

impl<T: Scalar> NonlinearSystem<T> for FnSystem<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.x0.len()
    }

    fn in_domain(&self, x: &Vector<T>) -> bool {
        self.guard.as_ref().is_none_or(|g| g(x))
    }

    fn residual(&self, x: &Vector<T>) -> Result<Vector<T>> {
        crate::linalg::check_len(self.dim(), x.len())?;
        self.check_domain(x)?;
        let fx = (self.f)(x);
        crate::linalg::check_len(self.dim(), fx.len())?;
        Ok(fx)
    }

    fn jacobian(&self, x: &Vector<T>) -> Result<Matrix<T>> {
        crate::linalg::check_len(self.dim(), x.len())?;
        self.check_domain(x)?;
        match &self.jac {
            Some(j) => Ok(j(x)),
            None => fd_jacobian(self, x, None),
        }
    }

    fn initial_guess(&self) -> Vector<T> {
        self.x0.clone()
    }

    fn root(&self) -> Option<Vector<T>> {
        self.root.clone()
    }
}

/// Default forward-difference step `10^(-digits/3)`.
pub fn default_fd_step<T: Scalar>() -> T {
    T::pow10(-((T::decimal_digits() / 3).max(1) as i32))
}

/// Forward-difference Jacobian, one residual evaluation per column.
pub fn fd_jacobian<T: Scalar, S: NonlinearSystem<T> + ?Sized>(system: &S, x: &Vector<T>, h: Option<T>) -> Result<Matrix<T>> {
    let h = h.unwrap_or_else(default_fd_step);
    let n = system.dim();
    let f0 = system.residual(x)?;
    let mut jac = Matrix::zeros(n, n);
    for j in 0..n {
        let mut xp = x.clone();
        xp[j] = xp[j].clone() + h.clone();
        if !system.in_domain(&xp) {
            return Err(NlError::DomainError {
                problem: system.name().to_string(),
                reason: format!("finite-difference probe along coordinate {j} leaves the domain"),
            });
        }
        let fp = system.residual(&xp)?;
        for i in 0..n {
            jac[(i, j)] = (fp[i].clone() - f0[i].clone()) / h.clone();
        }
    }
    Ok(jac)
}

/// Outcome of comparing the analytic Jacobian against finite differences.
#[derive(Debug, Clone)]
pub struct ConsistencyReport<T> {
    pub problem: String,
    pub trials: usize,
    pub step: T,
    /// Worst column deviation `|fd - analytic|_inf / max(|analytic|_inf, 1)`.
    pub max_deviation: T,
    pub passed: bool,
}

/// Samples `trials` in-domain points within 5% of the initial guess and
/// compares analytic and forward-difference Jacobians there. Passes when the
/// worst deviation is at most `100 h`.
pub fn check_consistency<T: Scalar, S: NonlinearSystem<T> + ?Sized>(system: &S, trials: usize, seed: u64) -> ConsistencyReport<T> {
    let trials = trials.max(1);
    let h: T = default_fd_step();
    let n = system.dim();
    let x0 = system.initial_guess();
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut worst = T::zero();
    let mut ran = 0;

    for _ in 0..trials {
        let point = (0..100).find_map(|_| {
            let mut x = x0.clone();
            for i in 0..n {
                let scale = x0[i].to_f64().abs().max(1.0);
                let delta = T::from_f64(rng.gen_range(-0.05..0.05) * scale).expect("finite");
                x[i] = x[i].clone() + delta;
            }
            let probes_ok = (0..n).all(|j| {
                let mut xp = x.clone();
                xp[j] = xp[j].clone() + h.clone();
                system.in_domain(&xp)
            });
            (system.in_domain(&x) && probes_ok).then_some(x)
        });
        let Some(x) = point else { continue };
        let (Ok(analytic), Ok(fd)) = (system.jacobian(&x), fd_jacobian(system, &x, Some(h.clone()))) else {
            continue;
        };
        ran += 1;
        for j in 0..n {
            let mut diff = T::zero();
            let mut scale = T::one();
            for i in 0..n {
                let d = (fd[(i, j)].clone() - analytic[(i, j)].clone()).abs();
                if d > diff {
                    diff = d;
                }
                let a = analytic[(i, j)].abs();
                if a > scale {
                    scale = a;
                }
            }
            let dev = diff / scale;
            if dev > worst {
                worst = dev;
            }
        }
    }

    let bound = T::from_u32(100).expect("small integer") * h.clone();
    ConsistencyReport {
        problem: system.name().to_string(),
        trials: ran,
        passed: ran > 0 && worst <= bound,
        step: h,
        max_deviation: worst,
    }
}
