use crate::fem1d::{BandedSystem, DofField, Scalar};

/// What to keep while marching.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    /// Keep every `n`-th field (and the last); `0` keeps only the last.
    pub snapshot_every: usize,
    /// Stop once `‖U^n‖ > growth_limit · ‖U^0‖`.
    pub growth_limit: Option<f64>,
}

/// Why a run stopped before the final time.
#[derive(Debug, Clone, PartialEq)]
pub struct Termination {
    pub step: usize,
    pub t: f64,
    pub norm_ratio: f64,
}

/// `‖v‖` from the exact form `vᴴ M v`.
pub fn mass_norm<T: Scalar>(mass: &BandedSystem<f64>, v: &DofField<T>) -> f64 {
    let c = v.coeffs();
    let n = c.len();
    let mut acc = 0.0;
    for i in 0..n {
        let lo = i.saturating_sub(mass.lower_bandwidth());
        let hi = (i + mass.upper_bandwidth()).min(n - 1);
        let mut row = T::zero();
        for (j, cj) in c.iter().enumerate().take(hi + 1).skip(lo) {
            row += cj.scale(mass.get(i, j));
        }
        acc += (c[i].conj() * row).re();
    }
    acc.max(0.0).sqrt()
}

/// Monitors and stored fields of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldHistory<T> {
    pub times: Vec<f64>,
    pub l2_norms: Vec<f64>,
    pub boundary_values: Vec<T>,
    pub snapshots: Vec<(usize, DofField<T>)>,
    pub last: DofField<T>,
    pub terminated: Option<Termination>,
}

impl<T: Scalar> FieldHistory<T> {
    pub fn initial_norm(&self) -> f64 {
        self.l2_norms[0]
    }

    pub fn final_norm(&self) -> f64 {
        *self.l2_norms.last().unwrap()
    }

    pub fn max_norm(&self) -> f64 {
        self.l2_norms.iter().copied().fold(0.0, f64::max)
    }

    pub fn completed(&self) -> bool {
        self.terminated.is_none()
    }
}

/// Runs `step` over `times`, recording monitors and calling `observe` at every level.
pub(crate) fn march<T: Scalar, E>(
    u0: DofField<T>,
    times: &[f64],
    opts: RunOptions,
    norm: impl Fn(&DofField<T>) -> f64,
    mut step: impl FnMut(&DofField<T>, usize) -> Result<DofField<T>, E>,
    mut observe: impl FnMut(usize, f64, &DofField<T>),
) -> Result<FieldHistory<T>, E> {
    let n_steps = times.len() - 1;
    let norm0 = norm(&u0);
    let mut h = FieldHistory {
        times: vec![times[0]],
        l2_norms: vec![norm0],
        boundary_values: vec![u0.boundary_eval().0],
        snapshots: Vec::new(),
        last: u0.clone(),
        terminated: None,
    };
    observe(0, times[0], &u0);
    if opts.snapshot_every > 0 {
        h.snapshots.push((0, u0.clone()));
    }
    let mut u = u0;
    for n in 1..=n_steps {
        u = step(&u, n)?;
        let norm_n = norm(&u);
        h.times.push(times[n]);
        h.l2_norms.push(norm_n);
        h.boundary_values.push(u.boundary_eval().0);
        observe(n, times[n], &u);
        if opts.snapshot_every > 0 && (n % opts.snapshot_every == 0 || n == n_steps) {
            h.snapshots.push((n, u.clone()));
        }
        if let Some(limit) = opts.growth_limit {
            let ratio = norm_n / norm0;
            if !(ratio <= limit) {
                h.terminated = Some(Termination {
                    step: n,
                    t: times[n],
                    norm_ratio: ratio,
                });
                break;
            }
        }
    }
    h.last = u;
    Ok(h)
}
