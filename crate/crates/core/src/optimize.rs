//! Derivative-free minimization (Nelder–Mead) with deterministic restarts.

#[derive(Clone, Debug)]
pub struct NelderMeadConfig {
    pub max_evals: usize,
    /// Stop when the simplex value spread drops below this.
    pub f_tol: f64,
    /// Stop when the simplex diameter drops below this.
    pub x_tol: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        NelderMeadConfig { max_evals: 2000, f_tol: 1e-9, x_tol: 1e-10, initial_step: 0.25 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

pub fn nelder_mead(f: &mut impl FnMut(&[f64]) -> f64, start: &[f64], cfg: &NelderMeadConfig) -> Minimum {
    let n = start.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    if n == 0 {
        let v = eval(start, &mut evals);
        return Minimum { x: Vec::new(), value: v, evals };
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), eval(start, &mut evals)));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += cfg.initial_step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while evals < cfg.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let diam = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= cfg.f_tol && diam <= cfg.x_tol.max(cfg.f_tol) {
            break;
        }
        if diam <= cfg.x_tol {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (w - c)).collect()
        };
        let xr = along(-alpha);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(-gamma);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(-rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, v) in simplex[1..].iter_mut() {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + sigma * (*xi - bi);
                    }
                    *v = eval(x, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, evals }
}

/// Result over several starts.
#[derive(Clone, Debug)]
pub struct MultiStart {
    pub best: Minimum,
    pub values: Vec<f64>,
    pub evals: usize,
}

/// Runs `nelder_mead` from each start and restarts the winner once at a
/// smaller step to polish it.
pub fn multi_start(f: &mut impl FnMut(&[f64]) -> f64, starts: &[Vec<f64>], cfg: &NelderMeadConfig) -> MultiStart {
    let mut best: Option<Minimum> = None;
    let mut values = Vec::with_capacity(starts.len());
    let mut evals = 0;
    for s in starts {
        let m = nelder_mead(f, s, cfg);
        evals += m.evals;
        values.push(m.value);
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let mut best = best.expect("at least one start");
    let polish_cfg = NelderMeadConfig { initial_step: cfg.initial_step * 0.01, ..cfg.clone() };
    let m = nelder_mead(f, &best.x, &polish_cfg);
    evals += m.evals;
    if m.value < best.value {
        best = m;
    }
    MultiStart { best, values, evals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let mut f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2);
        let m = nelder_mead(&mut f, &[0.0, 0.0], &NelderMeadConfig::default());
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] + 2.0).abs() < 1e-4, "{:?}", m);
    }

    #[test]
    fn nonsmooth_max() {
        let mut f = |x: &[f64]| (x[0] - 0.5).abs().max((x[1] + 0.25).abs().sqrt());
        let r = multi_start(&mut f, &[vec![0.0, 0.0], vec![1.0, -1.0]], &NelderMeadConfig::default());
        assert!(r.best.value < 1e-4, "{:?}", r.best);
    }

    #[test]
    fn zero_dimensional() {
        let mut f = |_: &[f64]| 3.0;
        assert_eq!(nelder_mead(&mut f, &[], &NelderMeadConfig::default()).value, 3.0);
    }
}
