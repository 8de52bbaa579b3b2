use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::prices::PriceVector;
use super::revenue::{own_derivative, PricingGame, RealizedOutcome};
use super::verify::{verify_nash, VerificationReport};
use crate::dynamics::StrategyProfile;
use crate::error::GameError;
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NashConfig {
    /// Finite-difference step for revenue derivatives, currency units.
    pub fd_step: f64,
    /// Finite-difference step for the Jacobian of the first-order system.
    pub jacobian_step: f64,
    /// Convergence threshold on the first-order residual, which is the
    /// revenue derivative per subscriber of the tier.
    pub tolerance: f64,
    pub max_newton_iter: usize,
    /// Coarse grid of the best-response line search.
    pub br_grid: usize,
    pub br_rounds: usize,
    /// Best-response rounds stop once no price moves by more than this.
    pub br_tolerance: f64,
    /// Random starting points besides the midpoint of the price box.
    pub random_starts: usize,
    pub seed: u64,
    pub verify_grid: usize,
    /// Relative revenue gain that disqualifies a global equilibrium.
    pub verify_tolerance: f64,
    /// Logit stopping threshold used inside the game.
    pub inner_tolerance: f64,
    /// Candidates closer than this in every price are the same point.
    pub dedup_tolerance: f64,
}

impl Default for NashConfig {
    fn default() -> Self {
        Self {
            fd_step: 0.05,
            jacobian_step: 0.05,
            tolerance: 1e-4,
            max_newton_iter: 40,
            br_grid: 41,
            br_rounds: 60,
            br_tolerance: 1e-3,
            random_starts: 5,
            seed: 0,
            verify_grid: 200,
            verify_tolerance: 0.005,
            inner_tolerance: 1e-9,
            dedup_tolerance: 1e-2,
        }
    }
}

impl NashConfig {
    pub fn validate(&self) -> Result<(), GameError> {
        let positive = [
            self.fd_step,
            self.jacobian_step,
            self.tolerance,
            self.br_tolerance,
            self.verify_tolerance,
            self.inner_tolerance,
            self.dedup_tolerance,
        ];
        if positive.iter().any(|x| !(*x > 0.0)) {
            return Err(GameError::Invalid("steps and tolerances must be positive".into()));
        }
        if self.br_grid < 3 || self.verify_grid < 2 {
            return Err(GameError::Invalid("search grids are too coarse".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NashStatus {
    /// Passed grid verification.
    Global,
    /// Stationary, but some unilateral deviation pays.
    Local,
    /// No start reached a stationary point.
    Failed,
}

impl NashStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Global => "global",
            Self::Local => "local",
            Self::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    Newton,
    BestResponse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub start: PriceVector,
    pub prices: PriceVector,
    pub method: SolverMethod,
    pub converged: bool,
    /// `‖F‖∞` of the projected first-order system.
    pub residual: f64,
    pub iterations: usize,
    /// Worst relative gain found by verification, when verified.
    pub worst_gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashResult {
    pub prices: PriceVector,
    pub status: NashStatus,
    pub method: SolverMethod,
    pub residual: f64,
    /// `σ_i(c*)` on each provider's own view.
    pub estimated_revenue: Vec<f64>,
    /// `ẑ*(c*)` on each provider's view.
    pub estimated: Vec<StrategyProfile>,
    /// Equilibrium of the real population at `c*`.
    pub realized: RealizedOutcome,
    pub verification: Option<VerificationReport>,
    pub candidates: Vec<Candidate>,
}

/// Coordinates `(provider, plan)` the solver moves.
fn active_coordinates(game: &PricingGame) -> Vec<(usize, usize)> {
    (0..game.providers())
        .flat_map(|i| {
            game.populated_tiers(i)
                .iter()
                .enumerate()
                .filter(|(_, &u)| u)
                .map(move |(s, _)| (i, s))
                .collect::<Vec<_>>()
        })
        .collect()
}

struct Solver<'a> {
    game: &'a PricingGame,
    coords: Vec<(usize, usize)>,
    config: &'a NashConfig,
}

impl Solver<'_> {
    fn cap(&self, a: usize) -> f64 {
        self.game.caps()[self.coords[a].0]
    }

    fn prices(&self, template: &PriceVector, x: &[f64]) -> PriceVector {
        let mut c = template.clone();
        for (&(i, s), &v) in self.coords.iter().zip(x) {
            c.set(i, s, v);
        }
        self.game.fill_unpopulated(&mut c);
        c
    }

    fn clamp(&self, x: &mut [f64]) {
        for (a, v) in x.iter_mut().enumerate() {
            *v = v.clamp(0.0, self.cap(a));
        }
    }

    /// First-order system scaled per subscriber, `(∂σ_i/∂c_is) / Q_is`,
    /// with components pushing out of the price box zeroed.
    fn residual(&self, template: &PriceVector, x: &[f64]) -> Result<Vec<f64>, GameError> {
        let c = self.prices(template, x);
        let mut outcomes = Vec::with_capacity(self.game.providers());
        for i in 0..self.game.providers() {
            outcomes.push(self.game.estimate(i, &c)?);
        }
        let mut f = Vec::with_capacity(x.len());
        for (a, &(i, s)) in self.coords.iter().enumerate() {
            let q = outcomes[i].subscribers[s];
            let d = own_derivative(self.game, &c, i, s, self.config.fd_step, Some(outcomes[i].revenue))?;
            let mut v = if q > 0.0 { d / q } else { -1.0 };
            if (x[a] <= 0.0 && v < 0.0) || (x[a] >= self.cap(a) && v > 0.0) {
                v = 0.0;
            }
            f.push(v);
        }
        Ok(f)
    }

    fn newton(&self, template: &PriceVector, x: &mut Vec<f64>, iterations: &mut usize) -> Result<(bool, f64), GameError> {
        let n = x.len();
        let mut f = self.residual(template, x)?;
        let mut norm = inf_norm(&f);
        for _ in 0..self.config.max_newton_iter {
            if norm < self.config.tolerance {
                return Ok((true, norm));
            }
            *iterations += 1;
            let free: Vec<usize> = (0..n)
                .filter(|&a| !((x[a] <= 0.0 || x[a] >= self.cap(a)) && f[a] == 0.0))
                .collect();
            let m = free.len();
            let mut jac = vec![0.0; m * m];
            for (col, &b) in free.iter().enumerate() {
                let step = if x[b] + self.config.jacobian_step <= self.cap(b) {
                    self.config.jacobian_step
                } else {
                    -self.config.jacobian_step
                };
                let mut xp = x.clone();
                xp[b] += step;
                let fp = self.residual(template, &xp)?;
                for (row, &a) in free.iter().enumerate() {
                    jac[row * m + col] = (fp[a] - f[a]) / step;
                }
            }
            let rhs: Vec<f64> = free.iter().map(|&a| -f[a]).collect();
            let Some(delta) = linalg::solve(&jac, &rhs) else {
                log::debug!("singular first-order Jacobian");
                return Ok((false, norm));
            };
            let max_cap = (0..n).map(|a| self.cap(a)).fold(0.0, f64::max);
            let longest = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
            let shrink = if longest > 0.25 * max_cap { 0.25 * max_cap / longest } else { 1.0 };

            let merit = l2(&f);
            let mut accepted = false;
            let mut alpha = 1.0;
            for _ in 0..8 {
                let mut xn = x.clone();
                for (&a, d) in free.iter().zip(&delta) {
                    xn[a] += alpha * shrink * d;
                }
                self.clamp(&mut xn);
                let fnew = self.residual(template, &xn)?;
                if l2(&fnew) < (1.0 - 1e-4 * alpha) * merit {
                    *x = xn;
                    f = fnew;
                    norm = inf_norm(&f);
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                log::debug!("Newton line search stalled at residual {norm:.3e}");
                return Ok((norm < self.config.tolerance, norm));
            }
        }
        Ok((norm < self.config.tolerance, norm))
    }

    /// Maximizes provider `i`'s estimated revenue along one own price.
    fn line_maximize(&self, template: &PriceVector, x: &[f64], a: usize) -> Result<f64, GameError> {
        let (i, _) = self.coords[a];
        let cap = self.cap(a);
        let revenue = |v: f64| -> Result<f64, GameError> {
            let mut xv = x.to_vec();
            xv[a] = v;
            Ok(self.game.estimate(i, &self.prices(template, &xv))?.revenue)
        };
        let g = self.config.br_grid;
        let cell = cap / (g - 1) as f64;
        let mut best = (0, f64::NEG_INFINITY);
        for k in 0..g {
            let r = revenue(k as f64 * cell)?;
            if r > best.1 {
                best = (k, r);
            }
        }
        let mut lo = (best.0 as f64 - 1.0).max(0.0) * cell;
        let mut hi = ((best.0 + 1) as f64 * cell).min(cap);
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let mut p1 = hi - ratio * (hi - lo);
        let mut p2 = lo + ratio * (hi - lo);
        let mut r1 = revenue(p1)?;
        let mut r2 = revenue(p2)?;
        while hi - lo > 0.25 * self.config.br_tolerance {
            if r1 >= r2 {
                hi = p2;
                p2 = p1;
                r2 = r1;
                p1 = hi - ratio * (hi - lo);
                r1 = revenue(p1)?;
            } else {
                lo = p1;
                p1 = p2;
                r1 = r2;
                p2 = lo + ratio * (hi - lo);
                r2 = revenue(p2)?;
            }
        }
        let (p, r) = if r1 >= r2 { (p1, r1) } else { (p2, r2) };
        Ok(if r >= best.1 { p } else { best.0 as f64 * cell })
    }

    fn best_response(&self, template: &PriceVector, x: &mut [f64], iterations: &mut usize) -> Result<bool, GameError> {
        for _ in 0..self.config.br_rounds {
            *iterations += 1;
            let mut moved = 0.0f64;
            for a in 0..x.len() {
                let v = self.line_maximize(template, x, a)?;
                moved = moved.max((v - x[a]).abs());
                x[a] = v;
            }
            if moved < self.config.br_tolerance {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn solve_from(&self, template: &PriceVector, x0: Vec<f64>) -> Result<Candidate, GameError> {
        let start = self.prices(template, &x0);
        let mut x = x0;
        self.clamp(&mut x);
        let mut iterations = 0;
        let (converged, residual) = self.newton(template, &mut x, &mut iterations)?;
        if converged {
            return Ok(Candidate {
                start,
                prices: self.prices(template, &x),
                method: SolverMethod::Newton,
                converged,
                residual,
                iterations,
                worst_gain: None,
            });
        }
        log::debug!("falling back to best response from residual {residual:.3e}");
        let settled = self.best_response(template, &mut x, &mut iterations)?;
        let residual = inf_norm(&self.residual(template, &x)?);
        Ok(Candidate {
            start,
            prices: self.prices(template, &x),
            method: SolverMethod::BestResponse,
            converged: settled,
            residual,
            iterations,
            worst_gain: None,
        })
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Finds a Nash equilibrium of the pricing game.
///
/// Starts from `initial` (when given), the midpoint of the price box and
/// `random_starts` seeded random points. From each start a damped Newton
/// iteration solves the first-order conditions; if it stalls, cyclic best
/// responses take over. Distinct stationary candidates are grid-verified
/// and the one with the smallest profitable deviation is returned.
pub fn solve_nash(
    game: &PricingGame,
    initial: Option<&PriceVector>,
    config: &NashConfig,
) -> Result<NashResult, GameError> {
    config.validate()?;
    let mut game = game.clone();
    let mut logit = *game.logit();
    logit.tolerance = config.inner_tolerance;
    game.set_logit(logit);
    let game = &game;

    let plans = game.plans();
    let solver = Solver {
        game,
        coords: active_coordinates(game),
        config,
    };
    let n = solver.coords.len();
    let template = PriceVector::new(
        plans
            .iter()
            .zip(game.caps())
            .map(|(&s, &cap)| vec![0.5 * cap; s])
            .collect(),
    );

    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let Some(c0) = initial {
        c0.validate(&plans, game.caps())?;
        starts.push(solver.coords.iter().map(|&(i, s)| c0.get(i, s)).collect());
    }
    starts.push((0..n).map(|a| 0.5 * solver.cap(a)).collect());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.random_starts {
        starts.push((0..n).map(|a| rng.random::<f64>() * solver.cap(a)).collect());
    }

    let mut candidates = starts
        .into_par_iter()
        .map(|x0| solver.solve_from(&template, x0))
        .collect::<Result<Vec<_>, _>>()?;

    // Unique converged candidates, lowest residual first within a cluster.
    let mut unique: Vec<usize> = Vec::new();
    for (k, cand) in candidates.iter().enumerate() {
        if !cand.converged {
            continue;
        }
        match unique
            .iter_mut()
            .find(|u| candidates[**u].prices.max_abs_diff(&cand.prices) < config.dedup_tolerance)
        {
            Some(u) if cand.residual < candidates[*u].residual => *u = k,
            Some(_) => {}
            None => unique.push(k),
        }
    }

    let reports = unique
        .par_iter()
        .map(|&k| verify_nash(game, &candidates[k].prices, config.verify_grid, config.verify_tolerance))
        .collect::<Result<Vec<_>, _>>()?;
    for (&k, r) in unique.iter().zip(&reports) {
        candidates[k].worst_gain = Some(r.worst_gain());
    }

    let chosen = unique
        .iter()
        .zip(reports)
        .min_by(|a, b| a.1.worst_gain().total_cmp(&b.1.worst_gain()).then(a.0.cmp(b.0)));
    let (index, verification, status) = match chosen {
        Some((&k, report)) => {
            let status = if report.global { NashStatus::Global } else { NashStatus::Local };
            (k, Some(report), status)
        }
        None => {
            let k = (0..candidates.len())
                .min_by(|&a, &b| candidates[a].residual.total_cmp(&candidates[b].residual))
                .expect("at least one start");
            (k, None, NashStatus::Failed)
        }
    };
    if unique.len() > 1 {
        log::info!("{} distinct stationary candidates", unique.len());
    }

    let best = candidates[index].clone();
    let mut estimated_revenue = Vec::with_capacity(game.providers());
    let mut estimated = Vec::with_capacity(game.providers());
    for i in 0..game.providers() {
        let out = game.estimate(i, &best.prices)?;
        estimated_revenue.push(out.revenue);
        estimated.push(out.profile);
    }
    let realized = game.realize(&best.prices)?;
    Ok(NashResult {
        prices: best.prices,
        status,
        method: best.method,
        residual: best.residual,
        estimated_revenue,
        estimated,
        realized,
        verification,
        candidates,
    })
}
