//! The weight recurrences of the ball-inflation iteration, their contraction
//! matrix, and exact verification of the closed forms attached to them.
//!
//! Every system shares the same shape over the unknowns
//! `(w_1, w_2, η_2, ..., w_{k-1}, η_{k-1})`:
//!
//! ```text
//! w_l = c_l + α_l w_{l+1} + (1-α_l) η_l                          1 <= l <= k-1
//! η_l = e_l + (l+1)/l (1-β_l) η_{l-1} + (l+1)/l β_l w_l          2 <= l <= k-1
//! ```
//!
//! with `η_1` and `w_k` fixed per system. Only the constants differ.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::exponents::{self, ExponentError, ExponentTable, Params};
use crate::linalg::{LinalgError, RatMatrix};
use crate::rat::{self, Rat};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IterationError {
    #[error("p = {p} is not above the threshold 2n_d(k)/d = {threshold} (d={d}, k={k})")]
    OutOfRegime {
        d: u32,
        k: u32,
        p: String,
        threshold: String,
    },
    #[error("no contraction certificate: {0}")]
    NotContracting(String),
    #[error("lambda bound violated: {0:?}")]
    BoundViolated(Box<LambdaBound>),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Lambda0,
    WPrime,
    WDoublePrime,
    Bar,
    Tilde,
    UnitWeights,
    Decomposed2,
    Decomposed3,
    Decomposed4,
}

/// One instance of the shared recurrence shape.
#[derive(Debug, Clone)]
pub struct Recurrence {
    pub k: u32,
    /// `α_l`, `l = 1..k-1`.
    pub alpha: Vec<Rat>,
    /// `β_l`, `l = 2..k-1`.
    pub beta: Vec<Rat>,
    /// `c_l`, `l = 1..k-1`.
    pub c: Vec<Rat>,
    /// `e_l`, `l = 2..k-1`.
    pub e: Vec<Rat>,
    pub eta1: Rat,
    pub wk: Rat,
}

fn w_idx(l: u32) -> usize {
    if l == 1 {
        0
    } else {
        2 * l as usize - 3
    }
}

fn eta_idx(l: u32) -> usize {
    2 * l as usize - 2
}

fn ratio(l: u32) -> Rat {
    rat::rat(i64::from(l) + 1, i64::from(l))
}

impl Recurrence {
    fn homogeneous(k: u32, table: &ExponentTable) -> Self {
        Recurrence {
            k,
            alpha: table.alpha.clone(),
            beta: table.beta.clone(),
            c: vec![Rat::zero(); k as usize - 1],
            e: vec![Rat::zero(); (k as usize).saturating_sub(2)],
            eta1: Rat::zero(),
            wk: Rat::zero(),
        }
    }

    fn a(&self, l: u32) -> &Rat {
        &self.alpha[l as usize - 1]
    }

    fn b(&self, l: u32) -> &Rat {
        &self.beta[l as usize - 2]
    }

    fn c(&self, l: u32) -> &Rat {
        &self.c[l as usize - 1]
    }

    fn e(&self, l: u32) -> &Rat {
        &self.e[l as usize - 2]
    }

    pub fn dim(&self) -> usize {
        2 * self.k as usize - 3
    }

    /// Coefficient matrix of the unknowns; boundary terms are left out.
    pub fn matrix(&self) -> RatMatrix {
        let k = self.k;
        let mut m = RatMatrix::zeros(self.dim(), self.dim());
        for l in 1..k {
            if l + 1 < k {
                m[(w_idx(l), w_idx(l + 1))] = self.a(l).clone();
            }
            if l >= 2 {
                m[(w_idx(l), eta_idx(l))] = Rat::one() - self.a(l);
            }
        }
        for l in 2..k {
            m[(eta_idx(l), w_idx(l))] = ratio(l) * self.b(l);
            if l >= 3 {
                m[(eta_idx(l), eta_idx(l - 1))] = ratio(l) * (Rat::one() - self.b(l));
            }
        }
        m
    }

    /// Constant terms with the boundary values folded in.
    pub fn rhs(&self) -> Vec<Rat> {
        let k = self.k;
        let mut r = vec![Rat::zero(); self.dim()];
        for l in 1..k {
            let mut v = self.c(l).clone();
            if l + 1 == k {
                v += self.a(l) * &self.wk;
            }
            if l == 1 {
                v += (Rat::one() - self.a(1)) * &self.eta1;
            }
            r[w_idx(l)] = v;
        }
        for l in 2..k {
            let mut v = self.e(l).clone();
            if l == 2 {
                v += ratio(2) * (Rat::one() - self.b(2)) * &self.eta1;
            }
            r[eta_idx(l)] = v;
        }
        r
    }

    /// Unique solution as `(w_1..=w_k, η_1..=η_{k-1})`.
    pub fn solve(&self) -> Result<(Vec<Rat>, Vec<Rat>), IterationError> {
        let x = self.matrix().identity_minus()?.solve(&self.rhs())?;
        Ok(self.unpack(&x))
    }

    fn unpack(&self, x: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
        let k = self.k;
        let mut w: Vec<Rat> = (1..k).map(|l| x[w_idx(l)].clone()).collect();
        w.push(self.wk.clone());
        let mut eta = vec![self.eta1.clone()];
        eta.extend((2..k).map(|l| x[eta_idx(l)].clone()));
        (w, eta)
    }

    /// Determines everything from `w_1` and `η_1` by running the equations
    /// forward; `w_k` is an output here and `self.wk` is ignored.
    pub fn forward(&self, w1: &Rat) -> (Vec<Rat>, Vec<Rat>) {
        let k = self.k;
        let mut w = vec![w1.clone()];
        let mut eta = vec![self.eta1.clone()];
        for l in 1..k {
            let wl = &w[l as usize - 1];
            if l >= 2 {
                let prev = &eta[l as usize - 2];
                let el = self.e(l)
                    + ratio(l) * (Rat::one() - self.b(l)) * prev
                    + ratio(l) * self.b(l) * wl;
                eta.push(el);
            }
            let next =
                (wl - self.c(l) - (Rat::one() - self.a(l)) * &eta[l as usize - 1]) / self.a(l);
            w.push(next);
        }
        (w, eta)
    }

    /// `lhs - rhs` of every equation, `w` rows first.
    pub fn residuals(&self, w: &[Rat], eta: &[Rat]) -> Vec<Rat> {
        let k = self.k;
        let wl = |l: u32| &w[l as usize - 1];
        let el = |l: u32| &eta[l as usize - 1];
        let mut out = Vec::new();
        for l in 1..k {
            out.push(wl(l) - self.c(l) - self.a(l) * wl(l + 1) - (Rat::one() - self.a(l)) * el(l));
        }
        for l in 2..k {
            out.push(
                el(l)
                    - self.e(l)
                    - ratio(l) * (Rat::one() - self.b(l)) * el(l - 1)
                    - ratio(l) * self.b(l) * wl(l),
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationSolution {
    pub variant: Variant,
    pub d: u32,
    pub k: u32,
    #[serde(with = "rat::serde_opt")]
    pub p: Option<Rat>,
    /// `w_1..=w_k`.
    #[serde(with = "rat::serde_vec")]
    pub w: Vec<Rat>,
    /// `η_1..=η_{k-1}`.
    #[serde(with = "rat::serde_vec")]
    pub eta: Vec<Rat>,
    #[serde(with = "rat::serde_opt", skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<Rat>,
}

impl IterationSolution {
    pub fn w(&self, l: u32) -> &Rat {
        &self.w[l as usize - 1]
    }

    pub fn eta(&self, l: u32) -> &Rat {
        &self.eta[l as usize - 1]
    }
}

pub fn build_matrix(d: u32, k: u32) -> Result<RatMatrix, IterationError> {
    let t = table(d, k, None)?;
    Ok(Recurrence::homogeneous(k, &t).matrix())
}

/// One entry where the recurrence-derived matrix and the printed
/// index-formula matrix disagree (1-based positions).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixDiff {
    pub row: usize,
    pub col: usize,
    #[serde(with = "rat::serde_str")]
    pub derived: Rat,
    #[serde(with = "rat::serde_str")]
    pub transcribed: Rat,
}

/// The matrix as given by its printed index formulas, entries whose column
/// falls outside the matrix dropped.
pub fn transcribed_matrix(d: u32, k: u32) -> Result<RatMatrix, IterationError> {
    let ab = exponents::alpha_beta(d, k)?;
    let n = 2 * k as usize - 3;
    let mut m = RatMatrix::zeros(n, n);
    let mut put = |r: usize, c: usize, v: Rat| {
        if r >= 1 && c >= 1 && r <= n && c <= n {
            m[(r - 1, c - 1)] = v;
        }
    };
    let one = Rat::one();
    for i in 2..k.saturating_sub(1) {
        let f = rat::rat(i64::from(i) + 2, i64::from(i) + 1);
        let iu = i as usize;
        put(2 * iu + 1, 2 * iu, &f * (&one - ab.beta(i + 1)));
        put(2 * iu + 1, 2 * iu - 1, &f * ab.beta(i));
    }
    for i in 1..k.saturating_sub(1) {
        let iu = i as usize;
        put(2 * iu, 2 * iu + 1, &one - ab.alpha(i + 1));
        put(2 * iu, 2 * iu + 2, ab.alpha(i + 1).clone());
    }
    put(1, 2, ab.alpha(1).clone());
    if k >= 3 {
        put(3, 2, rat::rat(3, 2) * ab.beta(2));
    }
    Ok(m)
}

pub fn matrix_transcription_diff(d: u32, k: u32) -> Result<Vec<MatrixDiff>, IterationError> {
    let derived = build_matrix(d, k)?;
    let printed = transcribed_matrix(d, k)?;
    let mut out = Vec::new();
    for i in 0..derived.rows() {
        for j in 0..derived.cols() {
            if derived[(i, j)] != printed[(i, j)] {
                out.push(MatrixDiff {
                    row: i + 1,
                    col: j + 1,
                    derived: derived[(i, j)].clone(),
                    transcribed: printed[(i, j)].clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Positive `x` with `(I - M) x = 1` and `Mx < x`, certifying spectral
/// radius below one for entrywise nonnegative `M`.
pub fn contraction_certificate(m: &RatMatrix) -> Result<Vec<Rat>, IterationError> {
    if !m.is_square() {
        return Err(IterationError::NotContracting(format!(
            "matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_nonnegative() {
        return Err(IterationError::NotContracting("negative entry".into()));
    }
    let ones = vec![Rat::one(); m.rows()];
    let x = m
        .identity_minus()?
        .solve(&ones)
        .map_err(|e| IterationError::NotContracting(e.to_string()))?;
    if let Some(i) = x.iter().position(|v| !v.is_positive()) {
        return Err(IterationError::NotContracting(format!(
            "x[{i}] = {} is not positive",
            rat::to_string(&x[i])
        )));
    }
    let mx = m.mul_vec(&x)?;
    if let Some(i) = (0..x.len()).find(|&i| mx[i] >= x[i]) {
        return Err(IterationError::NotContracting(format!(
            "(Mx)[{i}] = {} >= x[{i}]",
            rat::to_string(&mx[i])
        )));
    }
    Ok(x)
}

fn table(d: u32, k: u32, p: Option<&Rat>) -> Result<ExponentTable, IterationError> {
    let params = Params::new(d, k, p.cloned(), None)?;
    Ok(ExponentTable::new(&params)?)
}

fn regime_table(d: u32, k: u32, p: &Rat) -> Result<ExponentTable, IterationError> {
    let t = table(d, k, Some(p))?;
    if *p <= t.threshold {
        return Err(IterationError::OutOfRegime {
            d,
            k,
            p: rat::to_string(p),
            threshold: rat::to_string(&t.threshold),
        });
    }
    Ok(t)
}

fn di(t: &ExponentTable) -> Rat {
    rat::int(i64::from(t.d))
}

fn li(l: u32) -> Rat {
    rat::int(i64::from(l))
}

/// `Γ_{d,l}(q_l)/l + (d/l)(1/q_l - 1/p)`.
pub fn a_coeff(t: &ExponentTable, l: u32) -> Rat {
    let p = t.p.as_ref().expect("table without p");
    t.gamma_q(l) / li(l) + di(t) / li(l) * (t.q(l).recip() - p.recip())
}

/// `d(l+1)/l (1/q_l - p_k/(p p_d(l)))`.
pub fn b_coeff(t: &ExponentTable, l: u32) -> Rat {
    let p = t.p.as_ref().expect("table without p");
    di(t) * ratio(l) * (t.q(l).recip() - t.pc(t.k) / (p * t.pc(l)))
}

/// The recurrence instance for `variant`. `t` must carry `p` except for the
/// p-free variants.
pub fn recurrence(variant: Variant, t: &ExponentTable) -> Recurrence {
    let k = t.k;
    let mut r = Recurrence::homogeneous(k, t);
    let one = Rat::one();
    let d = di(t);
    let p = || t.p.as_ref().expect("variant needs p");
    match variant {
        Variant::Lambda0 => {
            let p = p();
            let pk = t.pc(k);
            for l in 1..k {
                let a1 = &one - t.alpha(l);
                r.c[l as usize - 1] =
                    t.gamma_q(l) / li(l) * &a1 + &d * &a1 * (pk / (p * t.pc(l)) - t.q(l).recip());
            }
            for l in 2..k {
                let b1 = &one - t.beta(l);
                let f = &d * ratio(l);
                r.e[l as usize - 2] = &f * (t.q(l).recip() - pk / (t.pc(l) * p))
                    - &f * (t.q(l - 1).recip() - pk / (t.pc(l - 1) * p)) * &b1
                    + ratio(l) / li(l - 1) * t.gamma_q(l - 1) * &b1;
            }
        }
        Variant::WPrime => r.eta1 = rat::int(2),
        Variant::WDoublePrime => r.wk = one.clone(),
        Variant::Bar | Variant::Tilde => {
            for l in 1..k {
                r.c[l as usize - 1] = (&one - t.alpha(l)) * a_coeff(t, l);
            }
            for l in 2..k {
                r.e[l as usize - 2] = ratio(l) * a_coeff(t, l - 1) * (&one - t.beta(l));
            }
            if variant == Variant::Tilde {
                r.wk = -t.gamma.clone().expect("variant needs p");
            }
        }
        Variant::UnitWeights => {
            for l in 1..k {
                r.c[l as usize - 1] = (&one - t.alpha(l)) / li(l);
            }
            for l in 2..k {
                r.e[l as usize - 2] = ratio(l) / li(l - 1) * (&one - t.beta(l));
            }
        }
        Variant::Decomposed2 => {
            let dp = &d / p();
            for l in 1..k {
                r.c[l as usize - 1] = -(&one - t.alpha(l)) * &dp / li(l);
            }
            for l in 2..k {
                r.e[l as usize - 2] = -ratio(l) * &dp / li(l - 1) * (&one - t.beta(l));
            }
            r.wk = dp;
        }
        Variant::Decomposed3 => {
            let p = p();
            let pk = t.pc(k);
            for l in 1..k {
                r.c[l as usize - 1] = &d / li(l) * (&one - t.alpha(l)) * pk / (t.pc(l) * p);
            }
            for l in 2..k {
                r.e[l as usize - 2] =
                    &d * ratio(l) / li(l - 1) * pk / (t.pc(l - 1) * p) * (&one - t.beta(l));
            }
            r.wk = -(&d / p);
        }
        Variant::Decomposed4 => r.eta1 = b_coeff(t, 1),
    }
    r
}

fn finish(variant: Variant, t: &ExponentTable, w: Vec<Rat>, eta: Vec<Rat>) -> IterationSolution {
    IterationSolution {
        variant,
        d: t.d,
        k: t.k,
        p: t.p.clone(),
        w,
        eta,
        lambda0: None,
    }
}

fn solve_in(variant: Variant, t: &ExponentTable) -> Result<IterationSolution, IterationError> {
    let r = recurrence(variant, t);
    let (w, eta) = if variant == Variant::UnitWeights {
        r.forward(&Rat::zero())
    } else {
        r.solve()?
    };
    Ok(finish(variant, t, w, eta))
}

/// `λ₀ = w_1 + d(1/q_1 - n_k/(n_1 p))`.
fn lambda0_of(t: &ExponentTable, w1: &Rat) -> Rat {
    let p = t.p.as_ref().expect("table without p");
    w1 + di(t) * (t.q(1).recip() - t.n(t.k) / (t.n(1) * p))
}

/// Solves any variant. `p` is ignored by the p-free variants.
pub fn solve_variant(
    variant: Variant,
    d: u32,
    k: u32,
    p: Option<&Rat>,
) -> Result<IterationSolution, IterationError> {
    let t = match (variant, p) {
        (Variant::WPrime | Variant::WDoublePrime, _) => table(d, k, None)?,
        (_, Some(p)) => regime_table(d, k, p)?,
        (_, None) => {
            return Err(IterationError::Exponent(ExponentError::InvalidParams(
                "this system needs p".into(),
            )))
        }
    };
    let mut sol = solve_in(variant, &t)?;
    if variant == Variant::Lambda0 {
        sol.lambda0 = Some(lambda0_of(&t, &sol.w[0]));
    }
    Ok(sol)
}

pub fn solve_lambda0(d: u32, k: u32, p: &Rat) -> Result<IterationSolution, IterationError> {
    solve_variant(Variant::Lambda0, d, k, Some(p))
}

pub fn solve_wprime(d: u32, k: u32) -> Result<IterationSolution, IterationError> {
    solve_variant(Variant::WPrime, d, k, None)
}

pub fn solve_wdoubleprime(d: u32, k: u32) -> Result<IterationSolution, IterationError> {
    solve_variant(Variant::WDoublePrime, d, k, None)
}

/// `w′`, `η′` from their closed forms.
pub fn closed_form_wprime(d: u32, k: u32) -> Result<IterationSolution, IterationError> {
    let t = table(d, k, None)?;
    let (n1, p1, nk, pk) = (t.n(1), t.pc(1).clone(), t.n(k), t.pc(k).clone());
    let den = &n1 * &pk - &p1 * &nk;
    let w = (1..=k)
        .map(|j| {
            let nj = t.n(j);
            Rat::one() + &p1 * &nk * (t.s(j - 1) - li(j - 1) * &nj) / (&nj * &den)
        })
        .collect();
    let eta = (1..k)
        .map(|j| {
            let pj = t.pc(j);
            ratio(j) * (pj * &den + &p1 * (t.s(j - 1) * &pk - li(j - 1) * pj * &nk)) / (pj * &den)
        })
        .collect();
    Ok(finish(Variant::WPrime, &t, w, eta))
}

/// Closed form of the unit-weight system (`A_l = 1/l`, `w̃_1 = η̃_1 = 0`).
pub fn closed_form_unit_weights(d: u32, k: u32) -> Result<IterationSolution, IterationError> {
    let t = table(d, k, None)?;
    let (n1, p1, nk, pk) = (t.n(1), t.pc(1).clone(), t.n(k), t.pc(k).clone());
    let den = &n1 * &pk - &p1 * &nk;
    let w = (1..=k)
        .map(|j| {
            let nj = t.n(j);
            -(&nk * (&n1 * t.pc(j) - &p1 * &nj)) / (&nj * &den)
        })
        .collect();
    let eta = (1..k)
        .map(|j| {
            let num = (t.n(j) - &n1) * &pk - li(j - 1) * (t.pc(j + 1) - t.pc(j)) * &nk;
            &n1 * num / (li(j) * (t.n(j + 1) - t.n(j)) * &den)
        })
        .collect();
    Ok(finish(Variant::UnitWeights, &t, w, eta))
}

/// Closed form of the third decomposed system.
pub fn closed_form_decomposed3(
    d: u32,
    k: u32,
    p: &Rat,
) -> Result<IterationSolution, IterationError> {
    let t = regime_table(d, k, p)?;
    let (n1, p1, nk, pk) = (t.n(1), t.pc(1).clone(), t.n(k), t.pc(k).clone());
    let dp = di(&t) / p;
    let den = &n1 * &pk - &p1 * &nk;
    let w = (1..=k)
        .map(|l| {
            let nl = t.n(l);
            &dp * (&p1 * &nk * (&p1 * &nk - &n1 * &pk) + &n1 * &pk * (&nl * &pk - &nk * t.pc(l)))
                / (&p1 * &nl * &den)
        })
        .collect();
    let eta = (1..k)
        .map(|l| {
            let num = &nk * &p1 - &n1 * &pk + li(l) * t.n(l) * &pk - li(l) * t.pc(l) * &nk;
            &dp * ratio(l) * (&pk / t.pc(l)) * num / &den
        })
        .collect();
    Ok(finish(Variant::Decomposed3, &t, w, eta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaBound {
    #[serde(with = "rat::serde_str")]
    pub lambda0: Rat,
    #[serde(with = "rat::serde_str")]
    pub gamma: Rat,
    #[serde(with = "rat::serde_str")]
    pub w1_dp: Rat,
    #[serde(with = "rat::serde_str")]
    pub slack: Rat,
}

/// `slack = Γ_{d,k}(p) w″_1 - λ₀`, required to be non-negative.
pub fn verify_lambda_bound(d: u32, k: u32, p: &Rat) -> Result<LambdaBound, IterationError> {
    let lam = solve_lambda0(d, k, p)?.lambda0.expect("lambda0 set");
    let w1_dp = solve_wdoubleprime(d, k)?.w[0].clone();
    let gamma = exponents::gamma_exp(d, k, p);
    let slack = &gamma * &w1_dp - &lam;
    let report = LambdaBound {
        lambda0: lam,
        gamma,
        w1_dp,
        slack,
    };
    if report.slack.is_negative() {
        return Err(IterationError::BoundViolated(Box::new(report)));
    }
    Ok(report)
}

/// Outcome of a single exact identity or inequality check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub witness: Value,
}

impl IdentityCheck {
    fn equal(name: &str, got: &Rat, want: &Rat) -> Self {
        IdentityCheck {
            name: name.into(),
            passed: got == want,
            witness: json!({
                "got": rat::to_string(got),
                "expected": rat::to_string(want),
                "residual": rat::to_string(&(got - want)),
            }),
        }
    }

    fn zeros(name: &str, residuals: &[Rat]) -> Self {
        let bad: Vec<Value> = residuals
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(i, r)| json!({"index": i, "residual": rat::to_string(r)}))
            .collect();
        IdentityCheck {
            name: name.into(),
            passed: bad.is_empty(),
            witness: json!({"checked": residuals.len(), "nonzero": bad}),
        }
    }

    fn vectors(name: &str, got: &IterationSolution, want: &IterationSolution) -> Self {
        let mut res: Vec<Rat> = got.w.iter().zip(&want.w).map(|(a, b)| a - b).collect();
        res.extend(got.eta.iter().zip(&want.eta).map(|(a, b)| a - b));
        let mut c = Self::zeros(name, &res);
        if got.w.len() != want.w.len() || got.eta.len() != want.eta.len() {
            c.passed = false;
        }
        c
    }
}

/// Every exact identity attached to `(d, k, p)`. Failures are recorded in the
/// returned list; only precondition violations return `Err`.
pub fn verify_identities(d: u32, k: u32, p: &Rat) -> Result<Vec<IdentityCheck>, IterationError> {
    let t = regime_table(d, k, p)?;
    let pfree = table(d, k, None)?;
    let mut out = Vec::new();
    let zero = Rat::zero();
    let one = Rat::one();

    let m = recurrence(Variant::Lambda0, &t).matrix();
    out.push(match contraction_certificate(&m) {
        Ok(x) => IdentityCheck {
            name: "contraction_certificate".into(),
            passed: true,
            witness: json!({"x": rat::json_vec(&x)}),
        },
        Err(e) => IdentityCheck {
            name: "contraction_certificate".into(),
            passed: false,
            witness: json!({"error": e.to_string(), "matrix": m}),
        },
    });

    let partial: Vec<Rat> = (1..=k)
        .map(|j| exponents::partial_sum_residual(d, j))
        .collect();
    out.push(IdentityCheck::zeros("partial_sum_identity", &partial));

    let mut solved = Vec::new();
    for v in [
        Variant::Lambda0,
        Variant::Bar,
        Variant::Tilde,
        Variant::UnitWeights,
        Variant::Decomposed2,
        Variant::Decomposed3,
        Variant::Decomposed4,
    ] {
        solved.push((v, solve_in(v, &t)?));
    }
    for v in [Variant::WPrime, Variant::WDoublePrime] {
        solved.push((v, solve_in(v, &pfree)?));
    }
    let get = |v: Variant| &solved.iter().find(|(u, _)| *u == v).unwrap().1;
    let mut res = Vec::new();
    for (v, s) in &solved {
        let tab = if matches!(v, Variant::WPrime | Variant::WDoublePrime) {
            &pfree
        } else {
            &t
        };
        res.extend(recurrence(*v, tab).residuals(&s.w, &s.eta));
    }
    out.push(IdentityCheck::zeros("recurrence_residuals", &res));

    let lam = lambda0_of(&t, get(Variant::Lambda0).w(1));
    let wp = get(Variant::WPrime);
    out.push(IdentityCheck::equal("wprime_w1", wp.w(1), &one));
    let closed = closed_form_wprime(d, k)?;
    out.push(IdentityCheck::vectors("wprime_closed_form", &closed, wp));

    let gamma = t.gamma.clone().expect("p present");
    let w1_dp = get(Variant::WDoublePrime).w(1).clone();
    let slack = &gamma * &w1_dp - &lam;
    out.push(IdentityCheck {
        name: "lambda_bound".into(),
        passed: !slack.is_negative(),
        witness: json!({
            "lambda0": rat::to_string(&lam),
            "gamma": rat::to_string(&gamma),
            "w1_dp": rat::to_string(&w1_dp),
            "slack": rat::to_string(&slack),
        }),
    });
    let nonneg = get(Variant::WDoublePrime)
        .w
        .iter()
        .all(|x| !x.is_negative());
    out.push(IdentityCheck {
        name: "wdoubleprime_nonnegative".into(),
        passed: nonneg,
        witness: json!({"w": rat::json_vec(&get(Variant::WDoublePrime).w)}),
    });

    out.push(IdentityCheck::equal(
        "bar_reproduces_lambda0",
        get(Variant::Bar).w(1),
        &lam,
    ));
    out.push(IdentityCheck::equal(
        "tilde_w1",
        get(Variant::Tilde).w(1),
        &(-&slack),
    ));

    let unit = get(Variant::UnitWeights);
    out.push(IdentityCheck::equal("unit_weights_wk", &(-unit.w(k)), &one));
    out.push(IdentityCheck::vectors(
        "unit_weights_closed_form",
        &closed_form_unit_weights(d, k)?,
        unit,
    ));

    let excess: Vec<Value> = (1..k)
        .filter_map(|l| {
            let la = li(l) * a_coeff(&t, l);
            (la > gamma).then(|| json!({"l": l, "l_times_a": rat::to_string(&la)}))
        })
        .collect();
    out.push(IdentityCheck {
        name: "weights_below_gamma".into(),
        passed: excess.is_empty(),
        witness: json!({"gamma": rat::to_string(&gamma), "violations": excess}),
    });

    let dd = di(&t);
    out.push(IdentityCheck::equal(
        "decomposed_2_w1",
        get(Variant::Decomposed2).w(1),
        &zero,
    ));
    let w3 = &dd * (t.pc(k) / (p * t.pc(1)) - t.n(k) / (t.n(1) * p));
    out.push(IdentityCheck::equal(
        "decomposed_3_w1",
        get(Variant::Decomposed3).w(1),
        &w3,
    ));
    out.push(IdentityCheck::vectors(
        "decomposed_3_closed_form",
        &closed_form_decomposed3(d, k, p)?,
        get(Variant::Decomposed3),
    ));
    out.push(IdentityCheck::equal(
        "decomposed_4_w1",
        get(Variant::Decomposed4).w(1),
        &(b_coeff(&t, 1) / rat::int(2)),
    ));
    Ok(out)
}

/// `Γ w″_1 - λ₀` at `p = p_d(k)`, or `None` when that point lies outside the
/// regime.
pub fn criticality_gap(d: u32, k: u32) -> Result<Option<Rat>, IterationError> {
    let pc = exponents::p_crit(d, k);
    if pc <= exponents::regime_threshold(d, k) {
        return Ok(None);
    }
    Ok(Some(verify_lambda_bound(d, k, &pc)?.slack))
}
