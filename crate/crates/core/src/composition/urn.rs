use crate::combinatorics::{binomial, factorial};
use crate::error::{Error, Result};
use crate::mvk::{Basis, Composition, PolyTable};
use crate::polys::{krawtchouk_eval, KrawtchoukParams};
use crate::scalar::Scalar;

fn exp_neg<T: Scalar>(rate: T, t: &T) -> Result<T> {
    if t.is_zero() || rate.is_zero() {
        return Ok(T::one());
    }
    (-(rate * t.clone()))
        .exp()
        .ok_or_else(|| Error::Unsupported("e^(-rate t) needs the float backend".into()))
}

/// Two-colour urn: `C(N,y) p^y q^(N-y) {1 + sum_n e^(-lambda n t) (pq)^-n
/// (n!)^-2 C(N,n)^-1 K_n(x) K_n(y)}` with `lambda = 1/(N p)`.
pub fn ehrenfest_two_color<T: Scalar>(x: usize, y: usize, t: &T, n: usize, p: &T) -> Result<T> {
    if *t < T::zero() {
        return Err(Error::domain(format!("time t = {t} must be non-negative")));
    }
    let params = KrawtchoukParams::new(n, p.clone())?;
    if x > n || y > n {
        return Err(Error::domain(format!("states {x}, {y} must lie in 0..={n}")));
    }
    let q = T::one() - p.clone();
    let lambda = T::one() / (T::from_usize(n) * p.clone());
    let pq = p.clone() * q.clone();
    let mut sum = T::one();
    for k in 1..=n {
        let f = factorial::<T>(k);
        let denom = pq.powi(k as i32) * f.clone() * f * binomial::<T>(n, k);
        let decay = exp_neg(lambda.clone() * T::from_usize(k), t)?;
        sum = sum
            + decay * krawtchouk_eval(k, x, &params)? * krawtchouk_eval(k, y, &params)? / denom;
    }
    Ok(binomial::<T>(n, y) * p.powi(y as i32) * q.powi((n - y) as i32) * sum)
}

/// `d`-colour urn: a ball is picked at rate 1 and recoloured `j -> l` with
/// probability `p_jl = p_l (1 + sum_i rho_i u_j^(i) u_l^(i) / a_i)`.
/// Non-normalised bases are allowed; the norms `a_i` are divided out.
#[derive(Clone, Debug)]
pub struct UrnSpec<T> {
    balls: usize,
    basis: Basis<T>,
    rho: Vec<T>,
    matrix: Vec<Vec<T>>,
}

impl<T: Scalar> UrnSpec<T> {
    pub fn new(balls: usize, basis: Basis<T>, rho: Vec<T>) -> Result<Self> {
        if balls == 0 {
            return Err(Error::domain("the urn needs N >= 1 balls"));
        }
        let d = basis.d();
        if rho.len() + 1 != d {
            return Err(Error::Dimension(format!(
                "{} eigenvalues for {d} colours (need d - 1)",
                rho.len()
            )));
        }
        let (p, u, a) = (basis.p(), basis.u(), basis.a());
        let mut matrix = vec![vec![T::zero(); d]; d];
        for j in 0..d {
            for l in 0..d {
                let mut s = T::one();
                for i in 1..d {
                    s = s + rho[i - 1].clone() * u[i][j].clone() * u[i][l].clone() / a[i].clone();
                }
                let v = p[l].clone() * s;
                if v < T::zero() && !v.is_negligible(1e-14) {
                    return Err(Error::Probability(format!(
                        "p_{j}{l} = {v} is negative for the given eigenvalues"
                    )));
                }
                matrix[j][l] = v;
            }
        }
        Ok(Self {
            balls,
            basis,
            rho,
            matrix,
        })
    }

    /// The two-colour urn of the Ehrenfest model on colours (blue, red) with
    /// stationary law `(q, p)`: `u^(1) = (-p, q)`, `rho_1 = 1 - 1/p`.
    /// Then `p_11 = 1 - q/p`, so `p < 1/2` is rejected.
    pub fn two_colour(balls: usize, p: T) -> Result<Self> {
        if p <= T::zero() || p >= T::one() {
            return Err(Error::domain(format!("p = {p} must lie in (0, 1)")));
        }
        let q = T::one() - p.clone();
        let basis = Basis::new(
            vec![q.clone(), p.clone()],
            vec![vec![T::one(), T::one()], vec![-p.clone(), q]],
        )?;
        let rho = T::one() - T::one() / p;
        Self::new(balls, basis, vec![rho])
    }

    pub fn balls(&self) -> usize {
        self.balls
    }

    pub fn colours(&self) -> usize {
        self.basis.d()
    }

    pub fn basis(&self) -> &Basis<T> {
        &self.basis
    }

    pub fn rho(&self) -> &[T] {
        &self.rho
    }

    /// `p_jl`.
    pub fn matrix(&self) -> &[Vec<T>] {
        &self.matrix
    }

    pub fn states(&self) -> Vec<Composition> {
        Composition::all(self.balls, self.colours())
    }

    /// Jumps `x -> x - e_j + e_l` (`j != l`) at rate `(x_j / N) p_jl`.
    pub fn rates(&self, x: &Composition) -> Vec<(Composition, T)> {
        let n = T::from_usize(self.balls);
        let mut out = Vec::new();
        for (j, &k) in x.as_slice().iter().enumerate() {
            if k == 0 {
                continue;
            }
            for l in 0..self.colours() {
                if l == j || self.matrix[j][l].is_zero() {
                    continue;
                }
                let y = x.moved(j, l).expect("x_j > 0");
                out.push((y, T::from_usize(k) / n.clone() * self.matrix[j][l].clone()));
            }
        }
        out
    }

    /// `sum_i n_i (1 - rho_i) / N`.
    pub fn eigenvalue(&self, n: &[usize]) -> T {
        let mut s = T::zero();
        for (k, r) in n.iter().zip(&self.rho) {
            s = s + T::from_usize(*k) * (T::one() - r.clone());
        }
        s / T::from_usize(self.balls)
    }
}

/// `m(y; p) sum_{|n| <= N} e^(-t lambda_n) C(N; n)^-1 Q_n(x) Q_n(y) / prod a_i^n_i`.
pub fn ehrenfest_dtype<T: Scalar>(
    x: &Composition,
    y: &Composition,
    t: &T,
    urn: &UrnSpec<T>,
) -> Result<T> {
    if *t < T::zero() {
        return Err(Error::domain(format!("time t = {t} must be non-negative")));
    }
    let d = urn.colours();
    for c in [x, y] {
        if c.len() != d || c.total() != urn.balls() {
            return Err(Error::Dimension(format!(
                "{c} is not an occupancy of {} balls over {d} colours",
                urn.balls()
            )));
        }
    }
    let u = urn.basis().u();
    let sx = crate::mvk::table_series(u, x.as_slice(), urn.balls());
    let sy = crate::mvk::table_series(u, y.as_slice(), urn.balls());
    let a = urn.basis().a();
    let mut sum = T::zero();
    for ((n, qx), qy) in sx.terms().zip(sy.terms().map(|(_, v)| v)) {
        if qx.is_zero() || qy.is_zero() {
            continue;
        }
        let mut full = vec![urn.balls() - n.iter().sum::<usize>()];
        full.extend_from_slice(n);
        let mut norm = crate::combinatorics::multinomial::<T>(&full);
        for (k, ai) in n.iter().zip(&a[1..]) {
            norm = norm * ai.powi(*k as i32);
        }
        sum = sum + exp_neg(urn.eigenvalue(n), t)? * qx.clone() * qy.clone() / norm;
    }
    Ok(y.multinomial_mass(urn.basis().p()) * sum)
}

/// Largest `|sum_{j,l} (x_j/N) p_jl Q_n(x - e_j + e_l) - Q_n(x) + lambda_n Q_n(x)|`
/// over all states and indices: the eigen-identity behind the expansion.
pub fn urn_eigen_residual<T: Scalar>(urn: &UrnSpec<T>) -> f64 {
    let n_balls = urn.balls();
    let table = PolyTable::new(urn.basis(), n_balls);
    let d = urn.colours();
    let big_n = T::from_usize(n_balls);
    let mut worst: f64 = 0.0;
    for n in crate::combinatorics::bounded_indices(d - 1, n_balls) {
        let lam = urn.eigenvalue(&n);
        for (xi, x) in table.compositions().iter().enumerate() {
            let qx = table.value(&n, xi);
            let mut acc = T::zero();
            for j in 0..d {
                if x.as_slice()[j] == 0 {
                    continue;
                }
                let w = T::from_usize(x.as_slice()[j]) / big_n.clone();
                for l in 0..d {
                    let y = x.moved(j, l).expect("x_j > 0");
                    acc = acc + w.clone() * urn.matrix()[j][l].clone() * table.get(&n, &y);
                }
            }
            let r = acc - qx.clone() + lam.clone() * qx;
            worst = worst.max(r.to_f64().abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn two_color_single_ball_matrix() {
        let t = 0.8f64;
        let v = ehrenfest_two_color(0, 1, &t, 1, &0.5).unwrap();
        assert!((v - (1.0 - (-2.0 * t).exp()) / 2.0).abs() < 1e-15);
        let p = 0.7f64;
        let lam = 1.0 / p;
        let v = ehrenfest_two_color(1, 1, &t, 1, &p).unwrap();
        assert!((v - (p + (1.0 - p) * (-lam * t).exp())).abs() < 1e-15);
    }

    #[test]
    fn two_color_time_zero_exact() {
        let p = rat(2, 3);
        for x in 0..=3 {
            for y in 0..=3 {
                let v = ehrenfest_two_color(x, y, &rat(0, 1), 3, &p).unwrap();
                assert_eq!(v, if x == y { rat(1, 1) } else { rat(0, 1) });
            }
        }
    }

    #[test]
    fn two_colour_urn_matches_formula() {
        let urn = UrnSpec::two_colour(3, 0.6).unwrap();
        assert!(urn.matrix()[0][0].abs() < 1e-15);
        assert!((urn.matrix()[1][0] - 0.4 / 0.6).abs() < 1e-15);
        for x in urn.states() {
            for y in urn.states() {
                let a = ehrenfest_dtype(&x, &y, &0.4, &urn).unwrap();
                let b = ehrenfest_two_color(x.as_slice()[1], y.as_slice()[1], &0.4, 3, &0.6).unwrap();
                assert!((a - b).abs() < 1e-13, "{x} {y}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn eigen_identity_exact() {
        let p = vec![rat(1, 3), rat(1, 3), rat(1, 3)];
        let basis = Basis::orthogonal_from(p).unwrap();
        let urn = UrnSpec::new(4, basis, vec![rat(1, 2), rat(1, 4)]).unwrap();
        let rows: Vec<Rational> = urn.matrix().iter().map(|r| r.iter().cloned().sum()).collect();
        assert!(rows.iter().all(|s| *s == rat(1, 1)));
        assert_eq!(urn_eigen_residual(&urn), 0.0);
        let x = urn.states()[3].clone();
        assert_eq!(ehrenfest_dtype(&x, &x, &rat(0, 1), &urn).unwrap(), rat(1, 1));
    }

    #[test]
    fn negative_entries_rejected() {
        assert!(matches!(UrnSpec::two_colour(3, 0.35), Err(Error::Probability(_))));
        let basis = Basis::orthogonal_from(vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert!(UrnSpec::new(2, basis, vec![rat(-3, 1)]).is_err());
    }
}
