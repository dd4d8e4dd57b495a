//! Brute-force 8VSOS and three-colour partition functions with domain wall boundary
//! conditions, and the identities tying them to `P_n^(2)`, `P_n^(4)` and to determinants.

use crate::ellpf::{hankel_h, p_sigma, SigmaLabel};
use crate::error::{Error, Result};
use crate::numkernel::{exp_i_pi, omega, omega_pow, q_pochhammer, theta, Nome, TruncationPolicy, C64};
use crate::pfaffian::determinant;
use crate::sympoly::{double_staircase, schur, shifted_double_staircase, vandermonde};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest board size accepted by the enumeration.
pub const MAX_BOARD: usize = 6;

fn binom2(n: usize) -> i64 {
    (n * n.saturating_sub(1) / 2) as i64
}

/// Heights `a[i][j]`, `0 ≤ i, j ≤ n`, on an `n × n` board of blocks.
///
/// Neighbours differ by exactly 1; the boundary is `a[0][j] = j`, `a[i][0] = i`,
/// `a[n][j] = n − j`, `a[i][n] = n − i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HeightMatrix {
    n: usize,
    a: Vec<i64>,
}

impl HeightMatrix {
    /// Validates the neighbour and boundary conditions.
    pub fn new(n: usize, rows: Vec<Vec<i64>>) -> Result<Self> {
        if rows.len() != n + 1 || rows.iter().any(|r| r.len() != n + 1) {
            return Err(Error::Domain(format!("height matrix must be {0} x {0}", n + 1)));
        }
        let a: Vec<i64> = rows.into_iter().flatten().collect();
        let h = HeightMatrix { n, a };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for k in 0..=n {
            let (ki, ni) = (k as i64, n as i64);
            if self.get(0, k) != ki || self.get(k, 0) != ki || self.get(n, k) != ni - ki || self.get(k, n) != ni - ki {
                return Err(Error::Domain("boundary heights violate domain wall conditions".into()));
            }
        }
        for i in 0..=n {
            for j in 0..=n {
                if j < n && (self.get(i, j) - self.get(i, j + 1)).abs() != 1 {
                    return Err(Error::Domain(format!("heights at ({i},{j}) and ({i},{}) differ by != 1", j + 1)));
                }
                if i < n && (self.get(i, j) - self.get(i + 1, j)).abs() != 1 {
                    return Err(Error::Domain(format!("heights at ({i},{j}) and ({},{j}) differ by != 1", i + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * (self.n + 1) + j]
    }

    /// Heights `[NW, NE, SW, SE]` of block `(i, j)`, `1 ≤ i, j ≤ n`.
    pub fn block(&self, i: usize, j: usize) -> [i64; 4] {
        [self.get(i - 1, j - 1), self.get(i - 1, j), self.get(i, j - 1), self.get(i, j)]
    }
}

/// Every domain-wall height matrix of size `n`, in row-major DFS order with the smaller
/// height tried first.
pub fn enumerate_states(n: usize) -> Result<Vec<HeightMatrix>> {
    if n == 0 || n > MAX_BOARD {
        return Err(Error::Range(format!("board size {n} outside 1..={MAX_BOARD}")));
    }
    let w = n + 1;
    let mut a = vec![0i64; w * w];
    for k in 0..=n {
        let (ki, ni) = (k as i64, n as i64);
        a[k] = ki;
        a[k * w] = ki;
        a[n * w + k] = ni - ki;
        a[k * w + n] = ni - ki;
    }
    let cells: Vec<(usize, usize)> = (1..n).flat_map(|i| (1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    fn dfs(pos: usize, cells: &[(usize, usize)], a: &mut Vec<i64>, w: usize, n: usize, out: &mut Vec<HeightMatrix>) {
        if pos == cells.len() {
            out.push(HeightMatrix { n, a: a.clone() });
            return;
        }
        let (i, j) = cells[pos];
        let (up, left) = (a[(i - 1) * w + j], a[i * w + j - 1]);
        for h in [up - 1, up + 1] {
            if (h - left).abs() != 1 {
                continue;
            }
            // cells next to the fixed right and bottom edges must match them too
            if j == n - 1 && (h - a[i * w + n]).abs() != 1 {
                continue;
            }
            if i == n - 1 && (h - a[n * w + j]).abs() != 1 {
                continue;
            }
            a[i * w + j] = h;
            dfs(pos + 1, cells, a, w, n, out);
        }
    }
    dfs(0, &cells, &mut a, w, n, &mut out);
    Ok(out)
}

/// Spectral, dynamical and crossing parameters of the 8VSOS model.
#[derive(Debug, Clone, PartialEq)]
pub struct SosParams {
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub lambda: C64,
    pub nome: Nome,
    pub q: C64,
}

impl SosParams {
    pub fn new(u: Vec<C64>, v: Vec<C64>, lambda: C64, nome: Nome, q: C64) -> Result<Self> {
        if u.len() != v.len() || u.is_empty() {
            return Err(Error::Domain("u and v must be nonempty and of equal length".into()));
        }
        Ok(SosParams { u, v, lambda, nome, q })
    }

    /// Crossing parameter `q = ω`.
    pub fn at_omega(u: Vec<C64>, v: Vec<C64>, lambda: C64, nome: Nome) -> Result<Self> {
        Self::new(u, v, lambda, nome, omega())
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// `q^a`, reduced mod 3 when `q = ω`.
    pub fn q_pow(&self, a: i64) -> C64 {
        if (self.q - omega()).norm() < 1e-15 {
            omega_pow(a)
        } else {
            self.q.powi(a as i32)
        }
    }
}

fn th(x: C64, nome: &Nome) -> Result<C64> {
    th_base(x, nome.p())
}

/// `θ(x; p)`, with `θ(x; 0) = 1 − x` also at `x = 0` (needed for `λ = 0`).
fn th_base(x: C64, base: C64) -> Result<C64> {
    if base == ZERO {
        Ok(ONE - x)
    } else {
        theta(x, base, &TruncationPolicy::default())
    }
}

fn nonzero(v: C64, what: &str) -> Result<C64> {
    if v.norm() < 1e-300 {
        Err(Error::Degenerate(format!("{what} vanishes")))
    } else {
        Ok(v)
    }
}

/// Weight `R^{b−a, d−b}_{d−c, c−a}(dynamical, u)` of a block with heights `[a, b; c, d]`.
pub fn r_weight(heights: [i64; 4], dynamical: C64, u: C64, q: C64, nome: &Nome) -> Result<C64> {
    let [a, b, c, d] = heights;
    let pattern = (b - a, d - b, d - c, c - a);
    let tq = || nonzero(th(q, nome)?, "theta(q; p)");
    let tl = || nonzero(th(dynamical, nome)?, "theta(lambda q^a; p)");
    match pattern {
        (1, 1, 1, 1) | (-1, -1, -1, -1) => Ok(th(q * u, nome)? / tq()?),
        (1, -1, 1, -1) => Ok(th(u, nome)? * th(q * dynamical, nome)? / (tq()? * tl()?)),
        (-1, 1, -1, 1) => Ok(q * th(u, nome)? * th(dynamical / q, nome)? / (tq()? * tl()?)),
        (-1, 1, 1, -1) => Ok(th(dynamical * u, nome)? / tl()?),
        (1, -1, -1, 1) => Ok(u * th(dynamical / u, nome)? / tl()?),
        _ => Err(Error::Domain(format!("inadmissible block heights {heights:?}"))),
    }
}

/// `Z_n = Σ_states ∏_{blocks (i,j)} R(λq^{a_NW}, u_i/v_j)`.
pub fn partition_z(params: &SosParams) -> Result<C64> {
    partition_z_over(params, &enumerate_states(params.n())?)
}

/// [`partition_z`] over a precomputed state list.
pub fn partition_z_over(params: &SosParams, states: &[HeightMatrix]) -> Result<C64> {
    let n = params.n();
    // weight of block (i, j) depends only on its NW height and its sign pattern
    let mut cache: std::collections::HashMap<(usize, usize, [i64; 4]), C64> = std::collections::HashMap::new();
    let mut total = ZERO;
    for s in states {
        if s.n() != n {
            return Err(Error::Domain("state size does not match parameters".into()));
        }
        let mut w = ONE;
        for i in 1..=n {
            for j in 1..=n {
                let blk = s.block(i, j);
                let key = (i, j, [blk[0], blk[1] - blk[0], blk[2] - blk[0], blk[3] - blk[0]]);
                let val = match cache.get(&key) {
                    Some(v) => *v,
                    None => {
                        let dynamical = params.lambda * params.q_pow(blk[0]);
                        let v = r_weight(blk, dynamical, params.u[i - 1] / params.v[j - 1], params.q, &params.nome)?;
                        cache.insert(key, v);
                        v
                    }
                };
                w *= val;
            }
        }
        total += w;
    }
    Ok(total)
}

/// The Izergin–Korepin expression for `Z_n(u; v; 0; 0, q)`:
/// `(−1)^{C(n,2)} U / ((1−q)^{2C(n,2)} V^n) · ∏(u_i − v_j)(qu_i − v_j)/(Δ(u)Δ(v)) · det(1/((u_i − v_j)(qu_i − v_j)))`.
pub fn ik_determinant(u: &[C64], v: &[C64], q: C64) -> Result<C64> {
    let n = u.len();
    if v.len() != n || n == 0 {
        return Err(Error::Domain("u and v must be nonempty and of equal length".into()));
    }
    let mut pre = ONE;
    let mut entries = Vec::with_capacity(n * n);
    for &ui in u {
        for &vj in v {
            let f = (ui - vj) * (q * ui - vj);
            nonzero(f, "(u_i - v_j)(q u_i - v_j)")?;
            pre *= f;
            entries.push(f.inv());
        }
    }
    let dv = nonzero(vandermonde(u) * vandermonde(v), "Delta(u) Delta(v)")?;
    let b = binom2(n);
    let big_u: C64 = u.iter().product();
    let big_v: C64 = v.iter().product();
    let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
    let red = big_u * sign / ((ONE - q).powi(2 * b as i32) * big_v.powi(n as i32));
    Ok(red * pre * determinant(n, &entries) / dv)
}

/// `Z_n(ωu; v; λ; p, ω)`.
pub fn z_omega(u: &[C64], v: &[C64], lambda: C64, nome: &Nome) -> Result<C64> {
    let wu: Vec<C64> = u.iter().map(|&x| x * omega()).collect();
    partition_z(&SosParams::at_omega(wu, v.to_vec(), lambda, *nome)?)
}

/// Residual of `3^{C(n,2)} ω^{n(n−2)} V^n/U · Z_n(ωu; v; 0; 0, ω) = s_{n−1,n−1,…,1,1,0,0}(u, v)`.
pub fn npfb_check(u: &[C64], v: &[C64]) -> Result<f64> {
    let n = u.len();
    let z = z_omega(u, v, ZERO, &Nome::zero())?;
    let big_u: C64 = u.iter().product();
    let big_v: C64 = v.iter().product();
    let n_i = n as i64;
    let lhs = 3f64.powi(binom2(n) as i32) * omega_pow(n_i * (n_i - 2)) * big_v.powi(n as i32) / big_u * z;
    let x: Vec<C64> = u.iter().chain(v).copied().collect();
    let rhs = schur(&double_staircase(n), &x)?;
    Ok((lhs - rhs).norm() / rhs.norm())
}

/// Residuals of the trigonometric domain-wall identities: brute force against the Schur
/// combination, and the Schur combination against the determinant form.
pub fn trig_dwpf_check(u: &[C64], v: &[C64], lambda: C64) -> Result<(f64, f64)> {
    let n = u.len();
    if v.len() != n || n == 0 {
        return Err(Error::Domain("u and v must be nonempty and of equal length".into()));
    }
    let ni = n as i64;
    let big_u: C64 = u.iter().product();
    let big_v: C64 = v.iter().product();
    let w_np1 = omega_pow(binom2(n + 1));
    let w_n = omega_pow(binom2(n));
    let sgn = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let first = w_np1 * (big_u + omega_pow(ni) * lambda * lambda * big_v);
    let second = w_n * lambda * sgn;

    let z = z_omega(u, v, lambda, &Nome::zero())?;
    let lhs = 3f64.powi(binom2(n) as i32)
        * big_v.powi(n as i32)
        * (ONE - lambda * omega_pow(ni + 1))
        * (ONE - lambda * omega_pow(ni + 2))
        * z;
    let x: Vec<C64> = u.iter().chain(v).copied().collect();
    let schur_form = first * schur(&double_staircase(n), &x)? + second * schur(&shifted_double_staircase(n), &x)?;

    let mut pre = ONE;
    let (mut d1, mut d2) = (Vec::with_capacity(n * n), Vec::with_capacity(n * n));
    for &ui in u {
        for &vj in v {
            let c3 = nonzero(ui.powi(3) - vj.powi(3), "u_i^3 - v_j^3")?;
            pre *= c3;
            d1.push((ui - vj) / c3);
            d2.push((ui * ui - vj * vj) / c3);
        }
    }
    let dx = nonzero(vandermonde(&x), "Delta(u, v)")?;
    let det_form = pre / dx * (first * determinant(n, &d1) + second * determinant(n, &d2));

    let scale = schur_form.norm();
    Ok(((lhs - schur_form).norm() / scale, (schur_form - det_form).norm() / scale))
}

/// Residual of `θ(p;p²)θ(λω, λω²; p) = λθ(−pλ²;p²)/θ(−p²;p⁶) + θ(−λ²;p²)/θ(−p;p⁶)`.
pub fn tti_check(lambda: C64, nome: &Nome) -> Result<f64> {
    let p = |l: f64| nome.p_pow(l);
    let lhs = th_base(p(1.0), p(2.0))? * th(lambda * omega(), nome)? * th(lambda * omega_pow(2), nome)?;
    let rhs = lambda * th_base(-p(1.0) * lambda * lambda, p(2.0))? / nonzero(th_base(-p(2.0), p(6.0))?, "theta(-p^2; p^6)")?
        + th_base(-lambda * lambda, p(2.0))? / nonzero(th_base(-p(1.0), p(6.0))?, "theta(-p; p^6)")?;
    let scale = lhs.norm().max(rhs.norm());
    Ok((lhs - rhs).norm() / scale)
}

/// Both sides of the domain-wall pfaffian identity: the 8VSOS side built from
/// `Z_n(ωu; v; λ; p, ω)` and the `P_n^(2)`, `P_n^(4)` combination.
/// Spectral parameters are `(u, v) = (x_1², …, x_{2n}²)` with `x_j = e^{iπz_j}`.
pub fn dwt_sides(z: &[C64], lambda: C64, nome: &Nome) -> Result<(C64, C64)> {
    if z.is_empty() || !z.len().is_multiple_of(2) {
        return Err(Error::Domain("need 2n points".into()));
    }
    let n = z.len() / 2;
    let ni = n as i64;
    let x: Vec<C64> = z.iter().map(|&w| exp_i_pi(w)).collect();
    let x2: Vec<C64> = x.iter().map(|v| v * v).collect();
    let (u, v) = x2.split_at(n);
    let big_u: C64 = u.iter().product();
    let big_v: C64 = v.iter().product();
    let big_x: C64 = x.iter().product();
    let p = |l: f64| nome.p_pow(l);

    let mut delta = ONE;
    for i in 0..2 * n {
        for j in i + 1..2 * n {
            delta *= x2[i] * th(x2[j] / x2[i], nome)?;
        }
    }
    let lhs = p(binom2(n) as f64)
        * th_base(p(1.0), p(2.0))?
        * th(omega(), nome)?.powi((n * (n - 1)) as i32)
        * th(lambda * omega_pow(ni + 1), nome)?
        * th(lambda * omega_pow(ni + 2), nome)?
        * delta
        * z_omega(u, v, lambda, nome)?;

    let l2 = lambda * lambda;
    let sgn = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let t2 = th_base(-p(ni as f64 + 1.0) * omega_pow(ni) * l2 * big_v / big_u, p(2.0))?;
    let t4 = th_base(-p(ni as f64) * omega_pow(ni) * l2 * big_v / big_u, p(2.0))?;
    let first = omega_pow(2 * ni)
        * sgn
        * lambda.powi(ni as i32 + 1)
        * big_x.powi(2 * ni as i32 - 1)
        * th_base(-p(2.0), p(6.0))?.powi(ni as i32 - 1)
        * t2
        * p_sigma(SigmaLabel::plain(2), z, nome)?;
    let second = lambda.powi(ni as i32)
        * big_u
        * big_x.powi(2 * ni as i32 - 2)
        * th_base(-p(1.0), p(6.0))?.powi(ni as i32 - 1)
        * t4
        * p_sigma(SigmaLabel::plain(4), z, nome)?;
    Ok((lhs, first + second))
}

/// Relative residual of the domain-wall pfaffian identity.
pub fn dwt_check(z: &[C64], lambda: C64, nome: &Nome) -> Result<f64> {
    let (lhs, rhs) = dwt_sides(z, lambda, nome)?;
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
}

/// Residual of `Z_n(pωu_1, ωu_2, …; v) = (−1)^n Vλ/(ω^n u_1^n) Z_n(ωu_1, …; v)`.
pub fn zqp_check(u: &[C64], v: &[C64], lambda: C64, nome: &Nome) -> Result<f64> {
    if nome.is_zero() {
        return Err(Error::Domain("the quasi-period relation is vacuous at p = 0".into()));
    }
    let n = u.len();
    let mut shifted = u.to_vec();
    shifted[0] *= nome.p();
    let lhs = z_omega(&shifted, v, lambda, nome)?;
    let big_v: C64 = v.iter().product();
    let sgn = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let rhs = big_v * lambda * sgn / (omega_pow(n as i64) * u[0].powi(n as i32)) * z_omega(u, v, lambda, nome)?;
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
}

/// Three-colour weights `t_0, t_1, t_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeColourWeights {
    pub t: [C64; 3],
}

impl ThreeColourWeights {
    pub fn new(t0: C64, t1: C64, t2: C64) -> Result<Self> {
        if [t0, t1, t2].iter().any(|t| t.norm() == 0.0) {
            return Err(Error::Domain("three-colour weights must be nonzero".into()));
        }
        Ok(ThreeColourWeights { t: [t0, t1, t2] })
    }

    /// `t_j = θ(λω^j; p)^{−3}`.
    pub fn from_lambda(lambda: C64, nome: &Nome) -> Result<Self> {
        let t = |j: i64| -> Result<C64> { Ok(nonzero(th(lambda * omega_pow(j), nome)?, "theta(lambda w^j; p)")?.powi(-3)) };
        Self::new(t(0)?, t(1)?, t(2)?)
    }
}

/// `Σ_states ∏_{all (n+1)² squares} t_{height mod 3}`.
pub fn three_colour_z(n: usize, w: &ThreeColourWeights) -> Result<C64> {
    let states = enumerate_states(n)?;
    let mut total = ZERO;
    for s in &states {
        let mut counts = [0i32; 3];
        for i in 0..=n {
            for j in 0..=n {
                counts[s.get(i, j).rem_euclid(3) as usize] += 1;
            }
        }
        total += w.t[0].powi(counts[0]) * w.t[1].powi(counts[1]) * w.t[2].powi(counts[2]);
    }
    Ok(total)
}

/// `ω^{n(n+1)} θ(λω², λω^{n+1}; p)² / (θ(λω^n; p) θ(λ³; p³)^{n²+2n+2}) · Z_n(ω, …, ω; 1, …, 1; λ; p, ω)`.
pub fn three_colour_bridge(n: usize, lambda: C64, nome: &Nome) -> Result<C64> {
    let ni = n as i64;
    let ones = vec![ONE; n];
    let z = z_omega(&ones, &ones, lambda, nome)?;
    let num = th(lambda * omega_pow(2), nome)? * th(lambda * omega_pow(ni + 1), nome)?;
    let den = th(lambda * omega_pow(ni), nome)?
        * th_base(lambda.powi(3), nome.p_pow(3.0))?.powi((n * n + 2 * n + 2) as i32);
    Ok(omega_pow(ni * (ni + 1)) * num * num / nonzero(den, "bridge denominator")? * z)
}

/// The Hankel-determinant expression for `Z_n^{3C}` under `t_j = θ(λω^j; p)^{−3}`.
pub fn three_colour_hankel(n: usize, lambda: C64, nome: &Nome) -> Result<C64> {
    let ni = n as i64;
    let p = |l: f64| nome.p_pow(l);
    let pol = TruncationPolicy::default();
    let poch = |a: C64, b: C64| q_pochhammer(a, b, &pol);
    let b2 = binom2(n);
    let b2p = binom2(n + 1);
    let sign = if b2p % 2 == 0 { 1.0 } else { -1.0 };
    let fact: f64 = (1..=2 * n).map(|j| (1..j).map(|v| v as f64).product::<f64>()).product();
    let th_pair = th(lambda * omega_pow(2), nome)? * th(lambda * omega_pow(ni + 1), nome)?;
    let nn = (n * n) as i32;
    let num = omega_pow(2 * ni * ni) * sign * poch(p(3.0), p(3.0))?.powi(3 * nn) * lambda.powi(n as i32) * th_pair * th_pair;
    let den = (p(1.0) * 48.0).powi(b2 as i32)
        * fact
        * poch(p(1.0), p(1.0))?.powi(3 * nn + 1)
        * poch(p(6.0), p(6.0))?.powi(4 * nn + 1)
        * th_base(lambda.powi(3), p(3.0))?.powi(nn + 2 * n as i32 + 3);
    let l2 = lambda * lambda;
    let h2 = hankel_h(SigmaLabel::plain(2), n, nome)?;
    let h4 = hankel_h(SigmaLabel::plain(4), n, nome)?;
    let first = omega_pow(2 * ni)
        * poch(-p(1.0), -p(1.0))?
        * poch(p(12.0), p(12.0))?
        * lambda
        * th_base(-p(ni as f64 + 1.0) * omega_pow(ni) * l2, p(2.0))?
        * h2;
    let second = poch(-p(3.0), -p(3.0))? * poch(p(4.0), p(4.0))? * th_base(-p(ni as f64) * omega_pow(ni) * l2, p(2.0))? * h4;
    Ok(num / nonzero(den, "three-colour denominator")? * (first + second))
}

/// Relative residual between brute-force `Z_n^{3C}` and its Hankel-determinant expression.
pub fn thc_check(n: usize, lambda: C64, nome: &Nome) -> Result<f64> {
    let brute = three_colour_z(n, &ThreeColourWeights::from_lambda(lambda, nome)?)?;
    let hankel = three_colour_hankel(n, lambda, nome)?;
    Ok((brute - hankel).norm() / brute.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn z_sample(n: usize) -> Vec<C64> {
        let base = [0.11, 0.37, 0.58, 0.83, 0.26, 0.71, 0.05, 0.94];
        (0..2 * n).map(|j| c(base[j], 0.03 * (j as f64) - 0.05)).collect()
    }

    /// Independent count: heights as lattice paths, checked cell by cell over all
    /// `2^{(n−1)²}` parity-consistent assignments.
    fn brute_count(n: usize) -> usize {
        let cells = (n - 1) * (n - 1);
        let mut count = 0;
        for mask in 0u64..(1u64 << cells) {
            let mut rows = vec![vec![0i64; n + 1]; n + 1];
            for k in 0..=n {
                rows[0][k] = k as i64;
                rows[k][0] = k as i64;
                rows[n][k] = (n - k) as i64;
                rows[k][n] = (n - k) as i64;
            }
            let mut ok = true;
            for i in 1..n {
                for j in 1..n {
                    let bit = (mask >> ((i - 1) * (n - 1) + (j - 1))) & 1;
                    rows[i][j] = rows[i - 1][j] + if bit == 1 { 1 } else { -1 };
                }
            }
            if HeightMatrix::new(n, rows).is_err() {
                ok = false;
            }
            if ok {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn state_counts() {
        let want = [1usize, 2, 7, 42, 429];
        for (k, &w) in want.iter().enumerate() {
            assert_eq!(enumerate_states(k + 1).unwrap().len(), w);
        }
        for n in 1..=4 {
            assert_eq!(brute_count(n), want[n - 1]);
        }
        assert!(enumerate_states(0).is_err());
        assert!(enumerate_states(7).is_err());
    }

    #[test]
    fn weight_examples() {
        let nome = Nome::from_polar(0.2, 0.3).unwrap();
        let (q, lam, u) = (c(0.3, 0.8), c(0.7, -0.2), c(1.1, 0.4));
        let w = r_weight([0, 1, 1, 2], lam, u, q, &nome).unwrap();
        assert!((w - th(q * u, &nome).unwrap() / th(q, &nome).unwrap()).norm() < 1e-15);
        let w = r_weight([0, 1, 1, 0], lam, u, q, &nome).unwrap();
        assert!((w - u * th(lam / u, &nome).unwrap() / th(lam, &nome).unwrap()).norm() < 1e-14);
        let w0 = r_weight([0, 1, 1, 2], lam, u, q, &Nome::zero()).unwrap();
        assert!((w0 - (ONE - q * u) / (ONE - q)).norm() < 1e-15);
        assert!(r_weight([0, 1, 1, 1], lam, u, q, &nome).is_err());
    }

    #[test]
    fn single_block_partition_function() {
        let nome = Nome::from_polar(0.3, 0.1).unwrap();
        let p = SosParams::new(vec![c(0.9, 0.3)], vec![c(1.2, -0.1)], c(0.6, 0.5), nome, c(0.2, 0.9)).unwrap();
        let u = p.u[0] / p.v[0];
        let want = u * th(p.lambda / u, &nome).unwrap() / th(p.lambda, &nome).unwrap();
        assert!((partition_z(&p).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn partition_function_is_separately_symmetric() {
        let nome = Nome::from_polar(0.25, 0.7).unwrap();
        let u = vec![c(0.9, 0.3), c(1.1, -0.2), c(0.8, 0.6)];
        let v = vec![c(1.2, -0.1), c(0.7, 0.4), c(1.0, 0.9)];
        let base = SosParams::new(u.clone(), v.clone(), c(0.6, 0.5), nome, c(0.2, 0.9)).unwrap();
        let z0 = partition_z(&base).unwrap();
        let pu = SosParams { u: vec![u[2], u[0], u[1]], ..base.clone() };
        let pv = SosParams { v: vec![v[1], v[0], v[2]], ..base.clone() };
        for other in [pu, pv] {
            assert!((partition_z(&other).unwrap() - z0).norm() < 1e-10 * z0.norm());
        }
    }

    #[test]
    fn six_vertex_reduction_matches_izergin_korepin() {
        let q = c(0.4, 0.7);
        for n in 1..=3 {
            let u: Vec<C64> = (0..n).map(|i| c(0.8 + 0.2 * i as f64, 0.1 * i as f64 + 0.2)).collect();
            let v: Vec<C64> = (0..n).map(|i| c(1.3 - 0.15 * i as f64, -0.3 + 0.25 * i as f64)).collect();
            let z = partition_z(&SosParams::new(u.clone(), v.clone(), ZERO, Nome::zero(), q).unwrap()).unwrap();
            let ik = ik_determinant(&u, &v, q).unwrap();
            assert!((z - ik).norm() < 1e-10 * z.norm(), "n = {n}: {z} vs {ik}");
        }
    }

    #[test]
    fn trigonometric_identities() {
        for n in 1..=3 {
            let u: Vec<C64> = (0..n).map(|i| c(0.8 + 0.2 * i as f64, 0.1 * i as f64 + 0.2)).collect();
            let v: Vec<C64> = (0..n).map(|i| c(1.3 - 0.15 * i as f64, -0.3 + 0.25 * i as f64)).collect();
            assert!(npfb_check(&u, &v).unwrap() < 1e-10);
            let (a, b) = trig_dwpf_check(&u, &v, c(0.45, -0.6)).unwrap();
            assert!(a < 1e-10 && b < 1e-10, "n = {n}: {a:e} {b:e}");
            let (a0, _) = trig_dwpf_check(&u, &v, ZERO).unwrap();
            assert!(a0 < 1e-10);
        }
    }

    #[test]
    fn tti_identity() {
        for (r, phi, lam) in [(0.3, 0.2, c(0.7, 0.4)), (0.5, -1.0, c(-0.3, 1.2)), (0.1, 2.0, c(1.5, -0.5))] {
            let nome = Nome::from_polar(r, phi).unwrap();
            assert!(tti_check(lam, &nome).unwrap() < 1e-12);
        }
    }

    #[test]
    fn domain_wall_pfaffian_identity() {
        let nome = Nome::from_polar(0.3, 0.5).unwrap();
        for n in 1..=3 {
            let r = dwt_check(&z_sample(n), c(0.6, 0.35), &nome).unwrap();
            assert!(r < 1e-9, "n = {n}: {r:e}");
        }
    }

    #[test]
    fn quasi_period_of_partition_function() {
        let nome = Nome::from_polar(0.35, 0.2).unwrap();
        for n in 1..=3 {
            let u: Vec<C64> = (0..n).map(|i| c(0.8 + 0.2 * i as f64, 0.1 * i as f64 + 0.2)).collect();
            let v: Vec<C64> = (0..n).map(|i| c(1.3 - 0.15 * i as f64, -0.3 + 0.25 * i as f64)).collect();
            assert!(zqp_check(&u, &v, c(0.6, 0.35), &nome).unwrap() < 1e-10);
        }
    }

    #[test]
    fn three_colour_basics() {
        let (t0, t1, t2) = (c(0.7, 0.2), c(1.3, -0.4), c(0.5, 0.9));
        let w = ThreeColourWeights::new(t0, t1, t2).unwrap();
        assert!((three_colour_z(1, &w).unwrap() - t0 * t0 * t1 * t1).norm() < 1e-15);
        let ones = ThreeColourWeights::new(ONE, ONE, ONE).unwrap();
        for (n, want) in [(1, 1.0), (2, 2.0), (3, 7.0), (4, 42.0)] {
            assert_eq!(three_colour_z(n, &ones).unwrap(), c(want, 0.0));
        }
        let s = c(1.1, 0.3);
        let ws = ThreeColourWeights::new(t0 * s, t1 * s, t2 * s).unwrap();
        let (a, b) = (three_colour_z(3, &ws).unwrap(), three_colour_z(3, &w).unwrap() * s.powi(16));
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn three_colour_bridge_and_hankel_form() {
        let nome = Nome::from_polar(0.3, 0.4).unwrap();
        let lam = c(0.55, 0.4);
        for n in 1..=2 {
            let brute = three_colour_z(n, &ThreeColourWeights::from_lambda(lam, &nome).unwrap()).unwrap();
            let bridge = three_colour_bridge(n, lam, &nome).unwrap();
            assert!((brute - bridge).norm() < 1e-10 * brute.norm(), "bridge n = {n}: {brute} vs {bridge}");
            let r = thc_check(n, lam, &nome).unwrap();
            assert!(r < 1e-6, "n = {n}: {r:e}");
        }
    }
}
