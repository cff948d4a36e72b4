#![allow(dead_code)]

use hosm::linalg::{Lu, Matrix, Polynomial};
use hosm::lti::LtiSystem;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Designs for γ = (λ+5)^(4-r), computed independently with numpy.
pub const PENDULUM_C: [[f64; 4]; 3] = [
    [-3.184299619667254, -1.9105797718003523, -4.544917243989255, -0.7169000951372718],
    [-0.6368599239334508, -0.2547439695733803, -0.4064708859837807, -0.06208584183069821],
    [-0.12737198478669015, -0.02547439695733803, -0.0310429209153491, -0.00620858418306982],
];

/// Reference four-digit sliding variables for r = 1, 2, 3.
pub const REFERENCE_C: [[f64; 4]; 3] = [
    [-3.2002, -1.9201, -4.5411, -0.7166],
    [-0.6400, -0.2560, -0.4062, -0.0621],
    [-0.1280, -0.0256, -0.0310, -0.0062],
];

/// Pole-placement gain putting the pendulum poles at -2, -3, -4, -5.
pub const PENDULUM_K: [f64; 4] = [-3.056927634880563, -3.923057131430056, -30.360607991415613, -4.473709903891244];

/// State at t = 3 of the pendulum under `u = -K x` held every 0.01 s from
/// x0 = (1,1,1,1), propagated with the exact discretization (scipy expm).
pub const PENDULUM_ZOH_X3: [f64; 4] =
    [0.0860773951564883, -0.1648306870069128, 0.032141951298288444, -0.05258759055525579];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(λ + 5)^(4 - r)`.
pub fn pendulum_gamma(r: usize) -> Polynomial<f64> {
    (0..4 - r).fold(Polynomial::one(), |p, _| p.mul(&Polynomial::linear(-5.0)))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<f64> {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

/// Random plant with a modestly conditioned controllability matrix.
pub fn random_controllable_system(rng: &mut ChaCha8Rng, n: usize) -> LtiSystem<f64> {
    loop {
        let sys = LtiSystem::new(random_matrix(rng, n, n), random_matrix(rng, n, 1)).unwrap();
        let p = hosm::linalg::controllability_matrix(sys.a(), sys.b()).unwrap();
        if let Ok(lu) = Lu::factor(&p) {
            if lu.condition_one() < 1e6 {
                return sys;
            }
        }
    }
}

/// Monic real polynomial of degree `deg` with stable real roots and complex pairs.
pub fn random_stable_poly(rng: &mut ChaCha8Rng, deg: usize) -> (Polynomial<f64>, Vec<num_complex::Complex<f64>>) {
    use num_complex::Complex;
    let mut roots = Vec::with_capacity(deg);
    while roots.len() < deg {
        if deg - roots.len() >= 2 && rng.gen_bool(0.4) {
            let re = rng.gen_range(-3.0..-0.5);
            let im = rng.gen_range(0.3..2.0);
            roots.push(Complex::new(re, im));
            roots.push(Complex::new(re, -im));
        } else {
            roots.push(Complex::new(rng.gen_range(-3.0..-0.5), 0.0));
        }
    }
    (hosm::linalg::poly_from_roots(&roots).unwrap(), roots)
}

/// Well-conditioned random similarity `T = I + 0.4·U(-1,1)` and its inverse.
pub fn random_similarity(rng: &mut ChaCha8Rng, n: usize) -> (Matrix<f64>, Matrix<f64>) {
    loop {
        let mut t = random_matrix(rng, n, n).scale(&0.4);
        t.add_diagonal(&1.0);
        if let Ok(lu) = Lu::factor(&t) {
            if lu.condition_one() < 50.0 {
                let inv = lu.solve(&Matrix::identity(n)).unwrap();
                return (t, inv);
            }
        }
    }
}

/// Matrix exponential by scaling and squaring of a degree-20 Taylor series.
pub fn expm(m: &Matrix<f64>) -> Matrix<f64> {
    let norm = m.norm_one();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = m.scale(&(0.5f64).powi(squarings as i32));
    let n = m.rows();
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for k in 1..=20 {
        term = term.matmul(&scaled).unwrap().scale(&(1.0 / k as f64));
        sum = sum.add(&term).unwrap();
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum).unwrap();
    }
    sum
}
