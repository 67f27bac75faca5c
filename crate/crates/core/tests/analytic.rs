use cubecov::algorithms::{mv1, mvd};
use cubecov::analytic::{
    beta_function, d_total, density_mass, expected_anchor_cost, phase1_cost, recursive_expected_cost, OrderStatSpec,
    QuadratureConfig,
};
use cubecov::experiments::fit_line;
use cubecov::{place_uniform, ratio, Exact, SeedSpec};
use num_traits::{One, Zero};

fn q() -> QuadratureConfig {
    QuadratureConfig::default()
}

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Clone)]
struct Poly(Vec<Exact>);

impl Poly {
    fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![Exact::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Poly(vec![Exact::one()]), |acc, _| acc.mul(self))
    }

    fn antiderivative_at(&self, x: &Exact) -> Exact {
        let mut acc = Exact::zero();
        let mut xp = x.clone();
        for (k, c) in self.0.iter().enumerate() {
            acc += c * &xp / ratio(k as i64 + 1, 1);
            xp *= x;
        }
        acc
    }

    fn integral(&self, lo: &Exact, hi: &Exact) -> Exact {
        self.antiderivative_at(hi) - self.antiderivative_at(lo)
    }
}

fn binomial(n: usize, k: usize) -> Exact {
    (1..=k).fold(Exact::one(), |acc, j| acc * ratio((n - k + j) as i64, j as i64))
}

/// `E|X_(i) − c|^a` for integer `a`, by exact piecewise polynomial
/// integration on `[0, c]` and `[c, 1]`.
fn exact_anchor_cost(n: usize, i: usize, c: &Exact, a: usize) -> Exact {
    let x = Poly(vec![Exact::zero(), Exact::one()]);
    let one_minus_x = Poly(vec![Exact::one(), -Exact::one()]);
    let density = x
        .pow(i - 1)
        .mul(&one_minus_x.pow(n - i))
        .mul(&Poly(vec![ratio(i as i64, 1) * binomial(n, i)]));
    let right = Poly(vec![-c.clone(), Exact::one()]).pow(a);
    let left = Poly(vec![c.clone(), -Exact::one()]).pow(a);
    density.mul(&left).integral(&Exact::zero(), c) + density.mul(&right).integral(c, &Exact::one())
}

fn exact_d_total(n: usize, a: usize) -> Exact {
    (1..=n)
        .map(|i| exact_anchor_cost(n, i, &ratio(2 * i as i64 - 1, 2 * n as i64), a))
        .fold(Exact::zero(), |acc, v| acc + v)
}

fn to_f64(x: &Exact) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}

#[test]
fn polynomial_oracle_reproduces_the_small_cases() {
    assert_eq!(exact_anchor_cost(1, 1, &ratio(1, 2), 1), ratio(1, 4));
    assert_eq!(exact_anchor_cost(2, 1, &ratio(1, 4), 1), ratio(19, 96));
    assert_eq!(exact_anchor_cost(1, 1, &ratio(0, 1), 2), ratio(1, 3));
    assert_eq!(exact_d_total(2, 1), ratio(19, 48));
}

#[test]
fn integer_exponents_match_exact_integration() {
    for a in 1..=4 {
        for n in 1..=12 {
            let exact = to_f64(&exact_d_total(n, a));
            let got = d_total(n, a as f64, &q()).unwrap();
            assert!((got - exact).abs() <= 1e-11 * exact, "n = {n}, a = {a}: {got} vs {exact}");
        }
    }
    for (n, i, c) in [(7, 3, ratio(1, 3)), (10, 10, ratio(1, 20)), (9, 1, ratio(17, 18))] {
        let exact = to_f64(&exact_anchor_cost(n, i, &c, 3));
        let got = expected_anchor_cost(OrderStatSpec::new(n, i).unwrap(), to_f64(&c), 3.0, &q()).unwrap();
        assert!((got - exact).abs() <= 1e-11 * exact);
    }
}

#[test]
fn two_sensor_total_is_nineteen_over_forty_eight() {
    assert!((d_total(2, 1.0, &q()).unwrap() - 19.0 / 48.0).abs() < 1e-12);
}

#[test]
fn beta_integer_identity_against_rationals() {
    let exact = Exact::one() / (binomial(11, 5) * ratio(5, 1));
    let got: f64 = beta_function(5.0, 7.0).unwrap();
    assert!((got - to_f64(&exact)).abs() < 1e-15 * to_f64(&exact));
    assert!((1.0 / beta_function(2.0_f64, 3.0).unwrap() - 12.0).abs() < 1e-12);
}

#[test]
fn densities_integrate_to_one() {
    for n in [1, 2, 10, 100, 1000, 3600] {
        for i in [1, (n / 2).max(1), n] {
            let mass = density_mass(OrderStatSpec::new(n, i).unwrap(), &q()).unwrap();
            assert!((mass - 1.0).abs() < 1e-10, "n = {n}, i = {i}: {mass}");
        }
    }
}

#[test]
fn anchor_cost_is_convex_in_the_anchor() {
    for (n, i) in [(1, 1), (5, 2), (40, 33)] {
        for a in [1.0, 1.5, 2.0, 4.0] {
            let spec = OrderStatSpec::new(n, i).unwrap();
            let h = 1.0 / 64.0;
            let vals: Vec<f64> = (0..=64)
                .map(|k| expected_anchor_cost(spec, k as f64 * h, a, &q()).unwrap())
                .collect();
            for w in vals.windows(2) {
                assert!((w[1] - w[0]).abs() < 1.0, "continuity");
            }
            for w in vals.windows(3) {
                let second = w[0] - 2.0 * w[1] + w[2];
                assert!(second >= -1e-9 * w[1].abs().max(1e-12), "n={n} i={i} a={a}: {second}");
            }
        }
    }
}

#[test]
fn linear_cost_grows_like_square_root() {
    let ratio_at = |n: usize| d_total(n, 1.0, &q()).unwrap() / (n as f64).sqrt();
    let mut prev = ratio_at(400);
    for n in [800, 1600, 3200] {
        let cur = ratio_at(n);
        assert!((cur / prev - 1.0).abs() < 0.02, "n = {n}: {prev} -> {cur}");
        prev = cur;
    }
}

#[test]
fn one_dimensional_exponent_over_three_decades() {
    let ns = [10usize, 32, 100, 316, 1000, 3162, 10000];
    for a in [1.0, 2.0, 3.0, 4.0] {
        let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
        let ys: Vec<f64> = ns.iter().map(|&n| d_total(n, a, &q()).unwrap().ln()).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        let expect = 1.0 - a / 2.0;
        assert!((fit.slope - expect).abs() < 0.03, "a = {a}: slope {}", fit.slope);
    }
}

#[test]
fn figure_constants_are_approached() {
    // √n · d_total(√n, a) against √n/6 (a = 2) and 1/10 (a = 4).
    let m = 60usize;
    let a2 = m as f64 * d_total(m, 2.0, &q()).unwrap() / m as f64;
    assert!((a2 / (1.0 / 6.0) - 1.0).abs() < 0.02, "{a2}");
    let a4 = m as f64 * d_total(m, 4.0, &q()).unwrap();
    assert!((a4 / 0.1 - 1.0).abs() < 0.02, "{a4}");
}

#[test]
fn first_phase_stays_bounded_when_a_equals_d() {
    let vals: Vec<f64> = [100usize, 400, 1600, 3600]
        .iter()
        .map(|&n| phase1_cost(n, 2, 2.0, &q()).unwrap())
        .collect();
    let hi = vals.iter().cloned().fold(0.0, f64::max);
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi / lo < 1.2, "{vals:?}");
}

#[test]
fn recursion_in_three_dimensions_adds_levels() {
    let n = 27;
    let total = recursive_expected_cost(n, 3, 1.0, &q()).unwrap();
    let expect = phase1_cost(27, 3, 1.0, &q()).unwrap()
        + 3.0 * (phase1_cost(9, 2, 1.0, &q()).unwrap() + 3.0 * d_total(3, 1.0, &q()).unwrap());
    assert!((total - expect).abs() < 1e-14 * expect);
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[test]
fn first_phase_matches_monte_carlo() {
    let trials = 100_000;
    let costs: Vec<f64> = (0..trials)
        .map(|t| {
            let s = place_uniform(9, 2, 1.0, SeedSpec::new(404, t)).unwrap();
            let log = mvd(&s).unwrap().log;
            (0..9)
                .flat_map(|i| log.moves(i).iter().filter(|m| m.phase == 1).map(|m| m.length()))
                .sum()
        })
        .collect();
    let (mean, se) = mean_and_stderr(&costs);
    let theory = phase1_cost(9, 2, 1.0, &q()).unwrap();
    assert!((mean - theory).abs() < 3.0 * se, "{mean} ± {se} vs {theory}");
}

#[test]
fn small_sorting_costs_match_monte_carlo() {
    let trials = 200_000;
    let exps = [0.5, 1.0, 2.0, 4.0];
    for n in [1usize, 4] {
        let mut costs = vec![Vec::with_capacity(trials); exps.len()];
        for t in 0..trials {
            let s = place_uniform(n, 1, 1.0, SeedSpec::new(77, t as u64)).unwrap();
            let log = mv1(&s).unwrap().log;
            for (k, a) in exps.iter().enumerate() {
                costs[k].push((0..n).map(|i| log.moves(i)[0].length().powf(*a)).sum::<f64>());
            }
        }
        for (k, a) in exps.iter().enumerate() {
            let (mean, se) = mean_and_stderr(&costs[k]);
            let theory = d_total(n, *a, &q()).unwrap();
            assert!((mean - theory).abs() < 4.0 * se, "n={n} a={a}: {mean} ± {se} vs {theory}");
        }
    }
}
