//! End-to-end acceptance checks: frozen reference prices, convergence
//! tables, guaranteed-error windows, and admissibility diagnostics.
//! Each test prints one `criterion N: pass` line when it holds; a panic
//! marks the criterion failed. Run with `--nocapture` to see the lines.

use std::f64::consts::PI;
use std::time::Instant;

use approx::assert_relative_eq;
use cospricer::catalog;
use cospricer::{bench_row, cumulant_window, load, markov_window, Config};
use cospricer_core::cos::{
    adaptive_n, cos_coefficients, price, put_coefficients, put_price_prefixes, OptionKind,
};
use cospricer_core::models::{MarketContext, ModelSpec};
use cospricer_core::moments::moments_from_cumulants;
use cospricer_core::oracles::{
    bs_price, carr_madan_price, laplace_price, merton_price, CarrMadanConfig,
};
use cospricer_core::quad::{adaptive_simpson, composite_simpson};
use cospricer_core::truncation::{tail_energy, TruncationRange};
use rand_core::{RngCore, SeedableRng};

fn pass(criterion: u32, detail: &str) {
    println!("criterion {criterion}: pass - {detail}");
}

fn market(name: &str) -> (ModelSpec, MarketContext, f64) {
    let entry = catalog::resolve(name).expect("catalog name");
    (entry.model, entry.ctx(), entry.strike)
}

/// Poisson-mixture series price for a jump diffusion from the catalog.
fn jump_series(model: &ModelSpec, ctx: &MarketContext, strike: f64, kind: OptionKind) -> f64 {
    let ModelSpec::MertonJump { sigma, intensity, mean_jump, jump_vol } = *model else {
        panic!("series oracle needs a jump diffusion")
    };
    merton_price(ctx.s0, strike, ctx.r, sigma, intensity, mean_jump, jump_vol, ctx.t, kind, 100)
}

/// Thousandths digit block, comparing prices the way rounded-down tables do.
fn floor_3dp(x: f64) -> i64 {
    (x * 1000.0).floor() as i64
}

#[test]
fn criterion_1_far_jump_price_block_to_print_precision() {
    let start = Instant::now();
    let (model, ctx, strike) = market("m2");

    let series = jump_series(&model, &ctx, strike, OptionKind::Put);
    assert!(
        (series - 0.3989455935507185).abs() <= 1e-13,
        "criterion 1: fail - series price {series} is off the frozen value"
    );

    let wide = markov_window(&model, &ctx, 1e-8, strike, 8).unwrap();
    let markov = price(&model, &ctx, strike, OptionKind::Put, wide, 1_000_000).price;
    assert!(
        (markov - 0.3989455935506925).abs() <= 1e-13,
        "criterion 1: fail - guaranteed-window price {markov} is off the frozen value"
    );

    let narrow = cumulant_window(&model, &ctx, 6).unwrap();
    let cumulants = price(&model, &ctx, strike, OptionKind::Put, narrow, 1_000_000).price;
    assert!(
        (cumulants - 0.3989454898987361).abs() <= 1e-13,
        "criterion 1: fail - rule-of-thumb price {cumulants} is off the frozen value"
    );

    let damped = carr_madan_price(&model, &ctx, strike, &CarrMadanConfig::default()).unwrap();
    assert!(
        (damped - 0.3989455935506932).abs() <= 1e-13,
        "criterion 1: fail - damped-integral price {damped} is off the frozen value"
    );

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "criterion 1: fail - block took {elapsed:.1}s");
    pass(
        1,
        &format!(
            "series {series:.16}, wide-window {markov:.16}, narrow-window {cumulants:.16}, \
             damped integral {damped:.16} all at frozen values ({elapsed:.1}s)"
        ),
    );
}

#[test]
fn criterion_2_slow_tail_reference_and_error_ladder() {
    let start = Instant::now();
    let (model, ctx, strike) = market("m3");

    // One-off wide-window run pins the reference to eleven decimals.
    let huge = price(&model, &ctx, strike, OptionKind::Put, TruncationRange::manual(89.0), 10_000_000);
    assert!(
        (1.02168477497..1.02168477498).contains(&huge.price),
        "criterion 2: fail - wide-window reference {:.14} leaves [1.02168477497, 1.02168477498)",
        huge.price
    );
    let reference = 1.02168477497;

    let guaranteed = markov_window(&model, &ctx, 1e-7, strike, 8).unwrap();
    let pm = put_price_prefixes(&model, &ctx, strike, guaranteed, 8000);
    let gates = [(1000usize, 5e-4), (2000, 1e-7), (4000, 1e-10), (8000, 1e-10)];
    for (n, gate) in gates {
        let err = (pm[n] - reference).abs();
        assert!(
            err <= gate,
            "criterion 2: fail - guaranteed-window error {err:.3e} at {n} terms exceeds {gate:.0e}"
        );
    }

    let narrow = cumulant_window(&model, &ctx, 4).unwrap();
    let pc = put_price_prefixes(&model, &ctx, strike, narrow, 8000);
    for n in [1000usize, 2000, 4000, 8000] {
        let err = (pc[n] - reference).abs();
        assert!(
            (err - 1.07e-4).abs() <= 0.05 * 1.07e-4,
            "criterion 2: fail - rule-of-thumb error {err:.4e} at {n} terms is not flat at 1.07e-4"
        );
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "criterion 2: fail - took {elapsed:.1}s");
    pass(
        2,
        &format!(
            "reference {:.14} holds eleven decimals; guaranteed-window errors decay \
             {:.2e}/{:.2e}/{:.2e}/{:.2e}, rule-of-thumb stalls at {:.3e} ({elapsed:.1}s)",
            huge.price,
            (pm[1000] - reference).abs(),
            (pm[2000] - reference).abs(),
            (pm[4000] - reference).abs(),
            (pm[8000] - reference).abs(),
            (pc[8000] - reference).abs()
        ),
    );
}

#[test]
fn criterion_3_low_intensity_jump_window_bias() {
    let (model, ctx, strike) = market("m1");

    let series = jump_series(&model, &ctx, strike, OptionKind::Put);
    assert!(
        (series - 1.263921).abs() <= 5e-6,
        "criterion 3: fail - series reference {series} is not 1.263921 +- 5e-6"
    );

    let narrow = cumulant_window(&model, &ctx, 4).unwrap();
    let plateau = price(&model, &ctx, strike, OptionKind::Put, narrow, 8000).price;
    assert!(
        (plateau - 1.263666).abs() <= 5e-6,
        "criterion 3: fail - narrow-window plateau {plateau} is not 1.263666 +- 5e-6"
    );

    let wide = markov_window(&model, &ctx, 1e-7, strike, 8).unwrap();
    let certified = adaptive_n(&model, &ctx, strike, OptionKind::Put, wide, 1e-7).unwrap();
    let err = (certified.price - series).abs();
    assert!(
        err <= 1e-7,
        "criterion 3: fail - guaranteed-window price misses the series reference by {err:.2e}"
    );

    pass(
        3,
        &format!(
            "narrow window settles {plateau:.7} vs series {series:.7}; guaranteed window lands \
             within {err:.2e} at {} terms",
            certified.n_used
        ),
    );
}

#[test]
fn criterion_4_wild_variance_thousandths() {
    let (model, ctx, strike) = market("m4");

    let narrow = cumulant_window(&model, &ctx, 2).unwrap();
    let thin = price(&model, &ctx, strike, OptionKind::Put, narrow, 1000).price;
    assert_eq!(
        floor_3dp(thin),
        1709,
        "criterion 4: fail - two-cumulant window at 1000 terms prices {thin:.6}, not 1.709"
    );

    let wide = markov_window(&model, &ctx, 1e-2, strike, 8).unwrap();
    let fat = price(&model, &ctx, strike, OptionKind::Put, wide, 1000).price;
    assert_eq!(
        floor_3dp(fat),
        1738,
        "criterion 4: fail - guaranteed window at 1000 terms prices {fat:.6}, not 1.738"
    );

    let damped = carr_madan_price(&model, &ctx, strike, &CarrMadanConfig::default()).unwrap();
    assert_eq!(
        floor_3dp(damped),
        1738,
        "criterion 4: fail - damped integral prices {damped:.6}, not 1.738"
    );

    pass(
        4,
        &format!("thousandths blocks: narrow {thin:.6} -> 1.709, wide {fat:.6} -> 1.738, damped {damped:.6} -> 1.738"),
    );
}

#[test]
fn criterion_5_comparison_table_windows_and_term_ratios() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/table1.json");
    let Config::Table1(mut cfg) = load(std::path::Path::new(path)).unwrap() else {
        panic!("criterion 5: fail - table config did not parse as the table experiment")
    };
    // Searches only need to reach the largest converging entry; timings
    // are reported elsewhere and one repetition keeps this test quick.
    cfg.n_cap = 20_000;
    cfg.time_reps = 1;
    let rows: Vec<_> = cfg
        .rows
        .iter()
        .map(|row| bench_row(row, cfg.n_cap, cfg.time_reps).expect("row prices").0)
        .collect();
    let find = |name: &str, eps: f64| {
        rows.iter()
            .find(|r| r.name == name && r.epsilon == eps)
            .unwrap_or_else(|| panic!("criterion 5: fail - row {name} at {eps:e} missing"))
    };

    // Stated-parameter rows gate the run; their windows are frozen to
    // printed-table precision.
    let gated = [
        ("m1", 1e-7, 0.9, 4.0),
        ("m1_six_cumulants", 1e-7, 2.8, 4.0),
        ("m2", 1e-8, 5.8, 18.2),
        ("m3", 1e-7, 1.5, 9.0),
        ("m4", 1e-2, 1.3, 3.7),
    ];
    for (name, eps, l_c, l_m) in gated {
        let row = find(name, eps);
        assert!(
            (row.l_c - l_c).abs() <= 0.05 && (row.l_m - l_m).abs() <= 0.05,
            "criterion 5: fail - {name} windows ({:.4}, {:.4}) leave ({l_c}, {l_m}) +- 0.05",
            row.l_c,
            row.l_m
        );
    }

    // Transcribed-parameter rows are tracked, not gating.
    let tracked = [
        ("heston_t1", 1e-7, 3.4, 9.4),
        ("heston_t1", 1e-4, 3.4, 12.0),
        ("heston_t10", 1e-7, 11.1, 28.0),
        ("heston_t10", 1e-4, 11.1, 39.6),
        ("vg_t0.1", 1e-7, 0.8, 2.3),
        ("vg_t0.1", 1e-4, 0.8, 2.9),
        ("vg_t1", 1e-7, 1.9, 4.3),
        ("vg_t1", 1e-4, 1.9, 6.9),
        ("cgmy_y0.5", 1e-7, 5.6, 12.5),
        ("cgmy_y0.5", 1e-4, 5.6, 21.1),
        ("cgmy_y1.5", 1e-7, 13.4, 32.9),
        ("cgmy_y1.5", 1e-4, 13.4, 62.4),
        ("cgmy_y1.98", 1e-7, 98.0, 254.6),
        ("cgmy_y1.98", 1e-4, 98.0, 484.3),
    ];
    let mut matched = 0;
    for (name, eps, l_c, l_m) in tracked {
        let row = find(name, eps);
        let ok = (row.l_c - l_c).abs() <= 0.05 && (row.l_m - l_m).abs() <= 0.05;
        matched += ok as usize;
        println!(
            "criterion 5: tracked {name} eps={eps:.0e} windows ({:.4}, {:.4}) vs ({l_c}, {l_m}): {}",
            row.l_c,
            row.l_m,
            if ok { "match" } else { "off" }
        );
    }

    let mut ratios = Vec::new();
    for row in &rows {
        if let (Some(n_c), Some(n_m)) = (row.min_terms_c, row.min_terms_m) {
            let ratio = n_m as f64 / n_c as f64;
            assert!(
                (1.0..=5.0).contains(&ratio),
                "criterion 5: fail - {} term ratio {ratio:.2} leaves [1, 5]",
                row.name
            );
            ratios.push(ratio);
        }
    }
    let worst = ratios.iter().cloned().fold(f64::MIN, f64::max);
    pass(
        5,
        &format!(
            "5 gated rows within +-0.05, {matched}/14 tracked rows match, \
             {} converging rows keep term ratios in [1, 5] (max {worst:.2})",
            ratios.len()
        ),
    );
}

#[test]
fn criterion_6_certified_tolerance_grid() {
    let start = Instant::now();
    let ctx_year = MarketContext::new(100.0, 0.0, 1.0).unwrap();
    let ctx_vg = MarketContext::new(100.0, 0.1, 1.0).unwrap();
    let (jump, ctx_jump, _) = market("m1");

    let vg = ModelSpec::variance_gamma(0.12, -0.14, 0.2).unwrap();
    let vg_cfg = CarrMadanConfig { alpha: 0.1, u_max: 2000.0, n_points: 1 << 20 };
    let vg_put = |strike: f64| {
        let call = carr_madan_price(&vg, &ctx_vg, strike, &vg_cfg).unwrap();
        call - (ctx_vg.s0 - strike * (-ctx_vg.r * ctx_vg.t).exp())
    };

    let cells: [(&str, ModelSpec, MarketContext, Box<dyn Fn(f64) -> f64>); 4] = [
        (
            "lognormal",
            ModelSpec::black_scholes(0.2).unwrap(),
            ctx_year,
            Box::new(move |k| bs_price(100.0, k, 0.0, 0.2, 1.0, OptionKind::Put)),
        ),
        (
            "laplace",
            ModelSpec::laplace(0.2).unwrap(),
            ctx_year,
            Box::new(move |k| laplace_price(100.0, k, 0.0, 0.2, 1.0, OptionKind::Put).unwrap()),
        ),
        ("variance gamma", vg, ctx_vg, Box::new(vg_put)),
        (
            "jump diffusion",
            jump,
            ctx_jump,
            Box::new(move |k| jump_series(&jump, &ctx_jump, k, OptionKind::Put)),
        ),
    ];

    let mut worst: (f64, String) = (0.0, String::new());
    for (label, model, ctx, oracle) in &cells {
        for strike in [75.0, 100.0, 125.0] {
            for epsilon in [1e-3, 1e-5, 1e-7] {
                let range = markov_window(model, ctx, epsilon, strike, 8).unwrap();
                let got = adaptive_n(model, ctx, strike, OptionKind::Put, range, epsilon).unwrap();
                let err = (got.price - oracle(strike)).abs();
                assert!(
                    err <= epsilon,
                    "criterion 6: fail - {label} K={strike} eps={epsilon:.0e} error {err:.2e}"
                );
                if err / epsilon > worst.0 {
                    worst = (err / epsilon, format!("{label} K={strike} eps={epsilon:.0e}"));
                }
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "criterion 6: fail - grid took {elapsed:.1}s");
    pass(
        6,
        &format!(
            "36/36 cells within tolerance; tightest cell {} at {:.0}% of budget ({elapsed:.1}s)",
            worst.1,
            100.0 * worst.0
        ),
    );
}

#[test]
fn criterion_7_tail_energy_diagnostics() {
    let sigma: f64 = 0.2;
    let normal = move |x: f64| (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt());
    let scale = sigma / core::f64::consts::SQRT_2;
    let laplace = move |x: f64| (-x.abs() / scale).exp() / (2.0 * scale);

    for (label, density) in
        [("normal", &normal as &dyn Fn(f64) -> f64), ("laplace", &laplace as &dyn Fn(f64) -> f64)]
    {
        let mut previous = f64::INFINITY;
        for l in [1.0f64, 2.0, 4.0] {
            // The coefficient-decay corner scales with the window, so the
            // mode count follows it to keep the residue gate satisfied.
            let energy = tail_energy(density, l, 1024 * l as u32, 8.0).unwrap();
            // Spectral tail bound: energy <= (2 pi^2 / 3 L^2) * integral of
            // |x f(x)|^2 over the complement of the window.
            let weighted =
                2.0 * composite_simpson(|x| (x * density(x)).powi(2), l, l + 8.0, 20_000);
            let bound = 2.0 * PI * PI / (3.0 * l * l) * weighted;
            assert!(
                energy <= 1.05 * bound + 1e-300,
                "criterion 7: fail - {label} tail energy {energy:.3e} at L={l} breaks bound {bound:.3e}"
            );
            assert!(
                energy < previous,
                "criterion 7: fail - {label} tail energy is not decreasing at L={l}"
            );
            previous = energy;
        }
    }

    // Polynomial tail with closed-form bound: density 2/x^3 on x >= 1.
    let pareto = |x: f64| if x >= 1.0 { 2.0 / (x * x * x) } else { 0.0 };
    let l = 10.0f64;
    let energy = tail_energy(&pareto, l, 1024, 200.0).unwrap();
    let bound = l.powi(-5) + 16.0 / (PI * PI * l.powi(5)) * (PI * PI / 6.0);
    assert!(
        energy <= bound,
        "criterion 7: fail - polynomial-tail energy {energy:.3e} breaks closed bound {bound:.3e}"
    );

    pass(
        7,
        &format!(
            "both light-tailed laws decrease and respect the spectral bound at L in {{1,2,4}}; \
             polynomial tail {energy:.3e} <= {bound:.3e}"
        ),
    );
}

#[test]
fn criterion_8_structural_identities() {
    // Parity is one pre-rounded shift, so call == put + shift bitwise.
    for name in ["m1", "m4", "vg_t1", "heston_t1"] {
        let (model, ctx, _) = market(name);
        for strike in [80.0, 125.0] {
            let range = markov_window(&model, &ctx, 1e-6, strike, 8).unwrap();
            let put = price(&model, &ctx, strike, OptionKind::Put, range, 512).price;
            let call = price(&model, &ctx, strike, OptionKind::Call, range, 512).price;
            let shift = ctx.s0 - strike * (-ctx.r * ctx.t).exp();
            assert_eq!(call, put + shift, "criterion 8: fail - parity broken for {name} K={strike}");
        }
    }

    // Characteristic functions are exactly one at the origin, which pins
    // the zeroth density coefficient to 1/L.
    let mut worst_phi = 0.0f64;
    for name in catalog::NAMES {
        let (model, ctx, strike) = market(name);
        let phi0 = model.centered_char_fn(&ctx, 0.0);
        worst_phi = worst_phi.max((phi0.re - 1.0).abs() + phi0.im.abs());
        assert!(
            (phi0.re - 1.0).abs() <= 1e-14 && phi0.im.abs() <= 1e-14,
            "criterion 8: fail - {name} characteristic function at zero is {phi0}"
        );
        let range = markov_window(&model, &ctx, 1e-6, strike, 8).unwrap();
        let expansion = cos_coefficients(|u| model.centered_char_fn(&ctx, u), range.l, 64);
        assert!(
            (expansion.c[0] * range.l - 1.0).abs() <= 1e-14,
            "criterion 8: fail - {name} zeroth coefficient is {} per unit window",
            expansion.c[0] * range.l
        );
    }

    // Reconstructed densities carry unit mass on a certified window.
    for name in ["m1", "vg_t1", "heston_t10"] {
        let (model, ctx, strike) = market(name);
        let range = markov_window(&model, &ctx, 1e-6, strike, 8).unwrap();
        let expansion = cos_coefficients(|u| model.centered_char_fn(&ctx, u), range.l, 512);
        let mass = composite_simpson(
            |x| expansion.density_at(x).unwrap(),
            -range.l,
            range.l,
            32_768,
        );
        assert!(
            (mass - 1.0).abs() <= 1e-6,
            "criterion 8: fail - {name} density mass {mass} is not 1 +- 1e-6"
        );
    }

    // Closed-form payoff coefficients agree with direct quadrature.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut uniform = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let mut worst_coeff = 0.0f64;
    for _ in 0..100 {
        let strike = 20.0 + 180.0 * uniform();
        let mean_log = strike.ln() + 3.0 * (uniform() - 0.5);
        let m = 0.3 + 3.7 * uniform();
        let l = m + 2.0 * uniform();
        let k = (uniform() * 17.0) as usize % 17;
        let coeffs = put_coefficients(strike, mean_log, m, l, 16);
        let freq = k as f64 * PI / (2.0 * l);
        let target = if coeffs.d <= -m {
            0.0
        } else {
            adaptive_simpson(
                |x| (strike - (x + mean_log).exp()) * ((x + l) * freq).cos(),
                -m,
                coeffs.d,
                1e-12,
                32,
            )
        };
        let diff = (coeffs.v[k] - target).abs();
        worst_coeff = worst_coeff.max(diff);
        assert!(
            diff <= 1e-9,
            "criterion 8: fail - payoff coefficient k={k} (K={strike:.2}, m={m:.2}, l={l:.2}) \
             off quadrature by {diff:.2e}"
        );
    }

    // Gaussian even moments from cumulants: 3 sigma^4, 15 sigma^6, 105 sigma^8.
    let s2 = 0.09f64;
    for (order, expected) in [(2, s2), (4, 3.0 * s2 * s2), (6, 15.0 * s2.powi(3)), (8, 105.0 * s2.powi(4))] {
        let mut kappas = vec![0.0; order];
        kappas[1] = s2;
        let moment = moments_from_cumulants(&kappas).unwrap();
        assert_relative_eq!(moment, expected, max_relative = 1e-12);
    }

    pass(
        8,
        &format!(
            "parity bitwise on 8 cases; char fns at zero within {worst_phi:.1e}; \
             unit mass on 3 certified windows; 100 payoff coefficients within \
             {worst_coeff:.1e} of quadrature; Gaussian moments to order 8"
        ),
    );
}
