use std::process::ExitCode;
use std::time::Instant;

use charp_bundles::bundles::nondegeneracy_search;
use charp_bundles::chow::{
    chern_e0_recursive, chern_e0_symbolic, euler_char_hrr, twist_chern, ChowClass, Divisor,
};
use charp_bundles::cohomology::{kunneth_h, monad_chi, monad_cohomology, Bidegree};
use charp_bundles::field::Field;
use charp_bundles::model::*;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240611;
const LINES_PER_CLASS: usize = 20;
const CHI_TWISTS: usize = 20;
const CHI_TWIST_BOUND: i64 = 6;
const SYMMETRY_BOX: (i64, i64) = (-1, 5);
const SYMMETRY_FORMS: usize = 3;
const COMPAT_BOX: (i64, i64) = (-1, 3);
const VANISHING_TWISTS: usize = 10;
const GG_TWISTS: usize = 10;
const GG_POINTS: usize = 25;
const CHARP_MAX_DEGREE: i64 = 4;
const SEARCH_BOUND: i64 = 10;
const TIME_LIMIT_SECS: f64 = 60.0;

type Outcome = Result<(bool, String), String>;

fn field(p: u32) -> Field {
    default_field(p).expect("default field")
}

fn square(lo: i64, hi: i64) -> Vec<Bidegree> {
    (lo..=hi).flat_map(|s| (lo..=hi).map(move |t| (s, t))).collect()
}

/// The first `count` pairs `(s, t)` with `s, t >= lo`, ordered by `s + t`, then `s`.
fn corner_twists(lo: i64, count: usize) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut sum = 2 * lo;
    while out.len() < count {
        for s in lo..=sum - lo {
            if out.len() < count {
                out.push((s, sum - s));
            }
        }
        sum += 1;
    }
    out
}

fn c1_chern_golden() -> Outcome {
    let mut bad = Vec::new();
    for p in [2i64, 3, 5] {
        let e = chern_e0_symbolic(2, p as u64, 1).map_err(|e| e.to_string())?;
        let c = twist_chern(2, &e.total_chern, Divisor::new(1, 0));
        let expect = ChowClass::from_i64(2, &[&[1, p - 1, p * (p - 1)], &[1, p - 1], &[p]]);
        if c != expect {
            bad.push(format!("c(E0[2,{p},1])"));
        }
    }
    for (n, q) in [(2usize, 2i64), (2, 4), (3, 2), (3, 3)] {
        let e = chern_e0_symbolic(n, q as u64, 1).map_err(|e| e.to_string())?;
        if e.total_chern.c1() != (BigInt::from(-1), BigInt::from(q - 1)) {
            bad.push(format!("c1 at (n,q)=({n},{q})"));
        }
    }
    Ok((bad.is_empty(), format!("3 totals, 4 first classes; mismatches {bad:?}")))
}

fn c2_recursion() -> Outcome {
    let mut bad = Vec::new();
    for n in [2usize, 3] {
        for p in [2u64, 3] {
            for a in 0u32..=1 {
                let rec = chern_e0_recursive(n, p, a).map_err(|e| e.to_string())?;
                let direct = chern_e0_symbolic(n, p.pow(a), 1).map_err(|e| e.to_string())?;
                if rec != direct.total_chern {
                    bad.push((n, p, a));
                }
            }
        }
    }
    Ok((bad.is_empty(), format!("n in 2..3, p in {{2,3}}, a in {{0,1}}; mismatches {bad:?}")))
}

fn c3_chi_cross_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = Vec::new();
    for (n, q, k) in [(2usize, 2u64, 1u64), (2, 4, 2), (3, 2, 1)] {
        let c = chern_e0_symbolic(n, q, k).map_err(|e| e.to_string())?;
        for _ in 0..CHI_TWISTS {
            let tw = (
                rng.gen_range(-CHI_TWIST_BOUND..=CHI_TWIST_BOUND),
                rng.gen_range(-CHI_TWIST_BOUND..=CHI_TWIST_BOUND),
            );
            let hrr = euler_char_hrr(n, &twist_chern(n, &c.total_chern, Divisor::new(tw.0, tw.1)))
                .map_err(|e| e.to_string())?;
            if hrr != monad_chi(n, q as i64, k as i64, tw) {
                bad.push((n, q, k, tw));
            }
        }
    }
    Ok((bad.is_empty(), format!("{} twists per class; mismatches {bad:?}", CHI_TWISTS)))
}

fn c4_h0_vanishing() -> Outcome {
    let mut vals = Vec::new();
    for (n, q) in [(2usize, 2u64), (2, 3), (3, 2)] {
        let p = if q % 2 == 0 { 2 } else { 3 };
        let m = build_monad(&field(p), n, q, 1, &BilinearFormA::identity(n)).map_err(|e| e.to_string())?;
        vals.push(((n, q), h0_twist(&m.monad, (1, 0)).map_err(|e| e.to_string())?));
    }
    Ok((vals.iter().all(|(_, h)| *h == 0), format!("h0(E0) {vals:?}")))
}

fn c5_splitting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut bad = Vec::new();
    let mut checked = 0;
    let mut run = |label: &str,
                   m: &MonadData,
                   draw: &dyn Fn(&mut ChaCha8Rng) -> LineSample,
                   rng: &mut ChaCha8Rng,
                   expect: &SplittingType|
     -> Result<(), String> {
        for _ in 0..LINES_PER_CLASS {
            let l = draw(rng);
            let (x, y) = l.params();
            let st = splitting_type(&m.monad, &x, &y).map_err(|e| e.to_string())?;
            checked += 1;
            if &st != expect {
                bad.push(format!("{label} (n,q)=({},{}): {st}", m.n, m.q));
            }
        }
        Ok(())
    };
    for (n, q) in [(2usize, 2u64), (2, 4), (3, 2)] {
        let fld = field(2);
        let form = BilinearFormA::random(n, &fld, &mut rng);
        let m = build_monad(&fld, n, q, 1, &form).map_err(|e| e.to_string())?;
        let qi = q as i64;
        let zeros = |k: usize| vec![0i64; k];
        let generic_l = SplittingType::new([zeros(n - 1), vec![-1]].concat());
        let jumping_l = SplittingType::new([vec![qi - 1], zeros(n - 2), vec![-qi]].concat());
        let generic_h = SplittingType::new([vec![qi - 1], zeros(n - 1)].concat());
        run("L-line off A", &m, &|r| random_l_line_off_a(&form, &fld, r), &mut rng, &generic_l)?;
        run("L-line in A", &m, &|r| random_l_line_in_a(&form, &fld, r), &mut rng, &jumping_l)?;
        run("h-line", &m, &|r| random_h_line(&form, &fld, r), &mut rng, &generic_h)?;
        if (n, q) == (2, 2) {
            let jumping_h = SplittingType::new(vec![qi, 1 - qi]);
            run("jumping h-line", &m, &|r| random_jumping_h_line(&form, &fld, r), &mut rng, &jumping_h)?;
        }
    }
    Ok((bad.is_empty(), format!("{checked} lines; mismatches {bad:?}")))
}

fn c6_symmetry() -> Outcome {
    let fld = field(2);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let twists = square(SYMMETRY_BOX.0, SYMMETRY_BOX.1);
    let mut bad = Vec::new();
    let mut nonzero = 0;
    for _ in 0..SYMMETRY_FORMS {
        let form = BilinearFormA::random(2, &fld, &mut rng);
        let m = build_monad(&fld, 2, 2, 1, &form).map_err(|e| e.to_string())?;
        let fl = flip_monad(&m);
        let side = build_monad_l_side(&fld, 2, 2, 1, &form.transpose()).map_err(|e| e.to_string())?;
        if side.monad != fl.monad {
            bad.push("L-side construction differs from the flip".to_string());
        }
        for &(s, t) in &twists {
            let a = h0_twist(&fl.monad, (s, t)).map_err(|e| e.to_string())?;
            let b = h0_twist(&m.monad, (t, s)).map_err(|e| e.to_string())?;
            nonzero += usize::from(a > 0);
            if a != b {
                bad.push(format!("({s},{t}): {a} vs {b}"));
            }
        }
    }
    Ok((
        bad.is_empty(),
        format!(
            "{} forms x {} twists, {nonzero} nonzero entries; mismatches {bad:?}",
            SYMMETRY_FORMS,
            twists.len()
        ),
    ))
}

fn c7_compatibility() -> Outcome {
    let fld = field(2);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let random_form = loop {
        let f = BilinearFormA::random(3, &fld, &mut rng);
        if f.leading_block().det(&fld) != 0 {
            break f;
        }
    };
    let twists = square(COMPAT_BOX.0, COMPAT_BOX.1);
    let mut bad = Vec::new();
    for form in [BilinearFormA::identity(3), random_form] {
        let m = build_monad(&fld, 3, 2, 1, &form).map_err(|e| e.to_string())?;
        let r = restrict_hyperplane_pair(&m).map_err(|e| e.to_string())?;
        let low = compatible_lower(&m).map_err(|e| e.to_string())?;
        for &tw in &twists {
            let lhs = h0_twist(&r.monad, tw).map_err(|e| e.to_string())?;
            let rhs = h0_twist(&low.monad, tw).map_err(|e| e.to_string())? + kunneth_h(2, tw).get(0);
            if lhs != rhs {
                bad.push(format!("{tw:?}: {lhs} vs {rhs}"));
            }
        }
    }
    Ok((bad.is_empty(), format!("2 forms x {} twists; mismatches {bad:?}", twists.len())))
}

/// `Ě0 = E0(-L)`, so `Ě0(sh + tL)` is the monad twisted by `(t, s)`. Besides
/// the probe, generation is tested against its necessary condition on lines:
/// no negative summand on a random `L`-line inside `A`.
fn c8_vanishing_and_gg() -> Outcome {
    let (n, q) = (2usize, 2i64);
    let fld = field(2);
    let form = BilinearFormA::identity(n);
    let m = build_monad(&fld, n, q as u64, 1, &form).map_err(|e| e.to_string())?;
    let vanishes = |s: i64, t: i64| -> Result<Option<String>, String> {
        let c = monad_cohomology(&m.monad, (t, s)).map_err(|e| e.to_string())?;
        Ok(if c.is_exact() && c.higher_vanish() {
            None
        } else {
            let h: Vec<String> = c.h.iter().map(|x| x.to_string()).collect();
            Some(format!("(s,t)=({s},{t}) h={h:?}"))
        })
    };
    let mut bad_vanish = Vec::new();
    for (s, t) in corner_twists(q - n as i64, VANISHING_TWISTS) {
        bad_vanish.extend(vanishes(s, t)?);
    }
    let mut shifted_bad = 0;
    for (s, t) in corner_twists(q - n as i64 + 1, VANISHING_TWISTS) {
        shifted_bad += usize::from(vanishes(s, t)?.is_some());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let line = random_l_line_in_a(&form, &fld, &mut rng);
    let (lx, ly) = line.params();
    let on_line = splitting_type(&m.monad, &lx, &ly).map_err(|e| e.to_string())?;
    let mut bad_gg = Vec::new();
    for (i, (s, t)) in corner_twists(q, GG_TWISTS).into_iter().enumerate() {
        let tw = (t - 1, s);
        let c = monad_cohomology(&m.monad, tw).map_err(|e| e.to_string())?;
        let h0 = h0_twist(&m.monad, tw).map_err(|e| e.to_string())?;
        let probe = global_gen_probe(&m.monad, tw, &ProbeTarget::Ambient, GG_POINTS, SEED + i as u64)
            .map_err(|e| e.to_string())?;
        let lowest = on_line.degrees.iter().min().copied().unwrap_or(0) + tw.0;
        if h0 as i64 != c.chi || !probe.passed || lowest < 0 {
            bad_gg.push(format!(
                "(s,t)=({s},{t}) h0={h0} chi={} probe={} lowest summand on an L-line in A={lowest}",
                c.chi, probe.passed
            ));
        }
    }
    Ok((
        bad_vanish.is_empty() && bad_gg.is_empty(),
        format!(
            "vanishing failures {bad_vanish:?} (with s,t >= q-n+1: {shifted_bad} failures); \
             generation failures {bad_gg:?}"
        ),
    ))
}

fn c9_charp() -> Outcome {
    let r = charp_multilinear_suite(2, &field(2), CHARP_MAX_DEGREE, SEED).map_err(|e| e.to_string())?;
    let failed: Vec<String> = r
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}@{:?}", c.name, c.degree))
        .collect();
    Ok((
        r.passed(),
        format!("{} checks, D2Q dims {:?}; failures {failed:?}", r.checks.len(), r.dims["D2Q"]),
    ))
}

fn c10_nondegeneracy() -> Outcome {
    let e = chern_e0_symbolic(2, 2, 1).map_err(|e| e.to_string())?;
    let c = twist_chern(2, &e.total_chern, Divisor::new(1, 0));
    let sols = nondegeneracy_search(2, &c, SEARCH_BOUND).map_err(|e| e.to_string())?;
    Ok((sols.is_empty(), format!("box {SEARCH_BOUND}, {} solutions", sols.len())))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "chern golden values", c1_chern_golden),
        (2, "recursion consistency", c2_recursion),
        (3, "chi cross-oracle", c3_chi_cross_oracle),
        (4, "h0 vanishing", c4_h0_vanishing),
        (5, "splitting types", c5_splitting),
        (6, "A-symmetry shadow", c6_symmetry),
        (7, "hyperplane compatibility", c7_compatibility),
        (8, "vanishing and generation tables", c8_vanishing_and_gg),
        (9, "char-2 multilinear suite", c9_charp),
        (10, "nondegeneracy search", c10_nondegeneracy),
    ];
    let mut failures = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match outcome {
            Ok((ok, d)) => (ok && secs < TIME_LIMIT_SECS, d),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!ok);
        println!(
            "criterion {id:>2} {}: {name} ({secs:.1}s) {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
