use super::*;
use liftbell::bell::{chsh, Scenario};
use liftbell::catalog::{li_chsh, lo_chsh};
use liftbell::npa::{canonicalize, moments_from_model, quantum_bound, Level, MomentStructure, Word};
use liftbell::sdp::SdpSettings;
use rand::Rng;

fn levels() -> [Level; 3] {
    ["1".parse().unwrap(), "1+AB".parse().unwrap(), "2".parse().unwrap()]
}

pub fn relaxations_bound_random_quantum_models() {
    let mut r = rng(31);
    let level: Level = "1".parse().unwrap();
    for t in 0..100 {
        let s = random_scenario(&mut r, 2, 2, 3);
        let dims = [r.random_range(2..=3), r.random_range(2..=3)];
        let model = random_model(&mut r, &s, &dims);
        let f = random_real_functional(&mut r, &s);
        let achieved = f.value(&model.correlation()).unwrap();
        let relax = quantum_bound(&f, &level, &SdpSettings::default()).unwrap();
        assert!(relax.bound >= achieved - 1e-7, "model {t}: bound {} below achieved {achieved}", relax.bound);
        assert!(relax.gap <= 1e-7, "model {t}: gap {}", relax.gap);
    }
}

pub fn model_moment_matrices_are_explicit_gram_matrices() {
    let mut r = rng(32);
    for t in 0..30 {
        let s = random_scenario(&mut r, 2, 2, 3);
        let model = random_model(&mut r, &s, &[2, 3]);
        for level in levels() {
            let structure = MomentStructure::for_level(&s, &level);
            let gamma = structure.matrix(&moments_from_model(&structure, &model));
            let words = structure.words();
            for (i, u) in words.iter().enumerate() {
                for (j, v) in words.iter().enumerate() {
                    let op = word_operator(&model, &u.adjoint()) * word_operator(&model, v);
                    let want = expectation(&model, &op).re;
                    assert!((gamma[(i, j)] - want).abs() < 1e-10, "model {t}, level {level}, ({u}, {v})");
                }
            }
            assert!(min_eigenvalue(&gamma) > -1e-10);
        }
    }
}

pub fn bounds_tighten_with_the_level() {
    let mut r = rng(33);
    let mut fs = vec![chsh(), li_chsh(), lo_chsh()];
    for _ in 0..7 {
        let s = random_scenario(&mut r, 2, 3, 2);
        fs.push(random_real_functional(&mut r, &s));
    }
    for (t, f) in fs.iter().enumerate() {
        let b: Vec<f64> = levels()
            .iter()
            .map(|l| quantum_bound(f, l, &SdpSettings::default()).unwrap().bound)
            .collect();
        assert!(b[1] <= b[0] + 1e-6 && b[2] <= b[1] + 1e-6, "functional {t}: {b:?}");
    }
}

fn check_words(s: &Scenario, seed: u64, count: usize) {
    let mut r = rng(seed);
    let dims = vec![2; s.parties()];
    let model = random_model(&mut r, s, &dims);
    for t in 0..count {
        let len = r.random_range(0..=6);
        let raw = random_symbols(&mut r, s, len);
        let direct = operator(&model, &raw);
        match canonicalize(&raw) {
            None => assert!(max_abs(&direct) < 1e-12, "word {t}: {raw:?} is not zero"),
            Some(w) => {
                assert_eq!(canonicalize(w.symbols()), Some(w.clone()), "word {t}");
                assert!(max_abs(&(&direct - word_operator(&model, &w))) < 1e-12, "word {t}: {raw:?} -> {w}");
                assert_eq!(w.adjoint().adjoint(), w);
                let adj = word_operator(&model, &w.adjoint());
                assert!(max_abs(&(adj - word_operator(&model, &w).adjoint())) < 1e-12);
                assert_eq!(w.moment_key(), w.adjoint().moment_key());

                let len = r.random_range(0..=4);
                let other = canonicalize(&random_symbols(&mut r, s, len));
                if let Some(v) = other {
                    let joined: Vec<_> = w.symbols().iter().chain(v.symbols()).copied().collect();
                    assert_eq!(w.mul(&v), canonicalize(&joined), "word {t}: {w} * {v}");
                }
            }
        }
    }
    assert_eq!(canonicalize(&[]), Some(Word::identity()));
}

pub fn canonicalization_on_random_words() {
    check_words(chsh().scenario(), 34, 5_000);
    check_words(&Scenario::new(vec![vec![3, 2], vec![2, 3, 2], vec![2]]).unwrap(), 35, 5_000);
}
