//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. All checks are exact.

mod support;

use std::process::ExitCode;

use num_traits::Zero;
use parastat::algebra::{AlgebraSpec, FockState, ModeIndex, Monomial};
use parastat::expansion::{verify_transition_all, verify_triple_relation};
use parastat::gram::{
    gram_generic, gram_matrix, gram_matrix_unchecked, left_invariance_check,
    multiset_orthogonality_check, regular_decompose, MonomialBasis,
};
use parastat::linalg::{psd_check, rank, PsdVerdict};
use parastat::presets::{FVariant, PresetId};
use parastat::rational::{int, rat, Rational};
use parastat::statistics::{
    d_lambda, d_lambda_assigned, dimension_table, fock_dimension, haldane_g, partitions,
    sector_blocks,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use support::{Flavor, GreenOracle};

type Check = std::result::Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: parastat::error::Error) -> String {
    e.to_string()
}

fn idx(v: &[usize]) -> Vec<ModeIndex> {
    v.iter().map(|&k| ModeIndex::new(k).unwrap()).collect()
}

fn dims(spec: &AlgebraSpec, max_n: usize) -> Result<Vec<u64>, String> {
    (0..=max_n)
        .map(|n| fock_dimension(spec, n).map_err(err))
        .collect()
}

fn palev_fermi_counting() -> Check {
    let spec = PresetId::PalevFermi { p: 2 }.build(4).map_err(err)?;
    let d = dims(&spec, 4)?;
    ensure(d == [1, 4, 6, 0, 0], || format!("D(4, 0..4) = {d:?}"))?;
    for lambda in partitions(3, 4) {
        let dl = d_lambda(&spec, &lambda).map_err(err)?;
        ensure(dl == 0, || format!("d{lambda} = {dl}"))?;
    }
    Ok(())
}

fn palev_bose_counting() -> Check {
    let spec = PresetId::PalevBose { p: 2 }.build(3).map_err(err)?;
    let d = dims(&spec, 3)?;
    ensure(d == [1, 3, 6, 0], || format!("D(3, 0..3) = {d:?}"))
}

fn klein_marshalek() -> Check {
    for m in 1..=5 {
        let km = PresetId::KleinMarshalek.build(m).map_err(err)?;
        let reference = dimension_table(&km, 4).map_err(err)?;
        for id in [PresetId::PalevFermi { p: 1 }, PresetId::PalevBose { p: 1 }] {
            let spec = id.build(m).map_err(err)?;
            let table = dimension_table(&spec, 4).map_err(err)?;
            let d: Vec<u64> = (0..=4).map(|n| table.dimension(n).unwrap()).collect();
            ensure(d == [1, m as u64, 0, 0, 0], || {
                format!("{id}, M={m}: {d:?}")
            })?;
            ensure(table == reference, || {
                format!("{id}, M={m}: table differs from klein-marshalek")
            })?;
        }
    }
    Ok(())
}

fn haldane() -> Check {
    let fermi = PresetId::PalevFermi { p: 3 }.build(5).map_err(err)?;
    let (m, p) = (5i64, 3i64);
    for (n, k) in [(1, 1), (1, 2), (2, 1)] {
        let g = haldane_g(&fermi, n, k).map_err(err)?.g;
        ensure(g == int(1), || format!("palev-fermi g({n},{k}) = {g}"))?;
    }
    for (n, k) in [(1, 3), (2, 2), (3, 1)] {
        let g = haldane_g(&fermi, n, k).map_err(err)?.g;
        let want = rat(m - n as i64 + 1, p - n as i64 + 1);
        ensure(g == want, || {
            format!("palev-fermi g({n},{k}) = {g}, expected {want}")
        })?;
    }
    let bose = PresetId::PalevBose { p: 2 }.build(4).map_err(err)?;
    let g = haldane_g(&bose, 1, 1).map_err(err)?.g;
    ensure(g.is_zero(), || format!("palev-bose g(1,1) = {g}"))?;
    for (n, k) in [(1, 2), (2, 1)] {
        let g = haldane_g(&bose, n, k).map_err(err)?.g;
        let want = rat(4, 2 - n as i64 + 1);
        ensure(g == want, || {
            format!("palev-bose g({n},{k}) = {g}, expected {want}")
        })?;
    }
    Ok(())
}

fn okubo_negative_norm() -> Check {
    let spec = PresetId::Okubo { p: 2 }.build(2).map_err(err)?;
    let target = Monomial::from_modes(&[1, 1]).unwrap();
    let blocks = sector_blocks(&spec, 2).map_err(err)?;
    let block = blocks
        .iter()
        .find(|b| b.basis.contains(&target))
        .ok_or("no block contains (a+_1)^2 |0>")?;
    match psd_check(&block.gram(&spec).map_err(err)?).map_err(err)? {
        PsdVerdict::Indefinite { value, .. } => {
            ensure(value == int(-1), || format!("witness value {value}"))?
        }
        PsdVerdict::Psd => return Err("block reported PSD".into()),
    }
    let orth = multiset_orthogonality_check(&spec, 2).map_err(err)?;
    ensure(!orth, || "multiset orthogonality unexpectedly holds".into())
}

fn quon_positivity() -> Check {
    for q in [rat(-3, 4), int(0), rat(1, 2)] {
        let id = PresetId::Quon { q: q.clone() };
        let spec = id.build(4).map_err(err)?;
        for n in 1..=4 {
            let indices: Vec<usize> = (1..=n).collect();
            let g = gram_generic(&spec, &idx(&indices)).map_err(err)?;
            let v = psd_check(&g).map_err(err)?;
            ensure(v.is_psd(), || format!("{id}, N={n}: {v:?}"))?;
        }
    }
    let spec = PresetId::Quon { q: int(2) }.build(2).map_err(err)?;
    let g = gram_generic(&spec, &idx(&[1, 2])).map_err(err)?;
    match psd_check(&g).map_err(err)? {
        PsdVerdict::Indefinite { value, .. } => {
            ensure(value == int(-2), || format!("q=2 witness value {value}"))
        }
        PsdVerdict::Psd => Err("q=2 reported PSD".into()),
    }
}

fn palev_variants_equivalent() -> Check {
    let ids = [
        PresetId::PalevFermi { p: 2 },
        PresetId::PalevFermiF {
            p: 2,
            variant: FVariant::Affine,
        },
        PresetId::PalevFermiF {
            p: 2,
            variant: FVariant::Step,
        },
    ];
    let specs: Vec<AlgebraSpec> = ids
        .iter()
        .map(|id| id.build(4))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    for n in 1..=4 {
        for lambda in partitions(n, 4) {
            let d: Vec<usize> = specs
                .iter()
                .map(|s| d_lambda(s, &lambda))
                .collect::<Result<_, _>>()
                .map_err(err)?;
            ensure(d.iter().all(|x| *x == d[0]), || {
                format!("d{lambda} differs: {d:?}")
            })?;
        }
    }
    let mut differs = false;
    for n in 1..=4 {
        let blocks = sector_blocks(&specs[0], n).map_err(err)?;
        for block in blocks {
            let g: Vec<_> = specs
                .iter()
                .map(|s| block.gram(s))
                .collect::<Result<_, _>>()
                .map_err(err)?;
            differs |= g[0] != g[1] || g[0] != g[2] || g[1] != g[2];
        }
    }
    ensure(differs, || "all generic matrices coincide".into())
}

fn transition_expansions() -> Check {
    let cases = [
        PresetId::GreenParabose { p: 2 },
        PresetId::Govorkov { p: 2, sign: 1 },
        PresetId::Govorkov { p: 2, sign: -1 },
        PresetId::Quon { q: rat(1, 2) },
        PresetId::PalevFermi { p: 3 },
        PresetId::PalevFermi { p: 2 },
        PresetId::PalevSuper { mb: 1, mf: 1, p: 2 },
    ];
    for id in cases {
        let modes = id.fixed_modes().unwrap_or(3);
        let spec = id.build(modes).map_err(err)?;
        let verdict = verify_transition_all(&id, &spec, 2).map_err(err)?;
        ensure(verdict.holds(), || {
            format!("{id}: failing pairs {:?}", verdict.failures)
        })?;
    }
    Ok(())
}

fn random_rational(rng: &mut StdRng) -> Rational {
    rat(rng.gen_range(-6..=6), rng.gen_range(1..=5))
}

fn triple_relations() -> Check {
    for id in [
        PresetId::PalevFermi { p: 2 },
        PresetId::PalevBose { p: 2 },
        PresetId::Okubo { p: 2 },
    ] {
        let spec = id.build(3).map_err(err)?;
        let [x, y, z, q] = id.triple_coefficients().ok_or("no triple coefficients")?;
        let ok = verify_triple_relation(&spec, &x, &y, &z, &q, 2).map_err(err)?;
        ensure(ok, || format!("{id}: relation fails"))?;
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..2 {
        let [x, y, z, q] = std::array::from_fn(|_| random_rational(&mut rng));
        let spec = AlgebraSpec::affine_family(3, x.clone(), y.clone(), z.clone(), q.clone())
            .map_err(err)?;
        let ok = verify_triple_relation(&spec, &x, &y, &z, &q, 2).map_err(err)?;
        ensure(ok, || {
            format!("affine family x={x} y={y} z={z} q={q}: relation fails")
        })?;
    }
    Ok(())
}

fn green_ansatz() -> Check {
    for (id, flavor) in [
        (PresetId::GreenParabose { p: 2 }, Flavor::ParaBose),
        (PresetId::GreenParafermi { p: 2 }, Flavor::ParaFermi),
    ] {
        let spec = id.build(2).map_err(err)?;
        let oracle = GreenOracle::new(flavor, 2, 2);
        for n in 0..=3 {
            let words = spec.all_words(n);
            let engine = gram_matrix_unchecked(&spec, &words).map_err(err)?;
            let brute = oracle.gram(&words);
            ensure(engine == brute, || format!("{id}, N={n}: entries differ"))?;
            ensure(rank(&engine) == rank(&brute), || {
                format!("{id}, N={n}: ranks differ")
            })?;
        }
    }
    Ok(())
}

fn catalog() -> Vec<PresetId> {
    vec![
        PresetId::GreenParabose { p: 2 },
        PresetId::GreenParafermi { p: 2 },
        PresetId::Govorkov { p: 2, sign: 1 },
        PresetId::Govorkov { p: 2, sign: -1 },
        PresetId::Quon { q: rat(1, 2) },
        PresetId::PalevFermi { p: 2 },
        PresetId::PalevBose { p: 2 },
        PresetId::PalevFermiF {
            p: 2,
            variant: FVariant::Affine,
        },
        PresetId::PalevFermiF {
            p: 2,
            variant: FVariant::Step,
        },
        PresetId::PalevBoseF {
            p: 2,
            variant: FVariant::Affine,
        },
        PresetId::PalevBoseF {
            p: 2,
            variant: FVariant::Step,
        },
        PresetId::KleinMarshalek,
        PresetId::PalevSuper { mb: 1, mf: 1, p: 2 },
        PresetId::Okubo { p: 2 },
    ]
}

fn structural_diagnostics() -> Check {
    for id in catalog() {
        let spec = id.build(id.fixed_modes().unwrap_or(3)).map_err(err)?;
        for n in 0..=3 {
            for block in sector_blocks(&spec, n).map_err(err)? {
                let basis = MonomialBasis::new(block.basis.clone()).map_err(err)?;
                gram_matrix(&spec, &basis).map_err(|e| format!("{id}, {}: {e}", block.label()))?;
            }
            let z_zero = spec.z().is_zero();
            if z_zero {
                let orth = multiset_orthogonality_check(&spec, n).map_err(err)?;
                ensure(orth, || {
                    format!("{id}, N={n}: multiset orthogonality fails")
                })?;
            }
        }
        if spec.is_graded() || !spec.is_index_uniform() {
            continue;
        }
        let spec = id.build(4).map_err(err)?;
        for n in 1..=4 {
            let indices: Vec<usize> = (1..=n).collect();
            let g = gram_generic(&spec, &idx(&indices)).map_err(err)?;
            ensure(left_invariance_check(&g, n).map_err(err)?, || {
                format!("{id}, N={n}: not left invariant")
            })?;
            let dec = regular_decompose(&g, n).map_err(err)?;
            ensure(!dec.residual, || {
                format!("{id}, N={n}: decomposition leaves a residual")
            })?;
            for lambda in partitions(n, 4) {
                let k = lambda.len();
                let first: Vec<usize> = (1..=k).collect();
                let second: Vec<usize> = (1..=k).rev().map(|j| j + 4 - k).collect();
                let a = d_lambda_assigned(&spec, &lambda, &idx(&first)).map_err(err)?;
                let b = d_lambda_assigned(&spec, &lambda, &idx(&second)).map_err(err)?;
                ensure(a == b, || {
                    format!("{id}, d{lambda}: {a} vs {b} under reassignment")
                })?;
            }
        }
    }
    Ok(())
}

fn supersymmetric_charge() -> Check {
    let spec = PresetId::PalevSuper { mb: 1, mf: 1, p: 2 }
        .build(2)
        .map_err(err)?;
    let (i, alpha) = (spec.mode(1).map_err(err)?, spec.mode(2).map_err(err)?);
    ensure(spec.grade(i) == 0 && spec.grade(alpha) == 1, || {
        "unexpected grading".into()
    })?;
    for n in 0..=3 {
        for w in spec.all_words(n) {
            let once = spec
                .transition_apply(i, alpha, &FockState::from(w.clone()))
                .map_err(err)?;
            let twice = spec.transition_apply(i, alpha, &once).map_err(err)?;
            ensure(spec.is_null(&twice).map_err(err)?, || {
                format!("(N_12)^2 on {w} is not null")
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("Palev Fermi counting, M=4 p=2", palev_fermi_counting),
        ("Palev Bose counting, M=3 p=2", palev_bose_counting),
        (
            "p=1 Palev presets reduce to Klein-Marshalek, M<=5",
            klein_marshalek,
        ),
        (
            "Haldane parameters, palev-fermi p=3 M=5 and palev-bose p=2 M=4",
            haldane,
        ),
        (
            "Okubo p=2 negative norm and broken multiset orthogonality",
            okubo_negative_norm,
        ),
        (
            "Quon positivity for |q|<1 and indefinite q=2",
            quon_positivity,
        ),
        (
            "Palev Fermi variants share d_lambda with different Gram entries",
            palev_variants_equivalent,
        ),
        (
            "Transition-operator expansions, n_max=2",
            transition_expansions,
        ),
        ("Triple relations, n_max=2 M=3", triple_relations),
        (
            "Green ansatz brute-force oracle, p=2 M=2 N<=3",
            green_ansatz,
        ),
        ("Structural diagnostics", structural_diagnostics),
        (
            "Supersymmetric charge squares to zero",
            supersymmetric_charge,
        ),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS {:>2}. {name}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
