//! Acceptance checks. Runs as a plain binary and prints one line per
//! criterion; exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bhasha::features::{length_pair, LengthMode};
use bhasha::ks::{
    ks_exact_pvalue, ks_pvalue, ks_statistic, ks_test, Alternative, KsOutcome, PValueMethod,
};
use bhasha::morphology::{parse_segmentations, Segmenter, SegmenterModel, StripLimits};
use bhasha::pipeline::{
    analyze, profile_corpora, CompareOptions, CorpusSpec, ProfileOptions, ReportCell, RunConfig,
};
use bhasha::report::format_cell;
use bhasha::script::{parse_word, recompose, unit_inventory, UnitKind};
use bhasha::syllable::{syllabify, SyllableMode};
use bhasha::Exact;
use common::{toy_dir, TOY_CORPORA};
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SEED: u64 = 0x5eed_b4a5;

// pinned tolerances and limits
const GOLDEN_PARSE_LIMIT: Duration = Duration::from_secs(1);
const KS_ORACLE_LIMIT: Duration = Duration::from_secs(10);
const PIPELINE_LIMIT: Duration = Duration::from_secs(30);
const PVALUE_REL_TOL: f64 = 1e-9;
const ASYMPTOTIC_ABS_TOL: f64 = 0.15;
const NORMALIZATION_TOL: f64 = 1e-12;
const ALPHA: f64 = 0.05;
const ORACLE_PAIRS: usize = 500;
const PROPERTY_PAIRS: usize = 1000;

// closed forms evaluated with an arbitrary-precision library, rounded to f64
/// 2 Σ (-1)^(k-1) exp(-2 k² λ²) at λ = sqrt(2.5)
const Q_SQRT_2_5: f64 = 0.013_475_889_875_863_689;
/// exp(-5)
const EXP_MINUS_5: f64 = 0.006_737_946_999_085_467;
/// Q at λ = sqrt(2) / 4
const Q_SQRT_2_OVER_4: f64 = 0.999_633_292_157_727_8;
/// exp(-1/4)
const EXP_MINUS_QUARTER: f64 = 0.778_800_783_071_404_9;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_close(got: f64, want: f64) -> bool {
    ((got - want) / want).abs() <= PVALUE_REL_TOL
}

fn golden_parses() -> Check {
    let golden: [(&str, &[(UnitKind, char)]); 4] = {
        use UnitKind::{
            Consonant as C, IndependentVowel as V, SpecialConsonant as S, VowelDiacritic as D,
        };
        [
            (
                "খুশীতে",
                &[(C, 'খ'), (D, 'ু'), (C, 'শ'), (D, 'ী'), (C, 'ত'), (D, 'ে')],
            ),
            ("আলোক", &[(V, 'আ'), (C, 'ল'), (D, 'ো'), (C, 'ক'), (D, '·')]),
            ("বাংলা", &[(C, 'ব'), (D, 'া'), (S, 'ং'), (C, 'ল'), (D, 'া')]),
            (
                "সন্ত্রস্ত",
                &[
                    (C, 'স'),
                    (D, '·'),
                    (C, 'ন'),
                    (C, 'ত'),
                    (C, 'র'),
                    (D, '·'),
                    (C, 'স'),
                    (C, 'ত'),
                    (D, '·'),
                ],
            ),
        ]
    };
    for (word, expected) in golden {
        let parsed = parse_word(word).map_err(|e| format!("{word}: {e}"))?;
        let got: Vec<(UnitKind, char)> = parsed
            .units()
            .iter()
            .map(|u| (u.kind(), u.key_char()))
            .collect();
        ensure(got == expected, || format!("{word}: got {got:?}"))?;
        let back = recompose(&parsed).map_err(|e| format!("{word}: {e}"))?;
        ensure(back == word, || format!("{word}: recomposed to {back}"))?;
    }
    Ok("4 words parse and round-trip".into())
}

fn inventory() -> Check {
    let units = unit_inventory();
    let distinct: BTreeSet<_> = units.iter().copied().collect();
    let by_kind = |k: UnitKind| units.iter().filter(|u| u.kind() == k).count();
    let counts = [
        by_kind(UnitKind::IndependentVowel),
        by_kind(UnitKind::Consonant),
        by_kind(UnitKind::SpecialConsonant),
        by_kind(UnitKind::VowelDiacritic),
    ];
    ensure(units.len() == 61 && distinct.len() == 61, || {
        format!("{} units, {} distinct", units.len(), distinct.len())
    })?;
    ensure(counts == [11, 35, 4, 11], || format!("per kind {counts:?}"))?;
    Ok("61 distinct units (11 + 35 + 4 + 11)".into())
}

fn golden_syllables() -> Check {
    use UnitKind::{
        Consonant as C, IndependentVowel as V, SpecialConsonant as S, VowelDiacritic as D,
    };
    type Units = &'static [(UnitKind, char)];
    let cases: [(&str, &[&str], &[Units]); 2] = [
        (
            "অকস্মাৎ",
            &["অ", "ক", "স্মা", "ৎ"],
            &[
                &[(V, 'অ')],
                &[(C, 'ক'), (D, '·')],
                &[(C, 'স'), (C, 'ম'), (D, 'া')],
                &[(S, 'ৎ')],
            ],
        ),
        (
            "বাঁধা",
            &["বাঁ", "ধা"],
            &[&[(C, 'ব'), (D, 'া'), (S, 'ঁ')], &[(C, 'ধ'), (D, 'া')]],
        ),
    ];
    for (word, surfaces, units) in cases {
        let parsed = parse_word(word).map_err(|e| e.to_string())?;
        let syllables = syllabify(&parsed, SyllableMode::Strict).map_err(|e| e.to_string())?;
        let got: Vec<&str> = syllables.iter().map(|s| s.surface()).collect();
        ensure(got == surfaces, || format!("{word}: got {got:?}"))?;
        let got: Vec<Vec<(UnitKind, char)>> = syllables
            .iter()
            .map(|s| s.units().iter().map(|u| (u.kind(), u.key_char())).collect())
            .collect();
        ensure(got == units, || format!("{word}: got {got:?}"))?;
    }
    Ok("অকস্মাৎ has 4 syllables, বাঁধা has 2".into())
}

fn golden_morphology() -> Check {
    let word = "প্রদেশটিকে";
    let file = parse_segmentations("প্রদেশটিকে\tপ্র+<দেশ>+টি+কে\n", Path::new("golden.tsv"))
        .map_err(|e| e.to_string())?;
    let from_file = &file[word];
    ensure(from_file.segment_length() == 4, || {
        format!("file: {from_file:?}")
    })?;

    let scores = |keys: &[&str]| {
        keys.iter()
            .map(|k| (k.to_string(), 1))
            .collect::<BTreeMap<_, _>>()
    };
    let vocabulary = BTreeMap::from([("দেশ".to_string(), 1)]);
    let model = SegmenterModel::new(
        scores(&["প্র"]),
        scores(&["টি", "কে"]),
        vocabulary,
        StripLimits::default(),
    )
    .map_err(|e| e.to_string())?;
    let seg = model.segment(word);
    ensure(
        seg.segment_length() == 4
            && seg.root() == "দেশ"
            && seg.prefixes() == ["প্র"]
            && seg.suffixes() == ["টি", "কে"],
        || format!("model: {seg:?}"),
    )?;
    Ok("প্রদেশটিকে has segment length 4 from a file and from a model".into())
}

fn brute_force_statistic(s1: &[i64], s2: &[i64], alt: Alternative) -> Exact {
    let cdf = |s: &[i64], x: i64| {
        Exact::new(s.iter().filter(|&&v| v <= x).count() as i64, s.len() as i64)
    };
    let mut best = Exact::zero();
    for &x in s1.iter().chain(s2) {
        let diff = cdf(s1, x) - cdf(s2, x);
        let d = match alt {
            Alternative::NotEqual => diff.abs(),
            Alternative::Greater => -diff,
            Alternative::Less => diff,
        };
        best = best.max(d);
    }
    best
}

fn random_sample(rng: &mut StdRng, max_len: usize, max_value: i64) -> Vec<i64> {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| rng.gen_range(0..=max_value)).collect()
}

fn ks_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(SEED);
    for i in 0..ORACLE_PAIRS {
        let s1 = random_sample(&mut rng, 8, 9);
        let s2 = random_sample(&mut rng, 8, 9);
        for alt in Alternative::ALL {
            let got: Exact = ks_statistic(&s1, &s2, alt).map_err(|e| e.to_string())?;
            let want = brute_force_statistic(&s1, &s2, alt);
            ensure(got == want, || {
                format!("pair {i} {alt:?}: {got} vs {want} for {s1:?} {s2:?}")
            })?;
        }
    }

    let a: Vec<f64> = (1..=5).map(f64::from).collect();
    let b: Vec<f64> = (6..=10).map(f64::from).collect();
    let c = [1.0, 3.0, 5.0, 7.0];
    let d = [2.0, 4.0, 6.0, 8.0];
    let exact_d = |s1: &[f64], s2: &[f64]| -> Result<Exact, String> {
        let s1: Vec<i64> = s1.iter().map(|&x| x as i64).collect();
        let s2: Vec<i64> = s2.iter().map(|&x| x as i64).collect();
        ks_statistic(&s1, &s2, Alternative::NotEqual).map_err(|e| e.to_string())
    };
    ensure(exact_d(&a, &b)? == Exact::one(), || {
        "D([1..5],[6..10]) != 1".into()
    })?;
    ensure(exact_d(&c, &d)? == Exact::new(1, 4), || {
        "D([1,3,5,7],[2,4,6,8]) != 1/4".into()
    })?;

    let cases = [
        (&a[..], &b[..], Alternative::NotEqual, Q_SQRT_2_5),
        (&a[..], &b[..], Alternative::Less, EXP_MINUS_5),
        (&b[..], &a[..], Alternative::Greater, EXP_MINUS_5),
        (&c[..], &d[..], Alternative::NotEqual, Q_SQRT_2_OVER_4),
        (&c[..], &d[..], Alternative::Less, EXP_MINUS_QUARTER),
    ];
    for (s1, s2, alt, want) in cases {
        let got = ks_test::<f64, f64>(s1, s2, alt)
            .map_err(|e| e.to_string())?
            .p_value;
        ensure(rel_close(got, want), || {
            format!("{alt:?} p = {got:e}, expected {want:e}")
        })?;
    }
    Ok(format!("{ORACLE_PAIRS} random pairs match brute force; 5 closed-form p-values within {PVALUE_REL_TOL:e}"))
}

fn ks_properties() -> Check {
    let mut rng = StdRng::seed_from_u64(SEED + 1);
    for i in 0..PROPERTY_PAIRS {
        let n1 = rng.gen_range(1..=30);
        let n2 = rng.gen_range(1..=30);
        let s1: Vec<f64> = (0..n1).map(|_| rng.gen::<f64>()).collect();
        let s2: Vec<f64> = (0..n2)
            .map(|_| rng.gen::<f64>() + rng.gen_range(-0.3..0.3))
            .collect();
        let test = |x: &[f64], y: &[f64], alt| ks_test::<f64, f64>(x, y, alt).unwrap();
        let [ne, gt, lt] = Alternative::ALL.map(|alt| test(&s1, &s2, alt));
        ensure(ne.statistic == gt.statistic.max(lt.statistic), || {
            format!("pair {i}: max identity")
        })?;
        let swapped = test(&s2, &s1, Alternative::Less);
        ensure(
            (gt.statistic, gt.p_value) == (swapped.statistic, swapped.p_value),
            || format!("pair {i}: swap"),
        )?;
        let ne_swapped = test(&s2, &s1, Alternative::NotEqual);
        ensure(
            (ne.statistic, ne.p_value) == (ne_swapped.statistic, ne_swapped.p_value),
            || format!("pair {i}: two-sided swap"),
        )?;
        if ne.p_value <= ALPHA {
            ensure(gt.p_value.min(lt.p_value) <= ALPHA, || {
                format!("pair {i}: propagation")
            })?;
        }
        for alt in Alternative::ALL {
            let mut last = f64::INFINITY;
            for step in 0..=100 {
                let p = ks_pvalue(step as f64 / 100.0, n1, n2, alt).unwrap();
                ensure(p <= last, || {
                    format!("n=({n1},{n2}) {alt:?}: not monotone at step {step}")
                })?;
                last = p;
            }
        }
    }
    Ok(format!("{PROPERTY_PAIRS} random pairs, zero violations"))
}

/// Exact two-sided p-value by direct enumeration of the 252 ways to choose
/// which five of 1..=10 form the first sample.
fn enumerated_pvalue(observed: Exact) -> f64 {
    let mut hits = 0u32;
    let mut total = 0u32;
    for mask in 0u32..1 << 10 {
        if mask.count_ones() != 5 {
            continue;
        }
        let s1: Vec<i64> = (0..10)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| b as i64 + 1)
            .collect();
        let s2: Vec<i64> = (0..10)
            .filter(|b| mask >> b & 1 == 0)
            .map(|b| b as i64 + 1)
            .collect();
        total += 1;
        hits += u32::from(brute_force_statistic(&s1, &s2, Alternative::NotEqual) >= observed);
    }
    f64::from(hits) / f64::from(total)
}

fn permutation_audit() -> Check {
    let mut worst = 0.0f64;
    let mut audited = 0;
    for mask in 0u32..1 << 10 {
        if mask.count_ones() != 5 {
            continue;
        }
        let s1: Vec<i64> = (0..10)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| b as i64 + 1)
            .collect();
        let s2: Vec<i64> = (0..10)
            .filter(|b| mask >> b & 1 == 0)
            .map(|b| b as i64 + 1)
            .collect();
        let d: Exact = ks_statistic(&s1, &s2, Alternative::NotEqual).unwrap();
        if d < Exact::new(1, 2) {
            continue;
        }
        audited += 1;
        let exact: f64 = ks_exact_pvalue(&s1, &s2, Alternative::NotEqual).unwrap();
        let enumerated = enumerated_pvalue(d);
        ensure((exact - enumerated).abs() < 1e-12, || {
            format!("{s1:?}: exact {exact} vs enumerated {enumerated}")
        })?;
        let asymptotic = ks_test::<i64, f64>(&s1, &s2, Alternative::NotEqual)
            .unwrap()
            .p_value;
        worst = worst.max((asymptotic - exact).abs());
    }
    ensure(worst <= ASYMPTOTIC_ABS_TOL, || {
        format!("max |asymptotic - exact| = {worst}")
    })?;
    Ok(format!(
        "{audited} labelings with D >= 0.5, max |asymptotic - exact| = {worst:.4}"
    ))
}

fn toy_specs() -> Vec<CorpusSpec> {
    TOY_CORPORA
        .iter()
        .map(|name| CorpusSpec::new(*name, vec![toy_dir(name)]).unwrap())
        .collect()
}

fn report_bytes(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let cfg = RunConfig {
        corpora: toy_specs(),
        profile: ProfileOptions::default(),
        compare: CompareOptions::default(),
        output_dir: dir.to_path_buf(),
    };
    let written = analyze(&cfg).map_err(|e| e.to_string())?;
    written
        .iter()
        .map(|p| {
            let name = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
            fs::read(p).map(|b| (name, b)).map_err(|e| e.to_string())
        })
        .collect()
}

fn pipeline_determinism() -> Check {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = report_bytes(a.path())?;
    let second = report_bytes(b.path())?;
    ensure(first == second, || "reports differ between runs".into())?;

    let cells = String::from_utf8(first["report/cells.csv"].clone()).unwrap();
    let rows: Vec<Vec<&str>> = cells
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let distinct: BTreeSet<(&str, &str, &str)> = rows.iter().map(|r| (r[0], r[1], r[2])).collect();
    ensure(rows.len() == 60 && distinct.len() == 20, || {
        format!("{} rows, {} cells", rows.len(), distinct.len())
    })?;
    for row in &rows {
        let p: f64 = row[7]
            .parse()
            .map_err(|_| format!("bad p-value {:?}", row[7]))?;
        ensure((0.0..=1.0).contains(&p), || {
            format!("p-value {p} out of range")
        })?;
    }
    let symmetric = distinct.iter().filter(|c| c.0.ends_with("length")).count();
    ensure(symmetric == 4, || format!("{symmetric} length cells"))?;
    Ok(format!(
        "2 runs byte-identical over {} files; 20 cells x 3 p-values",
        first.len()
    ))
}

fn normalization() -> Check {
    let profiles =
        profile_corpora(&toy_specs(), &ProfileOptions::default()).map_err(|e| e.to_string())?;
    let mut families = 0;
    for profile in &profiles {
        for (family, table) in &profile.frequencies {
            let sum: f64 = table
                .counts()
                .keys()
                .map(|k| table.normalize::<f64>(k).unwrap())
                .sum();
            let exact: Exact = table
                .counts()
                .keys()
                .map(|k| table.normalize::<Exact>(k).unwrap())
                .sum();
            ensure(
                (sum - 1.0).abs() <= NORMALIZATION_TOL && exact.is_one(),
                || format!("{} {family}: sum {sum}", profile.name),
            )?;
            families += 1;
        }
        for (family, dist) in &profile.lengths {
            let pair = length_pair::<f64>(dist, dist, LengthMode::Relative).unwrap();
            let sum: f64 = pair.values1.iter().sum();
            ensure((sum - 1.0).abs() <= NORMALIZATION_TOL, || {
                format!("{} {family}: sum {sum}", profile.name)
            })?;
            families += 1;
        }
    }
    Ok(format!(
        "{families} distributions sum to 1 within {NORMALIZATION_TOL:e}"
    ))
}

fn cell_format() -> Check {
    let p = [1.66e-2, 8.25e-1, 8.33e-3];
    let mut i = 0;
    let outcomes = Alternative::ALL.map(|alternative| {
        let o = KsOutcome {
            statistic: 0.0,
            p_value: p[i],
            n1: 1,
            n2: 1,
            alternative,
            method: PValueMethod::Asymptotic,
        };
        i += 1;
        o
    });
    let cell = ReportCell {
        family: bhasha::features::FeatureFamily::CharLength,
        source: "A".into(),
        target: "B".into(),
        outcomes,
        significant: p.map(|v| v <= ALPHA),
    };
    let rendered = format_cell(&cell);
    ensure(rendered == "1.66e-02 | 8.25e-01 | 8.33e-03", || {
        format!("rendered {rendered:?}")
    })?;
    Ok(format!("renders \"{rendered}\""))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("golden parses", golden_parses, Some(GOLDEN_PARSE_LIMIT)),
        ("unit inventory", inventory, None),
        ("golden syllables", golden_syllables, None),
        ("golden morphology", golden_morphology, None),
        ("K-S oracle equivalence", ks_oracle, Some(KS_ORACLE_LIMIT)),
        ("K-S properties", ks_properties, None),
        ("exact permutation audit", permutation_audit, None),
        (
            "pipeline determinism",
            pipeline_determinism,
            Some(PIPELINE_LIMIT),
        ),
        ("normalization", normalization, None),
        ("report cell format", cell_format, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:?}, limit {limit:?}"))
            }
            (r, _) => r,
        };
        let (status, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "criterion {:>2} {status} {name} ({:.3}s): {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
        failed += usize::from(result.is_err());
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
