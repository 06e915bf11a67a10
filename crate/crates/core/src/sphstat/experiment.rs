//! End-to-end sphere experiments: orbit measures, fixed-axis measures and
//! character averages over the word sets `H_n`.

use super::accumulator::{Cap, SphericalAccumulator};
use crate::error::{Error, Result};
use crate::exec::RunOptions;
use crate::report::{CapRow, ExperimentReport, SphereExperiment};
use crate::rotor::{identity_threshold, FixedPointSet, SpherePoint, UnitQuaternion};
use crate::words::{fold_parent_tasks, fold_prefix_tasks, word_count, GeneratorSystem, Mode};

/// Largest character degree accepted by [`character_experiment`].
pub const MAX_EXPERIMENT_CHAR_DEGREE: usize = 16;

/// Per-task state: the accumulator plus the number of identity words seen.
struct TaskState {
    acc: SphericalAccumulator,
    identity_words: u64,
    error: Option<Error>,
}

impl TaskState {
    fn new(template: &SphericalAccumulator) -> Self {
        TaskState { acc: template.clone(), identity_words: 0, error: None }
    }
}

fn merge_tasks(parts: Vec<TaskState>, template: SphericalAccumulator) -> Result<(SphericalAccumulator, u64)> {
    let mut acc = template;
    let mut identity_words = 0;
    for part in parts {
        if let Some(e) = part.error {
            return Err(e);
        }
        acc.merge_from(&part.acc)?;
        identity_words += part.identity_words;
    }
    Ok((acc, identity_words))
}

/// Accumulates `δ_{g a}` for every `g ∈ H_n`, normalized by `|H_n|`.
pub fn orbit_experiment(
    system: &GeneratorSystem,
    a: &SpherePoint,
    n: usize,
    lmax: usize,
    caps: &[Cap],
    options: &RunOptions,
) -> Result<ExperimentReport> {
    let degree = word_count(system, n)?;
    let template = SphericalAccumulator::new(lmax, caps.to_vec());
    let parts = fold_prefix_tasks(
        system,
        n,
        options,
        || TaskState::new(&template),
        |st, _, q| st.acc.accumulate(&q.act(a), 1.0),
    )?;
    let (acc, _) = merge_tasks(parts, template)?;
    Ok(build_report(SphereExperiment::Orbit, system, n, degree, &acc, 0, 1.0))
}

/// Accumulates the isolated fixed points (rotation axes, each pole with
/// multiplicity one) of every `g ∈ H_n`, normalized by `d_n = |H_n|`.
/// Words acting as the identity contribute nothing.
pub fn axis_experiment(
    system: &GeneratorSystem,
    n: usize,
    lmax: usize,
    caps: &[Cap],
    options: &RunOptions,
) -> Result<ExperimentReport> {
    let degree = word_count(system, n)?;
    let template = SphericalAccumulator::new(lmax, caps.to_vec());
    let tol = options.identity_tol;
    let parts = fold_prefix_tasks(
        system,
        n,
        options,
        || TaskState::new(&template),
        |st, _, q| match q.fixed_point_set(tol) {
            Ok(FixedPointSet::IsolatedPair(u, v)) => {
                st.acc.accumulate(&u, 1.0);
                st.acc.accumulate(&v, 1.0);
            }
            Ok(FixedPointSet::AllOfSphere) => st.identity_words += 1,
            Err(e) => {
                st.error.get_or_insert(e);
            }
        },
    )?;
    let (acc, identity_words) = merge_tasks(parts, template)?;
    Ok(build_report(SphereExperiment::Axes, system, n, degree, &acc, identity_words, 2.0))
}

/// Averages `χ_l(g)` over `g ∈ H_n` for `l ≤ l_max`.
pub fn character_experiment(
    system: &GeneratorSystem,
    n: usize,
    l_max: usize,
    options: &RunOptions,
) -> Result<ExperimentReport> {
    if l_max > MAX_EXPERIMENT_CHAR_DEGREE {
        return Err(Error::InvalidArgument(format!("character degree {l_max} above {MAX_EXPERIMENT_CHAR_DEGREE}")));
    }
    let degree = word_count(system, n)?;
    let template = SphericalAccumulator::new(0, vec![]).with_characters(l_max);
    let threshold = identity_threshold(options.identity_tol);
    let parts = if n == 0 {
        let mut st = TaskState::new(&template);
        st.acc.accumulate_character(&UnitQuaternion::IDENTITY);
        st.identity_words = 1;
        vec![st]
    } else {
        // Only |w| of each full product is needed: w(p·g) is a dot product,
        // so the last letter costs four multiplications instead of a
        // renormalized Hamilton product.
        let gens = system.generators();
        fold_parent_tasks(
            system,
            n,
            options,
            || TaskState::new(&template),
            |st, p: &UnitQuaternion, forbidden| {
                let mut cs = [0.0; 16];
                let mut k = 0;
                for (i, g) in gens.iter().enumerate() {
                    if forbidden == Some(i) {
                        continue;
                    }
                    let w = p.w * g.w - p.x * g.x - p.y * g.y - p.z * g.z;
                    if k == cs.len() {
                        st.acc.accumulate_character_batch(&cs);
                        k = 0;
                    }
                    cs[k] = w.abs();
                    k += 1;
                    // 1 − w² is too coarse near the identity; form the
                    // product only for the rare words that get close.
                    if w * w > 1.0 - 1e-6 && p.compose(g).vector_norm_sqr() <= threshold {
                        st.identity_words += 1;
                    }
                }
                st.acc.accumulate_character_batch(&cs[..k]);
            },
        )?
    };
    let (acc, identity_words) = merge_tasks(parts, template)?;
    let char_avg = (0..=l_max).map(|l| acc.char_average(l).unwrap_or(0.0)).collect();
    let mut flags = hypothesis_flags(system);
    if identity_words > 0 {
        flags.push("identity-words-present".into());
    }
    Ok(ExperimentReport {
        kind: SphereExperiment::Characters,
        n,
        degree,
        point_count: acc.char_count(),
        identity_words,
        mass: acc.char_count() as f64 / degree as f64,
        weyl_rms: vec![],
        caps: vec![],
        char_avg,
        estimated_s: 1.0,
        flags,
    })
}

/// Flags configurations outside the hypotheses of the equidistribution
/// theorems for semigroups and groups (two generators, dense closure).
pub fn hypothesis_flags(system: &GeneratorSystem) -> Vec<String> {
    let mut flags = Vec::new();
    let d = match system.mode() {
        Mode::Semigroup => system.alphabet_size(),
        Mode::Group => system.alphabet_size() / 2,
    };
    if d == 1 {
        flags.push("single-generator".into());
    } else if d != 2 {
        flags.push(match system.mode() {
            Mode::Semigroup => "semigroup-d-not-2".into(),
            Mode::Group => "group-d-not-2".into(),
        });
    }
    flags
}

fn build_report(
    kind: SphereExperiment,
    system: &GeneratorSystem,
    n: usize,
    degree: u64,
    acc: &SphericalAccumulator,
    identity_words: u64,
    s_reference: f64,
) -> ExperimentReport {
    let normalizer = degree as f64;
    let mass = acc.total_weight() / normalizer;
    let caps = acc
        .caps()
        .iter()
        .enumerate()
        .map(|(i, cap)| {
            let empirical = if acc.count() == 0 { 0.0 } else { acc.cap_weight(i) / normalizer };
            let reference = s_reference * cap.area();
            CapRow {
                center: cap.center.as_array(),
                radius: cap.radius,
                empirical,
                reference,
                residual: empirical - reference,
            }
        })
        .collect();
    let mut flags = hypothesis_flags(system);
    if acc.is_single_axis() {
        flags.push("support-single-antipodal-pair".into());
    }
    if identity_words > 0 {
        flags.push("identity-words-present".into());
    }
    ExperimentReport {
        kind,
        n,
        degree,
        point_count: acc.count(),
        identity_words,
        mass,
        weyl_rms: (0..=acc.lmax()).map(|l| acc.weyl_rms(l)).collect(),
        caps,
        char_avg: vec![],
        estimated_s: mass,
        flags,
    }
}
