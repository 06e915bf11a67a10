//! Word sets of finitely generated rotation semigroups and groups.
//!
//! Words act on the left: `g_{i1}…g_{in}` sends `a` to `g_{i1}(…(g_{in} a))`.
//! Enumeration is depth-first and streaming; the product of the letters is
//! maintained incrementally, one quaternion product per tree edge.
//!
//! A run over words of length `n` can be split into the `word_count(k)`
//! subtrees below the length-`k` prefixes. Tasks are numbered in
//! lexicographic prefix order, so concatenating task outputs in task order
//! reproduces the unpartitioned visit order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, RunOptions};
use crate::rotor::UnitQuaternion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// All words in the generators.
    Semigroup,
    /// Reduced words; generators `i` and `len - 1 - i` are mutually inverse.
    Group,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSystem {
    generators: Vec<UnitQuaternion>,
    mode: Mode,
}

pub const MAX_GENERATORS: usize = 255;

impl GeneratorSystem {
    pub fn new(generators: Vec<UnitQuaternion>, mode: Mode) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument("generator list is empty".into()));
        }
        if generators.len() > MAX_GENERATORS {
            return Err(Error::InvalidArgument(format!("{} generators (at most {MAX_GENERATORS})", generators.len())));
        }
        if mode == Mode::Group {
            let len = generators.len();
            if !len.is_multiple_of(2) {
                return Err(Error::InvalidArgument(format!(
                    "group mode needs an even number of generators, got {len}"
                )));
            }
            for (i, g) in generators.iter().enumerate() {
                let prod = g.compose(&generators[len - 1 - i]);
                if (prod.x * prod.x + prod.y * prod.y + prod.z * prod.z).sqrt() > 1e-10 {
                    return Err(Error::InvalidArgument(format!(
                        "generators {i} and {} are not mutually inverse",
                        len - 1 - i
                    )));
                }
            }
        }
        Ok(GeneratorSystem { generators, mode })
    }

    /// Closes a list of generators under inversion: `[g_0, …, g_{d-1}, g_{d-1}⁻¹, …, g_0⁻¹]`.
    pub fn symmetric(half: Vec<UnitQuaternion>) -> Result<Self> {
        let mut gens = half.clone();
        gens.extend(half.iter().rev().map(UnitQuaternion::conj));
        GeneratorSystem::new(gens, Mode::Group)
    }

    /// The semigroup on the first two quaternions of [`lps5_quaternions`].
    pub fn lps5_pair() -> Self {
        let q = lps5_quaternions();
        GeneratorSystem::new(vec![q[0], q[1]], Mode::Semigroup).expect("valid preset")
    }

    /// The semigroup on all three quaternions of [`lps5_quaternions`].
    pub fn lps5_triple() -> Self {
        GeneratorSystem::new(lps5_quaternions().to_vec(), Mode::Semigroup).expect("valid preset")
    }

    /// The free group on the three quaternions of [`lps5_quaternions`], six letters.
    pub fn lps5_group() -> Self {
        GeneratorSystem::symmetric(lps5_quaternions().to_vec()).expect("valid preset")
    }

    pub fn generators(&self) -> &[UnitQuaternion] {
        &self.generators
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn alphabet_size(&self) -> usize {
        self.generators.len()
    }

    #[inline]
    pub fn inverse_index(&self, i: usize) -> Option<usize> {
        match self.mode {
            Mode::Semigroup => None,
            Mode::Group => Some(self.generators.len() - 1 - i),
        }
    }

    pub fn word_count(&self, n: usize) -> Result<u64> {
        word_count(self, n)
    }
}

/// The rotations `(1 ± 2i)/√5`, `(1 ± 2j)/√5`, `(1 ± 2k)/√5` come from the
/// six integer quaternions of norm 5; the three with positive imaginary part
/// together with their inverses generate a free group acting on `S²`.
pub fn lps5_quaternions() -> [UnitQuaternion; 3] {
    [
        UnitQuaternion::new(1.0, 2.0, 0.0, 0.0).expect("nonzero"),
        UnitQuaternion::new(1.0, 0.0, 2.0, 0.0).expect("nonzero"),
        UnitQuaternion::new(1.0, 0.0, 0.0, 2.0).expect("nonzero"),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self, system: &GeneratorSystem) -> bool {
        self.0.windows(2).all(|w| system.inverse_index(w[0] as usize) != Some(w[1] as usize))
    }
}

/// `|H_n|`: `d^n` for semigroups, `2d(2d-1)^{n-1}` reduced words for groups.
pub fn word_count(system: &GeneratorSystem, n: usize) -> Result<u64> {
    let overflow = || Error::Overflow(format!("word count for n = {n}"));
    let a = system.alphabet_size() as u64;
    if n == 0 {
        return Ok(1);
    }
    match system.mode {
        Mode::Semigroup => a.checked_pow(n as u32).ok_or_else(overflow),
        Mode::Group => {
            let tail = (a - 1).checked_pow((n - 1) as u32).ok_or_else(overflow)?;
            a.checked_mul(tail).ok_or_else(overflow)
        }
    }
}

/// Left-to-right product of the letters.
pub fn evaluate(system: &GeneratorSystem, word: &Word) -> Result<UnitQuaternion> {
    word.0.iter().try_fold(UnitQuaternion::IDENTITY, |acc, &i| {
        system
            .generators
            .get(i as usize)
            .map(|g| acc.compose(g))
            .ok_or_else(|| Error::InvalidArgument(format!("letter {i} out of range")))
    })
}

/// Selects the subtree below one length-`depth` prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    pub depth: usize,
    pub task: u64,
}

impl Partition {
    pub const FULL: Partition = Partition { depth: 0, task: 0 };
}

/// Decodes task `task` into its length-`depth` prefix.
pub fn prefix_letters(system: &GeneratorSystem, depth: usize, task: u64) -> Result<Vec<u8>> {
    let tasks = word_count(system, depth)?;
    if task >= tasks {
        return Err(Error::InvalidPartition { depth, task, tasks });
    }
    let a = system.alphabet_size() as u64;
    let mut letters = Vec::with_capacity(depth);
    match system.mode {
        Mode::Semigroup => {
            let mut rest = task;
            let mut scale = tasks;
            for _ in 0..depth {
                scale /= a;
                letters.push((rest / scale) as u8);
                rest %= scale;
            }
        }
        Mode::Group => {
            if depth > 0 {
                let mut scale = tasks / a;
                let mut rest = task;
                letters.push((rest / scale) as u8);
                rest %= scale;
                for _ in 1..depth {
                    scale /= a - 1;
                    let rank = (rest / scale) as usize;
                    rest %= scale;
                    let inv = system.inverse_index(*letters.last().unwrap() as usize).unwrap();
                    letters.push(if rank < inv { rank } else { rank + 1 } as u8);
                }
            }
        }
    }
    Ok(letters)
}

/// Visits every length-`n` word below the partition's prefix, in
/// lexicographic order, together with its product.
pub fn enumerate_words<F>(system: &GeneratorSystem, n: usize, partition: Partition, mut visitor: F) -> Result<()>
where
    F: FnMut(&[u8], &UnitQuaternion),
{
    if partition.depth > n {
        return Err(Error::InvalidArgument(format!("partition depth {} exceeds word length {n}", partition.depth)));
    }
    let prefix = prefix_letters(system, partition.depth, partition.task)?;
    let mut letters = prefix.clone();
    letters.resize(n, 0);
    let mut prods = vec![UnitQuaternion::IDENTITY; n + 1];
    for (i, &l) in prefix.iter().enumerate() {
        prods[i + 1] = prods[i].compose(&system.generators[l as usize]);
    }
    descend(system, n, prefix.len(), &mut letters, &mut prods, &mut visitor);
    Ok(())
}

fn descend<F>(
    system: &GeneratorSystem,
    n: usize,
    depth: usize,
    letters: &mut [u8],
    prods: &mut [UnitQuaternion],
    visitor: &mut F,
) where
    F: FnMut(&[u8], &UnitQuaternion),
{
    if depth == n {
        visitor(letters, &prods[n]);
        return;
    }
    let forbidden = if depth > 0 { system.inverse_index(letters[depth - 1] as usize) } else { None };
    let parent = prods[depth];
    for (i, g) in system.generators.iter().enumerate() {
        if forbidden == Some(i) {
            continue;
        }
        letters[depth] = i as u8;
        prods[depth + 1] = parent.compose(g);
        descend(system, n, depth + 1, letters, prods, visitor);
    }
}

/// Runs one private fold per prefix task and returns the per-task states in
/// task order.
pub fn fold_prefix_tasks<A, I, V>(
    system: &GeneratorSystem,
    n: usize,
    options: &RunOptions,
    init: I,
    visit: V,
) -> Result<Vec<A>>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, &[u8], &UnitQuaternion) + Sync + Send,
{
    let depth = options.depth_for(n);
    let tasks = word_count(system, depth)?;
    let tasks = usize::try_from(tasks).map_err(|_| Error::Overflow("task count".into()))?;
    exec::try_map_tasks(options.execution, tasks, |task| {
        let mut acc = init();
        enumerate_words(system, n, Partition { depth, task: task as u64 }, |w, q| visit(&mut acc, w, q))?;
        Ok(acc)
    })
}

/// Like [`fold_prefix_tasks`] but one letter short: visits the product of
/// every length-`(n-1)` word together with the letter that may not follow it
/// (the inverse of its last letter, in group mode). The caller applies the
/// last letter itself, which pays off when it only needs part of the product.
pub fn fold_parent_tasks<A, I, V>(
    system: &GeneratorSystem,
    n: usize,
    options: &RunOptions,
    init: I,
    visit: V,
) -> Result<Vec<A>>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, &UnitQuaternion, Option<usize>) + Sync + Send,
{
    if n == 0 {
        return Err(Error::InvalidArgument("word length 0 has no parent level".into()));
    }
    fold_prefix_tasks(system, n - 1, options, init, |acc, w, q| {
        let forbidden = w.last().and_then(|&l| system.inverse_index(l as usize));
        visit(acc, q, forbidden)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;

    fn visits(system: &GeneratorSystem, n: usize, partition: Partition) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        enumerate_words(system, n, partition, |w, _| out.push(w.to_vec())).unwrap();
        out
    }

    #[test]
    fn counts() {
        assert_eq!(GeneratorSystem::lps5_pair().word_count(3).unwrap(), 8);
        let g = GeneratorSystem::symmetric(lps5_quaternions()[..2].to_vec()).unwrap();
        assert_eq!(g.word_count(2).unwrap(), 12);
        assert_eq!(g.word_count(0).unwrap(), 1);
        assert_eq!(GeneratorSystem::lps5_group().word_count(0).unwrap(), 1);
        assert_eq!(GeneratorSystem::lps5_group().word_count(3).unwrap(), 6 * 25);
    }

    #[test]
    fn count_overflow_is_an_error() {
        assert!(matches!(GeneratorSystem::lps5_pair().word_count(64), Err(Error::Overflow(_))));
        assert_eq!(GeneratorSystem::lps5_pair().word_count(63).unwrap(), 1 << 63);
    }

    #[test]
    fn semigroup_visit_order() {
        let got = visits(&GeneratorSystem::lps5_pair(), 2, Partition::FULL);
        assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn group_rank_one_visits_only_powers() {
        let g = GeneratorSystem::symmetric(vec![UnitQuaternion::rz(0.3)]).unwrap();
        assert_eq!(visits(&g, 2, Partition::FULL), vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn empty_word_is_the_identity() {
        let mut seen = Vec::new();
        enumerate_words(&GeneratorSystem::lps5_group(), 0, Partition::FULL, |w, q| seen.push((w.len(), *q))).unwrap();
        assert_eq!(seen, vec![(0, UnitQuaternion::IDENTITY)]);
        let id = evaluate(&GeneratorSystem::lps5_pair(), &Word(vec![])).unwrap();
        assert_eq!(id, UnitQuaternion::IDENTITY);
    }

    #[test]
    fn single_letter_evaluates_to_its_generator() {
        let s = GeneratorSystem::lps5_group();
        for i in 0..6u8 {
            let (q, g) = (evaluate(&s, &Word(vec![i])).unwrap(), s.generators()[i as usize]);
            assert!((q.w - g.w).abs() + (q.x - g.x).abs() + (q.y - g.y).abs() + (q.z - g.z).abs() < 1e-15);
        }
        assert!(evaluate(&s, &Word(vec![6])).is_err());
    }

    #[test]
    fn partitions_cover_the_full_visit() {
        for system in [GeneratorSystem::lps5_pair(), GeneratorSystem::lps5_group()] {
            let n = 5;
            let full = visits(&system, n, Partition::FULL);
            assert_eq!(full.len() as u64, system.word_count(n).unwrap());
            for depth in 0..=n {
                let tasks = system.word_count(depth).unwrap();
                let mut joined = Vec::new();
                for task in 0..tasks {
                    joined.extend(visits(&system, n, Partition { depth, task }));
                }
                assert_eq!(joined, full, "depth {depth}");
            }
        }
    }

    #[test]
    fn invalid_partitions() {
        let s = GeneratorSystem::lps5_pair();
        let r = enumerate_words(&s, 4, Partition { depth: 2, task: 4 }, |_, _| {});
        assert_eq!(r, Err(Error::InvalidPartition { depth: 2, task: 4, tasks: 4 }));
        assert!(enumerate_words(&s, 2, Partition { depth: 3, task: 0 }, |_, _| {}).is_err());
    }

    #[test]
    fn visited_words_are_reduced_and_lexicographic() {
        let s = GeneratorSystem::lps5_group();
        let all = visits(&s, 4, Partition::FULL);
        assert!(all.iter().all(|w| Word(w.clone()).is_reduced(&s)));
        assert!(all.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn parent_fold_extends_to_the_full_visit() {
        for s in [GeneratorSystem::lps5_pair(), GeneratorSystem::lps5_group()] {
            let mut full = Vec::new();
            enumerate_words(&s, 6, Partition::FULL, |_, q| full.push(*q)).unwrap();
            let parts = fold_parent_tasks(&s, 6, &RunOptions::sequential(), Vec::new, |out, p, forbidden| {
                for (i, g) in s.generators().iter().enumerate() {
                    if forbidden != Some(i) {
                        out.push(p.compose(g));
                    }
                }
            })
            .unwrap();
            assert_eq!(parts.concat(), full);
        }
        assert!(
            fold_parent_tasks(&GeneratorSystem::lps5_pair(), 0, &RunOptions::default(), || (), |_, _, _| ()).is_err()
        );
    }

    #[test]
    fn enumeration_sizes_match_word_count() {
        let pair = GeneratorSystem::lps5_pair();
        let group = GeneratorSystem::lps5_group();
        for (s, n) in [(&pair, 22usize), (&group, 9usize)] {
            let per_task = fold_prefix_tasks(s, n, &RunOptions::default(), || 0u64, |c, _, _| *c += 1).unwrap();
            assert_eq!(per_task.iter().sum::<u64>(), s.word_count(n).unwrap());
        }
    }

    #[test]
    fn incremental_products_match_evaluation() {
        for s in [GeneratorSystem::lps5_pair(), GeneratorSystem::lps5_group()] {
            enumerate_words(&s, 7, Partition::FULL, |w, q| {
                let e = evaluate(&s, &Word(w.to_vec())).unwrap();
                let d = (e.w - q.w).abs() + (e.x - q.x).abs() + (e.y - q.y).abs() + (e.z - q.z).abs();
                assert!(d < 1e-9);
            })
            .unwrap();
        }
    }

    #[test]
    fn evaluation_is_associative() {
        let s = GeneratorSystem::lps5_group();
        let w1 = Word(vec![0, 1, 2, 2, 4]);
        let w2 = Word(vec![3, 0, 0, 5]);
        let joined = Word([w1.0.clone(), w2.0.clone()].concat());
        let a = evaluate(&s, &joined).unwrap();
        let b = evaluate(&s, &w1).unwrap().compose(&evaluate(&s, &w2).unwrap());
        assert!((a.w - b.w).abs() + (a.x - b.x).abs() + (a.y - b.y).abs() + (a.z - b.z).abs() < 1e-10);
    }

    #[test]
    fn lps5_words_are_never_the_identity() {
        let s = GeneratorSystem::lps5_group();
        for n in 1..=8 {
            enumerate_words(&s, n, Partition::FULL, |w, q| {
                assert!(q.rotation_angle() > 1e-6, "{w:?}");
            })
            .unwrap();
        }
    }

    #[test]
    fn group_mode_validation() {
        let q = lps5_quaternions();
        assert!(GeneratorSystem::new(vec![q[0], q[1], q[2]], Mode::Group).is_err());
        assert!(GeneratorSystem::new(vec![q[0], q[1]], Mode::Group).is_err());
        assert!(GeneratorSystem::new(vec![q[0], q[0].conj()], Mode::Group).is_ok());
        assert!(GeneratorSystem::new(vec![], Mode::Semigroup).is_err());
    }

    #[test]
    fn sequential_and_parallel_folds_agree() {
        let s = GeneratorSystem::lps5_group();
        let run = |exec| {
            let opts = RunOptions { execution: exec, partition_depth: Some(3), ..Default::default() };
            fold_prefix_tasks(&s, 6, &opts, Vec::new, |v: &mut Vec<u8>, w, _| v.extend_from_slice(w)).unwrap()
        };
        assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    }
}
