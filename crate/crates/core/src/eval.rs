//! Scoring against gold standards and the most-frequent-sense baseline.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::{self, Write as _};
use std::path::Path;

use crate::dynamics::GameOutcome;
use crate::error::{Error, Result};
use crate::graph::Occurrence;
use crate::io;
use crate::senses::SenseInventory;

/// Acceptable concepts per instance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GoldStandard {
    answers: BTreeMap<String, BTreeSet<String>>,
}

impl GoldStandard {
    pub fn insert(&mut self, instance: &str, concepts: impl IntoIterator<Item = String>) -> Result<()> {
        let set: BTreeSet<String> = concepts.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidParameter(format!("empty gold set for {instance}")));
        }
        self.answers.insert(instance.to_string(), set);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    pub fn get(&self, instance: &str) -> Option<&BTreeSet<String>> {
        self.answers.get(instance)
    }

    /// Parses `instance_id<TAB>concept_id[,concept_id...]` lines.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut gold = Self::default();
        for record in io::records(text, source, 2) {
            let (line, f) = record?;
            if gold.answers.contains_key(f[0]) {
                return Err(io::parse_error(source, line, format!("duplicate instance {:?}", f[0])));
            }
            let concepts = f[1]
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from);
            gold.insert(f[0], concepts)
                .map_err(|e| io::parse_error(source, line, e.to_string()))?;
        }
        Ok(gold)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&io::read_file(path)?, &io::source_name(path))
    }
}

/// The system's answer for one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub instance_id: String,
    pub pos: Option<String>,
    pub concept: Option<String>,
}

/// Answers for game players, in player order.
pub fn answers_from_outcome(players: &[Occurrence], outcome: &GameOutcome) -> Vec<Answer> {
    players
        .iter()
        .zip(&outcome.assignments)
        .map(|(p, a)| Answer {
            instance_id: p.instance_id.clone(),
            pos: Some(p.pos.clone()),
            concept: a.concept.clone(),
        })
        .collect()
}

/// `instance_id<TAB>concept_id` for every answered instance.
pub fn format_answers(answers: &[Answer]) -> String {
    let mut out = String::new();
    for a in answers {
        if let Some(c) = &a.concept {
            writeln!(out, "{}\t{c}", a.instance_id).unwrap();
        }
    }
    out
}

pub fn parse_answers(text: &str, source: &str) -> Result<Vec<Answer>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for record in io::records(text, source, 2) {
        let (line, f) = record?;
        if !seen.insert(f[0].to_string()) {
            return Err(io::parse_error(source, line, format!("duplicate instance {:?}", f[0])));
        }
        out.push(Answer {
            instance_id: f[0].to_string(),
            pos: None,
            concept: Some(f[1].trim().to_string()),
        });
    }
    Ok(out)
}

pub fn load_answers(path: &Path) -> Result<Vec<Answer>> {
    parse_answers(&io::read_file(path)?, &io::source_name(path))
}

/// Most-frequent-sense baseline: every player takes its top-ranked sense.
pub fn mfs_baseline(players: &[Occurrence], inventories: &SenseInventory) -> Vec<Answer> {
    players
        .iter()
        .map(|p| Answer {
            instance_id: p.instance_id.clone(),
            pos: Some(p.pos.clone()),
            concept: inventories.senses_for(p).map(|s| s[0].clone()),
        })
        .collect()
}

/// `2 P R / (P + R)`, or 0 when both are 0. Inputs and output share a scale.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Counts and percentages for one slice of the data.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScoreLine {
    pub answered: usize,
    pub correct: usize,
    pub total: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ScoreLine {
    fn from_counts(answered: usize, correct: usize, total: usize) -> Self {
        let pct = |num: usize, den: usize| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
        let precision = pct(correct, answered);
        let recall = pct(correct, total);
        Self {
            answered,
            correct,
            total,
            precision,
            recall,
            f1: f1(precision, recall),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreReport {
    pub overall: ScoreLine,
    pub by_pos: BTreeMap<String, ScoreLine>,
    /// Every instance was answered, so precision equals recall.
    pub precision_equals_recall: bool,
}

impl ScoreReport {
    pub fn precision(&self) -> f64 {
        self.overall.precision
    }

    pub fn recall(&self) -> f64 {
        self.overall.recall
    }

    pub fn f1(&self) -> f64 {
        self.overall.f1
    }

    /// Tab-separated table with a header row, overall first.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("scope\tanswered\tcorrect\ttotal\tprecision\trecall\tf1\n");
        let mut row = |name: &str, s: &ScoreLine| {
            writeln!(
                out,
                "{name}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}",
                s.answered, s.correct, s.total, s.precision, s.recall, s.f1
            )
            .unwrap();
        };
        row("all", &self.overall);
        for (pos, s) in &self.by_pos {
            row(&format!("pos:{pos}"), s);
        }
        out
    }
}

impl fmt::Display for ScoreReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = &self.overall;
        writeln!(f, "answered  {} / {} ({} correct)", o.answered, o.total, o.correct)?;
        writeln!(f, "precision {:.2}", o.precision)?;
        writeln!(f, "recall    {:.2}", o.recall)?;
        writeln!(f, "F1        {:.2}", o.f1)?;
        if self.precision_equals_recall {
            writeln!(f, "all instances answered: precision = recall")?;
        }
        for (pos, s) in &self.by_pos {
            writeln!(
                f,
                "  {pos:<4} P {:6.2}  R {:6.2}  F1 {:6.2}  ({}/{})",
                s.precision, s.recall, s.f1, s.answered, s.total
            )?;
        }
        Ok(())
    }
}

/// Precision over answered instances, recall over all gold instances.
///
/// An answer is correct when its concept is any member of the gold set. An
/// answer for an instance the gold standard does not know is an error. The
/// per-POS breakdown covers answers that carry a part of speech; gold
/// instances without any answer count toward the overall total only.
pub fn score(answers: &[Answer], gold: &GoldStandard) -> Result<ScoreReport> {
    let mut answered = 0;
    let mut correct = 0;
    let mut pos_counts: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    for a in answers {
        let expected = gold
            .get(&a.instance_id)
            .ok_or_else(|| Error::UnknownInstance(a.instance_id.clone()))?;
        let hit = a.concept.as_ref().is_some_and(|c| expected.contains(c));
        if a.concept.is_some() {
            answered += 1;
        }
        if hit {
            correct += 1;
        }
        if let Some(pos) = &a.pos {
            let entry = pos_counts.entry(pos.clone()).or_default();
            entry.0 += usize::from(a.concept.is_some());
            entry.1 += usize::from(hit);
            entry.2 += 1;
        }
    }
    let total = gold.len();
    Ok(ScoreReport {
        overall: ScoreLine::from_counts(answered, correct, total),
        by_pos: pos_counts
            .into_iter()
            .map(|(pos, (a, c, t))| (pos, ScoreLine::from_counts(a, c, t)))
            .collect(),
        precision_equals_recall: answered == total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn answer(id: &str, concept: Option<&str>) -> Answer {
        Answer {
            instance_id: id.into(),
            pos: Some("n".into()),
            concept: concept.map(String::from),
        }
    }

    fn gold(n: usize) -> GoldStandard {
        let text: String = (0..n).map(|i| format!("t{i}\tc{i}\n")).collect();
        GoldStandard::parse(&text, "gold").unwrap()
    }

    #[test]
    fn perfect_score() {
        let answers: Vec<Answer> = (0..4)
            .map(|i| answer(&format!("t{i}"), Some(&format!("c{i}"))))
            .collect();
        let r = score(&answers, &gold(4)).unwrap();
        assert_eq!((r.precision(), r.recall(), r.f1()), (100.0, 100.0, 100.0));
        assert!(r.precision_equals_recall);
    }

    #[test]
    fn f1_arithmetic() {
        assert_eq!(f1(0.5, 0.5), 0.5);
        assert_eq!(f1(50.0, 50.0), 50.0);
        assert!((f1(50.0, 40.0) - 400.0 / 9.0).abs() < 1e-12);
        assert_eq!(f1(0.0, 0.0), 0.0);
    }

    #[test]
    fn partial_answers() {
        // 2 correct of 4 answered of 5 total
        let answers = vec![
            answer("t0", Some("c0")),
            answer("t1", Some("c1")),
            answer("t2", Some("wrong")),
            answer("t3", Some("wrong")),
            answer("t4", None),
        ];
        let r = score(&answers, &gold(5)).unwrap();
        assert_eq!(r.overall.precision, 50.0);
        assert_eq!(r.overall.recall, 40.0);
        assert!((r.f1() - 44.44).abs() < 0.005);
        assert!(!r.precision_equals_recall);
        assert_eq!(r.by_pos["n"].answered, 4);
    }

    #[test]
    fn unanswered_gold_lowers_recall() {
        let r = score(&[answer("t0", Some("c0"))], &gold(2)).unwrap();
        assert_eq!((r.precision(), r.recall()), (100.0, 50.0));
    }

    #[test]
    fn multi_answer_gold() {
        let g = GoldStandard::parse("t0\tc0,c9\n", "gold").unwrap();
        let r = score(&[answer("t0", Some("c9"))], &g).unwrap();
        assert_eq!(r.f1(), 100.0);
    }

    #[test]
    fn unknown_instance_is_an_error() {
        assert!(matches!(
            score(&[answer("zz", Some("c0"))], &gold(1)),
            Err(Error::UnknownInstance(_))
        ));
    }

    #[test]
    fn mfs() {
        let inv = SenseInventory::parse("bank\tn\ta,b,c\nriver\tn\tr\n", "inv").unwrap();
        let players = vec![
            Occurrence::new("d", 0, "bank", "n", "t0"),
            Occurrence::new("d", 1, "river", "n", "t1"),
            Occurrence::new("d", 2, "moon", "n", "t2"),
        ];
        let answers = mfs_baseline(&players, &inv);
        assert_eq!(answers[0].concept.as_deref(), Some("a"));
        assert_eq!(answers[1].concept.as_deref(), Some("r"));
        assert_eq!(answers[2].concept, None);
        let g = GoldStandard::parse("t0\ta\nt1\tr\nt2\tm\n", "gold").unwrap();
        let r = score(&answers, &g).unwrap();
        assert_eq!(r.precision(), 100.0);
        assert!((r.recall() - 200.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn answers_file_round_trip() {
        let answers = vec![answer("t0", Some("c0")), answer("t1", None)];
        let text = format_answers(&answers);
        assert_eq!(text, "t0\tc0\n");
        let back = parse_answers(&text, "ans").unwrap();
        assert_eq!(back[0].concept.as_deref(), Some("c0"));
        assert!(parse_answers("t0\tc0\nt0\tc1\n", "ans").is_err());
        assert!(GoldStandard::parse("t0\t,\n", "gold").is_err());
    }

    #[test]
    fn report_rendering() {
        let r = score(&[answer("t0", Some("c0"))], &gold(1)).unwrap();
        let tsv = r.to_tsv();
        assert!(tsv.starts_with("scope\tanswered"));
        assert!(tsv.contains("all\t1\t1\t1\t100.0000\t100.0000\t100.0000"));
        assert!(r.to_string().contains("precision = recall"));
    }
}
