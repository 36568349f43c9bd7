#![allow(dead_code)]

use std::collections::BTreeMap;

use centered_seg::corpus::{
    parse_corpus, CfEntry, Document, Entity, EntityId, Expression, ExpressionId, ExpressionKind,
    GoldAntecedent, Utterance,
};
use centered_seg::registry::{SegmentRegistry, SegmentStatus};
use centered_seg::resolver::{is_reachable, str_equal, Locus, LocusClause};
use centered_seg::segmenter::{lift, Segmenter};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SAMPLE: &[u8] = include_bytes!("../../fixtures/sample_text.json");

pub fn sample() -> Document {
    parse_corpus(SAMPLE)
        .expect("sample fixture parses")
        .remove(0)
}

pub fn id(s: &str) -> EntityId {
    EntityId::from(s)
}

/// A small annotated document: up to `max_utts` utterances over up to
/// `max_entities` entities, with random Cf orders, mediated entries,
/// candidate sets and gold links.
pub fn random_document(seed: u64, max_utts: usize, max_entities: usize) -> Document {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_entities = rng.gen_range(1..=max_entities);
    let entities: Vec<Entity> = (0..n_entities)
        .map(|k| Entity {
            id: EntityId::from(format!("e{k}")),
            surface: format!("E{k}"),
        })
        .collect();
    let ids: Vec<EntityId> = entities.iter().map(|e| e.id.clone()).collect();
    let n_utts = rng.gen_range(1..=max_utts);
    let mut utterances: Vec<Utterance> = Vec::with_capacity(n_utts);
    for index in 1..=n_utts {
        let mut pool = ids.clone();
        pool.shuffle(&mut rng);
        pool.truncate(rng.gen_range(1..=n_entities));
        let cf: Vec<CfEntry> = pool
            .iter()
            .map(|e| {
                if rng.gen_bool(0.2) {
                    CfEntry::mediated(e.clone())
                } else {
                    CfEntry::direct(e.clone(), e.as_str().to_uppercase())
                }
            })
            .collect();
        let mut expressions = Vec::new();
        for (n, entry) in cf.iter().enumerate() {
            if !rng.gen_bool(0.6) {
                continue;
            }
            let kind = *[
                ExpressionKind::PronominalAnaphor,
                ExpressionKind::NominalAnaphor,
                ExpressionKind::TextualEllipsis,
                ExpressionKind::NonAnaphoric,
            ]
            .choose(&mut rng)
            .unwrap();
            let mut candidates: Vec<EntityId> =
                ids.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
            if rng.gen_bool(0.8) && !candidates.contains(&entry.entity) {
                candidates.push(entry.entity.clone());
            }
            if candidates.is_empty() {
                candidates.push(entry.entity.clone());
            }
            let gold = if !kind.is_anaphoric() || rng.gen_bool(0.1) {
                None
            } else if rng.gen_bool(0.05) {
                Some(GoldAntecedent {
                    entity: entry.entity.clone(),
                    utterance: index,
                })
            } else {
                utterances
                    .iter()
                    .rev()
                    .find(|u| u.cf.iter().any(|c| c.entity == entry.entity))
                    .map(|u| GoldAntecedent {
                        entity: entry.entity.clone(),
                        utterance: u.index,
                    })
            };
            expressions.push(Expression {
                id: ExpressionId::from(format!("u{index}.{}", n + 1).as_str()),
                surface: format!("x{}", n + 1),
                kind,
                candidates,
                gold,
            });
        }
        utterances.push(Utterance {
            index,
            text: None,
            word_count: rng.gen_range(1..20),
            cf,
            expressions,
        });
    }
    Document {
        id: format!("random-{seed}"),
        entities,
        utterances,
    }
}

/// Reachability read straight off the archive: only open segments count,
/// clauses tried in order, clause 3 takes the highest qualifying level.
pub fn oracle_reachable(
    doc: &Document,
    reg: &SegmentRegistry,
    ante: &EntityId,
    s: usize,
    i: usize,
) -> Locus {
    let open = |level: usize| {
        reg.archive()
            .iter()
            .find(|seg| seg.level == level && seg.status == SegmentStatus::Open)
    };
    let found = |clause, level, utterance, rank| Locus {
        clause,
        level: Some(level),
        utterance: Some(utterance),
        rank: Some(rank),
    };
    let cf = |u: usize| &doc.utterances[u - 1].cf;

    if i >= 2 {
        if let Some(seg) = open(s).filter(|seg| seg.beg < i && i - 1 <= seg.end) {
            if let Some(p) = cf(i - 1).iter().position(|e| &e.entity == ante) {
                return found(LocusClause::PrevCf, s, seg.end, p + 1);
            }
        }
    }
    if s >= 2 {
        if let Some(seg) = open(s - 1) {
            if let Some(p) = cf(seg.end).iter().position(|e| &e.entity == ante) {
                return found(LocusClause::PrevSegEndCf, s - 1, seg.end, p + 1);
            }
        }
    }
    let qualifies = |v: usize| open(v).filter(|seg| str_equal(ante, &cf(seg.end)[0]));
    let mut best = None;
    for v in 1..s.saturating_sub(1) {
        if let Some(seg) = qualifies(v) {
            let dominated = (v + 1..s - 1).any(|w| qualifies(w).is_some());
            if !dominated {
                best = Some(found(LocusClause::SegEndCp, v, seg.end, 1));
            }
        }
    }
    best.unwrap_or_else(Locus::unreachable)
}

/// Steps through `doc`, comparing the resolver with the oracle for every
/// entity and every level up to the current one before each utterance.
/// Returns how often each clause was the answer, and any disagreements.
pub fn reachability_disagreements(doc: &Document) -> (BTreeMap<LocusClause, usize>, Vec<String>) {
    let mut seg = Segmenter::new(doc).expect("random documents are well formed");
    let mut checks = BTreeMap::new();
    let mut bad = Vec::new();
    while let Some(next) = seg.next_utterance() {
        let reg = seg.registry();
        for s in 1..=reg.current_level() + 1 {
            for e in &doc.entities {
                let got = is_reachable(doc, reg, &e.id, s, next.index);
                let want = oracle_reachable(doc, reg, &e.id, s, next.index);
                *checks.entry(want.clause).or_insert(0) += 1;
                if got != want {
                    bad.push(format!(
                        "{} U{} s={s} {}: got {got:?}, oracle {want:?}",
                        doc.id, next.index, e.id
                    ));
                }
            }
        }
        seg.advance().expect("step succeeds");
    }
    (checks, bad)
}

/// Registry checks after every step: structural invariants, current
/// segment ends at the new utterance, and segments that left the stack
/// never change again.
pub fn registry_violations(doc: &Document) -> Vec<String> {
    let mut seg = Segmenter::new(doc).expect("random documents are well formed");
    let mut bad = Vec::new();
    let mut before = seg.registry().archive().to_vec();
    loop {
        let reg = seg.registry();
        let i = reg.last_utterance();
        if let Err(e) = reg.check_invariants(i) {
            bad.push(format!("{} U{i}: {e}", doc.id));
        }
        if reg.open_end(reg.current_level()) != Some(i) {
            bad.push(format!(
                "{} U{i}: current segment does not end here",
                doc.id
            ));
        }
        let now = reg.archive();
        if now.len() < before.len() {
            bad.push(format!("{} U{i}: archive shrank", doc.id));
        }
        for (old, new) in before.iter().zip(now) {
            let ok = match old.status {
                SegmentStatus::Open => {
                    new.level == old.level && new.beg == old.beg && new.end >= old.end
                }
                _ => old == new,
            };
            if !ok {
                bad.push(format!(
                    "{} U{i}: {old} {:?} became {new} {:?}",
                    doc.id, old.status, new.status
                ));
            }
        }
        before = now.to_vec();
        match seg.advance() {
            Ok(Some(_)) => {}
            Ok(None) => break,
            Err(e) => {
                bad.push(format!("{}: {e}", doc.id));
                break;
            }
        }
    }
    bad
}

/// Lift checks at every intermediate state for every level on the stack.
pub fn lift_violations(doc: &Document) -> Vec<String> {
    let mut seg = Segmenter::new(doc).expect("random documents are well formed");
    let mut bad = Vec::new();
    while let Some(next) = seg.next_utterance() {
        let reg = seg.registry();
        let i = next.index;
        for s in 1..=reg.current_level() {
            let out = lift(doc, reg, s, i);
            if (s <= 2 || i <= 3) && out.level != s {
                bad.push(format!(
                    "{} lift({s},{i}) = {} should be identity",
                    doc.id, out.level
                ));
            }
            if out.depth() > s.saturating_sub(2) || out.level != s - out.depth() {
                bad.push(format!(
                    "{} lift({s},{i}) recursed {} times",
                    doc.id,
                    out.depth()
                ));
            }
        }
        seg.advance().expect("step succeeds");
    }
    bad
}
