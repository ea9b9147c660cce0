//! Session lifecycle over every backend.

mod common;

use catt_core::manager::Operation;
use catt_core::{AttestationSession, Component, Error, Mutation, SchemeId};
use common::{backend, random_component, random_components, rng};
use rand::Rng;

fn session(scheme: SchemeId, cs: &[Component]) -> AttestationSession {
    AttestationSession::create(backend(scheme), cs).unwrap()
}

#[test]
fn continuity_over_random_operations() {
    for scheme in SchemeId::ALL {
        let mut r = rng(50);
        let initial = random_components(&mut r, 5);
        let mut s = session(scheme, &initial);
        let mut live: Vec<Component> = initial.clone();
        let mut expected_revision = 0;
        for _ in 0..100 {
            let outcome = if r.gen_bool(0.6) || live.is_empty() {
                let c = random_component(&mut r);
                live.push(c.clone());
                s.add_component(&c).unwrap()
            } else {
                let i = r.gen_range(0..live.len());
                let payload: Vec<u8> = (0..8).map(|_| r.gen()).collect();
                let c = Component::new(live[i].id(), payload).unwrap();
                live[i] = c.clone();
                s.update_component(&c).unwrap()
            };
            expected_revision += 1;
            assert_eq!(
                outcome,
                Mutation::Applied {
                    revision: expected_revision
                }
            );
            assert!(s.verify(), "{scheme} at revision {expected_revision}");
            assert_eq!(s.log().len() as u64, s.revision());
        }
        let current: catt_core::DigestSet = live.iter().map(Component::digest).collect();
        assert_eq!(s.digests(), current);
        assert_eq!(s.replay().unwrap(), *s.proof(), "{scheme} replay");
        assert_eq!(
            s.proof(),
            &s.backend().attest(&current).unwrap(),
            "{scheme} batch"
        );
    }
}

#[test]
fn log_records_each_change() {
    let mut r = rng(51);
    let a = random_component(&mut r);
    let mut s = session(SchemeId::Merkle, std::slice::from_ref(&a));
    let b = random_component(&mut r);
    s.add_component(&b).unwrap();
    let a2 = Component::new(a.id(), b"new".to_vec()).unwrap();
    s.update_component(&a2).unwrap();
    let log = s.log();
    assert_eq!(log.len(), 2);
    assert_eq!(
        (log[0].revision, log[0].operation, log[0].prior),
        (1, Operation::Add, None)
    );
    assert_eq!(log[1].operation, Operation::Update);
    assert_eq!(log[1].prior, Some(a.digest()));
    assert_eq!(log[1].digest, a2.digest());
}

#[test]
fn duplicates_noops_and_conflicts() {
    for scheme in SchemeId::ALL {
        let mut r = rng(52);
        let cs = random_components(&mut r, 3);
        let mut s = session(scheme, &cs);
        let before = s.clone();
        assert_eq!(s.add_component(&cs[0]).unwrap(), Mutation::NoOp);
        assert_eq!(s.update_component(&cs[1]).unwrap(), Mutation::NoOp);
        assert_eq!(s, before);
        let clash = Component::new(cs[0].id(), b"other".to_vec()).unwrap();
        assert!(matches!(s.add_component(&clash), Err(Error::IdConflict(_))));
        let unknown = random_component(&mut r);
        assert!(matches!(
            s.update_component(&unknown),
            Err(Error::NotFound(_))
        ));
        assert_eq!(s, before);
        let dup = [cs[0].clone(), clash];
        assert!(matches!(
            AttestationSession::create(backend(scheme), &dup),
            Err(Error::IdConflict(_))
        ));
    }
}

#[test]
fn composition_is_transitive_and_keeps_witnesses() {
    for scheme in SchemeId::ALL {
        let mut r = rng(53);
        let parts: Vec<Vec<Component>> = (0..4).map(|_| random_components(&mut r, 3)).collect();
        let sessions: Vec<_> = parts.iter().map(|cs| session(scheme, cs)).collect();
        let ab = AttestationSession::compose(&sessions[0], &sessions[1]).unwrap();
        let cd = AttestationSession::compose(&sessions[2], &sessions[3]).unwrap();
        let all = AttestationSession::compose(&ab, &cd).unwrap();
        let left = AttestationSession::compose(
            &AttestationSession::compose(&ab, &sessions[2]).unwrap(),
            &sessions[3],
        )
        .unwrap();
        assert!(all.verify());
        assert_eq!(all.proof(), left.proof(), "{scheme}");
        assert_eq!(all.revision(), 0);
        assert_eq!(all.parents().len(), 2);
        assert!(all.log().is_empty());
        let b = all.backend();
        for c in parts.iter().flatten() {
            let w = b.witness(all.proof(), &c.digest()).unwrap();
            assert!(b.check_witness(all.proof(), &w), "{scheme}");
        }
        assert_eq!(all.registry().len(), 12);
    }
}

#[test]
fn composition_rejects_foreign_domains_and_id_clashes() {
    let mut r = rng(54);
    let cs = random_components(&mut r, 2);
    let merkle = session(SchemeId::Merkle, &cs);
    let acc = session(SchemeId::Accumulator, &cs);
    assert!(matches!(
        AttestationSession::compose(&merkle, &acc),
        Err(Error::DomainMismatch(_))
    ));

    let other_params = catt_core::AccumulatorParams::setup(b"another domain", 512).unwrap();
    let foreign = AttestationSession::create(
        catt_core::Backend::new(
            SchemeId::Accumulator,
            &catt_core::DomainMaterial::none().with_params(other_params),
        )
        .unwrap(),
        &cs,
    )
    .unwrap();
    assert!(matches!(
        AttestationSession::compose(&acc, &foreign),
        Err(Error::DomainMismatch(_))
    ));

    let clash = [Component::new(cs[0].id(), b"different".to_vec()).unwrap()];
    let other = session(SchemeId::Merkle, &clash);
    assert!(matches!(
        AttestationSession::compose(&merkle, &other),
        Err(Error::IdConflict(_))
    ));
}

#[test]
fn persistence_is_deterministic() {
    for scheme in SchemeId::ALL {
        let mut r = rng(55);
        let mut s = session(scheme, &random_components(&mut r, 4));
        for c in random_components(&mut r, 3) {
            s.add_component(&c).unwrap();
        }
        let bytes = s.to_bytes();
        let back = AttestationSession::from_bytes(&bytes, backend(scheme)).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_bytes(), bytes);
        assert!(back.verify());
        let composed = AttestationSession::compose(&s, &back).unwrap();
        let bytes = composed.to_bytes();
        assert_eq!(
            AttestationSession::from_bytes(&bytes, backend(scheme)).unwrap(),
            composed
        );
        let mut truncated = bytes.clone();
        truncated.pop();
        assert!(AttestationSession::from_bytes(&truncated, backend(scheme)).is_err());
    }
}

#[test]
fn tampered_registry_makes_report_invalid() {
    for scheme in SchemeId::ALL {
        let mut r = rng(56);
        let s = session(scheme, &random_components(&mut r, 3));
        let report = s.report();
        assert!(report.overall_valid);
        assert_eq!(report.component_count(), 3);
        assert!(report.to_string().contains("overall: VALID"));
        // Replace the stored proof with one over a different set.
        let other = session(scheme, &random_components(&mut r, 3));
        let mut bytes = s.to_bytes();
        let (pa, pb) = (s.proof().to_bytes(), other.proof().to_bytes());
        let at = bytes
            .windows(pa.len())
            .position(|w| w == pa.as_slice())
            .unwrap();
        if pa.len() == pb.len() {
            bytes[at..at + pa.len()].copy_from_slice(&pb);
            let t = AttestationSession::from_bytes(&bytes, backend(scheme)).unwrap();
            assert!(!t.verify());
            let report = t.report();
            assert!(!report.overall_valid);
            assert!(report.to_string().contains("overall: INVALID"));
        }
    }
}
