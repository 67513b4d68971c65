//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use blf::diagram::BlfDiagram;
use blf::format;
use blf::generate::{two_region, trivial_bundle, Generator};
use blf::ids::{ComponentId, FaceId, PointId};
use blf::mcg::{
    compose_word, round_handle_check, Handedness, HomologyClass, SquareMatrix, TwistWord,
};
use blf::moves;

fn check(name: &str, f: impl FnOnce() + UnwindSafe) {
    match catch_unwind(f) {
        Ok(()) => println!("PASS: {}", name),
        Err(e) => {
            println!("FAIL: {}", name);
            resume_unwind(e);
        }
    }
}

fn diagram_path(name: &str) -> String {
    format!("{}/diagrams/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn load(name: &str) -> BlfDiagram {
    let text = std::fs::read_to_string(diagram_path(name)).unwrap();
    format::parse(&text).unwrap()
}

#[test]
fn criterion_1_cp2_example() {
    check("cp2 diagram: euler 3, three lefschetz points, fibers of genus 2/1/0", || {
        let d = load("cp2.blf");
        assert!(d.validate().ok());
        assert_eq!(d.euler_characteristic().unwrap(), 3);
        assert_eq!(d.lefschetz_count(), 3);
        let genus = |f: &str| {
            d.faces[&FaceId::from(f)]
                .genus_of(&ComponentId::from("c0"))
                .unwrap()
        };
        assert_eq!(genus("outer"), 2);
        assert_eq!(genus("mid"), 1);
        assert_eq!(genus("inner"), 0);
    });
}

#[test]
fn criterion_2_monodromy_oracle() {
    check("twist word oracle [[1,9],[0,1]]; (1,0) fixed, (0,1) not", || {
        let cls = |a: i64, b: i64| HomologyClass::new(vec![a, b]).unwrap();
        let word = TwistWord::new(vec![
            (cls(1, 1), Handedness::Right),
            (cls(-1, 2), Handedness::Right),
            (cls(2, -1), Handedness::Right),
        ])
        .unwrap();
        let m = compose_word(&word);
        assert_eq!(m, SquareMatrix::from_rows(&[&[1, 9], &[0, 1]]));
        assert!(round_handle_check(&word, &cls(1, 0)).unwrap());
        assert!(!round_handle_check(&word, &cls(0, 1)).unwrap());
    });
}

#[test]
fn criterion_3_euler_baselines() {
    check("euler: s4 diagram gives 2; trivial genus-g bundles give 2(2-2g)", || {
        let d = load("s4.blf");
        assert_eq!(d.euler_characteristic().unwrap(), 2);
        for g in 0..=5u32 {
            let b = trivial_bundle(g);
            assert!(b.validate().ok());
            assert_eq!(
                b.euler_characteristic().unwrap(),
                2 * (2 - 2 * g as i64)
            );
        }
    });
}

#[test]
fn criterion_4_generated_diagrams_parity() {
    check("1000 generated diagrams validate and satisfy the parity constraint", || {
        let mut gen = Generator::new(0xb1f);
        for _ in 0..1000 {
            let d = gen.diagram();
            let report = d.validate();
            assert!(report.ok(), "{}", report);
            assert!(d.parity_check().unwrap());
        }
    });
}

#[test]
fn criterion_5_moves_preserve_invariants() {
    check("each move: 500 instances preserve euler and validity; slide/r2 round-trips", || {
        let mut gen = Generator::new(0x5eed);
        // slide + r2 (and slip as their composite).
        for i in 0..500u32 {
            let (d, s, t) = gen.slide_instance(1 + i % 5, i % 2 == 1);
            assert!(d.validate().ok());
            let e = d.euler_characteristic().unwrap();
            let slid = moves::slide_arc(&d, &s, std::slice::from_ref(&t)).unwrap();
            assert!(slid.validate().ok());
            assert_eq!(slid.euler_characteristic().unwrap(), e);
            let lens = FaceId(format!("{}+{}", s, t));
            let back = moves::r2_remove(&slid, &lens).unwrap();
            assert_eq!(back, d);
            let steps = vec![
                moves::MoveCmd::Slide { arc: s.clone(), over: vec![t.clone()] },
                moves::MoveCmd::R2(lens),
            ];
            assert_eq!(moves::slip(&d, &steps).unwrap(), d);
        }
        // push_lefschetz.
        for i in 0..500u32 {
            let (d, p, z, comp, lift) = gen.push_instance(1 + i % 7);
            let e = d.euler_characteristic().unwrap();
            let pushed = moves::push_lefschetz(&d, &p, &z, &comp, lift).unwrap();
            assert!(pushed.validate().ok());
            assert_eq!(pushed.euler_characteristic().unwrap(), e);
        }
        // cusp_modify.
        for i in 0..500u32 {
            let (d, v, face) = gen.cusp_instance(i % 6);
            let e = d.euler_characteristic().unwrap();
            let g = d.faces[&face].genus_of(&ComponentId::from("c0")).unwrap();
            let traded =
                moves::cusp_modify(&d, &v, &face, vec![1; 2 * g as usize]).unwrap();
            assert!(traded.validate().ok());
            assert_eq!(traded.euler_characteristic().unwrap(), e);
            assert_eq!(traded.cusp_count(), d.cusp_count() - 1);
            assert_eq!(traded.lefschetz_count(), d.lefschetz_count() + 1);
        }
        // flip.
        for i in 0..500u32 {
            let (d, z, surgery, cycles) = gen.flip_instance(i % 4);
            let e = d.euler_characteristic().unwrap();
            let flipped = moves::flip(&d, &z, &surgery, &cycles).unwrap();
            assert!(flipped.validate().ok());
            assert_eq!(flipped.euler_characteristic().unwrap(), e);
        }
        // connect_fibers.
        for i in 0..500u32 {
            let (g1, g2) = (i % 10, i / 50);
            let d = two_region(g1, g2);
            let e = d.euler_characteristic().unwrap();
            let out = moves::connect_fibers(&d).unwrap();
            assert!(out.validate().ok());
            assert_eq!(out.euler_characteristic().unwrap(), e);
        }
        // blow_up / blow_down.
        for i in 0..500u32 {
            let mut d = two_region(i % 3, i % 4);
            d.basepoints = 1 + i % 9;
            let up = moves::blow_up(&d).unwrap();
            assert!(up.validate().ok());
            assert_eq!(moves::blow_down(&up).unwrap(), d);
        }
    });
}

#[test]
fn criterion_6_connect_fibers() {
    check("connect_fibers on (g1,g2) in {(0,0),(1,0),(1,2)}", || {
        for (g1, g2) in [(0u32, 0u32), (1, 0), (1, 2)] {
            let d = two_region(g1, g2);
            let g = g1 + g2;
            let out = moves::connect_fibers(&d).unwrap();
            assert!(out.validate().ok());
            assert!(out.connectivity_report().unwrap().all_connected);
            assert_eq!(
                out.faces[&FaceId::from("inner")].genus_of(&ComponentId::from("c0")),
                Some(g + 1)
            );
            assert_eq!(out.lefschetz_count(), 4);
            assert_eq!(out.euler_characteristic().unwrap(), 6 - 4 * g as i64);
        }
    });
}

#[test]
fn criterion_7_cusp_trade() {
    check("cusp_modify: cusps 1 -> 0, lefschetz +1, euler unchanged", || {
        let mut gen = Generator::new(7);
        let (d, v, face) = gen.cusp_instance(1);
        assert_eq!(d.cusp_count(), 1);
        let e = d.euler_characteristic().unwrap();
        let traded = moves::cusp_modify(&d, &v, &face, vec![1, 0, 0, 0]).unwrap();
        assert_eq!(traded.cusp_count(), 0);
        assert_eq!(traded.lefschetz_count(), 1);
        assert_eq!(traded.euler_characteristic().unwrap(), e);
        // The traded move names the new point after the cusp.
        assert!(traded.lefschetz.contains_key(&PointId::from(format!("{}#p", v))));
    });
}

#[test]
fn criterion_8_blow_up_down() {
    check("blow_up/blow_down round-trip; euler offset +m for m in {1,2,5}", || {
        for m in [1u32, 2, 5] {
            let text = std::fs::read_to_string(diagram_path("s4.blf")).unwrap();
            let mut d = format::parse(&text).unwrap();
            d.basepoints = m;
            assert!(d.euler_characteristic().is_err());
            let up = moves::blow_up(&d).unwrap();
            assert_eq!(up.sections, m);
            // Blowing up m base points adds m to the total-space euler
            // characteristic; the fibration side is the known e = 2.
            assert_eq!(up.euler_characteristic().unwrap() - m as i64, 2 - m as i64);
            assert_eq!(moves::blow_down(&up).unwrap(), d);
        }
        assert!(matches!(
            moves::blow_up(&load("s4.blf")),
            Err(moves::MoveError::NotAPencil)
        ));
        assert!(matches!(
            moves::blow_down(&load("s4.blf")),
            Err(moves::MoveError::NoSections)
        ));
    });
}

#[test]
fn criterion_9_format_roundtrip_and_fuzz() {
    check("canonical round-trip byte-identical; 10^4 mutated inputs parse safely", || {
        let mut corpus = Vec::new();
        for name in ["cp2.blf", "s4.blf", "torus_bundle.blf", "split_fiber.blf", "pencil.blf"]
        {
            let text = std::fs::read_to_string(diagram_path(name)).unwrap();
            let d = format::parse(&text).unwrap();
            assert_eq!(format::serialize(&d), text, "{} is not canonical", name);
            assert_eq!(format::parse(&format::serialize(&d)).unwrap(), d);
            corpus.push(text);
        }
        let mut rng = StdRng::seed_from_u64(0xf022);
        for _ in 0..10_000 {
            let mut bytes = corpus[rng.gen_range(0..corpus.len())].clone().into_bytes();
            for _ in 0..rng.gen_range(1..=8) {
                match rng.gen_range(0..4) {
                    0 if !bytes.is_empty() => {
                        let i = rng.gen_range(0..bytes.len());
                        bytes[i] = rng.gen_range(0x20..0x7f);
                    }
                    1 if !bytes.is_empty() => {
                        bytes.truncate(rng.gen_range(0..bytes.len()));
                    }
                    2 => {
                        let i = rng.gen_range(0..=bytes.len());
                        bytes.insert(i, rng.gen_range(0x20..0x7f));
                    }
                    _ if !bytes.is_empty() => {
                        bytes.swap_remove(rng.gen_range(0..bytes.len()));
                    }
                    _ => {}
                }
            }
            let text = String::from_utf8_lossy(&bytes).into_owned();
            // Must never panic; on success the result must re-serialize.
            if let Ok(d) = format::parse(&text) {
                let _ = d.validate();
                assert_eq!(format::parse(&format::serialize(&d)).unwrap(), d);
            }
        }
    });
}
