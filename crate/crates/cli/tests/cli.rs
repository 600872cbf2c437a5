use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use tangleforge_cli::{run, Report, Status};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn fixtures() -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

fn go(args: &[&str]) -> (i32, Report) {
    run(std::iter::once("tangleforge").chain(args.iter().copied()))
}

fn code_for(s: Status) -> i32 {
    match s {
        Status::Ok => 0,
        Status::Fail => 1,
        Status::Unknown => 3,
    }
}

#[test]
fn verify_the_running_example() {
    let (code, r) = go(&["verify", &fixture("rp2cp2.hom")]);
    assert_eq!(code, 0, "{:?}", r.diagnostics);
    let c = &r.payload["conditions"];
    assert!(["surjective", "cond1", "cond2"].iter().all(|k| c[k] == Value::Bool(true)));
    assert_eq!(r.payload["f"]["p3"], "t1^-1");
    let (code, _) = go(&["verify", &fixture("poincare.hom")]);
    assert_eq!(code, 0);
}

#[test]
fn roundtrip_reports_equality() {
    let (code, r) = go(&["roundtrip", &fixture("rp2cp2.hom")]);
    assert_eq!(code, 0);
    assert_eq!(r.diagnostics, vec!["readoff equals input".to_string()]);
}

#[test]
fn invariants_of_the_minus_two_tuple() {
    let (code, r) = go(&["invariants", &fixture("rp2_minus.tuple")]);
    assert_eq!(code, 0);
    let p = &r.payload;
    assert_eq!((p["components"]["12"].as_u64(), p["components"]["23"].as_u64(), p["components"]["31"].as_u64()), (Some(1), Some(1), Some(1)));
    assert_eq!(p["euler_characteristic"], 1);
    assert_eq!(p["spherical"], false);
}

#[test]
fn exit_codes_follow_status_on_every_fixture() {
    for name in fixtures() {
        let path = fixture(&name);
        let verbs: &[&str] = if name.ends_with(".tuple") {
            &["verify", "invariants", "pushout"]
        } else {
            &["verify", "realize", "roundtrip", "fold"]
        };
        for verb in verbs {
            let (code, r) = go(&[verb, &path]);
            assert_eq!(code, code_for(r.status), "{verb} {name}: {:?}", r.diagnostics);
        }
    }
}

#[test]
fn membership_verdicts_map_to_exit_codes() {
    assert_eq!(go(&["verify", &fixture("trisection_s4_g3.tuple")]).0, 0);
    assert_eq!(go(&["verify", &fixture("torsion_triple.tuple")]).0, 1);
    let (code, r) = go(&["verify", &fixture("rp2_minus.tuple"), "--budget", "0"]);
    assert_eq!(code, 3, "{:?}", r.payload);
    assert_eq!(r.status, Status::Unknown);
}

#[test]
fn parse_errors_carry_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.hom");
    std::fs::write(&bad, "genus = 1\nbridges = 0\na1 -> h1 x7\nb1 -> e\n").unwrap();
    let (code, r) = go(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(r.diagnostics[0].contains("line 3"), "{:?}", r.diagnostics);
    let (code, _) = go(&["verify", "/definitely/missing.hom"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors() {
    assert_eq!(go(&["frobnicate", &fixture("rp2cp2.hom")]).0, 2);
    assert_eq!(go(&["verify"]).0, 2);
    assert_eq!(go(&["move", &fixture("unknot_pair.tuple")]).0, 2);
    assert_eq!(go(&["move", &fixture("unknot_pair.tuple"), "--kind", "sb1", "--side", "3"]).0, 2);
    assert_eq!(go(&["pushout", &fixture("rp2_minus.tuple"), "--pair", "1"]).0, 2);
    assert_eq!(go(&["realize", &fixture("rp2_minus.tuple")]).0, 2);
}

#[test]
fn semantic_failures_exit_one() {
    // Heegaard stabilization needs a closed pair.
    let (code, r) = go(&["move", &fixture("unknot_pair.tuple"), "--kind", "s"]);
    assert_eq!(code, 1);
    assert!(!r.diagnostics.is_empty());
    let (code, _) = go(&["move", &fixture("unknot_pair.tuple"), "--kind", "c"]);
    assert_eq!(code, 1);
}

#[test]
fn realize_then_readoff_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("d.json");
    let svg = dir.path().join("d.svg");
    let hom = dir.path().join("back.hom");
    let (code, r) = go(&[
        "realize",
        &fixture("rp2cp2.hom"),
        "--out",
        json.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(r.payload["census"]["closed"], 1);
    assert_eq!(r.payload["census"]["arcs"], 2);
    let (code, _) = go(&["readoff", json.to_str().unwrap(), "--out", hom.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(
        std::fs::read_to_string(&hom).unwrap(),
        std::fs::read_to_string(fixture("rp2cp2.hom")).unwrap()
    );
    let s = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(s.matches("<g class=\"closed\"").count(), 1);
    assert_eq!(s.matches("<g class=\"arc\"").count(), 2);
    assert_eq!(s.matches("<g class=\"band\"").count(), 1);
}

#[test]
fn render_poincare() {
    let (code, r) = go(&["render", &fixture("poincare.hom")]);
    assert_eq!(code, 0);
    let s = r.payload["svg"].as_str().unwrap();
    assert_eq!(s.matches("<g class=\"closed\"").count(), 2);
    assert_eq!(s.matches("<g class=\"arc\"").count(), 0);
}

#[test]
fn moves_emit_parseable_tuples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.tuple");
    let cases: &[&[&str]] = &[
        &["move", "unknot_pair.tuple", "--kind", "sb1", "--side", "2"],
        &["move", "unknotted_sphere.tuple", "--kind", "sb2", "--color", "3"],
        &["move", "rp2_minus.tuple", "--kind", "sg"],
        &["move", "rp2_plus.tuple", "--kind", "c"],
        &["move", "genus2_pair.tuple", "--kind", "s"],
    ];
    for case in cases {
        let mut args: Vec<String> = case.iter().map(|s| s.to_string()).collect();
        args[1] = fixture(case[1]);
        args.extend(["--out".into(), out.display().to_string()]);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, r) = go(&refs);
        assert_eq!(code, 0, "{case:?}: {:?}", r.diagnostics);
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(r.payload["tuple"], text.as_str());
        assert_eq!(go(&["verify", out.to_str().unwrap()]).0, 0, "{case:?}");
    }
}

#[test]
fn automorphism_moves_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let swap = dir.path().join("swap.aut");
    std::fs::write(&swap, "# swap the handles\n[forward]\nh1 -> h2\nh2 -> h1\n[inverse]\nh1 -> h2\nh2 -> h1\n").unwrap();
    let (code, r) = go(&["move", &fixture("genus2_pair.tuple"), swap.to_str().unwrap(), "--kind", "h", "--pair", "1"]);
    assert_eq!(code, 0, "{:?}", r.diagnostics);

    let ident = dir.path().join("id.aut");
    std::fs::write(&ident, "[forward]\np1 -> p1\np2 -> p2\n[inverse]\np1 -> p1\np2 -> p2\n").unwrap();
    let (code, r) = go(&["move", &fixture("unknot_pair.tuple"), ident.to_str().unwrap(), "--kind", "m"]);
    assert_eq!(code, 0, "{:?}", r.diagnostics);
    assert_eq!(r.payload["tuple"], std::fs::read_to_string(fixture("unknot_pair.tuple")).unwrap().as_str());

    let (code, _) = go(&["move", &fixture("genus2_pair.tuple"), swap.to_str().unwrap(), "--kind", "h"]);
    assert_eq!(code, 2);
    let half = dir.path().join("half.aut");
    std::fs::write(&half, "[forward]\nh1 -> h2\n").unwrap();
    let (code, _) = go(&["move", &fixture("genus2_pair.tuple"), half.to_str().unwrap(), "--kind", "h", "--pair", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn fold_word_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.words");
    std::fs::write(&good, "h1 h2\nh2\n").unwrap();
    let (code, r) = go(&["fold", good.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r.payload["confluent"], true);
    let bad = dir.path().join("bad.words");
    std::fs::write(&bad, "h1^2\nh2\n").unwrap();
    assert_eq!(go(&["fold", bad.to_str().unwrap()]).0, 1);
    std::fs::write(&bad, "h1 q2\n").unwrap();
    assert_eq!(go(&["fold", bad.to_str().unwrap()]).0, 2);
}

#[test]
fn pushout_of_a_pair() {
    let (code, r) = go(&["pushout", &fixture("rp2_minus.tuple"), "--pair", "1,2"]);
    assert_eq!(code, 0);
    assert_eq!(r.payload["simplified"], "<t1_1 | >");
    let (_, r) = go(&["pushout", &fixture("lens_rp3.tuple")]);
    assert_eq!(r.payload["abelianization"], "Z/2");
}

#[test]
fn binary_output_is_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_tangleforge");
    for args in [
        vec!["realize".to_string(), fixture("rp2cp2.hom")],
        vec!["verify".to_string(), fixture("rp2_minus.tuple"), fixture("poincare.hom")],
        vec!["render".to_string(), fixture("band_example.hom")],
    ] {
        let a = Command::new(bin).args(&args).output().unwrap();
        let b = Command::new(bin).args(&args).output().unwrap();
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
        let r: Value = serde_json::from_slice(&a.stdout).unwrap();
        assert_eq!(r["status"], "ok");
    }
    let bad = Command::new(bin).args(["verify", "/no/such/file"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
