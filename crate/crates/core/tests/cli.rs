use std::process::Command;

use serde_json::Value;

use divcong::cli::run;
use divcong::eisenstein::{eisenstein_gamma3_odd, eisenstein_level1, normalized_tail};
use divcong::numtheory::int;
use divcong::{ModForm, QSeries};

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str], stdin: &str) -> Out {
    let mut argv = vec!["divcong"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Out { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("bad JSON ({e}): {s}"))
}

fn error_kind(o: &Out) -> String {
    assert_eq!(o.code, 2, "stdout: {}", o.stdout);
    let v = json(&o.stderr);
    assert_eq!(v["schema"], 1);
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn eis_gamma3_e1() {
    let o = cli(&["eis", "--kind", "gamma3", "--k", "1", "--order", "5"], "");
    assert_eq!(o.code, 0);
    let v = json(&o.stdout);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "eis");
    let f = QSeries::from_json(&v["series"]).unwrap();
    assert_eq!(f.order(), 5);
    let got: Vec<String> = f.coeffs().iter().map(|c| c.to_string()).collect();
    assert_eq!(got, ["1", "6", "0", "6", "6", "0"]);
}

#[test]
fn eis_text_and_bad_weight() {
    let o = cli(&["eis", "--kind", "level1", "--k", "4", "--order", "3", "--output", "text"], "");
    assert_eq!(o.stdout.trim(), "1 + 240 q + 2160 q^2 + 6720 q^3 + O(q^4)");
    assert_eq!(error_kind(&cli(&["eis", "--kind", "level1", "--k", "5"], "")), "invalid_argument");
}

#[test]
fn genus_lists_coefficients_and_todd() {
    let o = cli(&["genus", "--degree", "4"], "");
    assert_eq!(o.code, 0);
    let v = json(&o.stdout);
    let coeffs = v["coeffs"].as_array().unwrap();
    assert_eq!(coeffs.len(), 5);
    assert_eq!(coeffs[4]["todd"], serde_json::json!([-1, 720]));
    assert_eq!(error_kind(&cli(&["genus", "--degree", "1"], "")), "invalid_argument");
}

#[test]
fn fit_reads_stdin() {
    let e4 = eisenstein_level1(4, 20).unwrap();
    let o = cli(&["fit", "--weight", "4"], &e4.to_json().to_string());
    assert_eq!(o.code, 0, "{}", o.stderr);
    let m = ModForm::from_json(&json(&o.stdout)["form"]).unwrap();
    assert_eq!(m.to_string(), "9 E1^4 - 8 E1 E3");
    let o = cli(&["fit", "--weight", "5"], &e4.to_json().to_string());
    assert_eq!(error_kind(&o), "no_fit");
    assert_eq!(error_kind(&cli(&["fit", "--weight", "4"], "{not json")), "parse");
}

#[test]
fn trivial_exit_codes() {
    let e4 = eisenstein_level1(4, 50).unwrap();
    let trivial = normalized_tail(&e4, &int(960));
    let o = cli(&["trivial", "--weight", "6"], &trivial.to_json().to_string());
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(json(&o.stdout)["verdict"]["kind"], "trivial_to_order");
    // (E1^2 - 1)/144, the raw f(nu^2)
    let e1 = eisenstein_gamma3_odd(1, 50).unwrap();
    let nontrivial = normalized_tail(&(&e1 * &e1), &int(144));
    let o = cli(&["trivial", "--weight", "4"], &nontrivial.to_json().to_string());
    assert_eq!(o.code, 1);
    assert_eq!(json(&o.stdout)["verdict"]["kind"], "nontrivial");
    let short = normalized_tail(&e4, &int(960)).truncate(8);
    let o = cli(&["trivial", "--weight", "6"], &short.to_json().to_string());
    assert_eq!(error_kind(&o), "insufficient_order");
}

#[test]
fn f_product_eta_sigma() {
    let o = cli(&["f-product", "--y1", "eta", "--y2", "sigma", "--order", "12"], "");
    assert_eq!(o.code, 1);
    let v = json(&o.stdout);
    assert_eq!(v["weight"], 5);
    assert_eq!(v["verdict"]["kind"], "nontrivial");
    assert!(v["note"].as_str().unwrap().contains("sign"));
    assert_eq!(QSeries::from_json(&v["series"]).unwrap().order(), 12);
    let o = cli(&["f-product", "--y1", "nu", "--y2", "eta"], "");
    assert_eq!(o.code, 0);
    assert_eq!(error_kind(&cli(&["f-product", "--y1", "kappa", "--y2", "eta"], "")), "unknown_element");
}

#[test]
fn f_transfer_inputs() {
    assert_eq!(cli(&["f-transfer", "--n", "2", "--inter", "[0, 1, 0]"], "").code, 1);
    assert_eq!(cli(&["f-transfer", "--n", "2", "--inter", "{\"0\": 0, \"1\": 2, \"2\": 0}"], "").code, 0);
    assert_eq!(cli(&["f-transfer", "--n", "3", "--inter", "[-6, 3, 3, -6]"], "").code, 1);
    let g2 = cli(&["f-transfer", "--n", "6", "--inter", "[0, 2, -6, 12, -18, 18, 0]"], "");
    assert_eq!(g2.code, 1);
    assert_eq!(json(&g2.stdout)["weight"], 8);
    let missing = cli(&["f-transfer", "--n", "3", "--inter", "{\"0\": 1, \"1\": 1}"], "");
    assert_eq!(error_kind(&missing), "missing_intersection");
    let bad = cli(&["f-transfer", "--n", "5", "--inter", "[0, 2, 0, 1, 0, 0]"], "");
    assert_eq!(error_kind(&bad), "validation_failure");
    assert!(bad.stderr.contains("dim10"));
    let wrong_len = cli(&["f-transfer", "--n", "2", "--inter", "[1, 2]"], "");
    assert_eq!(error_kind(&wrong_len), "dimension_mismatch");
    let boundary = cli(&["f-transfer", "--n", "2", "--inter", "[2, 2, 2]", "--boundary-terms"], "");
    assert_eq!(json(&boundary.stdout)["boundary_terms"], true);
}

#[test]
fn e_circle_values() {
    let e = |k: &str, c1: &str| json(&cli(&["e-circle", "--k", k, "--c1", c1], "").stdout)["e"].clone();
    assert_eq!(e("1", "1"), serde_json::json!([1, 12]));
    assert_eq!(e("1", "12"), serde_json::json!([0, 1]));
    assert_eq!(e("1", "-1"), serde_json::json!([11, 12]));
    assert_eq!(e("2", "5"), serde_json::json!([0, 1]));
    assert_eq!(error_kind(&cli(&["e-circle", "--k", "1", "--c1", "x"], "")), "parse");
}

#[test]
fn verify_appendix_all_pass() {
    let o = cli(&["verify-appendix", "--output", "text"], "");
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert!(o.stdout.lines().all(|l| l.starts_with("PASS")));
    for needle in ["(E4^6 - 1)/2^5", "(E4 - 1)/64", "(E1^2 - 1)/32", "G2/T remainder", "f(nu^2)", "SU(3)/T", "dim 12"] {
        assert!(o.stdout.contains(needle), "missing {needle}");
    }
}

#[test]
fn malformed_arguments() {
    assert_eq!(error_kind(&cli(&["nope"], "")), "parse");
    assert_eq!(error_kind(&cli(&["f-product", "--y1", "eta"], "")), "parse");
    assert_eq!(error_kind(&cli(&["genus", "--order", "11"], "")), "invalid_argument");
    assert_eq!(cli(&["--help"], "").code, 0);
}

#[test]
fn binary_output_is_deterministic() {
    let bin = env!("CARGO_BIN_EXE_divcong");
    let args = ["f-transfer", "--n", "4", "--inter", "[1, 2, 3, 4, 5]", "--order", "20"];
    let a = Command::new(bin).args(args).output().unwrap();
    let b = Command::new(bin).args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let err = Command::new(bin).args(["trivial", "--weight", "4"]).output().unwrap();
    assert_eq!(err.status.code(), Some(2));
}
