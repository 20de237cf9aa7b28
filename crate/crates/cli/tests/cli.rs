use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;

use smoothzeta::funcmodel::BumpFunction;
use smoothzeta::quad::gauss_legendre;
use smoothzeta_cli::spec::{BumpSpec, FlatSpec, FunctionSpec, UnitTerm};
use smoothzeta_cli::{emit_spec, parse_spec_str, RunManifest, SpecFile};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_smoothzeta"));
    c.env_remove("SMOOTHZETA_CONFIG");
    c
}

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

#[test]
fn classify_reports_the_case() {
    for (file, case) in [("monomial.toml", "A"), ("flat_in_x.toml", "B"), ("case_c.toml", "C")] {
        let v = stdout_json(&run(&["classify", specs().join(file).to_str().unwrap()]));
        assert_eq!(v["case"], case, "{file}");
        assert_eq!(v["swapped"], false);
    }
}

#[test]
fn newton_distance_of_a_single_exponent() {
    let v = stdout_json(&run(&["newton", "--point", "2,3"]));
    assert_eq!(v["distance"], "3");
    let v = stdout_json(&run(&["newton", specs().join("case_c.toml").to_str().unwrap()]));
    assert_eq!(v["distance"], "3");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["classify", "/no/such/spec.toml"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let entire = dir.path().join("entire.toml");
    std::fs::write(&entire, "[function]\na = 0\nb = 0\n").unwrap();
    let o = run(&["classify", entire.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("entire"));
    let typo = dir.path().join("typo.toml");
    std::fs::write(&typo, "[function]\na = 1\nb = 2\n[bump]\nradius = [1.0, 1.0]\nwidth = 2\n").unwrap();
    let o = run(&["classify", typo.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("width") && err.contains("line 6"), "{err}");
    // flat terms in x are outside the continuation's scope
    let o = run(&["continue", specs().join("flat_in_x.toml").to_str().unwrap(), "--s=0.5"]);
    assert_eq!(o.status.code(), Some(1));
    // missing points
    let o = run(&["eval", specs().join("monomial.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "[quadrature]\nkernel_nodes = 40\n[continuation]\nchunk = 8\n").unwrap();
    let out = dir.path().join("o.csv");
    let o = bin()
        .env("SMOOTHZETA_CONFIG", &cfg)
        .args(["eval", specs().join("monomial.toml").to_str().unwrap(), "--s=1", "-o"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success());
    let m = RunManifest::from_json(&std::fs::read_to_string(dir.path().join("o.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(m.config.source.as_deref(), cfg.to_str());
    assert_eq!(m.config.config.quadrature.kernel_nodes, 40);
    assert_eq!(m.config.config.continuation.chunk, 8);

    std::fs::write(&cfg, "[quadrature]\nkernel_node = 40\n").unwrap();
    let o = bin()
        .env("SMOOTHZETA_CONFIG", &cfg)
        .args(["eval", specs().join("monomial.toml").to_str().unwrap(), "--s=1"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

/// `∫_0^R u^{As+B} du` in closed form.
#[test]
fn continue1d_matches_closed_form() {
    let o = run(&["continue1d", "--A", "2", "--B", "1", "--r", "0.5", "--s=-0.7:0.2,-2.3:-1"]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&String::from_utf8(o.stdout).unwrap());
    for r in rows {
        let s = num_complex::Complex64::new(r[0], r[1]);
        let e = 2.0 * s + 2.0;
        let want = num_complex::Complex64::new(0.5, 0.0).powc(e) / e;
        let got = num_complex::Complex64::new(r[2], r[3]);
        assert!((got - want).norm() <= 1e-10 * want.norm(), "{s}: {got} vs {want}");
    }
}

#[test]
fn continuation_csv_schemas_agree() {
    let c1 = run(&["continue1d", "--A", "1", "--s=0.5"]);
    let c2 = run(&["continue2d", "--a", "1", "--b", "2", "--p", "2", "--s=0.5"]);
    let c3 = run(&["continue", specs().join("monomial.toml").to_str().unwrap(), "--s=0.5"]);
    let headers: Vec<Vec<String>> = [c1, c2, c3]
        .iter()
        .map(|o| {
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            csv_rows(&String::from_utf8_lossy(&o.stdout)).0
        })
        .collect();
    assert_eq!(headers[0], headers[1]);
    assert_eq!(headers[0], headers[2]);
    assert_eq!(&headers[0][..4], ["s_re", "s_im", "value_re", "value_im"]);
}

/// The `a > b` spec is stored with swapped axes; its integral must equal a
/// brute-force tensor quadrature of the function as written. At `s = 2`
/// the integrand `f² φ` is smooth.
#[test]
fn swapped_spec_keeps_the_integral() {
    let o = run(&["classify", specs().join("swapped.toml").to_str().unwrap()]);
    let v = stdout_json(&o);
    assert_eq!(v["swapped"], true);
    assert_eq!(v["a"], 1);
    assert_eq!(v["b"], 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("notice"));

    let phi = BumpFunction::product_at([0.1, 0.0], [1.0, 0.8], [0.5, 0.4]);
    let f = |x: f64, y: f64| {
        let flat = if x == 0.0 { 0.0 } else { (-1.0 / (x * x)).exp() };
        x.powi(3) * y * (1.0 + 0.5 * x) + flat
    };
    let (gx, gw) = gauss_legendre(20);
    let panels = 40;
    let (xl, xh, yl, yh) = (-0.9, 1.1, -0.8, 0.8);
    let mut oracle = 0.0;
    for px in 0..panels {
        let (a, b) = (xl + (xh - xl) * px as f64 / panels as f64, xl + (xh - xl) * (px + 1) as f64 / panels as f64);
        for py in 0..panels {
            let (c, d) = (yl + (yh - yl) * py as f64 / panels as f64, yl + (yh - yl) * (py + 1) as f64 / panels as f64);
            for (tx, wx) in gx.iter().zip(&gw) {
                let x = 0.5 * (a + b) + 0.5 * (b - a) * tx;
                for (ty, wy) in gx.iter().zip(&gw) {
                    let y = 0.5 * (c + d) + 0.5 * (d - c) * ty;
                    oracle += 0.25 * (b - a) * (d - c) * wx * wy * f(x, y).powi(2) * phi.eval(x, y);
                }
            }
        }
    }
    let o = run(&["eval", specs().join("swapped.toml").to_str().unwrap(), "--s=2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert!((rows[0][2] - oracle).abs() < 1e-8 * oracle, "{} vs {oracle}", rows[0][2]);
}

/// Re-running from the spec echoed in a manifest reproduces the output.
#[test]
fn manifest_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("first.csv");
    let spec = specs().join("case_c.toml");
    let o = run(&["continue", spec.to_str().unwrap(), "--s=0.4,-0.2:0.1", "--m", "4", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = RunManifest::from_json(&std::fs::read_to_string(dir.path().join("first.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(m.subcommand, "continue");
    assert_eq!(m.spec_sha256.as_deref().map(str::len), Some(64));
    assert!(m.stages.iter().all(|s| s.met), "{:?}", m.stages);
    let echoed = dir.path().join("echo.toml");
    std::fs::write(&echoed, emit_spec(m.spec.as_ref().unwrap())).unwrap();
    let out2 = dir.path().join("second.csv");
    let o = run(&["continue", echoed.to_str().unwrap(), "--s=0.4,-0.2:0.1", "--m", "4", "-o", out2.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());
    let m2 = RunManifest::from_json(&std::fs::read_to_string(dir.path().join("second.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(m.output_sha256, m2.output_sha256);
    assert_eq!(m.spec, m2.spec);
}

#[test]
fn poles_lists_the_predicted_pole() {
    let o = run(&[
        "poles",
        specs().join("case_c.toml").to_str().unwrap(),
        "--window=-0.4,-0.25,-0.1,0.1",
        "--m",
        "6",
    ]);
    let v = stdout_json(&o);
    let poles = v["poles"].as_array().unwrap();
    assert_eq!(poles.len(), 1, "{v}");
    let loc = poles[0]["location"][0].as_f64().unwrap();
    assert!((loc + 1.0 / 3.0).abs() < 0.01);
    assert_eq!(poles[0]["predicted"], true);
    assert_eq!(poles[0]["order_estimate"], 1);
    assert_eq!(poles[0]["source"], "axis");
}

#[test]
fn h0_and_vdc_reports() {
    let v = stdout_json(&run(&["h0", specs().join("monomial.toml").to_str().unwrap()]));
    assert!(v["deviation"].as_f64().unwrap() < 0.05, "{v}");
    // x² - 1/8 on [0, 1]: f'' = 2
    let v = stdout_json(&run(&["vdc-check", "--coeffs=-0.125,0,1", "--k", "2", "--sigma=-0.3"]));
    assert_eq!(v["bound"]["ok"], true, "{v}");
    assert!((v["eta"].as_f64().unwrap() - 1.998).abs() < 1e-12);
}

fn flat_spec() -> impl Strategy<Value = FlatSpec> {
    (0u32..3, 1u32..4, prop::collection::vec((-3.0f64..3.0, -4i32..4), 1..3)).prop_map(|(j, p, q)| FlatSpec { j, p, q })
}

fn spec_file() -> impl Strategy<Value = SpecFile> {
    (
        1u32..4,
        0u32..4,
        prop::collection::vec((0u32..3, 0u32..3, -2.0f64..2.0), 0..3),
        prop::collection::vec(flat_spec(), 0..2),
        prop::collection::vec(flat_spec(), 0..2),
        (0.1f64..2.0, 0.1f64..2.0, 0.0f64..1.0, -0.2f64..0.2),
    )
        .prop_map(|(a, extra, unit, g, h, (rx, ry, t, cx))| {
            let mut u = vec![UnitTerm(0, 0, 1.0)];
            u.extend(unit.into_iter().map(|(i, j, c)| UnitTerm(i, j, c)));
            SpecFile {
                function: FunctionSpec {
                    a,
                    b: a + extra,
                    unit: u,
                    g,
                    h,
                },
                bump: BumpSpec {
                    center: [cx, 0.0],
                    radius: [rx, ry],
                    inner: [t * rx, t * ry],
                },
                quadrature: None,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn emitted_specs_parse_back(spec in spec_file()) {
        let text = emit_spec(&spec);
        let back: SpecFile = toml::from_str(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        if let Ok(p) = parse_spec_str(&text, "prop") {
            prop_assert_eq!(p.spec, spec);
        }
    }
}
