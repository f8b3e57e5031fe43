use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use gptshape::C64;
use gptshape_cli::curve::CurveFile;
use gptshape_cli::document::GptDocument;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gptshape"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn metrics(text: &str) -> (f64, f64) {
    let value = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .unwrap_or_else(|| panic!("{key} missing in {text}"))
            .parse()
            .unwrap()
    };
    (value("symmetric_difference"), value("hausdorff"))
}

fn entry(rows: &[Vec<[f64; 2]>], m: usize, n: usize) -> C64 {
    let [re, im] = rows[m - 1][n - 1];
    C64::new(re, im)
}

/// Square root of the eigenvalue ratio of the point covariance.
fn aspect_ratio(points: &[C64]) -> f64 {
    let n = points.len() as f64;
    let mean: C64 = points.iter().sum::<C64>() / n;
    let (mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0);
    for z in points {
        let d = z - mean;
        xx += d.re * d.re;
        yy += d.im * d.im;
        xy += d.re * d.im;
    }
    let (tr, det) = (xx + yy, xx * yy - xy * xy);
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    ((tr / 2.0 + disc) / (tr / 2.0 - disc)).sqrt()
}

#[test]
fn kite_forward_is_hermitian() {
    let doc = GptDocument::from_json(&ok(&["forward", "--shape", "kite", "--sigma", "50", "--order", "6"])).unwrap();
    assert_eq!(doc.order, 6);
    assert_eq!(doc.metadata.shape, "kite");
    assert_eq!(doc.metadata.n_quad, 1024);
    let (mut diff, mut norm) = (0.0, 0.0);
    for m in 1..=6 {
        for n in 1..=6 {
            diff += (entry(&doc.n2, m, n) - entry(&doc.n2, n, m).conj()).norm_sqr();
            norm += entry(&doc.n2, m, n).norm_sqr();
        }
    }
    assert!((diff / norm).sqrt() < 1e-8);
}

#[test]
fn ellipse_forward_matches_faber_diagonal() {
    let doc = GptDocument::from_json(&ok(&[
        "forward", "--shape", "ellipse", "--gamma", "1", "--e1", "0.5", "--sigma", "inf", "--order", "4",
    ]))
    .unwrap();
    assert_eq!(doc.lambda, 0.5);
    // N1 = P^-1 F1 P^-T with F1_mm = 4 pi m e1^m and z^3 = F_3 + 3 e1 F_1,
    // z^4 = F_4 + 4 e1 F_2 + const.
    let e1: f64 = 0.5;
    for (m, factor) in [(1, 4.0), (2, 8.0), (3, 48.0), (4, 144.0)] {
        let want = factor * PI * e1.powi(m as i32);
        let got = entry(&doc.n1, m, m);
        assert!((got - want).norm() < 1e-8 * want, "N1_{m}{m} = {got}, want {want}");
    }
}

#[test]
fn disk_forward_leading_entry() {
    let doc = GptDocument::from_json(&ok(&[
        "forward", "--shape", "disk", "--radius", "1", "--sigma", "5", "--order", "2",
    ]))
    .unwrap();
    let want = 8.0 * PI / 3.0;
    assert!((entry(&doc.n2, 1, 1).re - want).abs() < 1e-8 * want);
    assert_eq!(doc.metadata.shape_parameters["radius"], "1");
}

#[test]
fn forward_is_deterministic() {
    let args = [
        "forward",
        "--shape",
        "asymmetric",
        "--sigma",
        "1/50",
        "--order",
        "6",
        "--snr",
        "5",
        "--seed",
        "9",
    ];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let doc = GptDocument::from_json(&a).unwrap();
    assert_eq!(doc.metadata.snr, 5.0);
    assert_eq!(doc.metadata.seed, 9);
    let other = ok(&[
        "forward",
        "--shape",
        "asymmetric",
        "--sigma",
        "1/50",
        "--order",
        "6",
        "--snr",
        "5",
        "--seed",
        "10",
    ]);
    assert_ne!(a, other);
}

#[test]
fn disk_recovery_of_exact_disk_is_circle() {
    let dir = TempDir::new().unwrap();
    let gpt = path(&dir, "disk.json");
    ok(&[
        "forward",
        "--shape",
        "disk",
        "--radius",
        "0.7",
        "--center",
        "0.2,-0.1",
        "--sigma",
        "5",
        "--order",
        "4",
        "--out",
        s(&gpt),
    ]);
    let curve = CurveFile::from_text(&ok(&["recover", "--gpt", s(&gpt), "--method", "disk"])).unwrap();
    assert_eq!(curve.samples.len(), 512);
    assert_eq!(curve.metadata["method"], "disk");
    for z in curve.points() {
        assert!(((z - C64::new(0.2, -0.1)).norm() - 0.7).abs() < 1e-8);
    }
}

#[test]
fn conformal_round_trip_on_map_shapes() {
    let dir = TempDir::new().unwrap();
    for shape in ["asymmetric", "ellipse", "disk"] {
        let gpt = path(&dir, &format!("{shape}.json"));
        let truth = path(&dir, &format!("{shape}.truth"));
        let recon = path(&dir, &format!("{shape}.recon"));
        ok(&[
            "forward",
            "--shape",
            shape,
            "--sigma",
            "inf",
            "--order",
            "6",
            "--out",
            s(&gpt),
            "--truth-out",
            s(&truth),
        ]);
        ok(&["recover", "--gpt", s(&gpt), "--method", "conformal", "--out", s(&recon)]);
        let (area, hausdorff) = metrics(&ok(&["evaluate", "--truth", s(&truth), "--recon", s(&recon)]));
        assert!(area < 1e-3 && hausdorff < 1e-3, "{shape}: {area} {hausdorff}");
    }
}

#[test]
fn conformal_recovery_of_perfectly_conducting_kite() {
    let dir = TempDir::new().unwrap();
    let gpt = path(&dir, "kite.json");
    let truth = path(&dir, "kite.truth");
    let recon = path(&dir, "kite.recon");
    ok(&[
        "forward",
        "--shape",
        "kite",
        "--sigma",
        "inf",
        "--out",
        s(&gpt),
        "--truth-out",
        s(&truth),
    ]);
    ok(&["recover", "--gpt", s(&gpt), "--method", "conformal", "--out", s(&recon)]);
    let text = std::fs::read_to_string(&recon).unwrap();
    assert!(text.contains("# a_6="));
    let (area, hausdorff) = metrics(&ok(&["evaluate", "--truth", s(&truth), "--recon", s(&recon)]));
    // Six Laurent coefficients of the kite map leave a truncation error of
    // about 8% of the area.
    assert!(area < 0.1 && hausdorff < 0.07, "{area} {hausdorff}");
}

#[test]
fn straight_ellipse_recovery_keeps_eccentricity() {
    let dir = TempDir::new().unwrap();
    let gpt = path(&dir, "straight.json");
    ok(&["forward", "--shape", "straight", "--sigma", "1/5", "--out", s(&gpt)]);
    let ellipse = CurveFile::from_text(&ok(&["recover", "--gpt", s(&gpt), "--method", "ellipse"])).unwrap();
    let disk = CurveFile::from_text(&ok(&["recover", "--gpt", s(&gpt), "--method", "disk"])).unwrap();
    let (e, d) = (aspect_ratio(&ellipse.points()), aspect_ratio(&disk.points()));
    assert!(e > d, "ellipse {e} vs disk {d}");
    assert!(ellipse.metadata.contains_key("gamma_e") && ellipse.metadata.contains_key("fhat_5"));
}

fn circle(radius: f64, center: C64) -> CurveFile {
    let n = 512;
    let points: Vec<C64> = (0..n)
        .map(|j| center + C64::from_polar(radius, 2.0 * PI * j as f64 / n as f64))
        .collect();
    CurveFile::uniform(&points)
}

#[test]
fn evaluate_circle_examples() {
    let dir = TempDir::new().unwrap();
    let write = |name: &str, curve: CurveFile| {
        let p = path(&dir, name);
        std::fs::write(&p, curve.to_text()).unwrap();
        p
    };
    let unit = write("unit", circle(1.0, C64::new(0.0, 0.0)));
    let big = write("big", circle(1.1, C64::new(0.0, 0.0)));
    let moved = write("moved", circle(1.0, C64::new(0.1, 0.0)));
    let (a, h) = metrics(&ok(&["evaluate", "--truth", s(&unit), "--recon", s(&unit)]));
    assert!(a.abs() < 1e-12 && h.abs() < 1e-12);
    let (_, h) = metrics(&ok(&["evaluate", "--truth", s(&unit), "--recon", s(&big)]));
    assert!((h - 0.05).abs() < 1e-4, "{h}");
    let (_, h) = metrics(&ok(&["evaluate", "--truth", s(&unit), "--recon", s(&moved)]));
    assert!((h - 0.05).abs() < 1e-4, "{h}");
}

#[test]
fn exit_statuses() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["forward", "--shape", "kite"]).status.code(), Some(1));
    assert_eq!(
        run(&["recover", "--gpt", "/nonexistent.json", "--method", "disk"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    // N2_11^2 = 4 lambda^2 |N1_11|^2: no equivalent ellipse.
    let degenerate = path(&dir, "degenerate.json");
    std::fs::write(
        &degenerate,
        r#"{"order": 2, "sigma": "inf", "lambda": 0.5,
            "n1": [[[2, 0], [0, 0]], [[0, 0], [0, 0]]],
            "n2": [[[2, 0], [0, 0]], [[0, 0], [1, 0]]],
            "metadata": {"shape": "custom", "n_quad": 0, "snr": "inf", "seed": 0, "noise_scale": "absolute"}}"#,
    )
    .unwrap();
    let out = run(&["recover", "--gpt", s(&degenerate), "--method", "ellipse"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate equivalent ellipse"));

    let bowtie = path(&dir, "bowtie");
    std::fs::write(&bowtie, "# closed=true\n0 0 0\n1 1 1\n2 1 0\n3 0 1\n").unwrap();
    let unit = path(&dir, "unit");
    std::fs::write(&unit, circle(1.0, C64::new(0.0, 0.0)).to_text()).unwrap();
    assert_eq!(
        run(&["evaluate", "--truth", s(&unit), "--recon", s(&bowtie)])
            .status
            .code(),
        Some(2)
    );
    let open = path(&dir, "open");
    std::fs::write(
        &open,
        circle(1.0, C64::new(0.0, 0.0))
            .to_text()
            .replace("closed=true", "closed=false"),
    )
    .unwrap();
    assert_eq!(
        run(&["evaluate", "--truth", s(&open), "--recon", s(&unit)])
            .status
            .code(),
        Some(2)
    );
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn demo_writes_manifest_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a"), path(&dir, "b"));
    let start = Instant::now();
    let manifest = ok(&["demo", "kite-orders", "--out", s(&a)]);
    assert!(start.elapsed().as_secs() < 60);
    ok(&["demo", "kite-orders", "--out", s(&b)]);
    let (fa, fb) = (read_dir_sorted(&a), read_dir_sorted(&b));
    assert_eq!(fa, fb);
    let rows: Vec<&str> = manifest.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 6);
    assert!(manifest.contains("# truth=kite.truth.txt"));
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    for row in rows {
        let fields: Vec<&str> = row.split_whitespace().collect();
        assert!(names.contains(&fields[5]), "{row}");
        if fields[7] != "failed" {
            assert!(names.contains(&fields[6]), "{row}");
        }
        assert!(names.contains(&format!("{}.metrics.txt", fields[0]).as_str()));
    }
}
