use std::fs;

use ssf_core::campaign::{diagnose, run_campaign, CampaignConfig, CampaignKind};
use ssf_core::sample::{contraction, trial_rng};
use ssf_core::semispectral::{semispectral_cdf, SemiSpectralCDF};

#[test]
fn campaign_csv_has_the_documented_columns() {
    let cfg = CampaignConfig { kind: CampaignKind::Linear, trials: 3, dims: vec![2], degrees: vec![3], ..CampaignConfig::default() };
    let csv = run_campaign(&cfg).unwrap().csv_string().unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "seed,dim,kind,degree,lhs_re,lhs_im,rhs_re,rhs_im,residual,verdict");
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 10, "{line}");
        assert_eq!(fields[2], "linear");
        assert_eq!(fields[9], "pass");
    }
}

#[test]
fn cdf_json_round_trips() {
    let t = contraction(&mut trial_rng(5, 0), 3);
    let cdf = semispectral_cdf(&t, 4).unwrap();
    let json = serde_json::to_string(&cdf).unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["dim"], 3);
    let first = &value["jumps"][0];
    assert!(first["angle"].is_f64());
    assert_eq!(first["block_real"].as_array().unwrap().len(), 3);
    assert_eq!(first["block_imag"][0].as_array().unwrap().len(), 3);
    let back: SemiSpectralCDF = serde_json::from_str(&json).unwrap();
    assert_eq!(back, cdf);
}

#[test]
fn cdf_json_rejects_unordered_angles() {
    let bad = r#"{"dim": 1, "jumps": [
        {"angle": 2.0, "block_real": [[0.5]], "block_imag": [[0.0]]},
        {"angle": 1.0, "block_real": [[0.5]], "block_imag": [[0.0]]}]}"#;
    assert!(serde_json::from_str::<SemiSpectralCDF>(bad).is_err());
}

#[test]
fn diagnose_tables_have_one_row_per_rank() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CampaignConfig { dims: vec![5], degrees: vec![3], ..CampaignConfig::default() };
    let written = diagnose(&cfg, dir.path()).unwrap();
    assert_eq!(written.len(), 4);
    for name in ["diagnostics.csv", "gap_linear.csv", "gap_mult.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().count(), 6, "{name}");
        assert!(text.starts_with("rank,"), "{name}");
    }
}
