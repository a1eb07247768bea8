//! Acceptance criterion 12: determinism of the full default experiment and
//! exact read-back fidelity of the exported matrices.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use ultrawalks::dynamics::quantum_transition;
use ultrawalks::generator::build_generator;
use ultrawalks::kernel::KernelProfile;
use ultrawalks::padic::GroupSpec;
use ultrawalks::spectral::eigendecompose;
use ultrawalks_cli::io::MatrixFile;

fn run_default(out: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_ultrawalks"))
        .args(["run", "--out"])
        .arg(out)
        .status()
        .expect("spawn ultrawalks run");
    assert!(status.success(), "run into {} failed", out.display());
}

fn directory_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|entry| {
            let entry = entry.unwrap();
            (
                entry.file_name().to_string_lossy().into_owned(),
                std::fs::read(entry.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn c12_cli_determinism_and_round_trip() {
    let scratch = tempfile::tempdir().unwrap();
    let first = scratch.path().join("first");
    let second = scratch.path().join("second");
    run_default(&first);
    run_default(&second);

    let bytes_first = directory_bytes(&first);
    let bytes_second = directory_bytes(&second);
    assert_eq!(
        bytes_first.keys().collect::<Vec<_>>(),
        bytes_second.keys().collect::<Vec<_>>(),
        "the two runs emitted different file sets"
    );
    let mut diverging = Vec::new();
    for (name, body) in &bytes_first {
        if bytes_second[name] != *body {
            diverging.push(name.clone());
        }
    }
    let identical = diverging.is_empty();

    // Read-back fidelity: the exported CSV must reproduce the in-memory
    // matrices bit-for-bit after parsing (17 significant digits).
    let spec = GroupSpec::new(2, 5).unwrap();
    let profile = KernelProfile::bessel(&spec, 1.2).unwrap();
    let generator = build_generator(&profile);
    let from_disk = MatrixFile::from_csv(
        &std::fs::read_to_string(first.join("generator.csv")).unwrap(),
    )
    .unwrap();
    let generator_exact = from_disk.values == *generator.entries();

    let data = eigendecompose(&generator).unwrap();
    let snapshot = quantum_transition(&data, 200.0).unwrap();
    let snapshot_disk = MatrixFile::from_csv(
        &std::fs::read_to_string(first.join("ctqmc_t200.csv")).unwrap(),
    )
    .unwrap();
    let snapshot_exact = snapshot_disk.values == snapshot.matrix;

    let ok = identical && generator_exact && snapshot_exact;
    println!(
        "criterion 12 cli-determinism-round-trip: {} ({} files byte-compared, diverging: {:?}, generator read-back exact: {generator_exact}, snapshot read-back exact: {snapshot_exact})",
        if ok { "PASS" } else { "FAIL" },
        bytes_first.len(),
        diverging,
    );
    assert!(ok);
}
