//! Compiles a small C program against the generated header and the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "blowup.h"

int main(void) {
    BlowupSeries *s = NULL;
    const char *profile =
        "{\"kind\":\"self_similar\",\"family\":\"sqg\",\"dim\":2,\"k\":3,\"p\":2.0,\"nu\":0.0}";
    if (blowup_series_synth(profile, &s) != BLOWUP_STATUS_OK) {
        fprintf(stderr, "%s\n", blowup_last_error());
        return 1;
    }
    BlowupOutcome out = BLOWUP_OUTCOME_INCONCLUSIVE;
    if (blowup_classify_trichotomy(s, 1.0, 1e-3, &out) != BLOWUP_STATUS_OK) return 2;
    size_t len = 0;
    blowup_series_len(s, &len);
    double residual = 1.0;
    blowup_representation_residual(s, 1.0, &residual);
    char *json = NULL;
    if (blowup_report_json(s, "trichotomy", NULL, 0, &json) != BLOWUP_STATUS_OK) return 3;
    int has_case = strstr(json, "case_i") != NULL;
    blowup_string_free(json);
    blowup_series_free(s);
    if (blowup_series_len(NULL, &len) != BLOWUP_STATUS_NULL_POINTER) return 4;
    printf("%s %d %zu %d %.1e\n", blowup_version(), (int)out, len, has_case, residual);
    return 0;
}
"#;

/// `target/<profile>` holding the uplifted static library.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn have(tool: &str) -> bool {
    Command::new(tool).arg("--version").output().is_ok()
}

#[test]
fn c_program_links_and_runs() {
    if !have("cc") {
        eprintln!("no C compiler available; C ABI link check not run");
        return;
    }
    let lib = artifact_dir().join("libblowup_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = tmp.path().join("main");
    let cc = Command::new("cc")
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .output()
        .unwrap();
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let out = String::from_utf8(run.stdout).unwrap();
    let fields: Vec<&str> = out.split_whitespace().collect();
    assert_eq!(fields[0], env!("CARGO_PKG_VERSION"));
    assert_eq!(fields[1], "3");
    assert_eq!(fields[2], "1281");
    assert_eq!(fields[3], "1");
    assert!(fields[4].parse::<f64>().unwrap() < 1e-9);
}
