use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn header() -> String {
    std::fs::read_to_string(crate_dir().join("include/irc_ffi.h")).unwrap()
}

#[test]
fn header_declares_every_export() {
    let h = header();
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20, "{exports:?}");
    for name in exports {
        assert!(
            h.contains(&format!(" {name}(")) || h.contains(&format!("*{name}(")),
            "{name} missing"
        );
    }
    for ty in [
        "typedef struct IrcRegion IrcRegion;",
        "typedef struct IrcJoint IrcJoint;",
        "typedef enum IrcStatus",
    ] {
        assert!(h.contains(ty), "{ty}");
    }
    assert!(h.contains("IRC_STATUS_NUMERIC = 4"));
    assert!(h.contains("#define IRC_CSWAP_VERBATIM 1"));
}

// The static library sits next to the deps directory this test runs from.
fn static_lib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().join("libirc_ffi.a")
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "irc_ffi.h"

int main(void) {
    IrcGaussConfig *cfg = NULL;
    IrcRegion *region = NULL;
    double best = 0.0, s = 0.0, v = 0.0;
    if (irc_gauss_config_reference(10.0, 1.0, &cfg) != IRC_STATUS_OK) return 10;
    if (irc_gauss_region(cfg, 0.5, 0.5, 1.0, IRC_CSWAP_PATTERN, &region) != IRC_STATUS_OK) return 11;
    if (irc_region_len(region) != 28) return 12;
    if (irc_region_max_weighted(region, 1.0, 1.0, &best, NULL, NULL) != IRC_STATUS_OK) return 13;
    if (irc_gauss_sum_rate(cfg, 0.5, 0.5, 1.0, IRC_CSWAP_PATTERN, &s) != IRC_STATUS_OK) return 14;
    if (fabs(best - s) > 1e-12) return 15;
    if (irc_cfn(-2.0, &v) != IRC_STATUS_INVALID_ARGUMENT) return 16;
    char *msg = irc_last_error_message();
    if (msg == NULL) return 17;
    printf("%s|%.6f\n", irc_version(), s);
    irc_string_free(msg);
    irc_region_free(region);
    irc_gauss_config_free(cfg);
    return 0;
}
"#;

fn compile(dir: &Path) -> PathBuf {
    let src = dir.join("smoke.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = dir.join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(static_lib())
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success(), "C compile failed");
    exe
}

#[test]
fn c_program_links_against_the_static_library() {
    assert!(static_lib().exists(), "{} not built", static_lib().display());
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(compile(dir.path())).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let (version, rate) = text.trim().split_once('|').unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
    let cfg = irc_core::gauss::GaussConfig::reference(10.0, 1.0);
    let hk = irc_core::gauss::HkParams::new(0.5, 0.5, 1.0).unwrap();
    assert_eq!(rate, format!("{:.6}", irc_core::gauss::sum_rate(&cfg, &hk)));
}
