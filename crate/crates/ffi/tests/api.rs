use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use irc_core::gauss::{self, CSwap, GaussConfig, HkParams};
use irc_ffi::*;

fn fixture(name: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name);
    CString::new(std::fs::read_to_string(p).unwrap()).unwrap()
}

fn last_error() -> Option<String> {
    let p = irc_last_error_message();
    if p.is_null() {
        return None;
    }
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { irc_string_free(p) };
    Some(s)
}

fn bounds(region: *const IrcRegion) -> Vec<(u8, u8, f64)> {
    (0..unsafe { irc_region_len(region) })
        .map(|i| {
            let (mut a, mut b, mut rhs) = (0u8, 0u8, 0.0);
            assert_eq!(
                unsafe { irc_region_get(region, i, &mut a, &mut b, &mut rhs) },
                IrcStatus::Ok
            );
            (a, b, rhs)
        })
        .collect()
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(irc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn cfn_and_its_errors() {
    let mut v = 0.0;
    assert_eq!(unsafe { irc_cfn(3.0, &mut v) }, IrcStatus::Ok);
    assert_eq!(v, 1.0);
    assert!(last_error().is_none());
    assert_eq!(unsafe { irc_cfn(-1.0, &mut v) }, IrcStatus::InvalidArgument);
    assert!(last_error().unwrap().contains("-1"));
    assert_eq!(unsafe { irc_cfn(1.0, ptr::null_mut()) }, IrcStatus::NullPointer);
    assert_eq!(last_error().unwrap(), "out_value is NULL");
}

#[test]
fn gaussian_region_matches_core() {
    let mut cfg = ptr::null_mut();
    assert_eq!(
        unsafe { irc_gauss_config_reference(10.0, 1.0, &mut cfg) },
        IrcStatus::Ok
    );
    let mut region = ptr::null_mut();
    let status = unsafe { irc_gauss_region(cfg, 0.3, 0.6, 2.0, IRC_CSWAP_PATTERN, &mut region) };
    assert_eq!(status, IrcStatus::Ok);
    let core = GaussConfig::reference(10.0, 1.0);
    let hk = HkParams::new(0.3, 0.6, 2.0).unwrap();
    let want: Vec<(u8, u8, f64)> = gauss::gauss_region(&core, &hk)
        .iter()
        .map(|i| (i.a, i.b, i.rhs))
        .collect();
    assert_eq!(bounds(region), want);

    let (mut best, mut r1, mut r2) = (0.0, 0.0, 0.0);
    assert_eq!(
        unsafe { irc_region_max_weighted(region, 1.0, 1.0, &mut best, &mut r1, &mut r2) },
        IrcStatus::Ok
    );
    let mut s = 0.0;
    assert_eq!(
        unsafe { irc_gauss_sum_rate(cfg, 0.3, 0.6, 2.0, IRC_CSWAP_VERBATIM, &mut s) },
        IrcStatus::Ok
    );
    assert!((best - s).abs() < 1e-12);
    assert!((r1 + r2 - s).abs() < 1e-12);
    assert!(unsafe { irc_region_vertex_count(region) } >= 2);

    assert_eq!(
        unsafe { irc_gauss_sum_rate(cfg, 0.3, 0.6, 2.0, 7, &mut s) },
        IrcStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { irc_gauss_region(cfg, 1.5, 0.6, 2.0, 0, &mut region) },
        IrcStatus::InvalidArgument
    );
    unsafe {
        irc_region_free(region);
        irc_gauss_config_free(cfg);
    }
}

#[test]
fn optimizer_and_baselines_match_core() {
    let mut cfg = ptr::null_mut();
    let status = unsafe { irc_gauss_config_new(0.5, 0.1, 1.0, 0.4, 0.4, 1.0, 100.0, 1.0, &mut cfg) };
    assert_eq!(status, IrcStatus::Ok);
    let sigmas = [0.5, 2.0, 8.0];
    let (mut s, mut a1, mut a2, mut s2) = (0.0, 0.0, 0.0, 0.0);
    let status = unsafe {
        irc_gauss_optimize(
            cfg,
            0.1,
            sigmas.as_ptr(),
            sigmas.len(),
            0,
            &mut s,
            &mut a1,
            &mut a2,
            &mut s2,
        )
    };
    assert_eq!(status, IrcStatus::Ok);
    let core = GaussConfig::reference(100.0, 1.0);
    let want = gauss::optimize_sum_rate_with(&core, 0.1, &sigmas, CSwap::Pattern).unwrap();
    assert_eq!(
        (s, a1, a2, s2),
        (
            want.sum_rate,
            want.params.alpha1,
            want.params.alpha2,
            want.params.sigma2
        )
    );

    let (mut ian, mut snd) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            irc_gauss_baseline_ian(cfg, sigmas.as_ptr(), 3, 0, &mut ian),
            IrcStatus::Ok
        );
        assert_eq!(
            irc_gauss_baseline_snd(cfg, sigmas.as_ptr(), 3, 0, &mut snd),
            IrcStatus::Ok
        );
    }
    assert_eq!(ian, gauss::baseline_ian(&core, &sigmas).unwrap());
    assert_eq!(snd, gauss::baseline_snd(&core, &sigmas).unwrap());
    assert!(s >= ian.max(snd));

    let status = unsafe {
        irc_gauss_optimize(
            cfg,
            0.3,
            sigmas.as_ptr(),
            3,
            0,
            &mut s,
            ptr::null_mut(),
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(status, IrcStatus::InvalidArgument);
    let status = unsafe { irc_gauss_baseline_ian(cfg, ptr::null(), 3, 0, &mut ian) };
    assert_eq!(status, IrcStatus::NullPointer);
    unsafe { irc_gauss_config_free(cfg) };
}

#[test]
fn bad_gains_are_rejected() {
    let mut cfg = ptr::null_mut();
    let status = unsafe { irc_gauss_config_new(f64::NAN, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, &mut cfg) };
    assert_eq!(status, IrcStatus::InvalidArgument);
    assert!(cfg.is_null());
    assert!(last_error().is_some());
}

#[test]
fn discrete_channel_from_json() {
    let (ch, input) = (fixture("copy_channel.json"), fixture("copy_input.json"));
    let mut region = ptr::null_mut();
    assert_eq!(
        unsafe { irc_dm_eval_json(ch.as_ptr(), input.as_ptr(), &mut region) },
        IrcStatus::Ok
    );
    let b = bounds(region);
    assert_eq!(b.len(), 7);
    assert_eq!(b[0], (1, 0, 1.0));
    assert_eq!(b[1], (0, 1, 1.0));
    let (mut r1, mut r2) = (0.0, 0.0);
    assert_eq!(
        unsafe { irc_region_vertex(region, 999, &mut r1, &mut r2) },
        IrcStatus::OutOfRange
    );
    unsafe { irc_region_free(region) };
}

#[test]
fn input_errors_keep_their_class() {
    let ch = fixture("copy_channel.json");
    let mut region = ptr::null_mut();
    let bad = fixture("malformed_input.json");
    assert_eq!(
        unsafe { irc_dm_eval_json(ch.as_ptr(), bad.as_ptr(), &mut region) },
        IrcStatus::Schema
    );
    assert!(last_error().unwrap().contains("factors[3].given[0]"));
    let bad = fixture("unnormalized_input.json");
    assert_eq!(
        unsafe { irc_dm_eval_json(ch.as_ptr(), bad.as_ptr(), &mut region) },
        IrcStatus::Numeric
    );
    assert_eq!(
        unsafe { irc_dm_eval_json(ptr::null(), bad.as_ptr(), &mut region) },
        IrcStatus::NullPointer
    );
    assert!(region.is_null());
}

#[test]
fn deterministic_channel_from_json() {
    let spec = fixture("modulo2_spec.json");
    let mut region = ptr::null_mut();
    assert_eq!(
        unsafe { irc_det_eval_json(spec.as_ptr(), ptr::null(), &mut region) },
        IrcStatus::Ok
    );
    assert_eq!(bounds(region)[0], (1, 0, 1.0));
    unsafe { irc_region_free(region) };

    let invalid = fixture("invalid_injectivity_spec.json");
    assert_eq!(
        unsafe { irc_det_eval_json(invalid.as_ptr(), ptr::null(), &mut region) },
        IrcStatus::Schema
    );
    assert!(last_error().unwrap().contains("y4 not injective"));
}

#[test]
fn joint_mutual_information() {
    // X uniform on {0,1}, Y = X, W an independent fair bit.
    let names: Vec<CString> = ["X", "Y", "W"].iter().map(|s| CString::new(*s).unwrap()).collect();
    let ptrs: Vec<*const c_char> = names.iter().map(|s| s.as_ptr()).collect();
    let sizes = [2usize, 2, 2];
    let table = [0.25, 0.25, 0.0, 0.0, 0.0, 0.0, 0.25, 0.25];
    let mut joint = ptr::null_mut();
    let status = unsafe { irc_joint_new(ptrs.as_ptr(), sizes.as_ptr(), 3, table.as_ptr(), 8, &mut joint) };
    assert_eq!(status, IrcStatus::Ok);
    let mut v = -1.0;
    let status =
        unsafe { irc_joint_mutual_info(joint, ptrs.as_ptr(), 1, ptrs[1..].as_ptr(), 1, ptr::null(), 0, &mut v) };
    assert_eq!(status, IrcStatus::Ok);
    assert!((v - 1.0).abs() < 1e-12);
    let status = unsafe {
        irc_joint_mutual_info(
            joint,
            ptrs.as_ptr(),
            1,
            ptrs[2..].as_ptr(),
            1,
            ptrs[1..].as_ptr(),
            1,
            &mut v,
        )
    };
    assert_eq!(status, IrcStatus::Ok);
    assert!(v.abs() < 1e-12);

    let unknown = CString::new("Z").unwrap();
    let z = [unknown.as_ptr()];
    let status = unsafe { irc_joint_mutual_info(joint, z.as_ptr(), 1, ptrs.as_ptr(), 1, ptr::null(), 0, &mut v) };
    assert_eq!(status, IrcStatus::Schema);
    assert!(last_error().unwrap().contains("`Z`"));
    unsafe { irc_joint_free(joint) };

    let lopsided = [0.5, 0.0, 0.0, 0.6];
    let status = unsafe { irc_joint_new(ptrs.as_ptr(), sizes.as_ptr(), 2, lopsided.as_ptr(), 4, &mut joint) };
    assert_eq!(status, IrcStatus::Numeric);
}

#[test]
fn errors_are_per_thread() {
    let mut v = 0.0;
    assert_eq!(unsafe { irc_cfn(-1.0, &mut v) }, IrcStatus::InvalidArgument);
    let other = std::thread::spawn(last_error).join().unwrap();
    assert!(other.is_none());
    assert!(last_error().is_some());
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        irc_region_free(ptr::null_mut());
        irc_gauss_config_free(ptr::null_mut());
        irc_joint_free(ptr::null_mut());
        irc_string_free(ptr::null_mut());
        assert_eq!(irc_region_len(ptr::null()), 0);
        assert_eq!(irc_region_vertex_count(ptr::null()), 0);
    }
}
