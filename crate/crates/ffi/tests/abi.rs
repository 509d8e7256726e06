use std::ffi::{CStr, CString};
use std::ptr;

use mmf_sphere_ffi::*;

fn generate(n: u32, p: u32, strategy: MmfStrategy) -> *mut MmfMesh {
    let mut m = ptr::null_mut();
    let s = unsafe { mmf_mesh_generate(n, p, strategy, 2, &mut m) };
    assert_eq!(s, MmfStatus::Ok);
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let p = mmf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn counts_and_nodes_on_sphere() {
    let m = generate(2, 3, MmfStrategy::GeodesicOptimized);
    let (mut ne, mut npe) = (0usize, 0usize);
    unsafe {
        assert_eq!(mmf_mesh_element_count(m, &mut ne), MmfStatus::Ok);
        assert_eq!(mmf_mesh_nodes_per_element(m, &mut npe), MmfStatus::Ok);
    }
    assert_eq!((ne, npe), (24, 16));
    let mut buf = vec![0.0; 3 * ne * npe];
    assert_eq!(unsafe { mmf_mesh_copy_nodes(m, buf.as_mut_ptr(), buf.len()) }, MmfStatus::Ok);
    for x in buf.chunks(3) {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        assert!((r - 1.0).abs() < 1e-12);
    }
    let mut h = 0.0;
    assert_eq!(unsafe { mmf_mesh_h(m, &mut h) }, MmfStatus::Ok);
    assert!(h > 0.5 && h < 1.0, "{h}");
    unsafe { mmf_mesh_free(m) };
}

#[test]
fn optimized_beats_naive_through_the_abi() {
    let opt = generate(4, 5, MmfStrategy::GeodesicOptimized);
    let naive = generate(4, 5, MmfStrategy::NaiveProjection);
    let (mut go, mut gn, mut me) = (0.0, 0.0, 1.0);
    unsafe {
        assert_eq!(mmf_mesh_gae(opt, &mut go), MmfStatus::Ok);
        assert_eq!(mmf_mesh_gae(naive, &mut gn), MmfStatus::Ok);
        assert_eq!(mmf_mesh_error(opt, &mut me), MmfStatus::Ok);
        mmf_mesh_free(opt);
        mmf_mesh_free(naive);
    }
    assert!(gn > 100.0 * go, "{gn} vs {go}");
    assert!(me < 1e-14);
}

#[test]
fn error_codes_and_messages() {
    let mut m = ptr::null_mut();
    let s = unsafe { mmf_mesh_generate(2, 40, MmfStrategy::GeodesicOptimized, 2, &mut m) };
    assert_eq!(s, MmfStatus::InvalidInput);
    assert!(m.is_null());
    assert!(last_error().contains("40"));

    let mut v = 0.0;
    assert_eq!(unsafe { mmf_mesh_gae(ptr::null(), &mut v) }, MmfStatus::NullPointer);
    assert_eq!(unsafe { mmf_mesh_generate(2, 2, MmfStrategy::GeodesicOptimized, 2, ptr::null_mut()) }, MmfStatus::NullPointer);

    let m = generate(1, 2, MmfStrategy::GeodesicOptimized);
    let mut small = [0.0; 4];
    assert_eq!(unsafe { mmf_mesh_copy_nodes(m, small.as_mut_ptr(), small.len()) }, MmfStatus::BufferTooSmall);
    assert!(last_error().contains("needed"));
    assert_eq!(unsafe { mmf_mesh_h(m, &mut v) }, MmfStatus::Ok);
    assert!(mmf_last_error_message().is_null());

    let bad = CString::new("/nonexistent-dir/x/mesh.json").unwrap();
    assert_eq!(unsafe { mmf_mesh_write_json(m, bad.as_ptr()) }, MmfStatus::Io);
    unsafe {
        mmf_mesh_free(m);
        mmf_mesh_free(ptr::null_mut());
    }
}

#[test]
fn writes_json_readable_by_core() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let m = generate(2, 4, MmfStrategy::GeodesicOptimized);
    let c = CString::new(path.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { mmf_mesh_write_json(m, c.as_ptr()) }, MmfStatus::Ok);
    unsafe { mmf_mesh_free(m) };
    let back = mmf_sphere::mesh::io::read_mesh(&path).unwrap();
    assert_eq!(back.p_geom, 4);
    assert_eq!(back.mappings.len(), 24);
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(mmf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_current() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mmf_sphere.h")).unwrap();
    for f in ["mmf_mesh_generate", "mmf_mesh_free", "mmf_mesh_gae", "mmf_last_error_message", "MMF_STATUS_PANIC"] {
        assert!(h.contains(f), "{f}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = std::process::Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(cc.status.success());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"mmf_sphere.h\"\n\
         int main(void) {\n\
           MmfMesh *m = NULL;\n\
           double gae = 0.0;\n\
           if (mmf_mesh_generate(2, 3, MMF_STRATEGY_GEODESIC_OPTIMIZED, 2, &m) != MMF_STATUS_OK) return 1;\n\
           mmf_mesh_gae(m, &gae);\n\
           mmf_mesh_free(m);\n\
           return gae < 1.0 ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    let out = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
