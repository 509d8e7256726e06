//! C ABI over mesh generation and the mesh error metrics.
//!
//! Every function returns an [`MmfStatus`]; on failure the message is available from
//! [`mmf_last_error_message`] until the next call on the same thread. Meshes are opaque
//! handles released with [`mmf_mesh_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use mmf_sphere::mesh::{
    generate_cubed_sphere, geometric_approximation_error, insert_high_order_nodes, mesh_error, metrics, HighOrderMesh,
    NodeStrategy,
};
use mmf_sphere::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    MeshFailure = 3,
    SolverFailure = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmfStrategy {
    GeodesicOptimized = 0,
    NaiveProjection = 1,
}

/// Opaque mesh handle.
pub struct MmfMesh {
    inner: HighOrderMesh,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> MmfStatus {
    match e {
        Error::SpringNonConvergence { .. }
        | Error::DegenerateElement { .. }
        | Error::NonConformingEdge { .. }
        | Error::InvalidMesh(_)
        | Error::PoleProximity { .. } => MmfStatus::MeshFailure,
        Error::NonFiniteState { .. } | Error::PositivityLoss { .. } => MmfStatus::SolverFailure,
        Error::Io(_) | Error::Json(_) => MmfStatus::Io,
        _ => MmfStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (MmfStatus, String)>) -> MmfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MmfStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            MmfStatus::Panic
        }
    }
}

fn lift(e: Error) -> (MmfStatus, String) {
    (status_of(&e), e.to_string())
}

fn mesh_ref<'a>(mesh: *const MmfMesh) -> Result<&'a MmfMesh, (MmfStatus, String)> {
    // SAFETY: callers pass either null or a handle from mmf_mesh_generate that has not been freed.
    unsafe { mesh.as_ref() }.ok_or((MmfStatus::NullPointer, "null mesh handle".into()))
}

fn out_ref<'a, T>(out: *mut T) -> Result<&'a mut T, (MmfStatus, String)> {
    // SAFETY: a non-null output pointer must be valid for writes, as documented.
    unsafe { out.as_mut() }.ok_or((MmfStatus::NullPointer, "null output pointer".into()))
}

/// Build a cubed-sphere mesh with `n_per_face`² elements per cube face at geometry order
/// `p_geom`. `fixed_order` is the frozen order of the naive strategy and is ignored otherwise.
/// On success `*out` owns a new handle.
///
/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn mmf_mesh_generate(
    n_per_face: u32,
    p_geom: u32,
    strategy: MmfStrategy,
    fixed_order: u32,
    out: *mut *mut MmfMesh,
) -> MmfStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = std::ptr::null_mut();
        let strategy = match strategy {
            MmfStrategy::GeodesicOptimized => NodeStrategy::GeodesicOptimized,
            MmfStrategy::NaiveProjection => NodeStrategy::NaiveProjection { p_geom_fixed: fixed_order as usize },
        };
        let lin = generate_cubed_sphere(n_per_face as usize).map_err(lift)?;
        let inner = insert_high_order_nodes(&lin, p_geom as usize, strategy).map_err(lift)?;
        *out = Box::into_raw(Box::new(MmfMesh { inner }));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `mesh` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn mmf_mesh_free(mesh: *mut MmfMesh) {
    if !mesh.is_null() {
        // SAFETY: the handle came from Box::into_raw in mmf_mesh_generate.
        drop(unsafe { Box::from_raw(mesh) });
    }
}

/// # Safety
/// `mesh` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn mmf_mesh_element_count(mesh: *const MmfMesh, out: *mut usize) -> MmfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        *out_ref(out)? = m.inner.mappings.len();
        Ok(())
    })
}

/// Control nodes per element, (p_geom + 1)².
///
/// # Safety
/// `mesh` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn mmf_mesh_nodes_per_element(mesh: *const MmfMesh, out: *mut usize) -> MmfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        *out_ref(out)? = (m.inner.p_geom + 1) * (m.inner.p_geom + 1);
        Ok(())
    })
}

/// Maximum linear edge length.
///
/// # Safety
/// `mesh` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn mmf_mesh_h(mesh: *const MmfMesh, out: *mut f64) -> MmfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        *out_ref(out)? = m.inner.linear.h;
        Ok(())
    })
}

/// Copy control-node coordinates as x, y, z triples, element-major, into `buf` of
/// `len` doubles. Needs 3 × elements × nodes-per-element entries.
///
/// # Safety
/// `mesh` must be null or a live handle; `buf` null or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mmf_mesh_copy_nodes(mesh: *const MmfMesh, buf: *mut f64, len: usize) -> MmfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        if buf.is_null() {
            return Err((MmfStatus::NullPointer, "null buffer".into()));
        }
        let need: usize = m.inner.mappings.iter().map(|e| 3 * e.control_nodes.len()).sum();
        if len < need {
            return Err((MmfStatus::BufferTooSmall, format!("buffer holds {len} values, {need} needed")));
        }
        // SAFETY: buf is non-null and valid for len ≥ need writes.
        let out = unsafe { std::slice::from_raw_parts_mut(buf, need) };
        for (k, x) in m.inner.mappings.iter().flat_map(|e| e.control_nodes.iter()).enumerate() {
            out[3 * k..3 * k + 3].copy_from_slice(&[x.x, x.y, x.z]);
        }
        Ok(())
    })
}

/// RMS radius error at the element vertices.
///
/// # Safety
/// `mesh` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn mmf_mesh_error(mesh: *const MmfMesh, out: *mut f64) -> MmfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        *out_ref(out)? = mesh_error(&m.inner);
        Ok(())
    })
}

/// RMS radius error over a dense sampling of every element.
///
/// # Safety
/// `mesh` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn mmf_mesh_gae(mesh: *const MmfMesh, out: *mut f64) -> MmfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        *out_ref(out)? = geometric_approximation_error(&m.inner, metrics::default_sampling_order(m.inner.p_geom));
        Ok(())
    })
}

/// Write the mesh as JSON to the UTF-8 path `path`.
///
/// # Safety
/// `mesh` must be null or a live handle; `path` null or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mmf_mesh_write_json(mesh: *const MmfMesh, path: *const c_char) -> MmfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        if path.is_null() {
            return Err((MmfStatus::NullPointer, "null path".into()));
        }
        // SAFETY: path is non-null and NUL-terminated per the contract.
        let p = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| (MmfStatus::InvalidInput, "path is not UTF-8".to_string()))?;
        mmf_sphere::mesh::io::write_mesh(&m.inner, Path::new(p)).map_err(lift)
    })
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn mmf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mmf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
