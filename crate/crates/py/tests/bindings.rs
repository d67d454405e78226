use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(code: &std::ffi::CStr) {
    Python::initialize();
    Python::attach(|py| {
        let m = pyo3::wrap_pymodule!(zerovar_py::zerovar_py)(py);
        let globals = PyDict::new(py);
        globals.set_item("zv", m).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn ensemble_and_intensity() {
    with_module(
        cr#"
import math
leg = zv.Ensemble.legendre(4)
assert leg.capacity == 4
assert abs(leg.mass - 2.0) < 1e-14
assert abs(zv.rho1(leg, 1, 0.0) - math.sqrt(3) / math.pi) < 1e-12
p = 2 / math.pi * math.atan(math.sqrt(3) / 2)
assert abs(zv.expected_zeros(leg, 1, -0.5, 0.5) - p) < 1e-9
assert zv.xi(0.0) == -1 / 3
assert abs(zv.omega_mass(-0.5, 0.5) - 1 / 3) < 1e-14
"#,
    );
}

#[test]
fn reports_are_dicts() {
    with_module(
        cr#"
leg = zv.Ensemble.legendre(12)
v = zv.variance(leg, 10, -0.5, 0.5)
assert not v["partial"] and v["variance"] > 0
s = zv.simulate(leg, 10, -0.5, 0.5, 200, seed=3)
assert sum(s["histogram"].values()) == 200
assert s == zv.simulate(leg, 10, -0.5, 0.5, 200, seed=3)
c = zv.sample_coefficients(3, 0, 10)
assert zv.count_zeros(leg, c, -1.0, 1.0) == zv.count_zeros_exact(leg, c, -1.0, 1.0)
"#,
    );
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(
        cr#"
leg = zv.Ensemble.legendre(4)
for call, exc in [
    (lambda: zv.rho1(leg, 9, 0.0), ValueError),
    (lambda: zv.Ensemble.jacobi(-2.0, 0.0, 4), ValueError),
    (lambda: zv.Ensemble.from_file("/nonexistent/rec.txt"), OSError),
    (lambda: zv.simulate(leg, 3, -0.5, 0.5, 100, max_flops=10.0), RuntimeError),
]:
    try:
        call()
    except exc:
        pass
    else:
        raise AssertionError("no exception")
"#,
    );
}
