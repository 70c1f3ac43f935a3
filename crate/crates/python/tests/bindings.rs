use pitree_py::pitree_py as module;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyModule>)>(f: F) {
    pyo3::append_to_inittab!(module);
    Python::initialize();
    Python::attach(|py| {
        let m = py.import("pitree_py").unwrap();
        f(py, &m);
    });
}

#[test]
fn module_round_trip() {
    with_module(|py, m| {
        let locals = PyDict::new(py);
        locals.set_item("pt", m).unwrap();
        let code = c"
from fractions import Fraction
e = pt.Expr('ex3')
assert e.ratio('0', 3) == Fraction(1, 5)
assert e.count(9) == 32
assert pt.Expr('sft{00,01,11}').theta('0000') == 4
assert pt.run_verify(6, 'branch')['ok']
try:
    pt.Expr('sft{0,11}')
    raise AssertionError('expected ValueError')
except ValueError:
    pass
";
        py.run(code, None, Some(&locals)).unwrap();
    });
}
