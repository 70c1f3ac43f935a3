"""Smoke test for the pitree_py extension module.

Build and run from the repository root:

    cargo build --release -p pitree-python --features extension-module
    cp target/release/libpitree_py.so python/pitree_py.so
    python3 python/smoke_test.py
"""

import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import pitree_py as pt


def main() -> None:
    ex3 = pt.Expr("ex3")
    assert str(ex3) == "ex3"
    assert ex3.ratio("0", 3) == Fraction(1, 5)
    assert ex3.ratio("0", 5) == Fraction(1, 2)
    assert ex3.count(101) == 2**51

    sft = pt.Expr("sft{00,01,11}")
    assert sft.levels(2) == ["00", "01", "11"]
    assert sft.theta("0000") == 4
    assert sft.theta("1111") == 2
    assert sft.mu("11") == Fraction(1, 2)
    assert sft.phi_map("10") == "11"

    report = sft.homog(12)
    assert report["ss"]["ok"] is False
    assert report["nhom"]["ok"] is True
    assert report["ahom"]["c"] == 6

    lam = pt.Expr("union(cyl(00,full),cyl(1,full))").lambda_report("00", 16)
    assert lam["stable"] is True
    assert lam["inf"] == lam["sup"] == "1/3"

    path = ex3.produce_path("10110", 8)
    assert path["bits_consumed"] == 5

    emp = sft.empirical_measure(6, 50_000)
    assert Fraction(emp["tv"]) < Fraction(1, 50)

    result = pt.run_verify(8)
    assert result["ok"], result

    try:
        pt.Expr("prod(full")
    except ValueError as e:
        assert "position" in str(e)
    else:
        raise AssertionError("parse error not raised")

    print(f"pitree_py {pt.__version__}: smoke test passed ({len(pt.BUILTINS)} built-ins)")


if __name__ == "__main__":
    main()
