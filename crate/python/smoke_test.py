"""Smoke test for the fusionlab_py extension.

Build and copy the module first:

    cargo build -p fusionlab-py --release --features extension-module
    cp target/release/libfusionlab_py.so python/fusionlab_py.so
"""

import cmath
import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import fusionlab_py as fl


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(b))


def test_log_series():
    z = fl.LogSeries.monomial(1.0)
    g = fl.LogSeries.power_series([1.0] * 25)
    prod = z * g
    assert prod.coeff(3.0, 0) == 1.0
    val, tail = g.eval(0.25)
    assert close(val, 1 / 0.75, 1e-12), val
    logz = fl.LogSeries.monomial(0.0, logpow=1)
    assert close(logz.eval(-2.0 + 1e-3j)[0], cmath.log(-2.0 + 1e-3j))
    back = fl.LogSeries.from_json(prod.to_json())
    assert back == prod
    assert len(prod.derive()) == len(prod)
    try:
        logz.eval(0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("eval at 0 should fail")


def test_fock():
    m = fl.FockModule("1/2", 8)
    assert [m.dim(g) for g in range(6)] == [1, 1, 2, 3, 5, 7]
    assert m.weight([]) == "1/8"
    assert m.weight([2, 1]) == "25/8"


def test_correlators():
    x, y = 7.0, 4.0
    cf = fl.closed_form_4pt(["1", "1", "1"], x, y)
    assert close(cf, 84.0)
    val, tail = fl.mode_sum(["1", "1", "1"], x, y, g_max=12)
    assert close(val, cf, 1e-9)
    assert close(fl.closed_form_5pt(["1", "1", "1", "1"], 7.0, 6.0, 4.0), 1008.0)


def test_reduce():
    r = fl.reduce(["1/2", "1", "1/3"], v=[2, 1], w=[1], normalization="f")
    assert len(r) > 0 and r.steps > 0
    x, y = 7.0 + 0.5j, 3.0 - 0.2j
    direct, tail = fl.mode_sum(["1/2", "1", "1/3"], x, y, v=[2, 1], w=[1], g_max=16)
    assert abs(r.eval(x, y) - direct) <= 1e-6 * abs(direct) + 10 * tail, (r.eval(x, y), direct)


def test_checks():
    rep = fl.check_associativity(count=4)
    assert rep.passed, rep
    assert len(rep.values()) == 4
    json.loads(rep.to_json())
    pent = fl.check_pentagon(max_grade=6)
    assert pent.passed, pent
    assert close(pent.oracle, 1008.0)
    assert len(pent.values()) == 5


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok  {name}")
