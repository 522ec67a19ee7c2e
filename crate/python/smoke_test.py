"""Smoke test for the compiled extension.

    maturin develop --release && python python/smoke_test.py
"""

import pathlib

import patchlab

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def check_ring():
    r = patchlab.Ring(3, m=2, q=1, N=1)
    assert r.basis_size == 3 and r.log_order == 6
    g = r.generator("gamma1")
    x = r.add(g, r.element([-1, 0, 0]))
    assert not r.is_unit(x)
    assert r.augment(x) == 0
    u = r.add(x, r.one())
    assert r.mul(u, r.inv(u)) == r.one()


def check_snf():
    out = patchlab.snf([[2, 4], [6, 8]], p=2, m=3)
    assert out["vals"] == [1, 2] and out["rank"] == 2
    assert out["cokernel_exps"] == [2, 1]


def check_complex():
    r = patchlab.Ring(2, m=2)
    # Z/4 --2--> Z/4: H^0 = Z/2, H^1 = Z/2.
    c = patchlab.Complex(r, 0, [1, 1], [[[[2]]]])
    assert c.cohomology(0) == [1] and c.cohomology(1) == [1]
    # A unit differential splits off entirely.
    s = patchlab.Complex(r, 0, [2, 2], [[[[1], [0]], [[0], [2]]]])
    m = s.minimize()
    assert m.ranks == [1, 1] and m.is_minimal()
    assert m.euler_characteristic() == s.euler_characteristic()
    try:
        patchlab.Complex(r, 0, [1, 1, 1], [[[[1]]], [[[1]]]])
    except ValueError as e:
        assert "E_INVALID_COMPLEX" in str(e)
    else:
        raise AssertionError("d^2 != 0 accepted")


def check_numerology():
    out = patchlab.numerology(2, 0, 1)
    assert out["l0"] == 1 and out["infinity_identity"]["equal"]


def check_patching():
    out = patchlab.patch_free(3, 1, 1, 0, 2)
    assert out["chain_compatible"]
    assert out["conclusions"]["all_pass"]
    assert out["conclusions"]["depth_target"] == 2


def check_scenarios():
    code, report = patchlab.run_scenario((FIXTURES / "pair_identity.json").read_text())
    assert code == 0, report
    code, report = patchlab.run_scenario((FIXTURES / "pair_corrupted_link.json").read_text(), "patch-pair")
    assert code == 2
    assert report["steps"][0]["result"]["failure"]["level"] == 2
    code, report = patchlab.selfcheck(parallel=True)
    assert code == 0 and report["summary"]["all_pass"]


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("check_"):
            fn()
            print("ok", name[len("check_"):])
