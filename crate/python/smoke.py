"""Smoke test for the Python bindings.

Build the extension first:

    cargo build -p monoid-pcsp-py --features extension-module --release

then run `python3 python/smoke.py`. The script loads the shared library straight from
`target/` when `monoid_pcsp` is not installed.
"""

import importlib.machinery
import importlib.util
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "crates" / "core" / "data"


def load():
    try:
        import monoid_pcsp

        return monoid_pcsp
    except ImportError:
        pass
    for profile in ("release", "debug"):
        for suffix in ("so", "dylib"):
            path = ROOT / "target" / profile / f"libmonoid_pcsp.{suffix}"
            if path.exists():
                loader = importlib.machinery.ExtensionFileLoader("monoid_pcsp", str(path))
                spec = importlib.util.spec_from_loader("monoid_pcsp", loader)
                module = importlib.util.module_from_spec(spec)
                loader.exec_module(module)
                return module
    sys.exit("monoid_pcsp extension not found; build it with the extension-module feature")


def template(mp, name):
    return mp.Template.parse((DATA / name).read_text())


def main():
    mp = load()

    z4 = mp.FiniteMonoid.by_name("cyclic:4")
    assert len(z4) == 4 and z4.mul(3, 3) == 2 and z4.inverse(1) == 3
    assert z4.is_commutative() and z4.is_completely_regular()
    ff = mp.FiniteMonoid.by_name("flipflop1")
    quotient, classes = mp.ab_reg(ff)
    assert len(quotient) == 2 and classes == [[0], [1, 2]]

    intro = template(mp, "intro_M.nf")
    for n in range(2, 10):
        c = mp.classify(intro, template(mp, f"introN_{n}.mon"))
        expected = "TRACTABLE" if n % 3 == 0 else "NP-HARD"
        assert c["verdict"] == expected, (n, c)
        if n % 3 == 0:
            assert c["sandwich_valid"]

    try:
        mp.classify(template(mp, "intro_closed.nf"), template(mp, "introN_4.mon"))
        raise AssertionError("expected a promise violation")
    except mp.PromiseViolation:
        pass

    inst = mp.Instance.parse((DATA / "intro.inst").read_text())
    assert mp.solve(template(mp, "intro_closed.nf"), inst) is None
    assert mp.oracle(template(mp, "introN_4.mon"), inst) is not None

    odd = mp.Template.finite(mp.FiniteMonoid.by_name("cyclic:6"), 1, [[1], [3], [5]])
    built = mp.Instance(3)
    built.relation([0])
    built.relation([1])
    built.product(0, 1, 2)
    sol = mp.solve(odd, built)
    assert sol is not None and sol[2] % 2 == 0
    built.relation([2])
    assert mp.solve(odd, built) is None

    closed = mp.coset_closure(mp.Template.finite(z4, 1, [[1], [3]]))
    assert closed.tuples() == [[1], [3]]

    z2 = template(mp, "z2_one.mon")
    assert mp.find_block_symmetric(z2, z2, 3) is not None
    cond = mp.MinorCondition.parse((DATA / "commutative.minor").read_text())
    assert not cond.is_trivial()
    reduced = mp.pmc_reduce(cond, z2, z2, 2)
    assert mp.oracle(z2, reduced) is None

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
