"""Smoke test for the Python bindings.

Uses an installed `polarpunct` module if there is one, otherwise loads the
library built by `cargo build -p polarpunct-py --features extension-module`.
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import polarpunct

        return polarpunct
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libpolarpunct_py.so"
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp()) / "polarpunct.so"
            shutil.copy(lib, tmp)
            spec = importlib.util.spec_from_file_location("polarpunct", tmp)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("polarpunct extension not found; build it first")


def main():
    pp = load()

    assert pp.bit_reverse(1, 3) == 4
    assert pp.covers(7, 5) and not pp.covers(4, 3)
    assert pp.propagate(3, [2, 3, 4, 7]) == [(2, 2), (3, 1), (4, 0), (7, 4)]
    u = [1, 0, 1, 1, 0, 0, 1, 0]
    assert list(pp.encode(pp.encode(u))) == u
    assert pp.crc_check(list(pp.crc_append([1, 0, 1, 1], 8)), 8)

    code = pp.PolarCode(3, 4, "bec:0.5")
    assert code.descending_order() == [7, 6, 5, 3, 4, 2, 1, 0]
    assert code.info_set == [3, 5, 6, 7]
    x = code.encode([1, 0, 1, 1])
    llrs = [40.0 if b == 0 else -40.0 for b in x]
    assert list(code.decode(llrs)) == [1, 0, 1, 1]
    assert list(code.decode(llrs, list_size=4)) == [1, 0, 1, 1]

    wqp = pp.PuncturePattern.wqp(code, 4)
    assert wqp.source_set == [0, 1, 2, 4]
    assert wqp.analyze(code)["punctured_info_channels"] == []

    big = pp.PolarCode(8, 93, "ga:0.0")
    qup = pp.PuncturePattern.qup(8, 70)
    assert 64 in qup.destination_set

    result = pp.simulate(
        "n = 6\nk = 24\nconstruction = \"ga\"\npuncture = \"wqp\"\nq = 10\n"
        "sweep = [40.0]\n[stop]\nmax_frames = 200\nmin_frame_errors = 10\n"
    )
    assert result["points"][0]["frame_errors"] == 0
    print("smoke test ok:", big, qup)


if __name__ == "__main__":
    main()
