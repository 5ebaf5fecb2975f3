import json
from fractions import Fraction

import pytest

from qfold.catalog import CatalogError, affine, load_catalog, load_text, verify_entry
from qfold.cli import main


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


def test_catalog_shape(catalog):
    assert len(catalog) == 48
    assert {e.status for e in catalog.values()} == {"theorem", "conjecture-in-paper"}
    assert all(catalog[f"d4-3-mod9-{i}"].status == "conjecture-in-paper" for i in (1, 2, 3))
    assert "tadpole-stembridge-n5" in catalog and "a-odd-chain-n2" in catalog


def test_every_entry_at_low_order(catalog):
    bad = [r.line() for r in (verify_entry((e, 30)) for e in catalog.values()) if not r.passed]
    assert bad == []


def test_affine_strings():
    assert affine("2*n+4", 3) == 10
    assert affine("(n+2)/4", 3) == Fraction(5, 4)
    assert affine(7) == 7
    with pytest.raises(CatalogError):
        affine("n**2", 2)


def test_printed_capparelli_product_fails_at_q1():
    text = """
[[identity]]
id = "capparelli-as-printed"
status = "theorem"
sum = { kind = "fold-dual", fold = "D4^3", scale = 6 }
product.theta_inverse = { modulus = 12, args = [1, 3] }
"""
    (entry,) = load_text(text)
    r = entry.verify(40)
    assert not r.passed and r.first_mismatch == 1


def test_loader_errors():
    with pytest.raises(CatalogError):
        load_text('[[identity]]\nid = "x"\nstatus = "maybe"\nsum = { kind = "jtp", k = 1 }\n')
    with pytest.raises(CatalogError):
        load_text("[[identity]\n")
    (e1, e2) = load_text('[[identity]]\nid = "j"\nstatus = "theorem"\nn = [1, 2]\nsum = { kind = "jtp", k = "n" }\n')
    assert (e1.id, e2.id) == ("j-n1", "j-n2")


def test_verify_json(capsys):
    assert main(["verify", "mod10-A", "jtp-n2", "--order", "40", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [r["id"] for r in out] == ["mod10-A", "jtp-n2"]
    assert set(out[0]) == {"id", "status", "result", "order", "first-mismatch", "wall-time", "detail"}
    assert out[0]["result"] == "pass" and out[0]["first-mismatch"] is None


def test_verify_text_and_errors(capsys):
    assert main(["verify", "e6-2-nandi1", "--order", "30"]) == 0
    assert "PASS e6-2-nandi1 [theorem] to order 30" in capsys.readouterr().out
    assert main(["verify", "no-such-id"]) == 2
    assert main(["verify"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["verify", "mod10-A", "--order", "0"])
    assert info.value.code == 2


def test_list(capsys):
    assert main(["list"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 48


def test_fold_output(capsys):
    assert main(["fold", "D4^3"]) == 0
    out = capsys.readouterr().out
    assert "[ 6, -3]\n[-3,  2]" in out and "3*A[nu]^-1 =\n[2, 3]\n[3, 6]" in out
    assert main(["fold", "E6^2"]) == 0
    out = capsys.readouterr().out
    assert "2*A[nu]^-1 =" in out and "[ 4,  6,  4,  2]" in out
    assert main(["fold", "A2n^2", "--n", "3"]) == 0
    assert "[ 0, -1,  1]" in capsys.readouterr().out
    assert main(["fold", "B3^2"]) == 2


def test_certify_builtins(capsys):
    assert main(["certify", "--builtin", "nine-term"]) == 0
    assert "MATCH: identical" in capsys.readouterr().out
    assert main(["certify", "--builtin", "three-copy-n1", "--at", "1,2,3,4", "--numeric-order", "30"]) == 0
    out = capsys.readouterr().out
    assert "MATCH" in out and "PASS" in out
    assert main(["certify", "--builtin", "nope"]) == 2


def test_certify_files(tmp_path, capsys):
    good = tmp_path / "good.txt"
    good.write_text("# three copies\nnh4(0,0,0,0) + nh4(0,0,0,1) - x*q^3*nh4(4,8,6,4)\n", encoding="utf-8")
    assert main(["certify", str(good), "--target", "n4(0,0,0,0)", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["match"] is True
    assert main(["certify", str(good), "--target", "S(0,0,0,0)"]) == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("n1(0,0,0,0) +\n  q*m1(0,0,0)\n", encoding="utf-8")
    assert main(["certify", str(bad)]) == 2
    assert "line 2, column" in capsys.readouterr().err
    assert main(["certify", str(tmp_path / "missing.txt")]) == 2


def test_partitions_commands(capsys):
    assert main(["partitions", "count", "N1", "--max-weight", "6"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "0 1" and lines[4] == "4 2"
    assert main(["partitions", "count", "N1", "--max-weight", "4", "--x-degree", "2"]) == 0
    assert capsys.readouterr().out.splitlines()[4] == "4 2 x^1:1 x^2:1"
    assert main(["partitions", "witness", "N", "7+4+4"]) == 1
    assert "differences [3, 0] (odd weight)" in capsys.readouterr().out
    assert main(["partitions", "witness", "N1", "8+5+5"]) == 0
    assert main(["partitions", "witness", "N", "1+2"]) == 2


def test_series_command(capsys):
    assert main(["series", "S(0,0,0,0)", "--order", "6", "--x-degree", "2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("q^0 : 1")
    assert main(["series", "T(0,0,0,0)"]) == 2
