"""Smoke tests for the Python bindings."""

import pathlib

import pytest

import stellar

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def test_terms_and_unification():
    t = stellar.Term("+c(f(X))")
    assert str(t.opposite()) == "-c(f(X))"
    assert str(t.underlying()) == "c(f(X))"
    assert stellar.Term("s(s(0))").depth == 3
    assert stellar.unify(stellar.Term("add(0,Y,Y)"), stellar.Term("add(X,Y,Z)")) is not None
    assert stellar.unify(stellar.Term("X"), stellar.Term("s(X)")) is None
    assert stellar.matchable(stellar.Term("+c(X)"), stellar.Term("-c(0)"), ["c"])


def test_parse_errors_are_value_errors():
    with pytest.raises(ValueError):
        stellar.Constellation("[+f(X,]")


def test_two_plus_two():
    phi = stellar.Constellation((DATA / "add2p2.stl").read_text())
    assert len(phi) == 3
    result = stellar.execute(phi)
    assert result["complete"]
    assert [str(s) for s in result["stars"]] == ["[s(s(s(s(0))))]"]


def test_properties():
    props = stellar.analyze(stellar.Constellation("[+a(X),+a(X)]; [-a(X),-a(X),X];"))
    assert props == {"exact": True, "acyclic": False, "connected": True, "monovalent": False}


def test_encodings():
    answers = stellar.run_logic_program((DATA / "add.lp").read_text())
    assert [str(s) for s in answers["stars"]] == ["[s(s(s(s(s(0)))))]"]
    machine = (DATA / "ab_machine.tm").read_text()
    assert stellar.run_turing_machine(machine, "ab") == "ACCEPT"
    assert stellar.run_turing_machine(machine, "a") == "REJECT"


def test_mll():
    assert stellar.mll_check((DATA / "correct_net.psj").read_text()) == "MLL-correct"
    assert stellar.mll_check((DATA / "loop.psj").read_text()) == "incorrect"
    result = stellar.mll_normalise((DATA / "correct_cut.psj").read_text())
    assert [str(s) for s in result["stars"]] == ["[+c(p3(X)), +c(p6(X))]"]
