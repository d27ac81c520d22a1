import pytest
from hypothesis import given, settings, strategies as st

from shortlists.bits import strings_of_length
from shortlists.demo import demo_corpus
from shortlists.shortlist import (
    HkFamily,
    MachineTable,
    StandardMachine,
    brute_force_C,
    enumerate_outputs,
    eval_U,
    eval_V,
    f,
    list_of,
)


def machine(entries, **kw):
    return StandardMachine(MachineTable(entries), HkFamily(k_max=kw.pop("k_max", 3)), **kw)


def test_dispatch_on_first_bit():
    m = machine({"01": ("11010", 3)})
    assert eval_U(m, "0" + "01") == "11010"
    assert eval_U(m, "1" + "00" + "101") == "101"
    assert eval_U(m, "") is None
    assert eval_U(m, "011") is None


def test_v_clause_one():
    m = machine({})
    assert eval_V(m, "00") == ""
    assert eval_V(m, "00" + "0110") == "0110"


def test_v_clause_two_length_guard():
    # clause 2 runs U on p, so the base program q is reached through p = "0" + q
    m = machine({"1": ("01011", 2)})
    assert eval_V(m, "01" + "01") == "01011"  # 5 > 2^2
    short = machine({"1": ("0101", 2)})
    assert eval_V(short, "01" + "01") is None  # 4 is not > 2^2


def test_step_budget():
    m = machine({"0": ("111", 50)}, step_budget=40)
    assert eval_U(m, "00") is None
    assert eval_U(machine({"0": ("111", 50)}), "00") == "111"


def test_enumeration_order_by_halting_time():
    m = machine({"000": ("0011", 5), "001": ("1111", 2)})
    xs = [x for x, _ in enumerate_outputs(m, 4)]
    assert xs.index("1111") < xs.index("0011")
    progs = dict((x, q) for x, q in enumerate_outputs(m, 4))
    assert progs["1111"] == "0001" and progs["0011"] == "0000"


def test_enumeration_deduplicates():
    m = machine({"00": ("111", 1), "01": ("111", 1), "10": ("0001", 3)})
    xs = [x for x, _ in enumerate_outputs(m, 3)]
    assert xs.count("111") == 1 and len(xs) == len(set(xs))


def test_list_structure_for_length_four():
    m = machine({}, k_max=4)
    x = "0110"
    lst = list_of(m, x)
    assert lst[0] == "00" + x
    assert [p for p in lst if p.startswith("01")] == ["01", "010", "011"]
    assert list(m.hk_range(x)) == [2, 3, 4]
    lengths = sorted({len(p) for p in lst if p.startswith("1")})
    assert lengths == [1 + 3, 1 + 4, 1 + 5]


def test_list_of_single_bit():
    m = machine({})
    lst = list_of(m, "1")
    assert lst[0] == "001"
    assert not any(p.startswith("01") for p in lst)
    tails = [p[1:] for p in lst if p.startswith("1")]
    assert set(tails) == {"0", "1"} | set(strings_of_length(2))
    assert f(m, "1") == ["1" + p for p in dict.fromkeys(lst)]


def test_trivial_program_always_listed():
    m = machine({"0": ("1", 1)})
    for x in ("0", "101", "1100110"):
        assert "100" + x in f(m, x)
        assert eval_U(m, "100" + x) == x


def test_brute_force_examples():
    m = machine({})
    rec = brute_force_C(m, "0", 6)
    assert rec.C_U == 4 and rec.witness == "1000"
    m = machine({"101": ("00111100", 4)})
    rec = brute_force_C(m, "00111100", 11)
    assert rec.C_U == 4 and rec.witness == "0101"
    assert brute_force_C(machine({}), "0101", 3).C_U is None


@pytest.mark.parametrize("k,plen", [(3, 2), (4, 3)])
def test_session_decodes_matched_outputs(k, plen):
    hi = min(2**k, k + 3)
    entries = {}
    for i, q in enumerate(strings_of_length(plen)):
        n = k + i % (hi - k + 1)
        entries[q] = (format(i + 1, f"0{n}b")[-n:], 1 + i)
    m = StandardMachine(MachineTable(entries), HkFamily(k_max=4))
    sess = m.session(k)
    assert set(sess.requests) == {x for x, _ in entries.values()}
    assert len(sess.discarded) < sess.bound
    assert len(sess.decoded) == len(sess.requests) - len(sess.discarded)
    for r, (x, _) in sess.decoded.items():
        assert len(r) == k + 1
        assert eval_V(m, "1" + r) == x
        assert eval_U(m, "11" + r) == x


def test_beyond_k_max_diverges():
    m = machine({}, k_max=2)
    assert eval_V(m, "1" + "0000") is None
    assert list(m.hk_range("0" * 8)) == [] and m.family.graph(3) is None


_shared = machine({"0": ("1", 1)})


@settings(max_examples=30, deadline=None)
@given(st.text("01", min_size=1, max_size=9))
def test_f_is_deduplicated_translation(x):
    m = _shared
    fx = f(m, x)
    assert len(fx) == len(set(fx))
    assert set(fx) == {"1" + v for v in list_of(m, x)}


def test_soundness_on_demo(demo_machine):
    for x in demo_corpus(demo_machine.base)[:30]:
        rec = brute_force_C(demo_machine, x, len(x) + 3)
        assert rec.found and eval_U(demo_machine, rec.witness) == x
        best = demo_machine.best_in_list(x)
        assert eval_U(demo_machine, best) == x and len(best) <= len(x) + 3
