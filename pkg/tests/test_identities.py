import dataclasses
from fractions import Fraction as F

import pytest

from qverify.errors import ExactModeUnsupported, UnknownIdentity
from qverify.identities import (domain_validate, evaluate_identity, get, ids,
                                register_all, sample_params)
from qverify.identities.base import evaluate

ALL_IDS = [
    "GENFUN_SA", "GENFUN_CAUCHY", "QBINOM_THM", "EULER", "EULER_INV",
    "THM1_3_T", "THM1_3_E", "COR1_4_T", "COR1_4_E",
    "THM2_1a", "THM2_1b", "THM2_2a", "THM2_2b", "COR2_3a", "COR2_3b",
    "CHU", "THM3_1", "THM3_2", "REMARK3",
    "AA", "PROP4_2a", "PROP4_2b", "THM4_3", "THM4_4",
]
EXACT_IDS = {"CHU", "THM3_2", "REMARK3"}
# cheap enough to sample in the unit suite; the rest run in the acceptance suite
QUICK = ["GENFUN_SA", "GENFUN_CAUCHY", "QBINOM_THM", "EULER", "EULER_INV", "CHU",
         "THM3_2", "REMARK3", "COR1_4_T", "COR1_4_E", "THM2_2a", "COR2_3a", "AA"]


def test_registry_contents():
    assert ids() == ALL_IDS
    defs = register_all()
    assert len({d.id for d in defs}) == len(defs) == 24
    for d in defs:
        assert d.anchor, d.id
        assert d.default_tol > 0


def test_anchors():
    assert get("CHU").anchor == "q-Chu-Vandermonde summation formula is recalled"
    assert get("THM2_1a").anchor == "(r,f,g;q)_{j+i} u^{j+i}"


def test_exact_capability():
    assert {d.id for d in register_all() if d.exact_capable} >= EXACT_IDS
    assert get("CHU").exact_capable
    assert not get("AA").exact_capable


def test_integer_slot_for_terminating_parameter():
    slots = {s.name: s for s in get("THM4_3").slots}
    assert slots["M"].kind == "int" and slots["M"].lo == 1


def test_unknown_identity():
    with pytest.raises(UnknownIdentity):
        get("NOPE")
    with pytest.raises(UnknownIdentity):
        evaluate_identity("NOPE", {})
    with pytest.raises(UnknownIdentity):
        sample_params("NOPE", 1, 1)


def test_chu_exact_example():
    rep = evaluate_identity("CHU", {"n": 1, "x": "1/3", "y": "1/5", "q": "1/2"}, "exact")
    assert rep.verdict == "pass"
    assert rep.lhs == rep.rhs == F(1, 6)


def test_thm3_2_collapses_at_m_zero():
    p = {"n": 4, "m": 0, "x": F(2, 7), "y": F(-3, 5), "q": F(2, 3)}
    chu = evaluate_identity("CHU", {k: p[k] for k in ("n", "x", "y", "q")}, "exact")
    rep = evaluate_identity("THM3_2", p, "exact")
    assert rep.verdict == "pass" and rep.lhs == chu.lhs


def test_qbinomial_float_example():
    rep = evaluate_identity("QBINOM_THM", {"a": "1/4", "z": "1/2", "q": "1/2"}, "float")
    assert rep.verdict == "pass" and rep.rel_residual <= 1e-10


def test_andrews_askey_example():
    rep = evaluate_identity("AA", {"a": 0, "b": 0, "c": "1/3", "d": "1/2", "q": "1/2"}, "float")
    assert rep.verdict == "pass" and rep.rel_residual <= 1e-9


def test_exact_mode_refused_for_float_identities():
    with pytest.raises(ExactModeUnsupported):
        evaluate_identity("AA", {"a": 0, "b": 0, "c": "1/3", "d": "1/2", "q": "1/2"}, "exact")


def test_bad_mode():
    with pytest.raises(ValueError):
        evaluate_identity("CHU", {"n": 1, "x": 1, "y": 1, "q": 0.5}, "fuzzy")


def test_domain_violation_is_skipped_not_raised():
    rep = evaluate_identity("QBINOM_THM", {"a": 0.3, "z": 1.2, "q": 0.5})
    assert rep.verdict == "skipped-domain"
    assert any("|z|" in v for v in rep.diagnostics["violations"])


def test_report_serialises():
    d = evaluate_identity("CHU", {"n": 2, "x": "1/3", "y": "1/5", "q": "1/2"}, "exact").to_dict()
    assert d["verdict"] == "pass" and d["params"]["x"] == "1/3"


# -- domain validation ------------------------------------------------------------------

def test_domain_examples():
    assert any("|z|" in v for v in domain_validate("QBINOM_THM", {"a": 0.3, "z": 1.2, "q": 0.5}))
    # ac = 0.5, ad = 0.3, bc = 0.2, bd = 0.12
    assert domain_validate("AA", {"a": 1.0, "b": 0.4, "c": 0.5, "d": 0.3, "q": 0.5}) == []
    p = {"n": 2, "x": 0.3, "y": 0.0, "r": 0.1, "f": 0.1, "g": 0.1, "v": 0.2, "w": 0.2,
         "u": 0.1, "q": 0.5}
    assert any("y" in v for v in domain_validate("THM3_1", p))


def test_domain_integer_range():
    bad = domain_validate("CHU", {"n": 31, "x": "1/3", "y": "1/5", "q": "1/2"}, "exact")
    assert bad == ["0 <= n <= 30"]


def test_domain_margin():
    # inside |z| < 1 but not inside the safety margin
    assert domain_validate("EULER", {"z": 0.97, "q": 0.5})
    assert domain_validate("EULER", {"z": 0.9, "q": 0.5}) == []


# -- samplers ---------------------------------------------------------------------------

def test_sampler_deterministic():
    a = sample_params("CHU", 7, 3)
    assert len(a) == 3 and a == sample_params("CHU", 7, 3)
    assert a != sample_params("CHU", 8, 3)
    for p in a:
        assert domain_validate("CHU", p) == []


def test_sampler_exact_draws_rationals():
    for p in sample_params("THM3_2", 3, 20, mode="exact"):
        assert all(isinstance(v, (int, F)) for v in p.values())
        assert p["n"] <= 10 and p["m"] <= 10


def test_sampler_refuses_exact_for_float_identity():
    with pytest.raises(ValueError):
        sample_params("AA", 1, 1, mode="exact")


def test_sampler_margin():
    pts = sample_params("EULER", 11, 100)
    assert len(pts) == 100
    assert all(abs(p["z"]) <= 0.95 * (1 - 0.05) for p in pts)


def test_grid_strategy():
    pts = sample_params("THM4_3", 5, 2, strategy="grid")
    assert [p["M"] for p in pts] == [1, 1, 2, 2, 3, 3, 4, 4]
    pts = sample_params("REMARK3", 5, 1, strategy="grid", mode="exact")
    assert [p["m"] for p in pts] == list(range(21))


def test_integer_range_override():
    pts = sample_params("CHU", 2, 30, int_ranges={"n": (3, 4)})
    assert {p["n"] for p in pts} <= {3, 4}


def test_bad_strategy():
    with pytest.raises(ValueError):
        sample_params("CHU", 1, 1, strategy="sobol")


@pytest.mark.parametrize("ident", QUICK)
def test_sampled_points_pass(ident):
    mode = "exact" if ident in EXACT_IDS else "float"
    for p in sample_params(ident, 99, 5, mode=mode):
        rep = evaluate_identity(ident, p, mode)
        assert rep.verdict == "pass", (p, rep.to_dict())


@pytest.mark.parametrize("ident", sorted(set(ALL_IDS) - set(QUICK)))
def test_every_identity_passes_one_sample(ident):
    p = sample_params(ident, 123, 1)[0]
    rep = evaluate_identity(ident, p)
    assert rep.verdict == "pass", (p, rep.to_dict())


def test_negative_control_detects_wrong_value():
    # a right side off by 0.1% must fail, with partial-sum traces attached
    idef = get("QBINOM_THM")

    def bent(p, ctx):
        res = idef.rhs(p, ctx)
        return getattr(res, "value", res) * (1 + 1e-3)
    rep = evaluate(dataclasses.replace(idef, rhs=bent), {"a": 0.3, "z": 0.4, "q": 0.5})
    assert rep.verdict == "fail"
    assert rep.rel_residual == pytest.approx(1e-3, rel=1e-2)
    assert rep.diagnostics["lhs_trace"]
