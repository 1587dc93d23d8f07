import pytest
from hypothesis import given
from hypothesis import strategies as st

from blockclean.rules import (
    Predicate,
    Rule,
    RuleError,
    RuleKind,
    parse_rule_line,
    parse_rule_lines,
    parse_rules,
    rule_to_text,
    to_mln_clause,
)

SCHEMA = ["HN", "CT", "ST", "PN"]


def test_fd():
    r = parse_rule_line("FD: CT -> ST", 1, SCHEMA)
    assert r.kind is RuleKind.FD
    assert r.reason == (Predicate("CT"),)
    assert r.result == (Predicate("ST"),)


def test_cfd_constants():
    r = parse_rule_line('CFD: HN="ELIZA", CT="BOAZ" -> PN="2567688400"', 3, SCHEMA)
    assert r.kind is RuleKind.CFD
    assert r.reason == (Predicate("HN", "ELIZA"), Predicate("CT", "BOAZ"))
    assert r.result == (Predicate("PN", "2567688400"),)


def test_dc_last_predicate_is_result():
    r = parse_rule_line("DC: !(PN(t)=PN(t') & ST(t)!=ST(t'))", 2, SCHEMA)
    assert r.kind is RuleKind.DC
    assert r.reason_attributes == ("PN",)
    assert r.result == (Predicate("ST", negated=True),)


def test_parse_file_ids_and_comments(hospital_rules):
    assert [r.rule_id for r in hospital_rules] == [1, 2, 3]
    assert [r.kind for r in hospital_rules] == [RuleKind.FD, RuleKind.DC, RuleKind.CFD]


def test_multi_attribute_fd():
    r = parse_rule_line("FD: HN, CT -> ST, PN", 1, SCHEMA)
    assert r.reason_attributes == ("HN", "CT")
    assert r.result_attributes == ("ST", "PN")


@pytest.mark.parametrize(
    "line, message",
    [
        ("FD: CT -> ZIP", "unknown attribute"),
        ("DC: !(PN(t)=PN(t') & ST(t)!=ST(t') & CT(t)=CT(t'))", "unsupported DC form"),
        ('DC: !(PN(t)="1" & ST(t)!=ST(t\'))', "unsupported DC form"),
        ("DC: !(PN(t)=ST(t') & ST(t)!=ST(t'))", "unsupported DC form"),
        ("DC: !(ST(t)!=ST(t'))", "unsupported DC form"),
        ("DC: !(PN(t)=PN(t'') & ST(t)!=ST(t'))", "unsupported DC form"),
        ('FD: CT="X" -> ST', "only allowed in CFD"),
        ("FD: CT ST", "missing '->'"),
        ("XX: CT -> ST", "unknown rule kind"),
        ("FD: CT -> CT", "only once"),
    ],
)
def test_rejections(line, message):
    with pytest.raises(RuleError, match=message):
        parse_rule_line(line, 1, SCHEMA)


def test_error_names_line(tmp_path):
    p = tmp_path / "r.txt"
    p.write_text("# c\nFD: CT -> ST\n\nFD: CT -> NOPE\n")
    with pytest.raises(RuleError, match=r"r.txt:4"):
        parse_rules(p, SCHEMA)


def test_missing_rules_file(tmp_path):
    with pytest.raises(RuleError, match="nothere"):
        parse_rules(tmp_path / "nothere.rules")


def test_mln_clauses(hospital_rules):
    r1, r2, r3 = hospital_rules
    assert to_mln_clause(r1) == "¬CT ∨ ST"
    assert to_mln_clause(r3) == '¬HN("ELIZA") ∨ ¬CT("BOAZ") ∨ PN("2567688400")'
    assert to_mln_clause(r2) == "¬(PN(t)=PN(t')) ∨ ¬(ST(t)≠ST(t'))"


def test_clause_has_one_literal_per_predicate():
    r = parse_rule_line("FD: HN, CT -> ST", 1, SCHEMA)
    assert to_mln_clause(r).count("∨") == len(r.reason) + len(r.result) - 1


names = st.sampled_from(["A", "B", "C", "D", "E", "F_1", "g.h"])
constants = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=8)


@st.composite
def rules(draw):
    kind = draw(st.sampled_from(list(RuleKind)))
    attrs = draw(st.lists(names, min_size=2, max_size=5, unique=True))
    cut = draw(st.integers(1, len(attrs) - 1))
    if kind is RuleKind.DC:
        reason = tuple(Predicate(a) for a in attrs[:-1])
        return Rule(1, kind, reason, (Predicate(attrs[-1], negated=True),))

    def pred(a):
        if kind is RuleKind.CFD and draw(st.booleans()):
            return Predicate(a, draw(constants))
        return Predicate(a)

    return Rule(1, kind, tuple(pred(a) for a in attrs[:cut]), tuple(pred(a) for a in attrs[cut:]))


@given(rules())
def test_printer_parser_inverse(rule):
    back = parse_rule_line(rule_to_text(rule), 1)
    assert back.same_shape(rule)


@given(rules())
def test_attribute_in_exactly_one_part(rule):
    reason, result = set(rule.reason_attributes), set(rule.result_attributes)
    assert not reason & result
    assert reason | result == set(rule.attributes)


def test_parse_lines_skips_comments():
    got = parse_rule_lines(["# x", "", "  FD: A -> B  ", "# y", "FD: B -> C"])
    assert [r.rule_id for r in got] == [1, 2]
