import numpy as np
import pytest

from rulenet import datagen, ruleset
from rulenet.datagen import GeneratorConfig, generate_tuples
from rulenet.errors import RuleError
from rulenet.extractor import DiscreteRule
from rulenet.ruleset import (
    CategoryIs,
    CategoryIsNot,
    EvalReport,
    Interval,
    Rule,
    RuleSet,
    evaluate,
    format_rules,
    from_extraction,
    parse_rules,
    rewrite_to_attributes,
    simplify,
    stats_csv,
)

from test_datagen import make_tuple


class TestRewrite:
    def test_figure_style_rule(self, scheme):
        # I2=0, I17=0, I13=0: salary below 100000, commission zero (below
        # its lowest band), age below 40.
        bit_rule = DiscreteRule(((1, 0), (16, 0), (12, 0)), 0)
        rule = rewrite_to_attributes(bit_rule, scheme, ("A", "B"))
        assert rule == Rule(
            (Interval("salary", None, 100000.0),
             Interval("commission", None, 10000.0),
             Interval("age", None, 40.0)),
            "A",
        )

    def test_interval_merge(self, scheme):
        # salary >= 50000 and salary < 100000 collapse to one interval.
        bit_rule = DiscreteRule(((3, 1), (1, 0)), 0)
        rule = rewrite_to_attributes(bit_rule, scheme, ("A", "B"))
        assert rule.conditions == (Interval("salary", 50000.0, 100000.0),)

    def test_vacuous_bounds_dropped(self, scheme):
        # I6=1 is salary >= 20000, true on the whole domain.
        bit_rule = DiscreteRule(((5, 1),), 0)
        rule = rewrite_to_attributes(bit_rule, scheme, ("A", "B"))
        assert rule.conditions == ()

    def test_one_hot_conditions(self, scheme):
        bit_rule = DiscreteRule(((23, 1), (43, 0), (44, 0)), 0)
        rule = rewrite_to_attributes(bit_rule, scheme, ("A", "B"))
        assert rule.conditions == (
            CategoryIs("car", 1),
            CategoryIsNot("zipcode", (1, 2)),
        )

    def test_empty_interval_rejected(self, scheme):
        # salary >= 50000 with salary < 25000
        bit_rule = DiscreteRule(((3, 1), (4, 0)), 0)
        with pytest.raises(RuleError):
            rewrite_to_attributes(bit_rule, scheme, ("A", "B"))

    def test_dual_evaluation_matches_bits(self, scheme):
        tuples = generate_tuples(GeneratorConfig(count=2000, seed=13,
                                                 function_id="F2"))
        from rulenet.encoder import encode_dataset
        data = encode_dataset(tuples, scheme)
        rng = np.random.default_rng(99)
        for _ in range(40):
            bits = rng.choice(86, size=rng.integers(1, 5), replace=False)
            antecedent = tuple(sorted(
                (int(b), int(rng.integers(0, 2))) for b in bits
            ))
            bit_rule = DiscreteRule(antecedent, 0)
            try:
                rule = rewrite_to_attributes(bit_rule, scheme, ("A", "B"))
            except RuleError:
                continue  # contradictory draw
            for i, t in enumerate(tuples[:500]):
                bit_match = all(data.X[i, b] == v for b, v in antecedent)
                assert bit_match == rule.matches(t)


class TestRuleSetSemantics:
    def test_first_match_and_default(self):
        rs = RuleSet(
            (Rule((Interval("age", None, 40.0),), "A"),
             Rule((Interval("age", 60.0, None),), "A")),
            "B",
        )
        assert rs.classify(make_tuple(age=30)) == "A"
        assert rs.classify(make_tuple(age=50)) == "B"
        assert rs.classify(make_tuple(age=70)) == "A"

    def test_same_consequent_order_invariance(self, scheme):
        tuples = generate_tuples(GeneratorConfig(count=500, seed=21,
                                                 function_id="F2"))
        rules = (
            Rule((Interval("salary", 50000.0, 100000.0),), "A"),
            Rule((Interval("age", None, 40.0),), "A"),
            Rule((CategoryIs("car", 3),), "A"),
        )
        rs = RuleSet(rules, "B")
        base = rs.classify_many(tuples)
        for perm in ((1, 0, 2), (2, 1, 0), (1, 2, 0)):
            shuffled = RuleSet(tuple(rules[i] for i in perm), "B")
            assert shuffled.classify_many(tuples) == base


class TestEvaluate:
    def test_default_only_matches_class_fraction(self):
        tuples = generate_tuples(GeneratorConfig(count=2000, seed=17,
                                                 function_id="F2"))
        rs = RuleSet((), "B")
        report = evaluate(rs, tuples)
        frac_b = sum(t.label == "B" for t in tuples) / len(tuples)
        assert report.accuracy == pytest.approx(frac_b)
        assert report.default_stats.total == len(tuples)

    def test_accuracy_matches_recount_oracle(self):
        tuples = generate_tuples(GeneratorConfig(count=1000, seed=19,
                                                 function_id="F2"))
        rs = RuleSet(
            (Rule((Interval("salary", 50000.0, 100000.0),
                   Interval("age", None, 40.0)), "A"),),
            "B",
        )
        report = evaluate(rs, tuples)
        recount = sum(rs.classify(t) == t.label for t in tuples)
        assert report.accuracy == pytest.approx(recount / len(tuples))

    def test_per_rule_attribution_sums(self):
        tuples = generate_tuples(GeneratorConfig(count=800, seed=23,
                                                 function_id="F2"))
        rs = RuleSet(
            (Rule((Interval("age", None, 40.0),), "A"),
             Rule((Interval("age", 60.0, None),), "A")),
            "B",
        )
        report = evaluate(rs, tuples)
        totals = [st.total for st in report.per_rule]
        assert sum(totals) + report.default_stats.total == len(tuples)
        assert all(st.correct <= st.total for st in report.per_rule)

    def test_stats_csv_shape(self):
        tuples = generate_tuples(GeneratorConfig(count=100, seed=29,
                                                 function_id="F2"))
        rs = RuleSet((Rule((Interval("age", None, 40.0),), "A"),), "B")
        csv_text = stats_csv(evaluate(rs, tuples))
        lines = csv_text.strip().splitlines()
        assert lines[0] == "rule,text,total,correct_pct"
        assert len(lines) == 3  # one rule plus the default row


class TestSimplify:
    def test_duplicate_removed(self):
        tuples = generate_tuples(GeneratorConfig(count=300, seed=31,
                                                 function_id="F2"))
        r = Rule((Interval("age", None, 40.0),), "A")
        rs = simplify(RuleSet((r, r), "B"), tuples)
        assert rs.rules == (r,)

    def test_subsumed_removed(self):
        tuples = generate_tuples(GeneratorConfig(count=300, seed=37,
                                                 function_id="F2"))
        broad = Rule((Interval("age", None, 40.0),), "A")
        narrow = Rule((Interval("age", None, 40.0),
                       Interval("salary", 50000.0, None)), "A")
        rs = simplify(RuleSet((broad, narrow), "B"), tuples)
        assert rs.rules == (broad,)

    def test_zero_coverage_removed_and_classes_preserved(self):
        tuples = generate_tuples(GeneratorConfig(count=300, seed=41,
                                                 function_id="F2"))
        dead = Rule((Interval("salary", 149999.5, None),
                     Interval("age", None, 20.01),), "A")
        live = Rule((Interval("age", None, 40.0),), "A")
        rs0 = RuleSet((dead, live), "B")
        before = rs0.classify_many(tuples)
        rs = simplify(rs0, tuples)
        assert dead not in rs.rules
        assert rs.classify_many(tuples) == before


class TestFileFormat:
    def roundtrip(self, rs):
        text = format_rules(rs)
        again = parse_rules(text)
        assert format_rules(again) == text
        return again

    def test_roundtrip_bit_exact(self):
        rs = RuleSet(
            (Rule((Interval("salary", 50000.0, 100000.0),
                   Interval("commission", None, 10000.0),
                   Interval("age", 40.0, None)), "A"),
             Rule((CategoryIs("car", 7),
                   CategoryIsNot("zipcode", (1, 5))), "A"),
             Rule((), "A")),
            "B",
        )
        again = self.roundtrip(rs)
        assert again == rs

    def test_default_required(self):
        with pytest.raises(RuleError):
            parse_rules("IF age >= 60 THEN A\n")

    def test_unparseable_rejected(self):
        with pytest.raises(RuleError):
            parse_rules("IF age HAPPY 60 THEN A\nDEFAULT B\n")

    def test_extracted_f2_rules_roundtrip(self, f2_extraction, scheme,
                                          f2_tuples):
        rs = from_extraction(f2_extraction.bit_rules,
                             f2_extraction.default_class, scheme,
                             datagen.CLASSES)
        rs = simplify(rs, f2_tuples)
        again = self.roundtrip(rs)
        assert again.classify_many(f2_tuples) == rs.classify_many(f2_tuples)
