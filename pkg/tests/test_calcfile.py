import re

from tabsynth import calcfile, synth


def test_roundtrip_generated(so_calc):
    text = calcfile.print_calculus(so_calc)
    again = calcfile.parse_calculus(text)
    assert synth.calculus_equal(so_calc, again)
    assert calcfile.print_calculus(again) == text


def test_roundtrip_internalized_with_blocking(so_blocked):
    text = calcfile.print_calculus(so_blocked)
    again = calcfile.parse_calculus(text)
    assert synth.calculus_equal(so_blocked, again)
    assert again.blocking.enabled and again.blocking.depth == 0
    assert again.mode == "internalized"
    assert "eq" in again.ctx.d_plus
    assert [r.produces_terms for r in again.rules] == \
        [r.produces_terms for r in so_blocked.rules]


def test_comparison_is_renaming_insensitive(so_calc):
    # swap the names of the two concept variables everywhere
    text = calcfile.print_calculus(so_calc)
    renamed = re.sub(r"\bp\b", "ptmp", text)
    renamed = re.sub(r"\bq\b", "p", renamed)
    renamed = re.sub(r"\bptmp\b", "q", renamed)
    again = calcfile.parse_calculus(renamed)
    assert synth.calculus_equal(so_calc, again)


def test_comparison_detects_real_difference(so_calc):
    text = calcfile.print_calculus(so_calc)
    # swapping the denominators of the positive or rule is a real change
    broken = text.replace(
        "rule or_pos [decomposition+]: nu1(or(p, q), x) / nu1(p, x) | nu1(q, x)",
        "rule or_pos [decomposition+]: nu1(or(p, q), x) / nu1(p, x), nu1(q, x)")
    assert broken != text
    again = calcfile.parse_calculus(broken)
    assert not synth.calculus_equal(so_calc, again)


def test_stable_rule_order(so_calc):
    kinds = [r.kind for r in so_calc.rules]
    order = {"decomposition+": 0, "decomposition-": 0, "theory": 1,
             "equality": 2, "closure": 3}
    ranks = [order[k] for k in kinds]
    assert ranks == sorted(ranks)
    decomp_ids = [r.id for r in so_calc.rules if r.kind.startswith("decomp")]
    assert decomp_ids == ["exists_pos", "exists_neg", "not_pos", "not_neg",
                          "one_pos", "one_neg", "or_pos", "or_neg"]
