import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crossqa.evaluation import (MetricError, MetricReport, RougeL, VoteRecord,
                                bleu, corpus_bleu, fleiss_kappa, metric_tokens,
                                rouge_l, sentence_bleu, spearman,
                                vote_accuracy)


def votes(*rows):
    return [VoteRecord(item_id=str(i), votes=tuple(v))
            for i, v in enumerate(rows)]


# -- vote accuracy -------------------------------------------------------------


def test_all_positive_votes():
    assert vote_accuracy(votes([1, 1, 1], [1, 1])) == 1.0


def test_seven_of_nine():
    # 3 items x 3 votes, 7 positives in total
    records = votes([1, 1, 1], [1, 1, 0], [1, 0, 1])
    assert vote_accuracy(records) == pytest.approx(7 / 9)


def test_micro_average_with_unequal_vote_counts():
    records = votes([1, 0, 0], [1, 1, 1, 1, 1])
    assert vote_accuracy(records) == 0.75


def test_empty_records_rejected():
    with pytest.raises(MetricError):
        vote_accuracy([])


def test_votes_validated():
    with pytest.raises(ValueError):
        VoteRecord(item_id="x", votes=())
    with pytest.raises(ValueError):
        VoteRecord(item_id="x", votes=(2,))


def test_accuracy_permutation_invariance():
    rows = [[1, 0, 1], [0, 0, 1], [1, 1, 1]]
    a = vote_accuracy(votes(*rows))
    b = vote_accuracy(votes(*[list(reversed(r)) for r in reversed(rows)]))
    assert a == b


# -- Fleiss' kappa ---------------------------------------------------------------


def test_kappa_two_item_hand_case():
    # items (3 pos) and (3 neg): P_bar=1, P_e=0.5 -> kappa 1.0
    assert fleiss_kappa(votes([1, 1, 1], [0, 0, 0])) == pytest.approx(1.0)


def test_kappa_degenerate_unanimity_single_category():
    assert fleiss_kappa(votes([1, 1, 1], [1, 1, 1])) == 1.0


def test_kappa_all_agree_property_random_tables():
    rng = random.Random(7)
    for _ in range(50):
        n_items = rng.randint(2, 12)
        n_raters = rng.randint(2, 7)
        rows = [[rng.choice([0, 1])] * n_raters for _ in range(n_items)]
        assert fleiss_kappa(votes(*rows)) == pytest.approx(1.0)


def test_kappa_disagreement_is_negative():
    # two raters always split: observed agreement 0, expected 0.5
    records = votes([1, 0], [0, 1], [1, 0])
    assert fleiss_kappa(records) == pytest.approx(-1.0)


def test_kappa_in_range_on_random_tables():
    rng = random.Random(11)
    for _ in range(100):
        rows = [[rng.choice([0, 1]) for _ in range(4)]
                for _ in range(rng.randint(2, 10))]
        k = fleiss_kappa(votes(*rows))
        assert -1.0 - 1e-12 <= k <= 1.0 + 1e-12


def test_kappa_requires_fixed_rater_count():
    with pytest.raises(MetricError):
        fleiss_kappa(votes([1, 1], [1, 1, 1]))


def test_kappa_requires_two_items_and_two_raters():
    with pytest.raises(MetricError):
        fleiss_kappa(votes([1, 1, 1]))
    with pytest.raises(MetricError):
        fleiss_kappa(votes([1], [0]))


# -- ROUGE-L ---------------------------------------------------------------------


def test_rouge_identity():
    assert rouge_l("the cat sat", "the cat sat") == RougeL(1.0, 1.0, 1.0)


def test_rouge_hand_case():
    # LCS("the cat", "the cat sat") = 2 -> P=1, R=2/3, F=0.8
    r = rouge_l("the cat", "the cat sat")
    assert r.precision == 1.0
    assert r.recall == pytest.approx(2 / 3)
    assert r.f == pytest.approx(0.8, abs=1e-9)


def test_rouge_disjoint():
    assert rouge_l("alpha beta", "gamma delta").f == 0.0


def test_rouge_empty_inputs():
    assert rouge_l("", "ref") == RougeL(0.0, 0.0, 0.0)
    assert rouge_l("hyp", "") == RougeL(0.0, 0.0, 0.0)


def test_rouge_japanese_character_level():
    r = rouge_l("猫が好き", "猫が好きだ", lang="ja")
    assert r.precision == 1.0
    assert r.recall == pytest.approx(4 / 5)


def test_rouge_swap_symmetry_and_f_between_p_r():
    pairs = [("the cat", "the cat sat on the mat"),
             ("alpha beta gamma", "beta gamma delta"),
             ("one two three four", "four three two one")]
    for hyp, ref in pairs:
        a = rouge_l(hyp, ref)
        b = rouge_l(ref, hyp)
        assert a.precision == pytest.approx(b.recall)
        assert a.recall == pytest.approx(b.precision)
        if a.f > 0:
            assert min(a.precision, a.recall) - 1e-12 <= a.f \
                <= max(a.precision, a.recall) + 1e-12


@given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=12),
       st.lists(st.sampled_from("abcde"), min_size=1, max_size=12))
def test_rouge_f_bounds_property(hyp_chars, ref_chars):
    r = rouge_l(" ".join(hyp_chars), " ".join(ref_chars))
    assert 0.0 <= r.f <= 1.0
    assert min(r.precision, r.recall) - 1e-12 <= r.f \
        <= max(r.precision, r.recall) + 1e-12


# -- BLEU --------------------------------------------------------------------------


def test_bleu_identity_is_100():
    assert bleu(["a b c d"], ["a b c d"]) == 100.0
    assert bleu(["w x y z q r"], ["w x y z q r"]) == 100.0


def test_bleu_brevity_hand_case():
    # all precisions 1, BP = exp(1 - 5/4)
    value = bleu(["a b c d"], ["a b c d e"])
    assert value == pytest.approx(77.8800783071405, abs=0.01)


def test_bleu_disjoint_corpus_is_zero():
    assert bleu(["a b c d"], ["w x y z"]) == 0.0


def test_bleu_corpus_pools_counts():
    hyps = ["a b c d", "e f g h"]
    refs = ["a b c d", "e f g h"]
    assert bleu(hyps, refs) == 100.0


def test_bleu_length_mismatch():
    with pytest.raises(MetricError):
        bleu(["a"], ["a", "b"])
    with pytest.raises(MetricError):
        bleu([], [])


def test_sentence_bleu_smoothing_nonzero_on_partial_match():
    # corpus mode is 0 (no 4-gram), sentence mode floors zero counts
    hyp, ref = "the big cat", "the big dog"
    assert corpus_bleu([hyp], [ref]) == 0.0
    assert sentence_bleu(hyp, ref) > 0.0


def test_sentence_mode_averages():
    pair_a = sentence_bleu("a b c d", "a b c d")
    pair_b = sentence_bleu("x y", "x y")
    avg = bleu(["a b c d", "x y"], ["a b c d", "x y"], mode="sentence")
    assert avg == pytest.approx((pair_a + pair_b) / 2)


def test_bleu_japanese_character_ngrams():
    assert bleu(["猫が好きだよ"], ["猫が好きだよ"], lang="ja") == 100.0


@given(st.lists(st.sampled_from("abcdef"), min_size=4, max_size=15))
def test_bleu_identity_property(tokens):
    text = " ".join(tokens)
    assert bleu([text], [text]) == pytest.approx(100.0)


def test_metric_tokens_japanese_chars():
    assert metric_tokens("猫 が好き", "ja") == ["猫", "が", "好", "き"]
    assert metric_tokens("The  Cat", "en") == ["the", "cat"]


# -- Spearman -------------------------------------------------------------------


def test_spearman_identity_and_reversal():
    assert spearman([1, 2, 3, 4], [10, 20, 30, 40]) == pytest.approx(1.0)
    assert spearman([1, 2, 3, 4], [9, 7, 5, 3]) == pytest.approx(-1.0)


def test_spearman_hand_case():
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8,
                                                                 abs=1e-9)


def test_spearman_with_ties_average_ranks():
    # ties get average ranks; compare against scipy-convention hand calc:
    # xs ranks: [1.5, 1.5, 3, 4]; ys ranks: [1, 2, 3, 4]
    rho = spearman([5, 5, 7, 9], [1, 2, 3, 4])
    # Pearson of [1.5,1.5,3,4] vs [1,2,3,4]
    rx, ry = [1.5, 1.5, 3, 4], [1, 2, 3, 4]
    mx, my = sum(rx) / 4, sum(ry) / 4
    want = (sum((a - mx) * (b - my) for a, b in zip(rx, ry))
            / math.sqrt(sum((a - mx) ** 2 for a in rx)
                        * sum((b - my) ** 2 for b in ry)))
    assert rho == pytest.approx(want)


def test_spearman_errors():
    with pytest.raises(MetricError):
        spearman([1], [1])
    with pytest.raises(MetricError):
        spearman([1, 2], [1, 2, 3])
    with pytest.raises(MetricError):
        spearman([2, 2, 2], [1, 2, 3])


@given(st.lists(st.integers(min_value=-100, max_value=100), min_size=3,
                max_size=20, unique=True))
def test_spearman_monotone_transform_invariance(xs):
    ys = [x * 2 for x in xs]
    base = spearman(xs, ys)
    transformed = spearman([math.exp(x / 50) for x in xs], ys)
    assert transformed == pytest.approx(base)
    assert base == pytest.approx(1.0)


# -- report type -----------------------------------------------------------------


def test_metric_report_ranges():
    MetricReport(accuracy=0.5, kappa=0.1, bleu=50.0, rouge_l_f=0.4)
    with pytest.raises(ValueError):
        MetricReport(accuracy=1.5)
    with pytest.raises(ValueError):
        MetricReport(accuracy=0.5, kappa=2.0)
    with pytest.raises(ValueError):
        MetricReport(accuracy=0.5, bleu=150.0)
