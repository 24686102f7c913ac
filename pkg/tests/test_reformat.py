import pytest
from hypothesis import given, settings, strategies as st

from phrasekld.lexicon import ContinuityClass, PhraseLexicon, from_pairs
from phrasekld.reformat import reformat_sentence

C = ContinuityClass


def lexicon_with(**classes) -> PhraseLexicon:
    """lexicon_with(side_effects=C.CONTINUOUS, ...)"""
    pairs = {tuple(k.split("_")): v for k, v in classes.items()}
    lex = from_pairs(pairs)
    return PhraseLexicon(lex.entries, lex.profiles, dict(pairs))


def test_continuous_merge():
    lex = lexicon_with(side_effects=C.CONTINUOUS)
    assert reformat_sentence(["common", "side", "effects", "include"], lex) == ["common", "side_effects", "include"]


def test_discontinuous_rewrite():
    lex = lexicon_with(pick_off=C.DISCONTINUOUS)
    out = reformat_sentence(["they", "pick", "the", "runner", "off"], lex)
    assert out == ["they", "pick_off", "the", "runner", "pick_off"]


def test_intervening_word_blocks_continuous():
    lex = lexicon_with(side_effects=C.CONTINUOUS)
    assert reformat_sentence(["side", "bad", "effects"], lex) == ["side", "bad", "effects"]


def test_empty_lexicon_unchanged():
    assert reformat_sentence(["hello", "world"], from_pairs([])) == ["hello", "world"]


def test_unknown_class_no_rewrite():
    lex = lexicon_with(pick_off=C.UNKNOWN)
    assert reformat_sentence(["pick", "off"], lex) == ["pick", "off"]
    assert reformat_sentence(["pick", "x", "off"], lex) == ["pick", "x", "off"]


def test_discontinuous_adjacent_merges():
    lex = lexicon_with(pick_off=C.DISCONTINUOUS)
    assert reformat_sentence(["pick", "off"], lex) == ["pick_off"]


def test_discontinuous_window():
    lex = lexicon_with(pick_off=C.DISCONTINUOUS)
    four_between = ["pick", "a", "b", "c", "d", "off"]
    five_between = ["pick", "a", "b", "c", "d", "e", "off"]
    assert reformat_sentence(four_between, lex)[0] == "pick_off"
    assert reformat_sentence(five_between, lex) == five_between


def test_nearest_partner_chosen():
    lex = lexicon_with(pick_off=C.DISCONTINUOUS)
    out = reformat_sentence(["pick", "x", "off", "y", "off"], lex)
    assert out == ["pick_off", "x", "pick_off", "y", "off"]


def test_each_token_used_once():
    lex = lexicon_with(a_b=C.CONTINUOUS, b_c=C.CONTINUOUS)
    assert reformat_sentence(["a", "b", "c"], lex) == ["a_b", "c"]


def test_continuous_before_discontinuous():
    lex = lexicon_with(a_b=C.CONTINUOUS, a_c=C.DISCONTINUOUS)
    assert reformat_sentence(["a", "b", "c"], lex) == ["a_b", "c"]


def test_continuous_claims_word_before_discontinuous_search():
    lex = lexicon_with(a_b=C.DISCONTINUOUS, b_c=C.CONTINUOUS)
    assert reformat_sentence(["a", "x", "b", "c"], lex) == ["a", "x", "b_c"]


def test_merged_unit_counts_as_one_word_in_window():
    lex = lexicon_with(a_b=C.DISCONTINUOUS, p_q=C.CONTINUOUS)
    out = reformat_sentence(["a", "p", "q", "r", "s", "t", "b"], lex)
    assert out == ["a_b", "p_q", "r", "s", "t", "a_b"]


def test_lowercases():
    lex = lexicon_with(side_effects=C.CONTINUOUS)
    assert reformat_sentence(["Side", "EFFECTS"], lex) == ["side_effects"]


VOCAB = ["a", "b", "c", "d", "e", "f"]
classes = st.sampled_from([C.CONTINUOUS, C.DISCONTINUOUS, C.UNKNOWN])


@st.composite
def lexicons(draw):
    pairs = draw(st.lists(st.tuples(st.sampled_from(VOCAB), st.sampled_from(VOCAB)), max_size=10, unique=True))
    lex = from_pairs(pairs)
    return PhraseLexicon(lex.entries, lex.profiles, {p: draw(classes) for p in lex.entries})


sentences = st.lists(st.sampled_from(VOCAB), max_size=20)


def _is_subsequence(small, big):
    it = iter(big)
    return all(any(t == w for w in it) for t in small)


@settings(max_examples=1000)
@given(sentences, lexicons())
def test_idempotent(sent, lex):
    out = reformat_sentence(sent, lex)
    assert reformat_sentence(out, lex) == out


@settings(max_examples=1000)
@given(sentences, lexicons())
def test_length_and_order_invariants(sent, lex):
    out = reformat_sentence(sent, lex)
    assert all(t and t.count("_") <= 1 for t in out)
    n_merges = len(sent) - len(out)
    n_joined = sum("_" in t for t in out)
    # every merge yields one joined token, every discontinuous rewrite two
    assert n_merges >= 0
    assert n_joined >= n_merges and (n_joined - n_merges) % 2 == 0
    assert _is_subsequence([t for t in out if "_" not in t], sent)


@given(sentences, lexicons())
def test_no_match_leaves_sentence_alone(sent, lex):
    words = set(sent)
    if not any(a in words and b in words for a, b in lex.entries):
        assert reformat_sentence(sent, lex) == sent
