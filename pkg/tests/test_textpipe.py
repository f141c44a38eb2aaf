"""Tokenizer, code-term detection, phrases and sparse vectors."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triagekit.errors import MissingIdfTable
from triagekit.textpipe import (
    CODE_TERM,
    NOUN_PHRASE,
    NUMBER,
    VERB_PHRASE,
    WORD,
    PipelineConfig,
    SparseVector,
    detect_code_terms,
    extract_phrases,
    stem,
    tokenize,
    vectorize,
)


class TestTokenize:
    def test_default_stopwords(self):
        tokens = tokenize("Login Failure on page")
        assert [t.normalized for t in tokens] == ["login", "failure", "page"]
        assert all(t.kind == WORD for t in tokens)

    def test_empty_text(self):
        assert tokenize("") == []

    def test_code_term_kept_atomic(self):
        tokens = tokenize("#*ZX12*# reset")
        assert [(t.normalized, t.kind) for t in tokens] == [
            ("#*zx12*#", CODE_TERM),
            ("reset", WORD),
        ]

    def test_code_terms_droppable_via_config(self):
        config = PipelineConfig(keep_code_terms=False)
        tokens = tokenize("#*ZX12*# reset", config)
        assert [t.normalized for t in tokens] == ["reset"]

    def test_numbers_are_their_own_kind(self):
        tokens = tokenize("error 404 page")
        kinds = {t.normalized: t.kind for t in tokens}
        assert kinds["404"] == NUMBER

    def test_positions_strictly_increasing_with_stopword_gaps(self):
        tokens = tokenize("login of the portal")
        assert [t.position for t in tokens] == [0, 3]

    def test_lowercasing_and_stemming(self):
        tokens = tokenize("Pages Failed Loading")
        assert [t.normalized for t in tokens] == ["page", "fail", "load"]

    @settings(max_examples=200)
    @given(st.text(alphabet=st.characters(codec="ascii"), max_size=120))
    def test_retokenize_stability(self, text):
        first = tokenize(text)
        joined = " ".join(t.normalized for t in first)
        second = tokenize(joined)
        assert [(t.kind, t.normalized) for t in first] == [
            (t.kind, t.normalized) for t in second
        ]

    def test_retokenize_stability_on_ticket_text(self):
        text = "Kfeil: JSP045ABCD #ABCDD11759 failed while loading pages (urgent!)"
        first = tokenize(text)
        second = tokenize(" ".join(t.normalized for t in first))
        assert [t.normalized for t in first] == [t.normalized for t in second]


class TestStem:
    def test_examples(self):
        assert stem("pages") == "page"
        assert stem("queries") == "query"
        assert stem("failed") == "fail"
        assert stem("loading") == "load"
        assert stem("status") == "status"
        assert stem("access") == "access"

    @given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=20))
    def test_idempotent(self, word):
        assert stem(stem(word)) == stem(word)


class TestDetectCodeTerms:
    def test_hash_prefixed_token(self):
        spans = detect_code_terms("#ABCDD11759")
        assert len(spans) == 1
        assert spans[0] == (0, 11)

    def test_plain_text_has_no_spans(self):
        assert detect_code_terms("password reset failed") == []

    def test_cryptic_heuristic_span_only(self):
        text = "JSP045ABCD and login"
        spans = detect_code_terms(text)
        assert [text[s:e] for s, e in spans] == ["JSP045ABCD"]

    def test_delimited_region(self):
        text = "see #*AB 12*# for details"
        spans = detect_code_terms(text)
        assert [text[s:e] for s, e in spans] == ["#*AB 12*#"]

    def test_spans_disjoint_and_sorted(self):
        text = "Kfeil: JSP045ABCD #ABCDD11759 [(231630 07/32/15)] ABCD1168 (#J137891)"
        spans = detect_code_terms(text)
        assert spans == sorted(spans)
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            assert e1 <= s2


class TestExtractPhrases:
    def test_default_nouns_form_one_phrase(self):
        phrases = extract_phrases(tokenize("page access issue"))
        assert [(p.text, p.kind) for p in phrases] == [("page access issue", NOUN_PHRASE)]

    def test_empty(self):
        assert extract_phrases([]) == []

    def test_verb_noun_pattern(self):
        phrases = extract_phrases(tokenize("reset password"))
        assert [(p.text, p.kind) for p in phrases] == [("reset password", VERB_PHRASE)]

    def test_verb_particle(self):
        phrases = extract_phrases(tokenize("logged out immediately"))
        assert ("logg out", VERB_PHRASE) in [(p.text, p.kind) for p in phrases]

    def test_adjective_noun(self):
        phrases = extract_phrases(tokenize("slow payment gateway"))
        assert [(p.text, p.kind) for p in phrases] == [("slow payment gateway", NOUN_PHRASE)]

    def test_no_bridging_across_stopwords(self):
        phrases = extract_phrases(tokenize("failure on page"))
        assert [p.text for p in phrases] == ["failure", "page"]

    def test_max_length_splits_runs(self):
        config = PipelineConfig(max_phrase_len=2)
        phrases = extract_phrases(tokenize("alpha beta gamma delta epsilon", config), config)
        assert [p.text for p in phrases] == ["alpha beta", "gamma delta", "epsilon"]
        assert all(1 <= len(p) <= 2 for p in phrases)


class TestVectorize:
    def test_tf_counts(self):
        vec = vectorize(["a", "a", "b"], {"a": 0, "b": 1}, weighting="tf")
        assert vec.entries == ((0, 2.0), (1, 1.0))

    def test_empty_doc(self):
        assert vectorize([], {"a": 0}, weighting="tf").entries == ()

    def test_tf_idf_drops_zero_idf(self):
        # term in every doc: idf = ln(2/2) = 0, weight dropped entirely
        vec = vectorize(["a"], {"a": 0}, weighting="tf_idf", idf_table={0: math.log(2 / 2)})
        assert vec.entries == ()

    def test_missing_idf_table(self):
        with pytest.raises(MissingIdfTable):
            vectorize(["a"], {"a": 0}, weighting="tf_idf")

    def test_out_of_vocabulary_dropped(self):
        vec = vectorize(["a", "zzz"], {"a": 0}, weighting="tf")
        assert vec.entries == ((0, 1.0),)

    def test_tf_preserves_token_mass(self):
        tokens = tokenize("login login portal page page page")
        vocab = {"login": 0, "portal": 1, "page": 2}
        vec = vectorize(tokens, vocab, weighting="tf")
        assert sum(w for _, w in vec.entries) == len(tokens)

    @given(
        st.lists(st.sampled_from(["a", "b", "c", "d"]), max_size=30),
    )
    def test_entries_sorted_and_nonzero(self, terms):
        vec = vectorize(terms, {"a": 0, "b": 1, "c": 2, "d": 3}, weighting="tf")
        ids = [t for t, _ in vec.entries]
        assert ids == sorted(ids)
        assert all(w > 0 for _, w in vec.entries)

    def test_accepts_phrases_as_units(self):
        phrases = extract_phrases(tokenize("page access issue and reset password"))
        vocab = {"page access issue": 0, "reset password": 1}
        vec = vectorize(phrases, vocab, weighting="tf")
        assert vec.entries == ((0, 1.0), (1, 1.0))


class TestSparseVector:
    def test_cosine_identical(self):
        v = SparseVector(((0, 1.0), (3, 2.0)))
        assert v.cosine(v) == pytest.approx(1.0)

    def test_cosine_disjoint(self):
        a = SparseVector(((0, 1.0),))
        b = SparseVector(((1, 1.0),))
        assert a.cosine(b) == 0.0

    def test_cosine_symmetry(self):
        a = SparseVector(((0, 1.0), (2, 0.5)))
        b = SparseVector(((0, 2.0), (1, 1.0), (2, 3.0)))
        assert a.cosine(b) == pytest.approx(b.cosine(a), abs=1e-12)
