import math
import random
import unicodedata

import pytest

import curtok


def test_nfc_matches_reference_normalizer():
    cases = [
        "é",
        "क़",  # ka + nukta stays decomposed
        "क़",  # qa decomposes
        "각",  # jamo compose to a syllable
        "Å",
        "Ω",  # ohm sign
        "plain ascii",
        "mixed नमस्ते text",
    ]
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(1, 40)
        cases.append(
            "".join(chr(rng.choice([0x61, 0x301, 0x915, 0x93C, 0xE9, 0x1100, 0x1161])) for _ in range(n))
        )
    for text in cases:
        assert curtok.nfc(text) == unicodedata.normalize("NFC", text)


def test_reformat_repairs_double_encoding():
    fixed, changed = curtok.reformat("cafÃ©")
    assert fixed == "café"
    assert changed


def test_tokenizer_roundtrip():
    texts = [
        "the quick brown fox jumps over the lazy dog",
        "नमस्ते दुनिया",
        "numbers 12345 and spaces  here",
        "a literal ▁ marker survives",
    ]
    tok = curtok.train_bpe(texts, vocab_size=600, name="smoke")
    assert tok.name == "smoke"
    for text in texts + ["unseen text with new words", "  leading and trailing  "]:
        assert tok.decode(tok.encode(text)) == text
    base = curtok.byte_fallback()
    assert base.decode(base.encode("any text at all")) == "any text at all"


def test_pretokenize_display():
    assert curtok.pretokenize("hi there") == ["hi", "▁there"]
    assert curtok.pretokenize(" 123") == ["▁1", "2", "3"]
    assert curtok.pretokenize(" 123", split_digits=False) == ["▁123"]


def test_fertility_per_language():
    tok = curtok.byte_fallback()
    # single-word docs, so no space marker enters the count
    f = curtok.fertility(tok, {"eng": ["a"], "hin": ["क"]})
    assert f["eng"] == pytest.approx(1.0)
    assert f["hin"] == pytest.approx(3.0)  # three bytes per Devanagari scalar


def test_mixture_equations_hand_example():
    delta = curtok.normalized_deficit({"aa": 2.0, "bb": 1.5}, 1.0)
    assert delta == pytest.approx({"aa": 2.0, "bb": 1.0})
    t = curtok.target_shares(delta, 0.01)
    assert t["aa"] == pytest.approx(2.01 / 3.02, abs=1e-12)
    m = curtok.momentum_update({"aa": 0.5, "bb": 0.5}, t, 0.3)
    assert m["aa"] == pytest.approx(0.549668874172185, abs=1e-12)
    assert m["bb"] == pytest.approx(0.450331125827815, abs=1e-12)
    chars = curtok.allocate_characters(m, 1000)
    assert chars == {"aa": 550, "bb": 450}


def test_sample_characters_cuts_at_whitespace():
    text, count, exhausted = curtok.sample_characters(["aaaa bbbb cccc"], 6, seed=1)
    assert text == "aaaa bbbb"
    assert count == 9
    assert not exhausted


def test_dedup_smoke():
    assert curtok.shingles("abcd", 2) == {"ab", "bc", "cd"}
    a = curtok.shingles("the cat sat on the mat quietly today", 5)
    b = curtok.shingles("the cat sat on the mat quietly tonight", 5)
    exact = curtok.exact_jaccard(a, b)
    est = curtok.minhash_jaccard(a, b, num_hashes=256, seed=3)
    assert abs(est - exact) < 0.15

    docs = [
        {"id": "a", "text": "the cat sat on the mat quietly today and slept"},
        {"id": "b", "text": "the cat sat on the mat quietly today and slept"},
        {"id": "c", "text": "completely different content about rivers and boats"},
    ]
    kept, dropped = curtok.dedup_exact(docs)
    assert kept == ["a", "c"]
    assert dropped == [("b", "a")]


def test_pii_redaction():
    out = curtok.redact("write to dev@example.com today")
    assert out == "write to <EMAIL> today"
    spans = curtok.pii_spans("write to dev@example.com today")
    assert spans[0][0] == "EMAIL"


def test_codemath_scores():
    code = "def f(x):\n    return x;\nimport os\nclass A {\n    int v;\n};\n"
    assert curtok.codemath(code)["drop"]
    prose = "the village market opens before sunrise and fills quickly"
    assert not curtok.codemath(prose)["drop"]


def test_judge_lines():
    line = '"code": 0, "math": 0, "toxic": 0, "quality": 5, "language": hi_or_eng'
    scores = curtok.parse_judge_line(line)
    assert scores == {"code": 0, "math": 0, "toxic": 0, "quality": 5, "language": ["hi_or_eng"]}
    keep, reason = curtok.judge_decision(line)
    assert keep
    dropped_keep, _ = curtok.judge_decision(
        '"code": 0, "math": 0, "toxic": 0, "quality": 3, "language": hi_or_eng'
    )
    assert not dropped_keep
    rendered = curtok.serialize_judge_line(1, 2, 0, 4, ["hin", "tam"])
    assert curtok.parse_judge_line(rendered)["language"] == ["hin", "tam"]
    prompt = curtok.judge_prompt("Q", "A")
    assert "QUESTION: Q" in prompt and "ANSWER: A" in prompt


def test_langid():
    profiles = curtok.LangId.train(
        {
            "eng": ["the quick brown fox jumps over the lazy dog again and again"],
            "hin": ["नमस्ते दुनिया यह एक वाक्य है"],
        }
    )
    lang, conf = profiles.identify("the quick brown fox", threshold=0.2)
    assert lang == "eng"
    assert conf > 0.2


def test_pipeline_in_memory():
    config = '{"stages": [{"name": "word_count", "min_words": 3, "max_words": 50}]}'
    docs = [
        {"id": "d0", "text": "one two three four"},
        {"id": "d1", "text": "tiny"},
        {"id": "d2", "text": "plenty of words right here"},
    ]
    result = curtok.run_pipeline(config, docs)
    assert [d["id"] for d in result["kept"]] == ["d0", "d2"]
    assert [d["id"] for d in result["dropped"]] == ["d1"]
    assert "word_count\t3\t2\t1\t0" in result["report"]
    assert result["dropped"][0]["trail"][0]["verdict"] == "DROP"
    assert "word_count" in curtok.registered_stages()
