import pytest

from contribkit.ingest import Section
from contribkit.textproc import (
    DEFAULT_STOPWORDS,
    MarkerCounts,
    count_markers,
    detect_markers,
    load_stopwords,
    match_marker,
    normalize_whitespace,
    split_sentences,
    tokenize,
)

BOX = (
    "High Priority Proposal 3.1-1a: Both during and after initial access, the scenario where the initial "
    "UL BWP for non-RedCap UEs is configured to be wider than the maximum RedCap UE bandwidth is allowed."
)


class TestSplitSentences:
    def test_two_sentences(self):
        assert split_sentences("The UE works. It uses 20MHz.") == ["The UE works.", "It uses 20MHz."]

    def test_dotted_identifier_does_not_split(self):
        assert split_sentences("See Proposal 3.1-1a: bandwidth is allowed.") == [
            "See Proposal 3.1-1a: bandwidth is allowed."
        ]

    def test_empty(self):
        assert split_sentences("") == []
        assert split_sentences("   \n ") == []

    @pytest.mark.parametrize("abbr", ["e.g.", "i.e.", "Fig.", "etc."])
    def test_abbreviations(self, abbr):
        text = f"Options exist, {abbr} Option 2 is preferred. A second sentence follows."
        assert split_sentences(text) == [
            f"Options exist, {abbr} Option 2 is preferred.",
            "A second sentence follows.",
        ]

    def test_marker_identifier_followed_by_period(self):
        text = "Proposal 3.1. The bandwidth is 20 MHz. Done!"
        assert split_sentences(text) == ["Proposal 3.1. The bandwidth is 20 MHz.", "Done!"]

    def test_sentence_ending_in_number(self):
        assert split_sentences("The limit is 20. The next one is 40.") == ["The limit is 20.", "The next one is 40."]

    def test_question_and_exclamation(self):
        assert split_sentences("Is 20 MHz enough? Yes! 5 companies agree.") == [
            "Is 20 MHz enough?",
            "Yes!",
            "5 companies agree.",
        ]

    def test_lowercase_continuation_does_not_split(self):
        assert split_sentences("Values in MHz. are typical here.") == ["Values in MHz. are typical here."]

    def test_whitespace_is_normalized(self):
        assert split_sentences("A  first one.\n\nA second.") == ["A first one.", "A second."]


class TestTokenize:
    def test_counts_and_stopwords(self):
        stats = tokenize("Bandwidth, bandwidth and uplink", {"and"})
        assert stats.term_counts == {"bandwidth": 2, "uplink": 1}
        assert stats.total_tokens == 3

    def test_units_stay_attached(self):
        stats = tokenize("from 100MHz to 20MHz", {"from", "to"})
        assert stats.term_counts == {"100mhz": 1, "20mhz": 1}

    def test_empty(self):
        stats = tokenize("")
        assert stats.term_counts == {} and stats.total_tokens == 0
        assert not stats

    def test_single_characters_dropped(self):
        assert tokenize("a b c UE", set()).term_counts == {"ue": 1}

    def test_underscore_and_hyphen_split(self):
        assert tokenize("non-RedCap foo_bar", set()).term_counts == {"non": 1, "redcap": 1, "foo": 1, "bar": 1}

    def test_default_stopwords(self):
        assert "the" in DEFAULT_STOPWORDS and "bandwidth" not in DEFAULT_STOPWORDS
        assert 100 <= len(DEFAULT_STOPWORDS) <= 200
        assert tokenize("The bandwidth of the UE").term_counts == {"bandwidth": 1, "ue": 1}

    def test_stopword_file(self, tmp_path):
        path = tmp_path / "stop.txt"
        path.write_text("RedCap\n\nue\n", encoding="utf-8")
        only = load_stopwords(path, extend_default=False)
        assert only == {"redcap", "ue"}
        both = load_stopwords(path)
        assert both >= DEFAULT_STOPWORDS | {"redcap", "ue"}

    def test_stats_addition(self):
        total = tokenize("uplink uplink", set()) + tokenize("uplink downlink", set())
        assert total.term_counts == {"uplink": 3, "downlink": 1}
        assert total.total_tokens == 4


class TestMarkers:
    def test_box_text(self):
        m = count_markers([BOX])
        assert m.counts() == (1, 0, 0)
        assert m.items[0]["id"] == "3.1-1a"
        assert m.items[0]["text"] == BOX

    def test_multi_marker(self):
        m = count_markers(["Proposal 1: X", "Proposal 2: Y", "Observation 1: Z"])
        assert (m.proposals, m.observations, m.scenarios) == (2, 1, 0)

    def test_mid_sentence_keyword_is_ignored(self):
        m = count_markers(["We support this proposal 1 as written.", "The proposal is fine."])
        assert m.counts() == (0, 0, 0)

    @pytest.mark.parametrize(
        "para, expected",
        [
            ("proposal 7 the rest", ("proposal", "7")),
            ("SCENARIO 2.3: text", ("scenario", "2.3")),
            ("Observation 12-3b text", ("observation", "12-3b")),
            ("Low priority observation 4: text", ("observation", "4")),
            ("Very high priority proposal 5: text", ("proposal", "5")),
            ("One two three four proposal 5: text", None),
            ("Proposal: no identifier", None),
            ("Proposals 1 and 2 are fine", None),
            ("We support this proposal 1 as written.", None),
            ("High Priority Proposal 3 without a colon", None),
        ],
    )
    def test_match_marker(self, para, expected):
        assert match_marker(para) == expected

    def test_detect_markers_reads_section_paragraphs(self):
        sec = Section("2 Discussion", 1, ["Proposal 1: A.", "Scenario 1: B.", "Plain text."])
        m = detect_markers(sec)
        assert m.counts() == (1, 0, 1)
        assert [i["kind"] for i in m.items] == ["proposal", "scenario"]

    def test_addition(self):
        a = MarkerCounts(1, 2, 3)
        b = MarkerCounts(4, 0, 1)
        assert (a + b).counts() == (5, 2, 4)


def test_normalize_whitespace():
    assert normalize_whitespace(" a\t b \n c ") == "a b c"
