import json

import pytest
from docx_builder import CONTRIBUTION, body_texts, build_docx, document_xml

from contribkit.errors import (
    DuplicateDocumentIdError,
    InputError,
    MalformedXmlError,
    MissingDocumentPartError,
    NoDocumentsError,
    NotAZipError,
)
from contribkit.ingest import (
    company_from_stem,
    format_path,
    leaf_items,
    leaf_sections,
    load_corpus,
    load_document,
    parse_docx,
    parse_path,
    parse_plaintext,
)

FIXTURES = {
    "contribution": CONTRIBUTION,
    "flat": [("p", "Only a preamble here."), ("p", "And a second paragraph.")],
    "deep": [
        ("h", 1, "A"),
        ("h", 2, "A.1"),
        ("h", 3, "A.1.1"),
        ("p", "deep text"),
        ("h", 2, "A.2"),
        ("p", "sibling text"),
        ("h", 1, "B"),
        ("p", "top-level text"),
    ],
    "skipped_level": [("h", 1, "One"), ("h", 3, "Three"), ("p", "under three"), ("h", 2, "Two"), ("p", "under two")],
    "whitespace": [("h", 1, "Spaced  heading"), ("p", "  lots of   \t space  "), ("p", "   ")],
}


def _parse(name):
    return parse_docx(build_docx(FIXTURES[name]), doc_id=name, company="Acme")


class TestDocx:
    def test_structure_counts(self):
        doc = _parse("contribution")
        assert doc.title == "Discussion on reduced maximum UE bandwidth"
        assert doc.root.paragraphs == ["Source: Example Corp", "Agenda item: 8.6.1.1"]
        assert [s.heading for s in doc.sections] == ["1 Introduction", "2 Discussion", "3 Conclusion"]
        discussion = doc.sections[1]
        assert [c.heading for c in discussion.children] == ["2.1 Maximum bandwidth", "2.2 Initial BWP"]
        assert [c.level for c in discussion.children] == [2, 2]
        headings = [sec.heading for _, sec in doc.root.walk() if sec.heading]
        assert len(headings) == 5
        assert sum(len(sec.paragraphs) for _, sec in doc.root.walk()) == 12
        leaves = leaf_items(doc)
        assert [format_path(p) for p, _ in leaves] == ["1", "2.1", "2.2", "3"]
        assert [len(s.paragraphs) for _, s in leaves] == [1, 2, 4, 2]

    def test_table_rows_become_tab_paragraphs(self):
        sec = _parse("contribution").sections[1].children[1]
        assert sec.paragraphs[:3] == ["Option\tBandwidth", "A\t20 MHz", "B\t40 MHz"]

    def test_images_counted_on_section(self):
        doc = _parse("contribution")
        assert doc.sections[1].children[0].image_count == 1
        assert sum(s.image_count for _, s in doc.root.walk()) == 1

    def test_flat_document_is_single_root_leaf(self):
        doc = _parse("flat")
        leaves = leaf_items(doc)
        assert len(leaves) == 1 and leaves[0][0] == ()
        assert format_path(leaves[0][0]) == "0"

    def test_deep_nesting(self):
        doc = _parse("deep")
        assert [format_path(p) for p, _ in leaf_items(doc)] == ["1.1.1", "1.2", "2"]
        assert [s.heading for s in leaf_sections(doc)] == ["A.1.1", "A.2", "B"]

    def test_skipped_heading_level(self):
        doc = _parse("skipped_level")
        one = doc.sections[0]
        assert [c.heading for c in one.children] == ["Three", "Two"]
        assert [c.level for c in one.children] == [3, 2]

    def test_whitespace_normalized(self):
        doc = _parse("whitespace")
        assert doc.sections[0].heading == "Spaced heading"
        assert doc.sections[0].paragraphs == ["lots of space"]

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_reconstruction(self, name):
        doc = _parse(name)
        assert doc.body_paragraphs() == body_texts(FIXTURES[name])

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_leaf_order_follows_source(self, name):
        doc = _parse(name)
        leaf_paras = [p for s in leaf_sections(doc) for p in s.paragraphs]
        source = body_texts(FIXTURES[name])
        # leaf paragraphs appear in the source in the same relative order
        positions = [source.index(p) for p in leaf_paras]
        assert positions == sorted(positions)

    def test_deterministic(self):
        data = build_docx(CONTRIBUTION)
        assert parse_docx(data, "x") == parse_docx(data, "x")

    def test_title_from_core_properties(self):
        blocks = [("h", 1, "Intro"), ("p", "text")]
        doc = parse_docx(build_docx(blocks, core_title="Core title"), "d")
        assert doc.title == "Core title"

    def test_title_from_preamble_line(self):
        doc = parse_docx(build_docx([("p", "Title: From the preamble"), ("h", 1, "X"), ("p", "y")]), "d")
        assert doc.title == "From the preamble"

    def test_content_control_unwrapped(self):
        raw = "<w:sdt><w:sdtContent><w:p><w:r><w:t>inside control</w:t></w:r></w:p></w:sdtContent></w:sdt>"
        doc = parse_docx(build_docx([("h", 1, "S"), ("raw", raw)]), "d")
        assert doc.sections[0].paragraphs == ["inside control"]

    def test_not_a_zip(self):
        with pytest.raises(NotAZipError):
            parse_docx(b"plain bytes", "d")

    def test_missing_document_part(self):
        with pytest.raises(MissingDocumentPartError):
            parse_docx(build_docx(None), "d")

    def test_malformed_xml_reports_offset(self):
        xml = document_xml([("p", "ok")]).replace("</w:body>", "<w:p></w:body>")
        with pytest.raises(MalformedXmlError) as exc:
            parse_docx(build_docx(None, document=xml), "d")
        assert exc.value.offset is not None and exc.value.offset > 0


class TestPlaintext:
    def test_markdown_headings(self):
        text = "Title: A note\nSource: X\n\n# Intro\nLine one.\nLine two.\n\n## Detail\nDeep.\n# End\nBye.\n"
        doc = parse_plaintext(text, "markdown", "n")
        assert doc.title == "A note"
        assert [format_path(p) for p, _ in leaf_items(doc)] == ["1.1", "2"]
        assert doc.sections[0].paragraphs == ["Line one.", "Line two."]
        assert doc.body_paragraphs() == ["Title: A note", "Source: X", "Line one.", "Line two.", "Deep.", "Bye."]

    def test_plaintext_has_no_headings(self):
        doc = parse_plaintext("# not a heading\nbody\n", "plaintext", "t")
        assert doc.sections == []
        assert doc.root.paragraphs == ["# not a heading", "body"]

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            parse_plaintext("x", "rtf")


class TestFiles:
    def test_load_document_formats(self, tmp_path):
        (tmp_path / "Acme_R1-1.docx").write_bytes(build_docx(CONTRIBUTION))
        (tmp_path / "Beta_R1-2.md").write_text("# H\ntext\n", encoding="utf-8")
        (tmp_path / "Gamma_R1-3.txt").write_text("plain words\n", encoding="utf-8")
        docx = load_document(tmp_path / "Acme_R1-1.docx")
        assert (docx.id, docx.company, docx.source_format) == ("Acme_R1-1", "Acme", "docx")
        assert len(docx.digest) == 64
        md = load_document(tmp_path / "Beta_R1-2.md")
        assert md.source_format == "markdown" and md.title == "Beta_R1-2"
        assert load_document(tmp_path / "Gamma_R1-3.txt", company="Override").company == "Override"

    def test_unsupported_suffix(self, tmp_path):
        p = tmp_path / "x.pdf"
        p.write_bytes(b"%PDF")
        with pytest.raises(InputError):
            load_document(p)

    def test_company_from_stem(self):
        assert company_from_stem("Nokia_R1-2104000") == "Nokia"
        assert company_from_stem("nounderscore") == "nounderscore"

    def test_paths_round_trip(self):
        for path in [(), (1,), (2, 1, 3)]:
            assert parse_path(format_path(path)) == path

    def test_corpus_with_manifest(self, corpus_dir):
        docs = load_corpus(corpus_dir)
        assert len(docs) == 6
        assert [d.id for d in docs] == sorted(d.id for d in docs)
        assert {d.company for d in docs} == {"Alpha", "Borealis", "Cobalt", "Delta", "Eastwind", "Fjord"}

    def test_manifest_roles_and_companies(self, tmp_path):
        (tmp_path / "a.md").write_text("# H\nx\n", encoding="utf-8")
        (tmp_path / "b.md").write_text("# H\ny\n", encoding="utf-8")
        manifest = [{"path": "a.md", "company": "First"}, {"path": "b.md", "company": "Chair", "role": "chair"}]
        (tmp_path / "manifest.json").write_text(json.dumps(manifest), encoding="utf-8")
        docs = load_corpus(tmp_path)
        assert [(d.company, d.role) for d in docs] == [("First", "member"), ("Chair", "chair")]

    def test_corpus_without_manifest(self, tmp_path):
        (tmp_path / "Zed_1.md").write_text("# H\nx\n", encoding="utf-8")
        (tmp_path / "Ann_2.txt").write_text("y\n", encoding="utf-8")
        (tmp_path / "notes.pdf").write_bytes(b"ignored")
        assert [(d.id, d.company) for d in load_corpus(tmp_path)] == [("Ann_2", "Ann"), ("Zed_1", "Zed")]

    def test_empty_directory(self, tmp_path):
        with pytest.raises(NoDocumentsError, match="no parsable documents"):
            load_corpus(tmp_path)

    def test_duplicate_ids(self, tmp_path):
        (tmp_path / "a").mkdir()
        (tmp_path / "a" / "Same.md").write_text("x\n", encoding="utf-8")
        (tmp_path / "Same.txt").write_text("y\n", encoding="utf-8")
        manifest = [{"path": "a/Same.md"}, {"path": "Same.txt"}]
        (tmp_path / "manifest.json").write_text(json.dumps(manifest), encoding="utf-8")
        with pytest.raises(DuplicateDocumentIdError):
            load_corpus(tmp_path)

    def test_bad_manifest(self, tmp_path):
        (tmp_path / "manifest.json").write_text('{"path": "x"}', encoding="utf-8")
        with pytest.raises(InputError):
            load_corpus(tmp_path)
