"""Parse contribution documents into a section tree.

Word documents are read straight from the OOXML package (``word/document.xml``)
with :mod:`zipfile` and :mod:`xml.etree.ElementTree`; markdown and plain text
go through :func:`parse_plaintext`. Both produce the same :class:`Document`
shape: an implicit level-0 root section holding any preamble, with headed
sections nested below it.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
import re
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator
from xml.etree import ElementTree as ET

from .errors import (
    DuplicateDocumentIdError,
    InputError,
    MalformedXmlError,
    MissingDocumentPartError,
    NoDocumentsError,
    NotAZipError,
)
from .textproc import normalize_whitespace

log = logging.getLogger(__name__)

W = "{http://schemas.openxmlformats.org/wordprocessingml/2006/main}"
_DC = "{http://purl.org/dc/elements/1.1/}"
_HEADING_STYLE = re.compile(r"^heading\s*([1-9])$", re.IGNORECASE)
_MD_HEADING = re.compile(r"^(#{1,9})\s+(.*?)\s*#*\s*$")
_TITLE_LINE = re.compile(r"^title\s*:\s*(.+)$", re.IGNORECASE)

SOURCE_FORMATS = ("docx", "markdown", "plaintext")
SUFFIX_FORMATS = {".docx": "docx", ".md": "markdown", ".markdown": "markdown", ".txt": "plaintext"}


@dataclass
class Section:
    heading: str = ""
    level: int = 0
    paragraphs: list[str] = field(default_factory=list)
    children: list["Section"] = field(default_factory=list)
    image_count: int = 0

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self) -> Iterator[tuple[tuple[int, ...], "Section"]]:
        """Pre-order traversal yielding ``(path, section)``; the root has path ``()``."""
        stack: list[tuple[tuple[int, ...], Section]] = [((), self)]
        while stack:
            path, sec = stack.pop()
            yield path, sec
            for i in range(len(sec.children) - 1, -1, -1):
                stack.append((path + (i + 1,), sec.children[i]))


@dataclass
class Document:
    id: str
    company: str = ""
    title: str = ""
    root: Section = field(default_factory=Section)
    source_format: str = "plaintext"
    role: str = "member"
    digest: str = ""  # SHA-256 of the source file

    @property
    def sections(self) -> list[Section]:
        """Top-level headed sections, in source order."""
        return self.root.children

    def body_paragraphs(self) -> list[str]:
        return [p for _, sec in self.root.walk() for p in sec.paragraphs]


def format_path(path: tuple[int, ...]) -> str:
    return ".".join(map(str, path)) if path else "0"


def parse_path(text: str) -> tuple[int, ...]:
    return () if text == "0" else tuple(int(p) for p in text.split("."))


def leaf_sections(doc: Document) -> list[Section]:
    return [sec for _, sec in leaf_items(doc)]


def leaf_items(doc: Document) -> list[tuple[tuple[int, ...], Section]]:
    """``(path, section)`` for every leaf, in document order.

    The implicit root only counts when it has paragraphs and no children.
    """
    out = []
    for path, sec in doc.root.walk():
        if not sec.is_leaf:
            continue
        if not path and not sec.paragraphs:
            continue
        out.append((path, sec))
    return out


class _TreeBuilder:
    def __init__(self) -> None:
        self.root = Section()
        self._stack = [self.root]

    @property
    def current(self) -> Section:
        return self._stack[-1]

    def heading(self, text: str, level: int) -> None:
        while self._stack[-1].level >= level:
            self._stack.pop()
        sec = Section(heading=text, level=level)
        self._stack[-1].children.append(sec)
        self._stack.append(sec)

    def paragraph(self, text: str) -> None:
        self.current.paragraphs.append(text)


# --- docx -------------------------------------------------------------------


def _xml_offset(raw: bytes, err: ET.ParseError) -> int | None:
    try:
        line, col = err.position
    except (AttributeError, TypeError, ValueError):
        return None
    lines = raw.split(b"\n")
    return sum(len(ln) + 1 for ln in lines[: line - 1]) + col


def _parse_xml(raw: bytes, part: str) -> ET.Element:
    try:
        return ET.fromstring(raw)
    except ET.ParseError as exc:
        raise MalformedXmlError(f"malformed XML in {part}: {exc}", _xml_offset(raw, exc)) from exc


def _run_text(el: ET.Element) -> str:
    parts = []
    for node in el.iter():
        tag = node.tag
        if tag == W + "t" and node.text:
            parts.append(node.text)
        elif tag in (W + "tab", W + "br", W + "cr"):
            parts.append(" ")
    return "".join(parts)


def _count_images(el: ET.Element) -> int:
    return sum(1 for node in el.iter() if node.tag in (W + "drawing", W + "pict"))


def _style(p: ET.Element) -> str:
    ps = p.find(f"{W}pPr/{W}pStyle")
    return "" if ps is None else ps.get(W + "val", "")


def _body_blocks(parent: ET.Element) -> Iterator[ET.Element]:
    """Paragraphs and tables in document order, unwrapping content controls."""
    for child in parent:
        if child.tag in (W + "p", W + "tbl"):
            yield child
        elif child.tag == W + "sdt":
            content = child.find(W + "sdtContent")
            if content is not None:
                yield from _body_blocks(content)


def _table_rows(tbl: ET.Element) -> Iterator[str]:
    for tr in tbl.iter(W + "tr"):
        cells = [normalize_whitespace(_run_text(tc)) for tc in tr.findall(W + "tc")]
        if any(cells):
            yield "\t".join(cells)


def parse_docx(data: bytes, doc_id: str = "document", company: str = "") -> Document:
    """Parse an OOXML word-processing package.

    Paragraph styles ``Heading1``..``Heading9`` open sections at that level,
    ``Title`` sets the document title, tables become one tab-separated
    paragraph per row, and images are counted on the enclosing section.
    """
    try:
        zf = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise NotAZipError(f"{doc_id}: not a zip archive") from exc
    with zf:
        try:
            raw = zf.read("word/document.xml")
        except KeyError as exc:
            raise MissingDocumentPartError(f"{doc_id}: word/document.xml missing") from exc
        core_title = ""
        if "docProps/core.xml" in zf.namelist():
            try:
                core = ET.fromstring(zf.read("docProps/core.xml"))
                node = core.find(_DC + "title")
                if node is not None and node.text:
                    core_title = normalize_whitespace(node.text)
            except ET.ParseError:
                pass

    root = _parse_xml(raw, "word/document.xml")
    body = root.find(W + "body")
    tree = _TreeBuilder()
    title = ""
    if body is not None:
        for block in _body_blocks(body):
            if block.tag == W + "tbl":
                tree.current.image_count += _count_images(block)
                for row in _table_rows(block):
                    tree.paragraph(row)
                continue
            images = _count_images(block)
            text = normalize_whitespace(_run_text(block))
            style = _style(block)
            m = _HEADING_STYLE.match(style)
            if m and text:
                tree.heading(text, int(m.group(1)))
                tree.current.image_count += images
                continue
            tree.current.image_count += images
            if not text:
                continue
            if style.lower() == "title":
                title = title or text
                continue
            tree.paragraph(text)
    title = title or core_title or _preamble_title(tree.root)
    return Document(id=doc_id, company=company, title=title, root=tree.root, source_format="docx")


def _preamble_title(root: Section) -> str:
    for para in root.paragraphs:
        m = _TITLE_LINE.match(para)
        if m:
            return m.group(1).strip()
    return ""


# --- markdown / plain text --------------------------------------------------


def parse_plaintext(text: str, format: str = "markdown", doc_id: str = "document", company: str = "") -> Document:
    """Parse markdown (``#`` headings) or plain text into a Document.

    Every non-blank line is one paragraph. Plain text has no headings, so it
    always yields a single root section.
    """
    if format not in ("markdown", "plaintext"):
        raise ValueError(f"unsupported text format {format!r}")
    tree = _TreeBuilder()
    for line in text.splitlines():
        m = _MD_HEADING.match(line) if format == "markdown" else None
        if m:
            heading = normalize_whitespace(m.group(2))
            if heading:
                tree.heading(heading, len(m.group(1)))
            continue
        para = normalize_whitespace(line)
        if para:
            tree.paragraph(para)
    return Document(
        id=doc_id,
        company=company,
        title=_preamble_title(tree.root),
        root=tree.root,
        source_format=format,
    )


# --- files and corpora ------------------------------------------------------


def company_from_stem(stem: str) -> str:
    return stem.split("_", 1)[0]


def load_document(path: str | Path, company: str | None = None, role: str = "member") -> Document:
    path = Path(path)
    fmt = SUFFIX_FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise InputError(f"{path}: unsupported file type {path.suffix!r}")
    doc_id = path.stem
    company = company or company_from_stem(doc_id)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if fmt == "docx":
        doc = parse_docx(data, doc_id=doc_id, company=company)
    else:
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputError(f"{path}: not UTF-8 text") from exc
        doc = parse_plaintext(text, fmt, doc_id=doc_id, company=company)
    doc.role = role
    doc.digest = hashlib.sha256(data).hexdigest()
    if not doc.title:
        doc.title = doc_id
    return doc


MANIFEST_NAME = "manifest.json"


def read_manifest(path: str | Path) -> list[dict]:
    """Corpus manifest: a JSON list of ``{"path", "company", "role"?}`` records."""
    path = Path(path)
    try:
        entries = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: unreadable manifest ({exc})") from exc
    if not isinstance(entries, list) or not all(isinstance(e, dict) and "path" in e for e in entries):
        raise InputError(f"{path}: manifest must be a list of objects with a 'path' field")
    return entries


def load_corpus(input_dir: str | Path, manifest: str | Path | None = None) -> list[Document]:
    """Load every document of a corpus directory, sorted by id.

    With a manifest (explicit, or ``manifest.json`` inside ``input_dir``) only
    the listed files are read and companies/roles come from it; otherwise all
    ``.docx``, ``.md`` and ``.txt`` files are taken and the company is the
    filename prefix before the first underscore.
    """
    input_dir = Path(input_dir)
    if manifest is None and (input_dir / MANIFEST_NAME).is_file():
        manifest = input_dir / MANIFEST_NAME
    if manifest is not None:
        manifest = Path(manifest)
        items = [
            (manifest.parent / e["path"], e.get("company"), e.get("role", "member"))
            for e in read_manifest(manifest)
        ]
    else:
        if not input_dir.is_dir():
            raise NoDocumentsError(f"{input_dir}: not a directory")
        items = [
            (p, None, "member")
            for p in sorted(input_dir.iterdir())
            if p.is_file() and p.suffix.lower() in SUFFIX_FORMATS
        ]
    docs: dict[str, Document] = {}
    for path, company, role in items:
        doc = load_document(path, company=company, role=role)
        if doc.id in docs:
            raise DuplicateDocumentIdError(f"duplicate document id {doc.id!r}")
        docs[doc.id] = doc
        log.info("parsed %s: %d leaf sections", doc.id, len(leaf_sections(doc)))
    if not docs:
        raise NoDocumentsError(f"{input_dir}: no parsable documents")
    return [docs[k] for k in sorted(docs)]
