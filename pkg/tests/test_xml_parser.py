import random

import pytest

from gridwatch.xmlstyle import Element, Text, XmlParseError, parse_xml, serialize
from oracles import doc_to_xml, random_document


class TestWellFormed:
    def test_simple_tree(self):
        doc = parse_xml("<a><b>1</b></a>")
        assert doc.root.name == "a"
        (b,) = doc.root.child_elements()
        assert b.name == "b"
        assert b.string_value() == "1"

    def test_attributes(self):
        doc = parse_xml('<a x="1" y="two"/>')
        assert doc.root.attrs == {"x": "1", "y": "two"}

    def test_entities(self):
        doc = parse_xml("<a>&amp;&lt;&gt;&quot;&apos;</a>")
        assert doc.root.string_value() == "&<>\"'"

    def test_entity_in_attribute(self):
        doc = parse_xml('<a x="a&amp;b"/>')
        assert doc.root.attrs["x"] == "a&b"

    def test_xml_declaration_and_comments_skipped(self):
        doc = parse_xml('<?xml version="1.0"?><!-- c --><a><!-- inner -->x</a><!-- t -->')
        assert doc.root.string_value() == "x"

    def test_text_around_comment_merges(self):
        doc = parse_xml("<a>x<!-- c -->y</a>")
        assert [n.content for n in doc.root.children if isinstance(n, Text)] == ["xy"]

    def test_mixed_content_order(self):
        doc = parse_xml("<a>pre<b/>post</a>")
        kinds = [type(n).__name__ for n in doc.root.children]
        assert kinds == ["Text", "Element", "Text"]


class TestErrors:
    @pytest.mark.parametrize(
        "text,fragment",
        [
            ("<a>", "unclosed"),
            ('<a x="1" x="2"/>', "duplicate attribute"),
            ("<a></b>", "mismatched close tag"),
            ("<a/><b/>", "multiple root"),
            ("<a>&bogus;</a>", "unsupported entity"),
            ("<a>&amp</a>", "entity"),
            ("", "expected a root element"),
            ("just text", "expected a root element"),
            ("<a><![CDATA[x]]></a>", "not supported"),
            ("<a><?pi?></a>", "not supported"),
            ("<!DOCTYPE a><a/>", "not supported"),
            ("<a/>trailing", "outside the root"),
        ],
    )
    def test_rejects(self, text, fragment):
        with pytest.raises(XmlParseError, match=fragment):
            parse_xml(text)

    def test_error_carries_line_and_column(self):
        with pytest.raises(XmlParseError) as exc_info:
            parse_xml("<a>\n  <b></c>\n</a>")
        assert exc_info.value.line == 2
        assert "line 2" in str(exc_info.value)


class TestRoundTrip:
    def test_serialize_reparses_equal(self):
        text = '<a x="1&amp;2"><b>t&lt;v</b> tail <c/></a>'
        doc = parse_xml(text)
        again = parse_xml(serialize(doc))
        assert serialize(again) == serialize(doc)

    def test_random_documents_round_trip(self):
        rng = random.Random(7)
        for _ in range(100):
            xml = doc_to_xml(random_document(rng))
            doc = parse_xml(xml)
            assert serialize(parse_xml(serialize(doc))) == serialize(doc)


def test_document_order_indexing():
    doc = parse_xml('<a x="1"><b/><c y="2">t</c></a>')
    a = doc.root
    b, c = a.child_elements()
    assert doc.order < a.order < a.attr_nodes[0].order < b.order < c.order
    assert c.order < c.attr_nodes[0].order < c.children[0].order
