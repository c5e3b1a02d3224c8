#!/usr/bin/env python3
"""Reference skeletons from html5lib for differential parser tests.

Reads record-separator (0x1e) delimited HTML documents on stdin and prints
one "(html(head)(body(p)))" style element skeleton per line. Element names are
lowercased and namespace prefixes dropped, matching the C++ parser's naming.
"""
import sys

import html5lib


def walk(el, out):
    tag = el.tag
    if isinstance(tag, str) and not tag.startswith("<!"):
        if "}" in tag:
            tag = tag.split("}", 1)[1]
        out.append("(" + tag.lower())
        for child in el:
            walk(child, out)
        out.append(")")


def skeleton(doc):
    parser = html5lib.HTMLParser(tree=html5lib.getTreeBuilder("etree"),
                                 namespaceHTMLElements=False)
    root = parser.parse(doc)
    out = []
    walk(root, out)
    return "".join(out)


def main():
    data = sys.stdin.buffer.read().decode("utf-8", errors="replace")
    for record in data.split("\x1e"):
        print(skeleton(record))


if __name__ == "__main__":
    main()
