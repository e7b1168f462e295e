"""Quoted-printable decoding for legacy Latin-1 text.

Old mail bodies arrive with `=E9`-style escapes and soft line breaks. The
decoder maps `=XX` hex pairs through Latin-1 (byte value = code point),
removes `=`-terminated line breaks, and passes anything malformed through
verbatim — garbage in the input should stay visible, not crash the import.

Decoding is idempotent on well-formed decoded text: once the escapes are
gone there is nothing left to decode.
"""

from __future__ import annotations

_HEX = set("0123456789abcdefABCDEF")


def decode_quoted_printable(text: str) -> str:
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch != "=":
            out.append(ch)
            i += 1
            continue
        # soft line break: '=' at end of line continues the logical line
        if text.startswith("\r\n", i + 1):
            i += 3
            continue
        if text.startswith("\n", i + 1):
            i += 2
            continue
        pair = text[i + 1:i + 3]
        if len(pair) == 2 and pair[0] in _HEX and pair[1] in _HEX:
            out.append(chr(int(pair, 16)))  # Latin-1: byte == code point
            i += 3
            continue
        out.append(ch)  # malformed escape: keep the '=' as-is
        i += 1
    return "".join(out)
