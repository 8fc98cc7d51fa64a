#!/usr/bin/env python3
"""Regenerates src/unicode_data.cpp from Python's unicodedata module.

Emits the tables needed for NFC normalization (canonical decompositions,
primary composition pairs, combining classes) plus White_Space-style and
decimal-digit ranges. Hangul syllables are handled algorithmically in C++
and are excluded here.

Usage: python3 scripts/gen_unicode_data.py > src/unicode_data.cpp
"""

import sys
import unicodedata

HANGUL_BASE = 0xAC00
HANGUL_END = 0xD7A3
MAX_CP = 0x110000


def is_hangul_syllable(cp):
    return HANGUL_BASE <= cp <= HANGUL_END


def gen_decompositions():
    """cp -> fully decomposed canonical sequence (NFD of the single scalar)."""
    pool = []
    entries = []
    for cp in range(MAX_CP):
        if is_hangul_syllable(cp) or 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)
        nfd = unicodedata.normalize("NFD", ch)
        if nfd == ch:
            continue
        seq = [ord(c) for c in nfd]
        entries.append((cp, len(pool), len(seq)))
        pool.extend(seq)
    return entries, pool


def gen_compositions():
    """Primary composites: top-level canonical pair decompositions minus exclusions."""
    pairs = []
    for cp in range(MAX_CP):
        if is_hangul_syllable(cp) or 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)
        raw = unicodedata.decomposition(ch)
        if not raw or raw.startswith("<"):
            continue
        parts = raw.split()
        if len(parts) != 2:
            continue
        # Composition exclusions: NFC does not recompose these.
        if unicodedata.normalize("NFC", unicodedata.normalize("NFD", ch)) != ch:
            continue
        a, b = int(parts[0], 16), int(parts[1], 16)
        pairs.append((a, b, cp))
    pairs.sort()
    return pairs


def gen_ccc():
    entries = []
    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        c = unicodedata.combining(chr(cp))
        if c:
            entries.append((cp, c))
    return entries


def to_ranges(cps):
    ranges = []
    for cp in sorted(cps):
        if ranges and cp == ranges[-1][1] + 1:
            ranges[-1] = (ranges[-1][0], cp)
        else:
            ranges.append((cp, cp))
    return ranges


def gen_whitespace():
    cps = [cp for cp in range(MAX_CP)
           if not (0xD800 <= cp <= 0xDFFF) and chr(cp).isspace()]
    return to_ranges(cps)


def gen_digits():
    cps = [cp for cp in range(MAX_CP)
           if not (0xD800 <= cp <= 0xDFFF)
           and unicodedata.category(chr(cp)) == "Nd"]
    return to_ranges(cps)


def chunk(items, n=8):
    for i in range(0, len(items), n):
        yield items[i:i + n]


def emit(out):
    decomp_entries, decomp_pool = gen_decompositions()
    comp_pairs = gen_compositions()
    ccc_entries = gen_ccc()
    ws_ranges = gen_whitespace()
    digit_ranges = gen_digits()

    w = out.write
    w("// Generated by scripts/gen_unicode_data.py (Unicode %s). Do not edit.\n"
      % unicodedata.unidata_version)
    w('#include "curtok/unicode_data.hpp"\n\n')
    w("namespace curtok::uni {\n\n")

    w("const char32_t kDecompPool[] = {\n")
    for row in chunk(["0x%X" % v for v in decomp_pool], 12):
        w("    " + ", ".join(row) + ",\n")
    w("};\n\n")

    w("const DecompEntry kDecomp[] = {\n")
    for row in chunk(["{0x%X,%d,%d}" % e for e in decomp_entries], 4):
        w("    " + ", ".join(row) + ",\n")
    w("};\n")
    w("const size_t kDecompCount = sizeof(kDecomp) / sizeof(kDecomp[0]);\n\n")

    w("const CompEntry kComp[] = {\n")
    for row in chunk(["{0x%X,0x%X,0x%X}" % p for p in comp_pairs], 4):
        w("    " + ", ".join(row) + ",\n")
    w("};\n")
    w("const size_t kCompCount = sizeof(kComp) / sizeof(kComp[0]);\n\n")

    w("const CccEntry kCcc[] = {\n")
    for row in chunk(["{0x%X,%d}" % e for e in ccc_entries], 8):
        w("    " + ", ".join(row) + ",\n")
    w("};\n")
    w("const size_t kCccCount = sizeof(kCcc) / sizeof(kCcc[0]);\n\n")

    w("const Range kWhitespace[] = {\n")
    for row in chunk(["{0x%X,0x%X}" % r for r in ws_ranges], 6):
        w("    " + ", ".join(row) + ",\n")
    w("};\n")
    w("const size_t kWhitespaceCount = sizeof(kWhitespace) / sizeof(kWhitespace[0]);\n\n")

    w("const Range kDecimalDigit[] = {\n")
    for row in chunk(["{0x%X,0x%X}" % r for r in digit_ranges], 6):
        w("    " + ", ".join(row) + ",\n")
    w("};\n")
    w("const size_t kDecimalDigitCount = sizeof(kDecimalDigit) / sizeof(kDecimalDigit[0]);\n\n")

    w("}  // namespace curtok::uni\n")


if __name__ == "__main__":
    emit(sys.stdout)
