#pragma once

#include <cstddef>

namespace curtok::uni {

// Fully decomposed canonical mapping: cp -> kDecompPool[offset, offset+len).
struct DecompEntry {
    char32_t cp;
    unsigned offset;
    unsigned len;
};

// Primary composite: (first, second) -> composed. Sorted by (first, second).
struct CompEntry {
    char32_t first;
    char32_t second;
    char32_t composed;
};

// Canonical combining class for cp (only nonzero classes listed). Sorted by cp.
struct CccEntry {
    char32_t cp;
    unsigned char ccc;
};

// Inclusive code point range. Sorted, non-overlapping.
struct Range {
    char32_t lo;
    char32_t hi;
};

extern const char32_t kDecompPool[];
extern const DecompEntry kDecomp[];
extern const size_t kDecompCount;
extern const CompEntry kComp[];
extern const size_t kCompCount;
extern const CccEntry kCcc[];
extern const size_t kCccCount;
extern const Range kWhitespace[];
extern const size_t kWhitespaceCount;
extern const Range kDecimalDigit[];
extern const size_t kDecimalDigitCount;

}  // namespace curtok::uni
