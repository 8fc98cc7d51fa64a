#include "curtok/unicode.hpp"

#include <algorithm>

#include "curtok/unicode_data.hpp"

namespace curtok::uni {

namespace {

constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulVCount = 21;
constexpr int kHangulTCount = 28;
constexpr int kHangulNCount = kHangulVCount * kHangulTCount;  // 588
constexpr int kHangulSCount = 11172;

bool in_ranges(const Range* ranges, size_t n, char32_t cp) {
    size_t lo = 0, hi = n;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (cp < ranges[mid].lo) {
            hi = mid;
        } else if (cp > ranges[mid].hi) {
            lo = mid + 1;
        } else {
            return true;
        }
    }
    return false;
}

const DecompEntry* find_decomp(char32_t cp) {
    size_t lo = 0, hi = kDecompCount;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (kDecomp[mid].cp < cp) {
            lo = mid + 1;
        } else if (kDecomp[mid].cp > cp) {
            hi = mid;
        } else {
            return &kDecomp[mid];
        }
    }
    return nullptr;
}

char32_t compose_pair(char32_t a, char32_t b) {
    // Hangul: L+V -> LV, LV+T -> LVT.
    if (a >= kHangulLBase && a < kHangulLBase + 19 && b >= kHangulVBase &&
        b < kHangulVBase + kHangulVCount) {
        return kHangulSBase +
               ((a - kHangulLBase) * kHangulVCount + (b - kHangulVBase)) * kHangulTCount;
    }
    if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount &&
        (a - kHangulSBase) % kHangulTCount == 0 && b > kHangulTBase &&
        b < kHangulTBase + kHangulTCount) {
        return a + (b - kHangulTBase);
    }
    size_t lo = 0, hi = kCompCount;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        const CompEntry& e = kComp[mid];
        if (e.first < a || (e.first == a && e.second < b)) {
            lo = mid + 1;
        } else if (e.first > a || (e.first == a && e.second > b)) {
            hi = mid;
        } else {
            return e.composed;
        }
    }
    return 0;
}

void canonical_reorder(std::u32string& s) {
    for (size_t i = 1; i < s.size(); ++i) {
        unsigned cc = combining_class(s[i]);
        if (cc == 0) continue;
        size_t j = i;
        while (j > 0 && combining_class(s[j - 1]) > cc) {
            std::swap(s[j - 1], s[j]);
            --j;
        }
    }
}

}  // namespace

namespace {

// Decodes one scalar starting at i (invalid maximal subparts become
// U+FFFD); returns the index just past it.
size_t decode_step(std::string_view bytes, size_t i, char32_t& cp_out) {
    const size_t n = bytes.size();
    unsigned char b0 = static_cast<unsigned char>(bytes[i]);
    if (b0 < 0x80) {
        cp_out = b0;
        return i + 1;
    }
    int len;
    char32_t cp;
    unsigned char min_next = 0x80, max_next = 0xBF;
    if (b0 >= 0xC2 && b0 <= 0xDF) {
        len = 2;
        cp = b0 & 0x1F;
    } else if (b0 >= 0xE0 && b0 <= 0xEF) {
        len = 3;
        cp = b0 & 0x0F;
        if (b0 == 0xE0) min_next = 0xA0;           // no overlongs
        else if (b0 == 0xED) max_next = 0x9F;      // no surrogates
    } else if (b0 >= 0xF0 && b0 <= 0xF4) {
        len = 4;
        cp = b0 & 0x07;
        if (b0 == 0xF0) min_next = 0x90;
        else if (b0 == 0xF4) max_next = 0x8F;
    } else {
        cp_out = kReplacement;
        return i + 1;
    }
    size_t j = i + 1;
    for (int k = 1; k < len; ++k, ++j) {
        if (j >= n) {
            cp_out = kReplacement;
            return (j > i + 1) ? j : i + 1;
        }
        unsigned char b = static_cast<unsigned char>(bytes[j]);
        unsigned char lo = (k == 1) ? min_next : 0x80;
        unsigned char hi = (k == 1) ? max_next : 0xBF;
        if (b < lo || b > hi) {
            cp_out = kReplacement;
            return (j > i + 1) ? j : i + 1;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    cp_out = cp;
    return i + len;
}

}  // namespace

std::u32string decode_utf8(std::string_view bytes) {
    std::u32string out;
    out.reserve(bytes.size());
    size_t i = 0;
    while (i < bytes.size()) {
        char32_t cp;
        i = decode_step(bytes, i, cp);
        out.push_back(cp);
    }
    return out;
}

std::vector<size_t> scalar_starts(std::string_view bytes) {
    std::vector<size_t> starts;
    size_t i = 0;
    while (i < bytes.size()) {
        starts.push_back(i);
        char32_t cp;
        i = decode_step(bytes, i, cp);
    }
    return starts;
}

bool valid_utf8(std::string_view bytes) {
    std::u32string decoded = decode_utf8(bytes);
    return encode_utf8(decoded) == bytes;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode_utf8(const std::u32string& scalars) {
    std::string out;
    out.reserve(scalars.size() * 2);
    for (char32_t cp : scalars) append_utf8(out, cp);
    return out;
}

size_t utf8_scalar_count(std::string_view bytes) {
    return decode_utf8(bytes).size();
}

bool is_whitespace(char32_t cp) {
    return in_ranges(kWhitespace, kWhitespaceCount, cp);
}

bool is_decimal_digit(char32_t cp) {
    return in_ranges(kDecimalDigit, kDecimalDigitCount, cp);
}

unsigned combining_class(char32_t cp) {
    size_t lo = 0, hi = kCccCount;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (kCcc[mid].cp < cp) {
            lo = mid + 1;
        } else if (kCcc[mid].cp > cp) {
            hi = mid;
        } else {
            return kCcc[mid].ccc;
        }
    }
    return 0;
}

std::u32string nfd(const std::u32string& scalars) {
    std::u32string out;
    out.reserve(scalars.size());
    for (char32_t cp : scalars) {
        if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
            char32_t s = cp - kHangulSBase;
            out.push_back(kHangulLBase + s / kHangulNCount);
            out.push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
            if (s % kHangulTCount != 0) out.push_back(kHangulTBase + s % kHangulTCount);
            continue;
        }
        if (const DecompEntry* e = find_decomp(cp)) {
            out.append(kDecompPool + e->offset, e->len);
        } else {
            out.push_back(cp);
        }
    }
    canonical_reorder(out);
    return out;
}

std::u32string nfc(const std::u32string& scalars) {
    std::u32string d = nfd(scalars);
    std::u32string out;
    out.reserve(d.size());
    ptrdiff_t last_starter = -1;
    unsigned prev_cc = 0;
    for (char32_t c : d) {
        unsigned cc = combining_class(c);
        if (last_starter >= 0 && (prev_cc == 0 || prev_cc < cc)) {
            if (char32_t comp = compose_pair(out[last_starter], c)) {
                out[last_starter] = comp;
                continue;
            }
        }
        out.push_back(c);
        if (cc == 0) {
            last_starter = static_cast<ptrdiff_t>(out.size()) - 1;
            prev_cc = 0;
        } else {
            prev_cc = cc;
        }
    }
    return out;
}

std::string nfc_utf8(std::string_view bytes) {
    return encode_utf8(nfc(decode_utf8(bytes)));
}

size_t word_count(std::string_view text) {
    std::u32string s = decode_utf8(text);
    size_t count = 0;
    bool in_word = false;
    for (char32_t cp : s) {
        if (is_whitespace(cp)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

std::vector<std::u32string> split_words(const std::u32string& scalars) {
    std::vector<std::u32string> words;
    std::u32string cur;
    for (char32_t cp : scalars) {
        if (is_whitespace(cp)) {
            if (!cur.empty()) {
                words.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.push_back(cp);
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

double mean_word_length(std::string_view text) {
    auto words = split_words(decode_utf8(text));
    if (words.empty()) return 0.0;
    size_t total = 0;
    for (const auto& w : words) total += w.size();
    return static_cast<double>(total) / static_cast<double>(words.size());
}

}  // namespace curtok::uni
