#pragma once

#include <unistd.h>

#include <array>
#include <atomic>
#include <filesystem>
#include <string>
#include <utility>

#include "curtok/hash.hpp"
#include "curtok/unicode.hpp"

namespace testutil {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("curtok_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

// Mixed-script text with spaces, newlines and the occasional literal
// U+2581, the cases the tokenizer must round-trip exactly.
inline std::string random_utf8_string(curtok::SplitMix64& rng, size_t max_scalars) {
    static constexpr std::array<std::pair<char32_t, char32_t>, 7> ranges = {{
        {0x0020, 0x007E},    // ascii
        {0x00A0, 0x02FF},    // latin supplement and extensions
        {0x0900, 0x097F},    // devanagari, incl. combining signs
        {0x0B80, 0x0BFF},    // tamil
        {0x4E00, 0x4FFF},    // cjk
        {0x1F300, 0x1F64F},  // emoji
        {0x0030, 0x0039},    // digits
    }};
    size_t n = 1 + rng.next_below(max_scalars);
    std::u32string s;
    s.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        uint64_t pick = rng.next_below(100);
        char32_t c;
        if (pick < 12) c = U' ';
        else if (pick < 14) c = U'\n';
        else if (pick < 15) c = U'\t';
        else if (pick < 16) c = U'▁';
        else {
            const auto& [lo, hi] = ranges[rng.next_below(ranges.size())];
            c = lo + static_cast<char32_t>(rng.next_below(hi - lo + 1));
        }
        s.push_back(c);
    }
    return curtok::uni::encode_utf8(s);
}

}  // namespace testutil
