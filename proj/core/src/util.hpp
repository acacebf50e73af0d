#pragma once

// Internal helpers shared across the core implementation files.
// Not installed; nothing here is part of the public API.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace courtsim::util {

inline std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && is_space(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && is_space(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline bool is_word_char(unsigned char c) {
    return std::isalnum(c) != 0;
}

inline std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> words;
    std::string cur;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            if (!cur.empty()) {
                words.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(static_cast<char>(c));
        }
    }
    if (!cur.empty()) words.push_back(cur);
    return words;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

// FNV-1a 64-bit; used for store checksums and the bag-of-words embedder.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t seed = 1469598103934665603ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

// Byte offsets of every UTF-8 character start, plus a final entry equal to
// s.size(). An invalid byte counts as a single one-byte character so that
// arbitrary input still tiles completely.
inline std::vector<std::size_t> utf8_char_starts(std::string_view s) {
    std::vector<std::size_t> starts;
    starts.reserve(s.size() + 1);
    std::size_t i = 0;
    while (i < s.size()) {
        starts.push_back(i);
        unsigned char c = static_cast<unsigned char>(s[i]);
        std::size_t len = 1;
        if ((c & 0x80U) == 0x00U) len = 1;
        else if ((c & 0xE0U) == 0xC0U) len = 2;
        else if ((c & 0xF0U) == 0xE0U) len = 3;
        else if ((c & 0xF8U) == 0xF0U) len = 4;
        // Continuation bytes must follow; otherwise fall back to one byte.
        std::size_t j = 1;
        for (; j < len && i + j < s.size(); ++j) {
            if ((static_cast<unsigned char>(s[i + j]) & 0xC0U) != 0x80U) break;
        }
        if (j != len || i + len > s.size()) len = 1;
        i += len;
    }
    starts.push_back(s.size());
    return starts;
}

// First n UTF-8 characters of s (whole string when shorter).
inline std::string utf8_head(std::string_view s, std::size_t n) {
    auto starts = utf8_char_starts(s);
    std::size_t chars = starts.size() - 1;
    if (n >= chars) return std::string(s);
    return std::string(s.substr(0, starts[n]));
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string now_iso8601_utc() {
    using namespace std::chrono;
    auto now = system_clock::now();
    std::time_t t = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string now_file_timestamp_utc() {
    using namespace std::chrono;
    auto now = system_clock::now();
    std::time_t t = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%S", &tm);
    return buf;
}

}  // namespace courtsim::util
