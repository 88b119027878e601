#pragma once

// Small helpers shared by the line-oriented file formats.

#include "vk/errors.hpp"

#include <charconv>
#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace vk::io {

// shortest representation that parses back to the same double
inline std::string fmt(double v)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, long line)
{
    double v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw FormatError("bad number '" + std::string(s) + "'", line);
    return v;
}

template <typename Int>
Int parse_int(std::string_view s, long line)
{
    Int v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw FormatError("bad integer '" + std::string(s) + "'", line);
    return v;
}

inline std::vector<std::string> split_ws(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

// Line reader that tracks the line number for error messages.
class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    bool next(std::string& line)
    {
        if (!std::getline(is_, line)) return false;
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    // next line that is neither empty nor a '#' comment
    bool next_data(std::string& line)
    {
        while (next(line))
            if (!line.empty() && line[0] != '#') return true;
        return false;
    }

    std::string expect_data(const char* what)
    {
        std::string s;
        if (!next_data(s)) throw FormatError(std::string("unexpected end of file, expected ") + what, line_ + 1);
        return s;
    }

    long line() const { return line_; }

private:
    std::istream& is_;
    long line_ = 0;
};

// "key value" record; throws with position info if the key differs.
inline std::string expect_key(const std::vector<std::string>& tok, std::string_view key, long line)
{
    if (tok.size() != 2 || tok[0] != key)
        throw FormatError("expected '" + std::string(key) + " <value>'", line);
    return tok[1];
}

} // namespace vk::io
