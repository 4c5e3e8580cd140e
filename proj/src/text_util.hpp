#ifndef SEASONAL_TEXT_UTIL_HPP
#define SEASONAL_TEXT_UTIL_HPP

#include "seasonal/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace seasonal::detail
{

inline std::string_view trim(std::string_view s)
{
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if(b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

/// Splits on `sep` and trims each piece. Empty pieces are kept.
inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while(true)
    {
        auto pos = s.find(sep, start);
        if(pos == std::string_view::npos)
        {
            out.push_back(trim(s.substr(start)));
            return out;
        }
        out.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
}

inline double parse_double(std::string_view s, int line, std::string_view field)
{
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if(ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ParseError(fmt::format("line {}: field {} is not a number: '{}'", line, field, s),
                         line, std::string(field));
    return v;
}

inline int parse_int(std::string_view s, int line, std::string_view field)
{
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if(ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ParseError(fmt::format("line {}: field {} is not an integer: '{}'", line, field, s),
                         line, std::string(field));
    return v;
}

} // namespace seasonal::detail
#endif // SEASONAL_TEXT_UTIL_HPP
