#include "specmatch/rruff.hpp"

#include <cctype>
#include <charconv>
#include <istream>
#include <sstream>

#include "specmatch/errors.hpp"

namespace specmatch {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace

RawSpectrum parse_rruff(std::istream& in) {
    RawSpectrum raw;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (sv.starts_with("##")) {
            sv.remove_prefix(2);
            auto eq = sv.find('=');
            std::string key(trim(eq == std::string_view::npos ? sv : sv.substr(0, eq)));
            std::string value(eq == std::string_view::npos ? std::string_view{}
                                                           : trim(sv.substr(eq + 1)));
            if (key == "END") break;
            raw.metadata[key] = value;
            continue;
        }
        auto comma = sv.find(',');
        double w = 0.0, i = 0.0;
        if (comma == std::string_view::npos || !parse_double(sv.substr(0, comma), w) ||
            !parse_double(sv.substr(comma + 1), i))
            throw MalformedLine(line_no, line);
        if (!raw.points.empty() && w <= raw.points.back().first) throw NonMonotonicGrid();
        raw.points.emplace_back(w, i);
    }
    if (raw.points.size() < 2) throw EmptySpectrum();
    return raw;
}

RawSpectrum parse_rruff(const std::string& text) {
    std::istringstream in(text);
    return parse_rruff(in);
}

std::string serialize_rruff(const RawSpectrum& raw) {
    std::ostringstream out;
    out.precision(17);
    for (const auto& [k, v] : raw.metadata) out << "##" << k << "=" << v << "\n";
    for (const auto& [w, i] : raw.points) out << w << ", " << i << "\n";
    out << "##END=\n";
    return out.str();
}

}  // namespace specmatch
