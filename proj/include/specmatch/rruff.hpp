#pragma once

#include <iosfwd>
#include <string>

#include "specmatch/spectrum.hpp"

namespace specmatch {

// RRUFF-style text: "##KEY=VALUE" header lines, "wavenumber, intensity" data
// lines, optional "##END=" terminator. Blank lines and trailing whitespace
// are tolerated.
RawSpectrum parse_rruff(std::istream& in);
RawSpectrum parse_rruff(const std::string& text);

std::string serialize_rruff(const RawSpectrum& raw);

}  // namespace specmatch
