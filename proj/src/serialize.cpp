#include "specmatch/serialize.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "specmatch/errors.hpp"

namespace specmatch {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

}  // namespace

std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed) {
    static const auto table = make_crc_table();
    std::uint32_t c = seed ^ 0xFFFFFFFFu;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) c = table[(c ^ p[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

void BinWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void BinWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void BinWriter::f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
}

void BinWriter::f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
}

void BinWriter::str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
}

void BinWriter::f32_array(const std::vector<float>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    for (float x : v) f32(x);
}

void BinWriter::write_to(std::ostream& out, bool with_crc_trailer) const {
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (with_crc_trailer) {
        std::uint32_t c = crc32(buf_.data(), buf_.size());
        char trailer[4];
        for (int i = 0; i < 4; ++i) trailer[i] = static_cast<char>((c >> (8 * i)) & 0xFF);
        out.write(trailer, 4);
    }
    if (!out) throw IOError("write failed");
}

BinReader BinReader::from_stream(std::istream& in) {
    std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return BinReader(std::move(buf));
}

BinReader BinReader::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open " + path);
    return from_stream(in);
}

void BinReader::need(std::size_t n) {
    if (pos_ + n > buf_.size()) throw IOError("truncated binary payload");
}

std::uint8_t BinReader::u8() {
    need(1);
    return static_cast<std::uint8_t>(buf_[pos_++]);
}

std::uint32_t BinReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
}

std::uint64_t BinReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
}

float BinReader::f32() {
    std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

double BinReader::f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

std::string BinReader::str() {
    std::uint32_t n = u32();
    need(n);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
}

std::vector<float> BinReader::f32_array() {
    std::uint32_t n = u32();
    std::vector<float> v(n);
    for (auto& x : v) x = f32();
    return v;
}

void BinReader::check_crc_trailer() {
    if (buf_.size() < 4) throw IOError("payload too short for CRC trailer");
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i)
        stored |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[buf_.size() - 4 + i]))
                  << (8 * i);
    buf_.resize(buf_.size() - 4);
    if (crc32(buf_.data(), buf_.size()) != stored) throw IOError("CRC mismatch");
}

std::uint32_t BinReader::payload_crc() const { return crc32(buf_.data(), buf_.size()); }

}  // namespace specmatch
