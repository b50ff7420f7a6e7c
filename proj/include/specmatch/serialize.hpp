#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace specmatch {

std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed = 0);
inline std::uint32_t crc32(const std::vector<char>& buf) {
    return crc32(buf.data(), buf.size());
}

// Little-endian binary writer that accumulates into a buffer so a CRC of the
// payload can be appended.
class BinWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v);
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void u64(std::uint64_t v);
    void f32(float v);
    void f64(double v);
    void str(const std::string& s);  // u32 length + bytes
    void f32_array(const std::vector<float>& v);

    const std::vector<char>& buffer() const { return buf_; }
    void write_to(std::ostream& out, bool with_crc_trailer) const;

private:
    std::vector<char> buf_;
};

class BinReader {
public:
    explicit BinReader(std::vector<char> buf) : buf_(std::move(buf)) {}
    static BinReader from_stream(std::istream& in);
    static BinReader from_file(const std::string& path);

    std::uint8_t u8();
    std::uint32_t u32();
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::uint64_t u64();
    float f32();
    double f64();
    std::string str();
    std::vector<float> f32_array();

    // Validates and strips a 4-byte CRC-32 trailer over everything before it.
    void check_crc_trailer();
    std::size_t remaining() const { return buf_.size() - pos_; }
    std::uint32_t payload_crc() const;  // CRC of the full payload (sans trailer)

private:
    void need(std::size_t n);
    std::vector<char> buf_;
    std::size_t pos_ = 0;
};

}  // namespace specmatch
