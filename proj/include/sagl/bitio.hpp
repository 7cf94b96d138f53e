#ifndef SAGL_BITIO_HPP
#define SAGL_BITIO_HPP

#include <cstdint>
#include <vector>

#include "sagl/errors.hpp"

namespace sagl {

// MSB-first bit stream; multi-bit fields are written big-endian.
class BitWriter {
public:
    void put_bit(bool b) {
        if (bit_ == 0) bytes_.push_back(0);
        if (b) bytes_.back() |= static_cast<std::uint8_t>(1u << (7 - bit_));
        bit_ = (bit_ + 1) & 7;
        ++count_;
    }
    void put_bits(std::uint64_t value, unsigned width) {
        for (unsigned i = width; i-- > 0;) put_bit((value >> i) & 1ULL);
    }
    std::uint64_t bit_count() const { return count_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }  // zero-padded tail

private:
    std::vector<std::uint8_t> bytes_;
    unsigned bit_ = 0;
    std::uint64_t count_ = 0;
};

class BitReader {
public:
    BitReader(const std::uint8_t* data, std::uint64_t bit_count)
        : data_(data), bits_(bit_count) {}

    bool get_bit() {
        if (pos_ >= bits_) throw FormatError("bit stream truncated");
        bool b = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
        ++pos_;
        return b;
    }
    std::uint64_t get_bits(unsigned width) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) v = (v << 1) | (get_bit() ? 1u : 0u);
        return v;
    }
    std::uint64_t remaining() const { return bits_ - pos_; }
    std::uint64_t position() const { return pos_; }

private:
    const std::uint8_t* data_;
    std::uint64_t bits_;
    std::uint64_t pos_ = 0;
};

}  // namespace sagl

#endif
