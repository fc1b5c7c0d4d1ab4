// Minimal arbitrary-precision unsigned integer: just enough for exact
// direction counts n^E, which overflow 64 bits quickly.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ria {

class BigUint {
  public:
    BigUint() : limbs_{0} {}
    BigUint(std::uint64_t v) {  // NOLINT: implicit by design
        limbs_.push_back(static_cast<std::uint32_t>(v & 0xffffffffULL));
        limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
        trim();
    }

    static BigUint pow(std::uint64_t base, std::uint64_t exp) {
        BigUint result(1);
        BigUint b(base);
        while (exp > 0) {
            if (exp & 1) result = mul(result, b);
            b = mul(b, b);
            exp >>= 1;
        }
        return result;
    }

    static BigUint mul(const BigUint& x, const BigUint& y) {
        BigUint out;
        out.limbs_.assign(x.limbs_.size() + y.limbs_.size(), 0);
        for (std::size_t i = 0; i < x.limbs_.size(); ++i) {
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < y.limbs_.size(); ++j) {
                std::uint64_t cur = out.limbs_[i + j] +
                                    static_cast<std::uint64_t>(x.limbs_[i]) * y.limbs_[j] + carry;
                out.limbs_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
                carry = cur >> 32;
            }
            std::size_t k = i + y.limbs_.size();
            while (carry > 0) {
                std::uint64_t cur = out.limbs_[k] + carry;
                out.limbs_[k] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
                carry = cur >> 32;
                ++k;
            }
        }
        out.trim();
        return out;
    }

    BigUint operator+(const BigUint& o) const {
        BigUint out;
        out.limbs_.assign(std::max(limbs_.size(), o.limbs_.size()) + 1, 0);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < out.limbs_.size(); ++i) {
            std::uint64_t cur = carry;
            if (i < limbs_.size()) cur += limbs_[i];
            if (i < o.limbs_.size()) cur += o.limbs_[i];
            out.limbs_[i] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
            carry = cur >> 32;
        }
        out.trim();
        return out;
    }

    int compare(const BigUint& o) const {
        if (limbs_.size() != o.limbs_.size())
            return limbs_.size() < o.limbs_.size() ? -1 : 1;
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
        }
        return 0;
    }
    bool operator==(const BigUint& o) const { return compare(o) == 0; }
    bool operator<(const BigUint& o) const { return compare(o) < 0; }
    bool operator<=(const BigUint& o) const { return compare(o) <= 0; }
    bool operator>(const BigUint& o) const { return compare(o) > 0; }

    bool fits_u64() const { return limbs_.size() <= 2; }
    std::uint64_t to_u64() const {
        if (!fits_u64()) throw std::overflow_error("BigUint exceeds 64 bits");
        std::uint64_t v = limbs_[0];
        if (limbs_.size() > 1) v |= static_cast<std::uint64_t>(limbs_[1]) << 32;
        return v;
    }

    std::string to_string() const {
        // Repeated division by 1e9; slow but counts are printed rarely.
        std::vector<std::uint32_t> work(limbs_);
        std::string out;
        while (!(work.size() == 1 && work[0] == 0)) {
            std::uint64_t rem = 0;
            for (std::size_t i = work.size(); i-- > 0;) {
                std::uint64_t cur = (rem << 32) | work[i];
                work[i] = static_cast<std::uint32_t>(cur / 1000000000ULL);
                rem = cur % 1000000000ULL;
            }
            while (work.size() > 1 && work.back() == 0) work.pop_back();
            std::string part = std::to_string(rem);
            bool last = (work.size() == 1 && work[0] == 0);
            if (!last) part.insert(0, 9 - part.size(), '0');
            out.insert(0, part);
        }
        return out.empty() ? "0" : out;
    }

  private:
    void trim() {
        while (limbs_.size() > 1 && limbs_.back() == 0) limbs_.pop_back();
    }
    std::vector<std::uint32_t> limbs_;  // little endian, base 2^32
};

}  // namespace ria
