// Exact rational arithmetic over checked 64-bit integers.
//
// All DoF-region computations run on this type: the interesting points sit
// exactly on polytope boundaries and would be destroyed by floating error.
// Intermediates use __int128 and narrowing is overflow-checked; desk-scale
// regions stay far below the limits.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ria {

class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t v) : num_(v), den_(1) {}  // NOLINT: implicit by design
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
        normalize();
    }

    static Rational parse(const std::string& text) {
        auto slash = text.find('/');
        if (slash == std::string::npos) return Rational(std::stoll(text));
        return Rational(std::stoll(text.substr(0, slash)),
                        std::stoll(text.substr(slash + 1)));
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    Rational operator+(const Rational& o) const {
        __int128 n = i128(num_) * o.den_ + i128(o.num_) * den_;
        __int128 d = i128(den_) * o.den_;
        return make(n, d);
    }
    Rational operator-(const Rational& o) const {
        __int128 n = i128(num_) * o.den_ - i128(o.num_) * den_;
        __int128 d = i128(den_) * o.den_;
        return make(n, d);
    }
    Rational operator*(const Rational& o) const {
        return make(i128(num_) * o.num_, i128(den_) * o.den_);
    }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
        return make(i128(num_) * o.den_, i128(den_) * o.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const {
        return i128(num_) * o.den_ < i128(o.num_) * den_;
    }
    bool operator<=(const Rational& o) const { return *this == o || *this < o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    Rational abs() const { return num_ < 0 ? Rational(-num_, den_) : *this; }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

  private:
    static __int128 i128(std::int64_t v) { return static_cast<__int128>(v); }

    static Rational make(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        return Rational(checked(n), checked(d), 0);
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    static std::int64_t checked(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN)
            throw std::overflow_error("Rational: 64-bit overflow");
        return static_cast<std::int64_t>(v);
    }

    Rational(std::int64_t n, std::int64_t d, int) : num_(n), den_(d) {}

    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    std::int64_t num_;
    std::int64_t den_;  // > 0
};

inline Rational rational_min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational rational_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace ria

namespace Eigen {
template <>
struct NumTraits<ria::Rational> : GenericNumTraits<ria::Rational> {
    using Real = ria::Rational;
    using NonInteger = ria::Rational;
    using Nested = ria::Rational;
    using Literal = long long;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 2,
        AddCost = 12,
        MulCost = 10,
    };
    static inline Real epsilon() { return ria::Rational(0); }
    static inline Real dummy_precision() { return ria::Rational(0); }
    static inline int digits10() { return 0; }
};
}  // namespace Eigen

namespace ria {

using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

inline Rational dot(const RationalVector& a, const RationalVector& b) {
    Rational acc(0);
    for (Eigen::Index i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace ria
