#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace invfd {

/// Exact rational number with arbitrary-precision numerator/denominator.
/// Canonical form is maintained by the backend: gcd-reduced, denominator > 0,
/// zero stored as 0/1.
class Rational {
public:
    using Backend = boost::multiprecision::cpp_rational;

    Rational() = default;
    Rational(long long n) : v_(n) {}
    Rational(long long n, long long d) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        v_ = Backend(n, d);
    }
    explicit Rational(Backend v) : v_(std::move(v)) {}

    static Rational from_string(const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos)
            return Rational(Backend(boost::multiprecision::cpp_int(s)));
        boost::multiprecision::cpp_int n(s.substr(0, slash)), d(s.substr(slash + 1));
        if (d == 0) throw std::invalid_argument("Rational: zero denominator in '" + s + "'");
        return Rational(Backend(n, d));
    }

    bool is_zero() const { return v_ == 0; }
    bool is_one() const { return v_ == 1; }
    int sign() const { return v_ < 0 ? -1 : (v_ > 0 ? 1 : 0); }

    Rational operator-() const { return Rational(Backend(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }

    Rational pow(int k) const {
        if (k < 0) {
            if (is_zero()) throw std::invalid_argument("Rational: 0^negative");
            return Rational(Backend(1) / v_).pow(-k);
        }
        Rational r(1), base = *this;
        while (k > 0) {
            if (k & 1) r *= base;
            base *= base;
            k >>= 1;
        }
        return r;
    }

    double to_double() const { return v_.convert_to<double>(); }

    /// Canonical text: "p" for integers, "p/q" otherwise; '-' on the numerator.
    std::string str() const {
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        std::string s = numerator(v_).str();
        if (denominator(v_) != 1) s += "/" + denominator(v_).str();
        return s;
    }

    const Backend& backend() const { return v_; }

private:
    Backend v_ = 0;
};

inline Rational factorial(int n) {
    Rational r(1);
    for (int i = 2; i <= n; ++i) r *= Rational(i);
    return r;
}

}  // namespace invfd
