#pragma once

// Exact rational numbers on top of GMP. Values are always kept in canonical
// form (positive denominator, coprime numerator/denominator).

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>

#include "affdim/error.hpp"

namespace affdim {

using BigInt = mpz_class;

class Rational {
 public:
  Rational() = default;
  Rational(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den) : q_(num, den) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    q_.canonicalize();
  }
  Rational(const BigInt& num, const BigInt& den) : q_(num, den) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    q_.canonicalize();
  }
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  /// Exact value of a finite double (every double is a dyadic rational).
  static Rational from_double(double v) {
    if (!std::isfinite(v)) throw ValidationError("non-finite value");
    mpq_class q;
    mpq_set_d(q.get_mpq_t(), v);
    return Rational(std::move(q));
  }

  /// Parses "p/q", an integer, or a decimal such as "-0.23" or "1.5e-3",
  /// exactly. Throws ValidationError on anything else.
  static Rational parse(std::string_view text);

  BigInt numerator() const { return q_.get_num(); }
  BigInt denominator() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sign() == 0; }
  double to_double() const { return q_.get_d(); }

  /// ln|x| without overflow or underflow for huge numerators/denominators.
  double log_abs() const;

  /// Always "p/q", including integers ("3/1") and zero ("0/1").
  std::string to_string() const {
    return numerator().get_str() + "/" + denominator().get_str();
  }

  Rational abs() const { return Rational(kCanonical, ::abs(q_)); }

  // GMP arithmetic already yields canonical results.
  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(kCanonical, a.q_ + b.q_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(kCanonical, a.q_ - b.q_); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(kCanonical, a.q_ * b.q_); }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw ValidationError("division by zero");
    return Rational(kCanonical, a.q_ / b.q_);
  }
  Rational operator-() const { return Rational(kCanonical, -q_); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  /// Largest integer <= x.
  BigInt floor() const {
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
  }
  /// Smallest integer >= x.
  BigInt ceil() const {
    BigInt r;
    mpz_cdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
  }

 private:
  struct CanonicalTag {};
  static constexpr CanonicalTag kCanonical{};
  Rational(CanonicalTag, mpq_class q) : q_(std::move(q)) {}

  mpq_class q_{0};
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

namespace detail {

inline double log_abs_mpz(const BigInt& z) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline BigInt parse_integer(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw ValidationError("invalid integer '" + std::string(s) + "'");
  BigInt v(std::string(s), 10);
  return neg ? BigInt(-v) : v;
}

inline BigInt pow10(unsigned long e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace detail

inline double Rational::log_abs() const {
  if (is_zero()) return -HUGE_VAL;
  return detail::log_abs_mpz(numerator()) - detail::log_abs_mpz(denominator());
}

inline Rational Rational::parse(std::string_view text) {
  const std::string original(text);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ValidationError("empty number");

  try {
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
      const BigInt num = detail::parse_integer(text.substr(0, slash));
      std::string_view den_text = text.substr(slash + 1);
      if (!den_text.empty() && den_text.front() == '+') den_text.remove_prefix(1);
      if (!detail::all_digits(den_text)) throw ValidationError("bad denominator");
      const BigInt den(std::string(den_text), 10);
      if (den == 0) throw ValidationError("zero denominator");
      return Rational(num, den);
    }

    bool neg = false;
    if (text.front() == '+' || text.front() == '-') {
      neg = text.front() == '-';
      text.remove_prefix(1);
    }
    long exponent = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      const BigInt ev = detail::parse_integer(text.substr(e + 1));
      if (!ev.fits_slong_p() || ::abs(ev) > 100000) throw ValidationError("exponent out of range");
      exponent = ev.get_si();
      text = text.substr(0, e);
    }
    std::string digits;
    long frac_len = 0;
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
      const auto int_part = text.substr(0, dot);
      const auto frac_part = text.substr(dot + 1);
      if (int_part.empty() && frac_part.empty()) throw ValidationError("bare '.'");
      if (!int_part.empty() && !detail::all_digits(int_part)) throw ValidationError("bad digits");
      if (!frac_part.empty() && !detail::all_digits(frac_part)) throw ValidationError("bad digits");
      digits = std::string(int_part) + std::string(frac_part);
      frac_len = static_cast<long>(frac_part.size());
    } else {
      if (!detail::all_digits(text)) throw ValidationError("bad digits");
      digits = std::string(text);
    }
    BigInt num(digits, 10);
    if (neg) num = -num;
    const long scale = exponent - frac_len;
    if (scale >= 0) return Rational(BigInt(num * detail::pow10(static_cast<unsigned long>(scale))), BigInt(1));
    return Rational(num, detail::pow10(static_cast<unsigned long>(-scale)));
  } catch (const ValidationError& e) {
    throw ValidationError("invalid number '" + original + "': " + e.what());
  }
}

}  // namespace affdim
