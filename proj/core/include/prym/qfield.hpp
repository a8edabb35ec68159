#pragma once

// Exact arithmetic in real quadratic fields Q(sqrt(D)).
//
// Every coordinate, length and modulus handled by the library is a QuadElem.
// Values are kept in canonical form (GMP rationals are always reduced), so
// structural equality is value equality and elements can be hashed.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include <gmpxx.h>

#include "prym/errors.hpp"

namespace prym {

using Integer = mpz_class;
using Rational = mpq_class;

/// A validated radicand: D >= 2 and square-free.
class QuadraticField {
public:
  /// Throws InvalidField unless D is square-free and at least 2.
  explicit QuadraticField(long radicand);

  long radicand() const { return d_; }

  friend bool operator==(QuadraticField, QuadraticField) = default;

private:
  friend class QuadElem;
  struct Trusted {};
  QuadraticField(long radicand, Trusted) : d_(radicand) {}
  long d_;
};

bool is_square_free(long n);

/// a + b*sqrt(D) with a, b rational.
class QuadElem {
public:
  QuadElem(QuadraticField field, Rational a = 0, Rational b = 0);

  /// Validating factory mirroring the text encoding (a, b, D).
  static QuadElem make(const Rational& a, const Rational& b, long radicand);

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  long radicand() const { return d_; }
  QuadraticField field() const { return QuadraticField(d_, QuadraticField::Trusted{}); }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }

  QuadElem& operator+=(const QuadElem& o);
  QuadElem& operator-=(const QuadElem& o);
  QuadElem& operator*=(const QuadElem& o);
  QuadElem& operator/=(const QuadElem& o);
  QuadElem& operator*=(const Rational& r);

  friend QuadElem operator+(QuadElem x, const QuadElem& y) { return x += y; }
  friend QuadElem operator-(QuadElem x, const QuadElem& y) { return x -= y; }
  friend QuadElem operator*(QuadElem x, const QuadElem& y) { return x *= y; }
  friend QuadElem operator/(QuadElem x, const QuadElem& y) { return x /= y; }
  friend QuadElem operator*(QuadElem x, const Rational& r) { return x *= r; }
  friend QuadElem operator*(const Rational& r, QuadElem x) { return x *= r; }
  QuadElem operator-() const;

  /// Structural equality; throws FieldMismatch across fields.
  friend bool operator==(const QuadElem& x, const QuadElem& y);
  /// Order of the real values; throws FieldMismatch across fields.
  friend std::strong_ordering operator<=>(const QuadElem& x, const QuadElem& y);

  std::size_t hash() const;

private:
  Rational a_;
  Rational b_;
  long d_;
};

QuadElem inverse(const QuadElem& x);
/// a - b*sqrt(D).
QuadElem conjugate(const QuadElem& x);
/// a^2 - D*b^2, the field norm.
Rational norm(const QuadElem& x);

/// Sign of the real value, decided in rational arithmetic (a double filter
/// short-circuits the clear cases).
int sign(const QuadElem& x);
std::strong_ordering compare(const QuadElem& x, const QuadElem& y);
bool is_rational(const QuadElem& x);
QuadElem abs(const QuadElem& x);

/// Nearest double; for display and filtering only, never for predicates.
double to_double(const QuadElem& x);

/// "a + b*sqrt(D)" for humans, e.g. "1/2 + 1/2*sqrt(2)".
std::string to_string(const QuadElem& x);
std::ostream& operator<<(std::ostream& os, const QuadElem& x);

/// Least common multiple of the denominators of a and b.
Integer common_denominator(const QuadElem& x);

} // namespace prym

template <> struct std::hash<prym::QuadElem> {
  std::size_t operator()(const prym::QuadElem& x) const noexcept { return x.hash(); }
};
