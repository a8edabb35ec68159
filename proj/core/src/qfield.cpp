#include "prym/qfield.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

namespace prym {

bool is_square_free(long n) {
  if (n < 1) return false;
  for (long p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) return false;
  }
  return true;
}

QuadraticField::QuadraticField(long radicand) : d_(radicand) {
  if (radicand < 2 || !is_square_free(radicand)) {
    throw InvalidField("radicand " + std::to_string(radicand) + " is not a square-free integer >= 2");
  }
}

QuadElem::QuadElem(QuadraticField field, Rational a, Rational b)
    : a_(std::move(a)), b_(std::move(b)), d_(field.radicand()) {
  a_.canonicalize();
  b_.canonicalize();
}

QuadElem QuadElem::make(const Rational& a, const Rational& b, long radicand) {
  return QuadElem(QuadraticField(radicand), a, b);
}

namespace {

inline void require_same_field(long d1, long d2) {
  if (d1 != d2) {
    throw FieldMismatch("Q(sqrt(" + std::to_string(d1) + ")) vs Q(sqrt(" + std::to_string(d2) + "))");
  }
}

} // namespace

QuadElem& QuadElem::operator+=(const QuadElem& o) {
  require_same_field(d_, o.d_);
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

QuadElem& QuadElem::operator-=(const QuadElem& o) {
  require_same_field(d_, o.d_);
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

QuadElem& QuadElem::operator*=(const QuadElem& o) {
  require_same_field(d_, o.d_);
  if (sgn(b_) == 0 && sgn(o.b_) == 0) {
    a_ *= o.a_;
    return *this;
  }
  Rational na = a_ * o.a_ + d_ * (b_ * o.b_);
  Rational nb = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(na);
  b_ = std::move(nb);
  return *this;
}

QuadElem& QuadElem::operator*=(const Rational& r) {
  a_ *= r;
  b_ *= r;
  return *this;
}

QuadElem& QuadElem::operator/=(const QuadElem& o) {
  require_same_field(d_, o.d_);
  if (sgn(o.b_) == 0) {
    if (sgn(o.a_) == 0) throw DivisionByZero("division by zero in Q(sqrt(" + std::to_string(d_) + "))");
    a_ /= o.a_;
    b_ /= o.a_;
    return *this;
  }
  return *this *= inverse(o);
}

QuadElem QuadElem::operator-() const {
  QuadElem r = *this;
  r.a_ = -r.a_;
  r.b_ = -r.b_;
  return r;
}

bool operator==(const QuadElem& x, const QuadElem& y) {
  require_same_field(x.d_, y.d_);
  return x.a_ == y.a_ && x.b_ == y.b_;
}

std::strong_ordering operator<=>(const QuadElem& x, const QuadElem& y) { return compare(x, y); }

std::size_t QuadElem::hash() const {
  auto mix = [](std::size_t seed, std::size_t v) { return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)); };
  std::size_t h = std::hash<long>{}(d_);
  for (const mpz_class* z : {&a_.get_num(), &a_.get_den(), &b_.get_num(), &b_.get_den()}) {
    h = mix(h, mpz_get_ui(z->get_mpz_t()));
    h = mix(h, static_cast<std::size_t>(mpz_sgn(z->get_mpz_t()) + 1));
    h = mix(h, mpz_size(z->get_mpz_t()));
  }
  return h;
}

QuadElem inverse(const QuadElem& x) {
  Rational n = norm(x);
  if (sgn(n) == 0) {
    // The norm of a nonzero element never vanishes because D is not a square.
    throw DivisionByZero("inverse of zero in Q(sqrt(" + std::to_string(x.radicand()) + "))");
  }
  return QuadElem(x.field(), x.a() / n, -x.b() / n);
}

QuadElem conjugate(const QuadElem& x) { return QuadElem(x.field(), x.a(), -x.b()); }

Rational norm(const QuadElem& x) { return x.a() * x.a() - x.radicand() * (x.b() * x.b()); }

int sign(const QuadElem& x) {
  const int sa = sgn(x.a());
  const int sb = sgn(x.b());
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;

  // Mixed signs: |a| vs |b|*sqrt(D), i.e. a^2 vs D*b^2.
  const double da = x.a().get_d();
  const double db = x.b().get_d();
  const double lhs = da * da;
  const double rhs = static_cast<double>(x.radicand()) * db * db;
  if (std::isfinite(lhs) && std::isfinite(rhs) && std::fabs(lhs - rhs) > 1e-9 * (lhs + rhs)) {
    return lhs > rhs ? sa : sb;
  }
  const int c = cmp(x.a() * x.a(), x.radicand() * (x.b() * x.b()));
  if (c == 0) return 0; // unreachable for square-free D and nonzero b
  return c > 0 ? sa : sb;
}

std::strong_ordering compare(const QuadElem& x, const QuadElem& y) {
  require_same_field(x.radicand(), y.radicand());
  int s = sign(x - y);
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool is_rational(const QuadElem& x) { return sgn(x.b()) == 0; }

QuadElem abs(const QuadElem& x) { return sign(x) < 0 ? -x : x; }

double to_double(const QuadElem& x) {
  return x.a().get_d() + x.b().get_d() * std::sqrt(static_cast<double>(x.radicand()));
}

std::string to_string(const QuadElem& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const QuadElem& x) {
  if (sgn(x.b()) == 0) return os << x.a().get_str();
  if (sgn(x.a()) != 0) os << x.a().get_str() << (sgn(x.b()) > 0 ? " + " : " - ");
  else if (sgn(x.b()) < 0) os << "-";
  Rational mag = abs(x.b());
  if (mag != 1) os << mag.get_str() << "*";
  return os << "sqrt(" << x.radicand() << ")";
}

Integer common_denominator(const QuadElem& x) {
  Integer l;
  mpz_lcm(l.get_mpz_t(), x.a().get_den_mpz_t(), x.b().get_den_mpz_t());
  return l;
}

} // namespace prym
