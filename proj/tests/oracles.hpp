#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the flow code.

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "prym/qfield.hpp"

namespace oracle {

using Float = boost::multiprecision::cpp_dec_float_100;

inline Float value(const prym::QuadElem& x) {
  auto q = [](const prym::Rational& r) { return Float(r.get_num().get_str()) / Float(r.get_den().get_str()); };
  return q(x.a()) + q(x.b()) * boost::multiprecision::sqrt(Float(x.radicand()));
}

inline prym::Rational random_rational(std::mt19937_64& rng, long range = 50) {
  std::uniform_int_distribution<long> num(-range, range), den(1, range);
  prym::Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

inline prym::QuadElem random_elem(std::mt19937_64& rng, long d, long range = 50) {
  return prym::QuadElem(prym::QuadraticField(d), random_rational(rng, range), random_rational(rng, range));
}

/// Primitive integer vectors (p, q) with p^2 + q^2 <= bound^2: the holonomies
/// of saddle connections on the unit square torus.
inline std::set<std::pair<long, long>> primitive_vectors(long bound) {
  std::set<std::pair<long, long>> out;
  for (long p = -bound; p <= bound; ++p) {
    for (long q = -bound; q <= bound; ++q) {
      if ((p || q) && p * p + q * q <= bound * bound && std::gcd(p, q) == 1) out.insert({p, q});
    }
  }
  return out;
}

/// Cycles of a permutation, each starting at its smallest element.
inline std::vector<std::vector<int>> cycles(const std::vector<int>& perm) {
  std::vector<std::vector<int>> out;
  std::vector<bool> seen(perm.size(), false);
  for (int i = 0; i < static_cast<int>(perm.size()); ++i) {
    if (seen[i]) continue;
    std::vector<int> c;
    for (int j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      c.push_back(j);
    }
    out.push_back(c);
  }
  return out;
}

inline bool transitive(const std::vector<int>& r, const std::vector<int>& u) {
  const int n = static_cast<int>(r.size());
  std::vector<bool> seen(n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (int j : {r[i], u[i]}) {
      if (!seen[j]) {
        seen[j] = true;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

/// Random pair of permutations of n squares acting transitively.
inline std::pair<std::vector<int>, std::vector<int>> random_origami(std::mt19937_64& rng, int n) {
  std::vector<int> r(n), u(n);
  do {
    std::iota(r.begin(), r.end(), 0);
    std::iota(u.begin(), u.end(), 0);
    std::shuffle(r.begin(), r.end(), rng);
    std::shuffle(u.begin(), u.end(), rng);
  } while (!transitive(r, u));
  return {r, u};
}

} // namespace oracle
