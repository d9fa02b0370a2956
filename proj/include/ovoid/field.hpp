#pragma once

// Table-driven arithmetic in GF(p^r), q <= 16.
//
// Elements are the integers 0..q-1. Element c_0 + c_1 p + ... + c_{r-1} p^{r-1}
// is the residue c_0 + c_1 x + ... + c_{r-1} x^{r-1} modulo the fixed modulus:
//
//   GF(4)  x^2 + x + 1
//   GF(8)  x^3 + x + 1
//   GF(9)  x^2 + 2x + 2
//
// All three moduli are primitive, so the element with index p (the class of x)
// generates the multiplicative group.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ovoid {

using Elem = std::uint8_t;

class FiniteField {
 public:
  FiniteField(int p, int r);

  int p() const { return p_; }
  int r() const { return r_; }
  int q() const { return q_; }

  Elem add(Elem a, Elem b) const { return add_[a * q_ + b]; }
  Elem sub(Elem a, Elem b) const { return add_[a * q_ + neg_[b]]; }
  Elem neg(Elem a) const { return neg_[a]; }
  Elem mul(Elem a, Elem b) const { return mul_[a * q_ + b]; }
  /// Multiplicative inverse; `a` must be nonzero.
  Elem inv(Elem a) const { return inv_[a]; }
  Elem frobenius(Elem a) const { return frob_[a]; }

  /// A generator of the multiplicative group.
  Elem primitive() const { return primitive_; }

  /// Coefficients of the modulus, constant term first; {0, 1} for prime fields.
  const std::vector<int>& modulus() const { return modulus_; }
  std::string modulus_string() const;

 private:
  int p_, r_, q_;
  std::vector<int> modulus_;
  std::vector<Elem> add_, mul_, neg_, inv_, frob_;
  Elem primitive_ = 1;
};

/// Builds GF(p^r). Throws ConfigError unless p in {2,3,5,7}, 1 <= r <= 3, p^r <= 16.
FiniteField make_field(int p, int r);

/// Builds the field of order q (q a supported prime power).
FiniteField make_field(int q);

/// A vector of F_q^7 as element indices x_0..x_6.
using Vec7 = std::array<Elem, 7>;

/// Q(x) = x0 x4 + x1 x5 + x2 x6 - x3^2.
Elem eval_quadric(const FiniteField& f, const Vec7& x);

}  // namespace ovoid
