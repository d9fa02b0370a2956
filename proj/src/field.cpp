#include "ovoid/field.hpp"

#include <sstream>

#include "ovoid/errors.hpp"

namespace ovoid {

namespace {

std::vector<int> modulus_for(int p, int r) {
  if (r == 1) return {0, 1};
  if (p == 2 && r == 2) return {1, 1, 1};
  if (p == 2 && r == 3) return {1, 1, 0, 1};
  if (p == 3 && r == 2) return {2, 2, 1};
  throw ConfigError("unsupported field GF(" + std::to_string(p) + "^" + std::to_string(r) + ")");
}

using Poly = std::vector<int>;  // r coefficients, constant term first

Poly to_poly(int index, int p, int r) {
  Poly c(r);
  for (int i = 0; i < r; ++i) {
    c[i] = index % p;
    index /= p;
  }
  return c;
}

int to_index(const Poly& c, int p) {
  int v = 0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) v = v * p + c[i];
  return v;
}

// Product modulo a monic modulus of degree r.
Poly poly_mulmod(const Poly& a, const Poly& b, const std::vector<int>& mod, int p) {
  const int r = static_cast<int>(a.size());
  std::vector<int> prod(2 * r - 1, 0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
  for (int d = 2 * r - 2; d >= r; --d) {
    const int c = prod[d];
    if (c == 0) continue;
    for (int k = 0; k <= r; ++k) prod[d - r + k] = ((prod[d - r + k] - c * mod[k]) % p + p) % p;
  }
  prod.resize(r);
  return prod;
}

}  // namespace

FiniteField::FiniteField(int p, int r) : p_(p), r_(r) {
  if (p != 2 && p != 3 && p != 5 && p != 7)
    throw ConfigError("unsupported characteristic " + std::to_string(p) + " (allowed: 2, 3, 5, 7)");
  if (r < 1 || r > 3) throw ConfigError("unsupported extension degree " + std::to_string(r) + " (allowed: 1..3)");
  q_ = 1;
  for (int i = 0; i < r; ++i) q_ *= p;
  if (q_ > 16) throw ConfigError("field size " + std::to_string(q_) + " exceeds the limit q <= 16");
  modulus_ = modulus_for(p, r);

  add_.resize(q_ * q_);
  mul_.resize(q_ * q_);
  neg_.resize(q_);
  inv_.assign(q_, 0);
  frob_.resize(q_);
  std::vector<Poly> polys(q_);
  for (int a = 0; a < q_; ++a) polys[a] = to_poly(a, p, r);

  for (int a = 0; a < q_; ++a) {
    Poly n(r);
    for (int i = 0; i < r; ++i) n[i] = (p - polys[a][i]) % p;
    neg_[a] = static_cast<Elem>(to_index(n, p));
    for (int b = 0; b < q_; ++b) {
      Poly s(r);
      for (int i = 0; i < r; ++i) s[i] = (polys[a][i] + polys[b][i]) % p;
      add_[a * q_ + b] = static_cast<Elem>(to_index(s, p));
      mul_[a * q_ + b] = static_cast<Elem>(to_index(poly_mulmod(polys[a], polys[b], modulus_, p), p));
    }
  }
  for (int a = 1; a < q_; ++a)
    for (int b = 1; b < q_; ++b)
      if (mul_[a * q_ + b] == 1) inv_[a] = static_cast<Elem>(b);
  for (int a = 0; a < q_; ++a) {
    Elem x = 1;
    for (int i = 0; i < p; ++i) x = mul(x, static_cast<Elem>(a));
    frob_[a] = x;
  }
  for (int g = 1; g < q_; ++g) {
    int order = 1;
    for (Elem x = static_cast<Elem>(g); x != 1; x = mul(x, static_cast<Elem>(g))) ++order;
    if (order == q_ - 1) {
      primitive_ = static_cast<Elem>(g);
      break;
    }
  }
}

std::string FiniteField::modulus_string() const {
  if (r_ == 1) return "x";
  std::ostringstream os;
  bool first = true;
  for (int d = r_; d >= 0; --d) {
    const int c = modulus_[d];
    if (c == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (d == 0 || c != 1) os << c;
    if (d >= 1) os << "x";
    if (d >= 2) os << "^" << d;
  }
  return os.str();
}

FiniteField make_field(int p, int r) { return FiniteField(p, r); }

FiniteField make_field(int q) {
  for (int p : {2, 3, 5, 7}) {
    int v = 1;
    for (int r = 1; r <= 3; ++r) {
      v *= p;
      if (v == q) return FiniteField(p, r);
    }
  }
  throw ConfigError("unsupported field order q = " + std::to_string(q) + " (allowed: 2, 3, 4, 5, 7, 8, 9)");
}

Elem eval_quadric(const FiniteField& f, const Vec7& x) {
  Elem s = f.mul(x[0], x[4]);
  s = f.add(s, f.mul(x[1], x[5]));
  s = f.add(s, f.mul(x[2], x[6]));
  return f.sub(s, f.mul(x[3], x[3]));
}

}  // namespace ovoid
