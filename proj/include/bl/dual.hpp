// Copyright 2026 The blearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BL_DUAL_HPP_
#define BL_DUAL_HPP_

#include <algorithm>
#include <cmath>

namespace bl {

// First-order forward-mode dual number. Running the network backward pass
// over Dual with a tangent seeded on y yields, in the tangent part of each
// parameter gradient, the mixed derivative d/dtheta (v . grad_y BL), which is
// exactly what the score-matching gradient needs.
struct Dual {
  double val = 0.0;
  double tan = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v) : val(v) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(double v, double t) : val(v), tan(t) {}

  Dual& operator+=(const Dual& o) {
    val += o.val;
    tan += o.tan;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    val -= o.val;
    tan -= o.tan;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    tan = tan * o.val + val * o.tan;
    val *= o.val;
    return *this;
  }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator-(const Dual& a) { return {-a.val, -a.tan}; }
inline Dual operator/(const Dual& a, const Dual& b) {
  return {a.val / b.val, (a.tan * b.val - a.val * b.tan) / (b.val * b.val)};
}

inline bool is_exact_zero(double x) { return x == 0.0; }
inline bool is_exact_zero(const Dual& x) { return x.val == 0.0 && x.tan == 0.0; }

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.val; }

inline Dual tanh(const Dual& x) {
  const double t = std::tanh(x.val);
  return {t, x.tan * (1.0 - t * t)};
}
inline Dual exp(const Dual& x) {
  const double e = std::exp(x.val);
  return {e, x.tan * e};
}
inline Dual log1p(const Dual& x) { return {std::log1p(x.val), x.tan / (1.0 + x.val)}; }

// Activations shared by the block kernels; overloads for double and Dual.
inline double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}
inline Dual sigmoid(const Dual& u) {
  const double s = sigmoid(u.val);
  return {s, u.tan * s * (1.0 - s)};
}

// max(u, 0) + log1p(exp(-|u|)), overflow-safe.
inline double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }
inline Dual softplus(const Dual& u) { return {softplus(u.val), u.tan * sigmoid(u.val)}; }

inline double relu(double u) { return u > 0.0 ? u : 0.0; }
inline Dual relu(const Dual& u) { return u.val > 0.0 ? u : Dual{}; }

// Kinks take the value-0 subgradient.
inline double step(double u) { return u > 0.0 ? 1.0 : 0.0; }
inline double sign0(double u) { return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0); }

inline double abs_value(double u) { return std::abs(u); }
inline Dual abs_value(const Dual& u) { return u.val < 0.0 ? -u : (u.val > 0.0 ? u : Dual{0.0, 0.0}); }

template <class S>
S ipow(const S& x, int p) {
  S r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace bl

#endif  // BL_DUAL_HPP_
