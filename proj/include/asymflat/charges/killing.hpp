#pragma once

#include <string>

#include "asymflat/core/errors.hpp"
#include "asymflat/core/vec.hpp"

namespace asymflat {

/// Euclidean Killing and conformal Killing fields used by the charges.
struct KillingField {
  enum class Kind { Translation, Rotation, Dilation, BoostConformal };
  Kind kind = Kind::Translation;
  int index = 0;  // axis l or p; unused for Dilation

  Vec3 operator()(const Vec3& x) const {
    const std::size_t l = static_cast<std::size_t>(index);
    switch (kind) {
      case Kind::Translation: {
        Vec3 e{};
        e[l] = 1.0;
        return e;
      }
      case Kind::Rotation: {
        Vec3 e{};
        e[l] = 1.0;
        return cross(e, x);
      }
      case Kind::Dilation:
        return -2.0 * x;
      case Kind::BoostConformal: {
        Vec3 y = -2.0 * x[l] * x;
        y[l] += dot(x, x);
        return y;
      }
    }
    return {};
  }
};

inline KillingField translation(int l) { return {KillingField::Kind::Translation, l}; }
inline KillingField rotation(int p) { return {KillingField::Kind::Rotation, p}; }
inline KillingField dilation() { return {KillingField::Kind::Dilation, 0}; }
inline KillingField boost_conformal(int l) { return {KillingField::Kind::BoostConformal, l}; }

}  // namespace asymflat
