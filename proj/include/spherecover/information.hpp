#pragma once

#include <limits>
#include <span>
#include <string_view>

#include "spherecover/model.hpp"

namespace spherecover {

enum class Units { bits, nats };

Units parse_units(std::string_view text);
std::string_view to_string(Units units);

/// Converts a quantity held in nats to `units`. Infinities pass through.
double from_nats(double nats, Units units) noexcept;
/// Converts a quantity given in `units` to nats.
double to_nats(double value, Units units) noexcept;

/// A nonnegative information quantity in nats, possibly +infinity.
/// Addition saturates at +infinity.
class InfoValue {
 public:
  constexpr InfoValue() = default;
  explicit InfoValue(double nats);

  static constexpr InfoValue infinite() noexcept { return InfoValue(Tag{}); }

  bool is_infinite() const noexcept { return nats_ == std::numeric_limits<double>::infinity(); }
  double nats() const noexcept { return nats_; }
  double bits() const noexcept { return from_nats(nats_, Units::bits); }
  double in(Units units) const noexcept { return from_nats(nats_, units); }

  friend InfoValue operator+(InfoValue a, InfoValue b) noexcept {
    InfoValue r;
    r.nats_ = (a.is_infinite() || b.is_infinite()) ? std::numeric_limits<double>::infinity() : a.nats_ + b.nats_;
    return r;
  }
  friend bool operator==(InfoValue, InfoValue) = default;

 private:
  struct Tag {};
  constexpr explicit InfoValue(Tag) noexcept : nats_(std::numeric_limits<double>::infinity()) {}
  double nats_ = 0.0;
};

/// Shannon entropy in nats.
double entropy(std::span<const double> p);

/// Binary entropy h(p) in nats.
double binary_entropy(double p);

/// H(mu||nu) = sum mu log(mu/nu), with 0 log 0 = 0 and +infinity when mu is
/// not absolutely continuous with respect to nu.
InfoValue relative_entropy(std::span<const double> mu, std::span<const double> nu);
inline InfoValue relative_entropy(const Distribution& mu, const Distribution& nu) {
  return relative_entropy(mu.values(), nu.values());
}

/// H(P_{XY} || P x P_Y) for P_{XY}(x,y) = P(x) W(y|x).
InfoValue mutual_information(std::span<const double> p, const Channel& w);

/// Mutual information plus E[log M(Y)], in nats. May be negative.
double objective(std::span<const double> p, const Channel& w, std::span<const double> mass);

}  // namespace spherecover
