#include "spherecover/information.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spherecover/errors.hpp"

namespace spherecover {

Units parse_units(std::string_view text) {
  if (text == "bits") return Units::bits;
  if (text == "nats") return Units::nats;
  throw usage_error("unknown units '" + std::string(text) + "' (expected bits or nats)");
}

std::string_view to_string(Units units) { return units == Units::bits ? "bits" : "nats"; }

double from_nats(double nats, Units units) noexcept {
  return units == Units::bits ? nats / std::numbers::ln2 : nats;
}

double to_nats(double value, Units units) noexcept {
  return units == Units::bits ? value * std::numbers::ln2 : value;
}

InfoValue::InfoValue(double nats) : nats_(nats) {
  if (std::isnan(nats) || nats < 0.0) throw validation_error("information value must be nonnegative");
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

double binary_entropy(double p) {
  const double q[2] = {p, 1.0 - p};
  return entropy(q);
}

InfoValue relative_entropy(std::span<const double> mu, std::span<const double> nu) {
  if (mu.size() != nu.size())
    throw validation_error("dimension mismatch: " + std::to_string(mu.size()) + " vs " + std::to_string(nu.size()));
  double sum = 0.0;
  for (std::size_t s = 0; s < mu.size(); ++s) {
    if (mu[s] <= 0.0) continue;
    if (nu[s] <= 0.0) return InfoValue::infinite();
    sum += mu[s] * std::log(mu[s] / nu[s]);
  }
  // Rounding can leave a tiny negative residue when mu == nu.
  return InfoValue(sum < 0.0 ? 0.0 : sum);
}

InfoValue mutual_information(std::span<const double> p, const Channel& w) {
  if (p.size() != w.rows())
    throw validation_error("dimension mismatch: P has " + std::to_string(p.size()) + " entries, channel has " +
                           std::to_string(w.rows()) + " rows");
  const auto py = w.output_law(p);
  double sum = 0.0;
  for (std::size_t x = 0; x < w.rows(); ++x) {
    if (p[x] <= 0.0) continue;
    for (std::size_t y = 0; y < w.cols(); ++y) {
      const double wxy = w(x, y);
      if (wxy > 0.0) sum += p[x] * wxy * std::log(wxy / py[y]);
    }
  }
  return InfoValue(sum < 0.0 ? 0.0 : sum);
}

double objective(std::span<const double> p, const Channel& w, std::span<const double> mass) {
  if (mass.size() != w.cols())
    throw validation_error("dimension mismatch: M has " + std::to_string(mass.size()) + " entries, channel has " +
                           std::to_string(w.cols()) + " columns");
  const double info = mutual_information(p, w).nats();
  const auto py = w.output_law(p);
  double tilt = 0.0;
  for (std::size_t y = 0; y < py.size(); ++y) tilt += py[y] * std::log(mass[y]);
  return info + tilt;
}

}  // namespace spherecover
