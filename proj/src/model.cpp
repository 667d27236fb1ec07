#include "spherecover/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "spherecover/errors.hpp"

namespace spherecover {

namespace {

void check_probability_vector(std::span<const double> probs, const char* name) {
  if (probs.empty()) throw validation_error(std::string(name) + " is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0)
      throw validation_error(std::string("negative ") + name + " entry at index " + std::to_string(i));
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTolerance)
    throw validation_error(std::string(name) + " does not sum to 1 (sum = " + std::to_string(sum) + ")");
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw validation_error("alphabet is empty");
  if (symbols_.size() > 256) throw validation_error("alphabet has more than 256 letters");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (!seen.insert(symbols_[i]).second)
      throw validation_error("duplicate alphabet label '" + symbols_[i] + "' at index " + std::to_string(i));
  }
}

Alphabet Alphabet::numbered(std::size_t size) {
  std::vector<std::string> labels(size);
  for (std::size_t i = 0; i < size; ++i) labels[i] = std::to_string(i);
  return Alphabet(std::move(labels));
}

std::size_t Alphabet::index_of(std::string_view label) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), label);
  if (it == symbols_.end()) throw validation_error("unknown letter '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - symbols_.begin());
}

Word Alphabet::encode(std::string_view text) const {
  Word word;
  word.reserve(text.size());
  for (char c : text) word.push_back(static_cast<Symbol>(index_of(std::string_view(&c, 1))));
  return word;
}

std::string Alphabet::decode(std::span<const Symbol> word) const {
  std::string out;
  for (Symbol s : word) out += symbols_.at(s);
  return out;
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  check_probability_vector(probs_, "probability");
}

Distribution Distribution::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0)
      throw validation_error("negative weight at index " + std::to_string(i));
    sum += weights[i];
  }
  if (!(sum > 0.0)) throw validation_error("weights sum to zero");
  for (double& w : weights) w /= sum;
  return Distribution(std::move(weights));
}

Distribution Distribution::uniform(std::size_t size) {
  return Distribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

bool Distribution::strictly_positive() const noexcept {
  return std::all_of(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; });
}

MassFunction::MassFunction(std::vector<double> masses) : masses_(std::move(masses)) {
  if (masses_.empty()) throw validation_error("mass function is empty");
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    if (!std::isfinite(masses_[i]) || !(masses_[i] > 0.0))
      throw validation_error("nonpositive M entry at index " + std::to_string(i));
  }
}

MassFunction MassFunction::counting(std::size_t size) { return MassFunction(std::vector<double>(size, 1.0)); }

double MassFunction::total() const noexcept { return std::accumulate(masses_.begin(), masses_.end(), 0.0); }

double MassFunction::log_total() const noexcept { return std::log(total()); }

double MassFunction::min() const noexcept { return *std::min_element(masses_.begin(), masses_.end()); }

DistortionMatrix::DistortionMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw validation_error("distortion matrix is empty");
  if (entries_.size() != rows_ * cols_) throw validation_error("distortion matrix has inconsistent shape");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i]) || entries_[i] < 0.0)
      throw validation_error("negative rho entry at (" + std::to_string(i / cols_) + ", " +
                             std::to_string(i % cols_) + ")");
  }
}

DistortionMatrix::DistortionMatrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw validation_error("distortion matrix is empty");
  const std::size_t cols = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (std::size_t x = 0; x < rows.size(); ++x) {
    if (rows[x].size() != cols)
      throw validation_error("dimension mismatch: rho row " + std::to_string(x) + " has " +
                             std::to_string(rows[x].size()) + " entries, expected " + std::to_string(cols));
    flat.insert(flat.end(), rows[x].begin(), rows[x].end());
  }
  *this = DistortionMatrix(rows.size(), cols, std::move(flat));
}

DistortionMatrix DistortionMatrix::hamming(std::size_t size) {
  std::vector<double> entries(size * size, 1.0);
  for (std::size_t i = 0; i < size; ++i) entries[i * size + i] = 0.0;
  return DistortionMatrix(size, size, std::move(entries));
}

DistortionMatrix DistortionMatrix::hamming(const Alphabet& source, const Alphabet& reproduction) {
  std::vector<double> entries(source.size() * reproduction.size());
  for (std::size_t x = 0; x < source.size(); ++x)
    for (std::size_t y = 0; y < reproduction.size(); ++y)
      entries[x * reproduction.size() + y] = source.label(x) == reproduction.label(y) ? 0.0 : 1.0;
  return DistortionMatrix(source.size(), reproduction.size(), std::move(entries));
}

double DistortionMatrix::max() const noexcept { return *std::max_element(entries_.begin(), entries_.end()); }

std::size_t DistortionMatrix::first_row_without_zero() const noexcept {
  for (std::size_t x = 0; x < rows_; ++x) {
    auto r = row(x);
    if (std::none_of(r.begin(), r.end(), [](double v) { return v == 0.0; })) return x;
  }
  return rows_;
}

Channel::Channel(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) throw validation_error("channel has inconsistent shape");
  for (std::size_t x = 0; x < rows_; ++x) {
    double sum = 0.0;
    for (double w : row(x)) {
      if (!(w >= 0.0)) throw validation_error("negative channel entry in row " + std::to_string(x));
      sum += w;
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance)
      throw validation_error("channel row " + std::to_string(x) + " does not sum to 1");
  }
}

Channel Channel::constant(std::size_t rows, std::size_t cols, std::size_t target) {
  std::vector<double> entries(rows * cols, 0.0);
  for (std::size_t x = 0; x < rows; ++x) entries[x * cols + target] = 1.0;
  return Channel(rows, cols, std::move(entries));
}

std::vector<double> Channel::output_law(std::span<const double> source) const {
  std::vector<double> py(cols_, 0.0);
  for (std::size_t x = 0; x < rows_; ++x)
    for (std::size_t y = 0; y < cols_; ++y) py[y] += source[x] * (*this)(x, y);
  return py;
}

double Channel::expected_distortion(std::span<const double> source, const DistortionMatrix& rho) const {
  double d = 0.0;
  for (std::size_t x = 0; x < rows_; ++x)
    for (std::size_t y = 0; y < cols_; ++y) d += source[x] * (*this)(x, y) * rho(x, y);
  return d;
}

Channel Channel::mix(const Channel& a, const Channel& b, double theta) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw validation_error("channel shapes differ");
  std::vector<double> entries(a.entries_.size());
  for (std::size_t i = 0; i < entries.size(); ++i)
    entries[i] = theta * a.entries_[i] + (1.0 - theta) * b.entries_[i];
  return Channel(a.rows_, a.cols_, std::move(entries));
}

Model Model::with_source(const Distribution& p) const {
  return validate_model(source_, reproduction_, std::vector<double>(p.values().begin(), p.values().end()),
                        std::vector<double>(m_.values().begin(), m_.values().end()), rho_);
}

Model Model::with_mass(const MassFunction& m) const {
  return validate_model(source_, reproduction_, std::vector<double>(p_.values().begin(), p_.values().end()),
                        std::vector<double>(m.values().begin(), m.values().end()), rho_);
}

Model validate_model(Alphabet source, Alphabet reproduction, std::vector<double> p, std::vector<double> m,
                     DistortionMatrix rho, const ValidateOptions& options) {
  if (p.size() != source.size())
    throw validation_error("dimension mismatch: P has " + std::to_string(p.size()) + " entries, source alphabet has " +
                           std::to_string(source.size()));
  if (m.size() != reproduction.size())
    throw validation_error("dimension mismatch: M has " + std::to_string(m.size()) +
                           " entries, reproduction alphabet has " + std::to_string(reproduction.size()));
  if (rho.rows() != source.size() || rho.cols() != reproduction.size())
    throw validation_error("dimension mismatch: rho is " + std::to_string(rho.rows()) + "x" +
                           std::to_string(rho.cols()) + ", expected " + std::to_string(source.size()) + "x" +
                           std::to_string(reproduction.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || !(p[i] > 0.0))
      throw validation_error("nonpositive P entry at index " + std::to_string(i));
  }

  Model model;
  model.source_ = std::move(source);
  model.reproduction_ = std::move(reproduction);
  model.p_ = options.renormalize_probabilities ? Distribution::normalized(std::move(p)) : Distribution(std::move(p));
  model.m_ = MassFunction(std::move(m));
  model.rho_ = options.normalize_rho ? normalize_distortion(rho) : std::move(rho);

  if (std::size_t bad = model.rho_.first_row_without_zero(); bad != model.rho_.rows())
    throw validation_error("row " + std::to_string(bad) + " has no zero");
  return model;
}

DistortionMatrix normalize_distortion(const DistortionMatrix& rho) {
  std::vector<double> entries(rho.entries().begin(), rho.entries().end());
  for (std::size_t x = 0; x < rho.rows(); ++x) {
    auto r = rho.row(x);
    const double lo = *std::min_element(r.begin(), r.end());
    for (std::size_t y = 0; y < rho.cols(); ++y) entries[x * rho.cols() + y] = r[y] - lo;
  }
  return DistortionMatrix(rho.rows(), rho.cols(), std::move(entries));
}

double product_distortion(std::span<const Symbol> x, std::span<const Symbol> y, const DistortionMatrix& rho) {
  if (x.size() != y.size())
    throw validation_error("length mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  if (x.empty()) throw validation_error("product distortion of empty strings");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= rho.rows() || y[i] >= rho.cols()) throw validation_error("letter out of range at position " + std::to_string(i));
    sum += rho(x[i], y[i]);
  }
  return sum / static_cast<double>(x.size());
}

Model binary_hamming_model(double p1, std::vector<double> mass) {
  auto ab = Alphabet::numbered(2);
  return validate_model(ab, ab, {1.0 - p1, p1}, std::move(mass), DistortionMatrix::hamming(2));
}

}  // namespace spherecover
