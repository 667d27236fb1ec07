#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spherecover {

/// Index of a letter inside its alphabet. Alphabets hold at most 256 letters.
using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

inline constexpr double kProbabilitySumTolerance = 1e-12;

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  /// Alphabet with labels "0", "1", ..., "size-1".
  static Alphabet numbered(std::size_t size);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& label(std::size_t i) const { return symbols_.at(i); }
  const std::vector<std::string>& labels() const noexcept { return symbols_; }
  std::size_t index_of(std::string_view label) const;

  /// Splits `text` into single-character labels. Only valid when every label has length one.
  Word encode(std::string_view text) const;
  std::string decode(std::span<const Symbol> word) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> symbols_;
};

/// A probability vector. Entries are nonnegative and sum to one within 1e-12.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> probs);

  /// Rescales nonnegative weights to sum to one.
  static Distribution normalized(std::vector<double> weights);
  static Distribution uniform(std::size_t size);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const noexcept { return probs_; }
  bool strictly_positive() const noexcept;

 private:
  std::vector<double> probs_;
};

class MassFunction {
 public:
  MassFunction() = default;
  explicit MassFunction(std::vector<double> masses);

  static MassFunction counting(std::size_t size);

  std::size_t size() const noexcept { return masses_.size(); }
  double operator[](std::size_t i) const { return masses_[i]; }
  std::span<const double> values() const noexcept { return masses_; }
  double total() const noexcept;
  /// log M(A), the largest meaningful rate.
  double log_total() const noexcept;
  double min() const noexcept;

 private:
  std::vector<double> masses_;
};

/// Single-letter distortion, rows indexed by source letters and columns by
/// reproduction letters. Row-major storage.
class DistortionMatrix {
 public:
  DistortionMatrix() = default;
  DistortionMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  explicit DistortionMatrix(const std::vector<std::vector<double>>& rows);

  static DistortionMatrix hamming(std::size_t size);
  /// rho(a,b) = 0 when the labels agree and 1 otherwise.
  static DistortionMatrix hamming(const Alphabet& source, const Alphabet& reproduction);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t x, std::size_t y) const { return entries_[x * cols_ + y]; }
  std::span<const double> row(std::size_t x) const { return {entries_.data() + x * cols_, cols_}; }
  std::span<const double> entries() const noexcept { return entries_; }

  double max() const noexcept;
  /// First row without an exact zero, or rows() when every row has one.
  std::size_t first_row_without_zero() const noexcept;

  bool operator==(const DistortionMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// Row-stochastic matrix W(y|x).
class Channel {
 public:
  Channel() = default;
  Channel(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Channel constant(std::size_t rows, std::size_t cols, std::size_t target);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t x, std::size_t y) const { return entries_[x * cols_ + y]; }
  std::span<const double> row(std::size_t x) const { return {entries_.data() + x * cols_, cols_}; }
  std::span<const double> entries() const noexcept { return entries_; }

  /// P_Y(y) = sum_x P(x) W(y|x).
  std::vector<double> output_law(std::span<const double> source) const;
  /// E rho(X,Y) under P(x) W(y|x).
  double expected_distortion(std::span<const double> source, const DistortionMatrix& rho) const;

  /// Convex combination theta*a + (1-theta)*b.
  static Channel mix(const Channel& a, const Channel& b, double theta);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

struct ValidateOptions {
  bool normalize_rho = false;
  bool renormalize_probabilities = false;
};

/// A validated problem instance. Immutable once built.
class Model {
 public:
  const Alphabet& source_alphabet() const noexcept { return source_; }
  const Alphabet& reproduction_alphabet() const noexcept { return reproduction_; }
  const Distribution& P() const noexcept { return p_; }
  const MassFunction& M() const noexcept { return m_; }
  const DistortionMatrix& rho() const noexcept { return rho_; }

  std::size_t source_size() const noexcept { return source_.size(); }
  std::size_t reproduction_size() const noexcept { return reproduction_.size(); }
  double d_max() const noexcept { return rho_.max(); }
  double r_max() const noexcept { return m_.log_total(); }

  /// Same geometry and mass with a different (strictly positive) source law.
  Model with_source(const Distribution& p) const;
  Model with_mass(const MassFunction& m) const;

 private:
  friend Model validate_model(Alphabet, Alphabet, std::vector<double>, std::vector<double>, DistortionMatrix,
                              const ValidateOptions&);
  Alphabet source_;
  Alphabet reproduction_;
  Distribution p_;
  MassFunction m_;
  DistortionMatrix rho_;
};

Model validate_model(Alphabet source, Alphabet reproduction, std::vector<double> p, std::vector<double> m,
                     DistortionMatrix rho, const ValidateOptions& options = {});

/// Subtracts each row's minimum so every row contains a zero.
DistortionMatrix normalize_distortion(const DistortionMatrix& rho);

/// (1/n) sum_i rho(x_i, y_i).
double product_distortion(std::span<const Symbol> x, std::span<const Symbol> y, const DistortionMatrix& rho);

/// Binary model with Hamming distortion, reproduction alphabet equal to the source.
Model binary_hamming_model(double p1, std::vector<double> mass);

}  // namespace spherecover
