#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fel/kernels.hpp"
#include "fel/measure.hpp"

namespace fel {

/// Something that can evaluate G(z) = int dmu(t) / (z - t) on Im z > 0.
class CauchySource {
 public:
  virtual ~CauchySource() = default;

  virtual CauchyJet jet(Complex z) const = 0;
  virtual Complex value(Complex z) const { return jet(z).value; }
  /// Batch evaluation; implementations may exploit locality between
  /// neighbouring points. The default runs `value` in parallel.
  virtual void evaluate(std::span<const Complex> z, std::span<Complex> out) const;

  virtual Interval support() const = 0;
  /// Declared bound on the absolute evaluation error.
  virtual double accuracy() const = 0;
};

/// Value-semantic handle to a Cauchy transform.
class CauchyEvaluator {
 public:
  explicit CauchyEvaluator(std::shared_ptr<const CauchySource> source);

  Complex operator()(Complex z) const { return source_->value(z); }
  CauchyJet jet(Complex z) const { return source_->jet(z); }
  void evaluate(std::span<const Complex> z, std::span<Complex> out) const { source_->evaluate(z, out); }
  std::vector<Complex> evaluate(std::span<const Complex> z) const;

  Interval support() const { return source_->support(); }
  double accuracy() const { return source_->accuracy(); }

  /// Wraps a closed-form transform. Without a derivative, one is formed by
  /// central differences.
  static CauchyEvaluator closed_form(std::function<Complex(Complex)> g, Interval support,
                                     std::function<Complex(Complex)> dg = {}, double accuracy = 1e-14);

 private:
  std::shared_ptr<const CauchySource> source_;
};

/// Multipole-accelerated Cauchy transform of a piecewise-linear grid density.
/// Cells near the target are summed exactly; distant blocks use truncated
/// expansions about the block centre.
class GridCauchyTree final : public CauchySource {
 public:
  explicit GridCauchyTree(const Measure& mu);

  CauchyJet jet(Complex z) const override;
  void evaluate(std::span<const Complex> z, std::span<Complex> out) const override;
  Interval support() const override { return support_; }
  double accuracy() const override { return 1e-12; }

  static constexpr std::size_t kLeafCells = 4;
  static constexpr int kTerms = 32;
  static constexpr double kSeparation = 0.4;

 private:
  struct Node {
    std::size_t c_begin = 0;
    std::size_t c_end = 0;
    int left = -1;
    int right = -1;
    bool empty = false;
    double centre = 0.0;
    double radius = 0.0;
    std::array<double, kTerms> moments{};  // int f(t) ((t - centre)/radius)^p dt
  };

  int build(std::size_t c_begin, std::size_t c_end);
  void leaf_moments(Node& node) const;
  void merge_moments(Node& parent) const;

  std::vector<double> f_;
  double lo_;
  double step_;
  Interval support_;
  std::vector<Node> nodes_;  // root at 0
};

/// Sampled function aligned with a grid measure's nodes.
struct GridFunction {
  double lo = 0.0;
  double step = 0.0;
  std::vector<double> values;

  double node(std::size_t i) const { return lo + static_cast<double>(i) * step; }
};

CauchyEvaluator cauchy_transform(const Measure& mu);

/// Richardson-extrapolated Stieltjes inversion onto `n_points` nodes of
/// [lo, hi]. The result's rescale_factor() reports the renormalisation.
Measure stieltjes_invert(const CauchyEvaluator& g, double lo, double hi, std::size_t n_points);

/// (Hf)(x) = (1/pi) pv int f(y) / (x - y) dy at the grid nodes.
GridFunction hilbert_transform(const Measure& mu);

/// The same quantity by the direct O(N^2) sum; reference for tests and bench.
GridFunction hilbert_transform_reference(const Measure& mu);

}  // namespace fel
