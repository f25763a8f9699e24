#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace lightcone {

class PeriodicGrid {
public:
  PeriodicGrid(int n_points, double length);

  int size() const { return n_; }
  double length() const { return length_; }
  double dx() const { return length_ / n_; }
  double node(int j) const { return j * length_ / n_; }
  std::vector<double> nodes() const;
  // Angular wavenumber of FFT bin k (0 <= k <= n/2).
  double wavenumber(int k) const;

  bool operator==(const PeriodicGrid& o) const;
  bool operator!=(const PeriodicGrid& o) const { return !(*this == o); }

private:
  int n_;
  double length_;
};

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* where);

enum class DiffMethod { spectral, fd4 };

DiffMethod parse_diff_method(const std::string& s);
const char* to_string(DiffMethod m);

struct GridFunction {
  PeriodicGrid grid;
  std::vector<double> values;

  GridFunction(const PeriodicGrid& g) : grid(g), values(g.size(), 0.0) {}
  GridFunction(const PeriodicGrid& g, std::vector<double> v);

  template <class F>
  static GridFunction sample(const PeriodicGrid& g, F&& f) {
    GridFunction out(g);
    for (int j = 0; j < g.size(); ++j) out.values[j] = f(g.node(j));
    return out;
  }
  static GridFunction constant(const PeriodicGrid& g, double c) { return GridFunction(g, std::vector<double>(g.size(), c)); }

  int size() const { return grid.size(); }
  double operator[](int j) const { return values[j]; }
  double& operator[](int j) { return values[j]; }
  double max_abs() const;
  double l2() const;  // sqrt(∫ f^2)

  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;
  GridFunction operator*(const GridFunction& o) const;
  GridFunction operator*(double s) const;
  GridFunction operator-() const { return *this * -1.0; }
};

inline GridFunction operator*(double s, const GridFunction& f) { return f * s; }

// Collects non-fatal numerical warnings (e.g. UnresolvedSpectrum).
struct Warnings {
  std::vector<std::string> items;
  void add(const std::string& w);
};

// Real FFT of an even-length sample vector: n/2+1 coefficients, and its normalized inverse.
std::vector<std::complex<double>> rfft(const std::vector<double>& f);
std::vector<double> irfft(const std::vector<std::complex<double>>& c, int n);

// Raw-array kernels: values are samples of one period of length L.
std::vector<double> spectral_derivative(const std::vector<double>& f, double length, int order);
std::vector<double> fd4_derivative(const std::vector<double>& f, double length, int order);
std::vector<double> derivative(const std::vector<double>& f, double length, int order, DiffMethod m);
// d[0] = f, d[k] = k-th derivative for k <= max_order, one forward transform.
std::vector<std::vector<double>> derivative_jet(const std::vector<double>& f, double length, int max_order,
                                                DiffMethod m);

GridFunction derivative(const GridFunction& f, int order, DiffMethod m = DiffMethod::spectral,
                        Warnings* warnings = nullptr);

double integrate(const GridFunction& f);
double inner(const GridFunction& f, const GridFunction& g);  // ∫ f g

// Fraction of spectral energy carried by modes with |k| > N/3.
double spectral_tail_fraction(const std::vector<double>& f);
bool spectrum_resolved(const std::vector<double>& f, double threshold = 1e-8);

// f(x + delta) for the trigonometric interpolant of the samples.
std::vector<double> fourier_shift(const std::vector<double>& f, double length, double delta);
// Evaluate the trigonometric interpolant at arbitrary points.
std::vector<double> trig_interpolate(const std::vector<double>& f, double length, const std::vector<double>& x);
// Antiderivative of f - mean(f), chosen with zero mean.
std::vector<double> periodic_antiderivative(const std::vector<double>& f, double length);

// Sum of the lowest `modes` Fourier modes (k = 1..modes) with normal coefficients of size amplitude/k,
// plus a constant term drawn in [-amplitude, amplitude].
GridFunction random_band_limited(const PeriodicGrid& g, int modes, std::mt19937_64& rng, double amplitude = 1.0,
                                 bool with_mean = true);

// Composition tree over D, scalars, multiplication by a grid function, +, and ∘.
class LinearPeriodicOperator {
public:
  static LinearPeriodicOperator D();
  static LinearPeriodicOperator identity();
  static LinearPeriodicOperator scalar(double c);
  static LinearPeriodicOperator multiply(const GridFunction& g);
  static LinearPeriodicOperator zero();

  GridFunction apply(const GridFunction& f, DiffMethod m = DiffMethod::spectral) const;
  std::string describe() const;
  bool is_zero() const;

  friend LinearPeriodicOperator operator+(const LinearPeriodicOperator& a, const LinearPeriodicOperator& b);
  friend LinearPeriodicOperator operator-(const LinearPeriodicOperator& a, const LinearPeriodicOperator& b);
  // Composition: (a * b) f = a(b(f)).
  friend LinearPeriodicOperator operator*(const LinearPeriodicOperator& a, const LinearPeriodicOperator& b);
  friend LinearPeriodicOperator operator*(double c, const LinearPeriodicOperator& a);
  LinearPeriodicOperator operator-() const;

  struct Node;

private:
  explicit LinearPeriodicOperator(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

GridFunction apply_operator(const LinearPeriodicOperator& op, const GridFunction& f,
                            DiffMethod m = DiffMethod::spectral);

// Square matrix of operators; empty entries act as zero.
class OperatorMatrix {
public:
  explicit OperatorMatrix(int dim) : dim_(dim), entries_(dim * dim) {}
  int dim() const { return dim_; }
  void set(int i, int j, LinearPeriodicOperator op) { entries_[i * dim_ + j] = std::move(op); }
  const std::optional<LinearPeriodicOperator>& at(int i, int j) const { return entries_[i * dim_ + j]; }
  std::vector<GridFunction> apply(const std::vector<GridFunction>& f, DiffMethod m = DiffMethod::spectral) const;

private:
  int dim_;
  std::vector<std::optional<LinearPeriodicOperator>> entries_;
};

// max over random band-limited f, g of |∫ f Op(g) + ∫ Op(f) g| / (|f| |g|).
double adjoint_residual(const LinearPeriodicOperator& op, const PeriodicGrid& g, int trials, std::uint64_t seed,
                        DiffMethod m = DiffMethod::spectral);
double adjoint_residual(const OperatorMatrix& op, const PeriodicGrid& g, int trials, std::uint64_t seed,
                        DiffMethod m = DiffMethod::spectral);

}  // namespace lightcone
