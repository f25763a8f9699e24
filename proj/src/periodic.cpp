#include "lightcone/periodic.hpp"

#include "lightcone/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace lightcone {

namespace {

using cplx = std::complex<double>;

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
public:
  explicit RealFft(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real_ = fftw_alloc_real(n);
    spec_ = fftw_alloc_complex(n / 2 + 1);
    fwd_ = fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  void forward(const double* in, cplx* out) {
    std::copy(in, in + n_, real_);
    fftw_execute(fwd_);
    for (int k = 0; k <= n_ / 2; ++k) out[k] = cplx(spec_[k][0], spec_[k][1]);
  }
  // Unnormalized inverse.
  void inverse(const cplx* in, double* out) {
    for (int k = 0; k <= n_ / 2; ++k) {
      spec_[k][0] = in[k].real();
      spec_[k][1] = in[k].imag();
    }
    fftw_execute(inv_);
    std::copy(real_, real_ + n_, out);
  }

private:
  int n_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan fwd_, inv_;
};

RealFft& fft_for(int n) {
  thread_local std::map<int, std::unique_ptr<RealFft>> cache;
  auto& p = cache[n];
  if (!p) p = std::make_unique<RealFft>(n);
  return *p;
}

std::vector<cplx> forward(const std::vector<double>& f) {
  int n = static_cast<int>(f.size());
  std::vector<cplx> c(n / 2 + 1);
  fft_for(n).forward(f.data(), c.data());
  return c;
}

std::vector<double> inverse(const std::vector<cplx>& c, int n) {
  std::vector<double> f(n);
  fft_for(n).inverse(c.data(), f.data());
  for (double& x : f) x /= n;
  return f;
}

void check_even(const std::vector<double>& f) {
  if (f.size() < 2 || f.size() % 2 != 0) throw InvalidArgument("periodic kernels need an even number of samples");
}

std::vector<cplx> differentiate_spectrum(const std::vector<cplx>& c, int n, double length, int order) {
  std::vector<cplx> d(c.size());
  const double w = 2.0 * std::numbers::pi / length;
  for (int k = 0; k <= n / 2; ++k) {
    cplx ik(0.0, k * w);
    cplx f = 1.0;
    for (int o = 0; o < order; ++o) f *= ik;
    d[k] = c[k] * f;
  }
  if (order % 2 == 1) d[n / 2] = 0.0;
  return d;
}

}  // namespace

std::vector<cplx> rfft(const std::vector<double>& f) {
  check_even(f);
  return forward(f);
}

std::vector<double> irfft(const std::vector<cplx>& c, int n) {
  if ((int)c.size() != n / 2 + 1) throw InvalidArgument("irfft: coefficient count does not match n");
  return inverse(c, n);
}

PeriodicGrid::PeriodicGrid(int n_points, double length) : n_(n_points), length_(length) {
  if (n_points < 16 || n_points % 2 != 0)
    throw InvalidArgument("PeriodicGrid: n_points must be even and >= 16, got " + std::to_string(n_points));
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("PeriodicGrid: length must be positive");
}

std::vector<double> PeriodicGrid::nodes() const {
  std::vector<double> x(n_);
  for (int j = 0; j < n_; ++j) x[j] = node(j);
  return x;
}

double PeriodicGrid::wavenumber(int k) const { return 2.0 * std::numbers::pi * k / length_; }

bool PeriodicGrid::operator==(const PeriodicGrid& o) const {
  return n_ == o.n_ && std::abs(length_ - o.length_) <= 1e-12 * std::max(length_, o.length_);
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* where) {
  if (a != b) {
    std::ostringstream s;
    s << where << ": grid mismatch (N=" << a.size() << ", L=" << a.length() << " vs N=" << b.size()
      << ", L=" << b.length() << ")";
    throw GridMismatch(s.str());
  }
}

DiffMethod parse_diff_method(const std::string& s) {
  if (s == "spectral") return DiffMethod::spectral;
  if (s == "fd4") return DiffMethod::fd4;
  throw InvalidArgument("unknown differentiation method '" + s + "'");
}

const char* to_string(DiffMethod m) { return m == DiffMethod::spectral ? "spectral" : "fd4"; }

GridFunction::GridFunction(const PeriodicGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if ((int)values.size() != g.size())
    throw GridMismatch("GridFunction: " + std::to_string(values.size()) + " values for " +
                       std::to_string(g.size()) + " nodes");
  for (double x : values)
    if (!std::isfinite(x)) throw InvalidArgument("GridFunction: non-finite value");
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

double GridFunction::l2() const { return std::sqrt(inner(*this, *this)); }

GridFunction GridFunction::operator+(const GridFunction& o) const {
  require_same_grid(grid, o.grid, "GridFunction +");
  GridFunction r(*this);
  for (int j = 0; j < size(); ++j) r.values[j] += o.values[j];
  return r;
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  require_same_grid(grid, o.grid, "GridFunction -");
  GridFunction r(*this);
  for (int j = 0; j < size(); ++j) r.values[j] -= o.values[j];
  return r;
}

GridFunction GridFunction::operator*(const GridFunction& o) const {
  require_same_grid(grid, o.grid, "GridFunction *");
  GridFunction r(*this);
  for (int j = 0; j < size(); ++j) r.values[j] *= o.values[j];
  return r;
}

GridFunction GridFunction::operator*(double s) const {
  GridFunction r(*this);
  for (double& x : r.values) x *= s;
  return r;
}

void Warnings::add(const std::string& w) {
  for (const auto& s : items)
    if (s == w) return;
  items.push_back(w);
}

std::vector<double> spectral_derivative(const std::vector<double>& f, double length, int order) {
  check_even(f);
  if (order < 0) throw InvalidArgument("derivative order must be non-negative");
  if (order == 0) return f;
  int n = static_cast<int>(f.size());
  return inverse(differentiate_spectrum(forward(f), n, length, order), n);
}

std::vector<double> fd4_derivative(const std::vector<double>& f, double length, int order) {
  int n = static_cast<int>(f.size());
  if (n < 8) throw InvalidArgument("fd4 needs at least 8 points");
  double h = length / n;
  auto at = [&](int j) { return f[((j % n) + n) % n]; };
  std::vector<double> d(n);
  for (int j = 0; j < n; ++j) {
    switch (order) {
      case 0: d[j] = f[j]; break;
      case 1: d[j] = (-at(j + 2) + 8 * at(j + 1) - 8 * at(j - 1) + at(j - 2)) / (12 * h); break;
      case 2:
        d[j] = (-at(j + 2) + 16 * at(j + 1) - 30 * at(j) + 16 * at(j - 1) - at(j - 2)) / (12 * h * h);
        break;
      case 3:
        d[j] = (-at(j + 3) + 8 * at(j + 2) - 13 * at(j + 1) + 13 * at(j - 1) - 8 * at(j - 2) + at(j - 3)) /
               (8 * h * h * h);
        break;
      default: throw InvalidArgument("fd4 supports orders 0..3");
    }
  }
  return d;
}

std::vector<double> derivative(const std::vector<double>& f, double length, int order, DiffMethod m) {
  return m == DiffMethod::spectral ? spectral_derivative(f, length, order) : fd4_derivative(f, length, order);
}

std::vector<std::vector<double>> derivative_jet(const std::vector<double>& f, double length, int max_order,
                                                DiffMethod m) {
  std::vector<std::vector<double>> d(max_order + 1);
  d[0] = f;
  if (m == DiffMethod::fd4) {
    for (int o = 1; o <= max_order; ++o) d[o] = fd4_derivative(f, length, o);
    return d;
  }
  check_even(f);
  int n = static_cast<int>(f.size());
  auto c = forward(f);
  for (int o = 1; o <= max_order; ++o) d[o] = inverse(differentiate_spectrum(c, n, length, o), n);
  return d;
}

GridFunction derivative(const GridFunction& f, int order, DiffMethod m, Warnings* warnings) {
  if (order < 1 || order > 3) throw InvalidArgument("derivative order must be 1, 2 or 3");
  if (warnings && m == DiffMethod::spectral && !spectrum_resolved(f.values))
    warnings->add("UnresolvedSpectrum: top third of modes carries more than 1e-8 of the energy");
  return GridFunction(f.grid, derivative(f.values, f.grid.length(), order, m));
}

double integrate(const GridFunction& f) {
  double s = 0.0;
  for (double x : f.values) s += x;
  return s * f.grid.dx();
}

double inner(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f.grid, g.grid, "inner");
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) s += f.values[j] * g.values[j];
  return s * f.grid.dx();
}

double spectral_tail_fraction(const std::vector<double>& f) {
  check_even(f);
  int n = static_cast<int>(f.size());
  auto c = forward(f);
  double total = 0.0, tail = 0.0;
  for (int k = 0; k <= n / 2; ++k) {
    double e = std::norm(c[k]) * ((k == 0 || k == n / 2) ? 1.0 : 2.0);
    total += e;
    if (3 * k > n) tail += e;
  }
  return total > 0 ? tail / total : 0.0;
}

bool spectrum_resolved(const std::vector<double>& f, double threshold) {
  return spectral_tail_fraction(f) <= threshold;
}

std::vector<double> fourier_shift(const std::vector<double>& f, double length, double delta) {
  check_even(f);
  int n = static_cast<int>(f.size());
  auto c = forward(f);
  const double w = 2.0 * std::numbers::pi / length;
  for (int k = 0; k < n / 2; ++k) c[k] *= std::polar(1.0, k * w * delta);
  c[n / 2] *= std::cos(n / 2 * w * delta);
  return inverse(c, n);
}

std::vector<double> trig_interpolate(const std::vector<double>& f, double length, const std::vector<double>& x) {
  check_even(f);
  int n = static_cast<int>(f.size());
  auto c = forward(f);
  const double w = 2.0 * std::numbers::pi / length;
  std::vector<double> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double s = c[0].real();
    cplx step = std::polar(1.0, w * x[i]);
    cplx e = 1.0;
    for (int k = 1; k < n / 2; ++k) {
      e *= step;
      s += 2.0 * (c[k] * e).real();
    }
    s += c[n / 2].real() * std::cos(n / 2 * w * x[i]);
    out[i] = s / n;
  }
  return out;
}

std::vector<double> periodic_antiderivative(const std::vector<double>& f, double length) {
  check_even(f);
  int n = static_cast<int>(f.size());
  auto c = forward(f);
  const double w = 2.0 * std::numbers::pi / length;
  c[0] = 0.0;
  for (int k = 1; k < n / 2; ++k) c[k] /= cplx(0.0, k * w);
  c[n / 2] = 0.0;
  return inverse(c, n);
}

GridFunction random_band_limited(const PeriodicGrid& g, int modes, std::mt19937_64& rng, double amplitude,
                                 bool with_mean) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  double mean = with_mean ? amplitude * ud(rng) : 0.0;
  std::vector<double> a(modes + 1), b(modes + 1);
  for (int k = 1; k <= modes; ++k) {
    a[k] = amplitude * nd(rng) / k;
    b[k] = amplitude * nd(rng) / k;
  }
  const double w = 2.0 * std::numbers::pi / g.length();
  return GridFunction::sample(g, [&](double x) {
    double s = mean;
    for (int k = 1; k <= modes; ++k) s += a[k] * std::cos(k * w * x) + b[k] * std::sin(k * w * x);
    return s;
  });
}

// ---- operator trees ----

struct LinearPeriodicOperator::Node {
  enum Kind { zero, derivative, scalar, multiply, sum, compose } kind;
  double c = 0.0;
  std::optional<GridFunction> g;
  std::shared_ptr<const Node> lhs, rhs;
};

LinearPeriodicOperator LinearPeriodicOperator::D() {
  auto n = std::make_shared<Node>();
  n->kind = Node::derivative;
  return LinearPeriodicOperator(n);
}

LinearPeriodicOperator LinearPeriodicOperator::identity() { return scalar(1.0); }

LinearPeriodicOperator LinearPeriodicOperator::zero() {
  auto n = std::make_shared<Node>();
  n->kind = Node::zero;
  return LinearPeriodicOperator(n);
}

LinearPeriodicOperator LinearPeriodicOperator::scalar(double c) {
  auto n = std::make_shared<Node>();
  n->kind = Node::scalar;
  n->c = c;
  return LinearPeriodicOperator(n);
}

LinearPeriodicOperator LinearPeriodicOperator::multiply(const GridFunction& g) {
  auto n = std::make_shared<Node>();
  n->kind = Node::multiply;
  n->g = g;
  return LinearPeriodicOperator(n);
}

LinearPeriodicOperator operator+(const LinearPeriodicOperator& a, const LinearPeriodicOperator& b) {
  auto n = std::make_shared<LinearPeriodicOperator::Node>();
  n->kind = LinearPeriodicOperator::Node::sum;
  n->lhs = a.node_;
  n->rhs = b.node_;
  return LinearPeriodicOperator(n);
}

LinearPeriodicOperator operator*(const LinearPeriodicOperator& a, const LinearPeriodicOperator& b) {
  auto n = std::make_shared<LinearPeriodicOperator::Node>();
  n->kind = LinearPeriodicOperator::Node::compose;
  n->lhs = a.node_;
  n->rhs = b.node_;
  return LinearPeriodicOperator(n);
}

LinearPeriodicOperator operator*(double c, const LinearPeriodicOperator& a) {
  return LinearPeriodicOperator::scalar(c) * a;
}

LinearPeriodicOperator LinearPeriodicOperator::operator-() const { return -1.0 * *this; }

LinearPeriodicOperator operator-(const LinearPeriodicOperator& a, const LinearPeriodicOperator& b) {
  return a + (-b);
}

namespace {

GridFunction eval(const LinearPeriodicOperator::Node& n, const GridFunction& f, DiffMethod m) {
  using N = LinearPeriodicOperator::Node;
  switch (n.kind) {
    case N::zero: return GridFunction(f.grid);
    case N::derivative: return GridFunction(f.grid, derivative(f.values, f.grid.length(), 1, m));
    case N::scalar: return f * n.c;
    case N::multiply:
      require_same_grid(n.g->grid, f.grid, "apply_operator");
      return *n.g * f;
    case N::sum: return eval(*n.lhs, f, m) + eval(*n.rhs, f, m);
    case N::compose: return eval(*n.lhs, eval(*n.rhs, f, m), m);
  }
  return f;
}

std::string show(const LinearPeriodicOperator::Node& n) {
  using N = LinearPeriodicOperator::Node;
  std::ostringstream s;
  switch (n.kind) {
    case N::zero: return "0";
    case N::derivative: return "D";
    case N::scalar: s << n.c; return s.str();
    case N::multiply: return "g";
    case N::sum: return "(" + show(*n.lhs) + " + " + show(*n.rhs) + ")";
    case N::compose: return show(*n.lhs) + "*" + show(*n.rhs);
  }
  return "?";
}

}  // namespace

GridFunction LinearPeriodicOperator::apply(const GridFunction& f, DiffMethod m) const { return eval(*node_, f, m); }

std::string LinearPeriodicOperator::describe() const { return show(*node_); }

bool LinearPeriodicOperator::is_zero() const { return node_->kind == Node::zero; }

GridFunction apply_operator(const LinearPeriodicOperator& op, const GridFunction& f, DiffMethod m) {
  return op.apply(f, m);
}

std::vector<GridFunction> OperatorMatrix::apply(const std::vector<GridFunction>& f, DiffMethod m) const {
  if ((int)f.size() != dim_) throw InvalidArgument("OperatorMatrix: wrong number of components");
  std::vector<GridFunction> out;
  for (int i = 0; i < dim_; ++i) {
    GridFunction acc(f[0].grid);
    for (int j = 0; j < dim_; ++j) {
      require_same_grid(f[0].grid, f[j].grid, "OperatorMatrix::apply");
      if (at(i, j)) acc = acc + at(i, j)->apply(f[j], m);
    }
    out.push_back(acc);
  }
  return out;
}

double adjoint_residual(const LinearPeriodicOperator& op, const PeriodicGrid& g, int trials, std::uint64_t seed,
                        DiffMethod m) {
  if (trials < 1) throw InvalidArgument("adjoint_residual: trials must be >= 1");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    GridFunction f = random_band_limited(g, 8, rng);
    GridFunction h = random_band_limited(g, 8, rng);
    double r = std::abs(inner(f, op.apply(h, m)) + inner(op.apply(f, m), h)) / (f.l2() * h.l2());
    worst = std::max(worst, r);
  }
  return worst;
}

double adjoint_residual(const OperatorMatrix& op, const PeriodicGrid& g, int trials, std::uint64_t seed,
                        DiffMethod m) {
  if (trials < 1) throw InvalidArgument("adjoint_residual: trials must be >= 1");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<GridFunction> f, h;
    for (int i = 0; i < op.dim(); ++i) f.push_back(random_band_limited(g, 8, rng));
    for (int i = 0; i < op.dim(); ++i) h.push_back(random_band_limited(g, 8, rng));
    auto of = op.apply(f, m), oh = op.apply(h, m);
    double s = 0.0, nf = 0.0, nh = 0.0;
    for (int i = 0; i < op.dim(); ++i) {
      s += inner(f[i], oh[i]) + inner(of[i], h[i]);
      nf += inner(f[i], f[i]);
      nh += inner(h[i], h[i]);
    }
    worst = std::max(worst, std::abs(s) / std::sqrt(nf * nh));
  }
  return worst;
}

}  // namespace lightcone
