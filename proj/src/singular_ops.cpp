#include "muskat/singular_ops.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <functional>
#include <mutex>

#include "muskat/numerics.hpp"
#include "muskat/parallel.hpp"

namespace muskat::ops {

namespace {

// Half-width, in cells, of the window where the α→0 singular model is integrated exactly.
constexpr int kModelCells = 4;

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw Error("kernel_exponent must lie in [0, 0.5)");
}

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

inline double velocity_term(double h, double w, double alpha, double fi, double fk, double dfi, double dfk,
                            double beta) {
  const double diff = w * (beta + (fi - fk) / alpha);
  return h * w * ((dfi - dfk) / alpha) / (1.0 + diff * diff);
}

// ∫_0^U u^ε / (1 + u^{2ε} c²) du with u = U t³, which removes the u^ε kink.
double singular_model_integral(double upper, double epsilon, double c) {
  const auto& rule = numerics::gauss_legendre(32);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double t = 0.5 * (rule.nodes[k] + 1.0);
    const double u = upper * t * t * t;
    const double w = std::pow(u, epsilon);
    s += 0.5 * rule.weights[k] * 3.0 * upper * t * t * w / (1.0 + w * w * c * c);
  }
  return s;
}

// Exact ∫ minus midpoint sum of the α→0 model f''|α|^ε / (1 + |α|^{2ε} c²) over
// the cells the quadrature actually visits on each side.
double singular_correction(double h, double epsilon, double d2f, double c, int left_cells, int right_cells) {
  const int kl = std::min(kModelCells, left_cells);
  const int kr = std::min(kModelCells, right_cells);
  const double ul = (kl + 0.5) * h;
  const double ur = (kr + 0.5) * h;
  if (epsilon == 0.0) return d2f / (1.0 + c * c) * (ul + ur - h * (kl + kr));
  auto mu = [&](double u) {
    const double w = std::pow(u, epsilon);
    return w / (1.0 + w * w * c * c);
  };
  double sum = 0.0;
  for (int j = 1; j <= kl; ++j) sum += mu(j * h);
  for (int j = 1; j <= kr; ++j) sum += mu(j * h);
  return d2f * (singular_model_integral(ul, epsilon, c) + singular_model_integral(ur, epsilon, c) - h * sum);
}

double log_ratio(double num, double den) { return std::log(num / den); }

double velocity_tail_closed(double value, double slope, const FarField& ff, double al, double ar) {
  const double beta = ff.tilt;
  const double p = 1.0 + beta * beta;
  const double da = value - ff.left;
  const double db = value - ff.right;
  auto q = [&](double alpha, double d) { return p * alpha * alpha + 2.0 * beta * d * alpha + d * d; };
  double s = log_ratio(q(-ar, db), q(al, da)) / (2.0 * p);
  if (da != 0.0) s -= beta * sgn(da) / p * std::atan2(std::abs(da), p * al + beta * da);
  if (db != 0.0) s -= beta * sgn(db) / p * std::atan2(std::abs(db), p * ar - beta * db);
  return slope * s;
}

// Δ_α f~ integrand with far-field source, α = ±u, computed through log u so that
// u^ε never overflows.
struct TailIntegrand {
  double slope, beta, epsilon, da, db;

  double left(double log_u) const {  // α = u > 0, source value a
    const double u = std::exp(log_u);
    const double w = std::exp(epsilon * log_u);
    const double diff = w * (beta + da / u);
    return slope * w / u / (1.0 + diff * diff);
  }
  double right(double log_u) const {  // α = -u, source value b
    const double u = std::exp(log_u);
    const double w = std::exp(epsilon * log_u);
    const double diff = w * (beta - db / u);
    return -slope * w / u / (1.0 + diff * diff);
  }
};

}  // namespace

std::vector<double> detail::spectral_multiply(const InterfaceProfile& profile,
                                              const std::function<std::complex<double>(double)>& multiplier) {
  if (!profile.far_field().decaying()) {
    throw Error("spectral backend requires decaying data (a = b = 0, no tilt)");
  }
  static std::mutex plan_mutex;
  const int n = profile.size();
  const double L = profile.grid().half_width();
  std::vector<double> in(profile.samples().begin(), profile.samples().end());
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(n / 2 + 1));
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(plan_mutex);
    fwd = fftw_plan_dft_r2c_1d(n, in.data(), cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(n, cplx, in.data(), FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  for (int m = 0; m <= n / 2; ++m) {
    spec[static_cast<std::size_t>(m)] *= multiplier(M_PI * m / L) / static_cast<double>(n);
  }
  if (n % 2 == 0) {
    // The Nyquist mode is real; keep only the real part of its multiplier.
    spec[static_cast<std::size_t>(n / 2)] = spec[static_cast<std::size_t>(n / 2)].real();
  }
  fftw_execute(bwd);
  {
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  return in;
}

namespace {

// I(s) = ∫_0^∞ (1 - cos u) / u^{1+s} du.
double cosine_moment(double s) {
  double series = 0.0;
  double fact = 1.0;
  for (int m = 1; m < 40; ++m) {
    fact *= (2.0 * m - 1.0) * (2.0 * m);
    const double term = 1.0 / (fact * (2.0 * m - s));
    series += (m % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  constexpr int kPeriods = 64;
  const double x_max = 2.0 * M_PI * kPeriods;
  const double p = 1.0 + s;
  const double body =
      numerics::integrate([p](double u) { return std::cos(u) * std::pow(u, -p); }, 1.0, x_max, 4 * kPeriods, 16);
  // ∫_X^∞ cos u u^{-p} du by repeated integration by parts (sin X = 0).
  std::function<double(double, int)> far = [&](double q, int depth) -> double {
    if (depth == 0) return 0.0;
    return q * (std::pow(x_max, -q - 1.0) - (q + 1.0) * far(q + 2.0, depth - 1));
  };
  return series + 1.0 / s - (body + far(p, 6));
}

}  // namespace

double regularized_difference(const InterfaceProfile& profile, int node, double alpha, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error("difference exponent must lie in [0, 1)");
  if (alpha == 0.0) throw Error("regularized difference needs alpha != 0");
  if (node < 0 || node >= profile.size()) throw Error("node index outside the grid");
  const double x = profile.grid().node(node);
  const double diff = profile.far_field().tilt * alpha + profile.at(node) - profile(x - alpha);
  return diff * std::pow(std::abs(alpha), epsilon) / alpha;
}

namespace detail {

double singular_cell_weight(double h, double epsilon, double c) {
  return singular_correction(h, epsilon, 1.0, c, kModelCells, kModelCells);
}

struct VelocityContext {
  int n = 0;
  int extension = 0;  // cells beyond the grid summed numerically
  double h = 0.0;
  double epsilon = 0.0;
  FarField ff;
  std::vector<double> f, df, d2f, pw;

  double value(int k) const { return k < 0 ? ff.left : (k >= n ? ff.right : f[static_cast<std::size_t>(k)]); }
  double slope(int k) const { return (k < 0 || k >= n) ? 0.0 : df[static_cast<std::size_t>(k)]; }
};

VelocityKernel::VelocityKernel(const InterfaceProfile& profile, double epsilon, const TailSpec& tail)
    : ctx_(std::make_unique<VelocityContext>()) {
  check_epsilon(epsilon);
  if (!(tail.radius >= 0.0) || !std::isfinite(tail.radius)) throw Error("tail radius must be finite and >= 0");
  auto& c = *ctx_;
  c.n = profile.size();
  c.h = profile.grid().spacing();
  c.epsilon = epsilon;
  c.ff = profile.far_field();
  c.extension = static_cast<int>(std::floor(tail.radius / c.h));
  c.f.assign(profile.samples().begin(), profile.samples().end());
  c.df = numerics::first_derivative(c.f, c.h);
  c.d2f = numerics::second_derivative(c.f, c.h);
  const int span = c.n + c.extension + 1;
  c.pw.assign(static_cast<std::size_t>(span), 1.0);
  if (epsilon != 0.0) {
    for (int j = 1; j < span; ++j) c.pw[static_cast<std::size_t>(j)] = std::pow(j * c.h, epsilon);
  }
}

VelocityKernel::~VelocityKernel() = default;

std::size_t VelocityKernel::max_terms() const { return static_cast<std::size_t>(ctx_->n + 2 * ctx_->extension + 2); }

std::size_t VelocityKernel::terms(int i, std::vector<double>& out) const {
  const auto& c = *ctx_;
  const int k_min = std::min(0, i - c.extension);
  const int k_max = std::max(c.n - 1, i + c.extension);
  const double fi = c.f[static_cast<std::size_t>(i)];
  const double dfi = c.df[static_cast<std::size_t>(i)];
  const double beta = c.ff.tilt;
  std::size_t m = 0;
  if (out.size() < static_cast<std::size_t>(k_max - k_min + 2)) out.resize(static_cast<std::size_t>(k_max - k_min + 2));
  for (int k = k_min; k <= k_max; ++k) {
    if (k == i) continue;
    const int j = i - k;
    out[m++] = velocity_term(c.h, c.pw[static_cast<std::size_t>(std::abs(j))], j * c.h, fi, c.value(k), dfi,
                             c.slope(k), beta);
  }
  const int left_cells = i - k_min;
  const int right_cells = k_max - i;
  out[m++] = singular_correction(c.h, c.epsilon, c.d2f[static_cast<std::size_t>(i)], dfi + beta, left_cells,
                                 right_cells);
  out[m++] = velocity_tail(fi, dfi, c.ff, c.epsilon, (left_cells + 0.5) * c.h, (right_cells + 0.5) * c.h);
  return m;
}

}  // namespace detail

std::vector<double> pv_velocity(const InterfaceProfile& profile, const PhysicsParams& physics, double epsilon,
                                const TailSpec& tail) {
  const detail::VelocityKernel kernel(profile, epsilon, tail);
  std::vector<double> v(static_cast<std::size_t>(profile.size()));
  parallel_for(profile.size(), [&](int begin, int end) {
    std::vector<double> buffer(kernel.max_terms());
    for (int i = begin; i < end; ++i) {
      const std::size_t m = kernel.terms(i, buffer);
      v[static_cast<std::size_t>(i)] = physics.density_coefficient * pairwise_sum(std::span(buffer.data(), m));
    }
  });
  return v;
}

std::vector<double> velocity_reference_oracle(const InterfaceProfile& profile, const PhysicsParams& physics,
                                              double epsilon, const TailSpec& tail) {
  check_epsilon(epsilon);
  const int n = profile.size();
  const double h = profile.grid().spacing();
  const FarField& ff = profile.far_field();
  const std::vector<double> f(profile.samples().begin(), profile.samples().end());
  const auto df = numerics::first_derivative(f, h);
  const auto d2f = numerics::second_derivative(f, h);
  const int ext = static_cast<int>(std::floor(tail.radius / h));
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int k_min = std::min(0, i - ext);
    const int k_max = std::max(n - 1, i + ext);
    const double fi = f[static_cast<std::size_t>(i)];
    const double dfi = df[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
      if (k == i) continue;
      const bool on_grid = k >= 0 && k < n;
      const double fk = on_grid ? f[static_cast<std::size_t>(k)] : (k < 0 ? ff.left : ff.right);
      const double dfk = on_grid ? df[static_cast<std::size_t>(k)] : 0.0;
      const int j = i - k;
      const double w = epsilon == 0.0 ? 1.0 : std::pow(std::abs(j) * h, epsilon);
      sum += velocity_term(h, w, j * h, fi, fk, dfi, dfk, ff.tilt);
    }
    sum += singular_correction(h, epsilon, d2f[static_cast<std::size_t>(i)], dfi + ff.tilt, i - k_min, k_max - i);
    sum += velocity_tail(fi, dfi, ff, epsilon, (i - k_min + 0.5) * h, (k_max - i + 0.5) * h);
    v[static_cast<std::size_t>(i)] = physics.density_coefficient * sum;
  }
  return v;
}

std::vector<double> velocity_brute_force(const InterfaceProfile& profile, const PhysicsParams& physics,
                                         double epsilon, double radius) {
  const int n = profile.size();
  const double h = profile.grid().spacing();
  const int reach = static_cast<int>(std::ceil(radius / h));
  if (reach < n) throw Error("brute-force radius must cover the whole grid");
  check_epsilon(epsilon);
  std::vector<double> v(static_cast<std::size_t>(n));
  const FarField& ff = profile.far_field();
  const std::vector<double> f(profile.samples().begin(), profile.samples().end());
  const auto df = numerics::first_derivative(f, h);
  const auto d2f = numerics::second_derivative(f, h);
  parallel_for(n, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const double fi = f[static_cast<std::size_t>(i)];
      const double dfi = df[static_cast<std::size_t>(i)];
      double sum = 0.0;
      for (int j = reach; j >= 1; --j) {  // far to near keeps the small terms first
        const double w = epsilon == 0.0 ? 1.0 : std::pow(j * h, epsilon);
        for (int k : {i - j, i + j}) {
          const bool on_grid = k >= 0 && k < n;
          const double fk = on_grid ? f[static_cast<std::size_t>(k)] : (k < 0 ? ff.left : ff.right);
          const double dfk = on_grid ? df[static_cast<std::size_t>(k)] : 0.0;
          sum += velocity_term(h, w, (i - k) * h, fi, fk, dfi, dfk, ff.tilt);
        }
      }
      sum += singular_correction(h, epsilon, d2f[static_cast<std::size_t>(i)], dfi + ff.tilt, reach, reach);
      v[static_cast<std::size_t>(i)] = physics.density_coefficient * sum;
    }
  });
  return v;
}

double velocity_tail(double value, double slope, const FarField& far_field, double epsilon, double left_radius,
                     double right_radius) {
  if (!(left_radius > 0.0) || !(right_radius > 0.0)) throw Error("tail radius must be positive");
  check_epsilon(epsilon);
  if (slope == 0.0) return 0.0;
  if (epsilon == 0.0) return velocity_tail_closed(value, slope, far_field, left_radius, right_radius);
  return velocity_tail_numeric(value, slope, far_field, epsilon, left_radius, right_radius);
}

double velocity_tail_numeric(double value, double slope, const FarField& far_field, double epsilon,
                             double left_radius, double right_radius) {
  if (!(left_radius > 0.0) || !(right_radius > 0.0)) throw Error("tail radius must be positive");
  const TailIntegrand g{slope, far_field.tilt, epsilon, value - far_field.left, value - far_field.right};
  const double a_max = std::max(left_radius, right_radius);
  const double log_max = std::log(a_max);
  double total = 0.0;
  // One side starts closer: integrate it alone up to the common radius.
  if (left_radius != right_radius) {
    const bool left_short = left_radius < right_radius;
    const double lo = std::log(left_short ? left_radius : right_radius);
    const int panels = std::max(1, static_cast<int>(std::ceil(log_max - lo)));
    total += numerics::integrate(
        [&](double t) { return std::exp(t) * (left_short ? g.left(t) : g.right(t)); }, lo, log_max, panels, 16);
  }
  // Both sides together beyond the common radius, where their leading terms cancel.
  auto paired = [&](double t) { return std::exp(t) * (g.left(t) + g.right(t)); };
  for (auto [lo, hi] : {std::pair{0.0, 4.0}, std::pair{4.0, 12.0}, std::pair{12.0, 36.0}}) {
    total += numerics::integrate(paired, log_max + lo, log_max + hi, 1, 16);
  }
  return total;
}

double tail_correction(double value, double slope, const FarField& far_field, double radius, double epsilon) {
  if (!(radius > 0.0)) throw Error("tail radius must be positive");
  return velocity_tail(value, slope, far_field, epsilon, radius, radius);
}

double arctan_flux(const InterfaceProfile& profile, int node, const TailSpec& tail) {
  const FarField& ff = profile.far_field();
  if (ff.tilt != 0.0) throw Error("arctan flux is defined for the untilted system only");
  if (node < 0 || node >= profile.size()) throw Error("node index outside the grid");
  const int n = profile.size();
  const double h = profile.grid().spacing();
  const int ext = static_cast<int>(std::floor(tail.radius / h));
  const int k_min = std::min(0, node - ext);
  const int k_max = std::max(n - 1, node + ext);
  const double fi = profile.at(node);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(k_max - k_min + 2));
  for (int k = k_min; k <= k_max; ++k) {
    if (k == node) continue;
    terms.push_back(h * std::atan((fi - profile.at(k)) / ((node - k) * h)));
  }
  // Removable singularity: arctan(Δ_α f) → arctan(f'(x)).
  const auto s = profile.samples();
  double slope;
  if (node >= 2 && node < n - 2) {
    slope = (s[node - 2] - 8.0 * s[node - 1] + 8.0 * s[node + 1] - s[node + 2]) / (12.0 * h);
  } else {
    slope = (profile.at(node + 1) - profile.at(node - 1)) / (2.0 * h);
  }
  terms.push_back(h * std::atan(slope));
  // ∫ arctan(c/u) du = u arctan(c/u) + (c/2) ln(u² + c²); the ln of the upper
  // limit multiplies (a - b) and does not depend on x, so it is dropped.
  auto G = [](double c, double u) { return c == 0.0 ? 0.0 : u * std::atan(c / u) + 0.5 * c * std::log(u * u + c * c); };
  const double da = fi - ff.left;
  const double db = fi - ff.right;
  const double al = (node - k_min + 0.5) * h;
  const double ar = (k_max - node + 0.5) * h;
  terms.push_back((da - db) - G(da, al) + G(db, ar));
  return pairwise_sum(terms);
}

std::vector<double> arctan_flux_field(const InterfaceProfile& profile, const TailSpec& tail) {
  std::vector<double> phi(static_cast<std::size_t>(profile.size()));
  parallel_for(profile.size(), [&](int begin, int end) {
    for (int i = begin; i < end; ++i) phi[static_cast<std::size_t>(i)] = arctan_flux(profile, i, tail);
  });
  return phi;
}

double lambda_normalization(double order) {
  if (!(order > 0.0 && order <= 1.0)) throw Error("fractional order must lie in (0, 1]");
  return 1.0 / (2.0 * cosine_moment(order));
}

std::vector<double> lambda_power(const InterfaceProfile& profile, double order, Backend backend) {
  if (!(order > 0.0 && order <= 1.0)) throw Error("fractional order must lie in (0, 1]");
  if (backend == Backend::spectral) {
    return detail::spectral_multiply(profile, [order](double xi) { return std::complex<double>(std::pow(std::abs(xi), order)); });
  }
  const int n = profile.size();
  const double h = profile.grid().spacing();
  const FarField& ff = profile.far_field();
  const double c1 = lambda_normalization(order);
  const std::vector<double> f(profile.samples().begin(), profile.samples().end());
  const auto d2f = numerics::second_derivative(f, h);
  std::vector<double> weight(static_cast<std::size_t>(n));
  for (int j = 1; j < n; ++j) weight[static_cast<std::size_t>(j)] = h / std::pow(j * h, 1.0 + order);
  // Endpoint correction for the |α|^{1-s} behaviour of the paired integrand.
  const double endpoint = std::riemann_zeta(order - 1.0) * std::pow(h, 2.0 - order);
  std::vector<double> out(static_cast<std::size_t>(n));
  parallel_for(n, [&](int begin, int end) {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n + 3));
    for (int i = begin; i < end; ++i) {
      terms.clear();
      const double fi = f[static_cast<std::size_t>(i)];
      const int paired = std::min(i, n - 1 - i);
      for (int k = 0; k < i - paired; ++k) {
        terms.push_back((fi - f[static_cast<std::size_t>(k)]) * weight[static_cast<std::size_t>(i - k)]);
      }
      for (int j = paired; j >= 1; --j) {
        terms.push_back((2.0 * fi - f[static_cast<std::size_t>(i - j)] - f[static_cast<std::size_t>(i + j)]) *
                        weight[static_cast<std::size_t>(j)]);
      }
      for (int k = i + paired + 1; k < n; ++k) {
        terms.push_back((fi - f[static_cast<std::size_t>(k)]) * weight[static_cast<std::size_t>(k - i)]);
      }
      const double al = (i + 0.5) * h;
      const double ar = (n - 1 - i + 0.5) * h;
      terms.push_back((fi - ff.left) * std::pow(al, -order) / order);
      terms.push_back((fi - ff.right) * std::pow(ar, -order) / order);
      terms.push_back(endpoint * d2f[static_cast<std::size_t>(i)]);
      out[static_cast<std::size_t>(i)] = c1 * pairwise_sum(terms);
    }
  });
  return out;
}

std::vector<double> hilbert_transform(const InterfaceProfile& profile, Backend backend) {
  if (backend == Backend::spectral) {
    return detail::spectral_multiply(profile, [](double xi) { return std::complex<double>(0.0, -sgn(xi)); });
  }
  const FarField& ff = profile.far_field();
  if (ff.left != ff.right) throw Error("kernel Hilbert transform needs equal far-field limits");
  const int n = profile.size();
  const double h = profile.grid().spacing();
  std::vector<double> g(profile.samples().begin(), profile.samples().end());
  for (double& v : g) v -= ff.left;
  const auto dg = numerics::first_derivative(g, h);
  std::vector<double> out(static_cast<std::size_t>(n));
  parallel_for(n, [&](int begin, int end) {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n + 1));
    for (int i = begin; i < end; ++i) {
      terms.clear();
      const int paired = std::min(i, n - 1 - i);
      for (int k = 0; k < i - paired; ++k) terms.push_back(g[static_cast<std::size_t>(k)] / (i - k));
      for (int j = paired; j >= 1; --j) {
        terms.push_back((g[static_cast<std::size_t>(i - j)] - g[static_cast<std::size_t>(i + j)]) / j);
      }
      for (int k = i + paired + 1; k < n; ++k) terms.push_back(g[static_cast<std::size_t>(k)] / (i - k));
      terms.push_back(-h * dg[static_cast<std::size_t>(i)]);
      out[static_cast<std::size_t>(i)] = pairwise_sum(terms) / M_PI;
    }
  });
  return out;
}

}  // namespace muskat::ops
