#include "boldg/hilbert.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "boldg/errors.hpp"

namespace boldg {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Reference-cell integrals

// 2 Q_n(s), n = 0..degree: PV int_{-1}^{1} P_n(t) / (s - t) dt (Neumann's formula).
// Away from [-1, 1] the forward recurrence is unstable, and the smooth integrand
// is integrated directly instead.
void second_kind_integrals(int degree, double s, double* out) {
  if (std::abs(s) > 1.5) {
    const QuadRule& g = gauss_legendre(40);
    std::fill(out, out + degree + 1, 0.0);
    for (int q = 0; q < g.n; ++q) {
      const double w = g.weights[q] / (s - g.nodes[q]);
      double p_prev = 0.0;
      double p = 1.0;
      for (int n = 0; n <= degree; ++n) {
        out[n] += w * p;
        const double p_next = ((2.0 * n + 1.0) * g.nodes[q] * p - n * p_prev) / (n + 1.0);
        p_prev = p;
        p = p_next;
      }
    }
    return;
  }
  const double q0 = 0.5 * std::log(std::abs((1.0 + s) / (1.0 - s)));
  double q_prev = q0;
  double q = s * q0 - 1.0;
  out[0] = 2.0 * q0;
  if (degree >= 1) out[1] = 2.0 * q;
  for (int n = 1; n < degree; ++n) {
    const double q_next = ((2.0 * n + 1.0) * s * q - n * q_prev) / (n + 1.0);
    q_prev = q;
    q = q_next;
    out[n + 1] = 2.0 * q;
  }
}

// Composite rule on [-1, 1] graded geometrically toward both endpoints, for
// integrands with logarithmic endpoint singularities.
struct GradedRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GradedRule& graded_rule() {
  static const GradedRule rule = [] {
    // 0.15^18 ~ 1.5e-15 keeps every node distinct from the endpoint in double;
    // the dropped piece [0, 0.15^18] contributes O(1e-14) to a log-singular integral.
    constexpr int levels = 18;
    constexpr double ratio = 0.15;
    const QuadRule& g = gauss_legendre(16);
    // Subintervals of [0, 1] accumulating at 0.
    std::vector<std::pair<double, double>> pieces;
    double hi = 1.0;
    for (int j = 0; j < levels; ++j) {
      const double lo = hi * ratio;
      pieces.emplace_back(lo, hi);
      hi = lo;
    }
    GradedRule r;
    for (const auto& [lo, up] : pieces) {
      const double half = 0.5 * (up - lo);
      const double mid = 0.5 * (up + lo);
      for (int q = 0; q < g.n; ++q) {
        const double t = mid + half * g.nodes[q];  // distance from the endpoint
        const double w = half * g.weights[q];
        r.nodes.push_back(-1.0 + t);
        r.weights.push_back(w);
        r.nodes.push_back(1.0 - t);
        r.weights.push_back(w);
      }
    }
    return r;
  }();
  return rule;
}

Eigen::MatrixXd semi_analytic_pair(int degree, int offset) {
  const int nm = degree + 1;
  const GradedRule& rule = graded_rule();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nm, nm);
  double phi[32];
  double inner[32];
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double xi = rule.nodes[q];
    legendre_basis(degree, xi, std::span(phi, nm));
    second_kind_integrals(degree, xi + 2.0 * offset, inner);
    for (int m = 0; m < nm; ++m) inner[m] *= std::sqrt(m + 0.5);
    for (int l = 0; l < nm; ++l)
      for (int m = 0; m < nm; ++m) r(l, m) += rule.weights[q] * phi[l] * inner[m];
  }
  return r;
}

// Tensor rule: xi on the outer rule, eta on the inner rule, kernel 1/(xi - eta + shift).
Eigen::MatrixXd tensor_pair(int degree, double shift, const QuadRule& outer, const QuadRule& inner) {
  const int nm = degree + 1;
  Eigen::MatrixXd phi_o(outer.n, nm), phi_i(inner.n, nm);
  std::vector<double> row(nm);
  for (int a = 0; a < outer.n; ++a) {
    legendre_basis(degree, outer.nodes[a], row);
    for (int m = 0; m < nm; ++m) phi_o(a, m) = row[m];
  }
  for (int b = 0; b < inner.n; ++b) {
    legendre_basis(degree, inner.nodes[b], row);
    for (int m = 0; m < nm; ++m) phi_i(b, m) = row[m];
  }
  Eigen::MatrixXd kernel(outer.n, inner.n);
  for (int a = 0; a < outer.n; ++a)
    for (int b = 0; b < inner.n; ++b)
      kernel(a, b) = outer.weights[a] * inner.weights[b] / (outer.nodes[a] - inner.nodes[b] + shift);
  return phi_o.transpose() * kernel * phi_i;
}

// cot(z) - 1/z for |z| <= pi/2, with a series near 0 to avoid cancellation.
double cot_minus_inverse(double z) {
  if (std::abs(z) < 0.2) {
    const double z2 = z * z;
    return -z * (1.0 / 3.0 + z2 * (1.0 / 45.0 + z2 * (2.0 / 945.0 + z2 * (1.0 / 4725.0 + z2 * (2.0 / 93555.0)))));
  }
  return std::cos(z) / std::sin(z) - 1.0 / z;
}

// Periodic kernel minus the three nearest line-kernel poles (s = 0, +-P): smooth on [-P, P].
double periodic_remainder(double s, double period) {
  const double z = kPi * s / period;
  const double n = std::round(z / kPi);
  const double reduced = z - n * kPi;
  double value = cot_minus_inverse(reduced) / period;
  // The pole at s = nP was removed analytically by the reduction; subtract the other two.
  for (int image = -1; image <= 1; ++image) {
    if (image == -static_cast<int>(n)) continue;
    value -= 1.0 / (kPi * (s + image * period));
  }
  return value;
}

Eigen::MatrixXd periodic_remainder_block(int degree, int offset, double h, double period, const QuadRule& outer,
                                         const QuadRule& inner) {
  const int nm = degree + 1;
  std::vector<double> row(nm);
  Eigen::MatrixXd phi_o(outer.n, nm), phi_i(inner.n, nm);
  for (int a = 0; a < outer.n; ++a) {
    legendre_basis(degree, outer.nodes[a], row);
    for (int m = 0; m < nm; ++m) phi_o(a, m) = row[m];
  }
  for (int b = 0; b < inner.n; ++b) {
    legendre_basis(degree, inner.nodes[b], row);
    for (int m = 0; m < nm; ++m) phi_i(b, m) = row[m];
  }
  Eigen::MatrixXd kernel(outer.n, inner.n);
  for (int a = 0; a < outer.n; ++a)
    for (int b = 0; b < inner.n; ++b) {
      const double s = 0.5 * h * (outer.nodes[a] - inner.nodes[b] + 2.0 * offset);
      kernel(a, b) = outer.weights[a] * inner.weights[b] * periodic_remainder(s, period);
    }
  return 0.25 * h * h * (phi_o.transpose() * kernel * phi_i);
}

// ---------------------------------------------------------------------------
// FFTW helpers

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwDeleter {
  void operator()(T* p) const noexcept { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwDeleter<double>>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwDeleter<fftw_complex>>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

}  // namespace

// Block circular convolution y_i = sum_j C_{(i - j) mod L} x_j, with x zero-padded to length L.
class HilbertOperator::Convolver {
 public:
  // kernel(n) returns the block for circular index n in [0, L).
  template <class BlockAt>
  Convolver(int cells, int modes, int length, BlockAt&& kernel)
      : cells_(cells), modes_(modes), length_(length), spectrum_len_(length / 2 + 1) {
    RealBuffer in = alloc_real(length_);
    ComplexBuffer out = alloc_complex(spectrum_len_);
    {
      std::lock_guard lock(planner_mutex());
      r2c_ = fftw_plan_dft_r2c_1d(length_, in.get(), out.get(), FFTW_ESTIMATE);
      c2r_ = fftw_plan_dft_c2r_1d(length_, out.get(), in.get(), FFTW_ESTIMATE);
    }
    spectra_.resize(static_cast<std::size_t>(modes_) * modes_);
    for (int l = 0; l < modes_; ++l)
      for (int m = 0; m < modes_; ++m) {
        for (int n = 0; n < length_; ++n) {
          const Eigen::MatrixXd* b = kernel(n);
          in[n] = b ? (*b)(l, m) : 0.0;
        }
        fftw_execute_dft_r2c(r2c_, in.get(), out.get());
        auto& spec = spectra_[l * modes_ + m];
        spec.resize(spectrum_len_);
        for (int n = 0; n < spectrum_len_; ++n) spec[n] = {out[n][0], out[n][1]};
      }
  }

  ~Convolver() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
  }

  Convolver(const Convolver&) = delete;
  Convolver& operator=(const Convolver&) = delete;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    RealBuffer in = alloc_real(length_);
    ComplexBuffer transformed = alloc_complex(static_cast<std::size_t>(spectrum_len_) * modes_);
    for (int m = 0; m < modes_; ++m) {
      for (int j = 0; j < length_; ++j) in[j] = j < cells_ ? x[j * modes_ + m] : 0.0;
      fftw_execute_dft_r2c(r2c_, in.get(), transformed.get() + static_cast<std::size_t>(m) * spectrum_len_);
    }
    ComplexBuffer acc = alloc_complex(spectrum_len_);
    Eigen::VectorXd y(static_cast<Eigen::Index>(cells_) * modes_);
    const double scale = 1.0 / length_;
    for (int l = 0; l < modes_; ++l) {
      for (int n = 0; n < spectrum_len_; ++n) {
        std::complex<double> s = 0.0;
        for (int m = 0; m < modes_; ++m) {
          const fftw_complex& xm = transformed[static_cast<std::size_t>(m) * spectrum_len_ + n];
          s += spectra_[l * modes_ + m][n] * std::complex<double>(xm[0], xm[1]);
        }
        acc[n][0] = s.real();
        acc[n][1] = s.imag();
      }
      fftw_execute_dft_c2r(c2r_, acc.get(), in.get());
      for (int i = 0; i < cells_; ++i) y[i * modes_ + l] = scale * in[i];
    }
    return y;
  }

 private:
  int cells_;
  int modes_;
  int length_;
  int spectrum_len_;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;
  std::vector<std::vector<std::complex<double>>> spectra_;
};

HilbertOperator::HilbertOperator(SpacePtr space, HilbertKernel kernel, bool skewed,
                                 std::vector<Eigen::MatrixXd> blocks)
    : space_(std::move(space)), kernel_(kernel), skewed_(skewed), blocks_(std::move(blocks)) {
  const int n = space_->cells();
  const int nm = space_->modes();
  const bool periodic = kernel_ == HilbertKernel::periodic;
  const std::size_t expected = periodic ? n : 2 * n - 1;
  if (blocks_.size() != expected) throw std::invalid_argument("HilbertOperator: wrong number of offset blocks");

  if (periodic) {
    forward_ = std::make_unique<Convolver>(n, nm, n, [&](int idx) { return &blocks_[idx]; });
    std::vector<Eigen::MatrixXd> t(n);
    for (int d = 0; d < n; ++d) t[d] = blocks_[(n - d) % n].transpose();
    transpose_ = std::make_unique<Convolver>(n, nm, n, [&](int idx) { return &t[idx]; });
  } else {
    const int len = 2 * n;
    auto offset_of = [n, len](int idx) { return idx < n ? idx : idx - len; };
    forward_ = std::make_unique<Convolver>(n, nm, len, [&](int idx) -> const Eigen::MatrixXd* {
      const int d = offset_of(idx);
      return d <= -n ? nullptr : &blocks_[d + n - 1];
    });
    std::vector<Eigen::MatrixXd> t(2 * n - 1);
    for (int d = -(n - 1); d <= n - 1; ++d) t[d + n - 1] = blocks_[-d + n - 1].transpose();
    transpose_ = std::make_unique<Convolver>(n, nm, len, [&](int idx) -> const Eigen::MatrixXd* {
      const int d = offset_of(idx);
      return d <= -n ? nullptr : &t[d + n - 1];
    });
  }
}

HilbertOperator::~HilbertOperator() = default;
HilbertOperator::HilbertOperator(HilbertOperator&&) noexcept = default;
HilbertOperator& HilbertOperator::operator=(HilbertOperator&&) noexcept = default;

const Eigen::MatrixXd& HilbertOperator::block(int offset) const {
  const int n = space_->cells();
  if (kernel_ == HilbertKernel::periodic) return blocks_.at(((offset % n) + n) % n);
  if (offset <= -n || offset >= n) throw std::out_of_range("HilbertOperator::block: offset out of range");
  return blocks_[offset + n - 1];
}

Eigen::MatrixXd HilbertOperator::dense() const {
  const int n = space_->cells();
  const int nm = space_->modes();
  Eigen::MatrixXd k(n * nm, n * nm);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k.block(i * nm, j * nm, nm, nm) = block(i - j);
  return k;
}

Eigen::VectorXd HilbertOperator::apply_moments(const Eigen::VectorXd& q) const {
  if (q.size() != space_->dofs()) throw std::invalid_argument("HilbertOperator: vector size mismatch");
  return forward_->apply(q);
}

Eigen::VectorXd HilbertOperator::apply_transpose_moments(const Eigen::VectorXd& q) const {
  if (q.size() != space_->dofs()) throw std::invalid_argument("HilbertOperator: vector size mismatch");
  return transpose_->apply(q);
}

Field HilbertOperator::apply(const Field& q) const {
  require_same_space(*space_, q.space(), "apply_hilbert");
  Eigen::VectorXd p = apply_moments(q.coeffs());
  p.array() *= space_->inverse_mass_diagonal().array();
  return Field(space_, std::move(p));
}

void HilbertOperator::write_dump(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::int64_t header[3] = {space_->cells(), space_->degree(),
                                  (skewed_ ? 1 : 0) | (kernel_ == HilbertKernel::periodic ? 2 : 0)};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> k = dense();
  out.write(reinterpret_cast<const char*>(k.data()), static_cast<std::streamsize>(sizeof(double) * k.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

HilbertDump read_hilbert_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::int64_t header[3];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  HilbertDump d{header[0], header[1], header[2], {}};
  const Eigen::Index dim = header[0] * (header[1] + 1);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> k(dim, dim);
  in.read(reinterpret_cast<char*>(k.data()), static_cast<std::streamsize>(sizeof(double) * k.size()));
  if (!in) throw IoError("truncated Hilbert dump " + path.string());
  d.matrix = k;
  return d;
}

Eigen::MatrixXd reference_pair_integral(int degree, int offset) { return semi_analytic_pair(degree, offset); }

HilbertOperator assemble_hilbert(const SpacePtr& space, const QuadRule& outer_rule, const QuadRule& inner_rule,
                                 bool skew, HilbertKernel kernel, NearFieldRule near_field) {
  if (outer_rule.n == inner_rule.n) {
    throw std::invalid_argument("assemble_hilbert: outer and inner rules must differ so that x != y at all nodes");
  }
  const Mesh& mesh = space->mesh();
  const int n = space->cells();
  const int k = space->degree();
  const double h = mesh.h();
  if (!(h > 0.0)) throw std::invalid_argument("assemble_hilbert: degenerate cell width");
  const double scale = h / (2.0 * kPi);

  auto line_block = [&](int offset) -> Eigen::MatrixXd {
    if (near_field == NearFieldRule::semi_analytic && std::abs(offset) <= 1) {
      return scale * semi_analytic_pair(k, offset);
    }
    return scale * tensor_pair(k, 2.0 * offset, outer_rule, inner_rule);
  };

  std::vector<Eigen::MatrixXd> blocks;
  if (kernel == HilbertKernel::line) {
    blocks.reserve(2 * n - 1);
    for (int d = -(n - 1); d <= n - 1; ++d) blocks.push_back(line_block(d));
    if (skew) {
      std::vector<Eigen::MatrixXd> skewed(blocks.size());
      for (int d = -(n - 1); d <= n - 1; ++d)
        skewed[d + n - 1] = 0.5 * (blocks[d + n - 1] - blocks[-d + n - 1].transpose());
      blocks = std::move(skewed);
    }
  } else {
    const double period = mesh.length();
    blocks.reserve(n);
    for (int d = 0; d < n; ++d) {
      Eigen::MatrixXd b = line_block(d) + line_block(d - n) + line_block(d + n);
      b += periodic_remainder_block(k, d, h, period, outer_rule, inner_rule);
      blocks.push_back(std::move(b));
    }
    if (skew) {
      std::vector<Eigen::MatrixXd> skewed(n);
      for (int d = 0; d < n; ++d) skewed[d] = 0.5 * (blocks[d] - blocks[(n - d) % n].transpose());
      blocks = std::move(skewed);
    }
  }
  return HilbertOperator(space, kernel, skew, std::move(blocks));
}

HilbertOperator assemble_hilbert(const SpacePtr& space, const HilbertOptions& options) {
  return assemble_hilbert(space, gauss_legendre(options.outer_points), gauss_legendre(options.inner_points),
                          options.skew, options.kernel, options.near_field);
}

}  // namespace boldg
