#include "cmbo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cmbo/error.hpp"
#include "fft.hpp"

namespace cmbo::spectral {

namespace {

std::vector<Complex> forward(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<Complex> in(values.begin(), values.end());
  std::vector<Complex> out(n);
  detail::dft_forward(in, out);
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= inv;
  return out;
}

std::vector<double> backward_real(std::span<const Complex> spectrum) {
  std::vector<Complex> out(spectrum.size());
  detail::dft_backward(spectrum, out);
  std::vector<double> values(out.size());
  std::transform(out.begin(), out.end(), values.begin(), [](Complex c) { return c.real(); });
  return values;
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw ArgumentError("spectral fields live on different grids");
}

}  // namespace

PeriodicGrid::PeriodicGrid(double period, std::size_t n) : period_(period), n_(n) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ArgumentError("PeriodicGrid: period must be positive and finite");
  }
  if (n < 8 || (n & (n - 1)) != 0) {
    throw ArgumentError("PeriodicGrid: n must be a power of two >= 8, got " + std::to_string(n));
  }
}

long PeriodicGrid::mode_index(std::size_t j) const {
  const auto sj = static_cast<long>(j);
  const auto sn = static_cast<long>(n_);
  return j < n_ / 2 ? sj : sj - sn;
}

double PeriodicGrid::wavenumber(std::size_t j) const {
  return 2.0 * std::numbers::pi / period_ * static_cast<double>(mode_index(j));
}

std::vector<double> PeriodicGrid::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
  return x;
}

std::vector<double> PeriodicGrid::wavenumbers() const {
  std::vector<double> k(n_);
  for (std::size_t j = 0; j < n_; ++j) k[j] = wavenumber(j);
  return k;
}

SpectralField::SpectralField(PeriodicGrid grid, std::vector<double> values,
                             std::vector<Complex> spectrum)
    : grid_(grid), values_(std::move(values)), spectrum_(std::move(spectrum)) {}

SpectralField SpectralField::zeros(const PeriodicGrid& grid) {
  return SpectralField(grid, std::vector<double>(grid.size(), 0.0),
                       std::vector<Complex>(grid.size(), Complex{}));
}

SpectralField SpectralField::from_values(const PeriodicGrid& grid, std::vector<double> values) {
  if (values.size() != grid.size()) {
    throw ArgumentError("SpectralField: value count does not match grid size");
  }
  auto spectrum = forward(values);
  return SpectralField(grid, std::move(values), std::move(spectrum));
}

SpectralField SpectralField::from_spectrum(const PeriodicGrid& grid,
                                           std::span<const Complex> spectrum) {
  if (spectrum.size() != grid.size()) {
    throw ArgumentError("SpectralField: spectrum length does not match grid size");
  }
  return from_values(grid, backward_real(spectrum));
}

SpectralField SpectralField::sample(const PeriodicGrid& grid,
                                    const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
  return from_values(grid, std::move(v));
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += other.values_[i];
    spectrum_[i] += other.spectrum_[i];
  }
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] -= other.values_[i];
    spectrum_[i] -= other.spectrum_[i];
  }
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  for (auto& c : spectrum_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

SpectralField multiply(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
  return SpectralField::from_values(a.grid(), std::move(v));
}

SpectralField apply_multiplier(const SpectralField& f, const Multiplier& m) {
  const auto& grid = f.grid();
  const std::size_t n = grid.size();
  std::vector<Complex> symbol(n);
  for (std::size_t j = 0; j < n; ++j) symbol[j] = m(grid.wavenumber(j));

  auto mismatch = [](Complex a, Complex b) {
    return std::abs(a - b) > 1e-12 * (1.0 + std::abs(a) + std::abs(b));
  };
  if (mismatch(symbol[0], std::conj(symbol[0]))) {
    throw PreconditionError("apply_multiplier: multiplier must be real at k = 0");
  }
  for (std::size_t j = 1; j < n / 2; ++j) {
    if (mismatch(symbol[n - j], std::conj(symbol[j]))) {
      throw PreconditionError("apply_multiplier: multiplier violates m(-k) = conj(m(k))");
    }
  }

  std::vector<Complex> out(n);
  const auto spec = f.spectrum();
  for (std::size_t j = 0; j < n; ++j) out[j] = symbol[j] * spec[j];
  const std::size_t ny = grid.nyquist_slot();
  if (symbol[ny].imag() != 0.0) {
    out[ny] = Complex{};
  } else {
    out[ny] = symbol[ny].real() * spec[ny];
  }
  return SpectralField::from_spectrum(grid, out);
}

SpectralField hilbert(const SpectralField& f) {
  return apply_multiplier(f, [](double k) {
    return k > 0.0 ? Complex(0.0, -1.0) : (k < 0.0 ? Complex(0.0, 1.0) : Complex{});
  });
}

SpectralField frac_deriv(const SpectralField& f, double alpha) {
  if (!(alpha >= 0.0)) throw ArgumentError("frac_deriv: alpha must be nonnegative");
  return apply_multiplier(f, [alpha](double k) {
    if (k == 0.0) return Complex(alpha == 0.0 ? 1.0 : 0.0, 0.0);
    return Complex(std::pow(std::abs(k), alpha), 0.0);
  });
}

SpectralField hilbert_frac(const SpectralField& f, double alpha) {
  if (!(alpha >= 0.0)) throw ArgumentError("hilbert_frac: alpha must be nonnegative");
  return apply_multiplier(f, [alpha](double k) {
    if (k == 0.0) return Complex{};
    const double mag = std::pow(std::abs(k), alpha);
    return Complex(0.0, k > 0.0 ? -mag : mag);
  });
}

SpectralField derivative(const SpectralField& f) {
  return apply_multiplier(f, [](double k) { return Complex(0.0, k); });
}

Complex average_symbol(double k, double h) {
  const double theta = k * h;
  if (std::abs(theta) < 1e-4) {
    // (e^{i t} - 1) / (i t) = 1 + i t/2 - t^2/6 - i t^3/24 + ...
    const double t2 = theta * theta;
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0, theta / 2.0 - theta * t2 / 24.0};
  }
  return {std::sin(theta) / theta, (1.0 - std::cos(theta)) / theta};
}

SpectralField average_op(const SpectralField& f, double h) {
  if (h == 0.0 || !std::isfinite(h)) throw ArgumentError("average_op: h must be nonzero");
  return apply_multiplier(f, [h](double k) { return average_symbol(k, h); });
}

SpectralField antiderivative_meanzero(const SpectralField& f) {
  if (std::abs(f.mean()) > 1e-10) {
    throw PreconditionError("antiderivative_meanzero: input mean " + std::to_string(f.mean()) +
                            " is not zero; the antiderivative would not be periodic");
  }
  const auto& grid = f.grid();
  const std::size_t n = grid.size();
  const auto spec = f.spectrum();
  std::vector<Complex> out(n);
  Complex at_origin{};
  for (std::size_t j = 1; j < n; ++j) {
    if (j == grid.nyquist_slot()) continue;
    out[j] = -spec[j] / Complex(0.0, grid.wavenumber(j));
    at_origin += out[j];
  }
  out[0] = -at_origin.real();
  return SpectralField::from_spectrum(grid, out);
}

double eval_at(const SpectralField& f, double x) {
  const auto& grid = f.grid();
  const std::size_t n = grid.size();
  const auto spec = f.spectrum();
  const double base = 2.0 * std::numbers::pi / grid.period();
  const double xr = std::fmod(x, grid.period());
  double sum = spec[0].real();
  for (std::size_t j = 1; j < n / 2; ++j) {
    // paired modes q and -q combine to 2 Re(c_q e^{i k x})
    const double phase = base * static_cast<double>(j) * xr;
    sum += 2.0 * (spec[j].real() * std::cos(phase) - spec[j].imag() * std::sin(phase));
  }
  const double ny_phase = base * static_cast<double>(n / 2) * xr;
  sum += spec[grid.nyquist_slot()].real() * std::cos(ny_phase);
  return sum;
}

std::vector<double> sample_uniform(const SpectralField& f, std::size_t count, double offset) {
  if (count == 0) throw ArgumentError("sample_uniform: count must be positive");
  const auto& grid = f.grid();
  const std::size_t n = grid.size();
  const auto spec = f.spectrum();
  const double base = 2.0 * std::numbers::pi / grid.period();
  const auto m = static_cast<long>(count);
  std::vector<Complex> bins(count);
  auto deposit = [&](long q, Complex c) {
    const double phase = base * static_cast<double>(q) * offset;
    const long slot = ((q % m) + m) % m;
    bins[static_cast<std::size_t>(slot)] += c * std::polar(1.0, phase);
  };
  for (std::size_t j = 0; j < n; ++j) {
    if (j == grid.nyquist_slot()) {
      const long q = static_cast<long>(n / 2);
      deposit(q, 0.5 * spec[j]);
      deposit(-q, 0.5 * spec[j]);
    } else {
      deposit(grid.mode_index(j), spec[j]);
    }
  }
  std::vector<Complex> out(count);
  detail::dft_backward(bins, out);
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = out[i].real();
  return values;
}

double sobolev_norm(const SpectralField& f, double s) {
  if (!(s >= 0.0)) throw ArgumentError("sobolev_norm: s must be nonnegative");
  const auto& grid = f.grid();
  const auto spec = f.spectrum();
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double k = grid.wavenumber(j);
    double w = std::pow(1.0 + k * k, s) * std::norm(spec[j]);
    if (j == grid.nyquist_slot()) w *= 0.5;
    sum += w;
  }
  return std::sqrt(grid.period() * sum);
}

}  // namespace cmbo::spectral
