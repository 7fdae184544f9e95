#pragma once

// Real periodic fields on a uniform grid together with their discrete
// spectrum, and the Fourier multipliers used by the long-wave analysis:
// Hilbert transform, |D|^alpha, d/dX, the sliding average A_h and the
// mean-zero antiderivative.
//
// Conventions: X_i = i P / n, k_j = 2 pi q_j / P with q_j the signed index in
// FFT order, and
//     spectrum_j = (1/n) sum_i values_i exp(-i k_j X_i),
// so that the trigonometric interpolant is f(x) = sum_j spectrum_j exp(i k_j x).
// The unpaired q = -n/2 mode enters the interpolant as spectrum * cos(k x).

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace cmbo::spectral {

using Complex = std::complex<double>;

class PeriodicGrid {
 public:
  /// Throws ArgumentError unless period > 0 and n >= 8 is a power of two.
  PeriodicGrid(double period, std::size_t n);

  double period() const { return period_; }
  std::size_t size() const { return n_; }
  double spacing() const { return period_ / static_cast<double>(n_); }
  double node(std::size_t i) const { return spacing() * static_cast<double>(i); }

  /// Signed integer index of FFT slot j: j for j < n/2, j - n otherwise.
  long mode_index(std::size_t j) const;
  double wavenumber(std::size_t j) const;
  /// Slot of the unpaired -n/2 mode.
  std::size_t nyquist_slot() const { return n_ / 2; }

  std::vector<double> nodes() const;
  std::vector<double> wavenumbers() const;

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

 private:
  double period_;
  std::size_t n_;
};

/// Fourier multiplier as a function of the wavenumber.
using Multiplier = std::function<Complex(double)>;

class SpectralField {
 public:
  static SpectralField zeros(const PeriodicGrid& grid);
  static SpectralField from_values(const PeriodicGrid& grid, std::vector<double> values);
  /// Field whose samples are the real part of the inverse transform of `spectrum`.
  static SpectralField from_spectrum(const PeriodicGrid& grid, std::span<const Complex> spectrum);
  static SpectralField sample(const PeriodicGrid& grid, const std::function<double(double)>& f);

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const Complex> spectrum() const { return spectrum_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double mean() const { return spectrum_[0].real(); }
  double max_abs() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

 private:
  SpectralField(PeriodicGrid grid, std::vector<double> values, std::vector<Complex> spectrum);

  PeriodicGrid grid_;
  std::vector<double> values_;
  std::vector<Complex> spectrum_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Pointwise product of samples (no dealiasing).
SpectralField multiply(const SpectralField& a, const SpectralField& b);

/// Spectrum_j -> m(k_j) spectrum_j. Requires m(-k) = conj(m(k)) on the grid
/// (PreconditionError otherwise); the unpaired mode is dropped when m is not
/// real there.
SpectralField apply_multiplier(const SpectralField& f, const Multiplier& m);

/// Multiplier -i sgn(k); annihilates constants.
SpectralField hilbert(const SpectralField& f);
/// Multiplier |k|^alpha, with |0|^0 = 1.
SpectralField frac_deriv(const SpectralField& f, double alpha);
/// Multiplier -i sgn(k) |k|^alpha.
SpectralField hilbert_frac(const SpectralField& f, double alpha);
/// Multiplier i k.
SpectralField derivative(const SpectralField& f);

/// Multiplier of the sliding average A_h u(X) = (1/h) int_0^h u(X+z) dz.
Complex average_symbol(double k, double h);
/// A_h for h != 0 (negative h averages to the left).
SpectralField average_op(const SpectralField& f, double h);

/// v with dv/dX = -f and v(0) = 0. Requires |mean(f)| <= 1e-10.
SpectralField antiderivative_meanzero(const SpectralField& f);

/// Trigonometric interpolant at an arbitrary x (reduced mod P).
double eval_at(const SpectralField& f, double x);

/// Interpolant at offset + i P / count for i = 0..count-1, via folding the
/// spectrum onto `count` bins and one inverse DFT. Exact for any count >= 1.
std::vector<double> sample_uniform(const SpectralField& f, std::size_t count, double offset);

/// sqrt(P sum_j (1 + k_j^2)^s |spectrum_j|^2); s = 0 gives the L2 norm of the
/// interpolant over one period.
double sobolev_norm(const SpectralField& f, double s);
inline double l2_norm(const SpectralField& f) { return sobolev_norm(f, 0.0); }

// Serialization: CSV with header "X,value", and a little-endian binary dump
// [P: float64][n: uint64][values: n x float64].
void write_csv(const SpectralField& f, const std::filesystem::path& path);
SpectralField read_csv(const std::filesystem::path& path);
void write_binary(const SpectralField& f, const std::filesystem::path& path);
SpectralField read_binary(const std::filesystem::path& path);

}  // namespace cmbo::spectral
