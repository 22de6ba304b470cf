#ifndef GRIDILC_BUTTERWORTH_HPP
#define GRIDILC_BUTTERWORTH_HPP

#include "gridilc/types.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace gridilc {

/// Transfer function b(z)/a(z) in powers of z^-1, a[0] == 1.
template <typename Scalar>
struct DigitalFilter {
  std::vector<Scalar> b;
  std::vector<Scalar> a;
};

/// Digital Butterworth low-pass via the bilinear transform.
///
/// `cutoff` is the -3 dB frequency as a fraction of Nyquist, in (0, 1).
/// Coefficients agree with the usual `butter(order, cutoff)` routines.
template <typename Scalar = double>
DigitalFilter<Scalar> butterworth_lowpass(int order, Scalar cutoff) {
  using Complex = std::complex<Scalar>;
  if (order < 1) throw ConfigError("butterworth: order must be >= 1");
  if (!(cutoff > 0 && cutoff < 1)) throw ConfigError("butterworth: cutoff must lie in (0, 1)");

  const Scalar pi = std::numbers::pi_v<Scalar>;
  // Pre-warped analog cutoff for a sampling rate of 2 (Nyquist = 1).
  const Scalar fs = 2;
  const Scalar warped = 2 * fs * std::tan(pi * cutoff / fs);

  std::vector<Complex> poles;
  poles.reserve(order);
  for (int k = 0; k < order; ++k) {
    const Scalar theta = pi * Scalar(2 * k + order + 1) / Scalar(2 * order);
    poles.push_back(warped * std::polar(Scalar(1), theta));
  }

  // Bilinear map s -> z; all analog zeros sit at infinity and land on z = -1.
  const Scalar fs2 = 2 * fs;
  Complex gain = std::pow(Complex(warped), order);
  std::vector<Complex> zpoles;
  zpoles.reserve(order);
  for (const Complex& p : poles) {
    gain /= (fs2 - p);
    zpoles.push_back((fs2 + p) / (fs2 - p));
  }
  for (const Complex& p : zpoles) {
    if (std::abs(p) >= Scalar(1)) throw NumericalError("butterworth: unstable design");
  }

  auto expand = [order](const std::vector<Complex>& roots) {
    std::vector<Complex> c(order + 1, Complex(0));
    c[0] = 1;
    for (const Complex& r : roots) {
      for (int i = order; i >= 1; --i) c[i] -= r * c[i - 1];
    }
    return c;
  };
  const std::vector<Complex> num = expand(std::vector<Complex>(order, Complex(-1)));
  const std::vector<Complex> den = expand(zpoles);

  DigitalFilter<Scalar> f;
  f.b.resize(order + 1);
  f.a.resize(order + 1);
  for (int i = 0; i <= order; ++i) {
    f.b[i] = (gain * num[i]).real();
    f.a[i] = den[i].real();
  }
  return f;
}

/// Frequency response magnitude at normalized frequency w (fraction of Nyquist).
template <typename Scalar>
Scalar magnitude_response(const DigitalFilter<Scalar>& f, Scalar w) {
  using Complex = std::complex<Scalar>;
  const Complex zinv = std::polar(Scalar(1), -std::numbers::pi_v<Scalar> * w);
  Complex num(0), den(0), zk(1);
  for (std::size_t k = 0; k < std::max(f.b.size(), f.a.size()); ++k) {
    if (k < f.b.size()) num += f.b[k] * zk;
    if (k < f.a.size()) den += f.a[k] * zk;
    zk *= zinv;
  }
  return std::abs(num / den);
}

namespace detail {

// Direct form II transposed, with initial delay-line state `z`.
template <typename Scalar>
std::vector<Scalar> lfilter(const DigitalFilter<Scalar>& f, const std::vector<Scalar>& x,
                            std::vector<Scalar> z) {
  const std::size_t n = f.a.size() - 1;
  std::vector<Scalar> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Scalar out = f.b[0] * x[i] + (n > 0 ? z[0] : Scalar(0));
    for (std::size_t k = 0; k + 1 < n; ++k) z[k] = f.b[k + 1] * x[i] + z[k + 1] - f.a[k + 1] * out;
    if (n > 0) z[n - 1] = f.b[n] * x[i] - f.a[n] * out;
    y[i] = out;
  }
  return y;
}

// Delay-line state of a unit step response in steady state.
template <typename Scalar>
std::vector<Scalar> lfilter_zi(const DigitalFilter<Scalar>& f) {
  const int n = static_cast<int>(f.a.size()) - 1;
  if (n == 0) return {};
  MatX<Scalar> lhs = MatX<Scalar>::Identity(n, n);
  VecX<Scalar> rhs(n);
  for (int i = 0; i < n; ++i) {
    lhs(i, 0) += f.a[i + 1];
    if (i + 1 < n) lhs(i, i + 1) -= Scalar(1);
    rhs[i] = f.b[i + 1] - f.a[i + 1] * f.b[0];
  }
  const VecX<Scalar> zi = lhs.fullPivLu().solve(rhs);
  return {zi.data(), zi.data() + n};
}

}  // namespace detail

/// Zero-phase forward-backward filtering with even (mirror) extension of
/// length 3 * max(len(a), len(b)) at both ends and steady-state initial
/// conditions, matching the conventional `filtfilt`.
template <typename Scalar>
std::vector<Scalar> filtfilt(const DigitalFilter<Scalar>& f, const std::vector<Scalar>& x) {
  const std::size_t pad = 3 * std::max(f.a.size(), f.b.size());
  if (x.size() <= pad) throw ConfigError("filtfilt: signal shorter than the padding length");

  std::vector<Scalar> ext;
  ext.reserve(x.size() + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(x[x.size() - 1 - i]);

  const std::vector<Scalar> zi = detail::lfilter_zi(f);
  auto scaled = [&zi](Scalar s) {
    std::vector<Scalar> z(zi);
    for (Scalar& v : z) v *= s;
    return z;
  };

  std::vector<Scalar> fwd = detail::lfilter(f, ext, scaled(ext.front()));
  std::reverse(fwd.begin(), fwd.end());
  std::vector<Scalar> bwd = detail::lfilter(f, fwd, scaled(fwd.front()));
  std::reverse(bwd.begin(), bwd.end());
  return {bwd.begin() + static_cast<std::ptrdiff_t>(pad), bwd.end() - static_cast<std::ptrdiff_t>(pad)};
}

}  // namespace gridilc

#endif  // GRIDILC_BUTTERWORTH_HPP
