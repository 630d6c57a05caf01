#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace gossip {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class ConvolutionBackend { direct, fft };

/// Full linear convolution, out[k] = sum_j a[j] b[k-j], in a fixed summation order.
template <typename DerivedA, typename DerivedB>
VectorX<typename DerivedA::Scalar> convolve_direct(const Eigen::MatrixBase<DerivedA>& a,
                                                   const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Eigen::Index na = a.size(), nb = b.size();
  if (na == 0 || nb == 0) return VectorX<Scalar>();
  VectorX<Scalar> out = VectorX<Scalar>::Zero(na + nb - 1);
  for (Eigen::Index i = 0; i < na; ++i) {
    const Scalar ai = a(i);
    if (ai == Scalar(0)) continue;
    out.segment(i, nb) += ai * b;
  }
  return out;
}

/// Full linear convolution through a zero-padded real FFT.
template <typename DerivedA, typename DerivedB>
VectorX<typename DerivedA::Scalar> convolve_fft(const Eigen::MatrixBase<DerivedA>& a,
                                                const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Eigen::Index na = a.size(), nb = b.size();
  if (na == 0 || nb == 0) return VectorX<Scalar>();
  const Eigen::Index out_size = na + nb - 1;
  Eigen::Index padded = 1;
  while (padded < out_size) padded *= 2;

  std::vector<Scalar> pa(padded, Scalar(0)), pb(padded, Scalar(0));
  for (Eigen::Index i = 0; i < na; ++i) pa[i] = a(i);
  for (Eigen::Index i = 0; i < nb; ++i) pb[i] = b(i);

  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> fa, fb;
  fft.fwd(fa, pa);
  fft.fwd(fb, pb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<Scalar> back;
  fft.inv(back, fa);

  VectorX<Scalar> out(out_size);
  for (Eigen::Index k = 0; k < out_size; ++k) out(k) = back[k];
  return out;
}

template <typename DerivedA, typename DerivedB>
VectorX<typename DerivedA::Scalar> convolve(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                            ConvolutionBackend backend) {
  return backend == ConvolutionBackend::direct ? convolve_direct(a, b) : convolve_fft(a, b);
}

}  // namespace gossip
