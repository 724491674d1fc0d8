#pragma once

#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "fracfilter/errors.hpp"

namespace fracfilter {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

namespace dft {

// Transform conventions: forward is unnormalized, X[k] = sum_n x[n] e^{-2 pi i k n / N};
// inverse carries the 1/N factor. No sampling-interval factor is applied in
// either direction.

template <typename Derived>
ComplexVector<typename Eigen::NumTraits<typename Derived::Scalar>::Real>
forward(const Eigen::MatrixBase<Derived>& x) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    if (x.size() == 0) throw InvalidArgument("dft::forward: empty input");
    ComplexVector<Real> in = x.template cast<std::complex<Real>>();
    ComplexVector<Real> out(in.size());
    Eigen::FFT<Real> fft;
    fft.fwd(out, in);
    return out;
}

template <typename Derived>
ComplexVector<typename Eigen::NumTraits<typename Derived::Scalar>::Real>
inverse(const Eigen::MatrixBase<Derived>& spectrum) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    if (spectrum.size() == 0) throw InvalidArgument("dft::inverse: empty input");
    ComplexVector<Real> in = spectrum.template cast<std::complex<Real>>();
    ComplexVector<Real> out(in.size());
    Eigen::FFT<Real> fft;
    fft.inv(out, in);
    return out;
}

/// 2D forward transform: 1D transforms down every column, then along every row.
template <typename Derived>
ComplexMatrix<typename Eigen::NumTraits<typename Derived::Scalar>::Real>
forward_2d(const Eigen::MatrixBase<Derived>& x) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    if (x.size() == 0) throw InvalidArgument("dft::forward_2d: empty input");
    ComplexMatrix<Real> work = x.template cast<std::complex<Real>>();
    Eigen::FFT<Real> fft;
    ComplexVector<Real> in, out;
    for (Eigen::Index c = 0; c < work.cols(); ++c) {
        in = work.col(c);
        fft.fwd(out, in);
        work.col(c) = out;
    }
    for (Eigen::Index r = 0; r < work.rows(); ++r) {
        in = work.row(r).transpose();
        fft.fwd(out, in);
        work.row(r) = out.transpose();
    }
    return work;
}

template <typename Derived>
ComplexMatrix<typename Eigen::NumTraits<typename Derived::Scalar>::Real>
inverse_2d(const Eigen::MatrixBase<Derived>& spectrum) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    if (spectrum.size() == 0) throw InvalidArgument("dft::inverse_2d: empty input");
    ComplexMatrix<Real> work = spectrum.template cast<std::complex<Real>>();
    Eigen::FFT<Real> fft;
    ComplexVector<Real> in, out;
    for (Eigen::Index r = 0; r < work.rows(); ++r) {
        in = work.row(r).transpose();
        fft.inv(out, in);
        work.row(r) = out.transpose();
    }
    for (Eigen::Index c = 0; c < work.cols(); ++c) {
        in = work.col(c);
        fft.inv(out, in);
        work.col(c) = out;
    }
    return work;
}

// Centered layout: after fftshift the zero-frequency bin sits at index floor(N/2),
// for both even and odd N. ifftshift is its exact inverse.

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> fftshift(const Eigen::MatrixBase<Derived>& x) {
    const Eigen::Index n = x.size();
    const Eigen::Index half = n / 2;
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(n);
    for (Eigen::Index k = 0; k < n; ++k) out[k] = x[(k - half + n) % n];
    return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> ifftshift(const Eigen::MatrixBase<Derived>& x) {
    const Eigen::Index n = x.size();
    const Eigen::Index half = n / 2;
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(n);
    for (Eigen::Index k = 0; k < n; ++k) out[(k - half + n) % n] = x[k];
    return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
fftshift_2d(const Eigen::MatrixBase<Derived>& x) {
    const Eigen::Index m = x.rows(), n = x.cols();
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(m, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < m; ++r)
            out(r, c) = x((r - m / 2 + m) % m, (c - n / 2 + n) % n);
    return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
ifftshift_2d(const Eigen::MatrixBase<Derived>& x) {
    const Eigen::Index m = x.rows(), n = x.cols();
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(m, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < m; ++r)
            out((r - m / 2 + m) % m, (c - n / 2 + n) % n) = x(r, c);
    return out;
}

} // namespace dft
} // namespace fracfilter
