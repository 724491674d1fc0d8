#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "fracfilter/errors.hpp"
#include "fracfilter/spectral.hpp"

namespace fracfilter {

/// Closed abscissa interval [lo, hi] used for peak search and integration.
template <typename Scalar = double>
struct PeakWindow {
    Scalar lo{760};
    Scalar hi{825};
};

namespace detail {

template <typename Scalar>
std::pair<Eigen::Index, Eigen::Index> window_range(const Signal1D<Scalar>& s, const PeakWindow<Scalar>& w,
                                                   const char* who) {
    validate(s);
    if (!(w.lo < w.hi)) throw InvalidArgument(std::string(who) + ": window requires lo < hi");
    const Scalar first = s.abscissa[0], last = s.abscissa[s.size() - 1];
    if (w.lo < first || w.hi > last)
        throw InvalidArgument(std::string(who) + ": window [" + std::to_string(w.lo) + ", " + std::to_string(w.hi) +
                              "] lies outside the abscissa range");
    Eigen::Index begin = -1, end = -1;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s.abscissa[i] >= w.lo && s.abscissa[i] <= w.hi) {
            if (begin < 0) begin = i;
            end = i + 1;
        }
    }
    if (begin < 0) throw InvalidArgument(std::string(who) + ": window contains no samples");
    return {begin, end};
}

} // namespace detail

/// Abscissa of the largest sample inside the window; ties resolve to the smallest abscissa.
template <typename Scalar>
Scalar peak_position(const Signal1D<Scalar>& s, const PeakWindow<Scalar>& w) {
    const auto [begin, end] = detail::window_range(s, w, "peak_position");
    Eigen::Index best = begin;
    for (Eigen::Index i = begin + 1; i < end; ++i)
        if (s.intensity[i] > s.intensity[best]) best = i;
    return s.abscissa[best];
}

/// Composite trapezoid over the samples inside the window.
template <typename Scalar>
Scalar peak_area(const Signal1D<Scalar>& s, const PeakWindow<Scalar>& w) {
    const auto [begin, end] = detail::window_range(s, w, "peak_area");
    Scalar area = 0;
    for (Eigen::Index i = begin + 1; i < end; ++i)
        area += Scalar(0.5) * (s.intensity[i] + s.intensity[i - 1]) * (s.abscissa[i] - s.abscissa[i - 1]);
    return area;
}

/// l2 norm of the forward differences scaled by the sample spacing.
template <typename Scalar>
Scalar gradient_norm_1d(const Signal1D<Scalar>& s) {
    validate(s);
    const Eigen::Index n = s.size();
    const Scalar dnu = s.spacing();
    return ((s.intensity.tail(n - 1) - s.intensity.head(n - 1)) / dnu).norm();
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar rmse(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidArgument("rmse: shape mismatch (" + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                              " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
    if (a.size() == 0) throw InvalidArgument("rmse: empty input");
    return std::sqrt((a - b).squaredNorm() / static_cast<typename DerivedA::Scalar>(a.size()));
}

template <typename Scalar>
Scalar rmse(const Signal1D<Scalar>& a, const Signal1D<Scalar>& b) {
    return rmse(a.intensity, b.intensity);
}

/// Population standard deviation of all pixels.
template <typename Derived>
typename Derived::Scalar contrast(const Eigen::MatrixBase<Derived>& plane) {
    using Scalar = typename Derived::Scalar;
    validate_plane(plane);
    const Scalar mean = plane.mean();
    return std::sqrt((plane.array() - mean).square().sum() / static_cast<Scalar>(plane.size()));
}

/// Mean forward-difference gradient magnitude; pixels beyond the last row and
/// column count as zero.
template <typename Derived>
typename Derived::Scalar sharpness(const Eigen::MatrixBase<Derived>& plane) {
    using Scalar = typename Derived::Scalar;
    validate_plane(plane);
    const Eigen::Index m = plane.rows(), n = plane.cols();
    Scalar total = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            const Scalar right = j + 1 < n ? plane(i, j + 1) : Scalar(0);
            const Scalar below = i + 1 < m ? plane(i + 1, j) : Scalar(0);
            total += std::hypot(right - plane(i, j), below - plane(i, j));
        }
    }
    return total / static_cast<Scalar>(m * n);
}

} // namespace fracfilter
