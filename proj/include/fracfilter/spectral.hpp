#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "fracfilter/dft.hpp"
#include "fracfilter/errors.hpp"

namespace fracfilter {

template <typename Scalar>
using ImagePlane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Uniformly sampled real spectrum: intensity[i] measured at abscissa[i].
template <typename Scalar = double>
struct Signal1D {
    Vector<Scalar> abscissa;
    Vector<Scalar> intensity;

    [[nodiscard]] Eigen::Index size() const { return intensity.size(); }

    /// Mean sample spacing; equal to every individual spacing for a valid signal.
    [[nodiscard]] Scalar spacing() const {
        return (abscissa[abscissa.size() - 1] - abscissa[0]) / static_cast<Scalar>(abscissa.size() - 1);
    }
};

template <typename Scalar>
Signal1D<Scalar> uniform_signal(Scalar start, Scalar step, Vector<Scalar> intensity) {
    Signal1D<Scalar> s;
    s.abscissa.resize(intensity.size());
    for (Eigen::Index i = 0; i < intensity.size(); ++i) s.abscissa[i] = start + step * static_cast<Scalar>(i);
    s.intensity = std::move(intensity);
    return s;
}

template <typename Scalar = double>
struct FilterParams {
    Scalar alpha{1};   // fractional order, > 0
    Scalar lambda{0};  // regularization weight, >= 0
};

template <typename Scalar = double>
struct RgbImage {
    ImagePlane<Scalar> r, g, b;
};

/// Angular frequencies ordered to match a shifted (centered) DFT layout.
template <typename Scalar = double>
struct FrequencyGrid {
    Vector<Scalar> omega;
    Eigen::Index n{0};
    Scalar delta_omega{0};

    [[nodiscard]] Eigen::Index zero_index() const { return n / 2; }
};

/// Per-call numerical diagnostics of a filtering pass.
template <typename Scalar = double>
struct FilterDiagnostics {
    Scalar imaginary_residue{0};  // max |Im| of the inverse transform
    Scalar input_max_abs{0};
};

template <typename Scalar>
constexpr Scalar imaginary_residue_tolerance() {
    if constexpr (std::numeric_limits<Scalar>::digits >= std::numeric_limits<double>::digits)
        return Scalar(1e-9);
    else
        return Scalar(1e-4);
}

// ---------------------------------------------------------------------------
// Validation

template <typename Scalar>
void validate(const FilterParams<Scalar>& p) {
    if (!(std::isfinite(p.alpha) && p.alpha > 0))
        throw InvalidArgument("filter params: alpha must be finite and > 0, got " + std::to_string(p.alpha));
    if (!(std::isfinite(p.lambda) && p.lambda >= 0))
        throw InvalidArgument("filter params: lambda must be finite and >= 0, got " + std::to_string(p.lambda));
}

template <typename Scalar>
void validate(const Signal1D<Scalar>& s) {
    const Eigen::Index n = s.intensity.size();
    if (n < 2) throw InvalidArgument("signal: need at least 2 samples");
    if (s.abscissa.size() != n) throw InvalidArgument("signal: abscissa and intensity lengths differ");
    if (!s.abscissa.allFinite()) throw InvalidArgument("signal: non-finite abscissa");
    if (!s.intensity.allFinite()) throw InvalidArgument("signal: non-finite intensity");
    const Scalar step = s.spacing();
    if (!(step > 0)) throw InvalidArgument("signal: abscissa must be strictly increasing");
    const Scalar tol = Scalar(1e-9) * step;
    for (Eigen::Index i = 1; i < n; ++i) {
        if (std::abs((s.abscissa[i] - s.abscissa[i - 1]) - step) > tol)
            throw InvalidArgument("signal: non-uniform abscissa spacing at sample " + std::to_string(i));
    }
}

template <typename Derived>
void validate_plane(const Eigen::MatrixBase<Derived>& plane) {
    if (plane.rows() < 2 || plane.cols() < 2) throw InvalidArgument("image plane: dimensions must be at least 2x2");
    if (!plane.allFinite()) throw InvalidArgument("image plane: non-finite pixel value");
}

template <typename Scalar>
void validate(const RgbImage<Scalar>& img) {
    validate_plane(img.r);
    validate_plane(img.g);
    validate_plane(img.b);
    if (img.g.rows() != img.r.rows() || img.g.cols() != img.r.cols() || img.b.rows() != img.r.rows() ||
        img.b.cols() != img.r.cols())
        throw InvalidArgument("rgb image: channel dimensions differ");
}

// ---------------------------------------------------------------------------
// Frequency grid and transfer function

template <typename Scalar = double>
FrequencyGrid<Scalar> frequency_grid(Eigen::Index n, Scalar dt) {
    if (n < 2) throw InvalidArgument("frequency_grid: n must be >= 2");
    if (!(dt > 0) || !std::isfinite(dt)) throw InvalidArgument("frequency_grid: dt must be finite and > 0");
    FrequencyGrid<Scalar> grid;
    grid.n = n;
    grid.delta_omega = Scalar(2) * std::numbers::pi_v<Scalar> / (static_cast<Scalar>(n) * dt);
    grid.omega.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) grid.omega[k] = grid.delta_omega * static_cast<Scalar>(k - n / 2);
    return grid;
}

/// |omega|^(2 alpha) as exp(2 alpha ln|omega|); zero frequency maps to 0.
template <typename Scalar>
Scalar fractional_symbol(Scalar abs_omega, Scalar alpha) {
    if (abs_omega == Scalar(0)) return Scalar(0);
    return std::exp(Scalar(2) * alpha * std::log(abs_omega));
}

/// Gain 1 / (1 + lambda |omega|^(2 alpha)); exactly 1 at omega = 0 or lambda = 0.
template <typename Scalar>
Scalar transfer_gain_1d(Scalar omega, const FilterParams<Scalar>& params) {
    const Scalar a = std::abs(omega);
    if (a == Scalar(0) || params.lambda == Scalar(0)) return Scalar(1);
    return Scalar(1) / (Scalar(1) + params.lambda * fractional_symbol(a, params.alpha));
}

/// Gain with |omega| the Euclidean norm of (omega1, omega2). (omega1^2 + omega2^2)^alpha
/// is evaluated directly from the squared norm.
template <typename Scalar>
Scalar transfer_gain_2d(Scalar omega1, Scalar omega2, const FilterParams<Scalar>& params) {
    const Scalar sq = omega1 * omega1 + omega2 * omega2;
    if (sq == Scalar(0) || params.lambda == Scalar(0)) return Scalar(1);
    return Scalar(1) / (Scalar(1) + params.lambda * std::exp(params.alpha * std::log(sq)));
}

template <typename Scalar>
Vector<Scalar> transfer_gains(const FrequencyGrid<Scalar>& grid, const FilterParams<Scalar>& params) {
    Vector<Scalar> h(grid.n);
    for (Eigen::Index k = 0; k < grid.n; ++k) h[k] = transfer_gain_1d(grid.omega[k], params);
    return h;
}

// ---------------------------------------------------------------------------
// Filtering pipelines

namespace detail {

template <typename Scalar, typename Derived>
void check_residue(const Eigen::MatrixBase<Derived>& restored, Scalar input_max_abs, const char* who,
                   FilterDiagnostics<Scalar>* diagnostics) {
    const Scalar residue = restored.imag().cwiseAbs().maxCoeff();
    if (diagnostics) {
        diagnostics->imaginary_residue = residue;
        diagnostics->input_max_abs = input_max_abs;
    }
    if (!std::isfinite(residue) || !restored.real().allFinite())
        throw NumericalError(std::string(who) + ": non-finite values in filtered output");
    if (residue > imaginary_residue_tolerance<Scalar>() * input_max_abs)
        throw NumericalError(std::string(who) + ": imaginary residue " + std::to_string(residue) +
                             " exceeds bound relative to input max-abs " + std::to_string(input_max_abs));
}

} // namespace detail

/// Filter raw samples taken at spacing dt: shift the spectrum, apply the gain
/// on the centered grid, unshift, invert, and keep the real part.
template <typename Derived>
Vector<typename Derived::Scalar> filter_samples(const Eigen::MatrixBase<Derived>& samples,
                                                typename Derived::Scalar dt,
                                                const FilterParams<typename Derived::Scalar>& params,
                                                FilterDiagnostics<typename Derived::Scalar>* diagnostics = nullptr) {
    using Scalar = typename Derived::Scalar;
    validate(params);
    const auto grid = frequency_grid<Scalar>(samples.size(), dt);
    ComplexVector<Scalar> centered = dft::fftshift(dft::forward(samples));
    centered.array() *= transfer_gains(grid, params).array().template cast<std::complex<Scalar>>();
    const ComplexVector<Scalar> restored = dft::inverse(dft::ifftshift(centered));
    detail::check_residue(restored, samples.cwiseAbs().maxCoeff(), "filter_1d", diagnostics);
    return restored.real();
}

template <typename Scalar>
Signal1D<Scalar> filter_1d(const Signal1D<Scalar>& signal, const FilterParams<Scalar>& params,
                           FilterDiagnostics<Scalar>* diagnostics = nullptr) {
    validate(signal);
    Signal1D<Scalar> out;
    out.abscissa = signal.abscissa;
    out.intensity = filter_samples(signal.intensity, signal.spacing(), params, diagnostics);
    return out;
}

/// Gain table over a centered M x N grid with unit pixel spacing on both axes.
template <typename Scalar>
ImagePlane<Scalar> transfer_gains_2d(Eigen::Index rows, Eigen::Index cols, const FilterParams<Scalar>& params) {
    const auto row_grid = frequency_grid<Scalar>(rows, Scalar(1));
    const auto col_grid = frequency_grid<Scalar>(cols, Scalar(1));
    ImagePlane<Scalar> h(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) h(r, c) = transfer_gain_2d(row_grid.omega[r], col_grid.omega[c], params);
    return h;
}

template <typename Derived>
ImagePlane<typename Derived::Scalar> filter_2d(const Eigen::MatrixBase<Derived>& plane,
                                               const FilterParams<typename Derived::Scalar>& params,
                                               FilterDiagnostics<typename Derived::Scalar>* diagnostics = nullptr) {
    using Scalar = typename Derived::Scalar;
    validate_plane(plane);
    validate(params);
    ComplexMatrix<Scalar> centered = dft::fftshift_2d(dft::forward_2d(plane));
    centered.array() *=
        transfer_gains_2d<Scalar>(plane.rows(), plane.cols(), params).array().template cast<std::complex<Scalar>>();
    const ComplexMatrix<Scalar> restored = dft::inverse_2d(dft::ifftshift_2d(centered));
    detail::check_residue(restored, plane.cwiseAbs().maxCoeff(), "filter_2d", diagnostics);
    return restored.real();
}

/// Channels are filtered independently and never mixed.
template <typename Scalar>
RgbImage<Scalar> filter_rgb(const RgbImage<Scalar>& image, const FilterParams<Scalar>& params) {
    validate(image);
    return {filter_2d(image.r, params), filter_2d(image.g, params), filter_2d(image.b, params)};
}

} // namespace fracfilter
