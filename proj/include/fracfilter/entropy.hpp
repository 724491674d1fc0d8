#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "fracfilter/errors.hpp"
#include "fracfilter/spectral.hpp"

namespace fracfilter {

template <typename Scalar = double>
struct ProbabilityDistribution {
    Vector<Scalar> p;
};

/// Spectrum intensities as a distribution: shift by the minimum, square, normalize.
/// A flat input (nothing left after the shift) yields the uniform distribution.
template <typename Derived>
ProbabilityDistribution<typename Derived::Scalar> intensity_probabilities(const Eigen::MatrixBase<Derived>& intensity) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = intensity.size();
    if (n < 2) throw InvalidArgument("spectrum_probabilities: need at least 2 samples");
    if (!intensity.allFinite()) throw InvalidArgument("spectrum_probabilities: non-finite intensity");
    Vector<Scalar> squared = (intensity.array() - intensity.minCoeff()).square().matrix();
    const Scalar total = squared.sum();
    if (!(total > 0)) return {Vector<Scalar>::Constant(n, Scalar(1) / static_cast<Scalar>(n))};
    if (!std::isfinite(total)) throw NumericalError("spectrum_probabilities: intensity energy overflows");
    return {squared / total};
}

template <typename Scalar>
ProbabilityDistribution<Scalar> spectrum_probabilities(const Signal1D<Scalar>& signal) {
    return intensity_probabilities(signal.intensity);
}

/// Shannon entropy, base 2 by default; zero-probability outcomes contribute nothing.
template <typename Scalar>
Scalar shannon_entropy(const ProbabilityDistribution<Scalar>& dist, Scalar base = Scalar(2)) {
    Scalar h = 0;
    for (Eigen::Index i = 0; i < dist.p.size(); ++i) {
        const Scalar pi = dist.p[i];
        if (pi > 0) h -= pi * std::log(pi);
    }
    return std::max(Scalar(0), h / std::log(base));
}

enum class ImageEntropyMode {
    Histogram,  // 256-level intensity histogram per channel
    PixelMass,  // P_k = I_k / sum I over pixels (intensities clamped to >= 0)
};

inline constexpr int kHistogramLevels = 256;

/// Quantize a [0, 1] intensity to 0..255; out-of-range values clamp.
template <typename Scalar>
int quantize_level(Scalar v) {
    const double scaled = std::round(static_cast<double>(v) * (kHistogramLevels - 1));
    return static_cast<int>(std::clamp(scaled, 0.0, double(kHistogramLevels - 1)));
}

template <typename Derived>
ProbabilityDistribution<typename Derived::Scalar> plane_probabilities(const Eigen::MatrixBase<Derived>& plane,
                                                                      ImageEntropyMode mode) {
    using Scalar = typename Derived::Scalar;
    if (plane.size() == 0) throw InvalidArgument("image entropy: empty plane");
    if (mode == ImageEntropyMode::Histogram) {
        Vector<Scalar> counts = Vector<Scalar>::Zero(kHistogramLevels);
        for (Eigen::Index c = 0; c < plane.cols(); ++c)
            for (Eigen::Index r = 0; r < plane.rows(); ++r) counts[quantize_level(plane(r, c))] += 1;
        return {counts / static_cast<Scalar>(plane.size())};
    }
    Vector<Scalar> mass(plane.size());
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < plane.cols(); ++c)
        for (Eigen::Index r = 0; r < plane.rows(); ++r) mass[k++] = std::max(Scalar(0), plane(r, c));
    const Scalar total = mass.sum();
    if (!(total > 0)) return {Vector<Scalar>::Constant(mass.size(), Scalar(1) / static_cast<Scalar>(mass.size()))};
    return {mass / total};
}

template <typename Derived>
typename Derived::Scalar plane_entropy(const Eigen::MatrixBase<Derived>& plane,
                                       ImageEntropyMode mode = ImageEntropyMode::Histogram) {
    return shannon_entropy(plane_probabilities(plane, mode));
}

template <typename Scalar = double>
struct ImageEntropy {
    std::array<Scalar, 3> channels{};  // R, G, B
    Scalar total{0};                   // sum of the channel entropies
};

template <typename Scalar>
ImageEntropy<Scalar> image_entropy(const RgbImage<Scalar>& image, ImageEntropyMode mode = ImageEntropyMode::Histogram) {
    ImageEntropy<Scalar> e;
    e.channels = {plane_entropy(image.r, mode), plane_entropy(image.g, mode), plane_entropy(image.b, mode)};
    e.total = e.channels[0] + e.channels[1] + e.channels[2];
    return e;
}

// ---------------------------------------------------------------------------
// Grid search

template <typename Scalar = double>
struct ParamGrid {
    std::vector<Scalar> alphas;
    std::vector<Scalar> lambdas;
};

template <typename Scalar = double>
ParamGrid<Scalar> default_param_grid() {
    return {{1.0, 1.4, 1.8, 2.2, 2.6, 3.0, 3.4}, {1e-2, 1e-1, 1e0, 1e1, 1e2, 1e3, 1e4}};
}

template <typename Scalar>
void validate(const ParamGrid<Scalar>& grid) {
    auto strictly_increasing = [](const std::vector<Scalar>& v) {
        return std::adjacent_find(v.begin(), v.end(), [](Scalar a, Scalar b) { return !(a < b); }) == v.end();
    };
    if (grid.alphas.empty() || grid.lambdas.empty()) throw InvalidArgument("param grid: alphas and lambdas must be non-empty");
    if (!strictly_increasing(grid.alphas)) throw InvalidArgument("param grid: alphas must be strictly increasing");
    if (!strictly_increasing(grid.lambdas)) throw InvalidArgument("param grid: lambdas must be strictly increasing");
    for (Scalar a : grid.alphas)
        if (!(a > 0) || !std::isfinite(a)) throw InvalidArgument("param grid: every alpha must be finite and > 0");
    for (Scalar l : grid.lambdas)
        if (!(l >= 0) || !std::isfinite(l)) throw InvalidArgument("param grid: every lambda must be finite and >= 0");
}

template <typename Scalar = double>
struct SurfaceEntry {
    Scalar alpha{0};
    Scalar lambda{0};
    Scalar entropy{0};
    std::array<Scalar, 3> channel_entropy{};  // filled for image inputs only
};

/// Entries are alpha-major: entries[i * lambdas.size() + j] holds (alphas[i], lambdas[j]).
template <typename Scalar = double>
struct EntropySurface {
    std::vector<SurfaceEntry<Scalar>> entries;
    std::size_t best_index{0};

    [[nodiscard]] const SurfaceEntry<Scalar>& best() const { return entries.at(best_index); }
    [[nodiscard]] FilterParams<Scalar> best_params() const { return {best().alpha, best().lambda}; }
};

struct OptimizeOptions {
    unsigned threads = 1;  // 0 picks hardware concurrency
    ImageEntropyMode image_mode = ImageEntropyMode::Histogram;
};

/// Lower entropy wins; equal entropies prefer the smaller lambda, then the smaller alpha.
template <typename Scalar>
bool better_cell(const SurfaceEntry<Scalar>& a, const SurfaceEntry<Scalar>& b) {
    if (a.entropy != b.entropy) return a.entropy < b.entropy;
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.alpha < b.alpha;
}

namespace detail {

template <typename Scalar>
[[noreturn]] void rethrow_for_cell(std::exception_ptr error, Scalar alpha, Scalar lambda) {
    std::ostringstream cell;
    cell << "optimize: cell (alpha=" << alpha << ", lambda=" << lambda << "): ";
    try {
        std::rethrow_exception(error);
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(cell.str() + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(cell.str() + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(cell.str() + e.what());
    }
}

/// Evaluates every cell (possibly on several threads), then reduces in cell order.
template <typename Scalar>
EntropySurface<Scalar> evaluate_grid(const ParamGrid<Scalar>& grid, unsigned threads,
                                     const std::function<SurfaceEntry<Scalar>(const FilterParams<Scalar>&)>& cell) {
    validate(grid);
    const std::size_t nl = grid.lambdas.size();
    const std::size_t total = grid.alphas.size() * nl;
    EntropySurface<Scalar> surface;
    surface.entries.resize(total);
    std::vector<std::exception_ptr> errors(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < total; i = next++) {
            const FilterParams<Scalar> p{grid.alphas[i / nl], grid.lambdas[i % nl]};
            try {
                surface.entries[i] = cell(p);
                surface.entries[i].alpha = p.alpha;
                surface.entries[i].lambda = p.lambda;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < total; ++i)
        if (errors[i]) rethrow_for_cell(errors[i], grid.alphas[i / nl], grid.lambdas[i % nl]);

    for (std::size_t i = 1; i < total; ++i)
        if (better_cell(surface.entries[i], surface.entries[surface.best_index])) surface.best_index = i;
    return surface;
}

} // namespace detail

template <typename Scalar>
EntropySurface<Scalar> optimize(const Signal1D<Scalar>& signal, const ParamGrid<Scalar>& grid,
                                const OptimizeOptions& options = {}) {
    validate(signal);
    return detail::evaluate_grid<Scalar>(grid, options.threads, [&](const FilterParams<Scalar>& p) {
        SurfaceEntry<Scalar> e;
        e.entropy = shannon_entropy(spectrum_probabilities(filter_1d(signal, p)));
        return e;
    });
}

template <typename Scalar>
EntropySurface<Scalar> optimize(const RgbImage<Scalar>& image, const ParamGrid<Scalar>& grid,
                                const OptimizeOptions& options = {}) {
    validate(image);
    return detail::evaluate_grid<Scalar>(grid, options.threads, [&](const FilterParams<Scalar>& p) {
        const auto h = image_entropy(filter_rgb(image, p), options.image_mode);
        SurfaceEntry<Scalar> e;
        e.entropy = h.total;
        e.channel_entropy = h.channels;
        return e;
    });
}

} // namespace fracfilter
