#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracfilter/errors.hpp"
#include "fracfilter/spectral.hpp"

namespace fracfilter {

/// Seeded standard-normal source: mt19937_64 feeding a Box-Muller transform.
/// Uniforms are built from the top 53 bits of each draw, so the stream depends
/// only on the seed and the platform libm.
class NormalSampler {
public:
    static constexpr const char* name = "mt19937_64+box-muller";

    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;  // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_{0};
    bool has_spare_{false};
};

template <typename Scalar = double>
struct PeakSpec {
    Scalar center{0};
    Scalar amplitude{1};
    Scalar gamma{1};
    Scalar eta{0};  // Lorentzian fraction
};

template <typename Scalar = double>
struct NoiseSpec {
    Scalar mu{0};
    Scalar sigma{0};
    std::uint64_t seed{42};
};

template <typename Scalar = double>
struct SimulationRecipe {
    Scalar grid_start{700};
    Scalar grid_step{0.25};
    Eigen::Index n_points{800};
    std::vector<PeakSpec<Scalar>> peaks;
    Scalar baseline{0};
    NoiseSpec<Scalar> noise;
};

/// Two-peak recipe: Gaussian at 800 and an even pseudo-Voigt mix at 850,
/// sigma 0.02 noise, 800 points at spacing 0.25 starting at 700.
template <typename Scalar = double>
SimulationRecipe<Scalar> default_recipe() {
    SimulationRecipe<Scalar> r;
    r.peaks = {{Scalar(800), Scalar(0.8), Scalar(4.9), Scalar(0)}, {Scalar(850), Scalar(0.2), Scalar(7.1), Scalar(0.5)}};
    r.noise = {Scalar(0), Scalar(0.02), 42};
    return r;
}

template <typename Scalar>
struct SimulatedSpectrum {
    Signal1D<Scalar> clean;
    Signal1D<Scalar> noisy;
};

template <typename Scalar>
void validate(const PeakSpec<Scalar>& p) {
    if (!(p.gamma > 0) || !std::isfinite(p.gamma)) throw InvalidArgument("peak: gamma must be finite and > 0");
    if (!(p.eta >= 0 && p.eta <= 1)) throw InvalidArgument("peak: eta must lie in [0, 1]");
    if (!std::isfinite(p.center) || !std::isfinite(p.amplitude)) throw InvalidArgument("peak: non-finite center or amplitude");
}

template <typename Scalar>
void validate(const NoiseSpec<Scalar>& n) {
    if (!(n.sigma >= 0) || !std::isfinite(n.sigma)) throw InvalidArgument("noise: sigma must be finite and >= 0");
    if (!std::isfinite(n.mu)) throw InvalidArgument("noise: non-finite mu");
}

template <typename Scalar>
void validate(const SimulationRecipe<Scalar>& r) {
    if (!(r.grid_step > 0) || !std::isfinite(r.grid_step)) throw InvalidArgument("recipe: grid_step must be > 0");
    if (!std::isfinite(r.grid_start)) throw InvalidArgument("recipe: non-finite grid_start");
    if (r.n_points < 2) throw InvalidArgument("recipe: n_points must be >= 2");
    if (!std::isfinite(r.baseline)) throw InvalidArgument("recipe: non-finite baseline");
    for (const auto& p : r.peaks) validate(p);
    validate(r.noise);
}

// Unit-area line shapes.

template <typename Scalar>
Scalar lorentzian(Scalar nu, Scalar center, Scalar gamma) {
    if (!(gamma > 0)) throw InvalidArgument("lorentzian: gamma must be > 0");
    const Scalar d = nu - center;
    return gamma / (std::numbers::pi_v<Scalar> * (d * d + gamma * gamma));
}

template <typename Scalar>
Scalar gaussian(Scalar nu, Scalar center, Scalar gamma) {
    if (!(gamma > 0)) throw InvalidArgument("gaussian: gamma must be > 0");
    const Scalar d = nu - center;
    return std::exp(-d * d / (Scalar(2) * gamma * gamma)) /
           (std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>) * gamma);
}

template <typename Scalar>
Scalar pseudo_voigt(Scalar nu, const PeakSpec<Scalar>& peak) {
    validate(peak);
    if (peak.eta == Scalar(1)) return lorentzian(nu, peak.center, peak.gamma);
    if (peak.eta == Scalar(0)) return gaussian(nu, peak.center, peak.gamma);
    return peak.eta * lorentzian(nu, peak.center, peak.gamma) +
           (Scalar(1) - peak.eta) * gaussian(nu, peak.center, peak.gamma);
}

/// Adds N(mu, sigma) draws to every sample in storage order.
template <typename Derived>
void add_gaussian_noise(Eigen::MatrixBase<Derived>& values, const NoiseSpec<typename Derived::Scalar>& noise) {
    using Scalar = typename Derived::Scalar;
    validate(noise);
    NormalSampler sampler(noise.seed);
    for (Eigen::Index c = 0; c < values.cols(); ++c)
        for (Eigen::Index r = 0; r < values.rows(); ++r)
            values(r, c) += noise.mu + noise.sigma * static_cast<Scalar>(sampler());
}

template <typename Scalar>
SimulatedSpectrum<Scalar> simulate(const SimulationRecipe<Scalar>& recipe) {
    validate(recipe);
    Vector<Scalar> clean = Vector<Scalar>::Constant(recipe.n_points, recipe.baseline);
    Signal1D<Scalar> grid = uniform_signal(recipe.grid_start, recipe.grid_step, clean);
    for (Eigen::Index i = 0; i < recipe.n_points; ++i)
        for (const auto& peak : recipe.peaks) clean[i] += peak.amplitude * pseudo_voigt(grid.abscissa[i], peak);

    SimulatedSpectrum<Scalar> out;
    out.clean = Signal1D<Scalar>{grid.abscissa, clean};
    out.noisy = out.clean;
    if (recipe.noise.sigma > 0 || recipe.noise.mu != 0) add_gaussian_noise(out.noisy.intensity, recipe.noise);
    return out;
}

/// Seeded smooth test picture: a tilted background plus soft-edged discs per
/// channel, values kept in [0.1, 0.9] so additive noise rarely clips.
template <typename Scalar = double>
RgbImage<Scalar> synthetic_image(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    if (rows < 2 || cols < 2) throw InvalidArgument("synthetic_image: dimensions must be at least 2x2");
    NormalSampler rng(seed);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
    const double edge = 3.0 / static_cast<double>(std::max(rows, cols));
    auto channel = [&]() {
        ImagePlane<Scalar> p(rows, cols);
        const double tilt_x = uniform(-0.2, 0.2), tilt_y = uniform(-0.2, 0.2);
        struct Disc { double cx, cy, radius, level; };
        std::vector<Disc> discs(6);
        for (auto& d : discs) d = {uniform(0.15, 0.85), uniform(0.15, 0.85), uniform(0.05, 0.2), uniform(-0.25, 0.35)};
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                const double x = static_cast<double>(c) / static_cast<double>(cols);
                const double y = static_cast<double>(r) / static_cast<double>(rows);
                double v = 0.3 + tilt_x * x + tilt_y * y;
                for (const auto& d : discs) {
                    const double dist = std::hypot(x - d.cx, y - d.cy);
                    v += d.level * 0.5 * (1.0 - std::tanh((dist - d.radius) / edge));
                }
                p(r, c) = static_cast<Scalar>(std::clamp(v, 0.1, 0.9));
            }
        }
        return p;
    };
    RgbImage<Scalar> img;
    img.r = channel();
    img.g = channel();
    img.b = channel();
    return img;
}

} // namespace fracfilter
