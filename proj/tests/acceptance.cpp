// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracfilter/app.hpp"
#include "oracles.hpp"

using namespace fracfilter;
using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) o.require(false, "runtime " + std::to_string(secs) + " s over budget");
    if (!o.pass) ++failures;
    std::printf("[%s] %d. %s (%.3f s / %.0f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, title, secs, budget_s,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
}

std::string num(double v) { return io::format_number(v); }

VectorXd random_vector(Eigen::Index n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.3, 1.0);
    VectorXd v(n);
    for (auto& x : v) x = nd(gen);
    return v;
}

std::vector<Signal1D<double>> seeded_signals() {
    std::vector<Signal1D<double>> out;
    out.push_back(simulate(default_recipe<double>()).noisy);
    for (unsigned seed : {1u, 2u, 3u}) out.push_back(uniform_signal(0.0, 0.5, random_vector(257 + seed, seed)));
    auto r = default_recipe<double>();
    r.baseline = 0.3;
    r.noise.seed = 7;
    out.push_back(simulate(r).noisy);
    return out;
}

double max_abs(const VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

RgbImage<double> noisy_test_image(const RgbImage<double>& clean, std::uint64_t seed) {
    RgbImage<double> noisy = clean;
    std::uint64_t s = seed;
    for (auto* p : {&noisy.r, &noisy.g, &noisy.b}) {
        add_gaussian_noise(*p, NoiseSpec<double>{0, 0.1, ++s});
        *p = p->cwiseMax(0.0).cwiseMin(1.0);
    }
    return noisy;
}

double channel_mean(const RgbImage<double>& img, double (*f)(const ImagePlane<double>&)) {
    return (f(img.r) + f(img.g) + f(img.b)) / 3.0;
}

double plane_contrast(const ImagePlane<double>& p) { return contrast(p); }
double plane_sharpness(const ImagePlane<double>& p) { return sharpness(p); }

double image_mse(const RgbImage<double>& a, const RgbImage<double>& b) {
    const double r = rmse(a.r, b.r), g = rmse(a.g, b.g), bl = rmse(a.b, b.b);
    return (r * r + g * g + bl * bl) / 3.0;
}

} // namespace

int main() {
    const auto grid = default_param_grid<double>();
    const PeakWindow<double> window{};

    criterion(1, "identity at lambda 0 and mean preservation over the default grid", 1.0, [&] {
        Outcome o;
        for (const auto& s : seeded_signals()) {
            const auto same = filter_1d(s, FilterParams<double>{1.7, 0});
            const double err = max_abs(same.intensity - s.intensity);
            o.require(err <= 1e-10, "identity error " + num(err));
            const double mean = s.intensity.mean();
            for (double a : grid.alphas)
                for (double l : grid.lambdas) {
                    const double m = filter_1d(s, FilterParams<double>{a, l}).intensity.mean();
                    const double rel = std::abs(m - mean) / std::abs(mean);
                    o.require(rel <= 1e-10, "mean drift " + num(rel) + " at alpha=" + num(a) + " lambda=" + num(l));
                }
        }
        return o;
    });

    criterion(2, "FFT path matches the naive DFT oracle in 1D and 2D", 10.0, [&] {
        Outcome o;
        for (Eigen::Index n : {7, 8, 16, 31}) {
            const VectorXd u = random_vector(n, static_cast<unsigned>(n));
            for (double a : {0.6, 1.0, 2.2, 3.4})
                for (double l : {1e-2, 1.0, 1e4}) {
                    const auto fast = filter_samples(u, 0.7, FilterParams<double>{a, l});
                    const auto slow = oracle::naive_filter_1d(std::vector<double>(u.begin(), u.end()), 0.7, a, l);
                    const double err = max_abs(fast - Eigen::Map<const VectorXd>(slow.data(), n));
                    o.require(err <= 1e-8, "1D n=" + std::to_string(n) + " error " + num(err));
                }
        }
        MatrixXd img(8, 8);
        img.reshaped() = random_vector(64, 99);
        for (double a : {1.0, 2.2})
            for (double l : {0.1, 100.0}) {
                const MatrixXd fast = filter_2d(img, FilterParams<double>{a, l});
                const MatrixXd slow = oracle::naive_filter_2d(img, a, l);
                const double err = (fast - slow).cwiseAbs().maxCoeff();
                o.require(err <= 1e-8, "2D error " + num(err));
            }
        return o;
    });

    criterion(3, "Parseval identity and real output after every filtering call", 30.0, [&] {
        Outcome o;
        for (Eigen::Index n : {7, 64, 800, 1001}) {
            const VectorXd u = random_vector(n, 5 + static_cast<unsigned>(n));
            const auto spec = dft::forward(u);
            const double time_energy = u.squaredNorm();
            const double freq_energy = spec.squaredNorm() / static_cast<double>(n);
            const double rel = std::abs(time_energy - freq_energy) / time_energy;
            o.require(rel <= 1e-10, "Parseval n=" + std::to_string(n) + " rel " + num(rel));
        }
        for (const auto& s : seeded_signals())
            for (double a : grid.alphas)
                for (double l : grid.lambdas) {
                    FilterDiagnostics<double> d;
                    (void)filter_1d(s, FilterParams<double>{a, l}, &d);
                    o.require(d.imaginary_residue < 1e-9 * d.input_max_abs, "1D residue " + num(d.imaginary_residue));
                }
        const auto img = synthetic_image<double>(64, 48, 9);
        for (double a : grid.alphas)
            for (double l : grid.lambdas) {
                FilterDiagnostics<double> d;
                (void)filter_2d(img.g, FilterParams<double>{a, l}, &d);
                o.require(d.imaginary_residue < 1e-9 * d.input_max_abs, "2D residue " + num(d.imaginary_residue));
            }
        return o;
    });

    criterion(4, "analytic gain values", 1.0, [&] {
        Outcome o;
        const double g1 = transfer_gain_1d(1.0, FilterParams<double>{1, 1});
        const double g2 = transfer_gain_2d(3.0, 4.0, FilterParams<double>{1, 1});
        o.require(std::abs(g1 - 0.5) <= 1e-15, "1D gain " + num(g1));
        o.require(std::abs(g2 - 1.0 / 26) <= 1e-15, "2D gain " + num(g2));
        return o;
    });

    criterion(5, "seeded spectrum sweep trends (seed 42)", 5.0, [&] {
        Outcome o;
        const auto sim = simulate(default_recipe<double>());
        const double a0 = peak_area(sim.clean, window);
        double prev = gradient_norm_1d(sim.noisy);
        for (double l : grid.lambdas) {
            const double g = gradient_norm_1d(filter_1d(sim.noisy, FilterParams<double>{1.0, l}));
            o.require(g < prev, "gradient norm not decreasing at alpha=1 lambda=" + num(l));
            prev = g;
        }
        const double heavy = peak_area(filter_1d(sim.noisy, FilterParams<double>{1.0, 1e4}), window);
        o.require(heavy < 0.5 * a0, "area at alpha=1 lambda=1e4 is " + num(heavy / a0) + " of A0");
        const double mid = peak_area(filter_1d(sim.noisy, FilterParams<double>{2.2, 100}), window);
        o.require(std::abs(mid - a0) <= 0.05 * a0,
                  "area at alpha=2.2 lambda=100 is " + num(mid) + " vs A0 " + num(a0) + " (" +
                      num(100 * (mid - a0) / a0) + "%)");
        for (double l : grid.lambdas) {
            const double pos = peak_position(filter_1d(sim.noisy, FilterParams<double>{2.2, l}), window);
            o.require(std::abs(pos - 800) <= 1.0, "position " + num(pos) + " at alpha=2.2 lambda=" + num(l));
        }
        return o;
    });

    criterion(6, "entropy-selected parameters halve the RMSE", 10.0, [&] {
        Outcome o;
        const auto sim = simulate(default_recipe<double>());
        const auto surface = optimize(sim.noisy, grid);
        const double before = rmse(sim.noisy, sim.clean);
        const double after = rmse(filter_1d(sim.noisy, surface.best_params()), sim.clean);
        o.require(after <= 0.5 * before, "rmse " + num(after) + " vs noisy " + num(before) +
                                             " at alpha=" + num(surface.best().alpha) +
                                             " lambda=" + num(surface.best().lambda));
        return o;
    });

    criterion(7, "entropy reference values", 5.0, [&] {
        Outcome o;
        const double h8 = shannon_entropy(ProbabilityDistribution<double>{VectorXd::Constant(8, 0.125)});
        o.require(h8 == 3.0, "uniform-8 entropy " + num(h8));
        VectorXd delta = VectorXd::Zero(8);
        delta[3] = 1;
        const double hd = shannon_entropy(ProbabilityDistribution<double>{delta});
        o.require(hd == 0.0, "delta entropy " + num(hd));
        const ImagePlane<double> flat = ImagePlane<double>::Constant(256, 256, 0.5);
        const double hc = image_entropy(RgbImage<double>{flat, flat, flat}).total;
        o.require(hc == 0.0, "constant image entropy " + num(hc));
        std::mt19937 gen(42);
        std::uniform_int_distribution<int> level(0, 255);
        RgbImage<double> rnd;
        for (auto* p : {&rnd.r, &rnd.g, &rnd.b}) {
            p->resize(256, 256);
            for (auto& v : p->reshaped()) v = level(gen) / 255.0;
        }
        const auto h = image_entropy(rnd);
        for (double c : h.channels) o.require(std::abs(c - 8.0) <= 0.1, "random-image channel entropy " + num(c));
        return o;
    });

    criterion(8, "seeded RGB image sweep trends", 30.0, [&] {
        Outcome o;
        const auto clean = synthetic_image<double>(256, 256, 42);
        const auto noisy = noisy_test_image(clean, 42);
        double pc = channel_mean(noisy, plane_contrast), ps = channel_mean(noisy, plane_sharpness);
        for (double l : grid.lambdas) {
            const auto f = filter_rgb(noisy, FilterParams<double>{1.0, l});
            const double c = channel_mean(f, plane_contrast), s = channel_mean(f, plane_sharpness);
            o.require(c < pc, "contrast not decreasing at alpha=1 lambda=" + num(l));
            o.require(s < ps, "sharpness not decreasing at alpha=1 lambda=" + num(l));
            pc = c;
            ps = s;
        }
        pc = ps = -1;
        for (double a : grid.alphas) {
            const auto f = filter_rgb(noisy, FilterParams<double>{a, 1e4});
            const double c = channel_mean(f, plane_contrast), s = channel_mean(f, plane_sharpness);
            o.require(c > pc, "contrast not increasing at lambda=1e4 alpha=" + num(a));
            o.require(s > ps, "sharpness not increasing at lambda=1e4 alpha=" + num(a));
            pc = c;
            ps = s;
        }
        const double before = image_mse(noisy, clean);
        const double after = image_mse(filter_rgb(noisy, FilterParams<double>{2.2, 100}), clean);
        o.require(after <= 0.5 * before, "mse " + num(after) + " vs noisy " + num(before));
        return o;
    });

    criterion(9, "seeded commands are byte-identical and optimize ignores scheduling", 60.0, [&] {
        Outcome o;
        const fs::path root = fs::temp_directory_path() / "fracfilter_acceptance";
        fs::remove_all(root);
        std::ostringstream sink;
        auto run = [&](const std::vector<std::string>& args) {
            const int code = app::main_entry(args, sink, sink);
            o.require(code == 0, "command failed: " + args.front());
        };
        for (const char* tag : {"a", "b"}) {
            const fs::path d = root / tag;
            run({"simulate", "--out", d.string()});
            run({"simulate", "--image", "--size", "64", "--out", (d / "img").string()});
            run({"filter1d", "--in", (d / "noisy.csv").string(), "--out", (d / "f.csv").string()});
            run({"filter2d", "--in", (d / "img" / "noisy.png").string(), "--out", (d / "f.png").string()});
            run({"optimize", "--in", (d / "noisy.csv").string(), "--out", (d / "opt").string()});
            run({"metrics", "--in", (d / "noisy.csv").string(), "--out", (d / "m.csv").string()});
        }
        run({"optimize", "--in", (root / "a" / "noisy.csv").string(), "--out", (root / "par").string(), "--threads",
             "4"});
        run({"optimize", "--in", (root / "a" / "img" / "noisy.png").string(), "--out", (root / "ipar1").string(),
             "--alpha-grid", "1,2.2,3.4", "--lambda-grid", "1,100,1e4"});
        run({"optimize", "--in", (root / "a" / "img" / "noisy.png").string(), "--out", (root / "ipar4").string(),
             "--alpha-grid", "1,2.2,3.4", "--lambda-grid", "1,100,1e4", "--threads", "4"});

        for (const char* rel : {"clean.csv", "noisy.csv", "f.csv", "opt/surface.csv", "opt/best.csv", "m.csv",
                                "img/noisy.png", "f.png"}) {
            const std::string a = slurp(root / "a" / rel), b = slurp(root / "b" / rel);
            o.require(!a.empty() && a == b, std::string(rel) + " differs between runs");
        }
        o.require(slurp(root / "a" / "opt" / "surface.csv") == slurp(root / "par" / "surface.csv"),
                  "1D surface depends on thread count");
        o.require(slurp(root / "ipar1" / "surface.csv") == slurp(root / "ipar4" / "surface.csv"),
                  "image surface depends on thread count");

        const auto sim = simulate(default_recipe<double>());
        const auto s1 = optimize(sim.noisy, grid, OptimizeOptions{1});
        for (unsigned t : {2u, 3u, 8u}) {
            const auto st = optimize(sim.noisy, grid, OptimizeOptions{t});
            bool same = st.best_index == s1.best_index;
            for (std::size_t i = 0; i < s1.entries.size(); ++i) same = same && st.entries[i].entropy == s1.entries[i].entropy;
            o.require(same, "surface differs with " + std::to_string(t) + " threads");
        }
        return o;
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
