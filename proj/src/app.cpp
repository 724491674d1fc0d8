#include "fracfilter/app.hpp"

#include <cmath>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "fracfilter/errors.hpp"

namespace fracfilter::app {

namespace fs = std::filesystem;
using io::format_number;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(item);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

bool is_image_path(const fs::path& p) {
    auto ext = p.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == ".png";
}

void ensure_directory(const fs::path& dir) {
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

io::KeyValues base_metadata(const RunConfig& c, const fs::path& output) {
    return {{"tool", kToolName},
            {"version", kToolVersion},
            {"command", c.command},
            {"output", output.filename().string()},
            {"in", c.in.string()}};
}

void add_filter_metadata(io::KeyValues& kv, const FilterParams<double>& p) {
    kv.emplace_back("alpha", format_number(p.alpha));
    kv.emplace_back("lambda", format_number(p.lambda));
}

void add_recipe_metadata(io::KeyValues& kv, const SimulationRecipe<double>& r) {
    kv.emplace_back("rng", NormalSampler::name);
    kv.emplace_back("seed", std::to_string(r.noise.seed));
    kv.emplace_back("mu", format_number(r.noise.mu));
    kv.emplace_back("sigma", format_number(r.noise.sigma));
    kv.emplace_back("grid-start", format_number(r.grid_start));
    kv.emplace_back("grid-step", format_number(r.grid_step));
    kv.emplace_back("points", std::to_string(r.n_points));
    kv.emplace_back("baseline", format_number(r.baseline));
    for (const auto& p : r.peaks)
        kv.emplace_back("peak", format_number(p.center) + ":" + format_number(p.amplitude) + ":" +
                                    format_number(p.gamma) + ":" + format_number(p.eta));
}

double mean_of(const std::array<double, 3>& v, int channels) {
    return channels == 1 ? v[0] : (v[0] + v[1] + v[2]) / 3.0;
}

struct ImageStats {
    std::array<double, 3> contrast{}, sharpness{}, entropy{};
};

ImageStats image_stats(const RgbImage<double>& img) {
    ImageStats s;
    const std::array<const ImagePlane<double>*, 3> planes{&img.r, &img.g, &img.b};
    for (int i = 0; i < 3; ++i) {
        s.contrast[i] = contrast(*planes[i]);
        s.sharpness[i] = sharpness(*planes[i]);
        s.entropy[i] = plane_entropy(*planes[i]);
    }
    return s;
}

double total_entropy(const ImageStats& s, int channels) {
    return channels == 1 ? s.entropy[0] : s.entropy[0] + s.entropy[1] + s.entropy[2];
}

void print_image_stats(std::ostream& log, const char* label, const ImageStats& s, int channels) {
    static constexpr const char* names[] = {"R", "G", "B"};
    for (int i = 0; i < channels; ++i) {
        log << label << (channels == 1 ? "" : std::string(" ") + names[i]) << ": contrast=" << format_number(s.contrast[i])
            << " sharpness=" << format_number(s.sharpness[i]) << " entropy=" << format_number(s.entropy[i]) << '\n';
    }
    if (channels == 3) log << label << " total entropy=" << format_number(total_entropy(s, channels)) << '\n';
}

double image_mse(const RgbImage<double>& a, const RgbImage<double>& b, int channels) {
    double r = rmse(a.r, b.r);
    if (channels == 1) return r * r;
    const double g = rmse(a.g, b.g), bl = rmse(a.b, b.b);
    return (r * r + g * g + bl * bl) / 3.0;
}

RgbImage<double> clamp_unit(RgbImage<double> img) {
    for (auto* p : {&img.r, &img.g, &img.b}) *p = p->cwiseMax(0.0).cwiseMin(1.0);
    return img;
}

FilterParams<double> filter_params(const RunConfig& c) {
    FilterParams<double> p{c.alpha, c.lambda};
    validate(p);
    return p;
}

struct SpectrumRow {
    std::optional<double> area, position;
    double gradient_norm{0};
    double entropy{0};
};

SpectrumRow spectrum_row(const Signal1D<double>& s, const std::optional<PeakWindow<double>>& window) {
    SpectrumRow row;
    if (window) {
        row.area = peak_area(s, *window);
        row.position = peak_position(s, *window);
    }
    row.gradient_norm = gradient_norm_1d(s);
    row.entropy = shannon_entropy(spectrum_probabilities(s));
    return row;
}

/// The window is optional for spectra whose abscissa range does not cover it.
std::optional<PeakWindow<double>> usable_window(const Signal1D<double>& s, const RunConfig& c, std::ostream& log) {
    const auto w = parse_window(c.window);
    try {
        (void)peak_area(s, w);
        return w;
    } catch (const InvalidArgument& e) {
        log << "peak metrics skipped: " << e.what() << '\n';
        return std::nullopt;
    }
}

} // namespace

PeakWindow<double> parse_window(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw InvalidArgument("--window: expected LO:HI, got '" + text + "'");
    PeakWindow<double> w{io::parse_number(parts[0], "--window"), io::parse_number(parts[1], "--window")};
    if (!(w.lo < w.hi)) throw InvalidArgument("--window: LO must be < HI");
    return w;
}

std::vector<double> parse_grid_values(const std::string& text, const std::string& what) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw InvalidArgument(what + ": range must be START:STEP:STOP");
        const double start = io::parse_number(parts[0], what), step = io::parse_number(parts[1], what),
                     stop = io::parse_number(parts[2], what);
        if (!(step > 0) || stop < start) throw InvalidArgument(what + ": range needs STEP > 0 and STOP >= START");
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 100000) throw InvalidArgument(what + ": range has too many values");
        for (long i = 0; i < count; ++i) values.push_back(start + step * static_cast<double>(i));
        return values;
    }
    for (const auto& item : split(text, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        values.push_back(io::parse_number(item, what));
    }
    if (values.empty()) throw InvalidArgument(what + ": empty sweep");
    return values;
}

ParamGrid<double> parse_param_grid(const RunConfig& c) {
    ParamGrid<double> g{parse_grid_values(c.alpha_grid, "--alpha-grid"), parse_grid_values(c.lambda_grid, "--lambda-grid")};
    validate(g);
    return g;
}

SimulationRecipe<double> recipe_from(const RunConfig& c) {
    auto r = default_recipe<double>();
    r.grid_start = c.grid_start;
    r.grid_step = c.grid_step;
    r.n_points = c.points;
    r.baseline = c.baseline;
    r.noise = {c.mu, c.sigma.value_or(0.02), c.seed};
    if (!c.peaks.empty()) {
        r.peaks.clear();
        for (const auto& text : c.peaks) {
            if (text == "none") continue;
            const auto parts = split(text, ':');
            if (parts.size() != 4) throw InvalidArgument("--peak: expected CENTER:AMPLITUDE:GAMMA:ETA, got '" + text + "'");
            r.peaks.push_back({io::parse_number(parts[0], "--peak"), io::parse_number(parts[1], "--peak"),
                               io::parse_number(parts[2], "--peak"), io::parse_number(parts[3], "--peak")});
        }
    }
    validate(r);
    return r;
}

void bind_cli(CLI::App& cli, RunConfig& c) {
    cli.description("Fractional-order variational denoising of spectra and images in the Fourier domain.");
    cli.add_option("command", c.command, "simulate | filter1d | filter2d | optimize | metrics")
        ->required()
        ->check(CLI::IsMember({"simulate", "filter1d", "filter2d", "optimize", "metrics"}));
    cli.add_option("--config", "plain-text key = value file; explicit flags override it");
    cli.add_option("--in", c.in, "input CSV spectrum or PNG image");
    cli.add_option("--out", c.out, "output file (filter*, metrics) or directory (simulate, optimize)");
    cli.add_option("--reference", c.reference, "clean signal/image for error metrics");
    cli.add_option("--alpha", c.alpha, "fractional order (> 0)")->capture_default_str();
    cli.add_option("--lambda", c.lambda, "regularization weight (>= 0)")->capture_default_str();
    cli.add_option("--alpha-grid", c.alpha_grid, "comma list or START:STEP:STOP")->capture_default_str();
    cli.add_option("--lambda-grid", c.lambda_grid, "comma list or START:STEP:STOP")->capture_default_str();
    cli.add_option("--window", c.window, "peak window LO:HI")->capture_default_str();
    cli.add_option("--threads", c.threads, "grid-search worker threads (0 = all cores)")->capture_default_str();
    cli.add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    cli.add_option("--sigma", c.sigma, "noise standard deviation (default 0.02 spectra, 0.1 images)");
    cli.add_option("--mu", c.mu, "noise mean")->capture_default_str();
    cli.add_option("--grid-start", c.grid_start, "first abscissa value")->capture_default_str();
    cli.add_option("--grid-step", c.grid_step, "abscissa spacing")->capture_default_str();
    cli.add_option("--points", c.points, "number of samples")->capture_default_str();
    cli.add_option("--baseline", c.baseline, "constant baseline")->capture_default_str();
    cli.add_option("--peak", c.peaks, "CENTER:AMPLITUDE:GAMMA:ETA, repeatable")->allow_extra_args(false);
    cli.add_flag("--image", c.image, "simulate: write a synthetic RGB test image instead of spectra");
    cli.add_option("--size", c.size, "simulate --image: side length in pixels")->capture_default_str();
    cli.add_flag("--single", c.single, "metrics: metric,value rows for the input itself");
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::optional<std::string> config_path;
    std::set<std::string> explicit_keys;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        if (a.rfind("--", 0) != 0) continue;
        const auto eq = a.find('=');
        const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
        explicit_keys.insert(key);
        if (key == "config") {
            if (eq != std::string::npos) config_path = a.substr(eq + 1);
            else if (i + 1 < args.size()) config_path = args[i + 1];
            else throw InvalidArgument("--config requires a path");
        }
    }
    if (!config_path) return args;

    std::vector<std::string> expanded;
    for (const auto& [key, value] : io::read_key_values(fs::path(*config_path))) {
        if (key == "config") throw InvalidArgument("config file may not reference another config");
        if (explicit_keys.count(key)) continue;
        expanded.push_back("--" + key + "=" + value);
    }
    expanded.insert(expanded.end(), args.begin(), args.end());
    return expanded;
}

namespace {

void check_config(const RunConfig& c) {
    const bool needs_in = c.command != "simulate";
    if (needs_in && c.in.empty()) throw InvalidArgument(c.command + ": --in is required");
    if ((c.command == "filter1d" || c.command == "filter2d") && c.out.empty())
        throw InvalidArgument(c.command + ": --out is required");
    if (!c.in.empty() && !c.out.empty()) {
        std::error_code ec1, ec2;
        const auto a = fs::weakly_canonical(fs::absolute(c.in), ec1).lexically_normal();
        const auto b = fs::weakly_canonical(fs::absolute(c.out), ec2).lexically_normal();
        if (!ec1 && !ec2 && a == b) throw InvalidArgument("--in and --out must name different files");
    }
    if (c.points < 2) throw InvalidArgument("--points must be >= 2");
    if (c.size < 2) throw InvalidArgument("--size must be >= 2");
}

std::unique_ptr<CLI::App> make_cli(RunConfig& c) {
    auto cli = std::make_unique<CLI::App>(kToolName);
    bind_cli(*cli, c);
    return cli;
}

RunConfig parse_into(CLI::App& cli, RunConfig& config, const std::vector<std::string>& args) {
    const auto expanded = expand_config(args);
    std::vector<const char*> argv{kToolName};
    for (const auto& a : expanded) argv.push_back(a.c_str());
    cli.parse(static_cast<int>(argv.size()), argv.data());
    check_config(config);
    return config;
}

} // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig config;
    auto cli = make_cli(config);
    try {
        return parse_into(*cli, config, args);
    } catch (const CLI::ParseError& e) {
        throw InvalidArgument(e.what());
    }
}

// ---------------------------------------------------------------------------
// Commands

void cmd_simulate(const RunConfig& c, std::ostream& log) {
    const fs::path dir = c.out.empty() ? fs::path(".") : c.out;
    ensure_directory(dir);

    if (c.image) {
        NoiseSpec<double> noise{c.mu, c.sigma.value_or(0.1), c.seed + 1};
        const auto clean = synthetic_image<double>(c.size, c.size, c.seed);
        RgbImage<double> noisy = clean;
        add_gaussian_noise(noisy.r, noise);
        noise.seed += 1;
        add_gaussian_noise(noisy.g, noise);
        noise.seed += 1;
        add_gaussian_noise(noisy.b, noise);
        noisy = clamp_unit(std::move(noisy));
        for (const auto& [name, img] : {std::pair{"clean.png", &clean}, std::pair{"noisy.png", static_cast<const RgbImage<double>*>(&noisy)}}) {
            const fs::path path = dir / name;
            io::write_png(path, *img, 3);
            auto meta = base_metadata(c, path);
            meta.emplace_back("rng", NormalSampler::name);
            meta.emplace_back("seed", std::to_string(c.seed));
            meta.emplace_back("noise-seeds", std::to_string(c.seed + 1) + "," + std::to_string(c.seed + 2) + "," +
                                                 std::to_string(c.seed + 3));
            meta.emplace_back("mu", format_number(c.mu));
            meta.emplace_back("sigma", format_number(c.sigma.value_or(0.1)));
            meta.emplace_back("size", std::to_string(c.size));
            io::write_metadata(path, meta);
        }
        log << "wrote " << (dir / "clean.png").string() << " and " << (dir / "noisy.png").string() << " (" << c.size
            << "x" << c.size << ", sigma=" << format_number(c.sigma.value_or(0.1)) << ", seed=" << c.seed << ")\n";
        return;
    }

    const auto recipe = recipe_from(c);
    const auto sim = simulate(recipe);
    for (const auto& [name, sig] : {std::pair{"clean.csv", &sim.clean}, std::pair{"noisy.csv", &sim.noisy}}) {
        const fs::path path = dir / name;
        io::write_spectrum_csv(path, *sig);
        auto meta = base_metadata(c, path);
        add_recipe_metadata(meta, recipe);
        io::write_metadata(path, meta);
    }
    log << "wrote " << (dir / "clean.csv").string() << " and " << (dir / "noisy.csv").string() << " ("
        << recipe.n_points << " points, sigma=" << format_number(recipe.noise.sigma) << ", seed=" << recipe.noise.seed
        << ")\n";
}

void cmd_filter1d(const RunConfig& c, std::ostream& log) {
    const auto params = filter_params(c);
    const auto input = io::read_spectrum_csv(c.in);
    const auto output = filter_1d(input, params);
    io::write_spectrum_csv(c.out, output);
    auto meta = base_metadata(c, c.out);
    add_filter_metadata(meta, params);
    meta.emplace_back("window", c.window);
    io::write_metadata(c.out, meta);

    log << "filter1d alpha=" << format_number(params.alpha) << " lambda=" << format_number(params.lambda) << '\n';
    log << "gradient_norm before=" << format_number(gradient_norm_1d(input))
        << " after=" << format_number(gradient_norm_1d(output)) << '\n';
    if (const auto window = usable_window(input, c, log)) {
        log << "peak_position before=" << format_number(peak_position(input, *window))
            << " after=" << format_number(peak_position(output, *window)) << '\n';
        log << "peak_area before=" << format_number(peak_area(input, *window))
            << " after=" << format_number(peak_area(output, *window)) << '\n';
    }
    if (!c.reference.empty()) {
        const auto ref = io::read_spectrum_csv(c.reference);
        log << "rmse_vs_reference before=" << format_number(rmse(input, ref))
            << " after=" << format_number(rmse(output, ref)) << '\n';
    }
}

void cmd_filter2d(const RunConfig& c, std::ostream& log) {
    const auto params = filter_params(c);
    const auto loaded = io::read_png(c.in);
    const auto output = clamp_unit(filter_rgb(loaded.image, params));
    io::write_png(c.out, output, loaded.channels);
    auto meta = base_metadata(c, c.out);
    add_filter_metadata(meta, params);
    meta.emplace_back("channels", std::to_string(loaded.channels));
    io::write_metadata(c.out, meta);

    log << "filter2d alpha=" << format_number(params.alpha) << " lambda=" << format_number(params.lambda) << '\n';
    print_image_stats(log, "before", image_stats(loaded.image), loaded.channels);
    print_image_stats(log, "after", image_stats(output), loaded.channels);
    if (!c.reference.empty()) {
        const auto ref = io::read_png(c.reference);
        log << "mse_vs_reference before=" << format_number(image_mse(loaded.image, ref.image, loaded.channels))
            << " after=" << format_number(image_mse(output, ref.image, loaded.channels)) << '\n';
    }
}

void cmd_optimize(const RunConfig& c, std::ostream& log) {
    const auto grid = parse_param_grid(c);
    const fs::path dir = c.out.empty() ? fs::path(".") : c.out;
    ensure_directory(dir);
    OptimizeOptions options;
    options.threads = c.threads;

    EntropySurface<double> surface;
    fs::path best_path;
    if (is_image_path(c.in)) {
        const auto loaded = io::read_png(c.in);
        surface = optimize(loaded.image, grid, options);
        if (loaded.channels == 1) {
            // Replicated planes would triple the entropy; report the single channel.
            for (auto& e : surface.entries) e.entropy = e.channel_entropy[0];
        }
        best_path = dir / "best.png";
        io::write_png(best_path, clamp_unit(filter_rgb(loaded.image, surface.best_params())), loaded.channels);
    } else {
        const auto input = io::read_spectrum_csv(c.in);
        surface = optimize(input, grid, options);
        best_path = dir / "best.csv";
        io::write_spectrum_csv(best_path, filter_1d(input, surface.best_params()));
    }

    const fs::path surface_path = dir / "surface.csv";
    io::write_surface_csv(surface_path, surface);
    for (const auto& path : {surface_path, best_path}) {
        auto meta = base_metadata(c, path);
        meta.emplace_back("alpha-grid", c.alpha_grid);
        meta.emplace_back("lambda-grid", c.lambda_grid);
        add_filter_metadata(meta, surface.best_params());
        meta.emplace_back("H", format_number(surface.best().entropy));
        io::write_metadata(path, meta);
    }
    log << "best alpha=" << format_number(surface.best().alpha) << " lambda=" << format_number(surface.best().lambda)
        << " H=" << format_number(surface.best().entropy) << " (" << surface.entries.size() << " cells)\n";
}

void cmd_metrics(const RunConfig& c, std::ostream& log) {
    std::ostringstream table;
    const bool image = is_image_path(c.in);

    if (c.single) {
        table << "metric,value\n";
        if (image) {
            const auto loaded = io::read_png(c.in);
            const auto s = image_stats(loaded.image);
            table << "contrast," << format_number(mean_of(s.contrast, loaded.channels)) << '\n'
                  << "sharpness," << format_number(mean_of(s.sharpness, loaded.channels)) << '\n'
                  << "H," << format_number(total_entropy(s, loaded.channels)) << '\n';
        } else {
            const auto input = io::read_spectrum_csv(c.in);
            const auto window = parse_window(c.window);
            table << "area," << format_number(peak_area(input, window)) << '\n'
                  << "position," << format_number(peak_position(input, window)) << '\n'
                  << "gradient_norm," << format_number(gradient_norm_1d(input)) << '\n'
                  << "H," << format_number(shannon_entropy(spectrum_probabilities(input))) << '\n';
        }
    } else {
        const auto grid = parse_param_grid(c);
        if (image) {
            const auto loaded = io::read_png(c.in);
            std::optional<io::LoadedImage> ref;
            if (!c.reference.empty()) ref = io::read_png(c.reference);
            table << "contrast,sharpness,H,alpha,lambda" << (ref ? ",mse" : "") << '\n';
            for (double a : grid.alphas) {
                for (double l : grid.lambdas) {
                    const auto filtered = filter_rgb(loaded.image, FilterParams<double>{a, l});
                    const auto s = image_stats(filtered);
                    table << format_number(mean_of(s.contrast, loaded.channels)) << ','
                          << format_number(mean_of(s.sharpness, loaded.channels)) << ','
                          << format_number(total_entropy(s, loaded.channels)) << ',' << format_number(a) << ','
                          << format_number(l);
                    if (ref) table << ',' << format_number(image_mse(filtered, ref->image, loaded.channels));
                    table << '\n';
                }
            }
        } else {
            const auto input = io::read_spectrum_csv(c.in);
            const auto window = parse_window(c.window);
            std::optional<Signal1D<double>> ref;
            if (!c.reference.empty()) ref = io::read_spectrum_csv(c.reference);
            table << "area,position,gradient_norm,H,alpha,lambda" << (ref ? ",rmse" : "") << '\n';
            for (double a : grid.alphas) {
                for (double l : grid.lambdas) {
                    const auto filtered = filter_1d(input, FilterParams<double>{a, l});
                    const auto row = spectrum_row(filtered, window);
                    table << format_number(*row.area) << ',' << format_number(*row.position) << ','
                          << format_number(row.gradient_norm) << ',' << format_number(row.entropy) << ','
                          << format_number(a) << ',' << format_number(l);
                    if (ref) table << ',' << format_number(rmse(filtered, *ref));
                    table << '\n';
                }
            }
        }
    }

    if (c.out.empty()) {
        log << table.str();
        return;
    }
    io::write_text_file(c.out, table.str());
    auto meta = base_metadata(c, c.out);
    meta.emplace_back("single", c.single ? "true" : "false");
    if (!c.single) {
        meta.emplace_back("alpha-grid", c.alpha_grid);
        meta.emplace_back("lambda-grid", c.lambda_grid);
    }
    meta.emplace_back("window", c.window);
    io::write_metadata(c.out, meta);
    log << "wrote " << c.out.string() << '\n';
}

void run(const RunConfig& c, std::ostream& log) {
    if (c.command == "simulate") return cmd_simulate(c, log);
    if (c.command == "filter1d") return cmd_filter1d(c, log);
    if (c.command == "filter2d") return cmd_filter2d(c, log);
    if (c.command == "optimize") return cmd_optimize(c, log);
    if (c.command == "metrics") return cmd_metrics(c, log);
    throw InvalidArgument("unknown command '" + c.command + "'");
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InvalidArgument*>(&e)) return kInvalidArguments;
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) return kIoFailure;
    if (dynamic_cast<const NumericalError*>(&e)) return kNumericalFailure;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return kInvalidArguments;
    return 1;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig config;
    auto cli = make_cli(config);
    try {
        parse_into(*cli, config, args);
    } catch (const CLI::CallForHelp&) {
        out << cli->help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run '" << kToolName << " --help' for usage\n";
        return kInvalidArguments;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    try {
        run(config, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kSuccess;
}

} // namespace fracfilter::app
