#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <png.h>

#include "fracfilter/io.hpp"
#include "fracfilter/synth.hpp"

using namespace fracfilter;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "fracfilter_test_io";
    fs::create_directories(dir);
    return dir / name;
}

std::string parse_failure(const std::string& text, std::size_t* line = nullptr) {
    std::istringstream in(text);
    try {
        (void)io::read_spectrum_csv(in, "mem");
    } catch (const ParseError& e) {
        if (line) *line = e.line();
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("number formatting round-trips") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(gen) * std::pow(10.0, static_cast<int>(gen() % 20) - 10);
        CHECK(io::parse_number(io::format_number(v), "v") == v);
    }
    CHECK(io::format_number(0.25) == "0.25");
    CHECK(io::parse_number(" +1e2 ", "v") == 100.0);
    CHECK_THROWS_AS(io::parse_number("1.5x", "v"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_number("", "v"), InvalidArgument);
}

TEST_CASE("spectrum CSV") {
    const auto sim = simulate(default_recipe<double>());

    SUBCASE("round trip through a file") {
        const auto path = scratch("noisy.csv");
        io::write_spectrum_csv(path, sim.noisy);
        const auto back = io::read_spectrum_csv(path);
        REQUIRE(back.size() == sim.noisy.size());
        CHECK((back.abscissa - sim.noisy.abscissa).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((back.intensity - sim.noisy.intensity).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("comments and blank lines") {
        std::istringstream in("# produced elsewhere\nnu,intensity\n\n1,2\n# mid\n2,3.5\r\n3,-1\n");
        const auto s = io::read_spectrum_csv(in);
        CHECK(s.size() == 3);
        CHECK(s.intensity[1] == 3.5);
        CHECK(s.abscissa[2] == 3.0);
    }
    SUBCASE("malformed input names the line") {
        std::size_t line = 0;
        CHECK(parse_failure("nu,intensity\n1,2\n2,abc\n", &line).find("mem:3") != std::string::npos);
        CHECK(line == 3);
        parse_failure("x,y\n1,2\n", &line);
        CHECK(line == 1);
        parse_failure("nu,intensity\n1,2\n2,3,4\n", &line);
        CHECK(line == 3);
        parse_failure("nu,intensity\n1,2\n2,nan\n", &line);
        CHECK(line == 3);
        CHECK_FALSE(parse_failure("").empty());
        CHECK_FALSE(parse_failure("nu,intensity\n1,2\n").empty());
        CHECK_FALSE(parse_failure("nu,intensity\n1,2\n2,3\n4,5\n").empty());
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(io::read_spectrum_csv(scratch("does_not_exist.csv")), IoError);
    }
}

TEST_CASE("surface CSV") {
    EntropySurface<double> s;
    s.entries = {{1, 0.5, 3.25}, {2, 0.5, 2.5}};
    s.best_index = 1;
    std::ostringstream out;
    io::write_surface_csv(out, s);
    CHECK(out.str() == "alpha,lambda,H\n1,0.5,3.25\n2,0.5,2.5\nbest,2,0.5,2.5\n");
}

TEST_CASE("key-value files") {
    std::istringstream in("# comment\n; other\nalpha = 2.5\n\nout=\"a b.csv\"\n  peak = 800:1:2:0 \n");
    const auto kv = io::read_key_values(in);
    REQUIRE(kv.size() == 3);
    CHECK(kv[0] == std::pair<std::string, std::string>{"alpha", "2.5"});
    CHECK(kv[1].second == "a b.csv");
    CHECK(kv[2].second == "800:1:2:0");

    std::istringstream bad("alpha 2\n");
    CHECK_THROWS_AS(io::read_key_values(bad), ParseError);

    CHECK(io::sidecar_path("dir/best.csv") == fs::path("dir/best.meta"));
    CHECK(io::sidecar_path("x.png") == fs::path("x.meta"));

    const auto target = scratch("out.csv");
    io::write_metadata(target, {{"alpha", "2"}, {"seed", "42"}});
    const auto back = io::read_key_values(io::sidecar_path(target));
    REQUIRE(back.size() == 2);
    CHECK(back[1].second == "42");
}

TEST_CASE("PNG") {
    SUBCASE("RGB round trip is lossless on byte levels") {
        RgbImage<double> img;
        std::mt19937 gen(5);
        std::uniform_int_distribution<int> level(0, 255);
        for (auto* p : {&img.r, &img.g, &img.b}) {
            p->resize(9, 13);
            for (auto& v : p->reshaped()) v = level(gen) / 255.0;
        }
        const auto path = scratch("rgb.png");
        io::write_png(path, img);
        const auto back = io::read_png(path);
        CHECK(back.channels == 3);
        REQUIRE(back.image.r.rows() == 9);
        REQUIRE(back.image.r.cols() == 13);
        CHECK((back.image.r - img.r).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((back.image.g - img.g).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((back.image.b - img.b).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("grayscale is replicated") {
        const ImagePlane<double> g = ImagePlane<double>::Constant(4, 6, 0.2);
        const auto path = scratch("gray.png");
        io::write_png(path, RgbImage<double>{g, g, g}, 1);
        const auto back = io::read_png(path);
        CHECK(back.channels == 1);
        CHECK(back.image.r == back.image.b);
        CHECK(std::abs(back.image.g(0, 0) - 51 / 255.0) < 1e-12);
    }
    SUBCASE("byte conversion clamps") {
        CHECK(io::to_byte(-1.0) == 0);
        CHECK(io::to_byte(2.0) == 255);
        CHECK(io::to_byte(0.5) == 128);
    }
    SUBCASE("unsupported inputs") {
        const auto text = scratch("fake.bmp");
        io::write_text_file(text, "BM not really an image");
        try {
            (void)io::read_png(text);
            FAIL("expected an exception");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find("'.bmp'") != std::string::npos);
        }

        png_image image{};
        image.version = PNG_IMAGE_VERSION;
        image.width = 3;
        image.height = 3;
        image.format = PNG_FORMAT_RGBA;
        std::vector<png_byte> pixels(PNG_IMAGE_SIZE(image), 200);
        const auto rgba = scratch("rgba.png");
        REQUIRE(png_image_write_to_file(&image, rgba.string().c_str(), 0, pixels.data(), 0, nullptr));
        try {
            (void)io::read_png(rgba);
            FAIL("expected an exception");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find("unsupported image format") != std::string::npos);
        }

        CHECK_THROWS_AS(io::read_png(scratch("absent.png")), IoError);
        CHECK_THROWS_AS(io::write_png(scratch("no_such_dir") / "x.png", RgbImage<double>{}), std::exception);
    }
}
