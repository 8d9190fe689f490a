#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include "oracles.hpp"
#include "phycr/image_io.hpp"
#include "phycr/prior_source.hpp"

using namespace phycr;
namespace fs = std::filesystem;

TEST_CASE("file mode decodes and validates the prior") {
    const Raster cloudy = oracles::random_raster(20, 14, 3, 201);
    const Raster candidate = oracles::random_raster(20, 14, 3, 202);

    const fs::path path = fs::temp_directory_path() / "phycr_prior.png";
    io::write_image(path, candidate);

    PriorSpec spec;
    spec.mode = PriorSpec::Mode::File;
    spec.path = path.string();
    Raster got = acquire_prior(spec, cloudy);
    CHECK(oracles::max_abs_diff(got, candidate) <= 0.5 / 65535.0 + 1e-12);
    fs::remove(path);

    PriorSpec missing;
    missing.mode = PriorSpec::Mode::File;
    missing.path = (fs::temp_directory_path() / "phycr_no_such_prior.png").string();
    CHECK_THROWS_WITH_AS(acquire_prior(missing, cloudy),
                         doctest::Contains("phycr_no_such_prior.png"), PriorError);
}

TEST_CASE("file mode rejects mismatched dimensions and band counts") {
    const Raster cloudy = oracles::random_raster(16, 16, 3, 203);

    const fs::path wrong_size = fs::temp_directory_path() / "phycr_prior_size.png";
    io::write_image(wrong_size, oracles::random_raster(8, 8, 3, 204));
    PriorSpec spec;
    spec.mode = PriorSpec::Mode::File;
    spec.path = wrong_size.string();
    CHECK_THROWS_AS(acquire_prior(spec, cloudy), PriorError);
    fs::remove(wrong_size);

    const fs::path wrong_bands = fs::temp_directory_path() / "phycr_prior_bands.tif";
    io::write_image(wrong_bands, oracles::random_raster(16, 16, 4, 205));
    spec.path = wrong_bands.string();
    CHECK_THROWS_AS(acquire_prior(spec, cloudy), PriorError);
    fs::remove(wrong_bands);
}

TEST_CASE("spec validation") {
    PriorSpec both;
    both.mode = PriorSpec::Mode::File;
    both.path = "a.png";
    both.endpoint = "http://x/y";
    CHECK_THROWS_AS(both.validate(), std::invalid_argument);

    PriorSpec negative;
    negative.mode = PriorSpec::Mode::File;
    negative.path = "a.png";
    negative.timeout_seconds = 0.0;
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
}

TEST_CASE("remote mode against a loopback stub") {
    const Raster cloudy = oracles::random_raster(24, 18, 3, 211);

    httplib::Server server;
    std::atomic<int> status{200};
    server.Post("/edit", [&](const httplib::Request& req, httplib::Response& res) {
        if (status != 200) {
            res.status = status;
            return;
        }
        REQUIRE(req.has_file("image"));
        REQUIRE(req.has_file("prompt"));
        CHECK(req.get_file_value("prompt").content == "remove cloud");
        // Echo the uploaded image back.
        res.set_content(req.get_file_value("image").content, "image/png");
    });
    server.Post("/resize", [&](const httplib::Request& req, httplib::Response& res) {
        const auto& body = req.get_file_value("image").content;
        Raster img = io::decode_png(std::vector<std::uint8_t>(body.begin(), body.end()));
        Raster small = io::resample_bilinear(img, img.width() / 2, img.height() / 2);
        const auto png = io::encode_png(small, 16);
        res.set_content(std::string(png.begin(), png.end()), "image/png");
    });

    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    PriorSpec spec;
    spec.mode = PriorSpec::Mode::Remote;
    spec.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/edit";
    spec.timeout_seconds = 10.0;

    SUBCASE("echo stub returns the input within quantization tolerance") {
        Raster got = acquire_prior(spec, cloudy);
        CHECK(oracles::max_abs_diff(got, cloudy) <= 1.0 / 255.0);
    }

    SUBCASE("resized responses are resampled back to the input grid") {
        spec.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/resize";
        Raster got = acquire_prior(spec, cloudy);
        CHECK(got.width() == cloudy.width());
        CHECK(got.height() == cloudy.height());
    }

    SUBCASE("non-2xx responses raise a diagnostic") {
        status = 503;
        CHECK_THROWS_WITH_AS(acquire_prior(spec, cloudy), doctest::Contains("503"), PriorError);
    }

    server.stop();
    worker.join();
}

TEST_CASE("remote mode reports unreachable endpoints") {
    PriorSpec spec;
    spec.mode = PriorSpec::Mode::Remote;
    spec.endpoint = "http://127.0.0.1:1/never";
    spec.timeout_seconds = 2.0;
    const Raster cloudy(8, 8, 3, 0.5);
    CHECK_THROWS_AS(acquire_prior(spec, cloudy), PriorError);
}
