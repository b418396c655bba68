#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gglr/degrade.hpp"
#include "gglr/metrics.hpp"
#include "test_util.hpp"

using gglr::ImageGrid;
using gglr::PixelMask;

TEST_CASE("psnr of identical images is infinite") {
    testutil::Rng rng(71);
    const ImageGrid img = testutil::random_image(rng, 13, 9);
    CHECK(gglr::psnr(img, img) == std::numeric_limits<double>::infinity());
}

TEST_CASE("psnr of known uniform errors") {
    const ImageGrid zero = ImageGrid::zero(8, 8);
    CHECK(gglr::psnr(zero, ImageGrid::constant(8, 8, 1.0)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(gglr::psnr(zero, ImageGrid::constant(8, 8, 0.5)) == doctest::Approx(6.020599913279624).epsilon(1e-12));
    CHECK_THROWS_AS(gglr::psnr(zero, ImageGrid::zero(8, 9)), std::invalid_argument);
}

TEST_CASE("ssim of identical images is one") {
    testutil::Rng rng(72);
    const ImageGrid img = testutil::random_image(rng, 16, 21);
    CHECK(gglr::ssim(img, img) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim of constant offset images follows the closed form") {
    const double c = 0.4, d = 0.1;
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    const double expect = ((2.0 * c * (c + d) + c1) * c2) / ((c * c + (c + d) * (c + d) + c1) * c2);
    const double got = gglr::ssim(ImageGrid::constant(16, 16, c), ImageGrid::constant(16, 16, c + d));
    CHECK(got == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("ssim of independent noise is low") {
    testutil::Rng rng(73);
    const ImageGrid a = testutil::random_image(rng, 64, 64);
    const ImageGrid b = testutil::random_image(rng, 64, 64);
    CHECK(gglr::ssim(a, b) < 0.2);
}

TEST_CASE("ssim rejects undersized images") {
    CHECK_THROWS_AS(gglr::ssim(ImageGrid::zero(10, 16), ImageGrid::zero(10, 16)), std::invalid_argument);
}

TEST_CASE("random_mask endpoints") {
    const PixelMask none = gglr::random_mask(6, 7, 0.0, 1);
    CHECK(none.known_count() == 42);
    const PixelMask all = gglr::random_mask(6, 7, 1.0, 1);
    CHECK(all.known_count() == 0);
    CHECK_THROWS_AS(gglr::random_mask(6, 7, 1.5, 1), std::invalid_argument);
}

TEST_CASE("random_mask is reproducible and seed-sensitive") {
    const PixelMask a = gglr::random_mask(32, 32, 0.8, 1234);
    const PixelMask b = gglr::random_mask(32, 32, 0.8, 1234);
    CHECK(a.known == b.known);
    const PixelMask c = gglr::random_mask(32, 32, 0.8, 1235);
    CHECK(a.known != c.known);
}

TEST_CASE("random_mask missing count is round(fraction * MN)") {
    const PixelMask m = gglr::random_mask(128, 128, 0.9, 5);
    CHECK(128 * 128 - m.known_count() == 14746);
    const PixelMask m2 = gglr::random_mask(10, 10, 0.905, 5);
    CHECK(100 - m2.known_count() == 91);  // llround(90.5) rounds away from zero
}

TEST_CASE("zero_fill blanks missing pixels only") {
    testutil::Rng rng(74);
    const ImageGrid img = testutil::random_image(rng, 9, 9);
    const PixelMask mask = gglr::random_mask(9, 9, 0.4, 8);
    const ImageGrid d = gglr::zero_fill(img, mask);
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        CHECK(d.values[i] == (mask.known[i] ? img.values[i] : 0.0));
    }
}
