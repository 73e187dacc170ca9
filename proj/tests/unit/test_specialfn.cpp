#include <doctest.h>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>

#include "fracstep/specialfn.hpp"

using namespace fracstep;
template <unsigned Digits>
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>>;

namespace {

// Plain power series in extended arithmetic; the cancellation that ruins it
// in double precision is harmless at this working precision.
template <unsigned Digits>
double series_at(double alpha, double z) {
    using B = Big<Digits>;
    B sum = 0, zk = 1;
    const B zb = z, ab = alpha;
    for (int k = 0; k < 20000; ++k) {
        const B term = zk / boost::math::tgamma(B(1) + ab * k);
        sum += term;
        if (k > 10 && abs(term) < B("1e-40")) return static_cast<double>(sum);
        zk *= zb;
    }
    FAIL("series oracle did not converge");
    return 0.0;
}

// The largest term is about exp(|z|^(1/alpha)); the precision must cover it.
double series_oracle(double alpha, double z) {
    const double growth = std::pow(std::abs(z), 1.0 / alpha);
    return growth < 100.0 ? series_at<100>(alpha, z) : series_at<300>(alpha, z);
}

// E_{1/2}(-x) = exp(x^2) erfc(x).
double erfc_oracle(double x) {
    using Mid = boost::multiprecision::cpp_bin_float_50;
    const Mid xm = x;
    return static_cast<double>(exp(xm * xm) * boost::math::erfc(xm));
}

} // namespace

TEST_SUITE("specialfn") {

TEST_CASE("omega kernel") {
    CHECK(omega(1.0, 7.3) == 1.0);
    CHECK(omega(2.0, 3.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(omega(1.5, 1.0) == doctest::Approx(1.1283791670955126).epsilon(1e-15));
    CHECK(omega(150.0, 2.0) == doctest::Approx(std::exp(149.0 * std::log(2.0) - std::lgamma(150.0))).epsilon(1e-12));
    CHECK_THROWS_AS(omega(0.0, 1.0), Error);
    CHECK_THROWS_AS(omega(1.5, 0.0), Error);
}

TEST_CASE("omega differences avoid cancellation") {
    const double beta = 1.5, base = 1.0, h = 1e-9;
    const long double exact =
        (std::pow(1.0L + 1e-9L, 0.5L) - 1.0L) / std::tgamma(1.5L);
    CHECK(omega_diff(beta, base, h) == doctest::Approx(static_cast<double>(exact)).epsilon(1e-9));
    CHECK(omega_diff(beta, 0.0, 2.0) == doctest::Approx(omega(beta, 2.0)));
    CHECK(omega_diff(2.5, 3.0, 1.0) == doctest::Approx(omega(2.5, 4.0) - omega(2.5, 3.0)).epsilon(1e-14));
}

TEST_CASE("Mittag-Leffler special cases") {
    CHECK(mittag_leffler(0.5, 0.0) == 1.0);
    CHECK(mittag_leffler(1.0, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(mittag_leffler(1.0, -3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
    const double v = mittag_leffler(0.5, -1.0);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    CHECK(v == doctest::Approx(series_at<200>(0.5, -1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(mittag_leffler(0.0, 1.0), Error);
    CHECK_THROWS_AS(mittag_leffler(1.5, 1.0), Error);
}

TEST_CASE("Mittag-Leffler against a high-precision series") {
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (double z : {-6.0, -3.0, -1.5, -1.0, -0.2, 0.3, 1.0, 1.8, 2.5, 4.0}) {
            CAPTURE(alpha);
            CAPTURE(z);
            // Keep the largest series term well inside 300 digits and the term count moderate.
            const double growth = std::pow(std::abs(z), 1.0 / alpha);
            if (z > 0.0 && growth > 700.0) {
                CHECK(std::isinf(mittag_leffler(alpha, z)));
                continue;
            }
            if (growth > 400.0 || (alpha < 0.2 && z > 1.0)) continue;
            const double ref = series_oracle(alpha, z);
            CHECK(std::abs(mittag_leffler(alpha, z) - ref) <= 1e-13 + 1e-12 * std::abs(ref));
        }
    }
}

TEST_CASE("Mittag-Leffler order one half against erfc") {
    for (double x : {0.5, 2.0, 5.0, 12.0, 30.0, 50.0}) {
        CAPTURE(x);
        CHECK(mittag_leffler(0.5, -x) == doctest::Approx(erfc_oracle(x)).epsilon(1e-10));
    }
}

TEST_CASE("Mittag-Leffler is completely monotone on the negative axis") {
    for (double alpha : {0.3, 0.6, 0.9}) {
        double previous = 1.0;
        for (double x = 0.25; x <= 200.0; x *= 1.5) {
            const double value = mittag_leffler(alpha, -x);
            CHECK(value > 0.0);
            CHECK(value < previous);
            previous = value;
        }
    }
}

TEST_CASE("log and excess forms") {
    for (double alpha : {0.3, 0.5, 0.8}) {
        for (double z : {1e-8, 0.1, 1.0, 3.0}) {
            CAPTURE(alpha);
            CAPTURE(z);
            const double value = mittag_leffler(alpha, z);
            CHECK(log_mittag_leffler(alpha, z) == doctest::Approx(std::log(value)).epsilon(1e-12));
            CHECK(mittag_leffler_excess(alpha, z) == doctest::Approx(series_oracle(alpha, z) - 1.0).epsilon(1e-10));
        }
        // Past overflow the logarithm follows z^(1/alpha) - ln(alpha).
        const double z = 2000.0;
        CHECK(std::isfinite(log_mittag_leffler(alpha, z)));
        CHECK(log_mittag_leffler(alpha, z) == doctest::Approx(std::pow(z, 1.0 / alpha) - std::log(alpha)).epsilon(1e-10));
    }
}

}
