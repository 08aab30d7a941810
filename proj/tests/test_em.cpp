#include "losray/em.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>

using namespace losray;

namespace {

// Independent high-precision oracle for int_a^inf e^{-j t^2} dt: fine-step
// Simpson quadrature in long double up to T, analytic remainder beyond.
std::complex<long double> oracle_tail_integral(long double a)
{
    using C = std::complex<long double>;
    const C j(0.0L, 1.0L);
    const long double T = std::sqrt(a * a + 2000.0L);
    auto f = [&](long double t) { return std::exp(-j * (t * t)); };

    C acc(0.0L, 0.0L);
    const long double span = T - a;
    const long long n_pairs = 600000;
    const long double h = span / (2.0L * n_pairs);
    for (long long i = 0; i < n_pairs; ++i) {
        const long double t0 = a + 2.0L * i * h;
        acc += h / 3.0L * (f(t0) + 4.0L * f(t0 + h) + f(t0 + 2.0L * h));
    }
    // Remainder: e^{-jT^2}/(2jT) * sum (-1)^k (2k-1)!! / (2jT^2)^k.
    const C denom = 2.0L * j * T * T;
    C term(1.0L, 0.0L), sum(1.0L, 0.0L);
    for (int k = 1; k <= 8; ++k) {
        term *= -static_cast<long double>(2 * k - 1) / denom;
        sum += term;
    }
    acc += std::exp(-j * (T * T)) / (2.0L * j * T) * sum;
    return acc;
}

Complex oracle_transition(double X)
{
    using C = std::complex<long double>;
    const C j(0.0L, 1.0L);
    const long double sx = std::sqrt(static_cast<long double>(X));
    const C F = 2.0L * j * sx * std::exp(j * static_cast<long double>(X)) * oracle_tail_integral(sx);
    return Complex(static_cast<double>(F.real()), static_cast<double>(F.imag()));
}

// Total field magnitude near a shadow boundary, in units of the incident
// field at unit distance: geometric-optics term on the lit side plus the
// diffracted contribution.
double total_field_magnitude(double n, double phi_prime, double s, double s_prime, double phi,
                             const Material &mat, double f, Polarization pol)
{
    const double k = kTwoPi * f / kSpeedOfLight;
    const double L = s * s_prime / (s + s_prime);
    WedgeGeometry w{n, phi, phi_prime, L, k};
    const Complex D = utd_diffraction(w, mat, f, pol);
    const Complex j(0.0, 1.0);
    const Complex e_d = std::exp(-j * (k * (s + s_prime))) * (D / std::sqrt(L)) / (s + s_prime);
    Complex total = e_d;
    if (phi - phi_prime < kPi) {
        // Straight-line distance source -> observer around the tip.
        const double ang = phi - phi_prime - kPi;
        const double d = std::sqrt(s * s + s_prime * s_prime - 2.0 * s * s_prime * std::cos(ang));
        total += std::exp(-j * (k * d)) / d;
    }
    return std::abs(total);
}

} // namespace

TEST_CASE("fresnel_transition: anchored values")
{
    CHECK(std::abs(fresnel_transition(0.0)) == 0.0);

    const double m10 = std::abs(fresnel_transition(10.0));
    CHECK(m10 >= 0.95);
    CHECK(m10 <= 1.0);

    const double m1000 = std::abs(fresnel_transition(1000.0));
    CHECK(m1000 >= 1.0 - 1e-3);
    CHECK(m1000 <= 1.0);

    CHECK_THROWS(fresnel_transition(-1.0));
}

TEST_CASE("fresnel_transition: quadrature oracle across all branches")
{
    const double xs[] = {1e-4, 0.01, 0.1,  0.29, 0.31, 0.5,  1.0,  2.0,  3.0,
                         5.4,  5.6,  8.0,  12.0, 17.9, 18.1, 25.0, 50.0, 120.0};
    for (double x : xs) {
        const Complex got = fresnel_transition(x);
        const Complex want = oracle_transition(x);
        CHECK(std::abs(got - want) <= 1e-6 * std::abs(want));
    }
}

TEST_CASE("fresnel_transition: magnitude never exceeds one")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        const double x = std::pow(10.0, -4.0 + 8.0 * uni(rng));
        CHECK(std::abs(fresnel_transition(x)) <= 1.0);
    }
}

TEST_CASE("fresnel_reflection: closed-form anchors")
{
    SUBCASE("perfect-conductor limit")
    {
        Material pec{1.0, 1e12};
        const Complex g = fresnel_reflection(pec, 3.5e9, 0.7, Polarization::soft);
        CHECK(std::abs(g - Complex(-1.0, 0.0)) < 1e-3);
    }

    SUBCASE("normal incidence, lossless eps_r = 4")
    {
        Material m{4.0, 0.0};
        const Complex gs = fresnel_reflection(m, 3.5e9, 0.0, Polarization::soft);
        const Complex gh = fresnel_reflection(m, 3.5e9, 0.0, Polarization::hard);
        CHECK(gs.real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
        CHECK(std::abs(gs.imag()) < 1e-15);
        CHECK(gh.real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    }

    SUBCASE("default material at 45 degrees vs high-precision evaluation")
    {
        Material m{}; // 5.31, 0.0326 S/m
        const double f = 3.5e9;
        for (Polarization pol : {Polarization::soft, Polarization::hard}) {
            const Complex got = fresnel_reflection(m, f, kPi / 4.0, pol);
            using C = std::complex<long double>;
            const C eps(5.31L, -0.0326L / (2.0L * 3.14159265358979323846264338L * 3.5e9L *
                                           8.8541878128e-12L));
            const long double sg = std::sin(3.14159265358979323846264338L / 4.0L);
            const C root = std::sqrt(eps - (1.0L - sg * sg));
            const C want = pol == Polarization::soft ? (sg - root) / (sg + root)
                                                     : (root - eps * sg) / (root + eps * sg);
            CHECK(std::abs(got - Complex(static_cast<double>(want.real()),
                                         static_cast<double>(want.imag()))) < 1e-12);
        }
    }

    SUBCASE("grazing limit magnitude")
    {
        Material m{};
        const Complex g = fresnel_reflection(m, 3.5e9, kPi / 2.0 - 1e-6, Polarization::soft);
        CHECK(std::abs(g) > 0.999);
        CHECK(std::abs(g) <= 1.0 + 1e-12);
    }

    SUBCASE("energy sanity over sampled angles, materials, frequencies")
    {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int i = 0; i < 20000; ++i) {
            Material m{1.0 + 14.0 * uni(rng), 5.0 * uni(rng)};
            const double f = 0.9e9 + 27.1e9 * uni(rng);
            const double th = uni(rng) * (kPi / 2.0 - 1e-9);
            const Polarization pol = (i % 2) ? Polarization::soft : Polarization::hard;
            CHECK(std::abs(fresnel_reflection(m, f, th, pol)) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("utd_diffraction: shadow boundary behavior")
{
    const Material mat{};
    const double f = 3.5e9;
    const double phi_prime = kPi / 6.0;

    for (double n : {1.5, 2.0}) {
        for (Polarization pol : {Polarization::soft, Polarization::hard}) {
            for (double L : {10.0, 50.0, 100.0}) {
                const double s = 2.0 * L; // s = s' = 2L gives distance parameter L
                // Exactly at the boundary the diffracted magnitude is half
                // the incident field that reaches the same total distance.
                const double k = kTwoPi * f / kSpeedOfLight;
                WedgeGeometry w{n, phi_prime + kPi, phi_prime, L, k};
                const Complex D = utd_diffraction(w, mat, f, pol);
                const double ratio = std::abs(D) / std::sqrt(L);
                CHECK(std::abs(ratio - 0.5) <= 1e-3);

                // Sweep across the boundary: the total field stays continuous.
                const double step = 0.01 * kPi / 180.0;
                double prev = -1.0;
                for (int i = -100; i <= 100; ++i) {
                    const double phi = phi_prime + kPi + i * step;
                    const double mag = total_field_magnitude(n, phi_prime, s, s, phi, mat, f, pol);
                    if (prev > 0.0)
                        CHECK(std::abs(mag - prev) <= 0.01 * prev);
                    prev = mag;
                }
            }
        }
    }
}

TEST_CASE("utd_diffraction: observation away from boundaries stays below the cap")
{
    const Material mat{};
    const double f = 3.5e9;
    const double k = kTwoPi * f / kSpeedOfLight;
    // Deep shadow observation, far from ISB/RSB poles.
    WedgeGeometry w{1.5, 230.0 * kPi / 180.0, 30.0 * kPi / 180.0, 50.0, k};
    const Complex D = utd_diffraction(w, mat, f, Polarization::soft);
    CHECK(std::abs(D) / std::sqrt(50.0) < 0.5);
}

TEST_CASE("utd_diffraction: pole window joins the direct evaluation smoothly")
{
    const Material mat{};
    const double f = 3.5e9;
    const double k = kTwoPi * f / kSpeedOfLight;
    const double phi_prime = kPi / 4.0;
    for (double n : {1.5, 2.0}) {
        const double offs[] = {-0.10, -0.06, -0.049, -0.02, 0.02, 0.049, 0.06, 0.10};
        double prev_mag = -1.0;
        for (double off_deg : offs) {
            WedgeGeometry w{n, phi_prime + kPi + off_deg * kPi / 180.0, phi_prime, 50.0, k};
            const double mag = std::abs(utd_diffraction(w, mat, f, Polarization::hard));
            if (prev_mag > 0.0)
                CHECK(std::abs(mag - prev_mag) <= 0.05 * prev_mag);
            prev_mag = mag;
        }
    }
}

TEST_CASE("clamp passivity probe away from pole windows")
{
    const Material mat{};
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int tested = 0;
    while (tested < 100000) {
        const double n = 1.0 + uni(rng);
        const double phi_p = uni(rng) * n * kPi;
        const double phi = uni(rng) * n * kPi;
        const double L = 1.0 + 299.0 * uni(rng);
        const double f = 0.9e9 + 27.1e9 * uni(rng);
        const double k = kTwoPi * f / kSpeedOfLight;

        bool near_pole = false;
        const double betas[2] = {phi - phi_p, phi + phi_p};
        for (double beta : betas)
            for (double s : {1.0, -1.0}) {
                const double N = std::round((beta + s * kPi) / (kTwoPi * n));
                if (std::abs(beta - (kTwoPi * n * N - s * kPi)) < 2.0 * 0.05 * kPi / 180.0)
                    near_pole = true;
            }
        if (near_pole)
            continue;

        WedgeGeometry w{n, phi, phi_p, L, k};
        const Complex D = utd_diffraction(w, mat, f, (tested % 2) ? Polarization::soft : Polarization::hard);
        CHECK(std::abs(D) / std::sqrt(L) <= 0.5 + 1e-6);
        ++tested;
    }
}

TEST_CASE("clamp_diffracted")
{
    const Complex below(0.2, -0.1);
    CHECK(clamp_diffracted(below, 1.0) == below);

    const Complex above(0.8, 0.6); // |.| = 1.0
    const Complex clamped = clamp_diffracted(above, 1.0);
    CHECK(std::abs(clamped) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::arg(clamped) == doctest::Approx(std::arg(above)));

    CHECK(clamp_diffracted(Complex(0.0, 0.0), 1.0) == Complex(0.0, 0.0));
}

TEST_CASE("forward_scatter_loss")
{
    CHECK(forward_scatter_loss(kForwardScatterMaxRad) == doctest::Approx(6.02).epsilon(1e-12));
    CHECK(forward_scatter_loss(0.0) == doctest::Approx(30.0).epsilon(1e-12));
    CHECK(forward_scatter_loss(15.0 * kPi / 180.0) == doctest::Approx(18.01).epsilon(1e-9));
    CHECK_THROWS_AS(forward_scatter_loss(31.0 * kPi / 180.0), std::domain_error);
    // C0 junction with the clamp value.
    const double eps = 1e-9;
    CHECK(std::abs(forward_scatter_loss(kForwardScatterMaxRad - eps) - 6.02) <= 0.01);
    CHECK(std::pow(10.0, -6.02 / 20.0) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("material table")
{
    MaterialTable t;
    t.set(3.5e9, 0, Material{5.31, 0.0326});
    t.set(3.5e9, 1, Material{4.0, 0.01});
    t.set(28e9, 0, Material{6.2, 0.5});

    CHECK(t.lookup(3.5e9, 1).epsilon_r == 4.0);
    CHECK(t.lookup(4.0e9, 0).epsilon_r == 5.31);  // nearest block
    CHECK(t.lookup(27.0e9, 0).epsilon_r == 6.2);
    CHECK(t.lookup(3.5e9, 9).epsilon_r == 5.31);  // unknown index -> default

    const auto path = std::filesystem::temp_directory_path() / "losray_materials.txt";
    t.save(path.string());
    const MaterialTable back = MaterialTable::load(path.string());
    CHECK(back.lookup(28e9, 0).sigma == 0.5);
}

TEST_CASE("path_field: Friis anchor on the direct path")
{
    PathCandidate direct;
    direct.tx = Vec3(0.0, 0.0, 1.5);
    direct.rx = Vec3(100.0, 0.0, 1.5);
    MaterialTable mats;
    const PathField pf = path_field(direct, mats, 3.5e9, Polarization::soft);

    const double lambda = kSpeedOfLight / 3.5e9;
    const double friis_db = 20.0 * std::log10(lambda / (4.0 * kPi * 100.0));
    const double got_db = 20.0 * std::log10(std::abs(pf.field.amplitude));
    CHECK(got_db == doctest::Approx(friis_db).epsilon(1e-12));
    CHECK(got_db == doctest::Approx(-83.33).epsilon(1e-3));
    CHECK(pf.delay_s == doctest::Approx(100.0 / kSpeedOfLight).epsilon(1e-12));
}

TEST_CASE("path_field: single PEC reflection is the unfolded Friis with a pi flip")
{
    PathCandidate p;
    p.tx = Vec3(0.0, 0.0, 1.5);
    p.rx = Vec3(100.0, 0.0, 1.5);
    p.sequence.push_back(InteractionNode{InteractionKind::reflection, 0, 0});
    p.interaction_points.emplace_back(50.0, 25.0, 1.5);
    InteractionGeom g;
    g.face0 = Vec2(1.0, 0.0);  // wall along y=25
    g.face1 = Vec2(0.0, -1.0); // outward toward the link
    p.interaction_geoms.push_back(g);

    MaterialTable mats;
    mats.set(3.5e9, 0, Material{1.0, 1e12}); // effectively PEC
    const PathField pf = path_field(p, mats, 3.5e9, Polarization::soft);

    const double d_unf = 2.0 * std::sqrt(50.0 * 50.0 + 25.0 * 25.0);
    const double lambda = kSpeedOfLight / 3.5e9;
    CHECK(std::abs(pf.field.amplitude) ==
          doctest::Approx(lambda / (4.0 * kPi * d_unf)).epsilon(1e-4));
    REQUIRE(pf.field.coefficients.size() == 1);
    CHECK(std::abs(pf.field.coefficients[0] - Complex(-1.0, 0.0)) < 1e-3);
    CHECK(pf.delay_s == doctest::Approx(d_unf / kSpeedOfLight).epsilon(1e-12));
}

TEST_CASE("path_field: 300 m delay")
{
    PathCandidate direct;
    direct.tx = Vec3(0.0, 0.0, 1.5);
    direct.rx = Vec3(300.0, 0.0, 1.5);
    MaterialTable mats;
    const PathField pf = path_field(direct, mats, 3.5e9, Polarization::soft);
    CHECK(pf.delay_s == doctest::Approx(1.0007e-6).epsilon(1e-4));
}
