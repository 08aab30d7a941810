// SPDX-License-Identifier: Apache-2.0
//
// losray - deterministic 2.5D radio-channel ray tracing engine
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "losray/em.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace losray {

namespace {

const Complex kJ(0.0, 1.0);

// 16-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlX[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                            0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                            0.9445750230732326, 0.9894009349916499};
constexpr double kGlW[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                            0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                            0.0622535239386479, 0.0271524594117541};

/// int_a^b e^{-j t^2} dt by composite Gauss-Legendre with oscillation-bounded
/// panel widths.
Complex fresnel_integral_segment(double a, double b)
{
    Complex acc(0.0, 0.0);
    double lo = a;
    while (lo < b) {
        const double h = std::min({0.45, kPi / (4.0 * std::max(lo, 1.0)), b - lo});
        const double hi = lo + h;
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        Complex panel(0.0, 0.0);
        for (int i = 0; i < 8; ++i) {
            const double tp = mid + half * kGlX[i];
            const double tm = mid - half * kGlX[i];
            panel += kGlW[i] * (std::exp(-kJ * (tp * tp)) + std::exp(-kJ * (tm * tm)));
        }
        acc += half * panel;
        lo = hi;
    }
    return acc;
}

/// int_T^inf e^{-j t^2} dt via the optimally truncated large-argument series.
Complex fresnel_integral_tail(double T)
{
    const Complex denom = 2.0 * kJ * T * T;
    Complex term(1.0, 0.0);
    Complex sum = term;
    for (int k = 1; k <= 10; ++k) {
        term *= -static_cast<double>(2 * k - 1) / denom;
        sum += term;
    }
    return std::exp(-kJ * (T * T)) / (2.0 * kJ * T) * sum;
}

} // namespace

Complex fresnel_transition(double X)
{
    if (X < 0.0)
        throw GeometryError("fresnel_transition: negative argument");
    if (X < 1e-30)
        return Complex(0.0, 0.0);

    Complex F;
    const double sx = std::sqrt(X);
    if (X < 0.3) {
        // Maclaurin series of int_0^sqrt(X) e^{-j t^2} dt.
        Complex term(1.0, 0.0);
        Complex sum(1.0, 0.0);
        for (int m = 1; m <= 24; ++m) {
            term *= -kJ * X / static_cast<double>(m);
            const Complex contrib = term / static_cast<double>(2 * m + 1);
            sum += contrib;
            if (std::abs(contrib) < 1e-18)
                break;
        }
        const Complex head = std::sqrt(kPi) / 2.0 * std::exp(-kJ * (kPi / 4.0));
        F = 2.0 * kJ * sx * std::exp(kJ * X) * (head - sx * sum);
    } else if (X <= 18.0) {
        const double T = std::sqrt(X + 40.0);
        const Complex integral = fresnel_integral_segment(sx, T) + fresnel_integral_tail(T);
        F = 2.0 * kJ * sx * std::exp(kJ * X) * integral;
    } else {
        // Large-argument expansion of F itself.
        const Complex denom = 2.0 * kJ * X;
        Complex term(1.0, 0.0);
        Complex sum = term;
        for (int k = 1; k <= 12; ++k) {
            term *= -static_cast<double>(2 * k - 1) / denom;
            sum += term;
        }
        F = sum;
    }

    // |F| <= 1 holds analytically; trim the last-ulp numerical excess.
    const double mag = std::abs(F);
    if (mag > 1.0)
        F /= mag;
    return F;
}

// ---------------------------------------------------------------------------
// Material table
// ---------------------------------------------------------------------------

void MaterialTable::set(double frequency_hz, int material_index, Material m)
{
    blocks_[frequency_hz][material_index] = m;
}

Material MaterialTable::lookup(double frequency_hz, int material_index) const
{
    if (blocks_.empty())
        return Material{};
    auto it = blocks_.lower_bound(frequency_hz);
    if (it == blocks_.end())
        --it;
    else if (it != blocks_.begin()) {
        auto prev = std::prev(it);
        if (frequency_hz - prev->first < it->first - frequency_hz)
            it = prev;
    }
    auto mit = it->second.find(material_index);
    return mit == it->second.end() ? Material{} : mit->second;
}

MaterialTable MaterialTable::load(const std::string &path)
{
    std::ifstream is(path);
    if (!is)
        throw ParseError("cannot open material table: " + path);
    MaterialTable table;
    std::string tok;
    double freq = kDefaultFrequencyHz;
    bool have_block = false;
    while (is >> tok) {
        if (tok == "frequency_hz") {
            if (!(is >> freq) || freq <= 0.0)
                throw ParseError("material table: bad frequency header");
            have_block = true;
            continue;
        }
        if (!have_block)
            throw ParseError("material table must start with a frequency_hz header");
        Material m;
        int idx;
        try {
            idx = std::stoi(tok);
        } catch (const std::exception &) {
            throw ParseError("material table: bad material index '" + tok + "'");
        }
        if (!(is >> m.epsilon_r >> m.sigma) || m.epsilon_r < 1.0 || m.sigma < 0.0)
            throw ParseError("material table: bad material row");
        table.set(freq, idx, m);
    }
    return table;
}

void MaterialTable::save(const std::string &path) const
{
    std::ofstream os(path);
    if (!os)
        throw ParseError("cannot open for writing: " + path);
    char buf[96];
    for (const auto &[freq, mats] : blocks_) {
        std::snprintf(buf, sizeof(buf), "frequency_hz %.17g\n", freq);
        os << buf;
        for (const auto &[idx, m] : mats) {
            std::snprintf(buf, sizeof(buf), "%d %.17g %.17g\n", idx, m.epsilon_r, m.sigma);
            os << buf;
        }
    }
}

// ---------------------------------------------------------------------------
// Reflection and diffraction coefficients
// ---------------------------------------------------------------------------

Complex fresnel_reflection_grazing(const Material &material, double frequency_hz, double grazing_angle,
                                   Polarization polarization)
{
    if (frequency_hz <= 0.0)
        throw ConfigError("fresnel_reflection: frequency must be positive");
    const Complex eps_c(material.epsilon_r, -material.sigma / (kTwoPi * frequency_hz * kEps0));
    const double sin_g = std::abs(std::sin(grazing_angle));
    const double cos2_g = 1.0 - sin_g * sin_g;
    const Complex root = std::sqrt(eps_c - cos2_g);
    if (polarization == Polarization::soft)
        return (sin_g - root) / (sin_g + root);
    return (root - eps_c * sin_g) / (root + eps_c * sin_g);
}

Complex fresnel_reflection(const Material &material, double frequency_hz, double incidence_angle,
                           Polarization polarization)
{
    if (incidence_angle < 0.0 || incidence_angle >= kPi / 2.0)
        throw GeometryError("fresnel_reflection: incidence angle must lie in [0, pi/2)");
    return fresnel_reflection_grazing(material, frequency_hz, kPi / 2.0 - incidence_angle, polarization);
}

namespace {

constexpr double kPoleWindow = 0.05 * kPi / 180.0;

/// One cot * F product of the four-term coefficient; sign s selects the
/// (pi + s*beta) branch. Near its pole the regularized limit
/// n e^{j pi/4} [sqrt(2 pi k L) sgn(eps) - 2 k L eps e^{j pi/4}] applies,
/// with eps the signed distance to the pole.
Complex utd_term(double n, double kL, double beta, double s)
{
    const double N = std::round((beta + s * kPi) / (kTwoPi * n));
    const double pole_beta = kTwoPi * n * N - s * kPi;
    const double delta = beta - pole_beta;
    if (std::abs(delta) < kPoleWindow) {
        const double eps = s * delta;
        const double sgn = eps >= 0.0 ? 1.0 : -1.0;
        const Complex e4 = std::exp(kJ * (kPi / 4.0));
        return n * e4 * (std::sqrt(kTwoPi * kL) * sgn - 2.0 * kL * eps * e4);
    }
    const double a = 2.0 * std::pow(std::cos((kTwoPi * n * N - beta) / 2.0), 2);
    const double cot = 1.0 / std::tan((kPi + s * beta) / (2.0 * n));
    return cot * fresnel_transition(kL * a);
}

} // namespace

Complex utd_diffraction(const WedgeGeometry &geometry, const Material &material, double frequency_hz,
                        Polarization polarization)
{
    const double n = geometry.exterior_angle_factor;
    if (n < 1.0 - 1e-9 || n > 2.0 + 1e-9)
        throw GeometryError("utd_diffraction: exterior angle factor outside [1, 2]");
    const double k = geometry.wavenumber;
    const double L = geometry.distance_parameter;
    if (k <= 0.0 || L <= 0.0)
        throw GeometryError("utd_diffraction: wavenumber and distance parameter must be positive");
    const double kL = k * L;
    const double beta_minus = geometry.phi - geometry.phi_prime;
    const double beta_plus = geometry.phi + geometry.phi_prime;

    const Complex r0 = fresnel_reflection_grazing(material, frequency_hz, geometry.phi_prime, polarization);
    const Complex rn =
        fresnel_reflection_grazing(material, frequency_hz, n * kPi - geometry.phi, polarization);

    const Complex sum = utd_term(n, kL, beta_minus, +1.0) + utd_term(n, kL, beta_minus, -1.0) +
                        r0 * utd_term(n, kL, beta_plus, -1.0) + rn * utd_term(n, kL, beta_plus, +1.0);

    const Complex front = -std::exp(-kJ * (kPi / 4.0)) / (2.0 * n * std::sqrt(kTwoPi * k));
    return front * sum;
}

Complex clamp_diffracted(Complex e_d, double e_i_magnitude)
{
    if (e_i_magnitude < 0.0)
        throw GeometryError("clamp_diffracted: negative incident magnitude");
    const double mag = std::abs(e_d);
    const double cap = 0.5 * e_i_magnitude;
    if (mag <= cap || mag == 0.0)
        return e_d;
    return e_d * (cap / mag);
}

double forward_scatter_loss(double theta)
{
    const double deg = theta * 180.0 / kPi;
    if (deg < -1e-12 || deg > 30.0 + 1e-12)
        throw std::domain_error("forward_scatter_loss: deflection angle outside [0, 30] degrees");
    return 6.02 + (30.0 - 6.02) / 30.0 * (30.0 - std::clamp(deg, 0.0, 30.0));
}

// ---------------------------------------------------------------------------
// Per-path field synthesis
// ---------------------------------------------------------------------------

namespace {

double ccw_angle_between(const Vec2 &from, const Vec2 &to)
{
    double a = std::atan2(to.y(), to.x()) - std::atan2(from.y(), from.x());
    if (a < 0.0)
        a += kTwoPi;
    return a;
}

} // namespace

double PathCandidate::unfolded_length() const
{
    double len = 0.0;
    Vec3 prev = tx;
    for (const Vec3 &p : interaction_points) {
        len += (p - prev).norm();
        prev = p;
    }
    len += (rx - prev).norm();
    return len;
}

PathField path_field(const PathCandidate &path, const MaterialTable &materials, double frequency_hz,
                     Polarization polarization)
{
    if (frequency_hz <= 0.0)
        throw ConfigError("path_field: frequency must be positive");
    if (path.sequence.size() != path.interaction_points.size() ||
        path.sequence.size() != path.interaction_geoms.size())
        throw GeometryError("path_field: inconsistent path candidate");

    const double lambda = kSpeedOfLight / frequency_hz;
    const double k = kTwoPi / lambda;

    std::vector<Vec3> pts;
    pts.reserve(path.sequence.size() + 2);
    pts.push_back(path.tx);
    for (const Vec3 &p : path.interaction_points)
        pts.push_back(p);
    pts.push_back(path.rx);

    double d_total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        d_total += (pts[i + 1] - pts[i]).norm();
    if (d_total <= kEpsGeo)
        throw GeometryError("path_field: degenerate path");

    PathField out;
    Complex product(1.0, 0.0);
    for (std::size_t i = 0; i < path.sequence.size(); ++i) {
        const InteractionNode &node = path.sequence[i];
        const InteractionGeom &geom = path.interaction_geoms[i];
        const Vec3 &prev = pts[i];
        const Vec3 &here = pts[i + 1];
        const Vec3 &next = pts[i + 2];
        const double s_in = (here - prev).norm();
        const double s_out = (next - here).norm();
        Complex c(0.0, 0.0);
        if (s_in > kEpsGeo && s_out > kEpsGeo) {
            const Material mat = materials.lookup(frequency_hz, node.material_index);
            if (node.kind == InteractionKind::reflection) {
                const Vec3 d_in = (here - prev) / s_in;
                const Vec3 normal(geom.face1.x(), geom.face1.y(), 0.0);
                const double cos_inc = std::clamp(std::abs(d_in.dot(normal)), 0.0, 1.0);
                const double theta = std::acos(cos_inc);
                c = fresnel_reflection(mat, frequency_hz, std::min(theta, kPi / 2.0 - 1e-12),
                                       polarization);
            } else {
                Vec2 d_in2 = (here - prev).head<2>();
                Vec2 d_out2 = (next - here).head<2>();
                if (d_in2.norm() > kEpsGeo && d_out2.norm() > kEpsGeo) {
                    d_in2.normalize();
                    d_out2.normalize();
                    const double deflection =
                        std::acos(std::clamp(d_in2.dot(d_out2), -1.0, 1.0));
                    if (deflection < kForwardScatterMaxRad) {
                        c = Complex(std::pow(10.0, -forward_scatter_loss(deflection) / 20.0), 0.0);
                    } else {
                        WedgeGeometry w;
                        w.exterior_angle_factor = geom.wedge_n;
                        const double span = geom.wedge_n * kPi;
                        w.phi_prime = std::clamp(ccw_angle_between(geom.face0, -d_in2), 0.0, span);
                        w.phi = std::clamp(ccw_angle_between(geom.face0, d_out2), 0.0, span);
                        w.distance_parameter = s_in * s_out / (s_in + s_out);
                        w.wavenumber = k;
                        const Complex d_coef = utd_diffraction(w, mat, frequency_hz, polarization);
                        c = clamp_diffracted(d_coef / std::sqrt(w.distance_parameter), 1.0);
                    }
                }
            }
        }
        out.field.coefficients.push_back(c);
        product *= c;
    }

    out.field.amplitude = lambda / (4.0 * kPi * d_total) * std::exp(-kJ * (k * d_total)) * product;
    out.delay_s = d_total / kSpeedOfLight;
    return out;
}

} // namespace losray
