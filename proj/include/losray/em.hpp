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

#pragma once

#include "losray/tracer.hpp"

#include <map>

namespace losray {

/// Lossy dielectric: complex permittivity eps_r' - j sigma / (2 pi f eps0).
struct Material {
    double epsilon_r = 5.31; ///< relative permittivity, real part (3.5 GHz default)
    double sigma = 0.0326;   ///< conductivity [S/m]
};

inline constexpr double kDefaultFrequencyHz = 3.5e9;

/// Per-frequency-block material lookup. Unknown indices fall back to the
/// default material; lookups pick the nearest frequency block.
class MaterialTable {
public:
    void set(double frequency_hz, int material_index, Material m);
    Material lookup(double frequency_hz, int material_index) const;
    bool empty() const { return blocks_.empty(); }

    /// Text format: "frequency_hz <f>" header lines, then
    /// "material_index epsilon_r sigma" rows.
    static MaterialTable load(const std::string &path);
    void save(const std::string &path) const;

private:
    std::map<double, std::map<int, Material>> blocks_;
};

enum class Polarization { soft, hard };

/// Wedge diffraction geometry in the Keller cone plane. Angles are measured
/// from the exterior start face, sweeping through the exterior region, so
/// valid values lie in [0, n*pi].
struct WedgeGeometry {
    double exterior_angle_factor = 1.5; ///< n, wedge exterior angle = n*pi
    double phi = 0.0;                   ///< observation angle [rad]
    double phi_prime = 0.0;             ///< incidence angle [rad]
    double distance_parameter = 1.0;    ///< L = s s' / (s + s') [m]
    double wavenumber = 2.0 * kPi * kDefaultFrequencyHz / kSpeedOfLight; ///< k [rad/m]
};

struct FieldContribution {
    Complex amplitude{0.0, 0.0}; ///< relative to a unit-Friis direct path
    std::vector<Complex> coefficients; ///< one entry per interaction
};

/// Fresnel transition function F(X) = 2j sqrt(X) e^{jX} int_{sqrt(X)}^inf
/// e^{-j t^2} dt, relative error <= 1e-6, |F| <= 1, F -> 1 as X -> inf.
Complex fresnel_transition(double X);

/// Reflection off a lossy dielectric half-space; incidence_angle measured
/// from the surface normal in [0, pi/2). Both polarizations agree at normal
/// incidence; |Gamma| -> 1 at grazing.
Complex fresnel_reflection(const Material &material, double frequency_hz, double incidence_angle,
                           Polarization polarization);

/// Same coefficient parameterized by the grazing angle to the face plane
/// (the form used by the wedge face terms).
Complex fresnel_reflection_grazing(const Material &material, double frequency_hz, double grazing_angle,
                                   Polarization polarization);

/// Four-term Luebbers diffraction coefficient with face reflection factors
/// {1, 1, R_0, R_n}; the shadow/reflection boundary poles are evaluated via
/// their regularized limits inside a 0.05 degree window.
Complex utd_diffraction(const WedgeGeometry &geometry, const Material &material, double frequency_hz,
                        Polarization polarization);

/// Envelope clamp: caps |e_d| at half the incident magnitude, preserving phase.
Complex clamp_diffracted(Complex e_d, double e_i_magnitude);

inline constexpr double kForwardScatterMaxRad = 30.0 * kPi / 180.0;

/// Monotonic log-domain attenuation substituted for the oscillatory UTD
/// value at deflection angles up to 30 degrees: 6.02 dB at the limit
/// (matching the envelope clamp), 30 dB at straight-through.
double forward_scatter_loss(double theta);

struct PathField {
    FieldContribution field;
    double delay_s = 0.0;
};

/// Complex path amplitude: free-space factor of the unfolded length times
/// the per-interaction coefficients (Fresnel reflections; UTD diffractions
/// with the envelope clamp and forward-scatter smoothing). The amplitude
/// convention reproduces Friis exactly on the isolated direct path:
/// |a|^2 = (lambda / (4 pi d))^2.
PathField path_field(const PathCandidate &path, const MaterialTable &materials, double frequency_hz,
                     Polarization polarization);

} // namespace losray
