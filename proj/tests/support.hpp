#pragma once

#include <filesystem>
#include <string>

#include "cellwall/homogenization.hpp"
#include "cellwall/macro_solver.hpp"
#include "cellwall/materials.hpp"
#include "cellwall/mesh.hpp"

namespace testing {

using namespace cellwall;

// Effective model without cell solves: isotropic family, identity localization.
inline macro::EffectiveModel isotropic_model(double theta_m = 1.0, double diffusion = 1.0, double b_diffusion = 0.0) {
    macro::EffectiveModel m;
    m.family = materials::affine_family_from_anchors(8.0, materials::isotropic_tensor(8.0, 0.3), 12.0,
                                                     materials::isotropic_tensor(12.0, 0.3));
    for (int s = 0; s < 4; ++s) m.diffusion[s] = diffusion * Eigen::Matrix3d::Identity();
    m.diffusion[4] = b_diffusion * Eigen::Matrix3d::Identity();
    m.localization = homog::identity_localization(build_unit_cell_mesh(0.0, 0.25));
    m.theta_m = theta_m;
    m.matrix_poisson = 0.3;
    return m;
}

inline std::string scratch_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("cellwall-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

inline double rel(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace testing
