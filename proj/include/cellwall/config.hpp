#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "cellwall/chemistry.hpp"
#include "cellwall/macro_solver.hpp"
#include "cellwall/materials.hpp"

namespace cellwall::io {

struct GeometryConfig {
    double radius = 0.25;  ///< fibril radius in the unit cell
    double h_cell = 1.0 / 32.0;  ///< cell mesh size
    std::array<double, 3> extents{1.0, 1.0, 1.0};
    std::array<int, 3> cells{4, 4, 4};
};

struct MaterialsConfig {
    double matrix_poisson = 0.3;
    materials::YoungModulusLaw law;
    materials::TransverselyIsotropicConstants fibril = materials::reference_fibril_constants();
    std::array<double, 2> anchors{8.0, 12.0};  ///< matrix moduli of the two affine anchor solves (MPa)
    double b_to_uM = 1.0;
    /// Matrix-phase diffusion tensor per species (p1, p2, n1, n2, b).
    std::array<Eigen::Matrix3d, chemistry::kNumSpecies> diffusion{
        Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Identity(),
        Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Zero()};
};

struct CouplingConfig {
    chemistry::Model model = chemistry::Model::I;
    chemistry::Variant variant = chemistry::Variant::Stress;
    std::optional<double> delta;  ///< unset: a tenth of the x1 extent
    bool normalize_ball_average = false;
    bool normalize_effective_by_theta_m = false;
    std::optional<double> frozen_signal;
    std::optional<double> localization_modulus;  ///< unset: E(b0)
};

struct SteppingConfig {
    macro::TimeStepperPolicy policy;
    double t_end = 1.0;
};

struct OutputConfig {
    std::string directory = "out";
    int snapshot_every = 0;  ///< 0 writes only the final snapshot
    std::uint64_t seed = 0;
    int threads = 1;
    std::string cache_dir;  ///< empty disables the effective-model cache
};

struct SimConfig {
    GeometryConfig geometry;
    MaterialsConfig materials;
    chemistry::KineticsParams kinetics;
    chemistry::FluxParams fluxes;
    macro::Loads loads{0.2, 0.1, 0.1};
    chemistry::SpeciesState initial{1.0, 0.5, 0.5, 1.0, 2.48};
    CouplingConfig coupling;
    SteppingConfig stepping;
    OutputConfig output;
};

/// Parses JSON text. Missing keys take defaults; unknown keys, type
/// mismatches and range violations are all collected and thrown together
/// as a ConfigError, each prefixed with its key path.
SimConfig parse_config_text(const std::string& text);
/// Reads and parses a file; IoError when it cannot be read.
SimConfig parse_config(const std::string& path);

/// Range checks on an assembled config (called by the parsers).
void validate_config(const SimConfig& config);

/// Complete JSON echo of every field; parse_config_text(echo) == config.
std::string echo_config(const SimConfig& config);

/// Canonical JSON of the geometry and materials sections plus the settings
/// that determine the cell solves; input of the cache fingerprint.
std::string canonical_cell_inputs(const SimConfig& config);

/// CELLWALL_OUT and CELLWALL_THREADS, when set, replace the output directory
/// and worker count.
void apply_environment_overrides(SimConfig& config);

double effective_delta(const SimConfig& config);
double effective_localization_modulus(const SimConfig& config);

bool operator==(const SimConfig& a, const SimConfig& b);

}  // namespace cellwall::io
