#pragma once

#include <array>
#include <string>
#include <vector>

#include "cellwall/chemistry.hpp"
#include "cellwall/macro_solver.hpp"
#include "cellwall/tensor4.hpp"

namespace cellwall::io {

/// Six lines of six fields, rows in Voigt order (11, 22, 33, 23, 13, 12),
/// MPa, 17 significant digits. Lines starting with '#' are comments.
std::string format_voigt_table(const Voigt6& c, const std::string& comment = "");
void write_voigt_table(const Tensor4& t, const std::string& path, const std::string& comment = "");
Voigt6 parse_voigt_table(const std::string& text);
Voigt6 read_voigt_table(const std::string& path);

struct TrajectoryRow {
    double time = 0.0;
    std::array<double, chemistry::kNumSpecies> min{}, mean{}, max{};
    double strain_norm = 0.0;
    int inner_iters = 0;
    double contraction_ratio = 0.0;
};

std::string trajectory_header();
std::string format_trajectory_row(const TrajectoryRow& row);
/// Header plus one line per row.
void write_trajectory(const std::vector<TrajectoryRow>& rows, const std::string& path);
std::vector<TrajectoryRow> read_trajectory(const std::string& path);

/// Self-describing text snapshot: header with the macro mesh reference,
/// then one block per nodal field. Values at 17 significant digits, which
/// round-trip doubles exactly.
std::string format_snapshot(const macro::MacroState& state, const MacroMesh& mesh);
macro::MacroState parse_snapshot(const std::string& text, const MacroMesh& mesh);
void write_snapshot(const macro::MacroState& state, const MacroMesh& mesh, const std::string& path);
macro::MacroState read_snapshot(const std::string& path, const MacroMesh& mesh);

/// Whole-file helpers; IoError names the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Shortest decimal that is still 17 significant digits.
std::string format_double(double v);

}  // namespace cellwall::io
