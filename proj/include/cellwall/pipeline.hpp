#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cellwall/config.hpp"
#include "cellwall/io.hpp"
#include "cellwall/macro_solver.hpp"

namespace cellwall::pipeline {

/// 16 hex digits of a stable hash of canonical_cell_inputs(config).
std::string fingerprint(const io::SimConfig& config);

struct PreparedModel {
    macro::EffectiveModel model;
    std::string fingerprint;
    std::uint64_t mesh_id = 0;
    bool cache_hit = false;
    int cell_solves = 0;  ///< corrector sets solved by this call
    std::vector<std::string> warnings;
};

/// Cell mesh, anchor solves, localization solve and scalar correctors, or
/// the cached result when `config.output.cache_dir` holds a file for the
/// same fingerprint. The cache is one text file per fingerprint,
/// `effective-<fingerprint>.txt`; a file whose recorded fingerprint or
/// format does not match is ignored with a warning and rewritten.
PreparedModel prepare_effective_model(const io::SimConfig& config);

std::string format_effective_model(const macro::EffectiveModel& model, const std::string& fingerprint);
/// Returns nullopt (with a reason) when the text is not a cache file for
/// `fingerprint`.
std::optional<macro::EffectiveModel> parse_effective_model(const std::string& text, const std::string& fingerprint,
                                                           std::string* reason = nullptr);

macro::SolverSettings solver_settings(const io::SimConfig& config);

io::TrajectoryRow trajectory_row(const macro::CoupledSolver& solver, const macro::MacroState& state,
                                 const macro::StepReport* report);

struct RunOptions {
    std::optional<std::string> restart_snapshot;
    std::ostream* log = nullptr;
};

struct RunResult {
    bool completed = false;
    std::vector<io::TrajectoryRow> rows;
    macro::MacroState final_state;
    std::string failure;  ///< message when not completed
    PreparedModel prepared;
};

/// Full coupled run. Writes into config.output.directory: config.json (the
/// echoed config), trajectory.csv, snapshots/step-NNNNNN.txt at the
/// configured cadence, final.txt, and summary.json. A step error stops the
/// run after writing the partial trajectory and failure.json.
RunResult run_simulation(const io::SimConfig& config, const RunOptions& options = {});

}  // namespace cellwall::pipeline
