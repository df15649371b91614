#pragma once

#include <string>

#include "sdg/bsde.hpp"
#include "sdg/game.hpp"
#include "sdg/pide.hpp"

namespace sdg {

// CSV layouts are part of the tool's contract; see docs/file_formats.md.
void write_paths_csv(const std::string& path, const std::vector<PathBundle>& bundles,
                     const LevyMeasure& measure);
void write_trajectory_csv(const std::string& path, const ProblemSpec& spec,
                          const ForwardTrajectory& traj);
void write_bsde_csv(const std::string& path, const BsdeSolution& sol);
void write_value_csv(const std::string& path, const ValueField& field);
void write_pide_csv(const std::string& path, const PideSolution& sol);

// Compact binary dump shared by value fields and backward solutions:
// magic "SDGB", u32 version, u8 kind, dims, grid spec, row-major f64 fields.
void write_value_binary(const std::string& path, const ValueField& field);
void write_bsde_binary(const std::string& path, const BsdeSolution& sol);
ValueField read_value_binary(const std::string& path);

} // namespace sdg
