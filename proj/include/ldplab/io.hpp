#pragma once

#include "ldplab/grid.hpp"
#include "ldplab/trajectory.hpp"

#include <iosfwd>
#include <string>

namespace ldplab {

// Flat binary snapshot layout (little-endian throughout):
//   magic   "LDPF" (4 bytes)
//   u32     n
//   f64     period
//   u32     components
//   f64     time
//   f64[]   row-major physical grid values, component-major
// A trajectory file is a sequence of snapshots with increasing times.

void write_field(std::ostream& os, const SpectralField& f, double time);
SpectralField read_field(std::istream& is, double* time_out = nullptr);

void write_field_file(const std::string& path, const SpectralField& f, double time = 0.0);
SpectralField read_field_file(const std::string& path, double* time_out = nullptr);

void write_trajectory_file(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_file(const std::string& path);

/// CSV with header x1,x2,c0[,c1]; intended for small grids.
void write_field_csv(const std::string& path, const SpectralField& f);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace ldplab
