#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bsq/experiment.hpp"
#include "bsq/lagrangian.hpp"

namespace bsq {

// All writers are deterministic: fixed column orders, "%.17g" number
// formatting, LF line endings, no timestamps.  Raw dumps are native-endian
// float64 (little-endian on every supported target), row-major with x1
// fastest; vector fields store the x1 plane then the x2 plane.  Every raw
// file <p> gets a sidecar <p>.json with {n, box_length, kind}.

void dump_field(const std::filesystem::path& path, const ScalarField& f);
void dump_field(const std::filesystem::path& path, const VectorField2& f,
                const std::string& kind = "vector2");

ScalarField load_scalar(const std::filesystem::path& path);
VectorField2 load_vector(const std::filesystem::path& path);

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t);
void write_experiment_csv(const std::filesystem::path& path,
                          const std::vector<ExperimentRecord>& records);
void write_experiment_summary(const std::filesystem::path& path,
                              const ExperimentSummary& s);

std::string format_double(double x); // "%.17g"

} // namespace bsq
