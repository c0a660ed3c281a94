#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ewad/core/types.hpp"

namespace ewad {

// One synthetic (or imported) problem instance on disk.  Directory layout:
//   manifest.json      dimensions, file names, generation parameters
//   observations.csv   row,col,count            (0-based indices)
//   rates.csv          dense rate table, one comma-separated line per row
//   mask.csv           row,col                  (0-based indices, optional)
// All files carry a leading comment line stating the 0-based convention.
struct InstanceData {
  SparseObservations obs;
  std::optional<RateMatrix> rates;
  std::optional<AnomalyMask> mask;
  std::optional<ModelParams> params;
  std::optional<GenerationSpec> generation;
};

void write_instance(const std::filesystem::path& dir, const InstanceData& inst);
InstanceData read_instance(const std::filesystem::path& dir);

// Stand-alone tables (also used inside the instance directory).
void write_observations_csv(const std::filesystem::path& file,
                            const SparseObservations& obs);
SparseObservations read_observations_csv(const std::filesystem::path& file,
                                         int rows, int cols);
void write_dense_csv(const std::filesystem::path& file, const Matrix& m);
Matrix read_dense_csv(const std::filesystem::path& file);
void write_mask_csv(const std::filesystem::path& file, const AnomalyMask& mask);
AnomalyMask read_mask_csv(const std::filesystem::path& file, int rows,
                          int cols);

// Per-entry detection output: row,col,t,f_lower,f_point,f_upper,selected.
struct DetectionRow {
  int row = 0;
  int col = 0;
  double t = 0.0;
  double f_lower = 0.0;
  double f_point = 0.0;
  double f_upper = 0.0;
  bool selected = false;
};
void write_detection_csv(const std::filesystem::path& file,
                         const std::vector<DetectionRow>& rows);

// ROC sweep output: param,fpr,tpr.
struct SweepRow {
  double param = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};
void write_sweep_csv(const std::filesystem::path& file,
                     const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& file);

// Formats a double so that reading it back reproduces the exact bits
// (shortest round-trippable decimal, C locale).
std::string format_double(double v);

}  // namespace ewad
