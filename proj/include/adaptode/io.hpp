#pragma once

#include "adaptode/lorenz.hpp"
#include "adaptode/metrics.hpp"
#include "adaptode/net.hpp"
#include "adaptode/training.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

namespace adaptode::io {

/// Shortest "%.17g" rendering; parses back to the identical double.
std::string format_double(double v);

// Trajectory CSV: '#'-prefixed `key=value` metadata lines, then the header
// `i,x1,x2,x3` and one row per point.
void write_trajectory_csv(std::ostream& os, const Trajectory& t);
/// Throws SchemaError with the offending line number.
Trajectory read_trajectory_csv(std::istream& is, const std::string& source = "<stream>");
void save_trajectory(const std::filesystem::path& path, const Trajectory& t);
Trajectory load_trajectory(const std::filesystem::path& path);

// Training log CSV: `epoch,loss,accepted_fraction,mean_new_steps,min_new_steps,max_new_steps`;
// the step columns are empty for epochs without rejections.
void write_train_log_csv(std::ostream& os, std::span<const EpochRecord> log);
void save_train_log(const std::filesystem::path& path, std::span<const EpochRecord> log);

// Report CSV: `i,x1,x2,x3,mse,oracle_mse,n_steps`; oracle_mse and n_steps are
// empty at i = 0 (and n_steps everywhere when unknown). Rows [begin, end).
void write_report_csv(std::ostream& os, const EvalReport& r, std::size_t begin = 0, std::size_t end = SIZE_MAX);
void save_report(const std::filesystem::path& path, const EvalReport& r, std::size_t begin = 0,
                 std::size_t end = SIZE_MAX);

// Checkpoint: JSON object with `dims`, `activation` ("relu") and `layers`,
// each layer holding `w` (row-major nested arrays) and `b`.
std::string checkpoint_to_json(const MlpParams& p);
/// Throws SchemaError on any structural problem.
MlpParams checkpoint_from_json(const std::string& text);
void save_checkpoint(const std::filesystem::path& path, const MlpParams& p);
MlpParams load_checkpoint(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

} // namespace adaptode::io
