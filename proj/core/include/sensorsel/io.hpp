#ifndef SENSORSEL_IO_HPP
#define SENSORSEL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include <sensorsel/dmd.hpp>
#include <sensorsel/reconstruction.hpp>

namespace sensorsel {

/// Text matrix format:
///
///   # rows=2
///   # cols=2
///   # complex=false
///   # kind=matrix
///   # meta.<key>=<value>      (optional, any number)
///   1.0000000000000000e0,0.0000000000000000e0
///   ...
///
/// Complex matrices interleave re,im per column. Paths ending in `.gz` are
/// read and written through zlib.
struct MatrixFile {
  std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> data;
  std::string kind = "matrix";
  std::map<std::string, std::string> metadata;

  bool is_complex() const noexcept { return std::holds_alternative<Eigen::MatrixXcd>(data); }
};

std::string format_matrix(const MatrixFile& file);
/// Throws ParseError (with a 1-based line number where applicable).
MatrixFile parse_matrix(std::string_view text);

MatrixFile load_matrix_file(const std::filesystem::path& path);
void save_matrix_file(const std::filesystem::path& path, const MatrixFile& file);

/// Real matrix; throws ParseError for complex files.
Eigen::MatrixXd load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                 std::string kind = "matrix");
void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m,
                 std::string kind = "matrix");

/// A single row or column, flattened.
Eigen::VectorXd load_vector(const std::filesystem::path& path);

/// Bases carry their kind name in `kind=` and provenance as `meta.` lines.
Basis load_basis(const std::filesystem::path& path);
void save_basis(const std::filesystem::path& path, const Basis& basis);

/// Non-negative integers separated by commas, blanks or newlines; `#` starts
/// a comment.
std::vector<Index> parse_index_list(std::string_view text);
std::vector<Index> load_index_list(const std::filesystem::path& path);

/// Whole-file read/write with transparent gzip by extension.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Stores modes_re / modes_im matrix files, `eigenvalues.csv`
/// (re,im,omega_re,omega_im,amp_re,amp_im) and `meta.yaml` (dt, r, n, m).
void save_dmd_model(const std::filesystem::path& dir, const DMDModel& model);
DMDModel load_dmd_model(const std::filesystem::path& dir);

/// YAML experiment description:
///
///   data: snapshots.csv          # matrix file, columns are snapshots
///   basis: {kind: svd, rank: 10, oversample: 10, dt: 1.0}
///   cost: cost.csv               # optional; or {builtin: zero}
///   restrict: allowed.txt        # optional
///   gammas: [0, 0.5, 1]          # or "start:stop:count"
///   p: 10
///   trials: 100                  # random baseline arrays
///   seed: 0
///   output_dir: out
///
/// Relative paths are resolved against the config file's directory.
struct ExperimentConfig {
  std::filesystem::path data;
  std::string basis_kind = "svd";
  Index rank = 0;  ///< 0 means rank = p
  Index oversample = 10;
  double dt = 1.0;
  std::optional<std::filesystem::path> cost;
  std::optional<std::filesystem::path> restrict_to;
  std::vector<double> gammas{0.0};
  Index p = 1;
  Index trials = 0;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
};

/// Throws ParseError for malformed documents and InvalidArgument for
/// inconsistent values or missing files.
ExperimentConfig parse_experiment_config(std::string_view yaml,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// `start:stop:count` (inclusive, evenly spaced) or a comma list.
std::vector<double> parse_gamma_grid(std::string_view text);

/// Everything needed to re-run a command and check its outputs.
struct RunManifest {
  std::string command;  ///< "demo" or "experiment"
  std::string name;     ///< demo name, or the config path for experiments
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  std::string version;
  /// Output file name -> FNV-1a 64 digest (hex) of its bytes.
  std::map<std::string, std::string> outputs;
};

std::string format_manifest(const RunManifest& manifest);
RunManifest parse_manifest(std::string_view yaml);
void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& path);

/// Library version string, e.g. "0.1.0".
std::string_view library_version() noexcept;

/// FNV-1a 64-bit digest as 16 lowercase hex digits.
std::string digest(std::string_view bytes);

}  // namespace sensorsel

#endif  // SENSORSEL_IO_HPP
