#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "predrep/mdp.hpp"

namespace predrep {

// Serialization helpers shared by the CLI and tests.  Matrices travel as
// row-major CSV with '#' comment headers; structured data as JSON.  All JSON
// emitted for reports uses ordered_json so identical inputs give identical
// bytes.

// ======================== CSV ========================

/// Write a matrix row-major; each entry of header becomes a leading
/// "# ..." comment line.  Values use max_digits10 so round-trips are exact.
void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});

/// Read a matrix written by write_csv_matrix ('#' lines and blanks skipped).
Eigen::MatrixXd read_csv_matrix(const std::string& path);

// ======================== JSON ========================

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::ordered_json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

/// Full dump of an MDP (gamma, per-action transition matrices, rewards,
/// terminal mask) for oracle cross-checks in other tools.
nlohmann::ordered_json mdp_to_json(const TabularMDP& mdp);
TabularMDP mdp_from_json(const nlohmann::json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::ordered_json& j);

}  // namespace predrep
