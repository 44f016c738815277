#include "predrep/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace predrep {

// ======================== CSV ========================

void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv_matrix: cannot open " + path);
  for (const auto& line : header) out << "# " << line << "\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ",";
      out << m(r, c);
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_csv_matrix: write failed for " + path);
}

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv_matrix: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("read_csv_matrix: ragged rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

// ======================== JSON ========================

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrix_from_json: expected array of arrays");
  Eigen::Index n_rows = static_cast<Eigen::Index>(j.size());
  if (n_rows == 0) return Eigen::MatrixXd(0, 0);
  Eigen::Index n_cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != n_cols) {
      throw std::invalid_argument("matrix_from_json: ragged rows");
    }
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
  }
  return m;
}

nlohmann::ordered_json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("vector_from_json: expected array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  }
  return v;
}

nlohmann::ordered_json mdp_to_json(const TabularMDP& mdp) {
  nlohmann::ordered_json j;
  j["gamma"] = mdp.gamma;
  j["n_states"] = mdp.n_states();
  j["n_actions"] = mdp.n_actions();
  nlohmann::ordered_json transitions = nlohmann::ordered_json::array();
  for (const auto& t : mdp.transition) transitions.push_back(matrix_to_json(t));
  j["transition"] = std::move(transitions);
  j["reward"] = vector_to_json(mdp.reward);
  nlohmann::ordered_json terminal = nlohmann::ordered_json::array();
  for (bool t : mdp.terminal) terminal.push_back(t);
  j["terminal"] = std::move(terminal);
  return j;
}

TabularMDP mdp_from_json(const nlohmann::json& j) {
  TabularMDP mdp;
  mdp.gamma = j.at("gamma").get<double>();
  for (const auto& t : j.at("transition")) mdp.transition.push_back(matrix_from_json(t));
  mdp.reward = vector_from_json(j.at("reward"));
  for (const auto& t : j.at("terminal")) mdp.terminal.push_back(t.get<bool>());
  mdp.validate();
  return mdp;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_text_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
  out << content;
  if (!out) throw std::runtime_error("write_text_file: write failed for " + path);
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_json_file: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace predrep
