#pragma once

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "idrlab/moments.hpp"
#include "idrlab/report.hpp"
#include "idrlab/sfd.hpp"
#include "idrlab/shrinkage.hpp"

namespace idrlab {

// Input problems (bad file, malformed row) are reported as ParseError so the
// CLI can map them to its input-error exit code.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace io {

inline double parse_number(const std::string& token, const std::string& path, long line) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE)
    throw ParseError(path + ":" + std::to_string(line) + ": malformed number '" + token +
                     "'");
  return v;
}

// CSV matrix: one row per frame, comma-separated columns, optional single
// leading header row starting with '#'.
inline Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line_no == 1) continue;
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": comment rows are only allowed as a single header");
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) row.push_back(parse_number(token, path, line_no));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, got " +
                       std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

inline void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

// ChannelMoments JSON: {"mean": [...], "std": [...]}
inline nlohmann::ordered_json moments_to_json(const ChannelMomentsd& m) {
  nlohmann::ordered_json j;
  j["mean"] = std::vector<double>(m.mean.data(), m.mean.data() + m.mean.size());
  j["std"] = std::vector<double>(m.std.data(), m.std.data() + m.std.size());
  return j;
}

inline ChannelMomentsd moments_from_json(const nlohmann::json& j) {
  if (!j.contains("mean") || !j.contains("std"))
    throw ParseError("moments JSON: missing 'mean' or 'std'");
  std::vector<double> mean = j.at("mean").get<std::vector<double>>();
  std::vector<double> std_v = j.at("std").get<std::vector<double>>();
  ChannelMomentsd m;
  m.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  m.std = Eigen::Map<Eigen::VectorXd>(std_v.data(), static_cast<Eigen::Index>(std_v.size()));
  m.validate();
  return m;
}

inline ChannelMomentsd read_moments_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return moments_from_json(j);
}

// SpeakerProfile JSON: {"speaker_id", "mu": [9], "sigma": [9], "clip_count"}
inline nlohmann::ordered_json profile_to_json(const sfd::SpeakerProfile& p) {
  nlohmann::ordered_json j;
  j["speaker_id"] = p.speaker_id;
  j["mu"] = std::vector<double>(p.mu.data(), p.mu.data() + 9);
  j["sigma"] = std::vector<double>(p.sigma.data(), p.sigma.data() + 9);
  j["clip_count"] = p.clip_count;
  return j;
}

inline sfd::SpeakerProfile profile_from_json(const nlohmann::json& j) {
  sfd::SpeakerProfile p;
  try {
    p.speaker_id = j.at("speaker_id").get<std::string>();
    std::vector<double> mu = j.at("mu").get<std::vector<double>>();
    std::vector<double> sigma = j.at("sigma").get<std::vector<double>>();
    if (mu.size() != 9 || sigma.size() != 9)
      throw ParseError("profile JSON: mu and sigma must have 9 entries");
    for (int i = 0; i < 9; ++i) {
      p.mu[i] = mu[static_cast<std::size_t>(i)];
      p.sigma[i] = std::max(sigma[static_cast<std::size_t>(i)], sfd::kSigmaFloorProfile);
    }
    p.clip_count = j.at("clip_count").get<long>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("profile JSON: ") + e.what());
  }
  return p;
}

inline sfd::SpeakerProfile read_profile_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return profile_from_json(j);
}

// ShrinkagePolicy JSON: {"kind": "...", "params": {...}}
inline ShrinkagePolicy policy_from_json(const nlohmann::json& j) {
  ShrinkagePolicy p;
  try {
    p.kind = policy_kind_from_string(j.at("kind").get<std::string>());
    const nlohmann::json params =
        j.contains("params") ? j.at("params") : nlohmann::json::object();
    switch (p.kind) {
      case PolicyKind::Fixed:
        p.alpha = params.at("alpha").get<double>();
        break;
      case PolicyKind::LengthAware:
        if (params.contains("alpha_min")) p.alpha_min = params.at("alpha_min").get<double>();
        if (params.contains("alpha_max")) p.alpha_max = params.at("alpha_max").get<double>();
        if (params.contains("lambda_seconds"))
          p.lambda_seconds = params.at("lambda_seconds").get<double>();
        break;
      case PolicyKind::VarianceAware:
        p.delta_sq_estimate = params.at("delta_sq_estimate").get<double>();
        break;
      case PolicyKind::Oracle:
        p.candidates = params.at("candidates").get<std::vector<double>>();
        break;
      case PolicyKind::FullTransport:
        break;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("policy JSON: ") + e.what());
  }
  p.validate();
  return p;
}

inline nlohmann::ordered_json policy_to_json(const ShrinkagePolicy& p) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(p.kind);
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  switch (p.kind) {
    case PolicyKind::Fixed:
      params["alpha"] = p.alpha;
      break;
    case PolicyKind::LengthAware:
      params["alpha_min"] = p.alpha_min;
      params["alpha_max"] = p.alpha_max;
      params["lambda_seconds"] = p.lambda_seconds;
      break;
    case PolicyKind::VarianceAware:
      params["delta_sq_estimate"] = p.delta_sq_estimate;
      break;
    case PolicyKind::Oracle:
      params["candidates"] = p.candidates;
      params["deployable"] = false;  // upper bound, not a deployable protocol
      break;
    case PolicyKind::FullTransport:
      break;
  }
  j["params"] = params;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
}

}  // namespace io
}  // namespace idrlab
