#include "rrnet/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rrnet/error.hpp"
#include "rrnet/format.hpp"

namespace rrnet {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.emplace_back(trim(cur));
  return out;
}

ColumnScale fit_scale(const Eigen::VectorXd& col) {
  ColumnScale s;
  s.min = col.minCoeff();
  s.range = col.maxCoeff() - s.min;
  return s;
}

}  // namespace

ScalePolicy parse_scale_policy(const std::string& text) {
  if (text == "none") return ScalePolicy::None;
  if (text == "covariates" || text == "x") return ScalePolicy::Covariates;
  if (text == "all") return ScalePolicy::All;
  throw InvalidArgument("unknown scale policy '" + text + "' (expected none, covariates or all)");
}

Eigen::MatrixXd LoadedCsv::unscale_x(const Eigen::MatrixXd& scaled) const {
  if (feature_scales.empty()) return scaled;
  if (static_cast<std::size_t>(scaled.cols()) != feature_scales.size())
    throw ShapeError(0, "expected " + std::to_string(feature_scales.size()) + " columns");
  Eigen::MatrixXd out(scaled.rows(), scaled.cols());
  for (Eigen::Index j = 0; j < scaled.cols(); ++j)
    for (Eigen::Index i = 0; i < scaled.rows(); ++i)
      out(i, j) = feature_scales[static_cast<std::size_t>(j)].inverse(scaled(i, j));
  return out;
}

Eigen::VectorXd LoadedCsv::unscale_y(const Eigen::VectorXd& scaled) const {
  Eigen::VectorXd out(scaled.size());
  for (Eigen::Index i = 0; i < scaled.size(); ++i) out[i] = response_scale.inverse(scaled[i]);
  return out;
}

LoadedCsv parse_csv(const std::string& text, const std::string& source, const std::string& response,
                    ScalePolicy policy) {
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw ParseError(source, row, 0, "missing header row");

  std::size_t resp_col = response.empty() ? header.size() - 1 : header.size();
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == response) resp_col = j;
  if (resp_col == header.size()) {
    const auto k = parse_int<std::size_t>(response);
    if (k && *k >= 1 && *k <= header.size()) resp_col = *k - 1;
  }
  if (resp_col == header.size()) throw ParseError(source, 1, 0, "response column '" + response + "' not found");
  if (header.size() < 2) throw ParseError(source, 1, 0, "need at least one covariate and a response column");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw ParseError(source, row, std::min(fields.size(), header.size()) + 1,
                       "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    std::vector<double> vals(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto v = parse_double(fields[j]);
      if (!v) throw ParseError(source, row, j + 1, "non-numeric value '" + fields[j] + "' in column '" + header[j] + "'");
      vals[j] = *v;
      if (!std::isfinite(vals[j]))
        throw ParseError(source, row, j + 1, "non-finite value in column '" + header[j] + "'");
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ParseError(source, row, 0, "no data rows");

  LoadedCsv out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(header.size() - 1);
  out.data.x.resize(n, p);
  out.data.y.resize(n);
  out.data.contaminated.assign(rows.size(), false);
  out.response_name = header[resp_col];
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != resp_col) out.feature_names.push_back(header[j]);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j == resp_col)
        out.data.y[i] = r[j];
      else
        out.data.x(i, c++) = r[j];
    }
  }

  auto note_constant = [&](const std::string& name, const ColumnScale& s) {
    if (s.range == 0.0) out.warnings.push_back("column '" + name + "' is constant; scaled to 0");
  };
  if (policy != ScalePolicy::None) {
    for (Eigen::Index j = 0; j < p; ++j) {
      ColumnScale s = fit_scale(out.data.x.col(j));
      note_constant(out.feature_names[static_cast<std::size_t>(j)], s);
      for (Eigen::Index i = 0; i < n; ++i) out.data.x(i, j) = s.forward(out.data.x(i, j));
      out.feature_scales.push_back(s);
    }
  }
  if (policy == ScalePolicy::All) {
    out.response_scale = fit_scale(out.data.y);
    note_constant(out.response_name, out.response_scale);
    for (Eigen::Index i = 0; i < n; ++i) out.data.y[i] = out.response_scale.forward(out.data.y[i]);
  }
  return out;
}

LoadedCsv load_csv(const std::string& path, const std::string& response, ScalePolicy policy) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open data file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str(), path, response, policy);
}

}  // namespace rrnet
