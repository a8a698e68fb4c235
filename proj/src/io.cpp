#include "smnp/io.hpp"

#include "smnp/errors.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace smnp {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t");
    const auto last = cell.find_last_not_of(" \t");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && begin != end;
}

std::string where(const std::string& source, std::size_t row, const std::string& column) {
  return source + ": row " + std::to_string(row) + ", column '" + column + "'";
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

MatrixXd json_matrix(const json& j, Eigen::Index rows, Eigen::Index cols) {
  MatrixXd m(rows, cols);
  if (j.size() != static_cast<std::size_t>(rows)) throw ParseError("metadata matrix has the wrong shape");
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (j[r].size() != static_cast<std::size_t>(cols)) throw ParseError("metadata matrix has the wrong shape");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

std::vector<std::string> draw_header(const DrawStore& store) {
  std::vector<std::string> header = {"b", "alpha2", "log_kernel"};
  for (auto& name : beta_names(store)) header.push_back(std::move(name));
  for (int i = 0; i < store.p; ++i) {
    for (int j = i; j < store.p; ++j) header.push_back("sigma_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  }
  return header;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string format_double(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

ChoiceDataset parse_dataset(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source + ": empty file");
  const auto header = split_csv_line(line);

  int id_col = -1;
  int choice_col = -1;
  std::vector<int> agent_cols;
  ChoiceDataset data;
  // alternative covariate name -> label -> column
  std::vector<std::string> alt_order;
  std::map<std::string, std::map<std::string, int>> alt_cols;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    const std::string& h = header[c];
    if (h == "id") {
      id_col = c;
    } else if (h == "choice") {
      choice_col = c;
    } else if (h.rfind("d_", 0) == 0 && h.size() > 2) {
      agent_cols.push_back(c);
      data.agent_names.push_back(h.substr(2));
    } else if (h.rfind("a_", 0) == 0) {
      const auto sep = h.find('_', 2);
      if (sep == std::string::npos || sep == 2 || sep + 1 == h.size()) {
        throw ParseError(source + ": column '" + h + "' is not of the form a_<name>_<label>");
      }
      const std::string name = h.substr(2, sep - 2);
      const std::string label = h.substr(sep + 1);
      if (!alt_cols.count(name)) alt_order.push_back(name);
      if (alt_cols[name].count(label)) throw ParseError(source + ": duplicate column '" + h + "'");
      alt_cols[name][label] = c;
      if (std::find(data.labels.begin(), data.labels.end(), label) == data.labels.end()) {
        data.labels.push_back(label);
      }
    } else {
      throw ParseError(source + ": unrecognized column '" + h + "'");
    }
  }
  if (id_col < 0) throw ParseError(source + ": missing column 'id'");
  if (choice_col < 0) throw ParseError(source + ": missing column 'choice'");
  for (const auto& name : alt_order) {
    for (const auto& label : data.labels) {
      if (!alt_cols[name].count(label)) {
        throw ParseError(source + ": missing column 'a_" + name + "_" + label + "'");
      }
    }
  }
  data.alt_names = alt_order;
  const bool labels_from_header = !alt_order.empty();

  std::vector<std::string> choices;
  std::vector<std::vector<double>> agent_rows;
  std::vector<MatrixXd> alt_rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(source + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " fields, expected " + std::to_string(header.size()));
    }
    auto number = [&](int c) {
      double v;
      if (!parse_double(cells[c], v) || !std::isfinite(v)) {
        throw ParseError(where(source, row, header[c]) + ": '" + cells[c] + "' is not a finite number");
      }
      return v;
    };
    choices.push_back(cells[choice_col]);
    if (!labels_from_header &&
        std::find(data.labels.begin(), data.labels.end(), choices.back()) == data.labels.end()) {
      data.labels.push_back(choices.back());
    }
    std::vector<double> agent;
    for (int c : agent_cols) agent.push_back(number(c));
    agent_rows.push_back(std::move(agent));
    MatrixXd xa(static_cast<Eigen::Index>(data.labels.size()), static_cast<Eigen::Index>(alt_order.size()));
    for (std::size_t m = 0; m < alt_order.size(); ++m) {
      for (std::size_t j = 0; j < data.labels.size(); ++j) {
        xa(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = number(alt_cols[alt_order[m]][data.labels[j]]);
      }
    }
    alt_rows.push_back(std::move(xa));
  }

  data.p = static_cast<int>(data.labels.size());
  const auto n = choices.size();
  data.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::find(data.labels.begin(), data.labels.end(), choices[i]);
    if (it == data.labels.end()) {
      throw ParseError(where(source, i + 1, "choice") + ": unknown category label '" + choices[i] + "'");
    }
    data.y[i] = static_cast<int>(it - data.labels.begin());
  }
  data.x_d.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(agent_cols.size()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < agent_cols.size(); ++m) {
      data.x_d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = agent_rows[i][m];
    }
    if (!labels_from_header) alt_rows[i].resize(data.p, 0);
  }
  data.x_a = std::move(alt_rows);
  if (data.p < 2) throw ParseError(source + ": need at least two categories");
  data.validate();
  return data;
}

ChoiceDataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset '" + path + "'");
  return parse_dataset(in, path);
}

void write_dataset(const ChoiceDataset& data, std::ostream& out) {
  data.validate();
  out << "id,choice";
  for (const auto& name : data.agent_names) out << ",d_" << name;
  for (const auto& name : data.alt_names) {
    if (name.find('_') != std::string::npos) {
      throw DomainError("alternative covariate name '" + name + "' may not contain '_'");
    }
    for (const auto& label : data.labels) out << ",a_" << name << '_' << label;
  }
  out << '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out << (i + 1) << ',' << data.labels[data.y[i]];
    for (int m = 0; m < data.k_d(); ++m) out << ',' << format_double(data.x_d(r, m));
    for (int m = 0; m < data.k_a(); ++m) {
      for (int j = 0; j < data.p; ++j) out << ',' << format_double(data.x_a[i](j, m));
    }
    out << '\n';
  }
}

void write_dataset(const ChoiceDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  write_dataset(data, out);
  if (!out) throw ParseError("write to '" + path + "' failed");
}

std::string draw_prefix(const std::string& path) {
  if (ends_with(path, ".meta.json")) return path.substr(0, path.size() - 10);
  if (ends_with(path, ".csv")) return path.substr(0, path.size() - 4);
  return path;
}

void write_draws(const DrawStore& store, const std::string& path, int digits) {
  if (digits < 1 || digits > 17) throw DomainError("float format needs 1..17 significant digits");
  const std::string prefix = draw_prefix(path);
  {
    CsvWriter csv(prefix + ".csv", draw_header(store), digits);
    for (std::size_t t = 0; t < store.size(); ++t) {
      csv.cell(static_cast<long long>(store.b[t] + 1)).cell(store.alpha2[t]).cell(store.log_kernel[t]);
      for (Eigen::Index k = 0; k < store.beta.cols(); ++k) csv.cell(store.beta(static_cast<Eigen::Index>(t), k));
      for (int i = 0; i < store.p; ++i) {
        for (int j = i; j < store.p; ++j) csv.cell(store.sigma[t](i, j));
      }
      csv.end_row();
    }
  }
  json meta;
  meta["model"] = to_string(store.kind);
  meta["p"] = store.p;
  meta["labels"] = store.labels;
  meta["agent_covariates"] = store.agent_names;
  meta["alternative_covariates"] = store.alt_names;
  meta["base"] = store.base >= 0 ? json(store.labels[store.base]) : json(nullptr);
  meta["agent_means"] = std::vector<double>(store.agent_means.data(), store.agent_means.data() + store.agent_means.size());
  meta["alternative_means"] = matrix_json(store.alt_means);
  meta["nu"] = store.nu;
  meta["S"] = matrix_json(store.S);
  meta["A"] = matrix_json(store.A);
  meta["iters"] = store.chain.iters;
  meta["burn"] = store.chain.burn;
  meta["thin"] = store.chain.thin;
  meta["seed"] = store.chain.seed;
  meta["wall_seconds"] = store.chain.wall_seconds;
  meta["draws"] = store.size();
  meta["float_digits"] = digits;
  std::ofstream out(prefix + ".meta.json");
  out << meta.dump(2) << '\n';
  if (!out) throw ParseError("write to '" + prefix + ".meta.json' failed");
}

DrawStore read_draws(const std::string& path) {
  const std::string prefix = draw_prefix(path);
  std::ifstream meta_in(prefix + ".meta.json");
  if (!meta_in) throw ParseError("cannot open '" + prefix + ".meta.json'");
  json meta;
  try {
    meta = json::parse(meta_in);
  } catch (const json::exception& e) {
    throw ParseError(prefix + ".meta.json: " + e.what());
  }

  DrawStore store;
  try {
    store.kind = model_kind_from_string(meta.at("model").get<std::string>());
    store.p = meta.at("p").get<int>();
    store.labels = meta.at("labels").get<std::vector<std::string>>();
    store.agent_names = meta.at("agent_covariates").get<std::vector<std::string>>();
    store.alt_names = meta.at("alternative_covariates").get<std::vector<std::string>>();
    store.k_d = static_cast<int>(store.agent_names.size());
    store.k_a = static_cast<int>(store.alt_names.size());
    if (!meta.at("base").is_null()) {
      const auto label = meta["base"].get<std::string>();
      const auto it = std::find(store.labels.begin(), store.labels.end(), label);
      if (it == store.labels.end()) throw ParseError("metadata base label is not a category");
      store.base = static_cast<int>(it - store.labels.begin());
    }
    const auto means = meta.at("agent_means").get<std::vector<double>>();
    store.agent_means = Eigen::Map<const VectorXd>(means.data(), static_cast<Eigen::Index>(means.size()));
    store.alt_means = json_matrix(meta.at("alternative_means"), store.p, store.k_a);
    store.nu = meta.at("nu").get<double>();
    store.S = json_matrix(meta.at("S"), store.p - 1, store.p - 1);
    const auto K = store.shape().reduced_size();
    store.A = json_matrix(meta.at("A"), K, K);
    store.chain.iters = meta.at("iters").get<int>();
    store.chain.burn = meta.at("burn").get<int>();
    store.chain.thin = meta.at("thin").get<int>();
    store.chain.seed = meta.at("seed").get<std::uint64_t>();
    store.chain.wall_seconds = meta.at("wall_seconds").get<double>();
  } catch (const json::exception& e) {
    throw ParseError(prefix + ".meta.json: " + e.what());
  }
  if (store.p < 2 || static_cast<int>(store.labels.size()) != store.p) {
    throw ParseError(prefix + ".meta.json: inconsistent category count");
  }

  const std::string csv_path = prefix + ".csv";
  std::ifstream in(csv_path);
  if (!in) throw ParseError("cannot open '" + csv_path + "'");
  std::string line;
  std::getline(in, line);
  const auto expected = draw_header(store);
  if (split_csv_line(line) != expected) throw ParseError(csv_path + ": header does not match the metadata");
  std::vector<std::vector<double>> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != expected.size()) {
      throw ParseError(csv_path + ": row " + std::to_string(row) + " has the wrong number of fields");
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], values[c])) {
        throw ParseError(where(csv_path, row, expected[c]) + ": '" + cells[c] + "' is not a number");
      }
    }
    rows.push_back(std::move(values));
  }

  const int F = store.shape().full_size();
  store.beta.resize(static_cast<Eigen::Index>(rows.size()), F);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& v = rows[t];
    const int b = static_cast<int>(v[0]) - 1;
    if (b < 0 || b >= store.p || v[0] != b + 1) throw ParseError(csv_path + ": bad b in row " + std::to_string(t + 1));
    store.b.push_back(b);
    store.alpha2.push_back(v[1]);
    store.log_kernel.push_back(v[2]);
    for (int k = 0; k < F; ++k) store.beta(static_cast<Eigen::Index>(t), k) = v[3 + k];
    MatrixXd sigma(store.p, store.p);
    std::size_t c = 3 + F;
    for (int i = 0; i < store.p; ++i) {
      for (int j = i; j < store.p; ++j) sigma(i, j) = sigma(j, i) = v[c++];
    }
    store.sigma.push_back(std::move(sigma));
  }
  return store;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header, int digits)
    : out_(path), path_(path), columns_(header.size()), digits_(digits) {
  if (!out_) throw ParseError("cannot write '" + path + "'");
  for (std::size_t c = 0; c < header.size(); ++c) out_ << (c ? "," : "") << header[c];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& text) {
  if (in_row_++) row_ += ',';
  row_ += text;
  return *this;
}

CsvWriter& CsvWriter::cell(double value) { return cell(format_double(value, digits_)); }

CsvWriter& CsvWriter::cell(long long value) { return cell(std::to_string(value)); }

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw DimensionError(path_ + ": row has " + std::to_string(in_row_) + " cells, header has " +
                         std::to_string(columns_));
  }
  out_ << row_ << '\n';
  if (!out_) throw ParseError("write to '" + path_ + "' failed");
  row_.clear();
  in_row_ = 0;
}

}  // namespace smnp
