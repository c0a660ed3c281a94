#include "ewad/core/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ewad/common/error.hpp"

namespace ewad {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kIndexComment = "# indices: 0-based";

[[noreturn]] void parse_fail(const fs::path& file, std::size_t line,
                             const std::string& what) {
  std::ostringstream os;
  os << file.string() << ":" << line << ": " << what;
  throw ParseError(os.str());
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot open " + file.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string() + " for reading");
  return in;
}

bool is_comment(const std::string& line) {
  return !line.empty() && line[0] == '#';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

long long parse_int(const fs::path& file, std::size_t line,
                    const std::string& field) {
  long long value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    parse_fail(file, line, "expected integer, got '" + field + "'");
  }
  return value;
}

double parse_real(const fs::path& file, std::size_t line,
                  const std::string& field) {
  if (field.empty()) parse_fail(file, line, "empty numeric field");
  errno = 0;
  char* end = nullptr;
  double value = std::strtod(field.c_str(), &end);
  if (errno != 0 || end != field.c_str() + field.size()) {
    parse_fail(file, line, "expected real number, got '" + field + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  // 17 significant digits round-trip IEEE754 doubles exactly.
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_observations_csv(const fs::path& file,
                            const SparseObservations& obs) {
  std::ofstream out = open_out(file);
  out << kIndexComment << "\n";
  out << "row,col,count\n";
  for (const Entry& e : obs.entries) {
    out << e.row << "," << e.col << "," << e.count << "\n";
  }
}

SparseObservations read_observations_csv(const fs::path& file, int rows,
                                         int cols) {
  std::ifstream in = open_in(file);
  SparseObservations obs;
  obs.rows = rows;
  obs.cols = cols;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment(line) || line.empty()) continue;
    if (!header_seen) {
      if (split_csv(line) != std::vector<std::string>{"row", "col", "count"}) {
        parse_fail(file, lineno, "expected header 'row,col,count'");
      }
      header_seen = true;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != 3) parse_fail(file, lineno, "expected 3 fields");
    Entry e;
    e.row = static_cast<int>(parse_int(file, lineno, fields[0]));
    e.col = static_cast<int>(parse_int(file, lineno, fields[1]));
    e.count = parse_int(file, lineno, fields[2]);
    obs.entries.push_back(e);
  }
  if (!header_seen) parse_fail(file, lineno, "missing header");
  return obs;
}

void write_dense_csv(const fs::path& file, const Matrix& m) {
  std::ofstream out = open_out(file);
  out << "# dense matrix, one comma-separated line per row\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ",";
      out << format_double(m(i, j));
    }
    out << "\n";
  }
}

Matrix read_dense_csv(const fs::path& file) {
  std::ifstream in = open_in(file);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment(line) || line.empty()) continue;
    auto fields = split_csv(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_real(file, lineno, f));
    if (!rows.empty() && row.size() != rows.front().size()) {
      parse_fail(file, lineno, "ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) parse_fail(file, lineno, "empty matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return m;
}

void write_mask_csv(const fs::path& file, const AnomalyMask& mask) {
  std::ofstream out = open_out(file);
  out << kIndexComment << "\n";
  out << "row,col\n";
  for (auto [r, c] : mask.cells) out << r << "," << c << "\n";
}

AnomalyMask read_mask_csv(const fs::path& file, int rows, int cols) {
  std::ifstream in = open_in(file);
  AnomalyMask mask;
  mask.rows = rows;
  mask.cols = cols;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment(line) || line.empty()) continue;
    if (!header_seen) {
      if (split_csv(line) != std::vector<std::string>{"row", "col"}) {
        parse_fail(file, lineno, "expected header 'row,col'");
      }
      header_seen = true;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != 2) parse_fail(file, lineno, "expected 2 fields");
    mask.cells.emplace_back(
        static_cast<int>(parse_int(file, lineno, fields[0])),
        static_cast<int>(parse_int(file, lineno, fields[1])));
  }
  if (!header_seen) parse_fail(file, lineno, "missing header");
  mask.canonicalize();
  return mask;
}

void write_detection_csv(const fs::path& file,
                         const std::vector<DetectionRow>& rows) {
  std::ofstream out = open_out(file);
  out << kIndexComment << "\n";
  out << "row,col,t,f_lower,f_point,f_upper,selected\n";
  for (const DetectionRow& r : rows) {
    out << r.row << "," << r.col << "," << format_double(r.t) << ","
        << format_double(r.f_lower) << "," << format_double(r.f_point) << ","
        << format_double(r.f_upper) << "," << (r.selected ? 1 : 0) << "\n";
  }
}

void write_sweep_csv(const fs::path& file, const std::vector<SweepRow>& rows) {
  std::ofstream out = open_out(file);
  out << "param,fpr,tpr\n";
  for (const SweepRow& r : rows) {
    out << format_double(r.param) << "," << format_double(r.fpr) << ","
        << format_double(r.tpr) << "\n";
  }
}

std::vector<SweepRow> read_sweep_csv(const fs::path& file) {
  std::ifstream in = open_in(file);
  std::vector<SweepRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment(line) || line.empty()) continue;
    if (!header_seen) {
      if (split_csv(line) != std::vector<std::string>{"param", "fpr", "tpr"}) {
        parse_fail(file, lineno, "expected header 'param,fpr,tpr'");
      }
      header_seen = true;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != 3) parse_fail(file, lineno, "expected 3 fields");
    SweepRow r;
    r.param = parse_real(file, lineno, fields[0]);
    r.fpr = parse_real(file, lineno, fields[1]);
    r.tpr = parse_real(file, lineno, fields[2]);
    rows.push_back(r);
  }
  if (!header_seen) parse_fail(file, lineno, "missing header");
  return rows;
}

void write_instance(const fs::path& dir, const InstanceData& inst) {
  fs::create_directories(dir);
  json manifest;
  manifest["format"] = "count-matrix-instance";
  manifest["index_base"] = 0;
  manifest["rows"] = inst.obs.rows;
  manifest["cols"] = inst.obs.cols;
  manifest["observations"] = "observations.csv";
  write_observations_csv(dir / "observations.csv", inst.obs);
  if (inst.rates) {
    manifest["rates"] = "rates.csv";
    write_dense_csv(dir / "rates.csv", inst.rates->values);
  }
  if (inst.mask) {
    manifest["mask"] = "mask.csv";
    write_mask_csv(dir / "mask.csv", *inst.mask);
  }
  if (inst.params) {
    manifest["params"] = {{"p_anom", inst.params->p_anom},
                          {"alpha", inst.params->alpha}};
  }
  if (inst.generation) {
    const GenerationSpec& g = *inst.generation;
    manifest["generation"] = {
        {"rows", g.rows},           {"cols", g.cols},
        {"rank", g.rank},           {"mean_level", g.mean_level},
        {"observe_prob", g.observe_prob}, {"anom_prob", g.anom_prob},
        {"alpha", g.alpha},         {"model", g.model},
        {"seed", g.seed}};
  }
  std::ofstream out = open_out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

InstanceData read_instance(const fs::path& dir) {
  fs::path manifest_path = dir / "manifest.json";
  std::ifstream in = open_in(manifest_path);
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  auto require = [&](const char* key) -> const json& {
    if (!manifest.contains(key)) {
      throw ParseError(manifest_path.string() + ": missing key '" +
                       std::string(key) + "'");
    }
    return manifest.at(key);
  };
  InstanceData inst;
  int rows = require("rows").get<int>();
  int cols = require("cols").get<int>();
  std::string obs_file = require("observations").get<std::string>();
  inst.obs = read_observations_csv(dir / obs_file, rows, cols);
  if (manifest.contains("rates")) {
    RateMatrix rm;
    rm.values = read_dense_csv(dir / manifest["rates"].get<std::string>());
    inst.rates = std::move(rm);
  }
  if (manifest.contains("mask")) {
    inst.mask =
        read_mask_csv(dir / manifest["mask"].get<std::string>(), rows, cols);
  }
  if (manifest.contains("params")) {
    ModelParams p;
    p.p_anom = manifest["params"].at("p_anom").get<double>();
    p.alpha = manifest["params"].at("alpha").get<std::vector<double>>();
    inst.params = std::move(p);
  }
  if (manifest.contains("generation")) {
    const json& g = manifest["generation"];
    GenerationSpec spec;
    spec.rows = g.at("rows").get<int>();
    spec.cols = g.at("cols").get<int>();
    spec.rank = g.at("rank").get<int>();
    spec.mean_level = g.at("mean_level").get<double>();
    spec.observe_prob = g.at("observe_prob").get<double>();
    spec.anom_prob = g.at("anom_prob").get<double>();
    spec.alpha = g.at("alpha").get<std::vector<double>>();
    spec.model = g.at("model").get<std::string>();
    spec.seed = g.at("seed").get<std::uint64_t>();
    inst.generation = std::move(spec);
  }
  return inst;
}

}  // namespace ewad
