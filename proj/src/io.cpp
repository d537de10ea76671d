#include "cmpw/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cmpw/errors.hpp"

namespace cmpw {

namespace {

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  require(f.good(), Err::WriteFailed, "cannot open " + path);
  return f;
}

void put_u64(std::ofstream& f, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  f.write(buf, 8);
}

std::uint64_t get_u64(std::ifstream& f) {
  unsigned char buf[8];
  f.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void put_f64(std::ofstream& f, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(f, bits);
}

double get_f64(std::ifstream& f) {
  const std::uint64_t bits = get_u64(f);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  require(ec == std::errc(), Err::WriteFailed, "number formatting failed");
  return std::string(buf, ptr);
}

std::string csv_cell(const std::string& raw) {
  if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& notes,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream f = open_out(path, false);
  for (const auto& n : notes) f << "# " << n << "\n";
  for (size_t i = 0; i < columns.size(); ++i)
    f << (i ? "," : "") << csv_cell(columns[i]);
  f << "\n";
  for (const auto& row : rows) {
    require(row.size() == columns.size(), Err::WriteFailed,
            "row width != header width");
    for (size_t i = 0; i < row.size(); ++i)
      f << (i ? "," : "") << format_double(row[i]);
    f << "\n";
  }
  require(f.good(), Err::WriteFailed, "write failed for " + path);
}

void write_modeset_csv(const std::string& path, const ModeSet& ms,
                       const std::vector<std::string>& notes) {
  std::vector<std::string> all_notes = notes;
  all_notes.push_back("mu=" + format_double(ms.mu) +
                      " N=" + std::to_string(ms.count()) +
                      " objective=" + format_double(ms.objective));
  std::vector<std::string> cols{"x"};
  for (int j = 1; j <= ms.count(); ++j)
    cols.push_back("mode_" + std::to_string(j));
  std::vector<std::vector<double>> rows(ms.grid.n);
  for (int i = 0; i < ms.grid.n; ++i) {
    rows[i].push_back(ms.grid.node(i));
    for (int j = 0; j < ms.count(); ++j) rows[i].push_back(ms.modes(i, j));
  }
  write_table_csv(path, all_notes, cols, rows);
}

void write_modeset_binary(const std::string& path, const ModeSet& ms) {
  std::ofstream f = open_out(path, true);
  f.write("CMPW", 4);
  put_u64(f, 1);  // format version
  put_f64(f, ms.grid.L);
  put_u64(f, static_cast<std::uint64_t>(ms.grid.n));
  put_u64(f, static_cast<std::uint64_t>(ms.count()));
  put_f64(f, ms.mu);
  put_f64(f, ms.objective);
  for (int j = 0; j < ms.count(); ++j)
    for (int i = 0; i < ms.grid.n; ++i) put_f64(f, ms.modes(i, j));
  require(f.good(), Err::WriteFailed, "write failed for " + path);
}

ModeSet read_modeset_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), Err::WriteFailed, "cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  require(f.good() && std::memcmp(magic, "CMPW", 4) == 0, Err::ConfigInvalid,
          "not a mode-set file: " + path);
  const std::uint64_t ver = get_u64(f);
  require(ver == 1, Err::ConfigInvalid, "unsupported mode-set file version");
  const double L = get_f64(f);
  const int n = static_cast<int>(get_u64(f));
  const int nm = static_cast<int>(get_u64(f));
  ModeSet ms;
  ms.grid = build_grid(L, n);
  ms.mu = get_f64(f);
  ms.objective = get_f64(f);
  ms.modes.resize(n, nm);
  for (int j = 0; j < nm; ++j)
    for (int i = 0; i < n; ++i) ms.modes(i, j) = get_f64(f);
  require(f.good(), Err::ConfigInvalid, "truncated mode-set file: " + path);
  return ms;
}

void write_bcpw_csv(const std::string& path, const BcpwSet& set,
                    const std::vector<std::string>& notes) {
  std::vector<std::string> cols{"x"};
  for (int l = 1; l <= set.levels(); ++l)
    cols.push_back("psi_" + std::to_string(l));
  std::vector<std::vector<double>> rows(set.grid.n);
  for (int i = 0; i < set.grid.n; ++i) {
    rows[i].push_back(set.grid.node(i));
    for (int l = 0; l < set.levels(); ++l) rows[i].push_back(set.modes[l][i]);
  }
  write_table_csv(path, notes, cols, rows);
}

void write_bcpw_sidecar(const std::string& path, const BcpwSet& set) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["L"] = set.grid.L;
  j["n"] = set.grid.n;
  j["w"] = set.w;
  j["N0"] = set.N0;
  j["mu"] = set.mu;
  j["levels"] = set.levels();
  const Eigen::MatrixXd r = shift_orthogonality_residual(set);
  nlohmann::ordered_json lv = nlohmann::ordered_json::array();
  for (int a = 1; a <= set.levels(); ++a) {
    double worst = 0.0;
    for (int b = 1; b <= a; ++b)
      worst = std::max(worst,
                       r.row((a - 1) * set.levels() + (b - 1))
                           .cwiseAbs()
                           .maxCoeff());
    nlohmann::ordered_json e;
    e["level"] = a;
    e["support_start"] = set.support[a - 1].first;
    e["support_length"] = set.support[a - 1].second;
    e["constraint_residual"] = worst;
    lv.push_back(e);
  }
  j["levels_detail"] = lv;
  j["max_residual"] = r.cwiseAbs().maxCoeff();
  std::ofstream f = open_out(path, false);
  f << j.dump(2) << "\n";
  require(f.good(), Err::WriteFailed, "write failed for " + path);
}

void write_coeffs_csv(const std::string& path, const CpwCoeffs& c,
                      const std::vector<std::string>& notes) {
  std::vector<std::vector<double>> rows;
  for (int n = 1; n <= c.n_max; ++n)
    for (int j = 0; j < c.N0; ++j)
      rows.push_back({static_cast<double>(n), static_cast<double>(j),
                      c.values(n - 1, j)});
  write_table_csv(path, notes, {"level", "shift", "value"}, rows);
}

}  // namespace cmpw
