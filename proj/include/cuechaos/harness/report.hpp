#pragma once

// Criterion records, CSV tables and the plain-text summary.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cuechaos/errors.hpp"

namespace cuechaos {

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string experiment;
  double value = 0.0;
  double tolerance = 0.0;
  std::string comparison = "<=";
  bool within_tolerance = false;
  double runtime_s = 0.0;
  double budget_s = 0.0;
  std::string note;

  bool within_budget() const { return runtime_s <= budget_s; }
  bool pass() const { return within_tolerance && within_budget(); }
  std::string verdict() const { return pass() ? "PASS" : "FAIL"; }
};

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentOutput {
  std::string experiment;
  std::vector<CriterionResult> criteria;
  std::vector<CsvTable> tables;
  std::vector<std::string> notes;
};

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  if (!out) throw InvalidArgument("failed writing " + path.string());
}

inline std::string criterion_line(const CriterionResult& c) {
  std::ostringstream os;
  os << "criterion " << c.id << " [" << c.name << "] value=" << fmt_short(c.value) << " tolerance"
     << c.comparison << fmt_short(c.tolerance) << " runtime=" << fmt_short(c.runtime_s) << "s budget="
     << fmt_short(c.budget_s) << "s verdict=" << c.verdict();
  if (!c.note.empty()) os << " (" << c.note << ")";
  return os.str();
}

inline std::string summary_text(const std::vector<ExperimentOutput>& outputs) {
  std::ostringstream os;
  os << "criterion\texperiment\tvalue\ttolerance\truntime_s\tbudget_s\tverdict\tnote\n";
  for (const auto& o : outputs)
    for (const auto& c : o.criteria)
      os << c.id << ' ' << c.name << '\t' << c.experiment << '\t' << fmt_short(c.value) << '\t' << c.comparison
         << fmt_short(c.tolerance) << '\t' << fmt_short(c.runtime_s) << '\t' << fmt_short(c.budget_s) << '\t'
         << c.verdict() << '\t' << c.note << '\n';
  for (const auto& o : outputs)
    for (const auto& n : o.notes) os << "# " << o.experiment << ": " << n << '\n';
  return os.str();
}

/// Writes every table as <out>/<name>.csv and the summary as <out>/summary.txt.
inline void write_reports(const std::filesystem::path& out_dir, const std::vector<ExperimentOutput>& outputs) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw InvalidArgument("cannot create output directory " + out_dir.string());
  for (const auto& o : outputs)
    for (const auto& t : o.tables) write_csv(out_dir / (t.name + ".csv"), t);
  std::ofstream s(out_dir / "summary.txt");
  if (!s) throw InvalidArgument("cannot write summary in " + out_dir.string());
  s << summary_text(outputs);
}

}  // namespace cuechaos
