#include "evasion/errors.hpp"
#include "evasion/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace evasion {

using nlohmann::json;

ReportSummary summarize(const std::vector<TrialRecord>& records) {
  ReportSummary s;
  s.records = records.size();
  if (records.empty()) return s;
  std::vector<std::size_t> queries;
  std::size_t successes = 0;
  for (const TrialRecord& r : records) {
    queries.push_back(r.queries_used);
    successes += r.success ? 1 : 0;
    if (r.optimality_ratio) {
      s.max_optimality_ratio = std::max(s.max_optimality_ratio.value_or(*r.optimality_ratio), *r.optimality_ratio);
    }
  }
  std::sort(queries.begin(), queries.end());
  const std::size_t mid = queries.size() / 2;
  s.median_queries = queries.size() % 2 == 1 ? static_cast<double>(queries[mid])
                                             : 0.5 * static_cast<double>(queries[mid - 1] + queries[mid]);
  s.success_rate = static_cast<double>(successes) / static_cast<double>(records.size());
  return s;
}

namespace {

const char* const kColumns[] = {"seed",          "algorithm",        "dimension",   "epsilon",
                                "queries_used",  "witness_cost",     "analytic_mac", "optimality_ratio",
                                "success",       "wall_time_ms",     "deviation_events"};

std::string real(double v) { return fmt::format("{:.12g}", v); }

std::string optional_real(const std::optional<double>& v, const char* missing) { return v ? real(*v) : missing; }

std::string events_json(const std::vector<std::string>& events) { return json(events).dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        out.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else {
      out.back() += ch;
    }
  }
  return out;
}

void emit_jsonl(const std::vector<TrialRecord>& records, std::ostream& out) {
  for (const TrialRecord& r : records) {
    out << fmt::format(
        "{{\"seed\":{},\"algorithm\":{},\"dimension\":{},\"epsilon\":{},\"queries_used\":{},\"witness_cost\":{},"
        "\"analytic_mac\":{},\"optimality_ratio\":{},\"success\":{},\"wall_time_ms\":{},\"deviation_events\":{}}}\n",
        r.seed, json(r.algorithm).dump(), r.dimension, real(r.epsilon), r.queries_used,
        optional_real(r.witness_cost, "null"), optional_real(r.analytic_mac, "null"),
        optional_real(r.optimality_ratio, "null"), r.success ? "true" : "false", real(r.wall_time_ms),
        events_json(r.deviation_events));
  }
  const ReportSummary s = summarize(records);
  out << fmt::format("{{\"summary\":{{\"records\":{},\"median_queries\":{},\"success_rate\":{:.3f},"
                     "\"max_optimality_ratio\":{}}}}}\n",
                     s.records, real(s.median_queries), s.success_rate, optional_real(s.max_optimality_ratio, "null"));
}

void emit_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const TrialRecord& r : records) {
    out << r.seed << ',' << csv_field(r.algorithm) << ',' << r.dimension << ',' << real(r.epsilon) << ','
        << r.queries_used << ',' << optional_real(r.witness_cost, "") << ',' << optional_real(r.analytic_mac, "")
        << ',' << optional_real(r.optimality_ratio, "") << ',' << (r.success ? "true" : "false") << ','
        << real(r.wall_time_ms) << ',' << csv_field(events_json(r.deviation_events)) << '\n';
  }
  const ReportSummary s = summarize(records);
  out << fmt::format("# records={},median_queries={},success_rate={:.3f},max_optimality_ratio={}\n", s.records,
                     real(s.median_queries), s.success_rate, optional_real(s.max_optimality_ratio, ""));
}

std::optional<double> optional_number(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::optional<double> optional_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

TrialRecord from_json(const json& j) {
  TrialRecord r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.algorithm = j.at("algorithm").get<std::string>();
  r.dimension = j.at("dimension").get<Eigen::Index>();
  r.epsilon = j.at("epsilon").get<double>();
  r.queries_used = j.at("queries_used").get<std::size_t>();
  r.witness_cost = optional_number(j.at("witness_cost"));
  r.analytic_mac = optional_number(j.at("analytic_mac"));
  r.optimality_ratio = optional_number(j.at("optimality_ratio"));
  r.success = j.at("success").get<bool>();
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  r.deviation_events = j.at("deviation_events").get<std::vector<std::string>>();
  return r;
}

}  // namespace

void emit_report(const std::vector<TrialRecord>& records, ReportFormat format, std::ostream& out) {
  if (records.empty()) throw UsageError("emit_report: no records");
  if (format == ReportFormat::csv) {
    emit_csv(records, out);
  } else {
    emit_jsonl(records, out);
  }
}

std::string emit_report(const std::vector<TrialRecord>& records, ReportFormat format) {
  std::ostringstream out;
  emit_report(records, format, out);
  return out.str();
}

void write_report(const std::vector<TrialRecord>& records, ReportFormat format, const std::string& path) {
  const std::string text = emit_report(records, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EnvironmentError("cannot open report file '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw EnvironmentError("failed writing report file '" + path + "'");
}

std::vector<TrialRecord> parse_report(const std::string& text, ReportFormat format) {
  std::vector<TrialRecord> records;
  std::istringstream in(text);
  std::string line;
  bool header = format == ReportFormat::csv;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (format == ReportFormat::jsonl) {
        const json j = json::parse(line);
        if (j.contains("summary")) continue;
        records.push_back(from_json(j));
        continue;
      }
      if (header) {
        header = false;
        continue;
      }
      if (line[0] == '#') continue;
      const std::vector<std::string> f = split_csv(line);
      if (f.size() != std::size(kColumns)) throw UsageError("parse_report: wrong column count in '" + line + "'");
      TrialRecord r;
      r.seed = std::stoull(f[0]);
      r.algorithm = f[1];
      r.dimension = std::stol(f[2]);
      r.epsilon = std::stod(f[3]);
      r.queries_used = std::stoull(f[4]);
      r.witness_cost = optional_number(f[5]);
      r.analytic_mac = optional_number(f[6]);
      r.optimality_ratio = optional_number(f[7]);
      r.success = f[8] == "true";
      r.wall_time_ms = std::stod(f[9]);
      r.deviation_events = json::parse(f[10]).get<std::vector<std::string>>();
      records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("parse_report: ") + e.what());
  } catch (const std::logic_error& e) {
    throw UsageError(std::string("parse_report: ") + e.what());
  }
  return records;
}

}  // namespace evasion
