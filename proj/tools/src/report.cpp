#include "orthomart/cli/report.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "orthomart/fieldsim.hpp"
#include "orthomart/format.hpp"

#ifndef ORTHOMART_VERSION
#define ORTHOMART_VERSION "0.0.0"
#endif

namespace orthomart::cli {

namespace {

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::string cell(double value) { return format_double(value); }

nlohmann::json number(double value) {
  if (std::isfinite(value)) return value;
  return format_double(value);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::vector<std::string> write_outputs(const ExperimentConfig& config, const CommandResult& result,
                                       const std::string& timestamp) {
  const std::filesystem::path dir(config.run.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());

  const auto echo = resolved(config);
  std::ostringstream header;
  header << "# orthomart " << ORTHOMART_VERSION << " command=" << to_string(config.run.command)
         << " seed=" << config.run.seed << " seeding=" << kSeedingScheme << '\n'
         << "# config " << echo.dump() << '\n';

  std::vector<std::string> written;
  for (const auto& t : result.tables) {
    std::ostringstream out;
    out << header.str();
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << quoted(t.columns[i]);
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << quoted(row[i]);
      out << '\n';
    }
    write_file(dir / (t.name + ".csv"), out.str());
    written.push_back(t.name + ".csv");
  }
  for (const auto& [name, content] : result.files) {
    write_file(dir / name, content);
    written.push_back(name);
  }

  nlohmann::json summary;
  summary["orthomart_version"] = ORTHOMART_VERSION;
  summary["command"] = to_string(config.run.command);
  summary["seeding_scheme"] = kSeedingScheme;
  summary["config"] = echo;
  summary["results"] = result.summary;
  summary["violations"] = result.violations;
  summary["notices"] = result.notices;
  summary["status"] = result.violations.empty() ? "ok" : "violation";
  summary["outputs"] = written;
  const nlohmann::json execution = {{"timestamp", timestamp}, {"workers", config.run.workers}, {"out", config.run.out}};
  std::string body = summary.dump(2);
  // body starts with "{\n"; the execution record goes first on its own line.
  body.insert(2, "  \"execution\": " + execution.dump() + ",\n");
  write_file(dir / "summary.json", body + "\n");
  written.push_back("summary.json");
  return written;
}

}  // namespace orthomart::cli
