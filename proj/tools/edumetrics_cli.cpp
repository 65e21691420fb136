// SPDX-License-Identifier: Apache-2.0
// edumetrics command-line driver.
//
// Exit status: 0 success, 1 domain error (including refused comparisons),
// 2 format or configuration error.

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "edumetrics/compare.hpp"
#include "edumetrics/config.hpp"
#include "edumetrics/fixtures.hpp"
#include "edumetrics/io.hpp"
#include "edumetrics/json_schema.hpp"
#include "edumetrics/pipeline.hpp"
#include "edumetrics/report.hpp"
#include "edumetrics/version.hpp"

using namespace edumetrics;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string flag_name(std::string key) {
  for (auto& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

std::string canonical(const json& j) { return j.dump() + "\n"; }

void emit(const fs::path& path, const std::string& content) {
  io::write_file(path, content);
  std::cout << "wrote " << path.string() << "\n";
}

[[noreturn]] void missing(const std::string& command, const char* key) {
  throw ConfigError("'" + command + "' needs '" + key + "' (config key or " + flag_name(key) + ")");
}

// ---------------------------------------------------------------------------
// Module subcommands: run the pipeline on the inputs a module needs and write
// that module's section of the report together with local diagnostics.

struct ModuleSpec {
  std::vector<std::string> sections;
  std::function<void(config::RunConfig&)> restrict;
};

void run_module(const std::string& name, config::RunConfig cfg, const ModuleSpec& spec) {
  spec.restrict(cfg);
  auto run = pipeline::run_portal(cfg);
  auto full = report::to_json(report::assemble_report(run.outputs));
  json out{{"portal_id", full.at("portal_id")},
           {"period", full.at("period")},
           {"metadata", full.at("metadata")},
           {"diagnostics", run.diagnostics}};
  for (const auto& s : spec.sections) out[s] = full.at(s);
  emit(fs::path(cfg.output_dir) / (name + ".json"), canonical(out));
}

const std::map<std::string, ModuleSpec>& modules() {
  static const std::map<std::string, ModuleSpec> m{
      {"catalog",
       {{"provision"},
        [](config::RunConfig& c) {
          if (!c.catalog) missing("catalog", "catalog");
          c.edges.reset();
          c.page_links.reset();
        }}},
      {"structure",
       {{"organization"},
        [](config::RunConfig& c) {
          if (!c.edges) missing("structure", "edges");
          c.catalog.reset();
          c.join_map.reset();
          c.page_links.reset();
        }}},
      {"usage",
       {{"segmentation"},
        [](config::RunConfig& c) {
          if (c.logs.empty()) missing("usage", "logs");
          c.edges.reset();
          c.page_links.reset();
        }}},
      {"position",
       {{"position"},
        [](config::RunConfig& c) {
          if (!c.page_links) missing("position", "page_links");
          if (!c.site_map) missing("position", "site_map");
          c.logs.clear();
          c.edges.reset();
        }}},
      {"segment",
       {{"segmentation", "segment"},
        [](config::RunConfig& c) {
          if (!c.catalog && c.logs.empty()) missing("segment", "catalog");
          c.edges.reset();
          c.page_links.reset();
        }}},
  };
  return m;
}

// ---------------------------------------------------------------------------

void run_report(const config::RunConfig& cfg) {
  auto run = pipeline::run_portal(cfg);
  const auto r = report::assemble_report(run.outputs);
  const auto text = report::serialize(r);
  const auto errors = json_schema::validate(report::portal_report_schema(), json::parse(text));
  if (!errors.empty()) throw report::ValidationError(errors);
  const fs::path dir(cfg.output_dir);
  emit(dir / "report.json", text);
  emit(dir / "diagnostics.json", canonical(run.diagnostics));
}

void run_compare(const config::RunConfig& cfg) {
  if (cfg.reports.size() < 2) throw ConfigError("'compare' needs at least two report files ('reports')");
  std::vector<report::PortalReport> reports;
  for (const auto& path : cfg.reports) {
    try {
      reports.push_back(report::deserialize(io::read_file(path)));
    } catch (const FormatError& e) {
      throw FormatError(path + ": " + e.what());
    }
  }
  auto c = report::compare_within_segment(reports, cfg.compare_margin);
  const fs::path dir(cfg.output_dir);
  const auto table = report::summary_table(c);
  emit(dir / "comparison.json", canonical(report::to_json(c)));
  emit(dir / "comparison.txt", table);
  emit(dir / "comparison.csv", report::to_csv(c));
  std::cout << table;
}

// ---------------------------------------------------------------------------
// gen

std::vector<std::uint64_t> integer_list(const config::KeyValues& kv, const char* key) {
  std::vector<std::uint64_t> out;
  auto it = kv.find(key);
  if (it == kv.end()) return out;
  for (const auto& item : config::split_list(it->second)) {
    auto v = time_detail::parse_int<std::uint64_t>(item);
    if (!v) throw ConfigError(std::string("'") + key + "' must list non-negative integers, got '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

void run_gen(const config::RunConfig& cfg) {
  const auto& kv = cfg.raw;
  auto kind_it = kv.find("kind");
  if (kind_it == kv.end()) missing("gen", "kind");
  const std::string kind = kind_it->second;
  const fs::path dir(cfg.output_dir);
  const auto seed = cfg.thresholds.seed;

  if (kind == "synthetic-log") {
    fixtures::LogSpec spec;
    spec.visits_per_bucket = integer_list(kv, "visits");
    if (spec.visits_per_bucket.empty()) missing("gen synthetic-log", "visits");
    spec.visitors = config::detail::integer(kv, "visitors", 1);
    spec.bot_fraction = config::detail::number(kv, "bot_fraction", 0.0, 0.0, 1.0);
    spec.max_views_per_visit = config::detail::integer(kv, "max_views", 4, 1);
    spec.bucket = cfg.bucket();
    spec.session_timeout = cfg.session_timeout();
    if (cfg.period_start) spec.start = *cfg.period_start;
    spec.seed = seed;
    emit(dir / "access.log", fixtures::join_lines(fixtures::gen_log(spec).lines));
    return;
  }
  if (kind == "synthetic-catalog") {
    fixtures::CatalogSpec spec;
    if (!cfg.portal_id.empty()) spec.portal_id = cfg.portal_id;
    auto it = kv.find("topics");
    if (it == kv.end()) missing("gen synthetic-catalog", "topics");
    std::vector<std::string> topics;
    for (const auto& item : config::split_list(it->second)) {
      auto colon = item.rfind(':');
      auto count = colon == std::string::npos ? std::nullopt
                                              : time_detail::parse_int<std::uint64_t>(item.substr(colon + 1));
      if (!count) throw ConfigError("'topics' entries must look like topic:count, got '" + item + "'");
      const auto topic = item.substr(0, colon);
      topics.push_back(topic);
      spec.topic_counts[topic] += *count;
    }
    if (kv.count("ages")) {
      spec.ages_days.clear();
      for (auto a : integer_list(kv, "ages")) spec.ages_days.push_back(static_cast<std::int64_t>(a));
    }
    if (cfg.reference_date) spec.reference = *cfg.reference_date;
    spec.seed = seed;
    emit(dir / "catalog.csv", fixtures::catalog_csv(fixtures::gen_catalog(spec)));
    emit(dir / "taxonomy.txt", fixtures::taxonomy_text(topics));
    return;
  }
  if (kind == "portal-set") {
    fixtures::PortalSetSpec spec;
    spec.pages = config::detail::integer(kv, "pages", spec.pages, 2);
    spec.log_lines = config::detail::integer(kv, "log_lines", spec.log_lines, 1);
    spec.bot_fraction = config::detail::number(kv, "bot_fraction", spec.bot_fraction, 0.0, 1.0);
    spec.seed = seed;
    auto files = fixtures::write_portal_set(dir, spec);
    for (const auto& [portal, conf] : files.configs) std::cout << "wrote " << conf.string() << "\n";
    return;
  }
  fixtures::GraphSpec spec;
  spec.kind = fixtures::graph_kind(kind);
  spec.size = config::detail::integer(kv, "size", 0, 1);
  if (!kv.count("size")) missing("gen " + kind, "size");
  spec.edge_probability = config::detail::number(kv, "edge_probability", 0.3, 0.0, 1.0);
  spec.seed = seed;
  emit(dir / "graph.txt", fixtures::edge_list_text(fixtures::gen_graph(spec)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comparable management and segmentation metrics for networks of educational portals."};
  app.name("edumetrics");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);

  std::string config_file;
  config::KeyValues flags;
  std::vector<std::string> report_files;

  const std::vector<std::pair<const char*, const char*>> commands{
      {"catalog", "content provision metrics (catalog.json)"},
      {"structure", "site organization metrics (structure.json)"},
      {"usage", "demand, recency, and activity from access logs (usage.json)"},
      {"position", "authoritativeness, hubness, and bridging (position.json)"},
      {"segment", "dynamics, relative size, and segment (segment.json)"},
      {"report", "full shareable report (report.json, diagnostics.json)"},
      {"compare", "within-segment comparison of reports (comparison.json/.txt/.csv)"},
      {"gen", "synthetic fixtures with planted ground truth"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_file, "key = value configuration file");
    for (const auto& info : config::known_keys()) {
      const std::string key = info.key;
      sub->add_option_function<std::string>(
          flag_name(key), [&flags, key](const std::string& v) { flags[key] = v; }, info.help);
    }
    if (std::string(name) == "compare") sub->add_option("files", report_files, "report files to compare");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    config::KeyValues kv;
    if (!config_file.empty()) kv = config::parse_file(config_file);
    for (const auto& [k, v] : flags) kv[k] = v;
    if (!report_files.empty()) {
      std::string joined = kv.count("reports") ? kv["reports"] : "";
      for (const auto& f : report_files) joined += (joined.empty() ? "" : ",") + f;
      kv["reports"] = joined;
    }
    const auto cfg = config::from_key_values(kv);

    if (auto it = modules().find(command); it != modules().end())
      run_module(command, cfg, it->second);
    else if (command == "report")
      run_report(cfg);
    else if (command == "compare")
      run_compare(cfg);
    else
      run_gen(cfg);
  } catch (const report::ComparabilityError& e) {
    std::cerr << "edumetrics " << command << ": refused: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "edumetrics " << command << ": " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    std::cerr << "edumetrics " << command << ": format error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "edumetrics " << command << ": configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "edumetrics " << command << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
