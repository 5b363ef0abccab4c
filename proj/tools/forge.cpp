// forge: study server, corpus import/export, analysis reports and baselines.

#include <sys/stat.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "forge/analysis/report.hpp"
#include "forge/baseline/harness.hpp"
#include "forge/error.hpp"
#include "forge/gateway/gateway.hpp"
#include "forge/gateway/platform.hpp"
#include "forge/server.hpp"
#include "forge/store.hpp"

namespace {

using namespace forge;

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

long env_minutes(const char* name, long fallback) {
  const std::string v = env_or(name, "");
  if (v.empty()) return fallback;
  try {
    std::size_t used = 0;
    long n = std::stol(v, &used);
    if (used == v.size() && n > 0) return n;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be a positive integer");
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return import_corpus(ss.str());
}

std::string admin_code_for(const std::filesystem::path& data_dir) {
  std::string code = env_or("FORGE_ADMIN_CODE", "");
  if (!code.empty()) return code;
  const auto file = data_dir / "admin_code";
  if (std::filesystem::exists(file)) return trim(read_file(file));
  code = generate_auth_code();
  write_file(file, code + "\n");
  ::chmod(file.c_str(), 0600);
  return code;
}

struct ServeOptions {
  std::string data_dir;
  std::string static_dir;
  int port = 0;
  unsigned threads = 2;
};

int serve(const ServeOptions& o) {
  gateway::PlatformConfig config;
  config.scheduler.session_minutes = Minutes{env_minutes("SESSION_MINUTES", 60)};
  config.scheduler.slot_minutes = Minutes{env_minutes("SLOT_MINUTES", 20)};
  config.scheduler.reminder_lead = Minutes{env_minutes("REMINDER_LEAD_MINUTES", 10)};
  if (config.scheduler.session_minutes.count() % config.scheduler.slot_minutes.count() != 0)
    throw Error(ErrorCode::NonDivisibleDuration, "SLOT_MINUTES must divide SESSION_MINUTES");

  Store store(o.data_dir);
  config.admin_code = admin_code_for(o.data_dir);
  gateway::Platform platform(config, &store, gateway::system_clock());
  platform.compact();

  std::optional<std::filesystem::path> static_dir;
  if (!o.static_dir.empty()) static_dir = o.static_dir;
  gateway::Gateway gw(platform, static_dir);

  ServerConfig sc;
  sc.port = static_cast<std::uint16_t>(o.port);
  sc.threads = o.threads;
  Server server(platform, gw, sc);
  server.start();
  std::cerr << "listening on port " << server.port() << ", data in " << o.data_dir << "\n";
  server.wait();
  platform.compact();
  return 0;
}

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad threshold: " + item);
    }
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no thresholds given");
  return out;
}

baseline::FactMethod fact_method(const std::string& spec) {
  if (spec == "tfidf") return baseline::tfidf_method();
  constexpr std::string_view prefix = "external:";
  if (spec.starts_with(prefix) && spec.size() > prefix.size())
    return baseline::external_fact_method(spec.substr(prefix.size()));
  throw Error(ErrorCode::InvalidArgument, "unknown method: " + spec);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: collect, export and analyze expert dialogues over papers"};
  app.require_subcommand(1);

  ServeOptions serve_opts;
  auto* serve_cmd = app.add_subcommand("serve", "run the study server (HTTP, WebSocket, static UI)");
  serve_opts.data_dir = env_or("DATA_DIR", "data");
  serve_opts.port = std::atoi(env_or("PORT", "8080").c_str());
  serve_opts.static_dir = env_or("STATIC_DIR", "");
  serve_cmd->add_option("--data-dir", serve_opts.data_dir, "state directory (env DATA_DIR)");
  serve_cmd->add_option("--port", serve_opts.port, "listen port (env PORT)");
  serve_cmd->add_option("--static-dir", serve_opts.static_dir, "UI assets (env STATIC_DIR)");
  serve_cmd->add_option("--threads", serve_opts.threads, "worker threads");

  std::string export_out, export_dir = env_or("DATA_DIR", "data");
  auto* export_cmd = app.add_subcommand("export", "write the canonical corpus from a data directory");
  export_cmd->add_option("--out", export_out, "output file (stdout when omitted)");
  export_cmd->add_option("--data-dir", export_dir, "state directory (env DATA_DIR)");

  std::string import_file, import_dir = env_or("DATA_DIR", "data");
  bool import_check = false;
  auto* import_cmd = app.add_subcommand("import", "validate a corpus file and add it to a data directory");
  import_cmd->add_option("corpus", import_file, "corpus JSON")->required();
  import_cmd->add_option("--data-dir", import_dir, "state directory (env DATA_DIR)");
  import_cmd->add_flag("--check", import_check, "validate only");

  std::string analyze_file, report_name, thresholds = "0.3,0.4,0.5,0.6,0.7", embedder = "tfidf", format = "both";
  std::size_t chunk_size = 4;
  double cluster_threshold = 0.5;
  auto* analyze_cmd = app.add_subcommand("analyze", "corpus statistics");
  analyze_cmd->add_option("corpus", analyze_file, "corpus JSON")->required();
  analyze_cmd->add_option("--report", report_name, "table3|table4|table5|table6|diversity|chunks")
      ->required()
      ->check(CLI::IsMember({"table3", "table4", "table5", "table6", "diversity", "chunks"}));
  analyze_cmd->add_option("--thresholds", thresholds, "comma-separated similarity thresholds");
  analyze_cmd->add_option("--chunk-size", chunk_size, "introduction sentences per chunk");
  analyze_cmd->add_option("--embedder", embedder, "tfidf or external:<cmd>");
  analyze_cmd->add_option("--cluster-threshold", cluster_threshold, "P-message clustering cosine");
  analyze_cmd->add_option("--format", format, "text, json or both")
      ->check(CLI::IsMember({"text", "json", "both"}));

  auto* bench_cmd = app.add_subcommand("bench", "baselines under paper-level cross-validation");
  bench_cmd->require_subcommand(1);
  std::string bench_file, method = "tfidf", generator;
  std::uint64_t seed = 13;
  std::size_t folds = 5;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("corpus", bench_file, "corpus JSON")->required();
    cmd->add_option("--seed", seed, "fold shuffle seed");
    cmd->add_option("--folds", folds, "number of folds");
  };
  auto* facts_cmd = bench_cmd->add_subcommand("facts", "fact selection, Fact-F1");
  add_common(facts_cmd);
  facts_cmd->add_option("--method", method, "tfidf or external:<cmd>");
  auto* gen_cmd = bench_cmd->add_subcommand("gen", "response generation, Message-F1");
  add_common(gen_cmd);
  gen_cmd->add_option("--generator", generator, "command reading samples on stdin")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(serve_opts);

    if (*export_cmd) {
      Store store(export_dir);
      const std::string bytes = forge::export_corpus(corpus_of(store.restore()));
      if (export_out.empty()) std::cout << bytes;
      else write_file(export_out, bytes);
      return 0;
    }

    if (*import_cmd) {
      Corpus corpus = load_corpus(import_file);
      if (!import_check) {
        Store store(import_dir);
        auto state = store.restore();
        auto batch = import_records(state, corpus);
        store.append(batch);
        std::cerr << batch.size() << " records added\n";
      }
      std::cout << analysis::counts_report(analysis::corpus_counts(corpus)).text;
      return 0;
    }

    if (*analyze_cmd) {
      analysis::ReportOptions opts;
      opts.thresholds = parse_thresholds(thresholds);
      opts.chunk_size = chunk_size;
      opts.embedder = embedder;
      opts.cluster_threshold = cluster_threshold;
      auto report = analysis::run_report(report_name, load_corpus(analyze_file), opts);
      if (format != "json") std::cout << report.text;
      if (format == "both") std::cout << "\n";
      if (format != "text") std::cout << report.json.dump() << "\n";
      return 0;
    }

    if (*facts_cmd || *gen_cmd) {
      Corpus corpus = load_corpus(bench_file);
      auto plan = baseline::make_folds(corpus, folds, seed);
      auto report = *facts_cmd ? baseline::evaluate_fact_selection(corpus, plan, fact_method(method))
                               : baseline::evaluate_generation(corpus, plan, baseline::external_generator(generator));
      std::cout << baseline::report_to_json(report).dump() << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what();
    if (!e.path().empty()) std::cerr << " (at " << e.path() << ")";
    std::cerr << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
