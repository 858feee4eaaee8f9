#include "cli.hpp"

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>

#include "CLI11.hpp"
#include "toolseek/catalog.hpp"
#include "toolseek/identifiers.hpp"
#include "toolseek/linkcheck.hpp"
#include "toolseek/service.hpp"

namespace toolseek::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string store;
  std::string terminology;
  std::string config;
};

// Store and terminology come from flags, or from the config file when
// given; flags win.
struct Environment {
  fs::path store;
  fs::path terminology;
  RankWeights weights;
  LinkPolicy policy;
  std::optional<fs::path> stub;
};

Environment resolve_environment(const Globals& g) {
  Environment env;
  if (!g.config.empty()) {
    const auto config = load_api_config(g.config);
    env.store = config.store_path;
    env.terminology = config.terminology_path;
    env.weights = config.rank_weights;
    env.policy = config.linkcheck;
    env.stub = config.linkcheck_stub;
  }
  if (!g.store.empty()) env.store = g.store;
  if (!g.terminology.empty()) env.terminology = g.terminology;
  if (env.store.empty()) throw CLI::ValidationError("--store", "a store directory is required (--store or --config)");
  if (env.terminology.empty()) {
    throw CLI::ValidationError("--terminology", "a terminology file is required (--terminology or --config)");
  }
  return env;
}

std::unique_ptr<Catalog> open_catalog(const Environment& env) {
  if (!fs::is_regular_file(env.terminology)) {
    throw Error(ErrorCode::ValidationFailed, "terminology file not found: " + env.terminology.string());
  }
  return Catalog::open(env.store, env.terminology, nullptr, env.weights);
}

void print_report(const IngestReport& report, std::ostream& out) {
  out << "accepted " << report.accepted << "\n";
  out << "rejected " << report.rejected.size() << "\n";
  for (const auto& r : report.rejected) {
    out << "  line " << r.line << ": " << error_code_name(r.code);
    if (!r.field.empty()) out << " [" << r.field << "]";
    out << " " << r.message << "\n";
  }
  for (const auto& w : report.warnings) out << "  warning line " << w.line << ": " << w.message << "\n";
}

void print_table(const SearchResponse& response, std::ostream& out) {
  out << std::left << std::setw(5) << "#" << std::setw(13) << "ACCESSION" << std::setw(28) << "NAME"
      << "SCORE\n";
  std::size_t rank = (response.page - 1) * response.per_page;
  for (const auto& hit : response.results) {
    out << std::left << std::setw(5) << ++rank << std::setw(13) << hit.scored.accession.str() << std::setw(28)
        << hit.name << std::fixed << std::setprecision(4) << hit.scored.final_score << "\n";
  }
  out << response.total_hits << " hit(s), generation " << response.generation << "\n";
}

std::atomic<Service*> g_serving{nullptr};

void on_signal(int) {
  if (auto* s = g_serving.load()) s->stop();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"toolseek: terminology-driven tool registry and search"};
  app.name("toolseek");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--store", g.store, "Document store directory");
  app.add_option("--terminology", g.terminology, "Terminology JSON file");
  app.add_option("--config", g.config, "Service configuration file");

  auto* ingest = app.add_subcommand("ingest", "Load JSON-lines tool records");
  std::string ingest_file;
  bool lenient = false;
  ingest->add_option("file", ingest_file, "Records file")->required();
  ingest->add_flag("--lenient", lenient, "Drop unknown fields with a warning instead of rejecting");

  auto* index = app.add_subcommand("index", "Index maintenance");
  index->require_subcommand(1);
  auto* index_build = index->add_subcommand("build", "Rebuild the search index");

  auto* search = app.add_subcommand("search", "Run one query");
  std::string q;
  std::vector<std::string> cats, oses, langs, ifaces, techs;
  std::size_t page = 1;
  std::size_t per_page = 20;
  bool include_obsolete = false;
  bool as_json = false;
  search->add_option("query", q, "Query text");
  search->add_option("--cat", cats, "Category filter");
  search->add_option("--os", oses, "Operating system filter");
  search->add_option("--lang", langs, "Programming language filter");
  search->add_option("--iface", ifaces, "Interface filter");
  search->add_option("--tech", techs, "Technology (top-level category) filter");
  search->add_option("--page", page, "Result page");
  search->add_option("--per-page", per_page, "Results per page");
  search->add_flag("--include-obsolete", include_obsolete, "Also return obsolete tools");
  search->add_flag("--json", as_json, "Print the service response body");

  auto* linkcheck = app.add_subcommand("linkcheck", "Homepage link checking");
  linkcheck->require_subcommand(1);
  auto* linkcheck_run = linkcheck->add_subcommand("run", "Probe every homepage once");
  std::string stub_file;
  linkcheck_run->add_option("--stub", stub_file, "JSON map of URL to canned status");

  auto* serve = app.add_subcommand("serve", "Start the REST service");
  std::string serve_config;
  serve->add_option("--config", serve_config, "Service configuration file")->required();

  auto* doi = app.add_subcommand("doi", "Identifier utilities");
  doi->require_subcommand(1);
  auto* doi_validate = doi->add_subcommand("validate", "Check DOI syntax");
  std::string doi_text;
  doi_validate->add_option("doi", doi_text)->required();

  auto* terminology = app.add_subcommand("terminology", "Terminology utilities");
  terminology->require_subcommand(1);
  auto* terminology_check = terminology->add_subcommand("check", "Validate a terminology file");
  std::string terminology_file;
  terminology_check->add_option("file", terminology_file)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "toolseek: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*doi_validate) {
      out << (validate_doi(doi_text) ? "true" : "false") << "\n";
      return kExitOk;
    }

    if (*terminology_check) {
      std::ifstream in(terminology_file);
      if (!in) {
        err << "toolseek: cannot read " << terminology_file << "\n";
        return kExitFailure;
      }
      const auto violations = validate_graph(parse_terminology(in));
      for (const auto& v : violations) out << v.id << "\t" << v.rule << "\t" << v.detail << "\n";
      if (violations.empty()) out << "ok\n";
      return violations.empty() ? kExitOk : kExitFailure;
    }

    if (*serve) {
      const auto config = load_api_config(serve_config);
      auto catalog = Catalog::open(config.store_path, config.terminology_path,
                                   config.minting_endpoint
                                       ? std::make_shared<RemoteMintingClient>(*config.minting_endpoint)
                                       : nullptr,
                                   config.rank_weights);
      Service service(*catalog, config);
      g_serving = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      err << "toolseek: listening on " << config.host << ":" << config.port << "\n";
      const bool ok = service.listen();
      g_serving = nullptr;
      return ok ? kExitOk : kExitFailure;
    }

    Environment env;
    try {
      env = resolve_environment(g);
    } catch (const CLI::ValidationError& e) {
      err << "toolseek: " << e.what() << "\n";
      return kExitUsage;
    }

    if (*ingest) {
      std::ifstream in(ingest_file);
      if (!in) {
        err << "toolseek: cannot read " << ingest_file << "\n";
        return kExitFailure;
      }
      fs::create_directories(env.store);
      auto catalog = open_catalog(env);
      const auto report = catalog->registry().ingest_records(in, lenient);
      print_report(report, out);
      return report.rejected.empty() ? kExitOk : kExitFailure;
    }

    if (!fs::is_directory(env.store)) {
      err << "toolseek: store not found: " << env.store.string() << "\n";
      return kExitFailure;
    }
    auto catalog = open_catalog(env);

    if (*index_build) {
      // The snapshot lives in memory; the store only remembers how many
      // builds happened so generations keep increasing across runs.
      auto store = catalog->store();
      std::uint64_t previous = 0;
      if (auto meta = store->get("meta", "index")) previous = json::parse(*meta).value("generation", 0ULL);
      catalog->reindex();
      const auto generation = previous + 1;
      const auto snap = catalog->snapshot();
      store->put("meta", "index",
                 json{{"generation", generation}, {"doc_count", snap->doc_count()}}.dump(2) + "\n");
      out << "generation " << generation << "\n";
      out << "documents " << snap->doc_count() << "\n";
      return kExitOk;
    }

    if (*search) {
      SearchRequest request;
      request.q = q;
      request.page = page;
      request.per_page = per_page;
      request.include_obsolete = include_obsolete;
      auto add = [&](FacetDimension d, const std::vector<std::string>& v) {
        if (!v.empty()) request.filters.add(d, {v.begin(), v.end()});
      };
      add(FacetDimension::Category, cats);
      add(FacetDimension::OperatingSystem, oses);
      add(FacetDimension::ProgrammingLanguage, langs);
      add(FacetDimension::Interface, ifaces);
      add(FacetDimension::Technology, techs);
      const auto response = catalog->search(request);
      if (as_json) {
        out << wire(response_to_json(response));
      } else {
        print_table(response, out);
      }
      return kExitOk;
    }

    if (*linkcheck_run) {
      std::shared_ptr<Transport> transport;
      std::optional<fs::path> stub = env.stub;
      if (!stub_file.empty()) stub = fs::path(stub_file);
      if (stub) {
        std::ifstream in(*stub);
        if (!in) {
          err << "toolseek: cannot read " << stub->string() << "\n";
          return kExitFailure;
        }
        transport = MapTransport::from_json(json::parse(in));
      } else {
        transport = std::make_shared<HttpTransport>();
      }
      LinkChecker checker(catalog->registry(), transport, env.policy);
      out << sweep_to_json(checker.run_sweep()).dump(2) << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "toolseek: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "toolseek: " << e.what() << "\n";
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace toolseek::cli
