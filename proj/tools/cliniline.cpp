// cliniline: serve the dashboard API, load batches, export dashboards,
// inspect generated deadlines and emit viewport conformance vectors.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "cliniline/core/error.hpp"
#include "cliniline/core/time.hpp"
#include "cliniline/service/api.hpp"
#include "cliniline/service/config.hpp"
#include "cliniline/service/dashboard.hpp"
#include "cliniline/service/http_server.hpp"
#include "cliniline/service/store.hpp"
#include "cliniline/service/wire.hpp"
#include "cliniline/timeline/viewport.hpp"

namespace {

using namespace cliniline;

ServiceConfig config_from(const std::string& path) {
  return path.empty() ? ServiceConfig{} : load_config(path);
}

// Store backed by a data dir, or an in-memory store seeded from batch files.
std::unique_ptr<Store> open_store(const ServiceConfig& cfg, const std::string& data_dir,
                                  const std::vector<std::string>& batches) {
  std::unique_ptr<Store> store;
  if (!batches.empty()) {
    store = std::make_unique<Store>(cfg);
    for (const auto& file : batches) store->ingest(wire::parse_batch(read_file(file)));
  } else {
    store = std::make_unique<Store>(cfg, std::filesystem::path(data_dir.empty() ? cfg.data_dir : data_dir));
  }
  return store;
}

int cmd_serve(const std::string& config, std::optional<int> port, const std::string& data_dir,
              const std::string& host, const std::string& ui_dir) {
  const ServiceConfig cfg = config_from(config);
  Store store(cfg, std::filesystem::path(data_dir.empty() ? cfg.data_dir : data_dir));
  Api api(store);
  HttpOptions opts;
  opts.host = host;
  opts.port = port.value_or(cfg.port);
  if (!ui_dir.empty()) opts.ui_dir = ui_dir;

  // Signals are taken synchronously by a watcher thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpServer server(api, opts);
  const int bound = server.bind();
  std::cout << "listening on http://" << host << ":" << bound << " (revision "
            << store.snapshot()->revision << ")" << std::endl;
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  watcher.detach();
  server.run();
  return 0;
}

int cmd_load(const std::string& file, const std::string& server, const std::string& data_dir,
             const std::string& config) {
  const std::string body = read_file(file);
  if (!server.empty()) {
    httplib::Client client(server);
    const auto res = client.Post("/api/ingest", body, "application/json");
    if (!res) throw Error(ErrorCode::kIo, "cannot reach " + server + ": " + httplib::to_string(res.error()));
    if (res->status != 200) {
      std::cerr << "ingest failed (" << res->status << "): " << res->body << "\n";
      return 1;
    }
    std::cout << res->body << "\n";
    return 0;
  }
  const ServiceConfig cfg = config_from(config);
  Store store(cfg, std::filesystem::path(data_dir.empty() ? cfg.data_dir : data_dir));
  Api api(store);
  const ApiResponse res = api.handle({"POST", "/api/ingest", {}, {}, body});
  if (res.status != 200) {
    std::cerr << "ingest failed (" << res.status << "): " << res.body << "\n";
    return 1;
  }
  std::cout << res.body << "\n";
  return 0;
}

struct ExportArgs {
  std::string patient;
  std::string unit;
  bool establishment = false;
  std::string view = "isopsy";
  std::string as_of;
  bool anticipate = false;
  std::string profession;
  std::string data_dir;
  std::vector<std::string> batches;
  std::string config;
};

int cmd_export(const ExportArgs& a) {
  const ServiceConfig cfg = config_from(a.config);
  auto store = open_store(cfg, a.data_dir, a.batches);
  const DashboardScope scope = !a.patient.empty() ? DashboardScope::patient(a.patient)
                               : !a.unit.empty()  ? DashboardScope::unit(a.unit)
                                                  : DashboardScope::establishment();
  DashboardOptions opts;
  opts.use_anticipated = a.anticipate;
  if (!a.profession.empty()) opts.profession = Profession{a.profession};
  const Instant at = a.as_of.empty() ? now_ms() : parse_instant(a.as_of);
  const DashboardDoc doc =
      assemble_dashboard(*store->snapshot(), cfg, scope, parse_dashboard_view(a.view), at, opts);
  std::cout << wire::to_json(doc).dump(2) << "\n";
  return 0;
}

int cmd_compute(const std::string& measure, const std::string& data_dir, const std::vector<std::string>& batches,
                const std::string& config) {
  const ServiceConfig cfg = config_from(config);
  auto store = open_store(cfg, data_dir, batches);
  const Snapshot snap = store->snapshot();
  if (!snap->measures.contains(measure)) throw Error(ErrorCode::kNotFound, "unknown measure '" + measure + "'");
  std::vector<TaskInstance> tasks;
  for (const auto& [id, t] : snap->tasks.all()) {
    if (t.measure_id == measure) tasks.push_back(t);
  }
  std::stable_sort(tasks.begin(), tasks.end(), [](const auto& x, const auto& y) {
    return std::tie(x.due_at, x.rule_id, x.sequence) < std::tie(y.due_at, y.rule_id, y.sequence);
  });
  const auto row = [](const std::string& id, const std::string& rule, const std::string& seq,
                      const std::string& prof, const std::string& due, const std::string& ant,
                      const std::string& status) {
    std::cout << std::left << std::setw(34) << id << std::setw(20) << rule << std::setw(5) << seq
              << std::setw(16) << prof << std::setw(22) << due << std::setw(22) << ant << status << "\n";
  };
  row("TASK", "RULE", "SEQ", "PROFESSION", "DUE", "ANTICIPATED", "STATUS");
  for (const auto& t : tasks) {
    row(t.id, t.rule_id, std::to_string(t.sequence), t.profession.code, format_instant(t.due_at),
        format_instant(t.anticipated_due_at), std::string(to_string(t.status)));
  }
  return 0;
}

// Randomized pan/zoom cases with the expected result computed by this
// implementation; a client port replays them to check it agrees.
int cmd_vectors(int count, std::uint64_t seed) {
  const ViewportLimits limits;
  std::mt19937_64 rng(seed);
  const std::int64_t base = unix_ms(parse_instant("2024-01-01T00:00:00Z"));
  std::uniform_int_distribution<std::int64_t> start_dist(0, 365LL * 86'400'000);
  std::uniform_int_distribution<std::int64_t> span_dist(limits.min_span.count(), 60LL * 86'400'000);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> log_factor(std::log(1.0 / 50), std::log(50.0));

  Json cases = Json::array();
  for (int i = 0; i < count; ++i) {
    const Instant start = from_unix_ms(base + start_dist(rng));
    const Viewport v(start, start + Duration{span_dist(rng)});
    Json c = {{"viewport", {{"start", unix_ms(v.start())}, {"end", unix_ms(v.end())}}}};
    if (i % 2 == 0) {
      const Duration delta{static_cast<std::int64_t>((unit(rng) - 0.5) * 4 * v.span().count())};
      const Viewport out = pan(v, delta);
      c["op"] = "pan";
      c["deltaMs"] = delta.count();
      c["expected"] = {{"start", unix_ms(out.start())}, {"end", unix_ms(out.end())}};
    } else {
      const double factor = std::exp(log_factor(rng));
      const Instant anchor = v.start() + Duration{static_cast<std::int64_t>(unit(rng) * (v.span().count() - 1))};
      const Viewport out = zoom(v, factor, anchor, limits);
      c["op"] = "zoom";
      c["factor"] = factor;
      c["anchor"] = unix_ms(anchor);
      c["expected"] = {{"start", unix_ms(out.start())}, {"end", unix_ms(out.end())}};
    }
    cases.push_back(std::move(c));
  }
  const Json doc = {{"units", "unix-ms"},
                    {"limits", {{"minSpanMs", limits.min_span.count()}, {"maxSpanMs", limits.max_span.count()}}},
                    {"seed", seed},
                    {"cases", cases}};
  std::cout << doc.dump(1) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clinical temporal dashboard service"};
  app.require_subcommand(1);

  std::string config;
  std::string data_dir;

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::optional<int> port;
  std::string host = "127.0.0.1";
  std::string ui_dir;
  serve->add_option("--config", config, "Configuration file")->check(CLI::ExistingFile);
  serve->add_option("--port", port, "Listening port (0 picks one)");
  serve->add_option("--data-dir", data_dir, "Snapshot directory");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--ui-dir", ui_dir, "Static files served at /")->check(CLI::ExistingDirectory);

  auto* load = app.add_subcommand("load", "Ingest a batch document");
  std::string batch_file;
  std::string server_url;
  load->add_option("file", batch_file, "Batch JSON file")->required()->check(CLI::ExistingFile);
  auto* load_server = load->add_option("--server", server_url, "Running server, e.g. http://127.0.0.1:8080");
  load->add_option("--data-dir", data_dir, "Snapshot directory")->excludes(load_server);
  load->add_option("--config", config, "Configuration file")->check(CLI::ExistingFile);

  auto* exp = app.add_subcommand("export-dashboard", "Write a dashboard document to stdout");
  ExportArgs ex;
  auto* g_patient = exp->add_option("--patient", ex.patient, "Patient id");
  auto* g_unit = exp->add_option("--unit", ex.unit, "Unit id");
  auto* g_est = exp->add_flag("--establishment", ex.establishment, "Whole establishment");
  g_patient->excludes(g_unit, g_est);
  g_unit->excludes(g_est);
  exp->add_option("--view", ex.view, "isopsy or atbviz")->check(CLI::IsMember({"isopsy", "atbviz"}));
  exp->add_option("--as-of", ex.as_of, "Reference instant (ISO-8601 with offset)");
  exp->add_flag("--anticipate", ex.anticipate, "Place tasks at their anticipated due date");
  exp->add_option("--profession", ex.profession, "Profession filter");
  auto* ex_dir = exp->add_option("--data-dir", ex.data_dir, "Snapshot directory");
  exp->add_option("--batch", ex.batches, "Batch file(s) loaded into a scratch store")
      ->check(CLI::ExistingFile)
      ->excludes(ex_dir);
  exp->add_option("--config", ex.config, "Configuration file")->check(CLI::ExistingFile);

  auto* compute = app.add_subcommand("compute-deadlines", "Print the tasks generated for a measure");
  std::string measure;
  std::vector<std::string> batches;
  compute->add_option("--measure", measure, "Measure id")->required();
  auto* c_dir = compute->add_option("--data-dir", data_dir, "Snapshot directory");
  compute->add_option("--batch", batches, "Batch file(s) loaded into a scratch store")
      ->check(CLI::ExistingFile)
      ->excludes(c_dir);
  compute->add_option("--config", config, "Configuration file")->check(CLI::ExistingFile);

  auto* vectors = app.add_subcommand("viewport-vectors", "Emit pan/zoom conformance vectors as JSON");
  int count = 200;
  std::uint64_t seed = 20240105;
  vectors->add_option("--count", count, "Number of cases")->check(CLI::Range(1, 1'000'000));
  vectors->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (*exp && ex.patient.empty() && ex.unit.empty() && !ex.establishment) {
    std::cerr << "export-dashboard: one of --patient, --unit or --establishment is required\n";
    return 2;
  }

  try {
    if (*serve) return cmd_serve(config, port, data_dir, host, ui_dir);
    if (*load) return cmd_load(batch_file, server_url, data_dir, config);
    if (*exp) return cmd_export(ex);
    if (*compute) return cmd_compute(measure, data_dir, batches, config);
    if (*vectors) return cmd_vectors(count, seed);
  } catch (const ValidationFailed& e) {
    std::cerr << "error: " << e.what() << "\n" << wire::to_json(e.report()).dump(2) << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
