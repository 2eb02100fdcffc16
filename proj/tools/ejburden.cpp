// Command-line front end: validate | compute | report | serve.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data-validation
// failure.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "ejb/api.hpp"
#include "ejb/engine.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInvalidData = 3;

struct Options {
  std::string config;
  std::string layer;
  std::string radius_m;
  std::string scale;
  std::string method;
  std::string k;
  std::string out_dir;
  std::string out;
  std::string kind = "maup";
  std::string host = "127.0.0.1";
  int port = 8080;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

void write_file(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ejb::ConfigError("cannot write " + path.string());
  out << body;
  if (!out) throw ejb::ConfigError("failed writing " + path.string());
}

fs::path output_dir(const Options& o, const ejb::RunConfig& cfg) {
  if (!o.out_dir.empty()) return o.out_dir;
  return cfg.resolve(cfg.output_dir);
}

std::map<std::string, std::string> request_params(const Options& o) {
  return {{"layer", o.layer}, {"radius_m", o.radius_m}, {"scale", o.scale},
          {"method", o.method}, {"k", o.k}};
}

// Loads and validates; returns nullopt after printing when the data is unusable.
std::optional<ejb::Dataset> load_valid(const Options& o, const fs::path& report_path) {
  ejb::Dataset data = ejb::load_dataset(ejb::load_config(o.config));
  const ejb::ValidationReport report = ejb::validate(data);
  if (!report.usable()) {
    write_file(report_path, ejb::render_validation(report));
    std::cerr << "data validation failed with " << report.count(ejb::Severity::error)
              << " error(s); see " << report_path.string() << "\n";
    return std::nullopt;
  }
  return data;
}

int cmd_validate(const Options& o) {
  const ejb::RunConfig cfg = ejb::load_config(o.config);
  const ejb::Dataset data = ejb::load_dataset(cfg);
  const ejb::ValidationReport report = ejb::validate(data);
  const fs::path path = o.out.empty() ? output_dir(o, cfg) / "validation_report.json" : fs::path(o.out);
  write_file(path, ejb::render_validation(report));
  std::cout << "validation: " << report.count(ejb::Severity::error) << " error(s), "
            << report.count(ejb::Severity::warn) << " warning(s), "
            << report.count(ejb::Severity::info) << " info; report written to " << path.string()
            << "\n";
  return report.usable() ? kExitOk : kExitInvalidData;
}

int cmd_compute(const Options& o) {
  const ejb::RunConfig cfg = ejb::load_config(o.config);
  const fs::path dir = output_dir(o, cfg);
  auto data = load_valid(o, dir / "validation_report.json");
  if (!data) return kExitInvalidData;

  const ejb::RunRequest req = ejb::make_request(*data, request_params(o));
  const ejb::RunResult run = ejb::run_burden(*data, req, o.threads);
  write_file(dir / "burden_schools.csv", ejb::render_schools_csv(run));
  write_file(dir / "burden_zones.geojson", ejb::render_surface_geojson(*data, run));
  write_file(dir / "run_metadata.json", ejb::render_run_metadata(*data, run));
  std::cout << "computed " << req.key() << " -> " << dir.string() << "\n";
  return kExitOk;
}

int cmd_report(const Options& o) {
  const ejb::RunConfig cfg = ejb::load_config(o.config);
  const fs::path dir = output_dir(o, cfg);
  auto data = load_valid(o, dir / "validation_report.json");
  if (!data) return kExitInvalidData;

  ejb::RunRequest req = ejb::make_request(*data, request_params(o));
  std::string body;
  std::string name;
  if (o.kind == "maup") {
    req.scale = ejb::ZoneScale::community_area;
    body = ejb::render_maup(*data, req, ejb::run_maup(*data, req, o.threads));
    name = "maup_report.json";
  } else {
    body = ejb::render_demographics(*data, req, ejb::run_demographics(*data, req, o.threads));
    name = "demographics_report.json";
  }
  const fs::path path = o.out.empty() ? dir / name : fs::path(o.out);
  write_file(path, body);
  std::cout << o.kind << " report written to " << path.string() << "\n";
  return kExitOk;
}

int cmd_serve(const Options& o) {
  // Block termination signals before any thread starts; a dedicated thread
  // waits for them and stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto data = load_valid(o, fs::temp_directory_path() / "ejburden_validation_report.json");
  if (!data) return kExitInvalidData;

  ejb::Service service(std::move(*data), o.threads);
  ejb::HttpServer server(service);
  if (!server.bind(o.host, o.port)) {
    std::cerr << "cannot bind " << o.host << ":" << o.port << "\n";
    return kExitUsage;
  }
  std::cout << "listening on http://" << o.host << ":" << server.port() << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  waiter.join();
  std::cout << "stopped" << std::endl;
  return kExitOk;
}

void add_run_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--layer", o.layer, "Hazard layer id (default from config)");
  cmd->add_option("--radius-m", o.radius_m, "Radius in meters (default 1609.344)");
  cmd->add_option("--method", o.method, "natural_breaks | quantile");
  cmd->add_option("--k", o.k, "Class count");
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximity burden engine for school populations"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Validate the configured datasets");
  validate->add_option("--config", o.config, "Run config JSON")->required();
  validate->add_option("--out", o.out, "Report path (default <output_dir>/validation_report.json)");
  validate->add_option("--out-dir", o.out_dir, "Output directory");

  auto* compute = app.add_subcommand("compute", "Compute per-school and zone burden");
  compute->add_option("--config", o.config, "Run config JSON")->required();
  add_run_options(compute, o);
  compute->add_option("--scale", o.scale, "community_area | census_tract");
  compute->add_option("--out-dir", o.out_dir, "Output directory");

  auto* report = app.add_subcommand("report", "Write a MAUP or demographics report");
  report->add_option("--config", o.config, "Run config JSON")->required();
  report->add_option("--kind", o.kind, "maup | demographics")
      ->check(CLI::IsMember({"maup", "demographics"}));
  add_run_options(report, o);
  report->add_option("--scale", o.scale, "Scale for the demographics report");
  report->add_option("--out-dir", o.out_dir, "Output directory");
  report->add_option("--out", o.out, "Report path");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", o.config, "Run config JSON")->required();
  serve->add_option("--port", o.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*compute) return cmd_compute(o);
    if (*report) return cmd_report(o);
    if (*serve) return cmd_serve(o);
  } catch (const ejb::RequestError& e) {
    std::cerr << "error (" << e.code() << "): " << e.what() << "\n";
    return kExitUsage;
  } catch (const ejb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
