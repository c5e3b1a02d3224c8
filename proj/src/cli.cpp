#include "hdna/cli.hpp"

#include <CLI11.hpp>
#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "hdna/baseline_store.hpp"
#include "hdna/diff.hpp"
#include "hdna/dna.hpp"
#include "hdna/dom_tree.hpp"
#include "hdna/dot.hpp"
#include "hdna/fetch.hpp"
#include "hdna/json_io.hpp"
#include "hdna/monitor.hpp"
#include "hdna/preprocess.hpp"
#include "hdna/version.hpp"

namespace hdna {
namespace fs = std::filesystem;
namespace {

struct FetchFlags {
  FetchConfig config;

  void add_to(CLI::App* app) {
    app->add_option("--timeout-ms", config.timeout_ms, "Fetch timeout in milliseconds")
        ->check(CLI::PositiveNumber);
    app->add_option("--max-redirects", config.max_redirects, "Redirects to follow")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--max-body-bytes", config.max_body_bytes, "Largest accepted body");
    app->add_option("--user-agent", config.user_agent);
    app->add_flag("--insecure", config.insecure, "Skip TLS certificate verification");
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::kIo, "error reading " + path);
  return buf.str();
}

RawHtml load_input(const std::string& arg, const FetchConfig& config) {
  if (is_remote(arg)) return fetch(arg, config).body;
  if (arg == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return {buf.str(), std::nullopt};
  }
  return {read_file(arg), std::nullopt};
}

struct Analysed {
  DomTree tree;
  std::vector<WeightedNode> nodes;
  Fingerprint fp;
};

Analysed analyse(const RawHtml& raw, const std::string& label) {
  Analysed a;
  a.tree = build_tree(preprocess(raw), label);
  a.nodes = dna_of(a.tree);
  a.fp = fingerprint(a.tree);
  return a;
}

std::string fixed(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string triple_text(const std::optional<DnaTriple>& t) {
  if (!t) return "-";
  return t->a + " n=" + std::to_string(t->n) + " d=" + std::to_string(t->d);
}

void write_text_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << data;
  out.close();
  if (!out) throw Error(ErrorKind::kIo, "error writing " + path.string());
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kCharsetUndecodable:
    case ErrorKind::kVersionMismatch:
    case ErrorKind::kCorruptBaseline:
      return kExitDataErr;
    case ErrorKind::kTimeout:
    case ErrorKind::kTooManyRedirects:
    case ErrorKind::kBodyTooLarge:
    case ErrorKind::kNetworkError:
    case ErrorKind::kNonSuccessStatus:
      return kExitFetch;
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kInvalidArgument:
      return kExitUsage;
  }
  return kExitDataErr;
}

int cmd_fingerprint(const std::string& input, bool json, bool weights, const FetchConfig& cfg,
                    std::ostream& out) {
  const Analysed a = analyse(load_input(input, cfg), input);
  if (json) {
    out << fingerprint_json(a.tree, a.fp, a.nodes, weights).dump(2) << "\n";
    return kExitOk;
  }
  out << "canonical: " << a.fp.canonical << "\n";
  out << "digest: " << a.fp.digest << "\n";
  out << "nodes: " << node_count(a.tree) << "\n";
  if (weights) {
    out << "n\tA\tD\tdepth\tweight\n";
    for (const auto& w : a.nodes) {
      out << w.triple.n << "\t" << w.triple.a << "\t" << w.triple.d << "\t" << w.depth << "\t"
          << fixed(w.weight) << "\n";
    }
  }
  return kExitOk;
}

int cmd_diff(const std::string& a_in, const std::string& b_in, bool json,
             const std::optional<double>& threshold, const FetchConfig& cfg, std::ostream& out) {
  const Analysed a = analyse(load_input(a_in, cfg), a_in);
  const Analysed b = analyse(load_input(b_in, cfg), b_in);
  const DiffReport report = diff(a.nodes, b.nodes);
  if (json) {
    nlohmann::json j = report;
    j["old_digest"] = a.fp.digest;
    j["new_digest"] = b.fp.digest;
    out << j.dump(2) << "\n";
  } else {
    out << "identical: " << (report.identical ? "true" : "false") << "\n";
    out << "raw_score: " << fixed(report.raw_score) << "\n";
    out << "normalized_score: " << fixed(report.normalized_score) << "\n";
    if (!report.entries.empty()) {
      out << "n\tstatus\told\tnew\tweight\n";
      for (const auto& e : report.entries) {
        out << e.n << "\t" << to_string(e.status) << "\t" << triple_text(e.old_triple) << "\t"
            << triple_text(e.new_triple) << "\t" << fixed(e.weight_contribution) << "\n";
      }
    }
  }
  if (report.identical) return kExitOk;
  if (threshold && !(report.normalized_score > *threshold)) return kExitOk;
  return kExitDifferent;
}

int cmd_dot(const std::string& input, const std::string& out_path, bool weights,
            const FetchConfig& cfg, std::ostream& out) {
  const Analysed a = analyse(load_input(input, cfg), input);
  const std::string dot = to_dot(a.tree, a.nodes, {weights});
  if (out_path.empty() || out_path == "-") {
    out << dot;
  } else {
    write_text_file(out_path, dot);
  }
  return kExitOk;
}

int cmd_corpus(const std::string& dir, const std::string& out_dir, std::ostream& out) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::kIo, dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".html") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir + ": " + ec.message());

  out << "file\tnodes\ttotal_weight\tdigest\n";
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    const Analysed a = analyse({read_file(path.string()), std::nullopt}, name);
    const fs::path stem = fs::path(out_dir) / path.stem();
    write_text_file(fs::path(stem).concat(".json"),
                    fingerprint_json(a.tree, a.fp, a.nodes, true).dump(2) + "\n");
    write_text_file(fs::path(stem).concat(".dot"), to_dot(a.tree, a.nodes, {true}));
    out << name << "\t" << node_count(a.tree) << "\t" << fixed(total_weight(a.nodes)) << "\t"
        << a.fp.digest << "\n";
  }
  return kExitOk;
}

struct WatchOverrides {
  std::optional<int> interval_s;
  std::optional<double> threshold;
  bool update_baseline_on_alert = false;
  std::optional<std::string> alert_command;
};

int cmd_watch(const std::string& config, std::string store_dir, bool once,
              const std::string& alerts_path, const WatchOverrides& ov, const FetchConfig& cfg,
              std::ostream& out, std::ostream& err) {
  std::vector<WatchSpec> specs = load_watch_config(config);
  for (auto& s : specs) {
    if (ov.interval_s) s.interval_s = *ov.interval_s;
    if (ov.threshold) s.threshold = *ov.threshold;
    if (ov.update_baseline_on_alert) s.update_baseline_on_alert = true;
    if (ov.alert_command) s.alert_command = ov.alert_command;
    validate(s);
  }
  if (specs.empty()) throw Error(ErrorKind::kInvalidArgument, config + " lists no pages");
  if (store_dir.empty()) {
    const char* env = std::getenv("HDNA_STORE");
    store_dir = env && *env ? env : "hdna-baselines";
  }
  const BaselineStore store(store_dir);

  std::ofstream alerts_file;
  std::ostream* alerts_out = &out;
  if (!alerts_path.empty() && alerts_path != "-") {
    alerts_file.open(alerts_path, std::ios::app);
    if (!alerts_file) throw Error(ErrorKind::kIo, "cannot open " + alerts_path);
    alerts_out = &alerts_file;
  }
  AlertSink sink(*alerts_out);
  std::mutex err_mu;
  auto log = [&](const std::string& msg) {
    std::lock_guard lock(err_mu);
    err << "hdna: " << msg << "\n";
  };

  if (once) {
    bool alerted = false;
    const FetchFn fetcher = http_fetcher(cfg);
    for (const auto& spec : specs) {
      CheckResult r = check_once(spec, store, fetcher);
      std::string line = spec.url + "\t" + std::string(to_string(r.outcome));
      if (r.report) line += "\t" + fixed(r.report->normalized_score);
      if (r.outcome == Outcome::kFetchFailed) line += "\t" + r.error;
      // Keep the outcome lines apart from alert JSON when both go to stdout.
      (alerts_out == &out ? err : out) << line << "\n";
      if (r.outcome == Outcome::kAlert) {
        alerted = true;
        dispatch_alert(spec, *r.alert, &sink, log);
      }
    }
    return alerted ? kExitDifferent : kExitOk;
  }

  // Deliver SIGINT/SIGTERM to a waiter thread instead of an async handler.
  sigset_t set;
  sigset_t old;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, &old);
  std::stop_source stop;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    stop.request_stop();
  });

  SystemClock clock;
  WatchOptions options;
  options.fetch = http_fetcher(cfg);
  options.sink = &sink;
  options.log = log;
  options.stop = stop.get_token();
  options.on_result = [&](const WatchSpec& spec, const CheckResult& r) {
    std::string msg = spec.url + " " + std::string(to_string(r.outcome));
    if (r.report) msg += " score=" + fixed(r.report->normalized_score);
    log(msg);
  };
  int rc = kExitOk;
  try {
    run_watch(specs, store, clock, options);
  } catch (...) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    pthread_sigmask(SIG_SETMASK, &old, nullptr);
    throw;
  }
  if (!stop.stop_requested()) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_SETMASK, &old, nullptr);
  return rc;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structural fingerprints and diffs of HTML pages", "hdna"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  FetchFlags fetch_flags;
  bool json = false;
  bool weights = false;

  std::string input;
  auto* fp_cmd = app.add_subcommand("fingerprint", "Print the canonical DNA string and digest");
  fp_cmd->add_option("input", input, "HTML file, '-' for stdin, or http(s) URL")->required();
  fp_cmd->add_flag("--json", json, "JSON output");
  fp_cmd->add_flag("--weights", weights, "Include the per-node table");
  fetch_flags.add_to(fp_cmd);

  std::string old_in;
  std::string new_in;
  std::optional<double> threshold;
  auto* diff_cmd = app.add_subcommand("diff", "Weighted structural diff of two pages");
  diff_cmd->add_option("old", old_in, "Baseline page (file or URL)")->required();
  diff_cmd->add_option("new", new_in, "Page to compare (file or URL)")->required();
  diff_cmd->add_flag("--json", json, "JSON output");
  diff_cmd->add_option("--threshold", threshold,
                       "Only exit 2 when normalized_score is above this")
      ->check(CLI::Range(0.0, 1.0));
  fetch_flags.add_to(diff_cmd);

  std::string dot_out;
  auto* dot_cmd = app.add_subcommand("dot", "Graphviz rendering of the page tree");
  dot_cmd->add_option("input", input, "HTML file, '-' for stdin, or http(s) URL")->required();
  dot_cmd->add_option("-o,--out", dot_out, "Output file (default stdout)");
  dot_cmd->add_flag("--weights", weights, "Add weights to the labels");
  fetch_flags.add_to(dot_cmd);

  std::string config;
  std::string store_dir;
  std::string alerts_path;
  bool once = false;
  WatchOverrides ov;
  auto* watch_cmd = app.add_subcommand("watch", "Monitor pages against stored baselines");
  watch_cmd->add_option("config", config, "JSON array of watch specs")->required();
  watch_cmd->add_option("--store", store_dir, "Baseline directory (default $HDNA_STORE)");
  watch_cmd->add_flag("--once", once, "Check every page once and exit");
  watch_cmd->add_option("--alerts", alerts_path, "Append alert JSON lines here (default stdout)");
  watch_cmd->add_option("--interval", ov.interval_s, "Override interval_s")->check(CLI::PositiveNumber);
  watch_cmd->add_option("--threshold", ov.threshold, "Override threshold")->check(CLI::Range(0.0, 1.0));
  watch_cmd->add_flag("--update-baseline-on-alert", ov.update_baseline_on_alert);
  watch_cmd->add_option("--alert-command", ov.alert_command, "Shell command fed each alert");
  fetch_flags.add_to(watch_cmd);

  std::string corpus_dir;
  std::string corpus_out;
  auto* corpus_cmd = app.add_subcommand("corpus", "Fingerprint and DOT files for a directory");
  corpus_cmd->add_option("dir", corpus_dir, "Directory of .html files")->required();
  corpus_cmd->add_option("-o,--out", corpus_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "hdna: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*fp_cmd) return cmd_fingerprint(input, json, weights, fetch_flags.config, out);
    if (*diff_cmd) return cmd_diff(old_in, new_in, json, threshold, fetch_flags.config, out);
    if (*dot_cmd) return cmd_dot(input, dot_out, weights, fetch_flags.config, out);
    if (*corpus_cmd) return cmd_corpus(corpus_dir, corpus_out, out);
    if (*watch_cmd) {
      if (!fs::exists(config)) {
        err << "hdna: watch config " << config << " not found\n\n" << watch_cmd->help();
        return kExitUsage;
      }
      return cmd_watch(config, store_dir, once, alerts_path, ov, fetch_flags.config, out, err);
    }
  } catch (const Error& e) {
    err << "hdna: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "hdna: " << e.what() << "\n";
    return kExitDataErr;
  }
  return kExitUsage;
}

}  // namespace hdna
