#include "hdna/monitor.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <pthread.h>
#include <signal.h>
#include <sys/wait.h>

#include "hdna/dom_tree.hpp"
#include "hdna/error.hpp"
#include "hdna/preprocess.hpp"
#include "hdna/time_util.hpp"

namespace hdna {
namespace {

std::string now_rfc3339() { return rfc3339_utc(std::chrono::system_clock::now()); }

std::vector<ChangeEntry> heaviest(const std::vector<ChangeEntry>& entries) {
  if (entries.size() <= kMaxAlertEntries) return entries;
  std::vector<ChangeEntry> top = entries;
  std::stable_sort(top.begin(), top.end(), [](const ChangeEntry& a, const ChangeEntry& b) {
    return a.weight_contribution > b.weight_contribution;
  });
  top.resize(kMaxAlertEntries);
  std::sort(top.begin(), top.end(),
            [](const ChangeEntry& a, const ChangeEntry& b) { return a.n < b.n; });
  return top;
}

}  // namespace

void validate(const WatchSpec& spec) {
  if (spec.url.empty()) throw Error(ErrorKind::kInvalidArgument, "watch spec without url");
  if (!(spec.threshold >= 0.0 && spec.threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, spec.url + ": threshold must be within [0, 1]");
  }
  if (spec.interval_s < 1) {
    throw Error(ErrorKind::kInvalidArgument, spec.url + ": interval_s must be at least 1");
  }
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kBaselineCreated: return "BaselineCreated";
    case Outcome::kUnchanged: return "Unchanged";
    case Outcome::kChangedBelowThreshold: return "ChangedBelowThreshold";
    case Outcome::kAlert: return "Alert";
    case Outcome::kAlertSuppressed: return "AlertSuppressed";
    case Outcome::kFetchFailed: return "FetchFailed";
  }
  return "?";
}

nlohmann::json to_json_value(const AlertEvent& e) {
  return {{"url", e.url},
          {"timestamp", e.timestamp},
          {"raw_score", e.raw_score},
          {"normalized_score", e.normalized_score},
          {"threshold", e.threshold},
          {"entries", e.entries},
          {"old_digest", e.old_digest},
          {"new_digest", e.new_digest}};
}

FetchFn http_fetcher(FetchConfig config) {
  return [config = std::move(config)](const std::string& url) { return fetch(url, config).body; };
}

CheckResult check_once(const WatchSpec& spec, const BaselineStore& store, const FetchFn& fetch_fn,
                       std::optional<AlertMemory>* memory) {
  CheckResult result;
  try {
    const DomTree tree = build_tree(preprocess(fetch_fn(spec.url)), spec.url);
    const auto nodes = dna_of(tree);
    const Fingerprint fp = fingerprint(tree);
    result.digest = fp.digest;

    auto baseline = store.load(spec.url);
    if (!baseline) {
      store.save(make_baseline(spec.url, fp, nodes, now_rfc3339()));
      result.outcome = Outcome::kBaselineCreated;
      return result;
    }
    if (baseline->preprocess_version != kPreprocessVersion) {
      throw Error(ErrorKind::kVersionMismatch,
                  "baseline was made with preprocessing " + baseline->preprocess_version);
    }
    if (!quick_changed(baseline->fingerprint, fp)) {
      result.outcome = Outcome::kUnchanged;
      return result;
    }

    const auto old_nodes = weighted_nodes(*baseline);
    result.report = diff(old_nodes, nodes);
    const DiffReport& report = *result.report;
    if (!(report.normalized_score > spec.threshold)) {
      store.save(make_baseline(spec.url, fp, nodes, now_rfc3339()));
      result.outcome = Outcome::kChangedBelowThreshold;
      return result;
    }

    AlertEvent event;
    event.url = spec.url;
    event.timestamp = now_rfc3339();
    event.raw_score = report.raw_score;
    event.normalized_score = report.normalized_score;
    event.threshold = spec.threshold;
    event.entries = heaviest(report.entries);
    event.old_digest = baseline->fingerprint.digest;
    event.new_digest = fp.digest;
    result.alert = std::move(event);
    result.outcome = Outcome::kAlert;

    if (spec.update_baseline_on_alert) {
      store.save(make_baseline(spec.url, fp, nodes, now_rfc3339()));
    } else if (memory) {
      AlertMemory current{baseline->fingerprint.digest, fp.digest};
      if (*memory && (*memory)->baseline_digest == current.baseline_digest &&
          (*memory)->new_digest == current.new_digest) {
        result.outcome = Outcome::kAlertSuppressed;
      }
      *memory = std::move(current);
    }
  } catch (const std::exception& e) {
    CheckResult failed;
    failed.outcome = Outcome::kFetchFailed;
    failed.digest = result.digest;
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
      failed.error = std::string(to_string(err->kind())) + ": " + e.what();
    } else {
      failed.error = e.what();
    }
    return failed;
  }
  return result;
}

void AlertSink::write(const AlertEvent& event) {
  const std::string line = to_json_value(event).dump() + "\n";
  std::lock_guard lock(mu_);
  out_ << line << std::flush;
}

int run_alert_command(const std::string& command, const AlertEvent& event) {
  // A command that ignores its stdin must not take the monitor down with
  // SIGPIPE, so the signal is held for this thread while writing.
  sigset_t pipe_set;
  sigset_t old_set;
  sigemptyset(&pipe_set);
  sigaddset(&pipe_set, SIGPIPE);
  pthread_sigmask(SIG_BLOCK, &pipe_set, &old_set);

  FILE* pipe = ::popen(command.c_str(), "w");
  if (!pipe) {
    pthread_sigmask(SIG_SETMASK, &old_set, nullptr);
    return -1;
  }
  const std::string payload = to_json_value(event).dump() + "\n";
  std::fwrite(payload.data(), 1, payload.size(), pipe);
  int status = ::pclose(pipe);

  const timespec zero{0, 0};
  while (sigtimedwait(&pipe_set, nullptr, &zero) > 0) {
  }
  pthread_sigmask(SIG_SETMASK, &old_set, nullptr);
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

void dispatch_alert(const WatchSpec& spec, const AlertEvent& event, AlertSink* sink,
                    const std::function<void(const std::string&)>& log) {
  if (sink) sink->write(event);
  if (spec.alert_command) {
    int rc = run_alert_command(*spec.alert_command, event);
    if (rc != 0 && log) log(spec.url + ": alert command exited with status " + std::to_string(rc));
  }
}

bool SystemClock::sleep_until(time_point deadline, std::stop_token stop) {
  std::unique_lock lock(mu_);
  cv_.wait_until(lock, stop, deadline, [] { return false; });
  return !stop.stop_requested();
}

Clock::time_point SimulatedClock::now() {
  std::lock_guard lock(mu_);
  return now_;
}

void SimulatedClock::maybe_advance() {
  if (sleeping_.empty() || static_cast<int>(sleeping_.size()) < attached_) return;
  // A sleeper whose deadline has passed is about to wake; let it run first.
  if (*sleeping_.begin() <= now_) return;
  now_ = *sleeping_.begin();
  cv_.notify_all();
}

bool SimulatedClock::sleep_until(time_point deadline, std::stop_token stop) {
  std::unique_lock lock(mu_);
  if (deadline <= now_) return !stop.stop_requested();
  auto it = sleeping_.insert(deadline);
  maybe_advance();
  cv_.wait(lock, stop, [&] { return now_ >= deadline; });
  sleeping_.erase(it);
  return !stop.stop_requested();
}

void SimulatedClock::attach() {
  std::lock_guard lock(mu_);
  ++attached_;
}

void SimulatedClock::detach() {
  std::lock_guard lock(mu_);
  --attached_;
  maybe_advance();
}

std::vector<std::size_t> run_watch(const std::vector<WatchSpec>& specs, const BaselineStore& store,
                                   Clock& clock, WatchOptions options) {
  std::set<std::string> urls;
  for (const auto& spec : specs) {
    validate(spec);
    if (!urls.insert(spec.url).second) {
      throw Error(ErrorKind::kInvalidArgument, "duplicate watch url " + spec.url);
    }
  }
  if (!options.fetch) options.fetch = http_fetcher();
  if (!options.log) {
    options.log = [](const std::string& msg) { std::cerr << "hdna: " << msg << "\n"; };
  }

  std::vector<std::size_t> counts(specs.size(), 0);
  const Clock::time_point start = clock.now();
  {
    std::vector<std::jthread> workers;
    workers.reserve(specs.size());
    // Attach up front so simulated time cannot move before every worker
    // has reached its first sleep.
    for (std::size_t i = 0; i < specs.size(); ++i) clock.attach();
    for (std::size_t i = 0; i < specs.size(); ++i) {
      workers.emplace_back([&, i] {
        const WatchSpec& spec = specs[i];
        const auto interval = std::chrono::seconds(spec.interval_s);
        std::optional<AlertMemory> memory;
        Clock::time_point next = start;
        while (!options.stop.stop_requested()) {
          if (options.horizon && next >= start + *options.horizon) break;
          if (!clock.sleep_until(next, options.stop)) break;
          CheckResult r = check_once(spec, store, options.fetch, &memory);
          ++counts[i];
          if (r.outcome == Outcome::kFetchFailed) options.log(spec.url + ": " + r.error);
          if (r.outcome == Outcome::kAlertSuppressed) {
            options.log(spec.url + ": change still present (alert suppressed)");
          }
          if (r.outcome == Outcome::kAlert) dispatch_alert(spec, *r.alert, options.sink, options.log);
          if (options.on_result) options.on_result(spec, r);
          next += interval;
          const auto now = clock.now();
          while (next < now) next += interval;
        }
        clock.detach();
      });
    }
  }
  return counts;
}

std::vector<WatchSpec> load_watch_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read watch config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidArgument, path + ": " + e.what());
  }
  if (!j.is_array()) throw Error(ErrorKind::kInvalidArgument, path + ": expected a JSON array");
  std::vector<WatchSpec> specs;
  try {
    for (const auto& item : j) {
      WatchSpec s;
      item.at("url").get_to(s.url);
      s.interval_s = item.value("interval_s", s.interval_s);
      s.threshold = item.value("threshold", s.threshold);
      s.update_baseline_on_alert = item.value("update_baseline_on_alert", false);
      if (item.contains("alert_command") && !item["alert_command"].is_null()) {
        s.alert_command = item["alert_command"].get<std::string>();
      }
      validate(s);
      specs.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidArgument, path + ": " + e.what());
  }
  return specs;
}

}  // namespace hdna
