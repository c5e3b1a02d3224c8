#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <set>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "hdna/baseline_store.hpp"
#include "hdna/diff.hpp"
#include "hdna/fetch.hpp"
#include "hdna/json_io.hpp"

namespace hdna {

struct WatchSpec {
  std::string url;
  int interval_s = 60;
  double threshold = 0.1;  // on normalized_score, strict >
  bool update_baseline_on_alert = false;
  std::optional<std::string> alert_command;
};

// Throws Error(kInvalidArgument) unless threshold is in [0,1] and
// interval_s >= 1.
void validate(const WatchSpec& spec);

inline constexpr std::size_t kMaxAlertEntries = 50;

struct AlertEvent {
  std::string url;
  std::string timestamp;
  double raw_score = 0.0;
  double normalized_score = 0.0;
  double threshold = 0.0;
  std::vector<ChangeEntry> entries;  // the kMaxAlertEntries heaviest, by n
  std::string old_digest;
  std::string new_digest;
};

nlohmann::json to_json_value(const AlertEvent& event);

enum class Outcome {
  kBaselineCreated,
  kUnchanged,
  kChangedBelowThreshold,
  kAlert,
  // Same change as the previous alert against an unrefreshed baseline.
  kAlertSuppressed,
  kFetchFailed,
};

std::string_view to_string(Outcome outcome);

struct CheckResult {
  Outcome outcome = Outcome::kFetchFailed;
  std::optional<DiffReport> report;  // set whenever a full diff ran
  std::optional<AlertEvent> alert;   // kAlert and kAlertSuppressed
  std::string digest;                // digest of what was fetched
  std::string error;                 // kFetchFailed cause
};

using FetchFn = std::function<RawHtml(const std::string& url)>;

FetchFn http_fetcher(FetchConfig config = {});

// Per-URL memory of the last alert, for repeat suppression.
struct AlertMemory {
  std::string baseline_digest;
  std::string new_digest;
};

// One fetch/fingerprint/compare cycle. Never throws for fetch, parse or
// store problems; they become kFetchFailed. Pass the same memory on every
// call for a URL to get repeat-alert suppression.
CheckResult check_once(const WatchSpec& spec, const BaselineStore& store, const FetchFn& fetch,
                       std::optional<AlertMemory>* memory = nullptr);

// Serialised JSON Lines output shared by all watch tasks.
class AlertSink {
 public:
  explicit AlertSink(std::ostream& out) : out_(out) {}
  void write(const AlertEvent& event);

 private:
  std::mutex mu_;
  std::ostream& out_;
};

// Runs `command` through the shell with the event JSON on stdin. Returns
// the exit status (-1 if it could not be started).
int run_alert_command(const std::string& command, const AlertEvent& event);

class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  using duration = std::chrono::steady_clock::duration;

  virtual ~Clock() = default;
  virtual time_point now() = 0;
  // False if stop was requested before the deadline.
  virtual bool sleep_until(time_point deadline, std::stop_token stop) = 0;
  // Participating threads register so a simulated clock knows when
  // everyone is asleep.
  virtual void attach() {}
  virtual void detach() {}
};

class SystemClock : public Clock {
 public:
  time_point now() override { return std::chrono::steady_clock::now(); }
  bool sleep_until(time_point deadline, std::stop_token stop) override;

 private:
  std::mutex mu_;
  std::condition_variable_any cv_;
};

// Discrete-event time: when every attached thread is sleeping, time jumps to
// the earliest deadline. Checks therefore take zero simulated time.
class SimulatedClock : public Clock {
 public:
  explicit SimulatedClock(time_point start = time_point{}) : now_(start) {}

  time_point now() override;
  bool sleep_until(time_point deadline, std::stop_token stop) override;
  void attach() override;
  void detach() override;

 private:
  void maybe_advance();  // requires mu_

  std::mutex mu_;
  std::condition_variable_any cv_;
  time_point now_;
  int attached_ = 0;
  std::multiset<time_point> sleeping_;
};

struct WatchOptions {
  FetchFn fetch;                                   // default: http_fetcher()
  AlertSink* sink = nullptr;                       // alerts as JSON Lines
  std::function<void(const WatchSpec&, const CheckResult&)> on_result;
  std::function<void(const std::string&)> log;     // warnings; default stderr
  std::optional<Clock::duration> horizon;          // stop scheduling after this
  std::stop_token stop;
};

// One thread per spec; spec i is checked at start + k * interval for
// k = 0, 1, ... Slots missed because a check overran are skipped. Returns
// the number of checks run per spec.
std::vector<std::size_t> run_watch(const std::vector<WatchSpec>& specs, const BaselineStore& store,
                                   Clock& clock, WatchOptions options = {});

// Sink + alert_command for one alert; failures go to `log`.
void dispatch_alert(const WatchSpec& spec, const AlertEvent& event, AlertSink* sink,
                    const std::function<void(const std::string&)>& log);

// Reads a JSON array of WatchSpec objects.
std::vector<WatchSpec> load_watch_config(const std::string& path);

}  // namespace hdna
