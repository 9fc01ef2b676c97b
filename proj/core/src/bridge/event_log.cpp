#include "ave/bridge/event_log.hpp"

#include "ave/bridge/session.hpp"
#include "ave/errors.hpp"

namespace ave::bridge {

using nlohmann::json;

EventLog::EventLog(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) throw IoError("cannot write " + path.string());
}

void EventLog::line(const json& j) { out_ << j.dump() << '\n'; }

void EventLog::header(const std::string& session_id, const std::string& checkpoint, const json& config) {
  line({{"kind", "header"}, {"session_id", session_id}, {"checkpoint", checkpoint}, {"config", config}});
}

void EventLog::incoming(std::uint64_t tick, std::string_view raw) {
  line({{"kind", "in"}, {"tick", tick}, {"raw", std::string(raw)}});
}

void EventLog::outgoing(std::uint64_t tick, const WireMessage& m) {
  line({{"kind", "out"}, {"tick", tick}, {"msg", to_json(m)}});
}

void EventLog::tick(std::uint64_t tick, std::optional<ActionId> input, bool trained) {
  line({{"kind", "tick"}, {"tick", tick}, {"input", input ? json(input->index) : json(nullptr)}, {"trained", trained}});
}

void EventLog::flush() { out_.flush(); }

LoggedSession read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  LoggedSession log;
  bool have_header = false;
  std::string text;
  for (std::size_t n = 1; std::getline(in, text); ++n) {
    if (text.empty()) continue;
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.contains("kind"))
      throw ConfigError(path.string() + ":" + std::to_string(n) + ": malformed log line");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "header") {
      log.session_id = j.at("session_id").get<std::string>();
      log.checkpoint = j.at("checkpoint").get<std::string>();
      log.config = j.at("config");
      have_header = true;
    } else if (kind == "in") {
      log.incoming.push_back(j.at("raw").get<std::string>());
    } else if (kind == "out") {
      log.outgoing.push_back(from_json(j.at("msg")));
    } else if (kind == "tick") {
      TickRecord r;
      r.tick = j.at("tick").get<std::uint64_t>();
      if (!j.at("input").is_null()) r.input = ActionId{j.at("input").get<int>()};
      r.trained = j.at("trained").get<bool>();
      log.ticks.push_back(r);
    } else {
      throw ConfigError(path.string() + ":" + std::to_string(n) + ": unknown record kind '" + kind + "'");
    }
  }
  if (!have_header) throw ConfigError(path.string() + ": missing header record");
  return log;
}

ReplayReport replay_session(const LoggedSession& log, const learn::ValueApproximator& copilot) {
  const auto base = harness::default_config(harness::ExperimentKind::serve, harness::Preset::quick);
  auto cfg = harness::apply_overrides(base, log.config);
  SessionOptions options = make_session_options(cfg, log.session_id);
  options.threaded_bonus = false;
  options.checkpoint_dir.clear();
  Session session(options, copilot);

  std::vector<const WireMessage*> expected;
  for (const auto& m : log.outgoing)
    if (std::holds_alternative<Frame>(m) || std::holds_alternative<EpisodeEnd>(m)) expected.push_back(&m);

  ReplayReport report;
  std::size_t next = 0;
  const auto compare = [&](const WireMessage& got) {
    const std::size_t idx = report.compared++;
    if (next >= expected.size() || !(*expected[next] == got)) {
      ++report.mismatches;
      if (!report.first_mismatch) report.first_mismatch = idx;
    }
    ++next;
  };
  for (const auto& rec : log.ticks) {
    auto r = session.tick(rec.input, rec.trained);
    ++report.ticks;
    if (r.episode_end) compare(*r.episode_end);
    compare(r.frame);
    if (r.frame.intervened) report.intervened_seqs.push_back(r.frame.seq);
  }
  if (next < expected.size()) {
    report.mismatches += expected.size() - next;
    if (!report.first_mismatch) report.first_mismatch = next;
  }
  return report;
}

}  // namespace ave::bridge
