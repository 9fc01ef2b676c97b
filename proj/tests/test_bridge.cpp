#include <gtest/gtest.h>

#include <filesystem>
#include <future>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "ave/bridge/event_log.hpp"
#include "ave/bridge/protocol.hpp"
#include "ave/bridge/server.hpp"
#include "ave/bridge/session.hpp"
#include "ave/errors.hpp"

namespace ave::bridge {
namespace {

namespace fs = std::filesystem;

learn::ValueApproximator small_copilot(std::uint64_t seed = 1) {
  SeededRng rng(seed);
  return learn::ValueApproximator(lander::kCopilotObsDims, 16, lander::LanderAction::kCount, rng);
}

SessionOptions quick_options() {
  SessionOptions o;
  o.reward.emp_query.n_rollouts = 6;
  o.reward.emp_query.horizon = 6;
  o.threaded_bonus = false;
  o.seed = 5;
  return o;
}

Frame random_frame(SeededRng& r) {
  Frame f;
  f.seq = r.next_u64() >> 12;
  f.t = r.uniform() * 100;
  f.x = r.uniform() - 0.5;
  f.y = r.uniform();
  f.vx = r.uniform() - 0.5;
  f.vy = -r.uniform();
  f.theta = r.uniform() - 0.5;
  f.omega = r.uniform() - 0.5;
  f.left_contact = r.bernoulli(0.5);
  f.right_contact = r.bernoulli(0.5);
  f.goal_x = r.uniform() - 0.5;
  f.user_action = r.uniform_int(6);
  f.executed_action = r.uniform_int(6);
  f.intervened = f.user_action != f.executed_action;
  f.emp_bonus = r.uniform() * 1e-3;
  f.episode = r.uniform_int(100);
  f.score = r.uniform() * 200 - 100;
  return f;
}

TEST(Protocol, FrameRoundTripIsExact) {
  SeededRng r(3);
  for (int i = 0; i < 200; ++i) {
    const WireMessage m = random_frame(r);
    ASSERT_EQ(decode(encode(m)), m);
  }
}

TEST(Protocol, EveryMessageTypeRoundTrips) {
  const std::vector<WireMessage> msgs{Hello{1, "abc"}, ConfigMsg{"baseline", 0.3, 0.0, 0.02, 50}, Input{7, 4},
                                      EpisodeEnd{3, "crash", -100.0, 0.25}, ErrorMsg{"nope"}};
  for (const auto& m : msgs) EXPECT_EQ(decode(encode(m)), m) << encode(m);
}

TEST(Protocol, InputValidation) {
  EXPECT_EQ(decode_input(R"({"type":"input","seq":1,"action":5})").index, 5);
  EXPECT_THROW(decode_input(R"({"type":"input","seq":1,"action":6})"), ProtocolError);
  EXPECT_THROW(decode_input(R"({"type":"input","seq":1,"action":-1})"), ProtocolError);
  EXPECT_THROW(decode_input(R"({"type":"input","seq":1})"), ProtocolError);
  EXPECT_THROW(decode_input(R"({"type":"input","seq":1,"action":"up"})"), ProtocolError);
  EXPECT_THROW(decode_input(R"({"type":"frame","seq":1})"), ProtocolError);
  EXPECT_THROW(decode_input("not json"), ProtocolError);
  EXPECT_EQ(decode_input(R"({"type":"input","seq":1,"action":2,"extra":[1,2]})").index, 2);
}

TEST(Protocol, MissingFieldIsNamed) {
  try {
    decode(R"({"type":"hello","session_id":"x"})");
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("proto_version"), std::string::npos) << e.what();
  }
  EXPECT_THROW(decode(R"({"type":"shout"})"), ProtocolError);
}

TEST(Session, SequenceIncreasesAndNoInputMeansAllOff) {
  Session s(quick_options(), small_copilot());
  std::uint64_t last = 0;
  for (int i = 0; i < 40; ++i) {
    const auto r = s.tick(std::nullopt);
    if (i > 0) EXPECT_GT(r.frame.seq, last);
    last = r.frame.seq;
    EXPECT_EQ(r.frame.user_action, 0);
  }
  EXPECT_EQ(s.stats().ticks, 40u);
}

TEST(Session, AlphaOneNeverIntervenes) {
  auto o = quick_options();
  o.copilot.alpha = 1.0;
  Session s(o, small_copilot(9));
  SeededRng r(2);
  for (int i = 0; i < 300; ++i) {
    const auto res = s.tick(ActionId{r.uniform_int(6)});
    ASSERT_FALSE(res.frame.intervened);
    ASSERT_EQ(res.frame.executed_action, res.frame.user_action);
  }
}

TEST(Session, InputLatchesUntilEpisodeEnds) {
  auto o = quick_options();
  o.copilot.alpha = 1.0;
  Session s(o, small_copilot());
  auto r = s.tick(ActionId{1});
  EXPECT_EQ(r.frame.user_action, 1);
  bool ended = false;
  for (int i = 0; i < 2000 && !ended; ++i) {
    r = s.tick(std::nullopt);
    if (r.episode_end) {
      ended = true;
      EXPECT_EQ(r.frame.user_action, 0);
    } else {
      EXPECT_EQ(r.frame.user_action, 1);
    }
  }
  EXPECT_TRUE(ended);
  EXPECT_EQ(s.stats().episodes, 1);
  EXPECT_EQ(r.episode_end->episode, 0);
  EXPECT_FALSE(r.episode_end->outcome.empty());
}

TEST(Session, BonusStalenessIsBounded) {
  auto o = quick_options();
  o.threaded_bonus = true;
  Session s(o, small_copilot());
  for (int i = 0; i < 200; ++i) s.tick(ActionId{3});
  EXPECT_LE(s.stats().max_bonus_staleness, 3);
}

TEST(Session, FinetuneTrainsAndCounts) {
  auto o = quick_options();
  o.mode = "finetune";
  o.schedule.learning_starts = 16;
  o.schedule.batch_size = 8;
  Session s(o, small_copilot());
  const auto before = s.copilot();
  for (int i = 0; i < 200; ++i) s.tick(ActionId{i % 6}, true);
  EXPECT_GT(s.stats().train_steps, 0u);
  EXPECT_FALSE(s.copilot() == before);
}

TEST(Session, OptionsValidate) {
  auto o = quick_options();
  o.bonus_lag = 4;
  EXPECT_THROW(o.validate(), ConfigError);
  o = quick_options();
  o.mode = "spectate";
  EXPECT_THROW(o.validate(), ConfigError);
}

harness::ExperimentConfig serve_config(const fs::path& log_dir, const std::string& mode) {
  auto c = harness::default_config(harness::ExperimentKind::serve, harness::Preset::quick);
  c.serve.mode = mode;
  c.serve.log_dir = log_dir.string();
  c.lander.reward.emp_query.n_rollouts = 6;
  c.lander.reward.emp_query.horizon = 6;
  c.lander.copilot_schedule.learning_starts = 16;
  c.lander.copilot_schedule.batch_size = 8;
  return c;
}

TEST(EventLog, ReplayReproducesEveryFrame) {
  const auto dir = fs::temp_directory_path() / "ave_bridge_log";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto path = dir / "s.jsonl";
  const auto cfg = serve_config(dir, "finetune");
  const auto net = small_copilot(4);
  std::vector<std::uint64_t> lit;
  {
    auto o = make_session_options(cfg, "replay-me");
    o.threaded_bonus = true;
    Session s(o, net);
    EventLog log(path);
    log.header(o.session_id, "untrained", harness::to_json(cfg));
    SeededRng r(8);
    for (std::uint64_t t = 0; t < 150; ++t) {
      std::optional<ActionId> in;
      if (r.bernoulli(0.2)) {
        in = ActionId{r.uniform_int(6)};
        log.incoming(t, encode(Input{t, in->index}));
      }
      const auto res = s.tick(in);
      log.tick(t, in, res.trained);
      if (res.episode_end) log.outgoing(t, *res.episode_end);
      log.outgoing(t, res.frame);
      if (res.frame.intervened) lit.push_back(res.frame.seq);
    }
    s.flush();
    log.flush();
  }
  const auto logged = read_event_log(path);
  EXPECT_EQ(logged.session_id, "replay-me");
  EXPECT_EQ(logged.ticks.size(), 150u);
  const auto report = replay_session(logged, net);
  EXPECT_EQ(report.ticks, 150u);
  EXPECT_GE(report.compared, 150u);
  EXPECT_EQ(report.mismatches, 0u) << "first mismatch at " << report.first_mismatch.value_or(0);
  EXPECT_EQ(report.intervened_seqs, lit);
  fs::remove_all(dir);
}

TEST(EventLog, TamperedLogIsDetected) {
  const auto dir = fs::temp_directory_path() / "ave_bridge_log2";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = serve_config(dir, "play");
  const auto net = small_copilot(4);
  LoggedSession logged;
  logged.session_id = "t";
  logged.config = harness::to_json(cfg);
  {
    Session s(make_session_options(cfg, "t"), net);
    for (std::uint64_t t = 0; t < 20; ++t) {
      const auto res = s.tick(ActionId{3});
      logged.ticks.push_back({t, ActionId{3}, res.trained});
      logged.outgoing.push_back(res.frame);
    }
  }
  std::get<Frame>(logged.outgoing[7]).x += 1e-9;
  const auto report = replay_session(logged, net);
  EXPECT_EQ(report.mismatches, 1u);
  EXPECT_EQ(report.first_mismatch, 7u);
  fs::remove_all(dir);
}

namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = boost::asio::ip::tcp;

WireMessage read_msg(websocket::stream<tcp::socket>& ws) {
  beast::flat_buffer buf;
  ws.read(buf);
  return decode(beast::buffers_to_string(buf.data()));
}

TEST(Server, EndToEndSessionSurvivesMalformedInput) {
  const auto dir = fs::temp_directory_path() / "ave_bridge_server";
  fs::remove_all(dir);
  ServerOptions opts;
  opts.config = serve_config(dir, "play");
  opts.config.lander.copilot.alpha = 1.0;
  opts.copilot = small_copilot();
  opts.checkpoint_label = "untrained";
  std::string ended_id;
  SessionStats ended_stats;
  std::promise<void> ended;
  opts.on_session_end = [&](const std::string& id, const SessionStats& st) {
    ended_id = id;
    ended_stats = st;
    ended.set_value();
  };
  Server server(std::move(opts));
  server.start();

  boost::asio::io_context io;
  tcp::resolver resolver(io);
  websocket::stream<tcp::socket> ws(io);
  boost::asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
  ws.handshake("127.0.0.1", "/");
  ws.text(true);

  const auto hello = read_msg(ws);
  ASSERT_TRUE(std::holds_alternative<Hello>(hello));
  EXPECT_EQ(std::get<Hello>(hello).proto_version, kProtoVersion);
  const auto config = read_msg(ws);
  ASSERT_TRUE(std::holds_alternative<ConfigMsg>(config));
  EXPECT_EQ(std::get<ConfigMsg>(config).tick_hz, 50);

  auto next_frame = [&]() {
    for (;;) {
      auto m = read_msg(ws);
      if (auto* f = std::get_if<Frame>(&m)) return *f;
    }
  };
  const Frame first = next_frame();
  ws.write(boost::asio::buffer(encode(Input{1, 4})));
  bool saw = false;
  for (int i = 0; i < 100 && !saw; ++i) saw = next_frame().user_action == 4;
  EXPECT_TRUE(saw);

  ws.write(boost::asio::buffer(std::string(R"({"type":"input","seq":2,"action":9})")));
  bool got_error = false;
  std::uint64_t last_seq = first.seq;
  for (int i = 0; i < 200 && !got_error; ++i) {
    auto m = read_msg(ws);
    if (std::holds_alternative<ErrorMsg>(m)) got_error = true;
    if (auto* f = std::get_if<Frame>(&m)) last_seq = f->seq;
  }
  EXPECT_TRUE(got_error);
  const Frame after = next_frame();
  EXPECT_GT(after.seq, last_seq);

  ws.close(websocket::close_code::normal);
  ASSERT_EQ(ended.get_future().wait_for(std::chrono::seconds(10)), std::future_status::ready);
  server.stop();
  EXPECT_GT(ended_stats.ticks, 0u);

  std::size_t logs = 0;
  for (const auto& e : fs::directory_iterator(dir)) logs += e.path().extension() == ".jsonl";
  EXPECT_EQ(logs, 1u);
  fs::remove_all(dir);
}

TEST(ResolvePort, Precedence) {
  EXPECT_EQ(resolve_port(9000, "7000", 8765), 9000);
  EXPECT_EQ(resolve_port(std::nullopt, "7000", 8765), 7000);
  EXPECT_EQ(resolve_port(std::nullopt, nullptr, 8765), 8765);
  EXPECT_EQ(resolve_port(std::nullopt, "", 8765), 8765);
  EXPECT_THROW(resolve_port(std::nullopt, "http", 8765), ConfigError);
  EXPECT_THROW(resolve_port(70000, nullptr, 8765), ConfigError);
}

}  // namespace
}  // namespace ave::bridge
