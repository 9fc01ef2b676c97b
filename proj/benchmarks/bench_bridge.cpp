#include <benchmark/benchmark.h>

#include "ave/bridge/protocol.hpp"
#include "ave/bridge/session.hpp"

namespace {

using namespace ave;

void BM_SessionTick(benchmark::State& st) {
  bridge::SessionOptions o;
  o.mode = st.range(0) ? "finetune" : "play";
  o.threaded_bonus = false;
  SeededRng rng(1);
  bridge::Session s(o, learn::ValueApproximator(lander::kCopilotObsDims, 64, 6, rng));
  int i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(s.tick(ActionId{(i++ / 7) % 6}));
}
BENCHMARK(BM_SessionTick)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_FrameEncodeDecode(benchmark::State& st) {
  bridge::Frame f;
  f.seq = 12345;
  f.x = 0.25;
  f.y = 0.8;
  f.emp_bonus = 3.5e-4;
  const bridge::WireMessage m = f;
  for (auto _ : st) benchmark::DoNotOptimize(bridge::decode(bridge::encode(m)));
}
BENCHMARK(BM_FrameEncodeDecode);

}  // namespace

BENCHMARK_MAIN();
